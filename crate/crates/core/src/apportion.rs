//! Largest-remainder apportionment.

use crate::error::QuotaError;

/// Hands out `extra` single units to the entries with the largest remainders.
/// Equal remainders go to the earlier entry.
fn distribute<R, F>(floors: &mut [u64], remainders: &[R], mut extra: u64, cmp: F)
where
    F: Fn(&R, &R) -> std::cmp::Ordering,
{
    let mut order: Vec<usize> = (0..floors.len()).collect();
    // stable sort keeps list order among equal remainders
    order.sort_by(|&a, &b| cmp(&remainders[b], &remainders[a]));
    let mut i = 0;
    while extra > 0 && !order.is_empty() {
        floors[order[i % order.len()]] += 1;
        extra -= 1;
        i += 1;
    }
}

/// Splits `n` units across labelled percentage shares so the counts sum to `n`.
pub fn quota_split<L: Clone>(n: u64, shares: &[(L, u32)]) -> Result<Vec<(L, u64)>, QuotaError> {
    if n == 0 {
        return Err(QuotaError::ZeroUnits);
    }
    let sum: u32 = shares.iter().map(|(_, p)| *p).sum();
    if sum != 100 {
        return Err(QuotaError::ShareSum(sum));
    }
    let mut floors: Vec<u64> = shares.iter().map(|(_, p)| n * u64::from(*p) / 100).collect();
    // remainders in hundredths of a unit, exact
    let remainders: Vec<u64> = shares.iter().map(|(_, p)| n * u64::from(*p) % 100).collect();
    let extra = n - floors.iter().sum::<u64>();
    distribute(&mut floors, &remainders, extra, |a, b| a.cmp(b));
    Ok(shares.iter().map(|(l, _)| l.clone()).zip(floors).collect())
}

/// Like [`quota_split`] but tolerates `n == 0` (every count zero).
pub fn quota_split_or_empty<L: Clone>(
    n: u64,
    shares: &[(L, u32)],
) -> Result<Vec<(L, u64)>, QuotaError> {
    if n == 0 {
        let sum: u32 = shares.iter().map(|(_, p)| *p).sum();
        if sum != 100 {
            return Err(QuotaError::ShareSum(sum));
        }
        return Ok(shares.iter().map(|(l, _)| (l.clone(), 0)).collect());
    }
    quota_split(n, shares)
}

/// Rounds non-negative values to integer units so they sum to `target`.
pub fn round_to_sum(values: &[f64], target: u64) -> Vec<u64> {
    let mut floors: Vec<u64> = values.iter().map(|v| v.max(0.0).floor() as u64).collect();
    let remainders: Vec<f64> = values.iter().zip(&floors).map(|(v, f)| v.max(0.0) - *f as f64).collect();
    let have: u64 = floors.iter().sum();
    if target >= have {
        distribute(&mut floors, &remainders, target - have, |a, b| a.total_cmp(b));
    } else {
        // take units back from the smallest remainders first
        let mut deficit = have - target;
        let mut order: Vec<usize> = (0..floors.len()).collect();
        order.sort_by(|&a, &b| remainders[a].total_cmp(&remainders[b]));
        for i in order.into_iter().cycle() {
            if deficit == 0 {
                break;
            }
            if floors[i] > 0 {
                floors[i] -= 1;
                deficit -= 1;
            }
        }
    }
    floors
}
