//! Embedded country → region lookup.
//!
//! Regions follow the UN M49 sub-region names, with Sub-Saharan Africa and
//! Latin America and the Caribbean kept as single groups. Codes missing from
//! the table map to [`OTHER`].

use crate::error::ModelError;

pub const OTHER: &str = "OTHER";

pub const SUB_SAHARAN_AFRICA: &str = "Sub-Saharan Africa";
pub const NORTHERN_AFRICA: &str = "Northern Africa";
pub const LATIN_AMERICA: &str = "Latin America and the Caribbean";
pub const NORTHERN_AMERICA: &str = "Northern America";
pub const SOUTHERN_ASIA: &str = "Southern Asia";
pub const SOUTH_EASTERN_ASIA: &str = "South-eastern Asia";
pub const EASTERN_ASIA: &str = "Eastern Asia";
pub const CENTRAL_ASIA: &str = "Central Asia";
pub const WESTERN_ASIA: &str = "Western Asia";
pub const NORTHERN_EUROPE: &str = "Northern Europe";
pub const WESTERN_EUROPE: &str = "Western Europe";
pub const SOUTHERN_EUROPE: &str = "Southern Europe";
pub const EASTERN_EUROPE: &str = "Eastern Europe";
pub const OCEANIA: &str = "Oceania";

/// The fixed 45-country pool used by the synthetic generator.
pub const COUNTRY_POOL: [&str; 45] = [
    // Sub-Saharan Africa
    "KE", "TZ", "UG", "RW", "ET", "NG", "GH", "SN", "ZA", "ZM", "MW", "MZ", "CM", "CI",
    // Northern Africa
    "EG", "MA", "TN",
    // Southern Asia
    "IN", "BD", "PK", "NP", "LK",
    // South-eastern Asia
    "ID", "PH", "VN", "TH", "KH", "MY",
    // Latin America and the Caribbean
    "BR", "MX", "CO", "PE", "CL", "AR", "GT", "HN",
    // Western Asia
    "JO", "TR",
    // Northern America
    "US", "CA",
    // Europe
    "GB", "SE", "DE", "FR", "NL",
];

const TABLE: &[(&str, &str)] = &[
    ("AO", SUB_SAHARAN_AFRICA),
    ("BF", SUB_SAHARAN_AFRICA),
    ("BI", SUB_SAHARAN_AFRICA),
    ("BJ", SUB_SAHARAN_AFRICA),
    ("BW", SUB_SAHARAN_AFRICA),
    ("CD", SUB_SAHARAN_AFRICA),
    ("CI", SUB_SAHARAN_AFRICA),
    ("CM", SUB_SAHARAN_AFRICA),
    ("ET", SUB_SAHARAN_AFRICA),
    ("GH", SUB_SAHARAN_AFRICA),
    ("GN", SUB_SAHARAN_AFRICA),
    ("KE", SUB_SAHARAN_AFRICA),
    ("LR", SUB_SAHARAN_AFRICA),
    ("MG", SUB_SAHARAN_AFRICA),
    ("ML", SUB_SAHARAN_AFRICA),
    ("MW", SUB_SAHARAN_AFRICA),
    ("MZ", SUB_SAHARAN_AFRICA),
    ("NA", SUB_SAHARAN_AFRICA),
    ("NE", SUB_SAHARAN_AFRICA),
    ("NG", SUB_SAHARAN_AFRICA),
    ("RW", SUB_SAHARAN_AFRICA),
    ("SD", SUB_SAHARAN_AFRICA),
    ("SL", SUB_SAHARAN_AFRICA),
    ("SN", SUB_SAHARAN_AFRICA),
    ("SO", SUB_SAHARAN_AFRICA),
    ("SS", SUB_SAHARAN_AFRICA),
    ("TD", SUB_SAHARAN_AFRICA),
    ("TG", SUB_SAHARAN_AFRICA),
    ("TZ", SUB_SAHARAN_AFRICA),
    ("UG", SUB_SAHARAN_AFRICA),
    ("ZA", SUB_SAHARAN_AFRICA),
    ("ZM", SUB_SAHARAN_AFRICA),
    ("ZW", SUB_SAHARAN_AFRICA),
    ("DZ", NORTHERN_AFRICA),
    ("EG", NORTHERN_AFRICA),
    ("LY", NORTHERN_AFRICA),
    ("MA", NORTHERN_AFRICA),
    ("TN", NORTHERN_AFRICA),
    ("AR", LATIN_AMERICA),
    ("BO", LATIN_AMERICA),
    ("BR", LATIN_AMERICA),
    ("CL", LATIN_AMERICA),
    ("CO", LATIN_AMERICA),
    ("CR", LATIN_AMERICA),
    ("CU", LATIN_AMERICA),
    ("DO", LATIN_AMERICA),
    ("EC", LATIN_AMERICA),
    ("GT", LATIN_AMERICA),
    ("HN", LATIN_AMERICA),
    ("HT", LATIN_AMERICA),
    ("JM", LATIN_AMERICA),
    ("MX", LATIN_AMERICA),
    ("NI", LATIN_AMERICA),
    ("PA", LATIN_AMERICA),
    ("PE", LATIN_AMERICA),
    ("PY", LATIN_AMERICA),
    ("SV", LATIN_AMERICA),
    ("UY", LATIN_AMERICA),
    ("VE", LATIN_AMERICA),
    ("CA", NORTHERN_AMERICA),
    ("US", NORTHERN_AMERICA),
    ("AF", SOUTHERN_ASIA),
    ("BD", SOUTHERN_ASIA),
    ("BT", SOUTHERN_ASIA),
    ("IN", SOUTHERN_ASIA),
    ("IR", SOUTHERN_ASIA),
    ("LK", SOUTHERN_ASIA),
    ("NP", SOUTHERN_ASIA),
    ("PK", SOUTHERN_ASIA),
    ("ID", SOUTH_EASTERN_ASIA),
    ("KH", SOUTH_EASTERN_ASIA),
    ("LA", SOUTH_EASTERN_ASIA),
    ("MM", SOUTH_EASTERN_ASIA),
    ("MY", SOUTH_EASTERN_ASIA),
    ("PH", SOUTH_EASTERN_ASIA),
    ("SG", SOUTH_EASTERN_ASIA),
    ("TH", SOUTH_EASTERN_ASIA),
    ("VN", SOUTH_EASTERN_ASIA),
    ("CN", EASTERN_ASIA),
    ("JP", EASTERN_ASIA),
    ("KR", EASTERN_ASIA),
    ("MN", EASTERN_ASIA),
    ("KG", CENTRAL_ASIA),
    ("KZ", CENTRAL_ASIA),
    ("TJ", CENTRAL_ASIA),
    ("UZ", CENTRAL_ASIA),
    ("AE", WESTERN_ASIA),
    ("IQ", WESTERN_ASIA),
    ("JO", WESTERN_ASIA),
    ("LB", WESTERN_ASIA),
    ("SA", WESTERN_ASIA),
    ("TR", WESTERN_ASIA),
    ("YE", WESTERN_ASIA),
    ("DK", NORTHERN_EUROPE),
    ("FI", NORTHERN_EUROPE),
    ("GB", NORTHERN_EUROPE),
    ("IE", NORTHERN_EUROPE),
    ("NO", NORTHERN_EUROPE),
    ("SE", NORTHERN_EUROPE),
    ("AT", WESTERN_EUROPE),
    ("BE", WESTERN_EUROPE),
    ("CH", WESTERN_EUROPE),
    ("DE", WESTERN_EUROPE),
    ("FR", WESTERN_EUROPE),
    ("LU", WESTERN_EUROPE),
    ("NL", WESTERN_EUROPE),
    ("ES", SOUTHERN_EUROPE),
    ("GR", SOUTHERN_EUROPE),
    ("IT", SOUTHERN_EUROPE),
    ("PT", SOUTHERN_EUROPE),
    ("PL", EASTERN_EUROPE),
    ("RO", EASTERN_EUROPE),
    ("UA", EASTERN_EUROPE),
    ("AU", OCEANIA),
    ("FJ", OCEANIA),
    ("NZ", OCEANIA),
    ("PG", OCEANIA),
];

/// True for two uppercase ASCII letters.
pub fn is_country_code(code: &str) -> bool {
    code.len() == 2 && code.bytes().all(|b| b.is_ascii_uppercase())
}

pub fn region_of(code: &str) -> Result<&'static str, ModelError> {
    if !is_country_code(code) {
        return Err(ModelError::MalformedCountry(code.to_string()));
    }
    Ok(TABLE
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, region)| *region)
        .unwrap_or(OTHER))
}
