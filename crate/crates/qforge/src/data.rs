//! Bundled diagrams, claim tables and case files.

macro_rules! bundle {
    ($($name:literal => $path:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $path)))),*]
    };
}

static REPS: &[(&str, &str)] = bundle! {
    "an_vector" => "reps/an_vector.json",
    "b3_spin8" => "reps/b3_spin8.json",
    "cn_vector" => "reps/cn_vector.json",
    "dn_vector" => "reps/dn_vector.json",
    "d5_halfspin16" => "reps/d5_halfspin16.json",
    "e6_fund27" => "reps/e6_fund27.json",
    "e7_fund56" => "reps/e7_fund56.json",
};

static CLAIMS: &[(&str, &str)] = bundle! {
    "d5_halfspin16" => "claims/d5_halfspin16.json",
    "e6_fund27" => "claims/e6_fund27.json",
    "e7_fund56" => "claims/e7_fund56.json",
};

static CASES: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cases/all_nine.json"));

pub fn rep_names() -> impl Iterator<Item = &'static str> {
    REPS.iter().map(|(n, _)| *n)
}

pub fn rep_text(name: &str) -> Option<&'static str> {
    REPS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn claims_text(rep: &str) -> Option<&'static str> {
    CLAIMS.iter().find(|(n, _)| *n == rep).map(|(_, t)| *t)
}

pub fn cases_text() -> &'static str {
    CASES
}

/// Parses and elaborates a bundled diagram; elaboration warnings are dropped.
pub fn bundled_module(name: &str) -> Result<crate::repmod::RepModule, crate::repmod::RepError> {
    let text = rep_text(name).ok_or_else(|| crate::repmod::RepError::Schema(format!("no bundled diagram {name}")))?;
    let d = crate::repmod::parse_rep(text)?;
    Ok(crate::repmod::elaborate(&d)?.0)
}
