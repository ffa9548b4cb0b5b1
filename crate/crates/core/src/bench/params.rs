//! `key = value` parameter files.
//!
//! One pair per line; blank lines and lines starting with `#` are skipped.
//! Keys are case-sensitive and every key must be known.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{Regime, RegimeConfig};
use crate::error::{Error, Result};
use crate::group::Representation;
use crate::lattice::{parse_extents, Coords};

pub const KEYS: &[&str] = &[
    "regime",
    "group_rank",
    "representation",
    "fields",
    "mass",
    "lattice",
    "grid",
    "time_budget",
    "check",
    "cg_threshold",
    "cg_max_iterations",
    "seed",
    "enforce_floor",
    "reference_sqnorm",
    "reference_muladd",
    "reference_dirac",
];

/// Values present in a parameter file; everything else keeps the preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub regime: Option<Regime>,
    pub group_rank: Option<usize>,
    pub representation: Option<Representation>,
    pub fields: Option<usize>,
    pub mass: Option<f64>,
    pub lattice: Option<Coords>,
    pub grid: Option<Coords>,
    pub time_budget: Option<f64>,
    pub check: Option<bool>,
    pub cg_threshold: Option<f64>,
    pub cg_max_iterations: Option<usize>,
    pub seed: Option<u64>,
    pub enforce_floor: Option<bool>,
    pub reference_sqnorm: Option<f64>,
    pub reference_muladd: Option<f64>,
    pub reference_dirac: Option<f64>,
}

impl ParamOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ParamOverrides::default()
    }

    pub fn apply(&self, config: &mut RegimeConfig) {
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$src { config.$($dst).+ = v; })*
            };
        }
        set!(
            regime => regime,
            group_rank => group_rank,
            representation => representation,
            fields => fields,
            mass => mass,
            lattice => lattice,
            grid => grid,
            time_budget => time_budget,
            check => check,
            cg_threshold => cg.threshold,
            cg_max_iterations => cg.max_iterations,
            seed => seed,
            enforce_floor => enforce_floor,
        );
        if self.reference_sqnorm.is_some() {
            config.references.sqnorm = self.reference_sqnorm;
        }
        if self.reference_muladd.is_some() {
            config.references.muladd = self.reference_muladd;
        }
        if self.reference_dirac.is_some() {
            config.references.dirac = self.reference_dirac;
        }
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

fn parse_value<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("cannot parse `{s}`"))
}

pub fn parse_params(text: &str) -> Result<ParamOverrides> {
    let mut out = ParamOverrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line, message };
        let (key, value) = trimmed
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{trimmed}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |m: String| err(format!("{key}: {m}"));
        match key {
            "regime" => out.regime = Some(value.parse().map_err(bad)?),
            "group_rank" => out.group_rank = Some(parse_value(value).map_err(bad)?),
            "representation" => out.representation = Some(value.parse().map_err(bad)?),
            "fields" => out.fields = Some(parse_value(value).map_err(bad)?),
            "mass" => out.mass = Some(parse_value(value).map_err(bad)?),
            "lattice" => out.lattice = Some(parse_extents(value).map_err(bad)?),
            "grid" => out.grid = Some(parse_extents(value).map_err(bad)?),
            "time_budget" => out.time_budget = Some(parse_value(value).map_err(bad)?),
            "check" => out.check = Some(parse_bool(value).map_err(bad)?),
            "cg_threshold" => out.cg_threshold = Some(parse_value(value).map_err(bad)?),
            "cg_max_iterations" => out.cg_max_iterations = Some(parse_value(value).map_err(bad)?),
            "seed" => out.seed = Some(parse_value(value).map_err(bad)?),
            "enforce_floor" => out.enforce_floor = Some(parse_bool(value).map_err(bad)?),
            "reference_sqnorm" => out.reference_sqnorm = Some(parse_value(value).map_err(bad)?),
            "reference_muladd" => out.reference_muladd = Some(parse_value(value).map_err(bad)?),
            "reference_dirac" => out.reference_dirac = Some(parse_value(value).map_err(bad)?),
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::config::Scale;
    use proptest::prelude::*;

    #[test]
    fn single_pair() {
        let p = parse_params("mass = 0.1\n").unwrap();
        assert_eq!(
            p,
            ParamOverrides {
                mass: Some(0.1),
                ..Default::default()
            }
        );
    }

    #[test]
    fn comments_and_blanks() {
        assert!(parse_params("# comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn typo_is_rejected_with_line() {
        match parse_params("mas = 0.1") {
            Err(Error::Parse { line: 1, message }) => assert!(message.contains("unknown key")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_params("# ok\nmass 0.1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_params("\n\nfields = six"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_params("Mass = 0.1"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn overrides_apply_over_preset() {
        let text = "regime = compute\nlattice = 16x8x8x8\ngrid=2x1x1x1\ncheck = off\ncg_threshold = 1e-9\nreference_dirac = 2.5e9\n";
        let p = parse_params(text).unwrap();
        let mut c = RegimeConfig::preset(Regime::Balance, Scale::Desk);
        p.apply(&mut c);
        assert_eq!(c.regime, Regime::Compute);
        assert_eq!(c.lattice, [16, 8, 8, 8]);
        assert_eq!(c.grid, [2, 1, 1, 1]);
        assert!(!c.check);
        assert_eq!(c.cg.threshold, 1e-9);
        assert_eq!(c.references.dirac, Some(2.5e9));
        assert_eq!(c.references.sqnorm, None);
        assert_eq!(c.mass, 0.1);
    }

    proptest! {
        #[test]
        fn whitespace_around_equals_is_ignored(a in "[ \t]{0,3}", b in "[ \t]{0,3}", m in -10.0f64..10.0) {
            let p = parse_params(&format!("{a}mass{a}={b}{m}{b}\n")).unwrap();
            prop_assert_eq!(p.mass, Some(m));
        }

        #[test]
        fn every_known_key_round_trips_through_apply(seed in any::<u64>(), fields in 2usize..64) {
            let p = parse_params(&format!("seed = {seed}\nfields = {fields}\n")).unwrap();
            let mut c = RegimeConfig::preset(Regime::Comms, Scale::Desk);
            p.apply(&mut c);
            prop_assert_eq!(c.seed, seed);
            prop_assert_eq!(c.fields, fields);
        }
    }
}
