//! Formulas and automata shipped with the crate.

use crate::automata::{parse_hoa, AutomataError, Ldba};
use crate::ltl::{parse_ltl, Formula, LtlError};

pub const PARKING_FORMULA: &str =
    r#"FG(("x>10" & "x<20") | ("x>30" & "x<40")) & G!("x>20" & "x<30")"#;
pub const CARTPOLE_FORMULA: &str = r#"G("position_x>-10" & "position_x<10") & G("velocity_x>-10.0" & "velocity_x<10.0") & F("cos_theta<-0.5" & F"cos_theta>0.5")"#;
pub const HOPPER_FORMULA: &str = r#"G"torso_height>-11.0" & GF"torso_height>-10.5" & F("torso_velocity_x>1.0" & F"torso_velocity_x<0")"#;
pub const POINTMASS_REACH_FORMULA: &str = r#"F("x>1" & "y>1")"#;
pub const POINTMASS_FULL_FORMULA: &str =
    r#"G("x>-1" & "x<3") & GF"y>0.5" & F("vx>0.5" & F"vx<0.1")"#;

/// `(name, formula, HOA text)` for every bundled automaton.
pub const AUTOMATA: [(&str, &str, &str); 5] = [
    ("parking", PARKING_FORMULA, include_str!("../data/parking.hoa")),
    ("cartpole", CARTPOLE_FORMULA, include_str!("../data/cartpole.hoa")),
    ("hopper", HOPPER_FORMULA, include_str!("../data/hopper.hoa")),
    (
        "pointmass_reach",
        POINTMASS_REACH_FORMULA,
        include_str!("../data/pointmass_reach.hoa"),
    ),
    (
        "pointmass_full",
        POINTMASS_FULL_FORMULA,
        include_str!("../data/pointmass_full.hoa"),
    ),
];

const CORPUS: &str = include_str!("../data/corpus.ltl");

pub fn automaton(name: &str) -> Option<Result<Ldba, AutomataError>> {
    AUTOMATA
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, _, hoa)| parse_hoa(hoa))
}

pub fn automata() -> Result<Vec<(&'static str, Ldba)>, AutomataError> {
    AUTOMATA
        .iter()
        .map(|(n, _, hoa)| Ok((*n, parse_hoa(hoa)?)))
        .collect()
}

/// Oracle corpus formulas, all over `"a>0"`, `"b>0"`, `"c>0"`.
pub fn corpus() -> Result<Vec<Formula>, LtlError> {
    corpus_lines().map(parse_ltl).collect()
}

pub fn corpus_lines() -> impl Iterator<Item = &'static str> {
    CORPUS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}
