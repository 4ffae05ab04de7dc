//! The shipped example distributions, embedded at compile time.

use crate::distmodel::DistributionSpec;

pub const BERNOULLI: &str = include_str!("../../../fixtures/bernoulli.json");
pub const SQUARE: &str = include_str!("../../../fixtures/square.json");
pub const EX_NTS: &str = include_str!("../../../fixtures/ex-nts.json");
pub const TWO_EXP: &str = include_str!("../../../fixtures/two-exp.json");
pub const EXP1D: &str = include_str!("../../../fixtures/exp1d.json");
pub const EXP_POLY_23: &str = include_str!("../../../fixtures/exp-poly-23.json");

/// `(file stem, JSON text)` for every fixture.
pub const ALL: [(&str, &str); 6] = [
    ("bernoulli", BERNOULLI),
    ("square", SQUARE),
    ("ex-nts", EX_NTS),
    ("two-exp", TWO_EXP),
    ("exp1d", EXP1D),
    ("exp-poly-23", EXP_POLY_23),
];

fn load(text: &str) -> DistributionSpec {
    DistributionSpec::from_json(text).expect("shipped fixture is valid")
}

/// Bernoulli(½) on {0, 1}.
pub fn bernoulli() -> DistributionSpec {
    load(BERNOULLI)
}

/// Atoms of mass ¼ at the vertices of the unit square.
pub fn square() -> DistributionSpec {
    load(SQUARE)
}

/// ½·(E₁, E₂) + ½·(0, T) with E_i standard exponential and T having density
/// proportional to `e^{-2y}/(1+y^3)`: steep, not totally steep, and without
/// the projection property.
pub fn ex_nts() -> DistributionSpec {
    load(EX_NTS)
}

/// Two independent standard exponentials.
pub fn two_exp() -> DistributionSpec {
    load(TWO_EXP)
}

pub fn exp1d() -> DistributionSpec {
    load(EXP1D)
}

/// The 1-D law with density proportional to `e^{-2y}/(1+y^3)`.
pub fn exp_poly_23() -> DistributionSpec {
    load(EXP_POLY_23)
}

pub fn all() -> Vec<DistributionSpec> {
    ALL.iter().map(|(_, t)| load(t)).collect()
}
