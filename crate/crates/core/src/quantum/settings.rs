//! Measurement-angle parametrization of the two-setting observables.
//!
//! Alice: `A_0(a) = cos a H + sin a V`, `A_1(a) = cos a H − sin a V`.
//! Bob:   `B_0(b) = cos b σx + sin b σz`, `B_1(b) = cos b σx − sin b σz`.
//!
//! Both angles live in `[0, π/2]` and equal half the angle between the two
//! observables of a party.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Result};
use crate::matrix::{pauli, ComplexMatrix};

/// Smallest θ accepted by the Bell expressions; θ = 0 is singular.
pub const THETA_MIN: f64 = 0.05;

/// Which party holds a qubit. Alice is always the left tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

/// The family of Bell inequality used to self-test the post-measurement states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inequality {
    New,
    Tilted,
}

impl Inequality {
    pub fn as_str(self) -> &'static str {
        match self {
            Inequality::New => "new",
            Inequality::Tilted => "tilted",
        }
    }
}

impl std::fmt::Display for Inequality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Inequality {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "new" => Ok(Inequality::New),
            "tilted" => Ok(Inequality::Tilted),
            other => Err(format!(
                "unknown inequality `{other}` (expected new|tilted)"
            )),
        }
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    check_domain("theta", theta, THETA_MIN, FRAC_PI_4)
}

pub(crate) fn check_angle(name: &'static str, angle: f64) -> Result<()> {
    check_domain(name, angle, 0.0, FRAC_PI_2)
}

/// `b_θ = arctan sqrt((1 + cos²2θ / 2) / sin²2θ)`.
pub fn b_theta_new(theta: f64) -> f64 {
    let (s2, c2) = (2.0 * theta).sin_cos();
    ((1.0 + 0.5 * c2 * c2) / (s2 * s2)).sqrt().atan()
}

/// Ideal half-angle of Bob's tilted-CHSH observables in this parametrization.
///
/// Bob's angle is measured from σx here, so the familiar `arctan(sin 2θ)`
/// (measured from σz) becomes its complement `arctan(1 / sin 2θ)`.
pub fn b_theta_tilted(theta: f64) -> f64 {
    (1.0 / (2.0 * theta).sin()).atan()
}

/// Bob's ideal angle for the given inequality.
pub fn ideal_bob_angle(theta: f64, inequality: Inequality) -> f64 {
    match inequality {
        Inequality::New => b_theta_new(theta),
        Inequality::Tilted => b_theta_tilted(theta),
    }
}

/// Angles at which `|φ_θ^0⟩` reaches the quantum bound of the new inequality:
/// `A_0 = σz`, `A_1 = σx`, `B_{0/1} = cos b_θ σx ± sin b_θ σz`.
pub fn ideal_settings(theta: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    Ok((FRAC_PI_4, b_theta_new(theta)))
}

/// One of the four parametrized ±1-valued qubit observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitObservable {
    pub angle: f64,
    pub side: Side,
    /// 0 or 1.
    pub index: usize,
}

impl QubitObservable {
    pub fn new(angle: f64, side: Side, index: usize) -> Result<Self> {
        check_angle("angle", angle)?;
        if index > 1 {
            return Err(crate::Error::Structural(format!(
                "observable index {index} (expected 0 or 1)"
            )));
        }
        Ok(Self { angle, side, index })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let sign = if self.index == 0 { 1.0 } else { -1.0 };
        let (s, c) = self.angle.sin_cos();
        let (first, second) = match self.side {
            Side::Alice => (pauli::h(), pauli::v()),
            Side::Bob => (pauli::x(), pauli::z()),
        };
        &first.scale(c) + &second.scale(sign * s)
    }
}

/// `[A_0(a), A_1(a)]`.
pub fn alice_observables(a: f64) -> [ComplexMatrix; 2] {
    let (s, c) = a.sin_cos();
    let (h, v) = (pauli::h(), pauli::v());
    [&h.scale(c) + &v.scale(s), &h.scale(c) - &v.scale(s)]
}

/// `[B_0(b), B_1(b)]`.
pub fn bob_observables(b: f64) -> [ComplexMatrix; 2] {
    let (s, c) = b.sin_cos();
    let (x, z) = (pauli::x(), pauli::z());
    [&x.scale(c) + &z.scale(s), &x.scale(c) - &z.scale(s)]
}
