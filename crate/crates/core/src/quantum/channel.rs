//! Angle-dependent dephasing channels used as local extraction maps.
//!
//! Every channel here has the two-term form
//! `ρ ↦ (1+w)/2 ρ + (1−w)/2 Γ ρ Γ` with `Γ` a Hermitian unitary and
//! `w ∈ [0, 1]`. Such a channel is CPTP, unital and self-adjoint, and it
//! commutes with conjugation by `Γ`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix};

use super::instrument::lift;
use super::settings::{check_angle, ideal_bob_angle, Inequality, Side};
use super::state::DensityMatrix;

/// Below this distance from π/4 the ideal Bob angle is treated as exactly π/4.
const SYMMETRIC_POINT_TOL: f64 = 1e-12;

/// Any single-qubit channel given by Kraus operators.
pub trait QubitChannel {
    fn kraus(&self) -> Vec<ComplexMatrix>;

    /// Action on a 2x2 operator.
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus()
            .iter()
            .fold(ComplexMatrix::zeros(2).unwrap(), |acc, k| {
                &acc + &rho.conjugate_by(k)
            })
    }
}

/// Direction of a dephasing channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DephasingAxis {
    /// `(σz + σx)/√2`
    H,
    /// `(σz − σx)/√2`
    V,
    X,
    Z,
}

impl DephasingAxis {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            DephasingAxis::H => pauli::h(),
            DephasingAxis::V => pauli::v(),
            DephasingAxis::X => pauli::x(),
            DephasingAxis::Z => pauli::z(),
        }
    }
}

/// `ρ ↦ (1+w)/2 ρ + (1−w)/2 Γ ρ Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dephasing {
    /// Weight `w ∈ [0, 1]`; 1 is the identity, 0 full dephasing.
    pub weight: f64,
    pub axis: DephasingAxis,
}

impl Dephasing {
    pub fn identity() -> Self {
        Self {
            weight: 1.0,
            axis: DephasingAxis::Z,
        }
    }
}

impl QubitChannel for Dephasing {
    fn kraus(&self) -> Vec<ComplexMatrix> {
        vec![
            pauli::identity().scale(((1.0 + self.weight) / 2.0).sqrt()),
            self.axis.matrix().scale(((1.0 - self.weight) / 2.0).sqrt()),
        ]
    }

    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let g = self.axis.matrix();
        let flipped = rho.conjugate_by(&g);
        &rho.scale((1.0 + self.weight) / 2.0) + &flipped.scale((1.0 - self.weight) / 2.0)
    }
}

/// Channel given by an explicit Kraus list.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel(pub Vec<ComplexMatrix>);

impl QubitChannel for KrausChannel {
    fn kraus(&self) -> Vec<ComplexMatrix> {
        self.0.clone()
    }
}

/// `g(t) = (1+√2)(cos t + sin t − 1)` on `[0, π/2]`, zero elsewhere, clamped to `[0, 1]`.
///
/// `g(π/4) = 1`, `g(0) = g(π/2) = 0` and `g(π/2 − t) = g(t)`.
pub fn dephasing_weight(t: f64) -> f64 {
    if !(0.0..=FRAC_PI_2).contains(&t) {
        return 0.0;
    }
    ((1.0 + SQRT_2) * (t.cos() + t.sin() - 1.0)).clamp(0.0, 1.0)
}

/// Alice's extraction channel: dephasing toward `H` for `a ≤ π/4`, toward `V` above.
pub fn dephasing_alice(a: f64) -> Result<Dephasing> {
    check_angle("a", a)?;
    Ok(Dephasing {
        weight: dephasing_weight(a),
        axis: if a <= FRAC_PI_4 {
            DephasingAxis::H
        } else {
            DephasingAxis::V
        },
    })
}

/// Choice of the offset `δ_θ` in Bob's angle map `t_θ(b)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaVariant {
    /// `t = ln((b − δ)/δ)/γ` with `δ = b_θ²/(π² − 2b_θ)`.
    Printed,
    /// `t = ln((b − δ)/δ)/γ` with `δ = 2b_θ²/π`.
    Linear,
    /// `t = ln((b + δ)/δ)/γ` with `δ = b_θ²/(π/2 − 2b_θ)`.
    ///
    /// A monotone bijection of `[0, π/2]` with `t(b_θ) = π/4`, reducing to
    /// `t(b) = b` as `b_θ → π/4`.
    #[default]
    Logarithmic,
}

impl DeltaVariant {
    pub const ALL: [DeltaVariant; 3] = [
        DeltaVariant::Printed,
        DeltaVariant::Linear,
        DeltaVariant::Logarithmic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeltaVariant::Printed => "printed",
            DeltaVariant::Linear => "linear",
            DeltaVariant::Logarithmic => "logarithmic",
        }
    }

    /// Whether the variant maps the ideal angle to the channel's identity point.
    pub fn identity_at_ideal_angle(self, b_theta: f64) -> bool {
        bob_angle_map(b_theta, b_theta, self)
            .map(|t| (t - FRAC_PI_4).abs() < 1e-9)
            .unwrap_or(false)
    }
}

impl std::fmt::Display for DeltaVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DeltaVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        DeltaVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown delta variant `{s}`"))
    }
}

/// Checks the printed offset first and falls back to the logarithmic map
/// when it does not put the identity point at `b_θ`.
pub fn resolve_delta_variant(b_theta: f64) -> DeltaVariant {
    if DeltaVariant::Printed.identity_at_ideal_angle(b_theta) {
        DeltaVariant::Printed
    } else {
        DeltaVariant::Logarithmic
    }
}

/// Bob's angle map `t_θ(b)`; `None` where the logarithm is undefined.
pub fn bob_angle_map(b: f64, b_theta: f64, variant: DeltaVariant) -> Option<f64> {
    if (b_theta - FRAC_PI_4).abs() < SYMMETRIC_POINT_TOL {
        return Some(b);
    }
    match variant {
        DeltaVariant::Printed | DeltaVariant::Linear => {
            let gamma = (4.0 / PI) * ((FRAC_PI_2 - b_theta) / b_theta).ln();
            let delta = match variant {
                DeltaVariant::Printed => b_theta * b_theta / (PI * PI - 2.0 * b_theta),
                _ => 2.0 * b_theta * b_theta / PI,
            };
            let ratio = (b - delta) / delta;
            (ratio > 0.0).then(|| ratio.ln() / gamma)
        }
        DeltaVariant::Logarithmic => {
            // γ = (4/π) ln((π/2 − b_θ)/b_θ) and b/δ, both small near b_θ = π/4.
            let excess = (FRAC_PI_2 - 2.0 * b_theta) / b_theta;
            let gamma = (4.0 / PI) * excess.ln_1p();
            let ratio = b * (FRAC_PI_2 - 2.0 * b_theta) / (b_theta * b_theta);
            (ratio > -1.0).then(|| ratio.ln_1p() / gamma)
        }
    }
}

/// Bob's extraction channel at angle `b`: weight `g(t_θ(b))`, dephasing toward
/// σx for `b ≤ b_θ` and toward σz above.
pub fn dephasing_bob(
    b: f64,
    theta: f64,
    inequality: Inequality,
    variant: DeltaVariant,
) -> Result<Dephasing> {
    check_angle("b", b)?;
    super::settings::check_theta(theta)?;
    let b_theta = ideal_bob_angle(theta, inequality);
    Ok(bob_channel_for_ideal_angle(b, b_theta, variant))
}

pub(crate) fn bob_channel_for_ideal_angle(
    b: f64,
    b_theta: f64,
    variant: DeltaVariant,
) -> Dephasing {
    let weight = bob_angle_map(b, b_theta, variant).map_or(0.0, dephasing_weight);
    Dephasing {
        weight,
        axis: if b <= b_theta {
            DephasingAxis::X
        } else {
            DephasingAxis::Z
        },
    }
}

/// `(Λ ⊗ id)[ρ]` or `(id ⊗ Λ)[ρ]` on a two-qubit state.
pub fn apply_one_sided(
    channel: &impl QubitChannel,
    rho: &DensityMatrix,
    side: Side,
) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 4,
        });
    }
    let out = apply_one_sided_operator(channel, rho.matrix(), side);
    DensityMatrix::new(out)
}

/// As [`apply_one_sided`] for an arbitrary 4x4 operator.
pub fn apply_one_sided_operator(
    channel: &impl QubitChannel,
    m: &ComplexMatrix,
    side: Side,
) -> ComplexMatrix {
    channel
        .kraus()
        .iter()
        .fold(ComplexMatrix::zeros(4).unwrap(), |acc, k| {
            &acc + &m.conjugate_by(&lift(k, side))
        })
}

/// `(Λ_A ⊗ Λ_B)[M]`.
pub fn apply_local_pair(
    alice: &impl QubitChannel,
    bob: &impl QubitChannel,
    m: &ComplexMatrix,
) -> ComplexMatrix {
    let half = apply_one_sided_operator(alice, m, Side::Alice);
    apply_one_sided_operator(bob, &half, Side::Bob)
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)` of a qubit channel.
pub fn choi_matrix(channel: &impl QubitChannel) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2).unwrap();
            unit[(i, j)] = 1.0.into();
            let image = channel.apply(&unit);
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = image[(k, l)];
                }
            }
        }
    }
    out
}
