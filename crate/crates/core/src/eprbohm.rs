//! Analytic EPR-Bohm toolkit: the two-qubit singlet, angle-parameterized
//! ±1-valued polarization observables on each tensor leg, their
//! correlations, and inequality reports.
//!
//! Observables live in the X–Z plane of each qubit: a setting at angle θ
//! measures cos θ·Z + sin θ·X on its particle. In the spin-half convention
//! the singlet correlation is E(θa, θb) = −cos(θa − θb); the photon
//! convention doubles every angle, giving −cos 2(θa − θb).

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{
    pauli_x, pauli_z, spectral_decompose, Complex64, ComplexMatrix, SpectralDecomposition,
    StateVector, DEFAULT_DEGENERACY_TOL,
};
use crate::sequential::{born_probability, covariance, luders_collapse, sequential_joint};

/// Which particle of the pair a setting applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

/// Angle convention for ±1-valued polarization observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// E(θa, θb) = −cos(θa − θb).
    SpinHalf,
    /// Polarizer angles count double: E(θa, θb) = −cos 2(θa − θb).
    Photon,
}

impl Convention {
    /// Angle actually used in the Bloch-plane rotation.
    pub fn effective_angle(self, angle: f64) -> f64 {
        match self {
            Convention::SpinHalf => angle,
            Convention::Photon => 2.0 * angle,
        }
    }
}

/// Analyzer orientation for one particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSetting {
    /// Radians, normalized to [0, 2π).
    pub angle: f64,
    pub particle: Particle,
    pub convention: Convention,
}

impl AngleSetting {
    pub fn new(angle: f64, particle: Particle, convention: Convention) -> Self {
        Self { angle: angle.rem_euclid(TAU), particle, convention }
    }

    pub fn spin_half(angle: f64, particle: Particle) -> Self {
        Self::new(angle, particle, Convention::SpinHalf)
    }

    pub fn photon(angle: f64, particle: Particle) -> Self {
        Self::new(angle, particle, Convention::Photon)
    }

    pub fn effective_angle(&self) -> f64 {
        self.convention.effective_angle(self.angle)
    }
}

/// The rotationally invariant two-qubit singlet (|01⟩ − |10⟩)/√2.
pub fn singlet_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ])
    .expect("singlet amplitudes are unit norm")
}

/// ±1-valued observable cos θ·Z + sin θ·X placed on the setting's tensor leg.
///
/// Eigenvalues are −1 and +1, each with a rank-2 projector in the
/// 4-dimensional pair space.
pub fn leg_observable(setting: &AngleSetting) -> SpectralDecomposition {
    let theta = setting.effective_angle();
    let single = pauli_z()
        .scale(Complex64::new(theta.cos(), 0.0))
        .add(&pauli_x().scale(Complex64::new(theta.sin(), 0.0)))
        .expect("2x2 shapes match");
    let id = ComplexMatrix::identity(2);
    let (full, leg) = match setting.particle {
        Particle::First => (single.kron(&id), 1),
        Particle::Second => (id.kron(&single), 2),
    };
    spectral_decompose(&full, DEFAULT_DEGENERACY_TOL)
        .expect("a bounded 4x4 Hermitian observable diagonalizes")
        .named(format!("leg{leg}:{:.6}", setting.angle))
}

fn require_pair(a: &AngleSetting, b: &AngleSetting) -> Result<()> {
    if a.particle != Particle::First || b.particle != Particle::Second {
        return Err(Error::LegMismatch(format!("got ({:?}, {:?})", a.particle, b.particle)));
    }
    Ok(())
}

/// Singlet correlation ⟨a⁽¹⁾ b⁽²⁾⟩ of the two recorded ±1 values.
pub fn correlation(a: &AngleSetting, b: &AngleSetting) -> Result<f64> {
    require_pair(a, b)?;
    let table = sequential_joint(&singlet_state(), &leg_observable(a), &leg_observable(b))?;
    Ok(covariance(&table))
}

/// The correlation split along the first measurement's outcome branches.
///
/// The two branch pieces recombine as
/// `p_plus · e_given_plus − p_minus · e_given_minus`, the −1 eigenvalue of
/// the first observable carrying the minus sign. `direct` is the one-shot
/// covariance for comparison; the two agree to numerical precision.
#[derive(Debug, Clone)]
pub struct ConditionalDecomposition {
    /// P(a = +1) under the singlet preparation.
    pub p_plus: f64,
    /// E[b | a = +1], the mean of b's ±1 outcome in the collapsed branch.
    pub e_given_plus: f64,
    /// P(a = −1).
    pub p_minus: f64,
    /// E[b | a = −1].
    pub e_given_minus: f64,
    /// p_plus·e_given_plus − p_minus·e_given_minus.
    pub recombined: f64,
    /// covariance computed in one piece.
    pub direct: f64,
}

impl ConditionalDecomposition {
    /// |recombined − direct|.
    pub fn identity_error(&self) -> f64 {
        (self.recombined - self.direct).abs()
    }
}

/// Decompose ⟨a⁽¹⁾ b⁽²⁾⟩ into first-outcome branches via collapse + Born.
pub fn conditional_decomposition(
    a: &AngleSetting,
    b: &AngleSetting,
) -> Result<ConditionalDecomposition> {
    require_pair(a, b)?;
    let psi = singlet_state();
    let obs_a = leg_observable(a);
    let obs_b = leg_observable(b);
    let plus = obs_a
        .outcome_index(1.0, 1e-6)
        .ok_or_else(|| Error::InvalidArgument("missing +1 outcome".into()))?;
    let minus = obs_a
        .outcome_index(-1.0, 1e-6)
        .ok_or_else(|| Error::InvalidArgument("missing -1 outcome".into()))?;

    let branch_mean = |alpha_index: usize| -> Result<f64> {
        let collapsed = luders_collapse(&psi, &obs_a, alpha_index)?;
        let mut mean = 0.0;
        for (j, &beta) in obs_b.eigenvalues().iter().enumerate() {
            mean += beta * born_probability(&collapsed, &obs_b, j)?;
        }
        Ok(mean)
    };

    let p_plus = born_probability(&psi, &obs_a, plus)?;
    let p_minus = born_probability(&psi, &obs_a, minus)?;
    let e_given_plus = branch_mean(plus)?;
    let e_given_minus = branch_mean(minus)?;
    let recombined = p_plus * e_given_plus - p_minus * e_given_minus;
    let direct = covariance(&sequential_joint(&psi, &obs_a, &obs_b)?);

    Ok(ConditionalDecomposition { p_plus, e_given_plus, p_minus, e_given_minus, recombined, direct })
}

/// Four-setting combination S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′).
pub fn chsh(
    a: &AngleSetting,
    a2: &AngleSetting,
    b: &AngleSetting,
    b2: &AngleSetting,
) -> Result<f64> {
    Ok(correlation(a, b)? - correlation(a, b2)? + correlation(a2, b)? + correlation(a2, b2)?)
}

/// Named map from ordered setting pairs to correlation values in [−1, 1].
#[derive(Debug, Clone, Default)]
pub struct CorrelationSet {
    values: BTreeMap<(String, String), f64>,
}

impl CorrelationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: impl Into<String>, y: impl Into<String>, value: f64) -> Result<()> {
        if value.abs() > 1.0 + 1e-12 {
            return Err(Error::CorrelationOutOfRange(value));
        }
        self.values.insert((x.into(), y.into()), value);
        Ok(())
    }

    pub fn get(&self, x: &str, y: &str) -> Option<f64> {
        self.values.get(&(x.to_string(), y.to_string())).copied()
    }

    /// Like `get` but with the module's missing-correlation error.
    pub fn require(&self, x: &str, y: &str) -> Result<f64> {
        self.get(x, y)
            .ok_or_else(|| Error::MissingCorrelation(x.to_string(), y.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &f64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Three-setting inequality report; both printed variants are evaluated and
/// neither is silently "corrected" into the other.
#[derive(Debug, Clone)]
pub struct BellReport {
    pub e_ab: f64,
    pub e_bc: f64,
    pub e_ac: f64,
    /// |E(a,b) − E(b,c)| ≤ 1 − E(a,c), the variant chaining adjacent pairs.
    pub chained: crate::kolmogorov::FacetEvaluation,
    /// |E(a,b) − E(a,c)| ≤ 1 + E(b,c), Bell's 1964 arrangement.
    pub original: crate::kolmogorov::FacetEvaluation,
}

/// Evaluate both three-setting inequality variants on singlet correlations.
///
/// Only the angles (and conventions) of the three settings matter here: each
/// correlation is computed with its first argument on particle 1 and its
/// second on particle 2, mirroring how b appears as b⁽¹⁾ in one pair and
/// b⁽²⁾ in another.
pub fn bell_inequality_report(
    a: &AngleSetting,
    b: &AngleSetting,
    c: &AngleSetting,
) -> Result<BellReport> {
    let first = |s: &AngleSetting| AngleSetting::new(s.angle, Particle::First, s.convention);
    let second = |s: &AngleSetting| AngleSetting::new(s.angle, Particle::Second, s.convention);

    let e_ab = correlation(&first(a), &second(b))?;
    let e_bc = correlation(&first(b), &second(c))?;
    let e_ac = correlation(&first(a), &second(c))?;

    let mut set = CorrelationSet::new();
    set.insert("a", "b", e_ab)?;
    set.insert("b", "c", e_bc)?;
    set.insert("a", "c", e_ac)?;

    let chained = crate::kolmogorov::evaluate_bell_facet(&set, crate::kolmogorov::BellForm::Chained)?;
    let original =
        crate::kolmogorov::evaluate_bell_facet(&set, crate::kolmogorov::BellForm::Original)?;

    Ok(BellReport { e_ab, e_bc, e_ac, chained, original })
}
