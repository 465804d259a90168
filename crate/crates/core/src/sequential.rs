//! Sequential (conditional) measurement calculus.
//!
//! A two-observable joint probability is read here as the statistics of an
//! ordered pair of measurements: first measure `a` on the prepared ensemble,
//! keep the sub-ensemble where `a = α` (projecting and renormalizing the
//! state), then measure `b` on it. The joint weight for the ordered pair of
//! outcomes is
//!
//! ```text
//! Q(a = α then b = β) = ‖P_β P_α ψ‖²  =  P(a = α) · P(b = β | a = α)
//! ```
//!
//! For commuting observables both measurement orders give the same table and
//! the order can be dropped; for noncommuting ones they generally differ, and
//! [`order_symmetry_gap`] quantifies by how much.

use crate::error::{Error, Result};
use crate::hilbert::{norm_sqr, SpectralDecomposition, StateVector};

/// Tolerated numerical undershoot below 0 before a probability is an error.
const PROB_NOISE_FLOOR: f64 = 1e-12;
/// Conditioning probabilities at or below this are treated as zero.
const ZERO_PROB_TOL: f64 = 1e-14;

/// Squash float noise at the edges of [0, 1]; reject anything worse
/// (including NaN).
fn clamp_probability(p: f64) -> Result<f64> {
    if !(-PROB_NOISE_FLOOR..=1.0 + 1e-9).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn check_dims(psi: &StateVector, obs: &SpectralDecomposition) -> Result<()> {
    if psi.dim() != obs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs observable dim {}",
            psi.dim(),
            obs.dim()
        )));
    }
    Ok(())
}

/// Probability distribution over the outcomes of one observable.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// P(a = α) = ‖P_α ψ‖² for the outcome at `outcome_index`.
pub fn born_probability(
    psi: &StateVector,
    obs: &SpectralDecomposition,
    outcome_index: usize,
) -> Result<f64> {
    check_dims(psi, obs)?;
    let projector = obs.projector(outcome_index)?;
    clamp_probability(norm_sqr(&projector.mul_vec(psi.amplitudes())?))
}

/// Full outcome distribution of one measurement on ψ.
pub fn born_distribution(psi: &StateVector, obs: &SpectralDecomposition) -> Result<OutcomeDistribution> {
    let probabilities = (0..obs.outcome_count())
        .map(|i| born_probability(psi, obs, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeDistribution { outcomes: obs.eigenvalues().to_vec(), probabilities })
}

/// Post-measurement state P_α ψ / ‖P_α ψ‖ after observing the outcome at
/// `outcome_index`.
///
/// Collapsing onto a zero-probability outcome is undefined and reported as an
/// error rather than a NaN state: there is no sub-ensemble to condition on.
pub fn luders_collapse(
    psi: &StateVector,
    obs: &SpectralDecomposition,
    outcome_index: usize,
) -> Result<StateVector> {
    check_dims(psi, obs)?;
    let projector = obs.projector(outcome_index)?;
    let projected = projector.mul_vec(psi.amplitudes())?;
    let p = norm_sqr(&projected);
    if p <= ZERO_PROB_TOL {
        return Err(Error::ZeroProbabilityOutcome(p));
    }
    StateVector::normalized(projected)
}

/// P(b = β | a = α) = ‖P_β P_α ψ‖² / ‖P_α ψ‖².
///
/// Equivalently the Born probability of β in the collapsed state: measuring
/// `b` happens on the filtered sub-ensemble where `a = α` occurred first.
pub fn conditional_probability(
    psi: &StateVector,
    second: &SpectralDecomposition,
    beta_index: usize,
    first: &SpectralDecomposition,
    alpha_index: usize,
) -> Result<f64> {
    check_dims(psi, first)?;
    check_dims(psi, second)?;
    let p_first = obs_projection_weight(psi, first, alpha_index)?;
    if p_first <= ZERO_PROB_TOL {
        return Err(Error::ZeroProbabilityOutcome(p_first));
    }
    let chained = chained_weight(psi, first, alpha_index, second, beta_index)?;
    clamp_probability(chained / p_first)
}

fn obs_projection_weight(
    psi: &StateVector,
    obs: &SpectralDecomposition,
    index: usize,
) -> Result<f64> {
    Ok(norm_sqr(&obs.projector(index)?.mul_vec(psi.amplitudes())?))
}

/// ‖P_β P_α ψ‖², the unnormalized two-step weight.
fn chained_weight(
    psi: &StateVector,
    first: &SpectralDecomposition,
    alpha_index: usize,
    second: &SpectralDecomposition,
    beta_index: usize,
) -> Result<f64> {
    let after_first = first.projector(alpha_index)?.mul_vec(psi.amplitudes())?;
    let after_second = second.projector(beta_index)?.mul_vec(&after_first)?;
    Ok(norm_sqr(&after_second))
}

/// Ordered-pair joint table Q(first = αᵢ then second = βⱼ).
#[derive(Debug, Clone)]
pub struct SequentialJointTable {
    pub first_outcomes: Vec<f64>,
    pub second_outcomes: Vec<f64>,
    /// `q[i][j]` = Q(first = `first_outcomes[i]`, second = `second_outcomes[j]`).
    pub q: Vec<Vec<f64>>,
    /// Labels of the (first, second) observables, in measurement order.
    pub order_label: (String, String),
}

impl SequentialJointTable {
    pub fn probability(&self, i: usize, j: usize) -> f64 {
        self.q[i][j]
    }

    pub fn total(&self) -> f64 {
        self.q.iter().flatten().sum()
    }

    /// Row sums: the marginal distribution of the first measurement.
    pub fn first_marginal(&self) -> Vec<f64> {
        self.q.iter().map(|row| row.iter().sum()).collect()
    }

    /// Column sums: the marginal distribution of the second measurement.
    pub fn second_marginal(&self) -> Vec<f64> {
        (0..self.second_outcomes.len())
            .map(|j| self.q.iter().map(|row| row[j]).sum())
            .collect()
    }
}

/// Build the full ordered joint table `q[i][j]` = ‖P_βⱼ P_αᵢ ψ‖².
pub fn sequential_joint(
    psi: &StateVector,
    first: &SpectralDecomposition,
    second: &SpectralDecomposition,
) -> Result<SequentialJointTable> {
    check_dims(psi, first)?;
    check_dims(psi, second)?;
    let mut q = Vec::with_capacity(first.outcome_count());
    for i in 0..first.outcome_count() {
        let mut row = Vec::with_capacity(second.outcome_count());
        for j in 0..second.outcome_count() {
            row.push(clamp_probability(chained_weight(psi, first, i, second, j)?)?);
        }
        q.push(row);
    }
    Ok(SequentialJointTable {
        first_outcomes: first.eigenvalues().to_vec(),
        second_outcomes: second.eigenvalues().to_vec(),
        q,
        order_label: (first.label().to_string(), second.label().to_string()),
    })
}

/// max over (α, β) of |Q(a = α then b = β) − Q(b = β then a = α)|.
///
/// Zero whenever the operators commute; generally positive otherwise, i.e.
/// the two measurement orders are distinct experiments.
pub fn order_symmetry_gap(
    psi: &StateVector,
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<f64> {
    let ab = sequential_joint(psi, a, b)?;
    let ba = sequential_joint(psi, b, a)?;
    let mut gap: f64 = 0.0;
    for i in 0..ab.first_outcomes.len() {
        for j in 0..ab.second_outcomes.len() {
            gap = gap.max((ab.q[i][j] - ba.q[j][i]).abs());
        }
    }
    Ok(gap)
}

/// Σᵢⱼ αᵢ βⱼ `q[i][j]` — the covariance of the two recorded values.
pub fn covariance(table: &SequentialJointTable) -> f64 {
    let mut acc = 0.0;
    for (i, &alpha) in table.first_outcomes.iter().enumerate() {
        for (j, &beta) in table.second_outcomes.iter().enumerate() {
            acc += alpha * beta * table.q[i][j];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        pauli_x, pauli_z, spectral_decompose, ComplexMatrix, Complex64, DEFAULT_DEGENERACY_TOL,
    };

    fn z() -> SpectralDecomposition {
        spectral_decompose(&pauli_z(), DEFAULT_DEGENERACY_TOL).unwrap().named("z")
    }

    fn x() -> SpectralDecomposition {
        spectral_decompose(&pauli_x(), DEFAULT_DEGENERACY_TOL).unwrap().named("x")
    }

    fn ket0() -> StateVector {
        StateVector::basis(2, 0).unwrap()
    }

    fn plus() -> StateVector {
        StateVector::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
    }

    fn singlet() -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        StateVector::new(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap()
    }

    fn z_leg1() -> SpectralDecomposition {
        let op = pauli_z().kron(&ComplexMatrix::identity(2));
        spectral_decompose(&op, DEFAULT_DEGENERACY_TOL).unwrap().named("z1")
    }

    fn z_leg2() -> SpectralDecomposition {
        let op = ComplexMatrix::identity(2).kron(&pauli_z());
        spectral_decompose(&op, DEFAULT_DEGENERACY_TOL).unwrap().named("z2")
    }

    fn x_leg2() -> SpectralDecomposition {
        let op = ComplexMatrix::identity(2).kron(&pauli_x());
        spectral_decompose(&op, DEFAULT_DEGENERACY_TOL).unwrap().named("x2")
    }

    fn idx(obs: &SpectralDecomposition, value: f64) -> usize {
        obs.outcome_index(value, 1e-8).unwrap()
    }

    #[test]
    fn born_eigenstate_and_superposition() {
        let z = z();
        let x = x();
        assert!((born_probability(&ket0(), &z, idx(&z, 1.0)).unwrap() - 1.0).abs() < 1e-14);
        assert!((born_probability(&ket0(), &x, idx(&x, 1.0)).unwrap() - 0.5).abs() < 1e-12);
        let z1 = z_leg1();
        assert!((born_probability(&singlet(), &z1, idx(&z1, 1.0)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn born_distribution_normalizes() {
        let d = born_distribution(&plus(), &z()).unwrap();
        assert!((d.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn luders_fixed_point_and_projection() {
        let z = z();
        let collapsed = luders_collapse(&ket0(), &z, idx(&z, 1.0)).unwrap();
        assert!((collapsed.inner(&ket0()).norm() - 1.0).abs() < 1e-12);

        let collapsed = luders_collapse(&plus(), &z, idx(&z, 1.0)).unwrap();
        assert!((collapsed.inner(&ket0()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn luders_on_singlet_collapses_remote_leg() {
        let z1 = z_leg1();
        let collapsed = luders_collapse(&singlet(), &z1, idx(&z1, 1.0)).unwrap();
        // expect |0⟩⊗|1⟩ up to phase
        let target = StateVector::basis(4, 1).unwrap();
        assert!((collapsed.inner(&target).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn luders_zero_probability_is_an_error() {
        let z = z();
        assert!(matches!(
            luders_collapse(&ket0(), &z, idx(&z, -1.0)),
            Err(Error::ZeroProbabilityOutcome(_))
        ));
    }

    #[test]
    fn conditional_collapse_then_born() {
        let z = z();
        let x = x();
        let p = conditional_probability(&ket0(), &x, idx(&x, 1.0), &z, idx(&z, 1.0)).unwrap();
        assert!((p - 0.5).abs() < 1e-12);

        // repeatability: same observable twice
        let p = conditional_probability(&plus(), &x, idx(&x, 1.0), &x, idx(&x, 1.0)).unwrap();
        assert!((p - 1.0).abs() < 1e-12);

        // singlet anticorrelation across legs
        let z1 = z_leg1();
        let z2 = z_leg2();
        let p = conditional_probability(&singlet(), &z2, idx(&z2, 1.0), &z1, idx(&z1, 1.0))
            .unwrap();
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn conditional_matches_collapse_route() {
        let z = z();
        let x = x();
        let psi = plus();
        for (alpha, beta) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let direct = conditional_probability(&psi, &x, beta, &z, alpha).unwrap();
            let collapsed = luders_collapse(&psi, &z, alpha).unwrap();
            let via_collapse = born_probability(&collapsed, &x, beta).unwrap();
            assert!((direct - via_collapse).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_table_ket0_z_then_x() {
        let table = sequential_joint(&ket0(), &z(), &x()).unwrap();
        // outcomes sorted ascending: index 0 -> -1, index 1 -> +1
        assert!((table.q[1][1] - 0.5).abs() < 1e-12);
        assert!((table.q[1][0] - 0.5).abs() < 1e-12);
        assert!(table.q[0][0].abs() < 1e-14 && table.q[0][1].abs() < 1e-14);
        assert!((table.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_table_ket0_x_then_z_is_uniform() {
        let table = sequential_joint(&ket0(), &x(), &z()).unwrap();
        for row in &table.q {
            for &p in row {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_table_row_sums_match_first_born() {
        let table = sequential_joint(&plus(), &z(), &x()).unwrap();
        let born = born_distribution(&plus(), &z()).unwrap();
        for (m, b) in table.first_marginal().iter().zip(&born.probabilities) {
            assert!((m - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_commuting_pair_vanishes() {
        let gap = order_symmetry_gap(&singlet(), &z_leg1(), &x_leg2()).unwrap();
        assert!(gap < 1e-12);
    }

    #[test]
    fn gap_z_x_on_ket0_is_quarter() {
        let gap = order_symmetry_gap(&ket0(), &z(), &x()).unwrap();
        assert!((gap - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gap_self_is_zero() {
        let gap = order_symmetry_gap(&plus(), &x(), &x()).unwrap();
        assert!(gap < 1e-15);
    }

    #[test]
    fn repeatability_diagonal_table() {
        let table = sequential_joint(&plus(), &z(), &z()).unwrap();
        assert!(table.q[0][1].abs() < 1e-12 && table.q[1][0].abs() < 1e-12);
        let born = born_distribution(&plus(), &z()).unwrap();
        assert!((table.q[0][0] - born.probabilities[0]).abs() < 1e-12);
        assert!((table.q[1][1] - born.probabilities[1]).abs() < 1e-12);
    }

    #[test]
    fn covariance_cases() {
        let uniform = SequentialJointTable {
            first_outcomes: vec![-1.0, 1.0],
            second_outcomes: vec![-1.0, 1.0],
            q: vec![vec![0.25, 0.25], vec![0.25, 0.25]],
            order_label: ("a".into(), "b".into()),
        };
        assert_eq!(covariance(&uniform), 0.0);

        let table = sequential_joint(&singlet(), &z_leg1(), &z_leg2()).unwrap();
        assert!((covariance(&table) + 1.0).abs() < 1e-12);

        let table = sequential_joint(&singlet(), &z_leg1(), &x_leg2()).unwrap();
        assert!(covariance(&table).abs() < 1e-12);
    }

    #[test]
    fn chain_identity_holds() {
        let z = z();
        let x = x();
        let psi = plus();
        for i in 0..2 {
            let p_alpha = born_probability(&psi, &z, i).unwrap();
            if p_alpha <= ZERO_PROB_TOL {
                continue;
            }
            for j in 0..2 {
                let q = sequential_joint(&psi, &z, &x).unwrap().q[i][j];
                let chained =
                    p_alpha * conditional_probability(&psi, &x, j, &z, i).unwrap();
                assert!((q - chained).abs() < 1e-12);
            }
        }
    }
}
