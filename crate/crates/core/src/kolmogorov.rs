//! Joint-measure feasibility for families of pairwise ±1 distributions.
//!
//! Given pairwise outcome tables for n named ±1-valued observables, decide
//! whether one probability measure over the 2ⁿ deterministic assignments
//! ("atoms") marginalizes to every table simultaneously. When it exists the
//! witness measure is returned; when it does not, the data admits no single
//! classical sample space, which is exactly the situation the CHSH facets
//! detect in the bipartite case.
//!
//! The decision is a phase-1 simplex run: minimize total constraint
//! violation over nonnegative atom weights summing to one. Bland's rule
//! keeps the iteration finite; problems here are at most 2¹⁰ columns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eprbohm::CorrelationSet;
use crate::error::{Error, Result};

/// Hard cap on the number of variables (2ⁿ atom columns).
pub const MAX_VARIABLES: usize = 10;

/// Default feasibility tolerance on the phase-1 optimum.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-8;

const TABLE_SUM_TOL: f64 = 1e-9;
const MARGINAL_CONSISTENCY_TOL: f64 = 1e-6;
const PIVOT_EPS: f64 = 1e-10;

/// One pairwise constraint: the 2×2 outcome table of observables `x` and `y`.
///
/// `table[r][c]` is P(x = sr, y = sc) with sign order (+1, −1), i.e.
/// `table[0][0]` = P(+,+), `table[0][1]` = P(+,−), `table[1][0]` = P(−,+),
/// `table[1][1]` = P(−,−).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseTable {
    pub x: String,
    pub y: String,
    pub table: [[f64; 2]; 2],
}

/// Family of pairwise distributions over named ±1 observables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityProblem {
    pub variables: Vec<String>,
    pub pairwise: Vec<PairwiseTable>,
    /// Optional P(v = +1) constraints keyed by variable name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<BTreeMap<String, f64>>,
}

impl FeasibilityProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        let problem: Self =
            serde_json::from_str(text).map_err(|e| Error::MalformedProblem(e.to_string()))?;
        problem.validate()?;
        Ok(problem)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::MalformedProblem(format!("unknown variable '{name}'")))
    }

    /// Structural and probabilistic sanity checks.
    ///
    /// Marginal inconsistency across tables is rejected here as malformed
    /// input; the feasibility verdict is reserved for data that is at least
    /// internally consistent at the one-variable level.
    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::MalformedProblem("no variables".into()));
        }
        if self.variables.len() > MAX_VARIABLES {
            return Err(Error::TooManyVariables(self.variables.len(), MAX_VARIABLES));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v) {
                return Err(Error::MalformedProblem(format!("duplicate variable '{v}'")));
            }
        }

        // marginal of each variable implied by each table mentioning it
        let mut implied: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for pt in &self.pairwise {
            self.variable_index(&pt.x)?;
            self.variable_index(&pt.y)?;
            if pt.x == pt.y {
                return Err(Error::MalformedProblem(format!(
                    "table pairs variable '{}' with itself",
                    pt.x
                )));
            }
            let mut sum = 0.0;
            for row in &pt.table {
                for &p in row {
                    if p < -TABLE_SUM_TOL {
                        return Err(Error::MalformedProblem(format!(
                            "negative entry {p} in table ({}, {})",
                            pt.x, pt.y
                        )));
                    }
                    sum += p;
                }
            }
            if (sum - 1.0).abs() > TABLE_SUM_TOL {
                return Err(Error::MalformedProblem(format!(
                    "table ({}, {}) sums to {sum}",
                    pt.x, pt.y
                )));
            }
            implied.entry(&pt.x).or_default().push(pt.table[0][0] + pt.table[0][1]);
            implied.entry(&pt.y).or_default().push(pt.table[0][0] + pt.table[1][0]);
        }
        if let Some(marginals) = &self.marginals {
            for (name, &p) in marginals {
                self.variable_index(name)?;
                if !(-TABLE_SUM_TOL..=1.0 + TABLE_SUM_TOL).contains(&p) {
                    return Err(Error::MalformedProblem(format!(
                        "marginal P({name}=+1) = {p} outside [0, 1]"
                    )));
                }
                implied.entry(name).or_default().push(p);
            }
        }
        for (name, values) in implied {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > MARGINAL_CONSISTENCY_TOL {
                return Err(Error::MalformedProblem(format!(
                    "marginal of '{name}' differs across tables by {:.3e}",
                    hi - lo
                )));
            }
        }
        Ok(())
    }
}

/// Build a problem from correlations assuming unbiased (P(±1) = ½)
/// marginals: each pair (x, y, E) becomes the table with P(s,t) = (1 + stE)/4.
pub fn problem_from_correlations(
    variables: &[(String, String)],
    correlations: &CorrelationSet,
) -> Result<FeasibilityProblem> {
    let mut names: Vec<String> = Vec::new();
    let mut pairwise = Vec::new();
    for (x, y) in variables {
        let e = correlations.require(x, y)?;
        if e.abs() > 1.0 + 1e-12 {
            return Err(Error::CorrelationOutOfRange(e));
        }
        for name in [x, y] {
            if !names.contains(name) {
                names.push(name.clone());
            }
        }
        let p_agree = ((1.0 + e) / 4.0).max(0.0);
        let p_differ = ((1.0 - e) / 4.0).max(0.0);
        pairwise.push(PairwiseTable {
            x: x.clone(),
            y: y.clone(),
            table: [[p_agree, p_differ], [p_differ, p_agree]],
        });
    }
    let problem = FeasibilityProblem { variables: names, pairwise, marginals: None };
    problem.validate()?;
    Ok(problem)
}

/// All 2ⁿ deterministic ±1 assignments in canonical binary order: atom `k`
/// assigns +1 to variable `v` when bit (n−1−v) of `k` is clear, so atom 0 is
/// all-+1 and the last atom is all-−1.
pub fn build_atoms(n: usize) -> Result<Vec<Vec<i8>>> {
    if n > MAX_VARIABLES {
        return Err(Error::TooManyVariables(n, MAX_VARIABLES));
    }
    let count = 1usize << n;
    let mut atoms = Vec::with_capacity(count);
    for k in 0..count {
        atoms.push((0..n).map(|v| atom_value(k, v, n)).collect());
    }
    Ok(atoms)
}

#[inline]
fn atom_value(atom: usize, var: usize, n: usize) -> i8 {
    if atom & (1 << (n - 1 - var)) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

/// Verdict of the extension problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    /// Probability weights over the 2ⁿ atoms, present iff feasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    /// Minimized total constraint violation, present iff infeasible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<f64>,
}

impl FeasibilityResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Decide whether one measure over the deterministic atoms reproduces every
/// pairwise table; `tol` bounds the accepted phase-1 residual.
pub fn solve_feasibility(problem: &FeasibilityProblem, tol: f64) -> Result<FeasibilityResult> {
    problem.validate()?;
    let n = problem.variables.len();
    let atom_count = 1usize << n;
    let index_of = |name: &str| problem.variables.iter().position(|v| v == name).unwrap();

    // Equality system A w = b over atom weights w ≥ 0.
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();

    rows.push(vec![1.0; atom_count]);
    rhs.push(1.0);

    for pt in &problem.pairwise {
        let vx = index_of(&pt.x);
        let vy = index_of(&pt.y);
        for (r, sx) in [(0usize, 1i8), (1, -1)] {
            for (c, sy) in [(0usize, 1i8), (1, -1)] {
                let mut row = vec![0.0; atom_count];
                for (k, cell) in row.iter_mut().enumerate() {
                    if atom_value(k, vx, n) == sx && atom_value(k, vy, n) == sy {
                        *cell = 1.0;
                    }
                }
                rows.push(row);
                rhs.push(pt.table[r][c]);
            }
        }
    }
    if let Some(marginals) = &problem.marginals {
        for (name, &p) in marginals {
            let v = index_of(name);
            let mut row = vec![0.0; atom_count];
            for (k, cell) in row.iter_mut().enumerate() {
                if atom_value(k, v, n) == 1 {
                    *cell = 1.0;
                }
            }
            rows.push(row);
            rhs.push(p);
        }
    }

    let outcome = phase_one_simplex(&rows, &rhs)?;
    if outcome.objective <= tol {
        let mut witness = outcome.solution;
        for w in &mut witness {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(witness),
            max_violation: None,
        })
    } else {
        Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            max_violation: Some(outcome.objective),
        })
    }
}

/// Marginalize a witness back onto one variable pair (test/diagnostic aid).
pub fn witness_pair_table(
    problem: &FeasibilityProblem,
    witness: &[f64],
    x: &str,
    y: &str,
) -> Result<[[f64; 2]; 2]> {
    let n = problem.variables.len();
    let vx = problem.variable_index(x)?;
    let vy = problem.variable_index(y)?;
    if witness.len() != (1usize << n) {
        return Err(Error::DimensionMismatch(format!(
            "witness length {} vs {} atoms",
            witness.len(),
            1usize << n
        )));
    }
    let mut table = [[0.0; 2]; 2];
    for (k, &w) in witness.iter().enumerate() {
        let r = if atom_value(k, vx, n) == 1 { 0 } else { 1 };
        let c = if atom_value(k, vy, n) == 1 { 0 } else { 1 };
        table[r][c] += w;
    }
    Ok(table)
}

struct PhaseOneOutcome {
    objective: f64,
    solution: Vec<f64>,
}

/// Phase-1 simplex: minimize the sum of artificial variables for Ax = b,
/// x ≥ 0. Bland's rule (lowest eligible index enters, lowest-index basic
/// leaves on ties) guards against cycling; the iteration budget is a safety
/// net on top of that guarantee.
fn phase_one_simplex(a: &[Vec<f64>], b: &[f64]) -> Result<PhaseOneOutcome> {
    let m = a.len();
    let n = a[0].len();
    let width = n + m + 1; // structural + artificial + rhs
    let budget = 10 * (m + n + m);

    // tableau rows 0..m are constraints; row m is the phase-1 objective
    let mut t = vec![vec![0.0; width]; m + 1];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = flip * b[i];
        basis[i] = n + i;
    }
    // objective row: reduced costs for min Σ artificials, expressed in terms
    // of the nonbasic structural columns
    for j in 0..width {
        let mut acc = 0.0;
        for row in t.iter().take(m) {
            acc += row[j];
        }
        t[m][j] = -acc;
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }

    let mut iterations = 0;
    loop {
        // Bland: entering column = lowest index with negative reduced cost
        let mut entering = None;
        for (j, &cost) in t[m].iter().enumerate().take(n + m) {
            if cost < -PIVOT_EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else { break };

        // ratio test, ties broken by lowest basic variable index
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > PIVOT_EPS {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match pivot_row {
                    None => true,
                    Some(r) => {
                        ratio < best_ratio - 1e-15
                            || ((ratio - best_ratio).abs() <= 1e-15 && basis[i] < basis[r])
                    }
                };
                if better {
                    best_ratio = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        // phase-1 objective is bounded below by 0, so a pivot row exists
        let Some(row) = pivot_row else {
            return Err(Error::MalformedProblem(
                "phase-1 objective unbounded; constraint matrix is inconsistent".into(),
            ));
        };

        pivot(&mut t, row, col);
        basis[row] = col;

        iterations += 1;
        if iterations > budget {
            return Err(Error::IterationBudget(budget));
        }
    }

    let mut solution = vec![0.0; n];
    let mut artificial_mass = 0.0;
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            solution[var] = t[i][width - 1];
        } else {
            artificial_mass += t[i][width - 1];
        }
    }
    // the phase-1 value: −(objective row rhs); fall back to direct basic mass
    let objective = (-t[m][width - 1]).max(artificial_mass).max(0.0);
    Ok(PhaseOneOutcome { objective, solution })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let width = t[0].len();
    let inv = 1.0 / t[row][col];
    for j in 0..width {
        t[row][j] *= inv;
    }
    t[row][col] = 1.0;
    for i in 0..t.len() {
        if i == row {
            continue;
        }
        let factor = t[i][col];
        if factor == 0.0 {
            continue;
        }
        for j in 0..width {
            t[i][j] -= factor * t[row][j];
        }
        t[i][col] = 0.0;
    }
}

/// Which printed three-setting inequality to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellForm {
    /// |E(a,b) − E(b,c)| ≤ 1 − E(a,c): chains the adjacent setting pairs and
    /// bounds them by the outer pair.
    Chained,
    /// |E(a,b) − E(a,c)| ≤ 1 + E(b,c): Bell's 1964 arrangement for
    /// anticorrelated pairs.
    Original,
}

/// One evaluated inequality: LHS, RHS, and whether LHS ≤ RHS held.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FacetEvaluation {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Evaluate a three-setting inequality on correlations named (a,b), (b,c),
/// (a,c).
pub fn evaluate_bell_facet(correlations: &CorrelationSet, form: BellForm) -> Result<FacetEvaluation> {
    let e_ab = correlations.require("a", "b")?;
    let e_bc = correlations.require("b", "c")?;
    let e_ac = correlations.require("a", "c")?;
    let (lhs, rhs) = match form {
        BellForm::Chained => ((e_ab - e_bc).abs(), 1.0 - e_ac),
        BellForm::Original => ((e_ab - e_ac).abs(), 1.0 + e_bc),
    };
    Ok(FacetEvaluation { lhs, rhs, satisfied: lhs <= rhs + 1e-12 })
}

/// One CHSH facet: the signed combination of the four correlations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshFacet {
    /// Signs applied to (E(a1,b1), E(a1,b2), E(a2,b1), E(a2,b2)).
    pub signs: [i8; 4],
    /// |signed sum|.
    pub value: f64,
    pub violated: bool,
}

/// All CHSH facets of the 2-setting bipartite scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChshFacetReport {
    pub facets: Vec<ChshFacet>,
    pub max_value: f64,
    pub violated: bool,
}

/// Evaluate the CHSH facets |±E₁₁ ± E₁₂ ± E₂₁ ± E₂₂| ≤ 2 over the sign
/// patterns with a single minus (the complementary three-minus patterns give
/// the same absolute values). Correlations are keyed (a1,b1), (a1,b2),
/// (a2,b1), (a2,b2).
pub fn evaluate_chsh_facets(correlations: &CorrelationSet) -> Result<ChshFacetReport> {
    let e = [
        correlations.require("a1", "b1")?,
        correlations.require("a1", "b2")?,
        correlations.require("a2", "b1")?,
        correlations.require("a2", "b2")?,
    ];
    let mut facets = Vec::with_capacity(4);
    let mut max_value: f64 = 0.0;
    for minus_at in 0..4 {
        let mut signs = [1i8; 4];
        signs[minus_at] = -1;
        let value: f64 = e
            .iter()
            .zip(&signs)
            .map(|(&corr, &s)| f64::from(s) * corr)
            .sum::<f64>()
            .abs();
        max_value = max_value.max(value);
        facets.push(ChshFacet { signs, value, violated: value > 2.0 + 1e-12 });
    }
    let violated = facets.iter().any(|f| f.violated);
    Ok(ChshFacetReport { facets, max_value, violated })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unbiased_table(e: f64) -> [[f64; 2]; 2] {
        let agree = (1.0 + e) / 4.0;
        let differ = (1.0 - e) / 4.0;
        [[agree, differ], [differ, agree]]
    }

    fn chsh_problem(e: [f64; 4]) -> FeasibilityProblem {
        FeasibilityProblem {
            variables: vec!["a1".into(), "a2".into(), "b1".into(), "b2".into()],
            pairwise: vec![
                PairwiseTable { x: "a1".into(), y: "b1".into(), table: unbiased_table(e[0]) },
                PairwiseTable { x: "a1".into(), y: "b2".into(), table: unbiased_table(e[1]) },
                PairwiseTable { x: "a2".into(), y: "b1".into(), table: unbiased_table(e[2]) },
                PairwiseTable { x: "a2".into(), y: "b2".into(), table: unbiased_table(e[3]) },
            ],
            marginals: None,
        }
    }

    #[test]
    fn atoms_enumerate_in_binary_order() {
        assert_eq!(build_atoms(1).unwrap(), vec![vec![1], vec![-1]]);
        assert_eq!(build_atoms(3).unwrap().len(), 8);
        assert_eq!(build_atoms(4).unwrap().len(), 16);
        let atoms = build_atoms(2).unwrap();
        assert_eq!(atoms[0], vec![1, 1]);
        assert_eq!(atoms[1], vec![1, -1]);
        assert_eq!(atoms[2], vec![-1, 1]);
        assert_eq!(atoms[3], vec![-1, -1]);
        assert!(matches!(build_atoms(11), Err(Error::TooManyVariables(11, _))));
    }

    #[test]
    fn singlet_chsh_problem_is_infeasible() {
        let r = 2f64.sqrt() / 2.0;
        let problem = chsh_problem([-r, -r, -r, r]);
        let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Infeasible);
        assert!(result.max_violation.unwrap() > DEFAULT_FEASIBILITY_TOL);
    }

    #[test]
    fn uncorrelated_problem_is_feasible() {
        let problem = chsh_problem([0.0; 4]);
        let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);
        let witness = result.witness.unwrap();
        assert!((witness.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for pt in &problem.pairwise {
            let got = witness_pair_table(&problem, &witness, &pt.x, &pt.y).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    assert!((got[r][c] - pt.table[r][c]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn classical_extreme_point_is_boundary_feasible() {
        // correlations of the deterministic assignment a1=a2=b1=b2=+1
        let problem = chsh_problem([1.0, 1.0, 1.0, 1.0]);
        let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let mut problem = chsh_problem([0.0; 4]);
        problem.pairwise[0].table = [[0.2, 0.2], [0.2, 0.3]]; // sums to 0.9
        assert!(matches!(problem.validate(), Err(Error::MalformedProblem(_))));

        let mut problem = chsh_problem([0.0; 4]);
        problem.pairwise[0].table = [[0.45, 0.05], [0.05, 0.45]]; // marginal 0.5 ok
        problem.pairwise[1].table = [[0.40, 0.00], [0.10, 0.50]]; // a1 marginal 0.4
        assert!(matches!(problem.validate(), Err(Error::MalformedProblem(_))));
    }

    #[test]
    fn problem_json_round_trip() {
        let problem = chsh_problem([0.1, -0.2, 0.3, -0.4]);
        let parsed = FeasibilityProblem::from_json(&problem.to_json()).unwrap();
        assert_eq!(parsed.variables, problem.variables);
        assert_eq!(parsed.pairwise.len(), 4);
    }

    #[test]
    fn result_json_shape() {
        let problem = chsh_problem([0.0; 4]);
        let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        let text = result.to_json();
        assert!(text.contains("\"status\": \"feasible\""));
        assert!(text.contains("\"witness\""));
        assert!(!text.contains("max_violation"));
        let back = FeasibilityResult::from_json(&text).unwrap();
        assert_eq!(back.status, FeasibilityStatus::Feasible);
    }

    #[test]
    fn bell_facet_forms() {
        let mut set = CorrelationSet::new();
        set.insert("a", "b", -0.5).unwrap();
        set.insert("b", "c", -0.5).unwrap();
        set.insert("a", "c", 0.5).unwrap();

        let chained = evaluate_bell_facet(&set, BellForm::Chained).unwrap();
        assert!(chained.lhs.abs() < 1e-12);
        assert!((chained.rhs - 0.5).abs() < 1e-12);
        assert!(chained.satisfied);

        let original = evaluate_bell_facet(&set, BellForm::Original).unwrap();
        assert!((original.lhs - 1.0).abs() < 1e-12);
        assert!((original.rhs - 0.5).abs() < 1e-12);
        assert!(!original.satisfied);
    }

    #[test]
    fn bell_facet_trivial_cases() {
        let mut set = CorrelationSet::new();
        set.insert("a", "b", -1.0).unwrap();
        set.insert("b", "c", -1.0).unwrap();
        set.insert("a", "c", -1.0).unwrap();
        let chained = evaluate_bell_facet(&set, BellForm::Chained).unwrap();
        assert!(chained.lhs.abs() < 1e-12 && (chained.rhs - 2.0).abs() < 1e-12);
        assert!(chained.satisfied);

        let mut zeros = CorrelationSet::new();
        zeros.insert("a", "b", 0.0).unwrap();
        zeros.insert("b", "c", 0.0).unwrap();
        zeros.insert("a", "c", 0.0).unwrap();
        assert!(evaluate_bell_facet(&zeros, BellForm::Chained).unwrap().satisfied);
        assert!(evaluate_bell_facet(&zeros, BellForm::Original).unwrap().satisfied);

        let mut missing = CorrelationSet::new();
        missing.insert("a", "b", 0.0).unwrap();
        assert!(matches!(
            evaluate_bell_facet(&missing, BellForm::Chained),
            Err(Error::MissingCorrelation(_, _))
        ));
    }

    #[test]
    fn chsh_facets_cases() {
        let r = 2f64.sqrt() / 2.0;
        let mut set = CorrelationSet::new();
        set.insert("a1", "b1", -r).unwrap();
        set.insert("a1", "b2", r).unwrap();
        set.insert("a2", "b1", -r).unwrap();
        set.insert("a2", "b2", -r).unwrap();
        let report = evaluate_chsh_facets(&set).unwrap();
        assert!((report.max_value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(report.violated);

        let mut zeros = CorrelationSet::new();
        for (x, y) in [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")] {
            zeros.insert(x, y, 0.0).unwrap();
        }
        let report = evaluate_chsh_facets(&zeros).unwrap();
        assert_eq!(report.max_value, 0.0);
        assert!(!report.violated);

        // deterministic assignment: all four correlations +1
        let mut det = CorrelationSet::new();
        for (x, y) in [("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2")] {
            det.insert(x, y, 1.0).unwrap();
        }
        let report = evaluate_chsh_facets(&det).unwrap();
        assert!((report.max_value - 2.0).abs() < 1e-12);
        assert!(!report.violated, "the boundary value 2 is not a violation");
    }

    #[test]
    fn explicit_marginals_constrain_the_witness() {
        // biased product distribution: P(x=+1) = 0.7, P(y=+1) = 0.4
        let (px, py) = (0.7, 0.4);
        let table = [
            [px * py, px * (1.0 - py)],
            [(1.0 - px) * py, (1.0 - px) * (1.0 - py)],
        ];
        let mut marginals = BTreeMap::new();
        marginals.insert("x".to_string(), px);
        marginals.insert("y".to_string(), py);
        let problem = FeasibilityProblem {
            variables: vec!["x".into(), "y".into()],
            pairwise: vec![PairwiseTable { x: "x".into(), y: "y".into(), table }],
            marginals: Some(marginals),
        };
        let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
        assert_eq!(result.status, FeasibilityStatus::Feasible);
        let witness = result.witness.unwrap();
        // atoms (in order): (+,+), (+,−), (−,+), (−,−)
        assert!((witness[0] + witness[1] - px).abs() < 1e-8);
        assert!((witness[0] + witness[2] - py).abs() < 1e-8);

        // a marginal that contradicts the table is malformed input
        let mut bad = problem.clone();
        bad.marginals.as_mut().unwrap().insert("x".to_string(), 0.2);
        assert!(matches!(bad.validate(), Err(Error::MalformedProblem(_))));
    }

    #[test]
    fn construct_then_recover() {
        // sample an explicit joint measure over 16 atoms, marginalize it to
        // tables, and check the solver recovers a witness that reproduces them
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let mut weights: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let names = ["a1", "a2", "b1", "b2"];
            let mut pairwise = Vec::new();
            for (xi, yi) in [(0usize, 2usize), (0, 3), (1, 2), (1, 3)] {
                let mut table = [[0.0; 2]; 2];
                for (k, &w) in weights.iter().enumerate() {
                    let r = if atom_value(k, xi, 4) == 1 { 0 } else { 1 };
                    let c = if atom_value(k, yi, 4) == 1 { 0 } else { 1 };
                    table[r][c] += w;
                }
                pairwise.push(PairwiseTable {
                    x: names[xi].into(),
                    y: names[yi].into(),
                    table,
                });
            }
            let problem = FeasibilityProblem {
                variables: names.iter().map(|s| s.to_string()).collect(),
                pairwise,
                marginals: None,
            };
            let result = solve_feasibility(&problem, DEFAULT_FEASIBILITY_TOL).unwrap();
            assert_eq!(result.status, FeasibilityStatus::Feasible);
            let witness = result.witness.unwrap();
            for pt in &problem.pairwise {
                let got = witness_pair_table(&problem, &witness, &pt.x, &pt.y).unwrap();
                for r in 0..2 {
                    for c in 0..2 {
                        assert!(
                            (got[r][c] - pt.table[r][c]).abs() < 1e-8,
                            "witness fails to reproduce table ({}, {})",
                            pt.x,
                            pt.y
                        );
                    }
                }
            }
        }
    }
}
