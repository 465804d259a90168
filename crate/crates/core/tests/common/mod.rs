//! Shared helpers for the integration suites: seeded random generators and
//! independent oracle implementations that deliberately avoid the library's
//! own code paths.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qseq::hilbert::{ComplexMatrix, SpectralDecomposition, StateVector};
use qseq::kolmogorov::FeasibilityProblem;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(
                i,
                j,
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
        }
    }
    g.add(&g.adjoint()).unwrap().scale(C64::new(0.5, 0.0))
}

/// Random unit state.
pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3 {
            return StateVector::normalized(amps).unwrap();
        }
    }
}

/// ‖P_β P_α ψ‖² computed with local arithmetic straight off the projector
/// entries, independent of the library's matrix-vector code.
pub fn chained_weight_oracle(
    psi: &StateVector,
    first: &SpectralDecomposition,
    alpha: usize,
    second: &SpectralDecomposition,
    beta: usize,
) -> f64 {
    let apply = |m: &ComplexMatrix, v: &[C64]| -> Vec<C64> {
        let n = m.rows();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, slot) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *slot += m.get(i, j) * vj;
            }
        }
        out
    };
    let after_first = apply(&first.projectors()[alpha], psi.amplitudes());
    let after_second = apply(&second.projectors()[beta], &after_first);
    after_second.iter().map(|z| z.norm_sqr()).sum()
}

/// Independent feasibility decision for cross-checking the library solver.
///
/// Separate construction on purpose: atoms are enumerated lsb-first, the
/// tableau keeps the objective in row 0, and pivoting uses the classic
/// most-negative-reduced-cost (Dantzig) rule instead of Bland's.
pub fn reference_feasible(problem: &FeasibilityProblem, tol: f64) -> bool {
    let n = problem.variables.len();
    let atoms = 1usize << n;
    let var = |name: &str| problem.variables.iter().position(|v| v == name).unwrap();
    // lsb-first assignment: bit v of atom k set means variable v is −1
    let value = |k: usize, v: usize| -> i8 {
        if k & (1 << v) == 0 {
            1
        } else {
            -1
        }
    };

    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    a.push(vec![1.0; atoms]);
    b.push(1.0);
    for pt in &problem.pairwise {
        let (vx, vy) = (var(&pt.x), var(&pt.y));
        for (r, sx) in [(0usize, 1i8), (1, -1)] {
            for (c, sy) in [(0usize, 1i8), (1, -1)] {
                let mut row = vec![0.0; atoms];
                for (k, cell) in row.iter_mut().enumerate() {
                    if value(k, vx) == sx && value(k, vy) == sy {
                        *cell = 1.0;
                    }
                }
                a.push(row);
                b.push(pt.table[r][c]);
            }
        }
    }
    if let Some(marginals) = &problem.marginals {
        for (name, &p) in marginals {
            let v = var(name);
            let mut row = vec![0.0; atoms];
            for (k, cell) in row.iter_mut().enumerate() {
                if value(k, v) == 1 {
                    *cell = 1.0;
                }
            }
            a.push(row);
            b.push(p);
        }
    }

    dantzig_phase_one(&a, &b) <= tol
}

/// Phase-1 objective value under Dantzig pivoting.
fn dantzig_phase_one(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let m = a.len();
    let n = a[0].len();
    let cols = n + m;
    const EPS: f64 = 1e-10;

    // row 0 holds the objective, rows 1..=m the constraints
    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i + 1][j] = sign * a[i][j];
        }
        t[i + 1][n + i] = 1.0;
        t[i + 1][cols] = sign * b[i];
        basis[i] = n + i;
    }
    for j in 0..=cols {
        let mut s = 0.0;
        for i in 1..=m {
            s += t[i][j];
        }
        t[0][j] = -s;
    }
    for i in 0..m {
        t[0][n + i] = 0.0;
    }

    for _ in 0..100_000 {
        let mut entering = None;
        let mut most_negative = -EPS;
        for j in 0..cols {
            if t[0][j] < most_negative {
                most_negative = t[0][j];
                entering = Some(j);
            }
        }
        let Some(col) = entering else { break };

        let mut row = None;
        let mut best = f64::INFINITY;
        for i in 1..=m {
            if t[i][col] > EPS {
                let ratio = t[i][cols] / t[i][col];
                if ratio < best {
                    best = ratio;
                    row = Some(i);
                }
            }
        }
        let Some(r) = row else { break };

        let inv = 1.0 / t[r][col];
        for j in 0..=cols {
            t[r][j] *= inv;
        }
        for i in 0..=m {
            if i != r && t[i][col] != 0.0 {
                let f = t[i][col];
                for j in 0..=cols {
                    t[i][j] -= f * t[r][j];
                }
            }
        }
        basis[r - 1] = col;
    }

    (-t[0][cols]).max(0.0)
}
