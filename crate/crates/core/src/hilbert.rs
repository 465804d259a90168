//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything in this module is sized for dimension ≤ 16: storage is dense
//! row-major, and the eigensolver is a cyclic Jacobi iteration on the
//! Hermitian matrix. [`spectral_decompose`] is the entry point the rest of
//! the crate uses to obtain spectral projectors P_α for an observable.

use num_complex::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Largest Hilbert-space dimension accepted by the eigensolver.
pub const MAX_DIM: usize = 16;

/// Eigenvalues closer than this are merged into one outcome eigenspace.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

const HERMITICITY_TOL: f64 = 1e-10;
const UNIT_NORM_TOL: f64 = 1e-12;
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Create a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![c(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, c(1.0, 0.0));
        }
        m
    }

    /// Build from real entries given as rows (convenience for tests and presets).
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| c(x, 0.0)).collect();
        Self::new(r, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Kronecker product; dimensions multiply.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, aij * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} - {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} applied to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![c(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = c(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |a_ij − conj(a_ji)| over all entries; 0 for an exactly Hermitian matrix.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// Free-function form of the matrix product.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.mul(b)
}

/// Free-function form of the conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Free-function form of the Kronecker product.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Largest entry modulus of ab − ba. Zero iff the operators commute
/// (numerically), which is the condition under which measurement order
/// becomes irrelevant.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Ok(ab.sub(&ba)?.max_abs_entry())
}

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap()
}

/// Pauli Y.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]).unwrap()
}

/// Unit-norm complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Construct from amplitudes; the squared norm must be 1 within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state dimension must be positive".into()));
        }
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm(n2));
        }
        Ok(Self { amplitudes })
    }

    /// Construct by normalizing arbitrary amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if n2 < 1e-28 {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / n2.sqrt();
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z * inv).collect() })
    }

    /// Computational basis state |index⟩ in the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::OutcomeIndexOutOfRange { index, count: dim });
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Tensor product |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Spectral decomposition of a Hermitian operator: distinct eigenvalues in
/// strictly increasing order, one orthogonal projector per eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    label: String,
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl SpectralDecomposition {
    /// Attach a human-readable label (used in joint-table order labels).
    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    /// Number of distinct outcomes.
    pub fn outcome_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn projector(&self, outcome_index: usize) -> Result<&ComplexMatrix> {
        self.projectors.get(outcome_index).ok_or(Error::OutcomeIndexOutOfRange {
            index: outcome_index,
            count: self.projectors.len(),
        })
    }

    /// Index of the outcome whose eigenvalue matches `value` within `tol`.
    pub fn outcome_index(&self, value: f64, tol: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|&ev| (ev - value).abs() <= tol)
    }

    /// Σ αᵢ Pᵢ — rebuilds the operator from its spectral data.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim(), self.dim());
        for (ev, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = acc.add(&p.scale(c(*ev, 0.0))).unwrap();
        }
        acc
    }
}

/// Diagonalize a Hermitian matrix and group eigenvalues into outcome
/// eigenspaces.
///
/// Eigenvalues closer than `degeneracy_tol` are treated as one physical
/// outcome: their rank-1 projectors are summed and the merged eigenvalue is
/// the cluster mean. The returned eigenvalues are strictly increasing.
pub fn spectral_decompose(h: &ComplexMatrix, degeneracy_tol: f64) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", h.rows(), h.cols())));
    }
    if h.rows() > MAX_DIM {
        return Err(Error::DimensionTooLarge(h.rows(), MAX_DIM));
    }
    if degeneracy_tol.is_nan() || degeneracy_tol < 0.0 {
        return Err(Error::InvalidArgument("degeneracy_tol must be nonnegative".into()));
    }
    let defect = h.hermitian_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect, tol: HERMITICITY_TOL });
    }

    let (mut eigs, vecs) = jacobi_eigh(h)?;

    let n = h.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigs[a].total_cmp(&eigs[b]));
    eigs.sort_by(f64::total_cmp);

    // Cluster consecutive eigenvalues whose gap is below the tolerance.
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigs[end] - eigs[end - 1] <= degeneracy_tol {
            end += 1;
        }
        let mean = eigs[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut proj = ComplexMatrix::zeros(n, n);
        for &col in &order[start..end] {
            for i in 0..n {
                let vi = vecs.get(i, col);
                for j in 0..n {
                    let v = proj.get(i, j) + vi * vecs.get(j, col).conj();
                    proj.set(i, j, v);
                }
            }
        }
        eigenvalues.push(mean);
        projectors.push(proj);
        start = end;
    }

    Ok(SpectralDecomposition { label: "obs".into(), eigenvalues, projectors })
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Returns unsorted eigenvalues and the unitary whose columns are the
/// corresponding eigenvectors. Sweeps run until the off-diagonal Frobenius
/// mass drops below 1e-12, up to 100 sweeps.
fn jacobi_eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = h.rows();
    let mut a = h.clone();
    // Fold representational noise into an exactly Hermitian working copy.
    for i in 0..n {
        a.set(i, i, c(a.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_OFF_TOL {
            let eigs = (0..n).map(|i| a.get(i, i).re).collect();
            return Ok((eigs, v));
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = t * cth;

                // Column update: A <- A·U with U the plane rotation carrying
                // the phase of a_pq.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * cth - akq * (phase.conj() * sth));
                    a.set(k, q, akp * (phase * sth) + akq * cth);
                }
                // Row update: A <- U†·A.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * cth - aqk * (phase * sth));
                    a.set(q, k, apk * (phase.conj() * sth) + aqk * cth);
                }
                // Pin what the algebra guarantees: real diagonal, zeroed pivot.
                a.set(p, q, c(0.0, 0.0));
                a.set(q, p, c(0.0, 0.0));
                a.set(p, p, c(a.get(p, p).re, 0.0));
                a.set(q, q, c(a.get(q, q).re, 0.0));

                // Accumulate eigenvectors: V <- V·U.
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * cth - vkq * (phase.conj() * sth));
                    v.set(k, q, vkp * (phase * sth) + vkq * cth);
                }
            }
        }
    }

    if off_diagonal_norm(&a) < JACOBI_OFF_TOL {
        let eigs = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok((eigs, v));
    }
    Err(Error::NoConvergence(JACOBI_MAX_SWEEPS))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a.get(i, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}
