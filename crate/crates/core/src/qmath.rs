//! Dense complex linear algebra for the small matrices this crate works with
//! (at most a few hundred rows): Kronecker products, partial traces, a cyclic
//! Jacobi eigensolver for Hermitian matrices and PSD square roots.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute gate on `max |m - m†|` applied before any Hermitian routine.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` are treated as zero in PSD routines.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which factor of a bipartite space to keep in a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries cannot form a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(n, m, rows.concat())
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(Complex64::conj).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Checks that the matrix is square and Hermitian within [`HERMITIAN_TOL`]
    /// and returns its exactly Hermitian symmetrization.
    pub fn hermitian_gate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("expected square matrix, got {}x{}", self.rows, self.cols)));
        }
        let deviation = self.hermitian_deviation();
        if deviation.is_nan() || deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation, tolerance: HERMITIAN_TOL });
        }
        Ok(self.symmetrized())
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// `⟨v| self |v⟩`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        debug_assert_eq!(self.rows, v.len());
        let mut acc = ZERO;
        for i in 0..self.rows {
            let mut row = ZERO;
            for j in 0..self.cols {
                row += self[(i, j)] * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for z in self.row(i) {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense complex vector, typically a ket.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector(Vec<Complex64>);

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("empty vector".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self(entries))
    }

    /// Computational basis vector `|index⟩` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self(self.0.iter().map(|z| z / n).collect())
    }

    pub fn kron(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        CVector(out)
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.0[i] * self.0[j].conj())
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = (b.rows, b.cols);
    CMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Traces out one factor of a `dims.0 · dims.1` square matrix, keeping `keep`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Side) -> Result<CMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows != da * db {
        return Err(Error::Dimension(format!(
            "partial trace over ({da},{db}) needs a {0}x{0} matrix, got {1}x{2}",
            da * db,
            m.rows,
            m.cols
        )));
    }
    Ok(match keep {
        Side::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Side::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    })
}

/// Eigendecomposition of a Hermitian matrix: `m = V diag(values) V†` with
/// `values` sorted in descending order and eigenvectors in the columns of `V`.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }

    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                if fl[k] != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                }
            }
            acc
        })
    }

    pub fn vector(&self, k: usize) -> CVector {
        CVector((0..self.vectors.rows).map(|i| self.vectors[(i, k)]).collect())
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    let mut a = m.hermitian_gate()?;
    let n = a.rows;
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    if scale > 0.0 {
        loop {
            let off = off_norm(&a);
            if off <= JACOBI_REL_TOL * scale {
                break;
            }
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(Error::NoConvergence { sweeps, off });
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEig { values, vectors })
}

/// One complex Jacobi rotation zeroing `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = g / g_abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = if theta.is_finite() { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) } else { 0.0 };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * g_abs, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * g_abs, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}

/// Eigenvalues below this fraction of the spectral radius are numerical
/// noise of the eigensolver and are treated as exact zeros.
pub(crate) fn rank_cutoff(values: &[f64]) -> f64 {
    let radius = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    4.0 * values.len() as f64 * f64::EPSILON * radius
}

/// Eigendecomposition of a PSD matrix with noise-level and slightly negative
/// eigenvalues set to exactly zero. Fails if an eigenvalue is below `-PSD_TOL`.
pub fn psd_eig(m: &CMatrix) -> Result<HermitianEig> {
    let mut eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -PSD_TOL {
            return Err(Error::NotPsd { eigenvalue: min, tolerance: PSD_TOL });
        }
    }
    let cutoff = rank_cutoff(&eig.values);
    for l in &mut eig.values {
        if *l <= cutoff {
            *l = 0.0;
        }
    }
    Ok(eig)
}

/// Principal square root of a Hermitian PSD matrix.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    Ok(psd_eig(m)?.reconstruct_with(f64::sqrt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect::<Vec<_>>()).unwrap()
    }

    fn sigma_x() -> CMatrix {
        real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn sigma_y() -> CMatrix {
        CMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]]).unwrap()
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&g + &g.adjoint()).scale_re(0.5)
    }

    fn random_psd(rng: &mut impl Rng, n: usize) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        &g * &g.adjoint()
    }

    fn rel_dist(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn kron_identities() {
        assert_eq!(tensor_product(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let d = tensor_product(&CMatrix::from_real_diag(&[1.0, 2.0]), &CMatrix::from_real_diag(&[3.0, 4.0]));
        assert_eq!(d, CMatrix::from_real_diag(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_sigma_y_pair_is_antidiagonal() {
        // σy⊗σy expanded by hand: antidiagonal (-1, 1, 1, -1), zeros elsewhere.
        let yy = tensor_product(&sigma_y(), &sigma_y());
        let expected =
            real(&[&[0.0, 0.0, 0.0, -1.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(yy, expected);
    }

    #[test]
    fn kron_is_associative_on_integer_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut int_mat = |r: usize, cc: usize| {
            CMatrix::from_fn(r, cc, |_, _| c(rng.random_range(-3..4) as f64, rng.random_range(-3..4) as f64))
        };
        let (a, b, m) = (int_mat(2, 3), int_mat(3, 2), int_mat(2, 2));
        let left = tensor_product(&tensor_product(&a, &b), &m);
        let right = tensor_product(&a, &tensor_product(&b, &m));
        assert_eq!(left, right);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::new(vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)]).unwrap();
        let rho_a = partial_trace(&bell.projector(), (2, 2), Side::A).unwrap();
        assert!(rel_dist(&rho_a, &CMatrix::from_real_diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_scales_by_other_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = CMatrix::from_fn(3, 3, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let b = CMatrix::from_fn(2, 2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let ab = tensor_product(&a, &b);
            let kept_a = partial_trace(&ab, (3, 2), Side::A).unwrap();
            assert!((&kept_a - &a.scale(b.trace())).frobenius_norm() < 1e-10);
            let kept_b = partial_trace(&ab, (3, 2), Side::B).unwrap();
            assert!((&kept_b - &b.scale(a.trace())).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(matches!(partial_trace(&CMatrix::identity(5), (2, 2), Side::A), Err(Error::Dimension(_))));
        assert!(partial_trace(&CMatrix::zeros(4, 2), (2, 2), Side::A).is_err());
    }

    #[test]
    fn eig_diagonal_and_sigma_x() {
        let e = hermitian_eig(&CMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);

        let e = hermitian_eig(&sigma_x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = CVector::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let minus = CVector::new(vec![c(s, 0.0), c(-s, 0.0)]).unwrap();
        assert!((plus.inner(&e.vector(0)).norm() - 1.0).abs() < 1e-12);
        assert!((minus.inner(&e.vector(1)).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let m = random_hermitian(&mut rng, 9);
            let e = hermitian_eig(&m).unwrap();
            assert!(rel_dist(&e.reconstruct(), &m) < 1e-9);
            let vtv = &e.vectors.adjoint() * &e.vectors;
            assert!((&vtv - &CMatrix::identity(9)).frobenius_norm() < 1e-9);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_of_density_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let p = random_psd(&mut rng, 6);
            let rho = p.scale_re(1.0 / p.trace().re);
            let sum: f64 = hermitian_eig(&rho).unwrap().values.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let mut near = sigma_x();
        near[(0, 1)] += c(1e-12, 0.0);
        assert!(hermitian_eig(&near).is_ok());
    }

    #[test]
    fn sqrt_psd_cases() {
        assert_eq!(sqrt_psd(&CMatrix::identity(3)).unwrap(), CMatrix::identity(3));
        let r = sqrt_psd(&CMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!(rel_dist(&r, &CMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
        assert!(matches!(sqrt_psd(&CMatrix::from_real_diag(&[1.0, -1e-6])), Err(Error::NotPsd { .. })));
        assert!(sqrt_psd(&CMatrix::from_real_diag(&[1.0, -1e-12])).is_ok());
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for i in 0..100 {
            let m = random_psd(&mut rng, 2 + i % 8);
            let r = sqrt_psd(&m).unwrap();
            assert!(r.hermitian_deviation() < 1e-12);
            assert!(rel_dist(&(&r * &r), &m) < 1e-8);
        }
    }

    #[test]
    fn sqrt_psd_on_diagonals_is_entrywise_and_monotone() {
        let small = [0.1, 0.5, 2.0];
        let large = [0.2, 0.5, 3.0];
        let rs = sqrt_psd(&CMatrix::from_real_diag(&small)).unwrap();
        let rl = sqrt_psd(&CMatrix::from_real_diag(&large)).unwrap();
        for i in 0..3 {
            assert!((rs[(i, i)].re - small[i].sqrt()).abs() < 1e-14);
            assert!(rs[(i, i)].re <= rl[(i, i)].re);
        }
    }
}
