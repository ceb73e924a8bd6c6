//! Bipartite kets, density matrices and the SPDC state families.
//!
//! Basis ordering: side A lists OAM values in descending order (for the qutrit
//! `+1, 0, -1`) and side B lists their negatives (`-1, 0, +1`), so SPDC pairs
//! `|ℓ, -ℓ⟩` sit on matched indices and the correlation-preserving subspace
//! pairing is the identity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{self, partial_trace, tensor_product, CMatrix, CVector, Side};

pub const KET_NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const MIN_EIGENVALUE_TOL: f64 = 1e-9;

/// Pure state on `C^dim_a ⊗ C^dim_b`, amplitudes indexed as `a * dim_b + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteKet {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
    labels_a: Option<Vec<i32>>,
    labels_b: Option<Vec<i32>>,
}

impl BipartiteKet {
    /// Wraps normalized amplitudes.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(dim_a, dim_b, amplitudes.len())?;
        let amplitudes = CVector::new(amplitudes)?;
        let norm_sq = amplitudes.norm_sqr();
        if (norm_sq - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { dim_a, dim_b, amplitudes, labels_a: None, labels_b: None })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(dim_a, dim_b, amplitudes.len())?;
        let v = CVector::new(amplitudes)?;
        if v.norm_sqr() == 0.0 {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        Self::new(dim_a, dim_b, v.normalized().into_inner())
    }

    /// Attaches per-side basis labels (OAM values).
    pub fn with_labels(mut self, labels_a: Vec<i32>, labels_b: Vec<i32>) -> Result<Self> {
        if labels_a.len() != self.dim_a || labels_b.len() != self.dim_b {
            return Err(Error::Dimension("label count must match side dimensions".into()));
        }
        self.labels_a = Some(labels_a);
        self.labels_b = Some(labels_b);
        Ok(self)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, a: usize, b: usize) -> Complex64 {
        self.amplitudes[a * self.dim_b + b]
    }

    pub fn labels_a(&self) -> Option<&[i32]> {
        self.labels_a.as_deref()
    }

    pub fn labels_b(&self) -> Option<&[i32]> {
        self.labels_b.as_deref()
    }

    /// The `dim_a × dim_b` coefficient matrix `M` with `|ψ⟩ = Σ M_ab |a⟩|b⟩`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |a, b| self.amplitude(a, b))
    }

    /// Reduced state of one side: `M M†` for A, `Mᵀ M̄` for B.
    pub fn reduced(&self, keep: Side) -> CMatrix {
        let m = self.coefficient_matrix();
        match keep {
            Side::A => &m * &m.adjoint(),
            Side::B => &m.transpose() * &m.conj(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        density_from_ket(self)
    }
}

fn check_dims(dim_a: usize, dim_b: usize, len: usize) -> Result<()> {
    if dim_a == 0 || dim_b == 0 || dim_a * dim_b != len {
        return Err(Error::Dimension(format!("{len} amplitudes for dimensions ({dim_a},{dim_b})")));
    }
    Ok(())
}

/// Hermitian, PSD, unit-trace bipartite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Skips validation; the caller guarantees the invariants (up to rounding).
    pub(crate) fn from_trusted(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), dim_a * dim_b);
        Self { dim_a, dim_b, matrix }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn reduced(&self, keep: Side) -> CMatrix {
        partial_trace(&self.matrix, self.dims(), keep).expect("density dimensions are consistent")
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†` for unitary (or permutation) local operators.
    pub fn apply_local(&self, u_a: &CMatrix, u_b: &CMatrix) -> Result<DensityMatrix> {
        if u_a.rows() != self.dim_a || u_a.cols() != self.dim_a || u_b.rows() != self.dim_b || u_b.cols() != self.dim_b
        {
            return Err(Error::Dimension("local operators must match side dimensions".into()));
        }
        let u = tensor_product(u_a, u_b);
        let m = &(&u * &self.matrix) * &u.adjoint();
        validate_density(&m, self.dims())
    }

    /// Convex mixture `p·self + (1-p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension("cannot mix states of different dimensions".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0,1]")));
        }
        let m = &self.matrix.scale_re(p) + &other.matrix.scale_re(1.0 - p);
        Ok(Self::from_trusted(self.dim_a, self.dim_b, m))
    }

    /// `I / (dim_a · dim_b)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<DensityMatrix> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("dimensions must be positive".into()));
        }
        let n = dim_a * dim_b;
        Ok(Self::from_trusted(dim_a, dim_b, CMatrix::identity(n).scale_re(1.0 / n as f64)))
    }
}

/// Checks Hermiticity, unit trace and positivity, then returns the
/// symmetrized, trace-renormalized density matrix.
pub fn validate_density(m: &CMatrix, dims: (usize, usize)) -> Result<DensityMatrix> {
    let (dim_a, dim_b) = dims;
    if dim_a == 0 || dim_b == 0 || !m.is_square() || m.rows() != dim_a * dim_b {
        return Err(Error::Dimension(format!(
            "density matrix for ({dim_a},{dim_b}) must be {0}x{0}, got {1}x{2}",
            dim_a * dim_b,
            m.rows(),
            m.cols()
        )));
    }
    if m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("density matrix"));
    }
    let h = m.hermitian_gate()?;
    let trace = h.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::Trace { trace, tolerance: TRACE_TOL });
    }
    let h = h.scale_re(1.0 / trace);
    let eig = qmath::hermitian_eig(&h)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -MIN_EIGENVALUE_TOL {
        return Err(Error::NotPsd { eigenvalue: min, tolerance: MIN_EIGENVALUE_TOL });
    }
    Ok(DensityMatrix { dim_a, dim_b, matrix: h })
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_ket(k: &BipartiteKet) -> DensityMatrix {
    DensityMatrix::from_trusted(k.dim_a, k.dim_b, k.amplitudes.projector())
}

/// Amplitude parameters of the three-term SPDC qutrit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdcParams {
    alpha: f64,
    beta: f64,
}

impl SpdcParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `1 / sqrt(1 + α² + β²)`.
    pub fn normalization(&self) -> f64 {
        1.0 / (1.0 + self.alpha * self.alpha + self.beta * self.beta).sqrt()
    }
}

/// `N (|0,0⟩ + α|1,-1⟩ + β|-1,1⟩)` on a 3×3 space.
pub fn make_spdc_qutrit(p: SpdcParams) -> BipartiteKet {
    let n = p.normalization();
    // Side A order (+1, 0, -1), side B order (-1, 0, +1).
    let diag = [p.alpha * n, n, p.beta * n];
    let mut amps = vec![qmath::ZERO; 9];
    for (i, &c) in diag.iter().enumerate() {
        amps[i * 3 + i] = Complex64::new(c, 0.0);
    }
    BipartiteKet {
        dim_a: 3,
        dim_b: 3,
        amplitudes: CVector::new(amps).expect("finite amplitudes"),
        labels_a: Some(vec![1, 0, -1]),
        labels_b: Some(vec![-1, 0, 1]),
    }
}

/// `Σ_i |i,i⟩ / sqrt(d)`.
pub fn make_max_entangled(d: usize) -> Result<BipartiteKet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let c = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![qmath::ZERO; d * d];
    for i in 0..d {
        amps[i * d + i] = c;
    }
    Ok(BipartiteKet { dim_a: d, dim_b: d, amplitudes: CVector::new(amps)?, labels_a: None, labels_b: None })
}

/// The `d` OAM values used for a `d`-level qudit, in side-A order
/// (descending). Odd `d` is centered on zero; even `d` skips `ℓ = 0`.
pub fn oam_values(d: usize) -> Vec<i32> {
    let d = d as i32;
    if d % 2 == 1 {
        let h = d / 2;
        (-h..=h).rev().collect()
    } else {
        let h = d / 2;
        (1..=h).rev().chain((1..=h).map(|l| -l)).collect()
    }
}

/// `Σ_ℓ c_ℓ |ℓ, -ℓ⟩` with a Gaussian spiral spectrum `c_ℓ ∝ exp(-ℓ²/(2 decay²))`.
pub fn make_spdc_qudit(d: usize, decay: f64) -> Result<BipartiteKet> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("qudit dimension must be >= 2, got {d}")));
    }
    if decay.is_nan() || decay <= 0.0 || !decay.is_finite() {
        return Err(Error::InvalidArgument(format!("spectral decay must be positive and finite, got {decay}")));
    }
    let ells = oam_values(d);
    let weights: Vec<f64> = ells.iter().map(|&l| (-(l as f64).powi(2) / (2.0 * decay * decay)).exp()).collect();
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut amps = vec![qmath::ZERO; d * d];
    for (i, w) in weights.iter().enumerate() {
        amps[i * d + i] = Complex64::new(w / norm, 0.0);
    }
    let labels_b = ells.iter().map(|l| -l).collect();
    Ok(BipartiteKet {
        dim_a: d,
        dim_b: d,
        amplitudes: CVector::new(amps)?,
        labels_a: Some(ells),
        labels_b: Some(labels_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn spdc_qutrit_limits() {
        let k = make_spdc_qutrit(SpdcParams::new(0.0, 0.0).unwrap());
        // |0,0⟩ is A index 1, B index 1.
        assert_eq!(k.amplitude(1, 1), re(1.0));
        assert_eq!(k.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);

        let k = make_spdc_qutrit(SpdcParams::new(1.0, 1.0).unwrap());
        let s = 1.0 / 3f64.sqrt();
        for i in 0..3 {
            assert!((k.amplitude(i, i) - re(s)).norm() < 1e-15);
        }

        let k = make_spdc_qutrit(SpdcParams::new(1.0, 0.0).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((k.amplitude(0, 0) - re(s)).norm() < 1e-15);
        assert!((k.amplitude(1, 1) - re(s)).norm() < 1e-15);
        assert_eq!(k.amplitude(2, 2), re(0.0));
        assert_eq!(k.labels_a(), Some(&[1, 0, -1][..]));
        assert_eq!(k.labels_b(), Some(&[-1, 0, 1][..]));
    }

    #[test]
    fn spdc_qutrit_normalization_constant() {
        for &(a, b) in &[(0.3, 0.9), (1.0, 0.2), (0.0, 0.7)] {
            let p = SpdcParams::new(a, b).unwrap();
            let n = p.normalization();
            assert!((n * n * (1.0 + a * a + b * b) - 1.0).abs() < 1e-12);
            assert!((make_spdc_qutrit(p).as_vector().norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn spdc_params_reject_out_of_range() {
        assert!(SpdcParams::new(1.1, 0.0).is_err());
        assert!(SpdcParams::new(0.5, -0.01).is_err());
        assert!(SpdcParams::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn max_entangled_and_reduced_state() {
        let k = make_max_entangled(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (z, w) in k.amplitudes().iter().zip([s, 0.0, 0.0, s]) {
            assert!((z - re(w)).norm() < 1e-15);
        }
        for d in 2..6 {
            let rho_a = make_max_entangled(d).unwrap().reduced(Side::A);
            let target = CMatrix::identity(d).scale_re(1.0 / d as f64);
            assert!((&rho_a - &target).frobenius_norm() < 1e-15);
        }
        assert!(make_max_entangled(1).is_err());
    }

    #[test]
    fn spdc_qudit_spectrum() {
        let k = make_spdc_qudit(3, 1.0).unwrap();
        let w = [(-0.5f64).exp(), 1.0, (-0.5f64).exp()];
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (i, wi) in w.iter().enumerate() {
            assert!((k.amplitude(i, i).re - wi / n).abs() < 1e-15);
        }

        let flat = make_spdc_qudit(5, 1e6).unwrap();
        let max = make_max_entangled(5).unwrap();
        for (a, b) in flat.amplitudes().iter().zip(max.amplitudes()) {
            assert!((a - b).norm() < 1e-6);
        }
        assert!((make_spdc_qudit(8, 2.0).unwrap().as_vector().norm_sqr() - 1.0).abs() < 1e-10);
        assert!(make_spdc_qudit(3, 0.0).is_err());
        assert!(make_spdc_qudit(3, -1.0).is_err());
    }

    #[test]
    fn oam_value_orders() {
        assert_eq!(oam_values(3), vec![1, 0, -1]);
        assert_eq!(oam_values(4), vec![2, 1, -1, -2]);
        assert_eq!(oam_values(5), vec![2, 1, 0, -1, -2]);
    }

    #[test]
    fn density_from_ket_is_pure() {
        let k = make_spdc_qutrit(SpdcParams::new(0.0, 0.0).unwrap());
        let rho = density_from_ket(&make_max_entangled(2).unwrap());
        assert!((rho.matrix()[(0, 0)] - re(0.5)).norm() < 1e-15);
        assert!((rho.matrix()[(0, 3)] - re(0.5)).norm() < 1e-15);
        assert!((rho.matrix()[(3, 0)] - re(0.5)).norm() < 1e-15);
        assert!((rho.matrix()[(3, 3)] - re(0.5)).norm() < 1e-15);
        assert_eq!(density_from_ket(&k).matrix()[(4, 4)], re(1.0));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let amps =
                (0..9).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let rho = BipartiteKet::normalized(3, 3, amps).unwrap().to_density();
            let purity = rho.matrix().trace_product(rho.matrix()).re;
            assert!((purity - 1.0).abs() < 1e-10);
            let e = qmath::hermitian_eig(rho.matrix()).unwrap();
            assert!((e.values[0] - 1.0).abs() < 1e-10);
            assert!(e.values[1..].iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn validate_density_gates() {
        let bad_trace = CMatrix::identity(4).scale_re(0.3);
        assert!(matches!(validate_density(&bad_trace, (2, 2)), Err(Error::Trace { .. })));
        let not_psd = CMatrix::from_real_diag(&[0.6, 0.6, -0.2, 0.0]);
        assert!(matches!(validate_density(&not_psd, (2, 2)), Err(Error::NotPsd { .. })));
        let mut non_herm = CMatrix::identity(4).scale_re(0.25);
        non_herm[(0, 1)] = re(0.1);
        assert!(matches!(validate_density(&non_herm, (2, 2)), Err(Error::NotHermitian { .. })));
        assert!(matches!(validate_density(&CMatrix::identity(4), (3, 3)), Err(Error::Dimension(_))));

        let nearly = CMatrix::identity(4).scale_re(0.25 + 1e-11);
        let rho = validate_density(&nearly, (2, 2)).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ket_rejects_unnormalized() {
        assert!(matches!(BipartiteKet::new(1, 2, vec![re(1.0), re(1.0)]), Err(Error::NotNormalized { .. })));
        assert!(BipartiteKet::new(2, 2, vec![re(1.0)]).is_err());
    }
}
