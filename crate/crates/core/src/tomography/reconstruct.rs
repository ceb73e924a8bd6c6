//! Density-matrix reconstruction from tomography records: least-squares
//! linear inversion with PSD projection, and the multiplicative RρR
//! maximum-likelihood iteration.

use num_complex::Complex64;

use super::{ProjectorSetting, TomographyRecord};
use crate::error::{Error, Result};
use crate::qmath::{self, CMatrix, CVector};
use crate::states::{validate_density, DensityMatrix};

/// Relative eigenvalue floor of the normal matrix used for the rank test.
const RANK_REL_TOL: f64 = 1e-10;
/// Probability floor inside the likelihood and the R operator.
const PROBABILITY_FLOOR: f64 = 1e-15;
/// Damping halvings tried before the iteration is declared stalled.
const MAX_DAMPING_HALVINGS: usize = 40;

/// Orthonormal Hermitian operator basis of dimension `n`, represented by the
/// real coefficients `⟨v|G_k|v⟩` it induces on a ket: diagonal units first,
/// then for every `i < j` the symmetric and antisymmetric combinations.
fn basis_coefficients(v: &[Complex64]) -> Vec<f64> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * n);
    out.extend(v.iter().map(Complex64::norm_sqr));
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            let z = v[i].conj() * v[j];
            out.push(r2 * z.re);
            out.push(-r2 * z.im);
        }
    }
    out
}

/// `Σ_k x_k G_k` for the basis of [`basis_coefficients`].
fn operator_from_coefficients(x: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(x[i], 0.0);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = n;
    for i in 0..n {
        for j in i + 1..n {
            let (sym, anti) = (x[k], x[k + 1]);
            k += 2;
            // sym (E_ij + E_ji)/√2 + anti i(E_ij - E_ji)/√2
            m[(i, j)] = Complex64::new(sym * s, anti * s);
            m[(j, i)] = Complex64::new(sym * s, -anti * s);
        }
    }
    m
}

struct NormalEquations {
    eig: qmath::HermitianEig,
    rank: usize,
    design: Vec<Vec<f64>>,
}

fn normal_equations(settings: &[ProjectorSetting], dims: (usize, usize)) -> Result<NormalEquations> {
    let n = dims.0 * dims.1;
    let params = n * n;
    let design: Vec<Vec<f64>> = settings
        .iter()
        .map(|s| {
            if (s.arm_a().dim(), s.arm_b().dim()) != dims {
                return Err(Error::Dimension("setting does not match record dimensions".into()));
            }
            Ok(basis_coefficients(s.joint_ket().as_slice()))
        })
        .collect::<Result<_>>()?;
    let mut normal = CMatrix::zeros(params, params);
    for row in &design {
        for (p, &rp) in row.iter().enumerate() {
            if rp == 0.0 {
                continue;
            }
            for (q, &rq) in row.iter().enumerate() {
                normal[(p, q)] += Complex64::new(rp * rq, 0.0);
            }
        }
    }
    let eig = qmath::hermitian_eig(&normal)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let rank = eig.values.iter().filter(|&&l| top > 0.0 && l > RANK_REL_TOL * top).count();
    Ok(NormalEquations { eig, rank, design })
}

/// Numerical rank of the linear map from Hermitian operators to setting
/// probabilities (full rank is `(dA·dB)²`).
pub fn design_rank(settings: &[ProjectorSetting], dims: (usize, usize)) -> Result<usize> {
    Ok(normal_equations(settings, dims)?.rank)
}

/// Clips negative eigenvalues and renormalizes the trace.
fn project_psd(m: &CMatrix, dims: (usize, usize)) -> Result<DensityMatrix> {
    let eig = qmath::hermitian_eig(&m.symmetrized())?;
    let total: f64 = eig.values.iter().map(|l| l.max(0.0)).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidArgument("reconstruction has no positive part".into()));
    }
    let projected = eig.reconstruct_with(|l| l.max(0.0) / total);
    validate_density(&projected, dims)
}

/// Least-squares inversion of the observed frequencies followed by a PSD
/// projection.
pub fn reconstruct_linear(record: &TomographyRecord) -> Result<DensityMatrix> {
    record.validate()?;
    let dims = record.dims();
    let n = dims.0 * dims.1;
    let params = n * n;
    let ne = normal_equations(&record.settings, dims)?;
    if ne.rank < params {
        return Err(Error::RankDeficient { rank: ne.rank, required: params });
    }
    let freqs = record.frequencies();
    let mut rhs = vec![0.0; params];
    for (row, f) in ne.design.iter().zip(&freqs) {
        for (r, a) in rhs.iter_mut().zip(row) {
            *r += a * f;
        }
    }
    let mut x = vec![0.0; params];
    for (k, &lambda) in ne.eig.values.iter().enumerate() {
        let u: Vec<f64> = (0..params).map(|i| ne.eig.vectors[(i, k)].re).collect();
        let coef: f64 = u.iter().zip(&rhs).map(|(a, b)| a * b).sum::<f64>() / lambda;
        for (xi, ui) in x.iter_mut().zip(&u) {
            *xi += coef * ui;
        }
    }
    project_psd(&operator_from_coefficients(&x, n), dims)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions {
    /// Stop once one iteration gains less log-likelihood than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 10_000 }
    }
}

#[derive(Clone, Debug)]
pub struct MleOutcome {
    pub state: DensityMatrix,
    pub iterations: usize,
    /// False if `max_iter` was reached before the gain dropped below `tol`.
    pub converged: bool,
    /// Log-likelihood of the starting point and after every accepted step.
    pub log_likelihood: Vec<f64>,
}

struct Likelihood {
    kets: Vec<CVector>,
    freqs: Vec<f64>,
    total: f64,
}

impl Likelihood {
    fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.kets.iter().map(|v| rho.expectation(v.as_slice()).re.max(PROBABILITY_FLOOR)).collect()
    }

    /// `Σ_j f_j ln p_j`.
    fn value(&self, probs: &[f64]) -> f64 {
        self.freqs.iter().zip(probs).filter(|(f, _)| **f > 0.0).map(|(f, p)| f * p.ln()).sum()
    }

    /// `R = Σ_j (f_j / p_j) |v_j⟩⟨v_j| / Σ_j f_j`, equal to the identity on
    /// the support at the maximum.
    fn r_operator(&self, probs: &[f64], n: usize) -> CMatrix {
        let mut r = CMatrix::zeros(n, n);
        for ((v, f), p) in self.kets.iter().zip(&self.freqs).zip(probs) {
            if *f == 0.0 {
                continue;
            }
            let w = f / p / self.total;
            let v = v.as_slice();
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    r[(i, j)] += vi * v[j].conj();
                }
            }
        }
        r
    }
}

fn rrr_step(r: &CMatrix, rho: &CMatrix) -> CMatrix {
    let m = (&(r * rho) * r).symmetrized();
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Iterative maximum-likelihood reconstruction, `ρ ← N[R(ρ) ρ R(ρ)]`
/// starting from the maximally mixed state. Steps that would lower the
/// likelihood are damped with `R → (1-t) I + t R`, halving `t`.
pub fn reconstruct_mle(record: &TomographyRecord, opts: MleOptions) -> Result<MleOutcome> {
    record.validate()?;
    let dims = record.dims();
    let n = dims.0 * dims.1;
    let freqs = record.frequencies();
    let total: f64 = freqs.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidArgument("record has no counts".into()));
    }
    let lik = Likelihood { kets: record.settings.iter().map(ProjectorSetting::joint_ket).collect(), freqs, total };

    let mut rho = CMatrix::identity(n).scale_re(1.0 / n as f64);
    let mut probs = lik.probabilities(&rho);
    let mut current = lik.value(&probs);
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;
    let identity = CMatrix::identity(n);

    while iterations < opts.max_iter {
        iterations += 1;
        let r = lik.r_operator(&probs, n);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_DAMPING_HALVINGS {
            let rt = if step == 1.0 { r.clone() } else { &identity.scale_re(1.0 - step) + &r.scale_re(step) };
            let candidate = rrr_step(&rt, &rho);
            let cand_probs = lik.probabilities(&candidate);
            let value = lik.value(&cand_probs);
            if value >= current {
                accepted = Some((candidate, cand_probs, value));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_probs, value)) = accepted else {
            // No ascent direction left at working precision.
            converged = true;
            break;
        };
        let gain = value - current;
        rho = next;
        probs = next_probs;
        current = value;
        trace.push(current);
        if gain < opts.tol {
            converged = true;
            break;
        }
    }

    let state = project_psd(&rho, dims)?;
    Ok(MleOutcome { state, iterations, converged, log_likelihood: trace })
}
