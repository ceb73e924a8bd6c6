//! Entanglement and state-comparison measures.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{self, tensor_product, CMatrix, Side};
use crate::states::{BipartiteKet, DensityMatrix};

/// Purity gate for the pure-state-only measures.
pub const PURE_GATE: f64 = 1.0 - 1e-6;
/// Reduced-state eigenvalues at or below this contribute nothing to the entropy.
pub const ENTROPY_EIGEN_FLOOR: f64 = 1e-12;
const NORMALIZE_OVERSHOOT: f64 = 1e-9;
const FIDELITY_CLAMP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    Concurrence,
    IConcurrence,
    Eof,
    Pconcurrence,
}

impl MeasureName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureName::Concurrence => "concurrence",
            MeasureName::IConcurrence => "i_concurrence",
            MeasureName::Eof => "eof",
            MeasureName::Pconcurrence => "pconcurrence",
        }
    }
}

impl fmt::Display for MeasureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "concurrence" | "wootters" => Ok(MeasureName::Concurrence),
            "i_concurrence" | "iconcurrence" => Ok(MeasureName::IConcurrence),
            "eof" | "entropy" => Ok(MeasureName::Eof),
            "pconcurrence" | "pconc" | "p_concurrence" => Ok(MeasureName::Pconcurrence),
            other => Err(Error::InvalidArgument(format!("unknown measure '{other}'"))),
        }
    }
}

/// A measure value together with its normalization in some dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub measure: MeasureName,
    pub raw: f64,
    pub normalized: f64,
}

impl MeasureValue {
    pub fn new(measure: MeasureName, raw: f64, d: usize) -> Result<Self> {
        Ok(Self { measure, raw, normalized: normalize_measure(raw, measure, d)? })
    }
}

/// Either representation of a (claimed) pure state.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Ket(&'a BipartiteKet),
    Density(&'a DensityMatrix),
}

impl<'a> From<&'a BipartiteKet> for StateRef<'a> {
    fn from(k: &'a BipartiteKet) -> Self {
        StateRef::Ket(k)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Density(r)
    }
}

impl StateRef<'_> {
    fn pure_reduced(&self, measure: &'static str, keep: Side) -> Result<CMatrix> {
        match self {
            StateRef::Ket(k) => Ok(k.reduced(keep)),
            StateRef::Density(rho) => {
                let p = purity(rho);
                if p < PURE_GATE {
                    return Err(Error::NotPure { measure, purity: p, gate: PURE_GATE });
                }
                Ok(rho.reduced(keep))
            }
        }
    }

    fn min_dim(&self) -> usize {
        let (a, b) = match self {
            StateRef::Ket(k) => k.dims(),
            StateRef::Density(r) => r.dims(),
        };
        a.min(b)
    }
}

/// `σy ⊗ σy` in the computational basis.
fn spin_flip() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let sy = CMatrix::from_rows(&[vec![qmath::ZERO, -i], vec![i, qmath::ZERO]]).expect("2x2");
    tensor_product(&sy, &sy)
}

/// Wootters concurrence of a two-qubit state, `max(0, λ1 - λ2 - λ3 - λ4)`
/// where `λi²` are the eigenvalues of `√ρ ρ̃ √ρ` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != (2, 2) {
        return Err(Error::Dimension(format!(
            "concurrence needs a two-qubit state, got ({},{})",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let yy = spin_flip();
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    let root = qmath::sqrt_psd(rho.matrix())?;
    let r = (&(&root * &flipped) * &root).symmetrized();
    let eig = qmath::psd_eig(&r)?;
    let l: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// `sqrt(2 (1 - Tr ρ_A²))` for pure states of any dimensions.
pub fn i_concurrence<'a>(state: impl Into<StateRef<'a>>) -> Result<f64> {
    let rho_a = state.into().pure_reduced("i-concurrence", Side::A)?;
    i_concurrence_from_reduced(&rho_a)
}

/// I-concurrence evaluated from side B's reduced state instead of side A's.
pub fn i_concurrence_side<'a>(state: impl Into<StateRef<'a>>, side: Side) -> Result<f64> {
    let reduced = state.into().pure_reduced("i-concurrence", side)?;
    i_concurrence_from_reduced(&reduced)
}

fn i_concurrence_from_reduced(reduced: &CMatrix) -> Result<f64> {
    let p = reduced.trace_product(reduced).re;
    Ok((2.0 * (1.0 - p)).max(0.0).sqrt())
}

/// Entropy of entanglement in bits, `-Tr ρ_A log2 ρ_A`, for pure states.
pub fn eof_pure<'a>(state: impl Into<StateRef<'a>>) -> Result<f64> {
    eof_pure_side(state, Side::A)
}

pub fn eof_pure_side<'a>(state: impl Into<StateRef<'a>>, side: Side) -> Result<f64> {
    let reduced = state.into().pure_reduced("entanglement of formation", side)?;
    let eig = qmath::hermitian_eig(&reduced)?;
    Ok(eig.values.iter().filter(|&&l| l > ENTROPY_EIGEN_FLOOR).map(|&l| -l * l.log2()).sum::<f64>().max(0.0))
}

/// Pure-state maximum of a measure in `d` dimensions.
pub fn measure_maximum(measure: MeasureName, d: usize) -> f64 {
    match measure {
        MeasureName::Eof => (d as f64).log2(),
        MeasureName::IConcurrence => (2.0 * (d as f64 - 1.0) / d as f64).sqrt(),
        MeasureName::Concurrence | MeasureName::Pconcurrence => 1.0,
    }
}

/// Divides by the `d`-dimensional pure-state maximum. Overshoot up to 1e-9 is
/// clamped; anything larger is an error.
pub fn normalize_measure(raw: f64, measure: MeasureName, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("normalization dimension must be >= 2, got {d}")));
    }
    if raw.is_nan() || raw < 0.0 {
        return Err(Error::InvalidArgument(format!("{measure} value {raw} is negative or NaN")));
    }
    let v = raw / measure_maximum(measure, d);
    if v > 1.0 + NORMALIZE_OVERSHOOT {
        return Err(Error::InvalidArgument(format!(
            "{measure} value {raw} exceeds the {d}-dimensional maximum (normalized {v})"
        )));
    }
    Ok(v.min(1.0))
}

/// Default normalization dimension for a state: the smaller side.
pub fn natural_dimension<'a>(state: impl Into<StateRef<'a>>) -> usize {
    state.into().min_dim()
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().trace_product(rho.matrix()).re
}

/// `⟨t|ρ|t⟩`.
pub fn fidelity_to_ket(rho: &DensityMatrix, target: &BipartiteKet) -> Result<f64> {
    if rho.dims() != target.dims() {
        return Err(Error::Dimension(format!(
            "state ({},{}) vs target ({},{})",
            rho.dim_a(),
            rho.dim_b(),
            target.dim_a(),
            target.dim_b()
        )));
    }
    clamp_fidelity(rho.matrix().expectation(target.amplitudes()).re)
}

/// Uhlmann fidelity `(Tr sqrt(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::Dimension("fidelity between states of different dimensions".into()));
    }
    let root = qmath::sqrt_psd(rho.matrix())?;
    let inner = (&(&root * sigma.matrix()) * &root).symmetrized();
    let eig = qmath::psd_eig(&inner)?;
    let t: f64 = eig.values.iter().map(|v| v.max(0.0).sqrt()).sum();
    clamp_fidelity(t * t)
}

fn clamp_fidelity(f: f64) -> Result<f64> {
    if !(-FIDELITY_CLAMP..=1.0 + FIDELITY_CLAMP).contains(&f) {
        // Only reachable if the inputs were not valid states.
        return Err(Error::InvalidArgument(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}
