//! Single-arm measurement kets and their joint two-photon settings.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{CVector, ZERO};

/// The four relative phases of the superposition kets.
pub const PHASES: [(f64, &str); 4] = [(0.0, "0"), (PI / 2.0, "pi/2"), (PI, "pi"), (3.0 * PI / 2.0, "3pi/2")];

/// A measurement ket for one photon with a human-readable label.
#[derive(Clone, Debug, PartialEq)]
pub struct ArmKet {
    pub ket: CVector,
    pub label: String,
}

/// `(|lo⟩ + e^{iθ}|hi⟩)/√2` in `d` dimensions.
pub fn superposition(d: usize, lo: usize, hi: usize, theta: f64) -> CVector {
    let mut v = vec![ZERO; d];
    v[lo] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[hi] = Complex64::from_polar(FRAC_1_SQRT_2, theta);
    CVector::new(v).expect("finite")
}

/// `|0⟩, |1⟩` and `(|0⟩ + e^{iθ}|1⟩)/√2` for the four phases: six kets, 36
/// joint settings.
pub fn qubit_setting_kets() -> Vec<ArmKet> {
    pairwise_overcomplete_kets(2).expect("d = 2 is valid")
}

/// The `d` basis kets plus the four phase superpositions of every index pair:
/// `d + 2d(d-1)` kets.
pub fn pairwise_overcomplete_kets(d: usize) -> Result<Vec<ArmKet>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("measurement set needs d >= 2, got {d}")));
    }
    let mut kets: Vec<ArmKet> = (0..d).map(|i| ArmKet { ket: CVector::basis(d, i), label: format!("|{i}>") }).collect();
    for lo in 0..d {
        for hi in lo + 1..d {
            for (theta, name) in PHASES {
                kets.push(ArmKet {
                    ket: superposition(d, lo, hi, theta),
                    label: format!("theta={name} on {{{lo},{hi}}}"),
                });
            }
        }
    }
    Ok(kets)
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| !d.is_multiple_of(p))
}

/// Complete set of `d + 1` mutually unbiased bases for prime `d`: the
/// computational basis and, for `b = 0..d`, kets with components
/// `ω^{b j² + k j} / √d`, `ω = e^{2πi/d}` (for `d = 2` the diagonal and
/// circular bases).
pub fn mub_kets(d: usize) -> Result<Vec<ArmKet>> {
    if !is_prime(d) {
        return Err(Error::InvalidArgument(format!("MUB construction requires prime d, got {d}")));
    }
    let mut kets: Vec<ArmKet> =
        (0..d).map(|i| ArmKet { ket: CVector::basis(d, i), label: format!("mub0 |{i}>") }).collect();
    if d == 2 {
        for (b, phase) in [(1, 0.0), (2, PI / 2.0)] {
            for k in 0..2 {
                kets.push(ArmKet {
                    ket: superposition(2, 0, 1, phase + k as f64 * PI),
                    label: format!("mub{b} k={k}"),
                });
            }
        }
        return Ok(kets);
    }
    let amp = 1.0 / (d as f64).sqrt();
    for b in 0..d {
        for k in 0..d {
            let v = (0..d)
                .map(|j| {
                    let exponent = (b * j * j + k * j) % d;
                    Complex64::from_polar(amp, 2.0 * PI * exponent as f64 / d as f64)
                })
                .collect();
            kets.push(ArmKet { ket: CVector::new(v)?, label: format!("mub{} k={k}", b + 1) });
        }
    }
    Ok(kets)
}

/// Named measurement set applied identically to both arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SettingsKind {
    /// The 6-ket qubit set (requires d = 2).
    Qubit36,
    Pairwise,
    Mub,
}

impl std::str::FromStr for SettingsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qubit36" | "qubit" => Ok(SettingsKind::Qubit36),
            "pairwise" => Ok(SettingsKind::Pairwise),
            "mub" => Ok(SettingsKind::Mub),
            other => Err(Error::InvalidArgument(format!("unknown settings set '{other}'"))),
        }
    }
}

pub fn arm_kets(kind: SettingsKind, d: usize) -> Result<Vec<ArmKet>> {
    match kind {
        SettingsKind::Qubit36 if d == 2 => Ok(qubit_setting_kets()),
        SettingsKind::Qubit36 => Err(Error::Dimension(format!("qubit36 settings need d = 2, got {d}"))),
        SettingsKind::Pairwise => pairwise_overcomplete_kets(d),
        SettingsKind::Mub => mub_kets(d),
    }
}
