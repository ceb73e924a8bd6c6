//! Simulated two-photon tomography: joint projective settings, Born-rule
//! probabilities, Poisson coincidence counts, qubit sub-tomography extraction
//! and the measurement budget.

mod pipeline;
mod reconstruct;
pub mod settings;

pub use pipeline::{subspace_row_from_record, witness_from_record};
pub use reconstruct::{design_rank, reconstruct_linear, reconstruct_mle, MleOptions, MleOutcome};
pub use settings::{arm_kets, mub_kets, pairwise_overcomplete_kets, qubit_setting_kets, ArmKet, SettingsKind};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::CVector;
use crate::states::DensityMatrix;
use crate::witness::IndexPair;

const SETTING_NORM_TOL: f64 = 1e-10;
const PROBABILITY_CLAMP: f64 = 1e-12;
const SUPPORT_TOL: f64 = 1e-12;
/// Joint settings needed for a two-qubit reconstruction.
pub const QUBIT_PAIR_PARAMETERS: usize = 16;
/// Joint settings of an overcomplete two-qubit tomography.
pub const QUBIT_PAIR_SETTINGS: usize = 36;

/// One joint measurement: photon A projected on `arm_a`, photon B on `arm_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSetting {
    arm_a: CVector,
    arm_b: CVector,
    pub label_a: String,
    pub label_b: String,
}

impl ProjectorSetting {
    pub fn new(arm_a: CVector, arm_b: CVector, label_a: impl Into<String>, label_b: impl Into<String>) -> Result<Self> {
        for (arm, v) in [("A", &arm_a), ("B", &arm_b)] {
            if (v.norm_sqr() - 1.0).abs() > SETTING_NORM_TOL {
                return Err(Error::InvalidArgument(format!("arm {arm} ket not normalized (norm² {})", v.norm_sqr())));
            }
        }
        Ok(Self { arm_a, arm_b, label_a: label_a.into(), label_b: label_b.into() })
    }

    pub fn arm_a(&self) -> &CVector {
        &self.arm_a
    }

    pub fn arm_b(&self) -> &CVector {
        &self.arm_b
    }

    /// `|a⟩ ⊗ |b⟩`.
    pub fn joint_ket(&self) -> CVector {
        self.arm_a.kron(&self.arm_b)
    }
}

/// Every combination of an A-arm ket with a B-arm ket, A-major.
pub fn joint_settings(kets_a: &[ArmKet], kets_b: &[ArmKet]) -> Vec<ProjectorSetting> {
    kets_a
        .iter()
        .flat_map(|a| {
            kets_b.iter().map(move |b| ProjectorSetting {
                arm_a: a.ket.clone(),
                arm_b: b.ket.clone(),
                label_a: a.label.clone(),
                label_b: b.label.clone(),
            })
        })
        .collect()
}

/// Joint settings of a named measurement set on a `d × d` system.
pub fn standard_settings(kind: SettingsKind, d: usize) -> Result<Vec<ProjectorSetting>> {
    let kets = arm_kets(kind, d)?;
    Ok(joint_settings(&kets, &kets))
}

/// Observed coincidences for a list of joint settings.
#[derive(Clone, Debug, PartialEq)]
pub struct TomographyRecord {
    pub dim_a: usize,
    pub dim_b: usize,
    pub settings: Vec<ProjectorSetting>,
    pub counts: Vec<u64>,
    pub rate_hz: f64,
    pub integration_time_s: f64,
    pub seed: Option<u64>,
}

impl TomographyRecord {
    pub fn new(
        dims: (usize, usize),
        settings: Vec<ProjectorSetting>,
        counts: Vec<u64>,
        rate_hz: f64,
        integration_time_s: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        let r = Self { dim_a: dims.0, dim_b: dims.1, settings, counts, rate_hz, integration_time_s, seed };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.counts.len() != self.settings.len() {
            return Err(Error::Dimension(format!("{} counts for {} settings", self.counts.len(), self.settings.len())));
        }
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite())
            || !(self.integration_time_s > 0.0 && self.integration_time_s.is_finite())
        {
            return Err(Error::InvalidArgument("rate and integration time must be positive".into()));
        }
        for s in &self.settings {
            if s.arm_a.dim() != self.dim_a || s.arm_b.dim() != self.dim_b {
                return Err(Error::Dimension(format!(
                    "setting dims ({},{}) in a ({},{}) record",
                    s.arm_a.dim(),
                    s.arm_b.dim(),
                    self.dim_a,
                    self.dim_b
                )));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// Expected counts per unit probability.
    pub fn exposure(&self) -> f64 {
        self.rate_hz * self.integration_time_s
    }

    /// Per-setting frequencies `count / (rate · time)`.
    pub fn frequencies(&self) -> Vec<f64> {
        let e = self.exposure();
        self.counts.iter().map(|&c| c as f64 / e).collect()
    }
}

/// `Tr(ρ |a⟩⟨a| ⊗ |b⟩⟨b|)`.
pub fn born_probability(rho: &DensityMatrix, s: &ProjectorSetting) -> Result<f64> {
    if (s.arm_a.dim(), s.arm_b.dim()) != rho.dims() {
        return Err(Error::Dimension("setting does not match state dimensions".into()));
    }
    let p = rho.matrix().expectation(s.joint_ket().as_slice()).re;
    if !(-PROBABILITY_CLAMP..=1.0 + PROBABILITY_CLAMP).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0,1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn check_exposure(rate_hz: f64, integration_time_s: f64) -> Result<()> {
    if !(rate_hz > 0.0 && rate_hz.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {rate_hz}")));
    }
    if !(integration_time_s > 0.0 && integration_time_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("integration time must be positive, got {integration_time_s}")));
    }
    Ok(())
}

/// Draw for setting `index` under `seed`; independent of evaluation order.
fn poisson_draw(seed: u64, index: usize, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    Poisson::new(mean).expect("positive finite mean").sample(&mut rng) as u64
}

/// Poisson coincidence counts with mean `rate · time · p` per setting.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[ProjectorSetting],
    rate_hz: f64,
    integration_time_s: f64,
    seed: u64,
) -> Result<TomographyRecord> {
    check_exposure(rate_hz, integration_time_s)?;
    let exposure = rate_hz * integration_time_s;
    let counts = settings
        .par_iter()
        .enumerate()
        .map(|(i, s)| Ok(poisson_draw(seed, i, exposure * born_probability(rho, s)?)))
        .collect::<Result<Vec<_>>>()?;
    TomographyRecord::new(rho.dims(), settings.to_vec(), counts, rate_hz, integration_time_s, Some(seed))
}

/// Counts equal to the rounded expectation `rate · time · p`.
pub fn expected_counts(
    rho: &DensityMatrix,
    settings: &[ProjectorSetting],
    rate_hz: f64,
    integration_time_s: f64,
) -> Result<TomographyRecord> {
    check_exposure(rate_hz, integration_time_s)?;
    let exposure = rate_hz * integration_time_s;
    let counts = settings
        .iter()
        .map(|s| Ok((exposure * born_probability(rho, s)?).round() as u64))
        .collect::<Result<Vec<_>>>()?;
    TomographyRecord::new(rho.dims(), settings.to_vec(), counts, rate_hz, integration_time_s, None)
}

/// Restricts `v` to `span{pair.lo, pair.hi}` if it has no support elsewhere.
fn restrict(v: &CVector, pair: IndexPair) -> Option<CVector> {
    let outside = v
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pair.lo() && *i != pair.hi())
        .all(|(_, z)| z.norm() <= SUPPORT_TOL);
    outside.then(|| CVector::new(vec![v[pair.lo()], v[pair.hi()]]).expect("finite"))
}

/// Keeps the settings whose arm kets live inside the qubit subspace
/// `a ⊗ b`, re-expressed in subspace coordinates (lo→0, hi→1). Counts are
/// passed through unchanged.
pub fn extract_sub_tomography(record: &TomographyRecord, a: IndexPair, b: IndexPair) -> Result<TomographyRecord> {
    if a.hi() >= record.dim_a || b.hi() >= record.dim_b {
        return Err(Error::Dimension(format!("subspace {a}x{b} outside record dims {:?}", record.dims())));
    }
    let mut settings = Vec::new();
    let mut counts = Vec::new();
    for (s, &c) in record.settings.iter().zip(&record.counts) {
        if let (Some(ka), Some(kb)) = (restrict(&s.arm_a, a), restrict(&s.arm_b, b)) {
            settings.push(ProjectorSetting {
                arm_a: ka,
                arm_b: kb,
                label_a: s.label_a.clone(),
                label_b: s.label_b.clone(),
            });
            counts.push(c);
        }
    }
    let rank = design_rank(&settings, (2, 2))?;
    if rank < QUBIT_PAIR_PARAMETERS {
        return Err(Error::RankDeficient { rank, required: QUBIT_PAIR_PARAMETERS });
    }
    TomographyRecord::new((2, 2), settings, counts, record.rate_hz, record.integration_time_s, record.seed)
}

/// Measurement counts and times for P-concurrence vs full tomography.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub d: usize,
    pub k: usize,
    pub pconc_measurements: u64,
    pub qst_measurements: u64,
    pub pconc_time_s: f64,
    pub qst_time_s: f64,
}

impl Budget {
    pub fn pconc_hours(&self) -> f64 {
        self.pconc_time_s / 3600.0
    }

    pub fn qst_hours(&self) -> f64 {
        self.qst_time_s / 3600.0
    }

    pub fn reduction(&self) -> f64 {
        self.qst_measurements as f64 / self.pconc_measurements as f64
    }
}

/// `36 K` qubit-subspace measurements vs `(2d² - d)²` pairwise-overcomplete
/// measurements, each taking `integration_time_s`.
pub fn budget(d: usize, integration_time_s: f64) -> Result<Budget> {
    let k = crate::witness::count_subspaces(d)?;
    if !(integration_time_s > 0.0 && integration_time_s.is_finite()) {
        return Err(Error::InvalidArgument(format!("integration time must be positive, got {integration_time_s}")));
    }
    let pconc = (QUBIT_PAIR_SETTINGS * k) as u64;
    let per_arm = (2 * d * d - d) as u64;
    let qst = per_arm * per_arm;
    Ok(Budget {
        d,
        k,
        pconc_measurements: pconc,
        qst_measurements: qst,
        pconc_time_s: pconc as f64 * integration_time_s,
        qst_time_s: qst as f64 * integration_time_s,
    })
}

// ---- JSON file format ----

#[derive(Serialize, Deserialize)]
struct SettingJson {
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
    label_a: String,
    label_b: String,
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    rate_hz: f64,
    integration_time_s: f64,
    seed: Option<u64>,
    settings: Vec<SettingJson>,
    counts: Vec<u64>,
}

fn to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.as_slice().iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(p: &[[f64; 2]]) -> Result<CVector> {
    CVector::new(p.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

impl TomographyRecord {
    pub fn to_json_string(&self) -> String {
        let j = RecordJson {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            rate_hz: self.rate_hz,
            integration_time_s: self.integration_time_s,
            seed: self.seed,
            settings: self
                .settings
                .iter()
                .map(|s| SettingJson {
                    a: to_pairs(&s.arm_a),
                    b: to_pairs(&s.arm_b),
                    label_a: s.label_a.clone(),
                    label_b: s.label_b.clone(),
                })
                .collect(),
            counts: self.counts.clone(),
        };
        serde_json::to_string_pretty(&j).expect("record serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: RecordJson = serde_json::from_str(s)?;
        let settings = j
            .settings
            .iter()
            .map(|s| ProjectorSetting::new(from_pairs(&s.a)?, from_pairs(&s.b)?, s.label_a.clone(), s.label_b.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new((j.dim_a, j.dim_b), settings, j.counts, j.rate_hz, j.integration_time_s, j.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::make_max_entangled;

    fn pair(lo: usize, hi: usize) -> IndexPair {
        IndexPair::new(lo, hi).unwrap()
    }

    #[test]
    fn born_probabilities_for_bell() {
        let rho = make_max_entangled(2).unwrap().to_density();
        let z0 = CVector::basis(2, 0);
        let z1 = CVector::basis(2, 1);
        let s = ProjectorSetting::new(z0.clone(), z0.clone(), "0", "0").unwrap();
        assert!((born_probability(&rho, &s).unwrap() - 0.5).abs() < 1e-15);
        let s = ProjectorSetting::new(z0, z1, "0", "1").unwrap();
        assert_eq!(born_probability(&rho, &s).unwrap(), 0.0);
    }

    #[test]
    fn born_probability_mub_conjugate_pairs() {
        // ⟨a|⊗⟨b| Σ|ii⟩/√3 with b = a* gives |Σ|a_i|²|²/3 = 1/3.
        let rho = make_max_entangled(3).unwrap().to_density();
        for k in mub_kets(3).unwrap() {
            let conj = CVector::new(k.ket.as_slice().iter().map(|z| z.conj()).collect()).unwrap();
            let s = ProjectorSetting::new(k.ket.clone(), conj, "a", "a*").unwrap();
            assert!((born_probability(&rho, &s).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probabilities_over_basis_pairs_sum_to_one() {
        let rho = crate::states::make_spdc_qudit(3, 0.8).unwrap().to_density();
        let kets = mub_kets(3).unwrap();
        for ba in 0..4 {
            for bb in 0..4 {
                let total: f64 = joint_settings(&kets[ba * 3..ba * 3 + 3], &kets[bb * 3..bb * 3 + 3])
                    .iter()
                    .map(|s| born_probability(&rho, s).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn simulation_is_deterministic_and_zero_safe() {
        let rho = make_max_entangled(2).unwrap().to_density();
        let settings = standard_settings(SettingsKind::Qubit36, 2).unwrap();
        let r1 = simulate_counts(&rho, &settings, 1000.0, 10.0, 42).unwrap();
        let r2 = simulate_counts(&rho, &settings, 1000.0, 10.0, 42).unwrap();
        assert_eq!(r1, r2);
        let r3 = simulate_counts(&rho, &settings, 1000.0, 10.0, 43).unwrap();
        assert_ne!(r1.counts, r3.counts);
        for (s, c) in settings.iter().zip(&r1.counts) {
            if born_probability(&rho, s).unwrap() == 0.0 {
                assert_eq!(*c, 0);
            }
        }
        assert!(simulate_counts(&rho, &settings, 0.0, 10.0, 1).is_err());
        assert!(simulate_counts(&rho, &settings, 10.0, -1.0, 1).is_err());
    }

    #[test]
    fn poisson_sample_mean_within_three_sigma() {
        let mean = 1e4 * 0.37;
        let n = 1000;
        let total: u64 = (0..n).map(|seed| poisson_draw(seed, 7, mean)).sum();
        let sample_mean = total as f64 / n as f64;
        let sigma = (mean / n as f64).sqrt();
        assert!((sample_mean - mean).abs() < 3.0 * sigma, "{sample_mean} vs {mean}");
    }

    #[test]
    fn extraction_from_pairwise_record() {
        let rho = make_max_entangled(3).unwrap().to_density();
        let settings = standard_settings(SettingsKind::Pairwise, 3).unwrap();
        assert_eq!(settings.len(), 225);
        let record = simulate_counts(&rho, &settings, 500.0, 1.0, 9).unwrap();
        for a in crate::witness::enumerate_pairs(3).unwrap() {
            for b in crate::witness::enumerate_pairs(3).unwrap() {
                let sub = extract_sub_tomography(&record, a, b).unwrap();
                assert_eq!(sub.settings.len(), 36);
                assert_eq!(sub.dims(), (2, 2));
                // counts pass through unchanged
                for (s, c) in sub.settings.iter().zip(&sub.counts) {
                    let i =
                        record.settings.iter().position(|t| t.label_a == s.label_a && t.label_b == s.label_b).unwrap();
                    assert_eq!(record.counts[i], *c);
                }
            }
        }
    }

    #[test]
    fn extraction_from_mub_record_is_insufficient() {
        let rho = make_max_entangled(3).unwrap().to_density();
        let record = simulate_counts(&rho, &standard_settings(SettingsKind::Mub, 3).unwrap(), 100.0, 1.0, 1).unwrap();
        assert!(matches!(extract_sub_tomography(&record, pair(0, 1), pair(0, 1)), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn budgets() {
        let b = budget(8, 10.0).unwrap();
        assert_eq!((b.k, b.pconc_measurements, b.qst_measurements), (28, 1008, 14400));
        assert!((b.pconc_hours() - 2.8).abs() < 1e-12);
        assert!((b.qst_hours() - 40.0).abs() < 1e-12);
        assert!((b.reduction() - 14.2857).abs() < 1e-3);
        let b = budget(2, 10.0).unwrap();
        assert_eq!((b.pconc_measurements, b.qst_measurements), (36, 36));
        let b = budget(3, 10.0).unwrap();
        assert_eq!((b.pconc_measurements, b.qst_measurements), (108, 225));
        assert!(budget(1, 10.0).is_err());
        assert!(budget(3, 0.0).is_err());
    }

    #[test]
    fn record_json_schema() {
        let rho = make_max_entangled(2).unwrap().to_density();
        let record =
            simulate_counts(&rho, &standard_settings(SettingsKind::Qubit36, 2).unwrap(), 100.0, 2.0, 5).unwrap();
        let text = record.to_json_string();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["dimA", "dimB", "rate_hz", "integration_time_s", "seed", "settings", "counts"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["settings"][0]["a"][0], serde_json::json!([1.0, 0.0]));
        assert!(v["settings"][0]["label_a"].is_string());
        assert_eq!(TomographyRecord::from_json_str(&text).unwrap(), record);
    }

    #[test]
    fn record_rejects_mismatched_counts() {
        let settings = standard_settings(SettingsKind::Qubit36, 2).unwrap();
        assert!(TomographyRecord::new((2, 2), settings, vec![1, 2], 1.0, 1.0, None).is_err());
    }
}
