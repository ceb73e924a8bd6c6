//! P-concurrence: the product of two-qubit concurrences over the `K = d(d-1)/2`
//! qubit subspaces of a bipartite qudit state, under a given pairing of side-A
//! and side-B index pairs or maximized over all `K!` pairings.

pub mod assignment;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{fidelity_to_ket, wootters_concurrence};
use crate::qmath::CMatrix;
use crate::states::{make_max_entangled, DensityMatrix};

/// Subspaces with less weight than this have no support.
pub const WEIGHT_FLOOR: f64 = 1e-12;
/// `auto` search enumerates all pairings up to this many subspaces.
pub const BRUTE_FORCE_MAX_K: usize = 8;
/// Hard limit for explicitly requested enumeration (10! pairings).
pub const BRUTE_FORCE_LIMIT_K: usize = 10;

/// Fidelity column target recorded in every report.
pub const FIDELITY_TARGET: &str = "subspace Bell state (|00>+|11>)/sqrt2, lo->0 hi->1";

/// Two distinct basis indices `lo < hi` on one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct IndexPair {
    lo: usize,
    hi: usize,
}

impl IndexPair {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidArgument(format!("index pair needs lo < hi, got ({lo},{hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn indices(&self) -> [usize; 2] {
        [self.lo, self.hi]
    }

    fn check(&self, d: usize) -> Result<()> {
        if self.hi >= d {
            return Err(Error::Dimension(format!("index pair ({},{}) outside dimension {d}", self.lo, self.hi)));
        }
        Ok(())
    }
}

impl TryFrom<[usize; 2]> for IndexPair {
    type Error = Error;
    fn try_from([lo, hi]: [usize; 2]) -> Result<Self> {
        Self::new(lo, hi)
    }
}

impl From<IndexPair> for [usize; 2] {
    fn from(p: IndexPair) -> Self {
        p.indices()
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

/// `d(d-1)/2`.
pub fn count_subspaces(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("subspace count needs d >= 2, got {d}")));
    }
    Ok(d * (d - 1) / 2)
}

/// All index pairs of a `d`-level side in lexicographic order.
pub fn enumerate_pairs(d: usize) -> Result<Vec<IndexPair>> {
    count_subspaces(d)?;
    Ok((0..d).flat_map(|lo| (lo + 1..d).map(move |hi| IndexPair { lo, hi })).collect())
}

/// A bijection between the side-A index pairs and the side-B index pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspacePairing {
    pairs: Vec<(IndexPair, IndexPair)>,
}

impl SubspacePairing {
    pub fn new(pairs: Vec<(IndexPair, IndexPair)>) -> Self {
        Self { pairs }
    }

    /// Matches each A-pair to the B-pair with the same indices.
    pub fn identity(d: usize) -> Result<Self> {
        Ok(Self { pairs: enumerate_pairs(d)?.into_iter().map(|p| (p, p)).collect() })
    }

    /// Matches the i-th A-pair to the `sigma[i]`-th B-pair (lexicographic order).
    pub fn from_permutation(d: usize, sigma: &[usize]) -> Result<Self> {
        let all = enumerate_pairs(d)?;
        if sigma.len() != all.len() || sigma.iter().any(|&j| j >= all.len()) {
            return Err(Error::InvalidPairing(format!("permutation of length {} for K = {}", sigma.len(), all.len())));
        }
        let p = Self { pairs: all.iter().zip(sigma).map(|(&a, &j)| (a, all[j])).collect() };
        p.validate(d)?;
        Ok(p)
    }

    pub fn pairs(&self) -> &[(IndexPair, IndexPair)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks that both sides list each of the `K` index pairs exactly once.
    pub fn validate(&self, d: usize) -> Result<()> {
        let k = count_subspaces(d)?;
        if self.pairs.len() != k {
            return Err(Error::InvalidPairing(format!("{} entries, expected K = {k}", self.pairs.len())));
        }
        let all = enumerate_pairs(d)?;
        for (side, mut list) in [
            ("A", self.pairs.iter().map(|p| p.0).collect::<Vec<_>>()),
            ("B", self.pairs.iter().map(|p| p.1).collect::<Vec<_>>()),
        ] {
            list.sort_unstable();
            if list != all {
                return Err(Error::InvalidPairing(format!(
                    "side {side} pairs are not a bijection onto the {k} subspaces"
                )));
            }
        }
        Ok(())
    }

    /// Flat `[aLo, aHi, bLo, bHi]` rows.
    pub fn to_rows(&self) -> Vec<[usize; 4]> {
        self.pairs.iter().map(|(a, b)| [a.lo, a.hi, b.lo, b.hi]).collect()
    }

    pub fn from_rows(rows: &[[usize; 4]]) -> Result<Self> {
        rows.iter()
            .map(|r| Ok((IndexPair::new(r[0], r[1])?, IndexPair::new(r[2], r[3])?)))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Known,
    BruteForce,
    Assignment,
    /// Brute force for `K <= 8`, assignment otherwise.
    Auto,
}

impl SearchMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMode::Known => "known",
            SearchMode::BruteForce => "brute_force",
            SearchMode::Assignment => "assignment",
            SearchMode::Auto => "auto",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "known" => Ok(SearchMode::Known),
            "brute_force" | "brute" => Ok(SearchMode::BruteForce),
            "assignment" | "hungarian" => Ok(SearchMode::Assignment),
            "auto" | "search" => Ok(SearchMode::Auto),
            other => Err(Error::InvalidArgument(format!("unknown search mode '{other}'"))),
        }
    }
}

/// One row of a witness report: a matched subspace and its values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceRow {
    pub a: IndexPair,
    pub b: IndexPair,
    pub concurrence: f64,
    pub fidelity: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub subspace_rows: Vec<SubspaceRow>,
    pub pconcurrence: f64,
    pub pairing_used: SubspacePairing,
    pub search_mode: SearchMode,
}

impl WitnessReport {
    pub fn from_rows(subspace_rows: Vec<SubspaceRow>, search_mode: SearchMode) -> Self {
        let pconcurrence = pconcurrence_from_concurrences(subspace_rows.iter().map(|r| r.concurrence));
        let pairing_used = SubspacePairing::new(subspace_rows.iter().map(|r| (r.a, r.b)).collect());
        Self { subspace_rows, pconcurrence, pairing_used, search_mode }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson::from(self)).expect("report serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&ReportJson::from(self)).expect("report serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ReportJson = serde_json::from_str(s)?;
        let search_mode = j.search_mode.parse()?;
        let pairing_used = SubspacePairing::from_rows(&j.pairing)?;
        Ok(Self { subspace_rows: j.subspaces, pconcurrence: j.pconcurrence, pairing_used, search_mode })
    }

    /// Fixed-width table: one row per subspace then the P-concurrence footer.
    pub fn to_table(&self, labels_a: Option<&[i32]>, labels_b: Option<&[i32]>) -> String {
        let label = |p: &IndexPair, labels: Option<&[i32]>| match labels {
            Some(l) => format!("{{{},{}}}", l[p.lo], l[p.hi]),
            None => p.to_string(),
        };
        let mut out = String::new();
        out.push_str(&format!("{:<28} {:>11} {:>9} {:>9}\n", "Subspace", "Concurrence", "Fidelity", "Weight"));
        for r in &self.subspace_rows {
            let name = format!("{}_A x {}_B", label(&r.a, labels_a), label(&r.b, labels_b));
            out.push_str(&format!("{:<28} {:>11.3} {:>9.3} {:>9.3}\n", name, r.concurrence, r.fidelity, r.weight));
        }
        out.push_str(&format!("{:<28} {:>11.3}   ({})\n", "P-concurrence", self.pconcurrence, self.search_mode));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    pconcurrence: f64,
    search_mode: String,
    pairing: Vec<[usize; 4]>,
    subspaces: Vec<SubspaceRow>,
    #[serde(default)]
    fidelity_target: String,
}

impl From<&WitnessReport> for ReportJson {
    fn from(r: &WitnessReport) -> Self {
        Self {
            pconcurrence: r.pconcurrence,
            search_mode: r.search_mode.as_str().to_owned(),
            pairing: r.pairing_used.to_rows(),
            subspaces: r.subspace_rows.clone(),
            fidelity_target: FIDELITY_TARGET.to_owned(),
        }
    }
}

/// Product of subspace concurrences.
pub fn pconcurrence_from_concurrences(concurrences: impl IntoIterator<Item = f64>) -> f64 {
    concurrences.into_iter().product()
}

/// Restricts `ρ` to `span{a.lo, a.hi} ⊗ span{b.lo, b.hi}` and renormalizes.
/// Returns the two-qubit state (lo→0, hi→1 on each side) and the weight
/// `Tr(B ρ B†)` of the subspace.
pub fn project_subspace(rho: &DensityMatrix, a: IndexPair, b: IndexPair) -> Result<(DensityMatrix, f64)> {
    a.check(rho.dim_a())?;
    b.check(rho.dim_b())?;
    let db = rho.dim_b();
    let idx = |q: usize| a.indices()[q / 2] * db + b.indices()[q % 2];
    let m = rho.matrix();
    let raw = CMatrix::from_fn(4, 4, |i, j| m[(idx(i), idx(j))]);
    let weight = raw.trace().re;
    if weight.is_nan() || weight < WEIGHT_FLOOR {
        return Err(Error::NoSupport { weight, threshold: WEIGHT_FLOOR });
    }
    let sub = raw.scale_re(1.0 / weight).symmetrized();
    Ok((DensityMatrix::from_trusted(2, 2, sub), weight.min(1.0)))
}

/// Concurrence, Bell fidelity and weight of one matched subspace. Subspaces
/// without support contribute zero concurrence.
pub fn evaluate_subspace(rho: &DensityMatrix, a: IndexPair, b: IndexPair) -> Result<SubspaceRow> {
    match project_subspace(rho, a, b) {
        Ok((sub, weight)) => {
            let bell = make_max_entangled(2)?;
            Ok(SubspaceRow {
                a,
                b,
                concurrence: wootters_concurrence(&sub)?,
                fidelity: fidelity_to_ket(&sub, &bell)?,
                weight,
            })
        }
        Err(Error::NoSupport { weight, .. }) => {
            Ok(SubspaceRow { a, b, concurrence: 0.0, fidelity: 0.0, weight: weight.max(0.0) })
        }
        Err(e) => Err(e),
    }
}

fn square_dim(rho: &DensityMatrix) -> Result<usize> {
    if rho.dim_a() != rho.dim_b() || rho.dim_a() < 2 {
        return Err(Error::Dimension(format!(
            "P-concurrence needs equal side dimensions >= 2, got ({},{})",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    Ok(rho.dim_a())
}

/// P-concurrence under a fixed pairing.
pub fn pconcurrence_known(rho: &DensityMatrix, pairing: &SubspacePairing) -> Result<WitnessReport> {
    let d = square_dim(rho)?;
    pairing.validate(d)?;
    let rows = pairing.pairs().par_iter().map(|&(a, b)| evaluate_subspace(rho, a, b)).collect::<Result<Vec<_>>>()?;
    Ok(WitnessReport::from_rows(rows, SearchMode::Known))
}

/// Concurrences of every (A-pair, B-pair) combination, indexed by the
/// lexicographic pair order on each side.
pub fn subspace_matrix(rho: &DensityMatrix) -> Result<Vec<Vec<SubspaceRow>>> {
    let d = square_dim(rho)?;
    let pairs = enumerate_pairs(d)?;
    let k = pairs.len();
    let flat = (0..k * k)
        .into_par_iter()
        .map(|n| evaluate_subspace(rho, pairs[n / k], pairs[n % k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(flat.chunks(k).map(<[_]>::to_vec).collect())
}

/// P-concurrence maximized over all pairings.
pub fn pconcurrence_search(rho: &DensityMatrix, mode: SearchMode) -> Result<WitnessReport> {
    let d = square_dim(rho)?;
    let k = count_subspaces(d)?;
    let mode = match mode {
        SearchMode::Known => return pconcurrence_known(rho, &SubspacePairing::identity(d)?),
        SearchMode::Auto if k <= BRUTE_FORCE_MAX_K => SearchMode::BruteForce,
        SearchMode::Auto => SearchMode::Assignment,
        m => m,
    };
    if mode == SearchMode::BruteForce && k > BRUTE_FORCE_LIMIT_K {
        return Err(Error::InvalidArgument(format!(
            "brute-force search over {k}! pairings is not supported; use assignment"
        )));
    }
    report_from_table(&subspace_matrix(rho)?, mode)
}

/// Picks the best pairing from a full `K × K` table of subspace rows (as
/// produced by [`subspace_matrix`]) with the given search strategy.
pub fn report_from_table(table: &[Vec<SubspaceRow>], mode: SearchMode) -> Result<WitnessReport> {
    let k = table.len();
    if table.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension("subspace table must be square".into()));
    }
    let mode = match mode {
        SearchMode::Known => {
            let rows = (0..k).map(|i| table[i][i]).collect();
            return Ok(WitnessReport::from_rows(rows, SearchMode::Known));
        }
        SearchMode::Auto if k <= BRUTE_FORCE_MAX_K => SearchMode::BruteForce,
        SearchMode::Auto => SearchMode::Assignment,
        m => m,
    };
    if mode == SearchMode::BruteForce && k > BRUTE_FORCE_LIMIT_K {
        return Err(Error::InvalidArgument(format!(
            "brute-force search over {k}! pairings is not supported; use assignment"
        )));
    }
    let conc: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|c| c.concurrence).collect()).collect();
    let sigma = match mode {
        SearchMode::BruteForce => best_by_enumeration(&conc),
        _ => best_by_assignment(&conc),
    };
    let rows = sigma.iter().enumerate().map(|(i, &j)| table[i][j]).collect();
    Ok(WitnessReport::from_rows(rows, mode))
}

/// Maximizes `Π M[i][σ(i)]` by enumerating all permutations.
pub fn best_by_enumeration(m: &[Vec<f64>]) -> Vec<usize> {
    let k = m.len();
    let mut best = (-1.0, (0..k).collect::<Vec<_>>());
    assignment::for_each_permutation(k, |p| {
        let v: f64 = p.iter().enumerate().map(|(i, &j)| m[i][j]).product();
        if v > best.0 {
            best = (v, p.to_vec());
        }
    });
    best.1
}

/// Maximizes `Π M[i][σ(i)]` as a min-cost assignment on `-ln M`, with zero
/// entries as forbidden edges. If every bijection hits a zero the returned
/// permutation has product zero.
pub fn best_by_assignment(m: &[Vec<f64>]) -> Vec<usize> {
    let k = m.len();
    let finite: Vec<Vec<Option<f64>>> =
        m.iter().map(|row| row.iter().map(|&c| if c > 0.0 { Some(-c.ln()) } else { None }).collect()).collect();
    let max_finite = finite.iter().flatten().flatten().fold(0.0_f64, |a, &b| a.max(b));
    // Exceeds the cost of any zero-free bijection.
    let forbidden = (k as f64 + 1.0) * (max_finite + 1.0);
    let costs: Vec<Vec<f64>> = finite.iter().map(|row| row.iter().map(|c| c.unwrap_or(forbidden)).collect()).collect();
    assignment::solve_min(&costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_spdc_qutrit, SpdcParams};

    fn closed_forms(a: f64, b: f64) -> [f64; 3] {
        [2.0 * a / (1.0 + a * a), 2.0 * a * b / (a * a + b * b), 2.0 * b / (1.0 + b * b)]
    }

    fn qutrit(a: f64, b: f64) -> DensityMatrix {
        make_spdc_qutrit(SpdcParams::new(a, b).unwrap()).to_density()
    }

    fn pair(lo: usize, hi: usize) -> IndexPair {
        IndexPair::new(lo, hi).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(count_subspaces(2).unwrap(), 1);
        assert_eq!(count_subspaces(3).unwrap(), 3);
        assert_eq!(count_subspaces(4).unwrap(), 6);
        assert_eq!(count_subspaces(8).unwrap(), 28);
        assert!(count_subspaces(1).is_err());
        assert_eq!(enumerate_pairs(3).unwrap(), vec![pair(0, 1), pair(0, 2), pair(1, 2)]);
        for d in 2..9 {
            assert_eq!(enumerate_pairs(d).unwrap().len(), count_subspaces(d).unwrap());
        }
    }

    #[test]
    fn index_pair_rejects_unordered() {
        assert!(IndexPair::new(1, 1).is_err());
        assert!(IndexPair::new(2, 1).is_err());
    }

    #[test]
    fn projection_of_two_term_subspace() {
        // a = {ℓ=+1, ℓ=0}, b = {ℓ=-1, ℓ=0}: N1(|0,0⟩ + 0.5|1,-1⟩).
        let (sub, w) = project_subspace(&qutrit(0.5, 0.7), pair(0, 1), pair(0, 1)).unwrap();
        let c = wootters_concurrence(&sub).unwrap();
        assert!((c - 0.8).abs() < 1e-12);
        let n2 = 1.0 / (1.0 + 0.25 + 0.49);
        assert!((w - n2 * 1.25).abs() < 1e-12);
        assert!((crate::measures::purity(&sub) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_of_max_entangled_qutrit() {
        let rho = make_max_entangled(3).unwrap().to_density();
        for p in enumerate_pairs(3).unwrap() {
            let (sub, w) = project_subspace(&rho, p, p).unwrap();
            assert!((w - 2.0 / 3.0).abs() < 1e-12);
            let bell = make_max_entangled(2).unwrap().to_density();
            assert!((&sub.matrix().clone() - bell.matrix()).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn projection_of_product_state() {
        let rho = qutrit(0.0, 0.0);
        let (sub, w) = project_subspace(&rho, pair(0, 1), pair(0, 1)).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert_eq!(wootters_concurrence(&sub).unwrap(), 0.0);
        assert!(matches!(project_subspace(&rho, pair(0, 2), pair(0, 2)), Err(Error::NoSupport { .. })));
        let row = evaluate_subspace(&rho, pair(0, 2), pair(0, 2)).unwrap();
        assert_eq!(row.concurrence, 0.0);
    }

    #[test]
    fn known_pairing_values() {
        let r =
            pconcurrence_known(&make_max_entangled(3).unwrap().to_density(), &SubspacePairing::identity(3).unwrap())
                .unwrap();
        assert!((r.pconcurrence - 1.0).abs() < 1e-9);
        assert!(r.subspace_rows.iter().all(|row| (row.fidelity - 1.0).abs() < 1e-9));

        let r = pconcurrence_known(&qutrit(0.5, 0.5), &SubspacePairing::identity(3).unwrap()).unwrap();
        let cf = closed_forms(0.5, 0.5);
        for (row, c) in r.subspace_rows.iter().zip(cf) {
            assert!((row.concurrence - c).abs() < 1e-9);
        }
        assert!((r.pconcurrence - 0.64).abs() < 1e-9);

        let r = pconcurrence_known(&qutrit(1.0, 0.0), &SubspacePairing::identity(3).unwrap()).unwrap();
        assert!(r.pconcurrence <= 1e-12);
    }

    #[test]
    fn table_product_consistency() {
        let p = pconcurrence_from_concurrences([0.92, 0.93, 0.93]);
        assert!((p - 0.795708).abs() < 1e-6);
        assert!((p - 0.80).abs() <= 0.01);
    }

    #[test]
    fn pairing_validation() {
        assert!(SubspacePairing::identity(3).unwrap().validate(3).is_ok());
        let dup =
            SubspacePairing::new(vec![(pair(0, 1), pair(0, 1)), (pair(0, 2), pair(0, 1)), (pair(1, 2), pair(1, 2))]);
        assert!(matches!(dup.validate(3), Err(Error::InvalidPairing(_))));
        let short = SubspacePairing::new(vec![(pair(0, 1), pair(0, 1))]);
        assert!(short.validate(3).is_err());
        assert!(SubspacePairing::from_permutation(3, &[0, 0, 1]).is_err());
        let rho = qutrit(0.5, 0.5);
        assert!(pconcurrence_known(&rho, &dup).is_err());
    }

    #[test]
    fn search_finds_identity_for_spdc_states() {
        for &(a, b) in &[(0.5, 0.5), (0.3, 0.9), (1.0, 0.2), (0.8, 0.8)] {
            let rho = qutrit(a, b);
            let known = pconcurrence_known(&rho, &SubspacePairing::identity(3).unwrap()).unwrap();
            for mode in [SearchMode::BruteForce, SearchMode::Assignment, SearchMode::Auto] {
                let s = pconcurrence_search(&rho, mode).unwrap();
                assert!((s.pconcurrence - known.pconcurrence).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn search_recovers_permuted_labels() {
        let perm =
            CMatrix::from_fn(3, 3, |i, j| if [2, 0, 1][i] == j { crate::qmath::ONE } else { crate::qmath::ZERO });
        let rho = make_max_entangled(3).unwrap().to_density().apply_local(&CMatrix::identity(3), &perm).unwrap();
        let known = pconcurrence_known(&rho, &SubspacePairing::identity(3).unwrap()).unwrap();
        let found = pconcurrence_search(&rho, SearchMode::Auto).unwrap();
        assert!((found.pconcurrence - 1.0).abs() < 1e-9);
        assert!(known.pconcurrence < found.pconcurrence - 0.5);
    }

    #[test]
    fn search_on_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(3, 3).unwrap();
        for mode in [SearchMode::BruteForce, SearchMode::Assignment] {
            assert_eq!(pconcurrence_search(&rho, mode).unwrap().pconcurrence, 0.0);
        }
    }

    #[test]
    fn max_entangled_qudits_have_unit_subspace_concurrences() {
        for d in 2..=5 {
            let rho = make_max_entangled(d).unwrap().to_density();
            let r = pconcurrence_known(&rho, &SubspacePairing::identity(d).unwrap()).unwrap();
            assert!(r.subspace_rows.iter().all(|row| (row.concurrence - 1.0).abs() < 1e-9));
            assert!((r.pconcurrence - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn assignment_handles_forbidden_edges() {
        let m = vec![vec![0.0, 0.5, 0.0], vec![0.9, 0.0, 0.0], vec![0.0, 0.0, 0.2]];
        assert_eq!(best_by_assignment(&m), vec![1, 0, 2]);
        let all_zero_col = vec![vec![0.0, 0.5], vec![0.0, 0.7]];
        let s = best_by_assignment(&all_zero_col);
        let v: f64 = s.iter().enumerate().map(|(i, &j)| all_zero_col[i][j]).product();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn brute_force_limit() {
        let rho = make_max_entangled(6).unwrap().to_density();
        assert!(pconcurrence_search(&rho, SearchMode::BruteForce).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let r = pconcurrence_search(&qutrit(0.4, 0.6), SearchMode::Auto).unwrap();
        let v = r.to_json_value();
        assert!(v["pconcurrence"].is_f64());
        assert_eq!(v["search_mode"], "brute_force");
        assert_eq!(v["pairing"].as_array().unwrap().len(), 3);
        assert_eq!(v["subspaces"][0]["a"], serde_json::json!([0, 1]));
        for key in ["concurrence", "fidelity", "weight"] {
            assert!(v["subspaces"][0][key].is_f64());
        }
        let back = WitnessReport::from_json_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn table_layout() {
        let r = pconcurrence_known(&qutrit(0.5, 0.5), &SubspacePairing::identity(3).unwrap()).unwrap();
        let t = r.to_table(Some(&[1, 0, -1]), Some(&[-1, 0, 1]));
        assert!(t.contains("{1,0}_A x {-1,0}_B"));
        assert!(t.lines().last().unwrap().contains("0.640"));
        assert_eq!(t.lines().count(), 5);
    }
}
