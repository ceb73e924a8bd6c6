//! Witness evaluation straight from a qudit tomography record: extract each
//! qubit sub-tomography, reconstruct it, and feed the subspace concurrences to
//! the P-concurrence search.

use rayon::prelude::*;

use super::{extract_sub_tomography, reconstruct_mle, MleOptions, TomographyRecord};
use crate::error::{Error, Result};
use crate::measures::{fidelity_to_ket, wootters_concurrence};
use crate::states::make_max_entangled;
use crate::witness::{enumerate_pairs, report_from_table, IndexPair, SearchMode, SubspaceRow, WitnessReport};

/// Fraction of the exposure landing in `a ⊗ b`, estimated from the
/// computational-basis settings of an extracted record.
fn subspace_weight(sub: &TomographyRecord) -> f64 {
    let is_basis = |v: &crate::qmath::CVector| v.as_slice().iter().any(|z| (z.norm_sqr() - 1.0).abs() < 1e-12);
    let e = sub.exposure();
    sub.settings
        .iter()
        .zip(&sub.counts)
        .filter(|(s, _)| is_basis(s.arm_a()) && is_basis(s.arm_b()))
        .map(|(_, &c)| c as f64 / e)
        .sum::<f64>()
        .min(1.0)
}

/// Reconstructs the two-qubit state of `a ⊗ b` from its sub-tomography.
pub fn subspace_row_from_record(
    record: &TomographyRecord,
    a: IndexPair,
    b: IndexPair,
    opts: MleOptions,
) -> Result<SubspaceRow> {
    let sub = extract_sub_tomography(record, a, b)?;
    let weight = subspace_weight(&sub);
    if sub.counts.iter().all(|&c| c == 0) {
        return Ok(SubspaceRow { a, b, concurrence: 0.0, fidelity: 0.0, weight });
    }
    let rho = reconstruct_mle(&sub, opts)?.state;
    Ok(SubspaceRow {
        a,
        b,
        concurrence: wootters_concurrence(&rho)?,
        fidelity: fidelity_to_ket(&rho, &make_max_entangled(2)?)?,
        weight,
    })
}

/// P-concurrence of the state behind a record. `Known` reconstructs only the
/// `K` matched subspaces; the search modes reconstruct all `K²` combinations.
pub fn witness_from_record(record: &TomographyRecord, mode: SearchMode, opts: MleOptions) -> Result<WitnessReport> {
    record.validate()?;
    if record.dim_a != record.dim_b {
        return Err(Error::Dimension("P-concurrence needs equal side dimensions".into()));
    }
    let pairs = enumerate_pairs(record.dim_a)?;
    let k = pairs.len();
    if mode == SearchMode::Known {
        let rows =
            pairs.par_iter().map(|&p| subspace_row_from_record(record, p, p, opts)).collect::<Result<Vec<_>>>()?;
        return Ok(WitnessReport::from_rows(rows, SearchMode::Known));
    }
    let flat = (0..k * k)
        .into_par_iter()
        .map(|n| subspace_row_from_record(record, pairs[n / k], pairs[n % k], opts))
        .collect::<Result<Vec<_>>>()?;
    let table: Vec<Vec<SubspaceRow>> = flat.chunks(k).map(<[_]>::to_vec).collect();
    report_from_table(&table, mode)
}
