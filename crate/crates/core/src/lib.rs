//! Quantifying high-dimensional entanglement through qubit subspaces.
//!
//! The P-concurrence of a bipartite `d × d` state is the product of the
//! two-qubit Wootters concurrences of its `K = d(d-1)/2` qubit subspaces. It is
//! zero unless entanglement extends across every subspace, so a nonzero value
//! doubles as a dimension witness. Alongside it the crate provides reference
//! measures (I-concurrence, entropy of entanglement), the SPDC state families,
//! simulated two-photon tomography with Poisson noise, reconstruction by linear
//! inversion and maximum likelihood, and a measurement-budget calculator.

pub mod cli;
pub mod error;
pub mod io;
pub mod measures;
pub mod qmath;
pub mod states;
pub mod tomography;
pub mod witness;

pub use error::{Error, Result};
pub use measures::{
    eof_pure, fidelity_to_ket, i_concurrence, normalize_measure, purity, uhlmann_fidelity, wootters_concurrence,
    MeasureName, MeasureValue,
};
pub use qmath::{CMatrix, CVector, Side};
pub use states::{
    density_from_ket, make_max_entangled, make_spdc_qudit, make_spdc_qutrit, validate_density, BipartiteKet,
    DensityMatrix, SpdcParams,
};
pub use witness::{
    count_subspaces, enumerate_pairs, pconcurrence_known, pconcurrence_search, project_subspace, IndexPair, SearchMode,
    SubspacePairing, WitnessReport,
};
