//! JSON state files: `{"type": "ket"|"density", "dimA", "dimB", "data"}` with
//! complex entries as `[re, im]` pairs. Kets are flat, density matrices are
//! nested row arrays.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::CMatrix;
use crate::states::{validate_density, BipartiteKet, DensityMatrix};

#[derive(Clone, Debug, PartialEq)]
pub enum StateFile {
    Ket(BipartiteKet),
    Density(DensityMatrix),
}

impl StateFile {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            StateFile::Ket(k) => k.dims(),
            StateFile::Density(r) => r.dims(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StateFile::Ket(k) => k.to_density(),
            StateFile::Density(r) => r.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let (kind, data) = match self {
            StateFile::Ket(k) => ("ket", serde_json::to_value(pairs(k.amplitudes())).expect("serializable")),
            StateFile::Density(r) => (
                "density",
                serde_json::to_value(r.matrix().to_rows().iter().map(|row| pairs(row)).collect::<Vec<_>>())
                    .expect("serializable"),
            ),
        };
        let (dim_a, dim_b) = self.dims();
        serde_json::to_string_pretty(&Raw { kind: kind.to_owned(), dim_a, dim_b, data }).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: Raw = serde_json::from_str(s)?;
        match raw.kind.as_str() {
            "ket" => {
                let amps: Vec<[f64; 2]> = serde_json::from_value(raw.data)?;
                Ok(StateFile::Ket(BipartiteKet::new(raw.dim_a, raw.dim_b, complexes(&amps))?))
            }
            "density" => {
                let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(raw.data)?;
                let m = CMatrix::from_rows(&rows.iter().map(|r| complexes(r)).collect::<Vec<_>>())?;
                Ok(StateFile::Density(validate_density(&m, (raw.dim_a, raw.dim_b))?))
            }
            other => Err(Error::InvalidArgument(format!("unknown state type '{other}'"))),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Raw {
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    data: serde_json::Value,
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(ps: &[[f64; 2]]) -> Vec<Complex64> {
    ps.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_max_entangled, make_spdc_qutrit, SpdcParams};

    #[test]
    fn ket_file_layout() {
        let f = StateFile::Ket(make_max_entangled(2).unwrap());
        let v: serde_json::Value = serde_json::from_str(&f.to_json_string()).unwrap();
        assert_eq!(v["type"], "ket");
        assert_eq!(v["dimA"], 2);
        assert_eq!(v["dimB"], 2);
        assert_eq!(v["data"].as_array().unwrap().len(), 4);
        assert_eq!(v["data"][1], serde_json::json!([0.0, 0.0]));
        assert_eq!(StateFile::from_json_str(&f.to_json_string()).unwrap(), f);
    }

    #[test]
    fn density_file_layout() {
        let rho = make_spdc_qutrit(SpdcParams::new(0.5, 0.5).unwrap()).to_density();
        let f = StateFile::Density(rho.clone());
        let v: serde_json::Value = serde_json::from_str(&f.to_json_string()).unwrap();
        assert_eq!(v["type"], "density");
        assert_eq!(v["data"].as_array().unwrap().len(), 9);
        assert_eq!(v["data"][0].as_array().unwrap().len(), 9);
        let back = StateFile::from_json_str(&f.to_json_string()).unwrap().to_density();
        assert!((back.matrix() - rho.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_files() {
        let bad_norm = r#"{"type":"ket","dimA":1,"dimB":2,"data":[[1,0],[1,0]]}"#;
        assert!(matches!(StateFile::from_json_str(bad_norm), Err(Error::NotNormalized { .. })));
        let bad_type = r#"{"type":"wave","dimA":1,"dimB":1,"data":[[1,0]]}"#;
        assert!(StateFile::from_json_str(bad_type).is_err());
        let bad_trace = r#"{"type":"density","dimA":1,"dimB":2,"data":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
        assert!(matches!(StateFile::from_json_str(bad_trace), Err(Error::Trace { .. })));
        assert!(StateFile::from_json_str("{").is_err());
    }
}
