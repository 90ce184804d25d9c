//! JSON serialization of a coefficient family.
//!
//! Complex numbers are written as `[re, im]`. Floats use the shortest
//! representation that parses back to the same bits, so writing and reading
//! a family is exact.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{LevelRecord, ThetaFamily};
use crate::el_module::{Corner, ElModule};
use crate::hochschild::Cochain;
use crate::linalg::{c64, CMat};

pub const FORMAT: &str = "qrw-coefficients/1";

#[derive(Debug, Error)]
pub enum CoeffFileError {
    #[error("malformed coefficient file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format {0:?}")]
    Format(String),
    #[error("coefficient file does not match this setup: {0}")]
    Mismatch(String),
}

type Pair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub n: usize,
    pub theta: BTreeMap<Corner, Vec<Pair>>,
    pub cocycle_residual: BTreeMap<Corner, f64>,
    pub solve_residual: BTreeMap<Corner, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub format: String,
    /// Hex SHA-256 of the algebra basis.
    pub algebra_hash: String,
    pub ambient_dim: usize,
    pub algebra_dim: usize,
    pub multiplicity: usize,
    pub corner_dims: BTreeMap<Corner, usize>,
    /// Orthonormal basis of `M`, each a row-major `d·N_k × d` matrix.
    pub gns_basis: Vec<Vec<Vec<Pair>>>,
    pub order: usize,
    pub levels: Vec<LevelEntry>,
}

fn pair(z: c64) -> Pair {
    [z.re, z.im]
}

fn matrix(a: &CMat) -> Vec<Vec<Pair>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| pair(a[(i, j)])).collect())
        .collect()
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl CoefficientFile {
    pub fn new(el: &ElModule, fam: &ThetaFamily) -> Self {
        let gns = el.gns();
        let alg = gns.algebra();
        let levels = (0..=fam.order)
            .map(|n| {
                let record = fam.records.iter().find(|r| r.n == n);
                let pick = |vals: Option<&[Option<f64>; 4]>| {
                    Corner::ALL
                        .iter()
                        .filter_map(|c| vals.and_then(|v| v[c.index()]).map(|x| (*c, x)))
                        .collect()
                };
                LevelEntry {
                    n,
                    theta: Corner::ALL
                        .iter()
                        .map(|c| (*c, fam.get(*c, n).data.iter().copied().map(pair).collect()))
                        .collect(),
                    cocycle_residual: pick(record.map(|r| &r.cocycle_residual)),
                    solve_residual: pick(record.map(|r| &r.solve_residual)),
                }
            })
            .collect();
        CoefficientFile {
            format: FORMAT.to_string(),
            algebra_hash: hex(&alg.fingerprint()),
            ambient_dim: alg.ambient_dim(),
            algebra_dim: alg.dim(),
            multiplicity: gns.multiplicity(),
            corner_dims: Corner::ALL.iter().map(|c| (*c, el.corner(*c).dim())).collect(),
            gns_basis: gns.basis().iter().map(matrix).collect(),
            order: fam.order,
            levels,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, CoeffFileError> {
        let f: CoefficientFile = serde_json::from_str(s)?;
        if f.format != FORMAT {
            return Err(CoeffFileError::Format(f.format));
        }
        Ok(f)
    }

    /// Rebuilds the family; checks that the file was produced for `el`.
    pub fn to_family(&self, el: &ElModule) -> Result<ThetaFamily, CoeffFileError> {
        let alg = el.gns().algebra();
        if self.algebra_hash != hex(&alg.fingerprint()) {
            return Err(CoeffFileError::Mismatch("algebra hash differs".into()));
        }
        let m = alg.dim();
        let mut theta: [Vec<Cochain>; 4] = Default::default();
        let mut records = Vec::new();
        for (expected_n, level) in self.levels.iter().enumerate() {
            if level.n != expected_n {
                return Err(CoeffFileError::Mismatch(format!("level {} out of order", level.n)));
            }
            for c in Corner::ALL {
                let p = el.corner(c).dim();
                let data: Vec<c64> = level
                    .theta
                    .get(&c)
                    .ok_or_else(|| CoeffFileError::Mismatch(format!("level {expected_n} lacks corner {c}")))?
                    .iter()
                    .map(|[re, im]| c64::new(*re, *im))
                    .collect();
                let cochain = Cochain::from_data(1, m, p, data)
                    .map_err(|e| CoeffFileError::Mismatch(e.to_string()))?;
                theta[c.index()].push(cochain);
            }
            if level.n >= 1 {
                let unpick = |map: &BTreeMap<Corner, f64>| Corner::ALL.map(|c| map.get(&c).copied());
                records.push(LevelRecord {
                    n: level.n,
                    cocycle_residual: unpick(&level.cocycle_residual),
                    solve_residual: unpick(&level.solve_residual),
                });
            }
        }
        if self.levels.len() != self.order + 1 {
            return Err(CoeffFileError::Mismatch("level count differs from order".into()));
        }
        Ok(ThetaFamily {
            order: self.order,
            theta,
            records,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::CoefficientEngine;
    use crate::gns::GnsData;
    use crate::models;

    #[test]
    fn round_trip_is_exact() {
        let (alg, gen) = models::amplitude_damping();
        let el = ElModule::build(&GnsData::build(&alg, &gen).unwrap()).unwrap();
        let eng = CoefficientEngine::new(el);
        let fam = eng.build(3).unwrap();
        let file = CoefficientFile::new(eng.el(), &fam);
        let text = file.to_json();
        let back = CoefficientFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_family(eng.el()).unwrap(), fam);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn wrong_algebra_is_rejected() {
        let (alg, gen) = models::amplitude_damping();
        let el = ElModule::build(&GnsData::build(&alg, &gen).unwrap()).unwrap();
        let fam = CoefficientEngine::new(el.clone()).build(1).unwrap();
        let mut file = CoefficientFile::new(&el, &fam);
        file.algebra_hash = "00".into();
        assert!(matches!(file.to_family(&el), Err(CoeffFileError::Mismatch(_))));
    }
}
