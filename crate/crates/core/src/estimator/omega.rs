use std::collections::HashMap;
use std::sync::RwLock;

use super::decompose::BMatrix;
use super::outcome::OutcomeSpace;
use crate::error::{Error, Result};
use crate::qcore::PauliObservable;

/// Per-outcome estimator weights `omega_m = sum_k c_k prod_i b_{k_i m_i}`
/// for one observable and one set of b-matrices.
#[derive(Debug)]
pub struct OmegaTable {
    observable: PauliObservable,
    bmatrix: BMatrix,
    space: OutcomeSpace,
    terms: Vec<(f64, Vec<usize>)>,
    cache: RwLock<HashMap<u64, f64>>,
}

impl Clone for OmegaTable {
    fn clone(&self) -> Self {
        OmegaTable {
            observable: self.observable.clone(),
            bmatrix: self.bmatrix.clone(),
            space: self.space.clone(),
            terms: self.terms.clone(),
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
        }
    }
}

impl OmegaTable {
    pub fn new(observable: PauliObservable, bmatrix: BMatrix) -> Result<Self> {
        if observable.num_qubits() != bmatrix.num_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit observable with b-matrices for {} qubits",
                observable.num_qubits(),
                bmatrix.num_qubits()
            )));
        }
        let space = OutcomeSpace::new(bmatrix.radices())?;
        let terms = observable
            .terms()
            .iter()
            .map(|(c, s)| (*c, s.0.iter().map(|p| p.index()).collect()))
            .collect();
        Ok(OmegaTable {
            observable,
            bmatrix,
            space,
            terms,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn observable(&self) -> &PauliObservable {
        &self.observable
    }

    pub fn bmatrix(&self) -> &BMatrix {
        &self.bmatrix
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    /// `omega` of an explicit word, computed without the cache.
    pub fn omega_word(&self, word: &[usize]) -> Result<f64> {
        self.space.encode(word)?;
        Ok(self.compute(word))
    }

    fn compute(&self, word: &[usize]) -> f64 {
        let tables = self.bmatrix.tables();
        self.terms
            .iter()
            .map(|(c, ks)| {
                let mut prod = *c;
                for ((t, &k), &m) in tables.iter().zip(ks).zip(word) {
                    prod *= t[(k, m)];
                }
                prod
            })
            .sum()
    }

    /// `omega` of a packed outcome index, memoised.
    pub fn omega(&self, idx: u64) -> Result<f64> {
        if idx >= self.space.size() {
            return Err(Error::invalid("outcome index", format!("{idx} >= {}", self.space.size())));
        }
        if let Some(&w) = self.cache.read().expect("cache lock").get(&idx) {
            return Ok(w);
        }
        let w = self.compute(&self.space.decode(idx));
        self.cache.write().expect("cache lock").insert(idx, w);
        Ok(w)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}
