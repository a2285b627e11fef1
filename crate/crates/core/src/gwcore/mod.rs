//! Genus-0 primary Gromov-Witten invariants of Grassmannians (and P^r as
//! G(1, r+1)): dimension gate, quantum products, a localization oracle,
//! WDVV recursions, integrals over boundary strata and relation audits.

pub mod audit;
pub mod kontsevich;
pub mod localization;
pub mod quantum;
pub mod reconstruct;
pub mod strata;
pub mod table;

use serde::{Deserialize, Serialize};

use crate::schubert::{normalize, size, Grass, Partition};

/// Canonical identifier of <sigma_1, ..., sigma_n>_d.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InvariantKey {
    pub target: Grass,
    pub degree: u32,
    pub insertions: Vec<Partition>,
}

impl InvariantKey {
    pub fn new(target: Grass, degree: u32, insertions: Vec<Partition>) -> Self {
        let mut insertions: Vec<Partition> = insertions.into_iter().map(normalize).collect();
        insertions.sort();
        InvariantKey { target, degree, insertions }
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    pub fn codim(&self) -> u32 {
        self.insertions.iter().map(|p| size(p)).sum()
    }
}

/// dim M_{0,n}(G, d) = dim G + d N + n - 3.
pub fn virtual_dim(target: Grass, d: u32, n: usize) -> i64 {
    target.dim() as i64 + d as i64 * target.n as i64 + n as i64 - 3
}

pub fn expected_dim_gate(key: &InvariantKey) -> bool {
    key.codim() as i64 == virtual_dim(key.target, key.degree, key.n())
}
