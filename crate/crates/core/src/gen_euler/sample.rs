use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

use super::{pmf_table, quantile_in, GenEulerParams, PmfTable, DEFAULT_TABLE_TOL};

/// Seeded draws by inversion of a cached CDF table.
///
/// Single-owner state: not for concurrent use, but may move between
/// threads.
#[derive(Debug, Clone)]
pub struct SampleStream {
    params: GenEulerParams,
    seed: u64,
    table: PmfTable,
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(params: GenEulerParams, seed: u64) -> Result<Self> {
        let table = pmf_table(&params, DEFAULT_TABLE_TOL)?;
        let cumulative = table.cumulative();
        Ok(SampleStream {
            params,
            seed,
            table,
            cumulative,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn params(&self) -> &GenEulerParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self) -> &PmfTable {
        &self.table
    }

    pub fn next_draw(&mut self) -> u32 {
        let u: f64 = self.rng.gen();
        quantile_in(&self.cumulative, u)
    }

    pub fn sample(&mut self, n: usize) -> Vec<u32> {
        (0..n).map(|_| self.next_draw()).collect()
    }
}
