//! Simplified read simulator: fixed-length windows sampled from a genome
//! at a target coverage, with per-base substitution and undetermined-base
//! errors. Insertions and deletions are deliberately absent so every read
//! keeps the configured length.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seq::{Alphabet, Sequence};

/// Read simulation parameters.
#[derive(Debug, Clone)]
pub struct ReadSimConfig {
    /// Length of every simulated read.
    pub read_length: usize,
    /// Expected number of reads covering each genome position; the read
    /// count is `round(coverage * |genome| / read_length)`.
    pub coverage: f64,
    /// Per-base probability of substitution by a uniformly random
    /// different base.
    pub sub_rate: f64,
    /// Per-base probability of replacement by `N`.
    pub n_rate: f64,
}

impl Default for ReadSimConfig {
    fn default() -> Self {
        ReadSimConfig {
            read_length: 101,
            coverage: 6.0,
            sub_rate: 0.004,
            n_rate: 0.0005,
        }
    }
}

impl ReadSimConfig {
    fn validate(&self) -> Result<()> {
        if self.read_length < 3 {
            return Err(Error::invalid("read length must be at least 3"));
        }
        if self.coverage <= 0.0 {
            return Err(Error::invalid("coverage must be positive"));
        }
        if !(0.0..=1.0).contains(&self.sub_rate)
            || !(0.0..=1.0).contains(&self.n_rate)
            || self.sub_rate + self.n_rate > 1.0
        {
            return Err(Error::invalid(
                "error rates must lie in [0,1] with sub_rate + n_rate <= 1",
            ));
        }
        Ok(())
    }

    /// Number of reads simulated from a genome of the given length.
    pub fn read_count(&self, genome_len: usize) -> usize {
        (self.coverage * genome_len as f64 / self.read_length as f64).round() as usize
    }
}

/// One simulated read with its ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedRead {
    pub id: String,
    pub seq: Sequence,
    /// 0-based offset of the error-free window in the source genome.
    pub origin_offset: usize,
}

/// Simulate reads from a genome. Each read starts at a uniform random
/// offset; each base is then independently substituted (probability
/// `sub_rate`, uniform over the three other bases) or replaced by `N`
/// (probability `n_rate`). Read `i` draws from the derived seed
/// `seed + i`, so generation order and worker count cannot affect output.
///
/// `source` names the genome in the read ids, which carry the ground
/// truth as `src=<source> off=<offset> idx=<i>`.
pub fn simulate_reads(
    genome: &Sequence,
    source: &str,
    cfg: &ReadSimConfig,
    seed: u64,
) -> Result<Vec<SimulatedRead>> {
    cfg.validate()?;
    if genome.len() < cfg.read_length {
        return Err(Error::invalid(format!(
            "genome of length {} is shorter than the read length {}",
            genome.len(),
            cfg.read_length
        )));
    }
    let count = cfg.read_count(genome.len());
    let max_offset = genome.len() - cfg.read_length;
    let mut reads = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
        let offset = rng.gen_range(0..=max_offset);
        let mut codes = genome.codes()[offset..offset + cfg.read_length].to_vec();
        for c in codes.iter_mut() {
            let u: f64 = rng.gen();
            if u < cfg.sub_rate {
                // uniform over the three other bases
                let shift = rng.gen_range(1..4u8);
                *c = (*c + shift) % 4;
            } else if u < cfg.sub_rate + cfg.n_rate {
                *c = 4;
            }
        }
        reads.push(SimulatedRead {
            id: format!("src={source} off={offset} idx={i}"),
            seq: Sequence::from_codes(codes, Alphabet::dna_n())?,
            origin_offset: offset,
        });
    }
    Ok(reads)
}

/// Parse the `src=` ground-truth tag out of a simulated read id.
pub fn source_from_id(id: &str) -> Option<&str> {
    id.split_whitespace()
        .find_map(|tok| tok.strip_prefix("src="))
}
