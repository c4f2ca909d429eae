//! Triplet (second-order Markov) models of DNA sequences.
//!
//! A triplet distribution assigns probability to each of the 64 three-base
//! windows of a sequence over `{A,C,G,T}`. It carries the same information
//! as the pair distribution together with the 16x4 transition matrix of a
//! base conditional on its two predecessors; both are derived from the
//! triplet distribution here so the three representations stay consistent.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{Alphabet, Sequence};

pub const NUM_BASES: usize = 4;
pub const NUM_PAIRS: usize = 16;
pub const NUM_TRIPLETS: usize = 64;

/// Lexicographic index of a triplet of base codes (`AAA` = 0, `TTT` = 63).
#[inline]
pub fn triplet_index(b1: u8, b2: u8, b3: u8) -> usize {
    (b1 as usize) * 16 + (b2 as usize) * 4 + b3 as usize
}

/// Lexicographic index of a pair of base codes (`AA` = 0, `TT` = 15).
#[inline]
pub fn pair_index(b1: u8, b2: u8) -> usize {
    (b1 as usize) * 4 + b2 as usize
}

/// Triplet name for an index, e.g. 0 -> "AAA".
pub fn triplet_name(idx: usize) -> String {
    let b = [(idx / 16) as u8, ((idx / 4) % 4) as u8, (idx % 4) as u8];
    b.iter().map(|&c| crate::seq::BASE_CHARS[c as usize]).collect()
}

/// Distribution over the 64 triplets, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletDistribution {
    probs: [f64; NUM_TRIPLETS],
}

/// Distribution over the 16 pairs, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistribution {
    probs: [f64; NUM_PAIRS],
}

/// 16x4 matrix of `P(b3 | b1 b2)`. Rows whose pair has zero mass are
/// undefined: they are stored as all-zero and flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: [[f64; NUM_BASES]; NUM_PAIRS],
    defined: [bool; NUM_PAIRS],
}

impl TripletDistribution {
    /// Strictly normalized probabilities (sum within 1e-9 of 1).
    pub fn from_probs(probs: [f64; NUM_TRIPLETS]) -> Result<Self> {
        if let Some(&bad) = probs.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Model(format!("invalid triplet probability {bad}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(TripletDistribution { probs })
    }

    /// Probabilities from a printed table: nonnegative entries whose sum is
    /// within 1e-4 of 1 are renormalized; anything further off is rejected.
    pub fn from_table(probs: [f64; NUM_TRIPLETS]) -> Result<Self> {
        if let Some(&bad) = probs.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Model(format!("invalid triplet probability {bad}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-4 {
            return Err(Error::NotNormalized { sum });
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Ok(TripletDistribution { probs })
    }

    pub fn uniform() -> Self {
        TripletDistribution {
            probs: [1.0 / NUM_TRIPLETS as f64; NUM_TRIPLETS],
        }
    }

    /// Estimate from a sequence: the empirical distribution of its triplet
    /// windows, optionally smoothed with a pseudocount added to every cell.
    /// Windows containing `N` are skipped. Errors when no valid window exists.
    pub fn estimate(g: &Sequence, pseudocount: f64) -> Result<Self> {
        if pseudocount < 0.0 {
            return Err(Error::invalid("pseudocount must be nonnegative"));
        }
        let codes = g.codes();
        let mut counts = [0u64; NUM_TRIPLETS];
        let mut valid = 0u64;
        for w in codes.windows(3) {
            if w[0] < 4 && w[1] < 4 && w[2] < 4 {
                counts[triplet_index(w[0], w[1], w[2])] += 1;
                valid += 1;
            }
        }
        if valid == 0 {
            return Err(Error::NoValidWindow);
        }
        let denom = valid as f64 + NUM_TRIPLETS as f64 * pseudocount;
        let mut probs = [0.0; NUM_TRIPLETS];
        for (p, &c) in probs.iter_mut().zip(&counts) {
            *p = (c as f64 + pseudocount) / denom;
        }
        Ok(TripletDistribution { probs })
    }

    pub fn probs(&self) -> &[f64; NUM_TRIPLETS] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, b1: u8, b2: u8, b3: u8) -> f64 {
        self.probs[triplet_index(b1, b2, b3)]
    }
}

impl PairDistribution {
    pub fn probs(&self) -> &[f64; NUM_PAIRS] {
        &self.probs
    }

    #[inline]
    pub fn get(&self, b1: u8, b2: u8) -> f64 {
        self.probs[pair_index(b1, b2)]
    }
}

impl TransitionMatrix {
    pub fn is_defined(&self, b1: u8, b2: u8) -> bool {
        self.defined[pair_index(b1, b2)]
    }

    /// Row of `P(. | b1 b2)`; all-zero when the row is undefined.
    pub fn row(&self, b1: u8, b2: u8) -> &[f64; NUM_BASES] {
        &self.rows[pair_index(b1, b2)]
    }

    #[inline]
    pub fn get(&self, b1: u8, b2: u8, b3: u8) -> f64 {
        self.rows[pair_index(b1, b2)][b3 as usize]
    }
}

/// Marginalize a triplet distribution over its third base.
pub fn derive_pair(p3: &TripletDistribution) -> PairDistribution {
    let mut probs = [0.0; NUM_PAIRS];
    for (idx, &p) in p3.probs.iter().enumerate() {
        probs[idx / 4] += p;
    }
    PairDistribution { probs }
}

/// Conditional distribution of the third base given the leading pair.
/// Rows with zero pair mass are flagged undefined rather than erroring.
pub fn derive_transition(p3: &TripletDistribution, p2: &PairDistribution) -> TransitionMatrix {
    let mut rows = [[0.0; NUM_BASES]; NUM_PAIRS];
    let mut defined = [false; NUM_PAIRS];
    for pair in 0..NUM_PAIRS {
        let mass = p2.probs[pair];
        if mass > 0.0 {
            defined[pair] = true;
            for (b3, cell) in rows[pair].iter_mut().enumerate() {
                *cell = p3.probs[pair * 4 + b3] / mass;
            }
        }
    }
    TransitionMatrix { rows, defined }
}

/// Hellinger distance between two distributions on the same finite index
/// set: `sqrt(1/2 * sum (sqrt(p) - sqrt(q))^2)`. Zero iff `p = q`, one iff
/// the supports are disjoint. Inputs must each sum to 1 within 1e-6.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    for v in [p, q] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized { sum });
        }
    }
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    Ok((0.5 * s).sqrt().min(1.0))
}

/// A labeled triplet model: the triplet distribution plus its derived pair
/// distribution and transition matrix, with precomputed log tables for
/// likelihood evaluation.
#[derive(Clone)]
pub struct TripletModel {
    label: String,
    p3: TripletDistribution,
    p2: PairDistribution,
    t3: TransitionMatrix,
    log_p2: [f64; NUM_PAIRS],
    log_t3: [[f64; NUM_BASES]; NUM_PAIRS],
}

impl fmt::Debug for TripletModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripletModel")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl TripletModel {
    pub fn new(label: impl Into<String>, p3: TripletDistribution) -> Self {
        let p2 = derive_pair(&p3);
        let t3 = derive_transition(&p3, &p2);
        let mut log_p2 = [f64::NEG_INFINITY; NUM_PAIRS];
        for (l, &p) in log_p2.iter_mut().zip(&p2.probs) {
            *l = p.ln(); // ln(0) = -inf
        }
        let mut log_t3 = [[f64::NEG_INFINITY; NUM_BASES]; NUM_PAIRS];
        for (lr, r) in log_t3.iter_mut().zip(&t3.rows) {
            for (l, &p) in lr.iter_mut().zip(r) {
                *l = p.ln();
            }
        }
        TripletModel {
            label: label.into(),
            p3,
            p2,
            t3,
            log_p2,
            log_t3,
        }
    }

    /// Estimate a model directly from a genome sequence.
    pub fn estimate(label: impl Into<String>, g: &Sequence, pseudocount: f64) -> Result<Self> {
        Ok(Self::new(label, TripletDistribution::estimate(g, pseudocount)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn p3(&self) -> &TripletDistribution {
        &self.p3
    }

    pub fn p2(&self) -> &PairDistribution {
        &self.p2
    }

    pub fn t3(&self) -> &TransitionMatrix {
        &self.t3
    }

    #[inline]
    pub(crate) fn log_p2_at(&self, pair: usize) -> f64 {
        self.log_p2[pair]
    }

    #[inline]
    pub(crate) fn log_t3_at(&self, pair: usize, b3: usize) -> f64 {
        self.log_t3[pair][b3]
    }

    #[inline]
    pub(crate) fn p2_at(&self, pair: usize) -> f64 {
        self.p2.probs[pair]
    }

    #[inline]
    pub(crate) fn t3_at(&self, pair: usize, b3: usize) -> f64 {
        self.t3.rows[pair][b3]
    }
}

/// Simulate a genome of the given length from a model: the first two bases
/// are drawn from the pair distribution, every later base from the
/// transition row of its two predecessors. Deterministic for a fixed
/// generator state.
pub fn simulate_genome<R: Rng>(model: &TripletModel, length: usize, rng: &mut R) -> Result<Sequence> {
    if length < 3 {
        return Err(Error::invalid("genome length must be at least 3"));
    }
    let pair = sample_index(&model.p2.probs, rng).ok_or_else(|| {
        Error::Model("pair distribution has no positive mass".to_string())
    })?;
    let mut codes = Vec::with_capacity(length);
    codes.push((pair / 4) as u8);
    codes.push((pair % 4) as u8);
    for i in 2..length {
        let row = pair_index(codes[i - 2], codes[i - 1]);
        if !model.t3.defined[row] {
            return Err(Error::UndefinedTransition {
                prev: [
                    crate::seq::BASE_CHARS[codes[i - 2] as usize],
                    crate::seq::BASE_CHARS[codes[i - 1] as usize],
                ],
                position: i + 1,
            });
        }
        let b3 = sample_index(&model.t3.rows[row], rng).ok_or(Error::UndefinedTransition {
            prev: [
                crate::seq::BASE_CHARS[codes[i - 2] as usize],
                crate::seq::BASE_CHARS[codes[i - 1] as usize],
            ],
            position: i + 1,
        })?;
        codes.push(b3 as u8);
    }
    Sequence::from_codes(codes, Alphabet::dna())
}

// Inverse-CDF categorical sample over nonnegative weights; None if all zero.
fn sample_index<R: Rng>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut u = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = Some(i);
            if u < w {
                return Some(i);
            }
            u -= w;
        }
    }
    last
}

/// Empirical q-quantile with linear interpolation between order statistics
/// (R type 7). `values` must be non-empty and `q` in (0, 1).
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of empty sample"));
    }
    if !(0.0..1.0).contains(&q) || q <= 0.0 {
        return Err(Error::invalid("quantile level must be in (0, 1)"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
    } else {
        Ok(sorted[lo])
    }
}

/// Null distribution quantile of the Hellinger distance between a model and
/// models re-estimated from genomes simulated under it.
///
/// Simulates `replicates` genomes of the given length, estimates each one's
/// triplet distribution, and returns the empirical q-quantile of their
/// Hellinger distances to `model`'s own distribution. Replicate `i` uses the
/// derived seed `seed + i`, so the result is independent of worker count.
pub fn null_quantile(
    model: &TripletModel,
    length: usize,
    replicates: usize,
    q: f64,
    seed: u64,
) -> Result<f64> {
    if replicates < 100 {
        return Err(Error::invalid("null quantile needs at least 100 replicates"));
    }
    let distances: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let genome = simulate_genome(model, length, &mut rng)?;
            let est = TripletDistribution::estimate(&genome, 0.0)?;
            hellinger(est.probs(), model.p3.probs())
        })
        .collect::<Result<_>>()?;
    empirical_quantile(&distances, q)
}

// --------------------------------------------------------------------------
// Model files
// --------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ModelFile {
    label: String,
    alphabet: String,
    triplets: BTreeMap<String, f64>,
}

impl TripletModel {
    /// Parse a model from its JSON document: `label`, `alphabet` (must be
    /// "ACGT") and exactly 64 `triplets` entries keyed "AAA".."TTT".
    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(json)?;
        if file.alphabet != "ACGT" {
            return Err(Error::Model(format!(
                "unsupported model alphabet {:?}",
                file.alphabet
            )));
        }
        if file.triplets.len() != NUM_TRIPLETS {
            return Err(Error::Model(format!(
                "expected {} triplet entries, found {}",
                NUM_TRIPLETS,
                file.triplets.len()
            )));
        }
        let mut probs = [0.0; NUM_TRIPLETS];
        for (idx, p) in probs.iter_mut().enumerate() {
            let name = triplet_name(idx);
            *p = *file
                .triplets
                .get(&name)
                .ok_or_else(|| Error::Model(format!("missing triplet {name}")))?;
        }
        Ok(TripletModel::new(file.label, TripletDistribution::from_table(probs)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        let triplets: BTreeMap<String, f64> = self
            .p3
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (triplet_name(i), p))
            .collect();
        let file = ModelFile {
            label: self.label.clone(),
            alphabet: "ACGT".to_string(),
            triplets,
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// The three triplet models bundled with the crate: reference distributions
/// for an adenovirus genome (length 34125), a SARS-CoV-2 genome (29926) and
/// a SARS-CoV genome (29751).
pub mod bundled {
    use super::TripletModel;

    /// Genome lengths the bundled distributions were estimated from,
    /// in (Adeno, COVID, SARS) order.
    pub const GENOME_LENGTHS: [usize; 3] = [34125, 29926, 29751];

    pub fn adeno() -> TripletModel {
        TripletModel::from_json_str(include_str!("../data/adeno.json")).expect("bundled model")
    }

    pub fn covid() -> TripletModel {
        TripletModel::from_json_str(include_str!("../data/covid.json")).expect("bundled model")
    }

    pub fn sars() -> TripletModel {
        TripletModel::from_json_str(include_str!("../data/sars.json")).expect("bundled model")
    }

    /// All three bundled models in (Adeno, COVID, SARS) order.
    pub fn all() -> Vec<TripletModel> {
        vec![adeno(), covid(), sars()]
    }

    /// Raw JSON for a bundled model by (case-insensitive) label.
    pub fn json(name: &str) -> Option<&'static str> {
        match name.to_ascii_lowercase().as_str() {
            "adeno" => Some(include_str!("../data/adeno.json")),
            "covid" => Some(include_str!("../data/covid.json")),
            "sars" => Some(include_str!("../data/sars.json")),
            _ => None,
        }
    }
}
