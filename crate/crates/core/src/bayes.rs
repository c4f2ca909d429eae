//! Naive Bayes classification of reads under triplet models.
//!
//! Likelihoods are evaluated in log space: a length-101 read multiplies 99
//! conditional probabilities, far below f64 underflow in linear space.
//! Undetermined bases (`N`) are marginalized exactly by a forward recursion
//! over the 16 states given by the last two bases, which equals the sum of
//! the plain likelihood over all completions of the read.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::Sequence;
use crate::triplet::{pair_index, TripletModel};

/// One output class of a classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub index: usize,
    pub name: String,
}

/// Prior over classes; weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    weights: Vec<f64>,
}

impl Prior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid("prior weights must be nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Prior { weights })
    }

    pub fn uniform(k: usize) -> Self {
        Prior {
            weights: vec![1.0 / k as f64; k],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Posterior distribution over classes for one read.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    probs: Vec<f64>,
}

impl Posterior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid("posterior entries must lie in [0,1]"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Posterior { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Index of the maximal posterior probability, ties broken by the
    /// lowest class index.
    pub fn argmax(&self) -> usize {
        argmax_lowest(&self.probs)
    }
}

/// Maximum of the posterior probabilities; always at least `1/K`.
pub fn max_posterior(p: &Posterior) -> f64 {
    p.probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Entropy `-sum p ln p` (natural log, `0 ln 0 = 0`); ranges over
/// `[0, ln K]`, maximized by the uniform distribution.
pub fn posterior_entropy(p: &Posterior) -> f64 {
    p.probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

fn argmax_lowest(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// A deterministic classifier on the sequence space. `classify` returns the
/// class index into `labels()`; implementations must be pure so results are
/// reproducible regardless of evaluation order.
pub trait Classifier: Sync {
    fn labels(&self) -> &[ClassLabel];

    fn classify(&self, r: &Sequence) -> Result<usize>;

    fn num_classes(&self) -> usize {
        self.labels().len()
    }
}

/// Log-likelihood of a read under one triplet model, marginalizing any `N`s.
///
/// For an N-free read this is `ln P2(r1 r2) + sum ln T3((r_{i-2}, r_{i-1}), r_i)`.
/// With `N`s present, every undetermined base is summed over `{A,C,G,T}`
/// independently; factors that hit zero model probabilities contribute zero
/// to the sum, and a read with no positive completion yields `-inf`.
pub fn log_likelihood(model: &TripletModel, r: &Sequence) -> Result<f64> {
    let codes = r.codes();
    if codes.len() < 3 {
        return Err(Error::SequenceTooShort {
            len: codes.len(),
            min: 3,
        });
    }
    if codes.iter().all(|&c| c < 4) {
        let mut ll = model.log_p2_at(pair_index(codes[0], codes[1]));
        for i in 2..codes.len() {
            ll += model.log_t3_at(pair_index(codes[i - 2], codes[i - 1]), codes[i] as usize);
        }
        Ok(ll)
    } else {
        Ok(forward_marginalized(model, codes))
    }
}

// Bases consistent with a read character: itself, or all four for N.
#[inline]
fn completions(code: u8) -> &'static [u8] {
    const SINGLE: [[u8; 1]; 4] = [[0], [1], [2], [3]];
    const ALL: [u8; 4] = [0, 1, 2, 3];
    if code < 4 {
        &SINGLE[code as usize][..]
    } else {
        &ALL[..]
    }
}

// Scaled forward recursion over 16 (previous two bases) states.
fn forward_marginalized(model: &TripletModel, codes: &[u8]) -> f64 {
    let mut w = [0.0f64; 16];
    for &b1 in completions(codes[0]) {
        for &b2 in completions(codes[1]) {
            let pair = pair_index(b1, b2);
            w[pair] = model.p2_at(pair);
        }
    }
    let mut total: f64 = w.iter().sum();
    if total <= 0.0 {
        return f64::NEG_INFINITY;
    }
    for v in w.iter_mut() {
        *v /= total;
    }
    let mut log_scale = total.ln();

    for &code in &codes[2..] {
        let mut next = [0.0f64; 16];
        for (pair, &weight) in w.iter().enumerate() {
            if weight > 0.0 {
                let b2 = (pair % 4) as u8;
                for &b3 in completions(code) {
                    next[pair_index(b2, b3)] += weight * model.t3_at(pair, b3 as usize);
                }
            }
        }
        total = next.iter().sum();
        if total <= 0.0 {
            return f64::NEG_INFINITY;
        }
        for v in next.iter_mut() {
            *v /= total;
        }
        log_scale += total.ln();
        w = next;
    }
    log_scale
}

/// The naive Bayes classifier: K triplet models and a prior. The decision
/// is the class with maximal posterior probability, ties broken by the
/// lowest class index; under a uniform prior this is also the maximum
/// likelihood decision.
#[derive(Debug, Clone)]
pub struct BayesClassifier {
    models: Vec<TripletModel>,
    labels: Vec<ClassLabel>,
    prior: Prior,
    log_prior: Vec<f64>,
}

impl BayesClassifier {
    pub fn new(models: Vec<TripletModel>, prior: Prior) -> Result<Self> {
        if models.len() < 2 {
            return Err(Error::invalid("a classifier needs at least two models"));
        }
        if prior.weights.len() != models.len() {
            return Err(Error::DimensionMismatch(prior.weights.len(), models.len()));
        }
        let labels = models
            .iter()
            .enumerate()
            .map(|(index, m)| ClassLabel {
                index,
                name: m.label().to_string(),
            })
            .collect();
        let log_prior = prior.weights.iter().map(|&w| w.ln()).collect();
        Ok(BayesClassifier {
            models,
            labels,
            prior,
            log_prior,
        })
    }

    /// Uniform-prior classifier over the given models.
    pub fn with_uniform_prior(models: Vec<TripletModel>) -> Result<Self> {
        let k = models.len();
        Self::new(models, Prior::uniform(k))
    }

    /// The bundled three-class classifier (Adeno, COVID, SARS) with a
    /// uniform prior.
    pub fn bundled() -> Self {
        Self::with_uniform_prior(crate::triplet::bundled::all()).expect("bundled models")
    }

    pub fn models(&self) -> &[TripletModel] {
        &self.models
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    /// Per-class log-likelihoods of a read.
    pub fn log_likelihoods(&self, r: &Sequence) -> Result<Vec<f64>> {
        self.models.iter().map(|m| log_likelihood(m, r)).collect()
    }

    /// Posterior over classes via log-sum-exp. Errors distinctly when every
    /// class has zero likelihood.
    pub fn posterior(&self, r: &Sequence) -> Result<Posterior> {
        let mut scores = self.log_likelihoods(r)?;
        for (s, lp) in scores.iter_mut().zip(&self.log_prior) {
            *s += lp;
        }
        let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Err(Error::UndefinedPosterior);
        }
        let mut probs: Vec<f64> = scores.iter().map(|&s| (s - m).exp()).collect();
        let z: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= z;
        }
        Ok(Posterior { probs })
    }
}

impl Classifier for BayesClassifier {
    fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    fn classify(&self, r: &Sequence) -> Result<usize> {
        let lls = self.log_likelihoods(r)?;
        let scores: Vec<f64> = lls
            .iter()
            .zip(&self.log_prior)
            .map(|(&ll, &lp)| ll + lp)
            .collect();
        if scores.iter().all(|&s| s == f64::NEG_INFINITY) {
            return Err(Error::UndefinedPosterior);
        }
        Ok(argmax_lowest(&scores))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Alphabet;
    use crate::triplet::{bundled, triplet_index, TripletDistribution, NUM_TRIPLETS};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> Sequence {
        Sequence::parse(s, Alphabet::dna_n()).unwrap()
    }

    fn uniform_model() -> TripletModel {
        TripletModel::new("uniform", TripletDistribution::uniform())
    }

    // Brute-force oracle: sum the plain product over every completion of
    // the read, in linear space. Independent of the forward recursion.
    fn brute_force_likelihood(model: &TripletModel, codes: &[u8]) -> f64 {
        fn rec(model: &TripletModel, codes: &[u8], pos: usize, filled: &mut Vec<u8>) -> f64 {
            if pos == codes.len() {
                let mut prod = model.p2().get(filled[0], filled[1]);
                for i in 2..filled.len() {
                    prod *= model.t3().get(filled[i - 2], filled[i - 1], filled[i]);
                }
                return prod;
            }
            let options: &[u8] = if codes[pos] < 4 {
                std::slice::from_ref(&codes[pos])
            } else {
                &[0, 1, 2, 3]
            };
            let mut total = 0.0;
            for &b in options {
                filled.push(b);
                total += rec(model, codes, pos + 1, filled);
                filled.pop();
            }
            total
        }
        rec(model, codes, 0, &mut Vec::new())
    }

    fn random_model(rng: &mut impl Rng) -> TripletModel {
        let mut probs = [0.0; NUM_TRIPLETS];
        // sparse-ish: some zero cells exercise the -inf factor handling
        let mut sum = 0.0;
        for p in probs.iter_mut() {
            if rng.gen_bool(0.8) {
                *p = rng.gen::<f64>();
                sum += *p;
            }
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }
        TripletModel::new("rand", TripletDistribution::from_probs(probs).unwrap())
    }

    #[test]
    fn direct_product_example() {
        // P2(AA) = 0.1, T3((A,A),A) = 0.5
        let mut probs = [0.0; NUM_TRIPLETS];
        probs[triplet_index(0, 0, 0)] = 0.05; // AAA
        probs[triplet_index(0, 0, 1)] = 0.05; // AAC
        probs[triplet_index(1, 1, 1)] = 0.90; // CCC
        let model = TripletModel::new("m", TripletDistribution::from_probs(probs).unwrap());
        assert_abs_diff_eq!(model.p2().get(0, 0), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(model.t3().get(0, 0, 0), 0.5, epsilon = 1e-15);
        let ll = log_likelihood(&model, &seq("AAA")).unwrap();
        assert_abs_diff_eq!(ll, (0.05f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn uniform_model_closed_form() {
        let model = uniform_model();
        for len in [3usize, 10, 101] {
            let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
            let r = crate::seq::random_sequence(len, Alphabet::dna(), &mut rng).unwrap();
            let ll = log_likelihood(&model, &r).unwrap();
            let expected = (1.0f64 / 16.0).ln() + (len as f64 - 2.0) * (0.25f64).ln();
            assert_abs_diff_eq!(ll, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn n_marginalization_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let model = random_model(&mut rng);
            for len in 3..=8usize {
                for _ in 0..20 {
                    let mut codes: Vec<u8> = (0..len).map(|_| rng.gen_range(0..4)).collect();
                    let n_count = rng.gen_range(0..=len.min(4));
                    for _ in 0..n_count {
                        let pos = rng.gen_range(0..len);
                        codes[pos] = 4;
                    }
                    let r = Sequence::from_codes(codes.clone(), Alphabet::dna_n()).unwrap();
                    let ll = log_likelihood(&model, &r).unwrap();
                    let brute = brute_force_likelihood(&model, &codes);
                    if brute == 0.0 {
                        assert_eq!(ll, f64::NEG_INFINITY, "read {r}");
                    } else {
                        let rel = (ll - brute.ln()).abs() / brute.ln().abs().max(1.0);
                        assert!(rel < 1e-10, "read {r}: {ll} vs {}", brute.ln());
                    }
                }
            }
        }
    }

    #[test]
    fn leading_and_trailing_ns() {
        let model = bundled::adeno();
        for s in ["NNA", "ANN", "NAN", "NNNNN", "NACGT", "ACGTN"] {
            let r = seq(s);
            let ll = log_likelihood(&model, &r).unwrap();
            let brute = brute_force_likelihood(&model, r.codes());
            assert_abs_diff_eq!(ll, brute.ln(), epsilon = 1e-10);
        }
    }

    #[test]
    fn length_101_is_finite_in_log_space() {
        let c = BayesClassifier::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = crate::seq::random_sequence(101, Alphabet::dna(), &mut rng).unwrap();
        for ll in c.log_likelihoods(&r).unwrap() {
            assert!(ll.is_finite());
            assert!(ll < -100.0); // direct product would underflow: ~1e-180
        }
    }

    #[test]
    fn posterior_examples() {
        let c = BayesClassifier::bundled();
        // equal likelihoods, uniform prior -> uniform posterior
        let p = Posterior::new(vec![1.0 / 3.0; 3]).unwrap();
        assert_abs_diff_eq!(max_posterior(&p), 1.0 / 3.0, epsilon = 1e-12);

        // hand-built from likelihoods (0.2, 0.1, 0.1) with uniform prior
        let scores = [0.2f64.ln(), 0.1f64.ln(), 0.1f64.ln()];
        let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = scores.iter().map(|&s| (s - m).exp()).collect();
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.25, epsilon = 1e-12);

        // posterior on a real read sums to one
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = crate::seq::random_sequence(101, Alphabet::dna_n(), &mut rng).unwrap();
        let post = c.posterior(&r).unwrap();
        assert_abs_diff_eq!(post.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(post.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn prior_cancels_for_equal_likelihoods() {
        // two identical models, non-uniform prior: posterior = prior
        let m = uniform_model();
        let c = BayesClassifier::new(
            vec![m.clone(), m.clone(), m],
            Prior::new(vec![0.5, 0.25, 0.25]).unwrap(),
        )
        .unwrap();
        let p = c.posterior(&seq("ACGTACGT")).unwrap();
        assert_abs_diff_eq!(p.probs()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.probs()[1], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(p.probs()[2], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn classify_ties_break_to_lowest_index() {
        let m = uniform_model();
        let c = BayesClassifier::with_uniform_prior(vec![m.clone(), m.clone(), m]).unwrap();
        assert_eq!(c.classify(&seq("ACGT")).unwrap(), 0);

        let p = Posterior::new(vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(p.argmax(), 0);
        let p = Posterior::new(vec![0.2, 0.4, 0.4]).unwrap();
        assert_eq!(p.argmax(), 1);
    }

    #[test]
    fn classify_agrees_with_likelihood_argmax() {
        let c = BayesClassifier::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let r = crate::seq::random_sequence(101, Alphabet::dna_n(), &mut rng).unwrap();
            let lls = c.log_likelihoods(&r).unwrap();
            let mut best = 0;
            for i in 1..lls.len() {
                if lls[i] > lls[best] {
                    best = i;
                }
            }
            assert_eq!(c.classify(&r).unwrap(), best);
            let post = c.posterior(&r).unwrap();
            assert_eq!(post.argmax(), best);
            assert!((post.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(post.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn decision_invariant_under_common_log_shift() {
        // shifting all scores by a constant cannot change the argmax; spot
        // check via a prior change that multiplies all posteriors equally
        let c = BayesClassifier::bundled();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let r = crate::seq::random_sequence(60, Alphabet::dna(), &mut rng).unwrap();
            let lls = c.log_likelihoods(&r).unwrap();
            let shifted: Vec<f64> = lls.iter().map(|&x| x + 123.456).collect();
            let a = {
                let mut b = 0;
                for i in 1..lls.len() {
                    if lls[i] > lls[b] {
                        b = i;
                    }
                }
                b
            };
            let s = {
                let mut b = 0;
                for i in 1..shifted.len() {
                    if shifted[i] > shifted[b] {
                        b = i;
                    }
                }
                b
            };
            assert_eq!(a, s);
        }
    }

    #[test]
    fn undefined_posterior_is_reported() {
        // model with a single triplet: any read off-support has zero
        // likelihood under both classes
        let mut probs = [0.0; NUM_TRIPLETS];
        probs[triplet_index(0, 0, 0)] = 1.0;
        let m = TripletModel::new("allA", TripletDistribution::from_probs(probs).unwrap());
        let c = BayesClassifier::with_uniform_prior(vec![m.clone(), m]).unwrap();
        assert!(matches!(
            c.posterior(&seq("CCC")),
            Err(Error::UndefinedPosterior)
        ));
        assert!(matches!(
            c.classify(&seq("CCC")),
            Err(Error::UndefinedPosterior)
        ));
    }

    #[test]
    fn entropy_reference_values() {
        let p = Posterior::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(posterior_entropy(&p), 0.0);
        let p = Posterior::new(vec![1.0 / 3.0; 3]).unwrap();
        assert_abs_diff_eq!(posterior_entropy(&p), 3.0f64.ln(), epsilon = 1e-12);
        let p = Posterior::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_abs_diff_eq!(posterior_entropy(&p), 1.5 * 2.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(max_posterior(&p), 0.5);
    }

    #[test]
    fn short_reads_are_rejected() {
        let model = uniform_model();
        assert!(matches!(
            log_likelihood(&model, &seq("AC")),
            Err(Error::SequenceTooShort { .. })
        ));
    }
}
