//! Boundary membership and Neighbor Similarity.
//!
//! A sequence lies on the classifier boundary when at least one of its
//! Hamming-1 neighbors is classified differently. Neighbor Similarity is
//! `1 - H(q_R, q_N(R))` where `q_R` is the point mass at the sequence's own
//! decision and `q_N(R)` the empirical distribution of its neighbors'
//! decisions, so `NS = 1` exactly off the boundary and `NS < 1` on it.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rayon::prelude::*;

use crate::bayes::Classifier;
use crate::error::{Error, Result};
use crate::seq::{hamming_distance, neighbors, Alphabet, Sequence};
use crate::triplet::hellinger;

/// Decision distribution of a sequence's neighborhood.
#[derive(Debug, Clone)]
pub struct NeighborProfile {
    pub origin: Sequence,
    /// Class index of the origin's own decision.
    pub decision: usize,
    /// Per-class decision counts over all neighbors.
    pub neighbor_counts: Vec<usize>,
    /// Decisions of every neighbor, in the deterministic enumeration order.
    pub neighbor_decisions: Vec<usize>,
    /// Neighbor Similarity, in [0, 1].
    pub ns: f64,
    /// Number of classes other than the decision present among neighbors
    /// (0 = interior, 2 = "triple point" for three classes).
    pub boundary_status: usize,
    /// Classifier evaluations spent: neighbors plus the origin itself.
    pub evaluations: usize,
}

impl NeighborProfile {
    /// On the boundary iff some neighbor decided differently (`NS < 1`).
    pub fn on_boundary(&self) -> bool {
        self.boundary_status > 0
    }
}

/// Neighbor Similarity from a decision count vector: one minus the
/// Hellinger distance between the point mass at `decision` and the
/// empirical neighbor decision distribution. Depends on the counts only.
pub fn ns_from_counts(decision: usize, counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    debug_assert!(total > 0);
    let mut point = vec![0.0; counts.len()];
    point[decision] = 1.0;
    let q: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    1.0 - hellinger(&point, &q).expect("valid distributions")
}

/// Classify a sequence and all of its Hamming-1 neighbors.
///
/// Neighbor classification runs in parallel; the reduction into counts is
/// order-independent, so the result does not depend on worker count.
pub fn neighbor_profile<C: Classifier>(
    classifier: &C,
    r: &Sequence,
    alphabet: Alphabet,
) -> Result<NeighborProfile> {
    let decision = classifier.classify(r)?;
    let k = classifier.num_classes();
    let nbrs = neighbors(r, alphabet);
    let neighbor_decisions: Vec<usize> = nbrs
        .members()
        .par_iter()
        .map(|n| {
            classifier.classify(n).map_err(|e| Error::Neighbor {
                neighbor: n.to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut neighbor_counts = vec![0usize; k];
    for &d in &neighbor_decisions {
        neighbor_counts[d] += 1;
    }
    let ns = ns_from_counts(decision, &neighbor_counts);
    let boundary_status = neighbor_counts
        .iter()
        .enumerate()
        .filter(|&(i, &c)| i != decision && c > 0)
        .count();
    Ok(NeighborProfile {
        origin: r.clone(),
        decision,
        neighbor_counts,
        neighbor_decisions,
        ns,
        boundary_status,
        evaluations: nbrs.len() + 1,
    })
}

/// Neighbor Similarity estimated from a random sample of neighbors.
#[derive(Debug, Clone)]
pub struct SampledNs {
    pub origin: Sequence,
    pub k: usize,
    pub ns_estimate: f64,
    /// Indices into the deterministic neighbor enumeration, in sample order.
    pub sampled_indices: Vec<usize>,
    /// Per-class decision counts over the sampled neighbors.
    pub counts: Vec<usize>,
}

/// Draw `k` distinct neighbors uniformly without replacement (order
/// randomized per call) and compute Neighbor Similarity on the empirical
/// distribution of their decisions. With `k` equal to the full neighbor
/// count this equals the exact NS.
pub fn sampled_ns<C: Classifier, R: Rng>(
    classifier: &C,
    r: &Sequence,
    k: usize,
    alphabet: Alphabet,
    rng: &mut R,
) -> Result<SampledNs> {
    let nbrs = neighbors(r, alphabet);
    if k < 1 || k > nbrs.len() {
        return Err(Error::invalid(format!(
            "sample size {k} out of range 1..={}",
            nbrs.len()
        )));
    }
    let decision = classifier.classify(r)?;
    let sampled_indices = sample_without_replacement(nbrs.len(), k, rng);
    let mut counts = vec![0usize; classifier.num_classes()];
    for &idx in &sampled_indices {
        let d = classifier
            .classify(&nbrs.members()[idx])
            .map_err(|e| Error::Neighbor {
                neighbor: nbrs.members()[idx].to_string(),
                source: Box::new(e),
            })?;
        counts[d] += 1;
    }
    let ns_estimate = ns_from_counts(decision, &counts);
    Ok(SampledNs {
        origin: r.clone(),
        k,
        ns_estimate,
        sampled_indices,
        counts,
    })
}

// Partial Fisher-Yates: first k entries of a random permutation of 0..n.
pub(crate) fn sample_without_replacement<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Certified bounds on the distance from the boundary.
#[derive(Debug, Clone)]
pub struct DbBound {
    pub origin: Sequence,
    /// Certified lower bound; 0 iff the origin is itself on the boundary.
    pub lower: usize,
    /// Best upper bound (from witnesses or from a boundary point the
    /// search located); `None` when no bound is known.
    pub upper: Option<usize>,
    /// Radius within which the search certified that no boundary point
    /// exists. Meaningful only when `lower > 0`.
    pub exhausted_radius: usize,
    /// Unique classifier evaluations spent by the search.
    pub budget_used: usize,
}

/// Bound the distance from `r` to the boundary.
///
/// The upper bound is the minimum Hamming distance to any witness sequence
/// classified differently from `r`. The lower bound comes from a
/// breadth-first search outward from `r` that tests boundary membership of
/// every frontier sequence until a boundary point is found or the budget of
/// classifier evaluations is spent. Classifications are memoized, so shared
/// neighbors are never evaluated twice; `budget_used` counts unique
/// evaluations. The origin's own membership is always resolved, even if
/// that overruns a tiny budget.
pub fn db_bound<C: Classifier>(
    classifier: &C,
    r: &Sequence,
    witnesses: &[Sequence],
    alphabet: Alphabet,
    bfs_budget: usize,
) -> Result<DbBound> {
    let mut search = MemoSearch {
        classifier,
        memo: HashMap::new(),
        used: 0,
    };

    let origin_decision = search.classify(r)?;
    let mut upper: Option<usize> = None;
    for w in witnesses {
        if search.classify(w)? != origin_decision {
            let dist = hamming_distance(r, w)?;
            upper = Some(upper.map_or(dist, |u| u.min(dist)));
        }
    }

    if search.on_boundary(r, alphabet)? {
        return Ok(DbBound {
            origin: r.clone(),
            lower: 0,
            upper: Some(0),
            exhausted_radius: 0,
            budget_used: search.used,
        });
    }

    // BFS by Hamming shells around r. Nodes are membership-tested when
    // first seen; FIFO order guarantees the first boundary point found is
    // at minimal distance. When a node at distance d is popped, every
    // sequence at distance <= d has already tested non-boundary.
    let mut seen: HashMap<Sequence, usize> = HashMap::new();
    seen.insert(r.clone(), 0);
    let mut queue: VecDeque<(Sequence, usize)> = VecDeque::new();
    queue.push_back((r.clone(), 0));
    let mut exhausted_radius = 0usize;

    while let Some((s, dist)) = queue.pop_front() {
        exhausted_radius = exhausted_radius.max(dist);
        for n in neighbors(&s, alphabet).members() {
            if seen.contains_key(n) {
                continue;
            }
            let ndist = dist + 1;
            if let Some(u) = upper {
                // a differing witness at distance u implies a crossing on
                // the connecting path, i.e. a boundary point within u - 1
                if ndist >= u {
                    continue;
                }
            }
            seen.insert(n.clone(), ndist);
            if search.used >= bfs_budget {
                return Ok(DbBound {
                    origin: r.clone(),
                    lower: exhausted_radius + 1,
                    upper,
                    exhausted_radius,
                    budget_used: search.used,
                });
            }
            if search.on_boundary(n, alphabet)? {
                return Ok(DbBound {
                    origin: r.clone(),
                    lower: ndist,
                    upper: Some(upper.map_or(ndist, |u| u.min(ndist))),
                    exhausted_radius: ndist - 1,
                    budget_used: search.used,
                });
            }
            queue.push_back((n.clone(), ndist));
        }
    }

    // space (or witness radius) exhausted without finding a boundary point
    Ok(DbBound {
        origin: r.clone(),
        lower: exhausted_radius + 1,
        upper,
        exhausted_radius,
        budget_used: search.used,
    })
}

// Memoized classification: shared sequences are evaluated once and
// `used` counts unique evaluations only.
struct MemoSearch<'a, C: Classifier> {
    classifier: &'a C,
    memo: HashMap<Sequence, usize>,
    used: usize,
}

impl<C: Classifier> MemoSearch<'_, C> {
    fn classify(&mut self, s: &Sequence) -> Result<usize> {
        if let Some(&d) = self.memo.get(s) {
            return Ok(d);
        }
        let d = self.classifier.classify(s)?;
        self.memo.insert(s.clone(), d);
        self.used += 1;
        Ok(d)
    }

    fn on_boundary(&mut self, s: &Sequence, alphabet: Alphabet) -> Result<bool> {
        let own = self.classify(s)?;
        for n in neighbors(s, alphabet).members() {
            if self.classify(n)? != own {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::ClassLabel;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> Sequence {
        Sequence::parse(s, Alphabet::dna_n()).unwrap()
    }

    // Two-class test classifier: class 1 iff the count of `A`s reaches a
    // threshold. Cheap, deterministic, and easy to reason about.
    struct ThresholdClassifier {
        labels: Vec<ClassLabel>,
        threshold: usize,
    }

    impl ThresholdClassifier {
        fn new(threshold: usize) -> Self {
            ThresholdClassifier {
                labels: vec![
                    ClassLabel { index: 0, name: "low".into() },
                    ClassLabel { index: 1, name: "high".into() },
                ],
                threshold,
            }
        }
    }

    impl Classifier for ThresholdClassifier {
        fn labels(&self) -> &[ClassLabel] {
            &self.labels
        }
        fn classify(&self, r: &Sequence) -> Result<usize> {
            let a_count = r.codes().iter().filter(|&&c| c == 0).count();
            Ok(usize::from(a_count >= self.threshold))
        }
    }

    // Constant classifier: no boundary anywhere.
    struct ConstClassifier(Vec<ClassLabel>);
    impl Classifier for ConstClassifier {
        fn labels(&self) -> &[ClassLabel] {
            &self.0
        }
        fn classify(&self, _r: &Sequence) -> Result<usize> {
            Ok(0)
        }
    }

    fn const_classifier() -> ConstClassifier {
        ConstClassifier(vec![
            ClassLabel { index: 0, name: "only".into() },
            ClassLabel { index: 1, name: "never".into() },
        ])
    }

    #[test]
    fn interior_point_has_ns_one() {
        let c = const_classifier();
        let p = neighbor_profile(&c, &seq("ACGTACGT"), Alphabet::dna_n()).unwrap();
        assert_eq!(p.ns, 1.0);
        assert_eq!(p.boundary_status, 0);
        assert!(!p.on_boundary());
        assert_eq!(p.evaluations, 8 * 4 + 1);
        assert_eq!(p.neighbor_counts.iter().sum::<usize>(), 32);
    }

    #[test]
    fn ns_reference_value_from_counts() {
        // 304 agreeing, 100 in one other class, 0 in the third
        let ns = ns_from_counts(0, &[304, 100, 0]);
        assert_abs_diff_eq!(ns, 0.635931, epsilon = 1e-6);
        // all neighbors in one different class
        let ns = ns_from_counts(0, &[0, 404, 0]);
        assert_abs_diff_eq!(ns, 0.0, epsilon = 1e-12);
        // triple point: both other classes present
        let ns = ns_from_counts(1, &[10, 380, 14]);
        assert!(ns > 0.0 && ns < 1.0);
    }

    #[test]
    fn boundary_status_counts_foreign_classes() {
        let c = ThresholdClassifier::new(2);
        // "AAC": 2 As -> class 1. Changing either A drops to class 0.
        let p = neighbor_profile(&c, &seq("AAC"), Alphabet::dna()).unwrap();
        assert_eq!(p.decision, 1);
        assert_eq!(p.boundary_status, 1);
        assert!(p.on_boundary());
        assert!(p.ns < 1.0);
        // counts: changing A1 or A2 to C/G/T gives class 0 (6 ways);
        // changing C to anything keeps 2 As... to A gives 3 As: class 1
        assert_eq!(p.neighbor_counts, vec![6, 3]);
    }

    #[test]
    fn ns_is_a_function_of_counts_only() {
        // permuting which neighbors hold which decision leaves ns unchanged
        let a = ns_from_counts(0, &[300, 54, 50]);
        let b = ns_from_counts(0, &[300, 50, 54]);
        assert_abs_diff_eq!(a, ns_from_counts(0, &[300, 104, 0]), epsilon = 1e-12);
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn sampled_ns_full_sample_is_exact() {
        let c = ThresholdClassifier::new(3);
        let r = seq("AAACGT");
        let full = neighbor_profile(&c, &r, Alphabet::dna()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sampled_ns(&c, &r, full.evaluations - 1, Alphabet::dna(), &mut rng).unwrap();
        assert!((s.ns_estimate - full.ns).abs() < 1e-15);
    }

    #[test]
    fn sampled_ns_is_deterministic_and_validates_k() {
        let c = ThresholdClassifier::new(3);
        let r = seq("AAACGTAA");
        let a = sampled_ns(&c, &r, 5, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sampled_ns(&c, &r, 5, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.sampled_indices, b.sampled_indices);
        assert_eq!(a.ns_estimate, b.ns_estimate);
        assert!(sampled_ns(&c, &r, 0, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(1)).is_err());
        assert!(
            sampled_ns(&c, &r, 100, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(1)).is_err()
        );
        // k = 1, agreeing neighbor -> estimate 1
        let c0 = const_classifier();
        let s = sampled_ns(&c0, &r, 1, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(s.ns_estimate, 1.0);
    }

    #[test]
    fn sampled_ns_mean_tracks_exact_ns() {
        // estimator check: the mean of NS(R, 50) over many seeds stays
        // within 0.02 of the exact NS, interior and boundary points alike
        let c = ThresholdClassifier::new(26);
        let mut gen = ChaCha8Rng::seed_from_u64(77);
        for read in 0..20 {
            let r = crate::seq::random_sequence(101, Alphabet::dna(), &mut gen).unwrap();
            let exact = neighbor_profile(&c, &r, Alphabet::dna()).unwrap().ns;
            let mut sum = 0.0;
            for seed in 0..1000u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
                sum += sampled_ns(&c, &r, 50, Alphabet::dna(), &mut rng)
                    .unwrap()
                    .ns_estimate;
            }
            let mean = sum / 1000.0;
            assert!(
                (mean - exact).abs() < 0.02,
                "read {read}: mean {mean} vs exact {exact}"
            );
        }
    }

    #[test]
    fn sample_without_replacement_is_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = sample_without_replacement(10, 10, &mut rng);
        let mut sorted = s.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
    }

    // Brute-force DB over an exhaustively enumerable space.
    fn brute_force_db<C: Classifier>(c: &C, r: &Sequence, alphabet: Alphabet) -> usize {
        fn enumerate(len: usize, alphabet: Alphabet) -> Vec<Sequence> {
            let size = alphabet.size() as u8;
            let mut out = vec![Vec::new()];
            for _ in 0..len {
                let mut next = Vec::new();
                for prefix in &out {
                    for b in 0..size {
                        let mut p = prefix.clone();
                        p.push(b);
                        next.push(p);
                    }
                }
                out = next;
            }
            out.into_iter()
                .map(|codes| Sequence::from_codes(codes, alphabet).unwrap())
                .collect()
        }
        let all = enumerate(r.len(), alphabet);
        let decisions: HashMap<Sequence, usize> =
            all.iter().map(|s| (s.clone(), c.classify(s).unwrap())).collect();
        let boundary: Vec<&Sequence> = all
            .iter()
            .filter(|s| {
                neighbors(s, alphabet)
                    .members()
                    .iter()
                    .any(|n| decisions[n] != decisions[*s])
            })
            .collect();
        boundary
            .iter()
            .map(|b| hamming_distance(r, b).unwrap())
            .min()
            .expect("space has a boundary")
    }

    #[test]
    fn db_bound_matches_brute_force_on_tiny_space() {
        let c = ThresholdClassifier::new(3);
        let alphabet = Alphabet::dna();
        for s in ["AAA", "ACG", "TTT", "AAC", "GGG"] {
            let r = seq(s);
            let expected = brute_force_db(&c, &r, alphabet);
            let b = db_bound(&c, &r, &[], alphabet, 1_000_000).unwrap();
            assert_eq!(b.lower, expected, "origin {s}");
            if expected == 0 {
                assert_eq!(b.upper, Some(0));
            } else {
                assert_eq!(b.upper, Some(expected), "origin {s}");
            }
        }
    }

    #[test]
    fn db_bound_witness_upper() {
        let c = ThresholdClassifier::new(3);
        let alphabet = Alphabet::dna();
        // TTTT is class 0; AAAA (class 1) witnesses an upper bound of 4
        let r = seq("TTTT");
        let w = seq("AAAA");
        let b = db_bound(&c, &r, std::slice::from_ref(&w), alphabet, 0).unwrap();
        assert_eq!(b.upper, Some(4));
        assert!(b.lower >= 1);
    }

    #[test]
    fn db_bound_budget_exhaustion_reports_partial_radius() {
        let c = ThresholdClassifier::new(4);
        let alphabet = Alphabet::dna();
        let r = seq("TTTTTT");
        // tiny budget: resolves the origin, then stops
        let b = db_bound(&c, &r, &[], alphabet, 5).unwrap();
        assert!(b.lower >= 1);
        assert_eq!(b.exhausted_radius + 1, b.lower);
        assert!(b.upper.is_none());

        // true DB for TTTTTT under threshold 4 on length 6: boundary points
        // need 3 As (one change from 4 As) or be at 3 As... brute force:
        let expected = brute_force_db(&c, &r, alphabet);
        let full = db_bound(&c, &r, &[], alphabet, 10_000_000).unwrap();
        assert_eq!(full.lower, expected);
        assert!(b.lower <= expected);
    }

    #[test]
    fn db_bound_on_boundary_is_zero() {
        let c = ThresholdClassifier::new(3);
        let r = seq("AAAC"); // 3 As: class 1, one substitution flips
        let b = db_bound(&c, &r, &[], Alphabet::dna(), 100_000).unwrap();
        assert_eq!(b.lower, 0);
        assert_eq!(b.upper, Some(0));
    }
}
