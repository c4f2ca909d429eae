//! Sequence alphabet and the Hamming graph on fixed-length sequences.
//!
//! Sequences are strings over `{A,C,G,T}` or `{A,C,G,T,N}`. Two equal-length
//! sequences are neighbors when their Hamming distance is exactly one, which
//! gives the input space the structure of a loopless, undirected, connected
//! graph. All enumeration orders here are deterministic: position-major,
//! then alphabet order `A < C < G < T < N`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Base codes in fixed alphabet order. `N` is always code 4.
pub const BASE_CHARS: [char; 5] = ['A', 'C', 'G', 'T', 'N'];

/// The nucleotide alphabet, with or without the undetermined base `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    includes_n: bool,
}

impl Alphabet {
    /// `{A,C,G,T}` — genomes and models live here.
    pub const fn dna() -> Self {
        Alphabet { includes_n: false }
    }

    /// `{A,C,G,T,N}` — the read space.
    pub const fn dna_n() -> Self {
        Alphabet { includes_n: true }
    }

    pub const fn includes_n(&self) -> bool {
        self.includes_n
    }

    /// Number of symbols (4 or 5).
    pub const fn size(&self) -> usize {
        if self.includes_n {
            5
        } else {
            4
        }
    }

    /// Symbols in alphabet order.
    pub fn symbols(&self) -> &'static [char] {
        &BASE_CHARS[..self.size()]
    }

    /// Encode a character to its base code, folding lowercase to uppercase.
    /// Returns `None` for characters outside the alphabet.
    pub fn encode(&self, ch: char) -> Option<u8> {
        let code = match ch.to_ascii_uppercase() {
            'A' => 0,
            'C' => 1,
            'G' => 2,
            'T' => 3,
            'N' if self.includes_n => 4,
            _ => return None,
        };
        Some(code)
    }

    /// Decode a base code back to its character.
    pub fn decode(code: u8) -> char {
        BASE_CHARS[code as usize]
    }
}

/// A validated sequence over the nucleotide alphabet, stored as base codes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    codes: Vec<u8>,
}

impl Sequence {
    /// Parse a string, validating every character against `alphabet`.
    /// Lowercase is folded to uppercase. On failure reports the 1-based
    /// position of the offending character.
    pub fn parse(s: &str, alphabet: Alphabet) -> Result<Self> {
        Self::parse_record(s, alphabet, "")
    }

    /// Like [`Sequence::parse`] but attributes errors to a named record.
    pub fn parse_record(s: &str, alphabet: Alphabet, record: &str) -> Result<Self> {
        let mut codes = Vec::with_capacity(s.len());
        for (i, ch) in s.chars().enumerate() {
            match alphabet.encode(ch) {
                Some(code) => codes.push(code),
                None => {
                    return Err(Error::IllegalCharacter {
                        record: record.to_string(),
                        position: i + 1,
                        ch,
                    })
                }
            }
        }
        Ok(Sequence { codes })
    }

    /// Build from raw base codes. Every code must be valid for `alphabet`.
    pub fn from_codes(codes: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        if let Some(&bad) = codes.iter().find(|&&c| (c as usize) >= alphabet.size()) {
            return Err(Error::invalid(format!("base code {bad} out of range")));
        }
        Ok(Sequence { codes })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    /// True if any base is `N`.
    pub fn has_n(&self) -> bool {
        self.codes.contains(&4)
    }

    /// Substring `[start, end)` as a new sequence.
    pub fn slice(&self, start: usize, end: usize) -> Sequence {
        Sequence {
            codes: self.codes[start..end].to_vec(),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.codes {
            write!(f, "{}", Alphabet::decode(c))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({self})")
    }
}

/// All sequences at Hamming distance exactly one from `origin`.
#[derive(Debug, Clone)]
pub struct NeighborSet {
    origin: Sequence,
    members: Vec<Sequence>,
}

impl NeighborSet {
    pub fn origin(&self) -> &Sequence {
        &self.origin
    }

    pub fn members(&self) -> &[Sequence] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Number of Hamming-1 neighbors of a length-`len` sequence under `alphabet`:
/// `len * (size - 1)`. For length 101 this is 404 with N, 303 without.
pub fn neighbor_count(len: usize, alphabet: Alphabet) -> usize {
    len * (alphabet.size() - 1)
}

/// Enumerate all Hamming-1 neighbors of `x` in deterministic order:
/// position-major, then alphabet order of the substituted base.
///
/// `x` must lie in the graph, i.e. contain no symbol outside `alphabet`.
pub fn neighbors(x: &Sequence, alphabet: Alphabet) -> NeighborSet {
    let members: Vec<Sequence> = neighbor_codes(x, alphabet)
        .map(|codes| Sequence { codes })
        .collect();
    NeighborSet {
        origin: x.clone(),
        members,
    }
}

/// Iterator over the raw code vectors of the neighbors of `x`, in the same
/// deterministic order as [`neighbors`].
pub fn neighbor_codes<'a>(
    x: &'a Sequence,
    alphabet: Alphabet,
) -> impl Iterator<Item = Vec<u8>> + 'a {
    let size = alphabet.size() as u8;
    assert!(
        x.codes.iter().all(|&c| c < size),
        "sequence contains symbols outside the neighbor alphabet"
    );
    let codes = &x.codes;
    (0..codes.len()).flat_map(move |pos| {
        (0..size).filter(move |&b| b != codes[pos]).map(move |b| {
            let mut c = codes.clone();
            c[pos] = b;
            c
        })
    })
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming_distance(a: &Sequence, b: &Sequence) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.codes
        .iter()
        .zip(&b.codes)
        .filter(|(x, y)| x != y)
        .count())
}

/// Which of the `k!` site orderings a Hamming path should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteOrder<'a> {
    /// Replace differing sites left to right (the default ordering).
    LeftToRight,
    /// Replace differing sites right to left.
    RightToLeft,
    /// Explicit permutation of the differing site indices (0-based).
    Custom(&'a [usize]),
}

/// The Hamming path from `a` to `b`: starting at `a`, replace one differing
/// site at a time by the corresponding base of `b`, in the given order.
/// The result has length `hamming_distance(a, b) + 1`, successive elements
/// are neighbors, and it starts at `a` and ends at `b`.
pub fn hamming_path(a: &Sequence, b: &Sequence, order: SiteOrder) -> Result<Vec<Sequence>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut diff: Vec<usize> = (0..a.len()).filter(|&i| a.codes[i] != b.codes[i]).collect();
    match order {
        SiteOrder::LeftToRight => {}
        SiteOrder::RightToLeft => diff.reverse(),
        SiteOrder::Custom(perm) => {
            let mut sorted = perm.to_vec();
            sorted.sort_unstable();
            let mut expected = diff.clone();
            expected.sort_unstable();
            if sorted != expected {
                return Err(Error::invalid(
                    "site order is not a permutation of the differing sites".to_string(),
                ));
            }
            diff = perm.to_vec();
        }
    }
    let mut path = Vec::with_capacity(diff.len() + 1);
    let mut current = a.clone();
    path.push(current.clone());
    for &site in &diff {
        current.codes[site] = b.codes[site];
        path.push(current.clone());
    }
    Ok(path)
}

/// A uniform random sequence of the given length, each base drawn
/// independently from `alphabet`. Deterministic for a fixed generator state.
pub fn random_sequence<R: Rng>(length: usize, alphabet: Alphabet, rng: &mut R) -> Result<Sequence> {
    if length < 1 {
        return Err(Error::invalid("sequence length must be at least 1"));
    }
    let size = alphabet.size() as u8;
    let codes = (0..length).map(|_| rng.gen_range(0..size)).collect();
    Ok(Sequence { codes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> Sequence {
        Sequence::parse(s, Alphabet::dna_n()).unwrap()
    }

    #[test]
    fn parse_folds_lowercase_and_validates() {
        let s = Sequence::parse("acgtN", Alphabet::dna_n()).unwrap();
        assert_eq!(s.to_string(), "ACGTN");
        let err = Sequence::parse("ACXT", Alphabet::dna_n()).unwrap_err();
        match err {
            Error::IllegalCharacter { position, ch, .. } => {
                assert_eq!(position, 3);
                assert_eq!(ch, 'X');
            }
            other => panic!("unexpected error {other:?}"),
        }
        // N is illegal without the N alphabet
        assert!(Sequence::parse("ACGN", Alphabet::dna()).is_err());
    }

    #[test]
    fn hamming_distance_basics() {
        assert_eq!(hamming_distance(&seq("AAA"), &seq("AAA")).unwrap(), 0);
        assert_eq!(hamming_distance(&seq("AAA"), &seq("AAT")).unwrap(), 1);
        assert_eq!(hamming_distance(&seq("ACGT"), &seq("TGCA")).unwrap(), 4);
        assert!(hamming_distance(&seq("AA"), &seq("AAA")).is_err());
    }

    #[test]
    fn neighbor_counts_match_alphabet() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_sequence(101, Alphabet::dna_n(), &mut rng).unwrap();
        assert_eq!(neighbors(&x, Alphabet::dna_n()).len(), 404);
        let y = random_sequence(101, Alphabet::dna(), &mut rng).unwrap();
        assert_eq!(neighbors(&y, Alphabet::dna()).len(), 303);
        assert_eq!(neighbors(&seq("AAA"), Alphabet::dna()).len(), 9);
    }

    #[test]
    fn neighbor_order_is_position_major_then_alphabet() {
        let n = neighbors(&seq("AA"), Alphabet::dna());
        let got: Vec<String> = n.members().iter().map(|s| s.to_string()).collect();
        assert_eq!(got, vec!["CA", "GA", "TA", "AC", "AG", "AT"]);
    }

    #[test]
    fn hamming_path_orderings() {
        let p = hamming_path(&seq("AAA"), &seq("AAA"), SiteOrder::LeftToRight).unwrap();
        assert_eq!(p.len(), 1);

        let p = hamming_path(&seq("AAA"), &seq("ATT"), SiteOrder::LeftToRight).unwrap();
        let got: Vec<String> = p.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, vec!["AAA", "ATA", "ATT"]);

        let p = hamming_path(&seq("AAA"), &seq("ATT"), SiteOrder::RightToLeft).unwrap();
        let got: Vec<String> = p.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, vec!["AAA", "AAT", "ATT"]);

        let p = hamming_path(&seq("AAA"), &seq("ATT"), SiteOrder::Custom(&[2, 1])).unwrap();
        let got: Vec<String> = p.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, vec!["AAA", "AAT", "ATT"]);

        assert!(hamming_path(&seq("AAA"), &seq("ATT"), SiteOrder::Custom(&[0, 1])).is_err());
        assert!(hamming_path(&seq("AAA"), &seq("ATTT"), SiteOrder::LeftToRight).is_err());
    }

    #[test]
    fn random_sequence_is_deterministic_per_seed() {
        let a = random_sequence(101, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = random_sequence(101, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert!(!a.has_n());
        assert!(random_sequence(0, Alphabet::dna(), &mut ChaCha8Rng::seed_from_u64(7)).is_err());
    }

    fn arb_seq(max_len: usize) -> impl Strategy<Value = Sequence> {
        proptest::collection::vec(0u8..4, 1..=max_len)
            .prop_map(|codes| Sequence::from_codes(codes, Alphabet::dna()).unwrap())
    }

    fn arb_pair(len: usize) -> impl Strategy<Value = (Sequence, Sequence)> {
        (
            proptest::collection::vec(0u8..4, len),
            proptest::collection::vec(0u8..4, len),
        )
            .prop_map(|(a, b)| {
                (
                    Sequence::from_codes(a, Alphabet::dna()).unwrap(),
                    Sequence::from_codes(b, Alphabet::dna()).unwrap(),
                )
            })
    }

    proptest! {
        #[test]
        fn prop_neighbor_count_exact(x in arb_seq(200)) {
            let n = neighbors(&x, Alphabet::dna());
            prop_assert_eq!(n.len(), neighbor_count(x.len(), Alphabet::dna()));
            let n5 = neighbors(&x, Alphabet::dna_n());
            prop_assert_eq!(n5.len(), neighbor_count(x.len(), Alphabet::dna_n()));
        }

        #[test]
        fn prop_neighbor_symmetry(x in arb_seq(12)) {
            let n = neighbors(&x, Alphabet::dna());
            for y in n.members() {
                prop_assert_eq!(hamming_distance(&x, y).unwrap(), 1);
                let back = neighbors(y, Alphabet::dna());
                prop_assert!(back.members().contains(&x));
            }
        }

        #[test]
        fn prop_hamming_is_a_metric((a, b) in arb_pair(24), c in proptest::collection::vec(0u8..4, 24)) {
            let c = Sequence::from_codes(c, Alphabet::dna()).unwrap();
            let dab = hamming_distance(&a, &b).unwrap();
            let dba = hamming_distance(&b, &a).unwrap();
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(dab == 0, a == b);
            let dac = hamming_distance(&a, &c).unwrap();
            let dcb = hamming_distance(&c, &b).unwrap();
            prop_assert!(dab <= dac + dcb);
        }

        #[test]
        fn prop_hamming_path_structure((a, b) in arb_pair(16)) {
            let d = hamming_distance(&a, &b).unwrap();
            let path = hamming_path(&a, &b, SiteOrder::LeftToRight).unwrap();
            prop_assert_eq!(path.len(), d + 1);
            prop_assert_eq!(path.first().unwrap(), &a);
            prop_assert_eq!(path.last().unwrap(), &b);
            for w in path.windows(2) {
                prop_assert_eq!(hamming_distance(&w[0], &w[1]).unwrap(), 1);
            }
        }
    }
}
