//! Braid words as free-group automorphisms, their permutations and cycles,
//! Markov moves, sign-vector selection, and the combinatorial linking-number
//! oracle for two-component closures.
//!
//! Conventions. A braid word is a sequence of letters read left to right; the
//! word `a b` acts on free words and on representation tuples as "apply `b`
//! first, then `a`", so that the word map is a homomorphism of concatenation.
//! The generator rule is
//!
//! ```text
//! sigma_i:  x_i     -> x_{i+1}
//!           x_{i+1} -> x_{i+1}^{-1} x_i x_{i+1}
//!           x_j     -> x_j                        (j != i, i+1)
//! ```
//!
//! Strand and generator indices are 1-based throughout the public API.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("malformed braid token {token:?}")]
    MalformedToken { token: String },
    #[error("generator index 0 is not valid")]
    ZeroIndex,
    #[error("explicit strand count {given} is smaller than required {required}")]
    StrandCountTooSmall { given: usize, required: usize },
    #[error("closure has {cycles} components, expected 2")]
    NotTwoComponents { cycles: usize },
    #[error("strand counts differ: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("sign vector does not satisfy the cycle condition for this braid")]
    InvalidEpsilon,
}

/// One letter of a braid word: generator index in `1..=n-1` and a sign.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidLetter {
    pub index: usize,
    pub sign: i8,
}

/// A word in the braid group on `n` strands. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    n: usize,
    letters: Vec<BraidLetter>,
}

impl BraidWord {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "strand count must be at least 2");
        BraidWord {
            n,
            letters: Vec::new(),
        }
    }

    pub fn new(n: usize, letters: Vec<BraidLetter>) -> Self {
        assert!(n >= 2, "strand count must be at least 2");
        for l in &letters {
            assert!(l.index >= 1 && l.index < n, "generator index out of range");
            assert!(l.sign == 1 || l.sign == -1);
        }
        BraidWord { n, letters }
    }

    /// Parse whitespace-separated signed generator indices: "1 1" is
    /// sigma_1^2, "-2" is sigma_2^{-1}. The strand count defaults to one more
    /// than the largest index used (at least 2) unless given explicitly.
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self, BraidError> {
        let mut letters = Vec::new();
        let mut max_index = 0usize;
        for token in text.split_whitespace() {
            let v: i64 = token.parse().map_err(|_| BraidError::MalformedToken {
                token: token.to_string(),
            })?;
            if v == 0 {
                return Err(BraidError::ZeroIndex);
            }
            let index = v.unsigned_abs() as usize;
            max_index = max_index.max(index);
            letters.push(BraidLetter {
                index,
                sign: if v > 0 { 1 } else { -1 },
            });
        }
        let required = (max_index + 1).max(2);
        let n = match strands {
            Some(given) if given < required => {
                return Err(BraidError::StrandCountTooSmall { given, required });
            }
            Some(given) => given,
            None => required,
        };
        Ok(BraidWord { n, letters })
    }

    pub fn strand_count(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Inverse word: letters reversed with signs flipped.
    pub fn inverse(&self) -> BraidWord {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| BraidLetter {
                index: l.index,
                sign: -l.sign,
            })
            .collect();
        BraidWord { n: self.n, letters }
    }

    /// Concatenation: the result acts as `self` after `other`.
    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.n != other.n {
            return Err(BraidError::StrandMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { n: self.n, letters })
    }

    /// Type 1 Markov move: the word `xi^{-1} self xi` in the same braid group.
    pub fn markov_conjugate(&self, xi: &BraidWord) -> Result<BraidWord, BraidError> {
        xi.inverse().concat(self)?.concat(xi)
    }

    /// Type 2 Markov move: the word `sigma_n^{sign} self` on n+1 strands.
    pub fn markov_stabilize(&self, sign: i8) -> BraidWord {
        assert!(sign == 1 || sign == -1);
        let mut letters = vec![BraidLetter {
            index: self.n,
            sign,
        }];
        letters.extend_from_slice(&self.letters);
        BraidWord {
            n: self.n + 1,
            letters,
        }
    }

    /// Image of a free word under the automorphism this braid word represents.
    /// The result is freely reduced.
    pub fn automorphism_image(&self, w: &FreeWord) -> FreeWord {
        let mut w = w.clone();
        for l in self.letters.iter().rev() {
            w = apply_generator(*l, &w);
        }
        w
    }

    /// Image of the braid in the symmetric group, tracing each strand from
    /// its starting position at the top to its position at the bottom.
    pub fn permutation(&self) -> Permutation {
        let mut images: Vec<usize> = (1..=self.n).collect();
        for l in &self.letters {
            let a = images.iter().position(|&v| v == l.index).unwrap();
            let b = images.iter().position(|&v| v == l.index + 1).unwrap();
            images.swap(a, b);
        }
        Permutation { images }
    }
}

impl std::fmt::Display for BraidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", l.index as i64 * l.sign as i64)?;
        }
        Ok(())
    }
}

/// Generator rule for one letter, substituted into every letter of `w`.
fn apply_generator(l: BraidLetter, w: &FreeWord) -> FreeWord {
    let i = l.index;
    let mut out = FreeWord::identity();
    for &(g, e) in &w.letters {
        let image = if l.sign == 1 {
            // x_i -> x_{i+1},  x_{i+1} -> x_{i+1}^{-1} x_i x_{i+1}
            if g == i {
                FreeWord::generator(i + 1)
            } else if g == i + 1 {
                FreeWord::from_letters(vec![(i + 1, -1), (i, 1), (i + 1, 1)])
            } else {
                FreeWord::generator(g)
            }
        } else {
            // inverse rule: x_i -> x_i x_{i+1} x_i^{-1},  x_{i+1} -> x_i
            if g == i {
                FreeWord::from_letters(vec![(i, 1), (i + 1, 1), (i, -1)])
            } else if g == i + 1 {
                FreeWord::generator(i)
            } else {
                FreeWord::generator(g)
            }
        };
        let image = if e == 1 { image } else { image.inverse() };
        out = out.concat(&image);
    }
    out
}

/// A freely reduced word in the free group; letters are (generator, ±1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct FreeWord {
    letters: Vec<(usize, i8)>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord {
            letters: Vec::new(),
        }
    }

    pub fn generator(i: usize) -> Self {
        assert!(i >= 1);
        FreeWord {
            letters: vec![(i, 1)],
        }
    }

    /// Build from raw letters, freely reducing.
    pub fn from_letters(letters: Vec<(usize, i8)>) -> Self {
        let mut out: Vec<(usize, i8)> = Vec::with_capacity(letters.len());
        for (g, e) in letters {
            assert!(g >= 1 && (e == 1 || e == -1));
            if let Some(&(lg, le)) = out.last() {
                if lg == g && le == -e {
                    out.pop();
                    continue;
                }
            }
            out.push((g, e));
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        for &(g, e) in &other.letters {
            if let Some(&(lg, le)) = letters.last() {
                if lg == g && le == -e {
                    letters.pop();
                    continue;
                }
            }
            letters.push((g, e));
        }
        FreeWord { letters }
    }

    /// Exponent sum of generator `j`, i.e. the abelianized coefficient.
    pub fn exponent_sum(&self, j: usize) -> i64 {
        self.letters
            .iter()
            .filter(|&&(g, _)| g == j)
            .map(|&(_, e)| e as i64)
            .sum()
    }

    /// Total exponent sum over all generators.
    pub fn total_exponent(&self) -> i64 {
        self.letters.iter().map(|&(_, e)| e as i64).sum()
    }

    /// The product word x_1 x_2 ... x_n.
    pub fn full_product(n: usize) -> FreeWord {
        FreeWord {
            letters: (1..=n).map(|g| (g, 1)).collect(),
        }
    }
}

impl std::fmt::Display for FreeWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(g, e) in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", g)?;
            } else {
                write!(f, "x{}^-1", g)?;
            }
        }
        Ok(())
    }
}

/// A permutation of {1..n}; `images[s-1]` is where strand `s` ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            assert!(v >= 1 && v <= n && !seen[v - 1], "not a permutation");
            seen[v - 1] = true;
        }
        Permutation { images }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Cycle partition, each cycle in orbit order starting from its minimum,
    /// cycles sorted by their minima.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur - 1] {
                seen[cur - 1] = true;
                cycle.push(cur);
                cur = self.apply(cur);
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Map from strand to the index of its cycle in `cycles()` order.
    pub fn cycle_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.images.len()];
        for (c, cycle) in self.cycles().iter().enumerate() {
            for &s in cycle {
                ids[s - 1] = c;
            }
        }
        ids
    }
}

/// Per-strand signs in {±1}; valid for a two-component braid when the product
/// over each cycle of the braid permutation is -1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignVector {
    entries: Vec<i8>,
}

impl SignVector {
    pub fn ones(n: usize) -> Self {
        SignVector {
            entries: vec![1; n],
        }
    }

    pub fn from_entries(entries: Vec<i8>) -> Self {
        for &e in &entries {
            assert!(e == 1 || e == -1);
        }
        SignVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.entries[i - 1]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// The canonical valid choice: -1 exactly at the minimal strand of each
    /// cycle. Requires a two-component closure.
    pub fn canonical_for(braid: &BraidWord) -> Result<SignVector, BraidError> {
        let cycles = braid.permutation().cycles();
        if cycles.len() != 2 {
            return Err(BraidError::NotTwoComponents {
                cycles: cycles.len(),
            });
        }
        let mut entries = vec![1i8; braid.strand_count()];
        for cycle in cycles {
            let min = *cycle.iter().min().unwrap();
            entries[min - 1] = -1;
        }
        Ok(SignVector { entries })
    }

    /// The cycle condition: product of entries over each cycle equals -1,
    /// with exactly two cycles.
    pub fn is_valid_for(&self, braid: &BraidWord) -> bool {
        if self.entries.len() != braid.strand_count() {
            return false;
        }
        let cycles = braid.permutation().cycles();
        cycles.len() == 2
            && cycles
                .iter()
                .all(|cycle| cycle.iter().map(|&s| self.get(s) as i64).product::<i64>() == -1)
    }

    /// The braid-group action on sign vectors: (sigma eps)_i = eps_{sigma(i)}.
    pub fn permuted_by(&self, p: &Permutation) -> SignVector {
        let entries = (1..=self.entries.len())
            .map(|i| self.get(p.apply(i)))
            .collect();
        SignVector { entries }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SignVector) -> SignVector {
        assert_eq!(self.entries.len(), other.entries.len());
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .collect();
        SignVector { entries }
    }
}

/// Linking number of the two components of the closure: half the signed count
/// of crossings between strands belonging to different cycles, the strands
/// being traced through the running permutation. Positive generators count as
/// positive crossings.
pub fn linking_number(braid: &BraidWord) -> Result<i64, BraidError> {
    let perm = braid.permutation();
    let cycles = perm.cycles();
    if cycles.len() != 2 {
        return Err(BraidError::NotTwoComponents {
            cycles: cycles.len(),
        });
    }
    let cycle_ids = perm.cycle_ids();
    // strand currently occupying each position, top to bottom
    let mut occupant: Vec<usize> = (1..=braid.strand_count()).collect();
    let mut total: i64 = 0;
    for l in braid.letters() {
        let a = occupant[l.index - 1];
        let b = occupant[l.index];
        if cycle_ids[a - 1] != cycle_ids[b - 1] {
            total += l.sign as i64;
        }
        occupant.swap(l.index - 1, l.index);
    }
    debug_assert!(
        total % 2 == 0,
        "inter-component crossing count must be even"
    );
    Ok(total / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_braid(
        rng: &mut ChaCha8Rng,
        n: usize,
        len: impl rand::distributions::uniform::SampleRange<usize>,
    ) -> BraidWord {
        let len = rng.gen_range(len);
        let letters = (0..len)
            .map(|_| BraidLetter {
                index: rng.gen_range(1..n),
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
            })
            .collect();
        BraidWord::new(n, letters)
    }

    fn random_word(
        rng: &mut ChaCha8Rng,
        n: usize,
        len: impl rand::distributions::uniform::SampleRange<usize>,
    ) -> FreeWord {
        let len = rng.gen_range(len);
        let letters = (0..len)
            .map(|_| {
                (
                    rng.gen_range(1..=n),
                    if rng.gen_bool(0.5) { 1i8 } else { -1 },
                )
            })
            .collect();
        FreeWord::from_letters(letters)
    }

    #[test]
    fn parse_basic_forms() {
        let b = BraidWord::parse("1 1", None).unwrap();
        assert_eq!(b.strand_count(), 2);
        assert_eq!(b.len(), 2);

        let id = BraidWord::parse("", Some(2)).unwrap();
        assert!(id.is_empty());
        assert_eq!(id.strand_count(), 2);

        let w = BraidWord::parse("1 -2 1 -2", None).unwrap();
        assert_eq!(w.strand_count(), 3);
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            BraidWord::parse("1 x", None),
            Err(BraidError::MalformedToken { .. })
        ));
        assert_eq!(BraidWord::parse("0", None), Err(BraidError::ZeroIndex));
        assert_eq!(
            BraidWord::parse("2", Some(2)),
            Err(BraidError::StrandCountTooSmall {
                given: 2,
                required: 3
            })
        );
    }

    #[test]
    fn generator_rule_on_generators() {
        let s1 = BraidWord::parse("1", None).unwrap();
        assert_eq!(
            s1.automorphism_image(&FreeWord::generator(1)),
            FreeWord::generator(2)
        );
        assert_eq!(
            s1.automorphism_image(&FreeWord::generator(2)),
            FreeWord::from_letters(vec![(2, -1), (1, 1), (2, 1)])
        );
    }

    #[test]
    fn automorphism_preserves_the_product_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.gen_range(2..=5);
            let b = random_braid(&mut rng, n, 0..=8);
            let product = FreeWord::full_product(n);
            assert_eq!(b.automorphism_image(&product), product);
        }
    }

    #[test]
    fn automorphism_respects_braid_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..40 {
            let n = rng.gen_range(3..=5);
            let i = rng.gen_range(1..n - 1);
            let lhs = BraidWord::parse(&format!("{} {} {}", i, i + 1, i), None).unwrap();
            let rhs = BraidWord::parse(&format!("{} {} {}", i + 1, i, i + 1), None).unwrap();
            let w = random_word(&mut rng, n, 0..=8);
            let lhs = BraidWord::new(n, lhs.letters().to_vec());
            let rhs = BraidWord::new(n, rhs.letters().to_vec());
            assert_eq!(lhs.automorphism_image(&w), rhs.automorphism_image(&w));
        }
    }

    #[test]
    fn image_of_generator_is_conjugate_shaped() {
        // abelianization of the image of x_i must be the single letter
        // x_{perm^{-1}(i)}
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let n = rng.gen_range(2..=5);
            let b = random_braid(&mut rng, n, 0..=10);
            let inv = b.permutation().inverse();
            for i in 1..=n {
                let image = b.automorphism_image(&FreeWord::generator(i));
                for j in 1..=n {
                    let expected = if j == inv.apply(i) { 1 } else { 0 };
                    assert_eq!(image.exponent_sum(j), expected);
                }
            }
        }
    }

    #[test]
    fn permutation_examples() {
        assert!(BraidWord::parse("1 1", None)
            .unwrap()
            .permutation()
            .is_identity());

        let p = BraidWord::parse("1", None).unwrap().permutation();
        assert_eq!(p.apply(1), 2);
        assert_eq!(p.apply(2), 1);

        // sigma_1 sigma_2 closes to a knot: a single 3-cycle
        let p = BraidWord::parse("1 2", None).unwrap().permutation();
        assert_eq!(p.cycles().len(), 1);
    }

    #[test]
    fn cycle_structure_examples() {
        let id2 = BraidWord::identity(2).permutation();
        assert_eq!(id2.cycles(), vec![vec![1], vec![2]]);

        let t = BraidWord::parse("1", None).unwrap().permutation();
        assert_eq!(t.cycles(), vec![vec![1, 2]]);

        let b = BraidWord::parse("1 1 3 3", None).unwrap();
        assert_eq!(
            b.permutation().cycles(),
            vec![vec![1], vec![2], vec![3], vec![4]]
        );
    }

    #[test]
    fn canonical_epsilon_examples() {
        let hopf = BraidWord::parse("1 1", None).unwrap();
        let eps = SignVector::canonical_for(&hopf).unwrap();
        assert_eq!(eps.entries(), &[-1, -1]);
        assert!(eps.is_valid_for(&hopf));

        let b = BraidWord::parse("1 1 2", None).unwrap();
        let eps = SignVector::canonical_for(&b).unwrap();
        assert_eq!(eps.entries(), &[-1, -1, 1]);
        assert!(eps.is_valid_for(&b));

        let knot = BraidWord::parse("1 2", None).unwrap();
        assert_eq!(
            SignVector::canonical_for(&knot),
            Err(BraidError::NotTwoComponents { cycles: 1 })
        );
    }

    #[test]
    fn canonical_epsilon_is_always_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut found = 0;
        while found < 50 {
            let n = rng.gen_range(2..=6);
            let b = random_braid(&mut rng, n, 0..=12);
            if b.permutation().cycles().len() != 2 {
                continue;
            }
            found += 1;
            let eps = SignVector::canonical_for(&b).unwrap();
            assert!(eps.is_valid_for(&b));
        }
    }

    #[test]
    fn linking_number_examples() {
        let hopf = BraidWord::parse("1 1", None).unwrap();
        assert_eq!(linking_number(&hopf).unwrap(), 1);

        for k in 1..=5 {
            let torus = BraidWord::parse(&"1 ".repeat(2 * k), None).unwrap();
            assert_eq!(linking_number(&torus).unwrap(), k as i64);
        }

        let unlink = BraidWord::identity(2);
        assert_eq!(linking_number(&unlink).unwrap(), 0);

        let knot = BraidWord::parse("1 2", None).unwrap();
        assert!(matches!(
            linking_number(&knot),
            Err(BraidError::NotTwoComponents { .. })
        ));
    }

    #[test]
    fn markov_moves_examples() {
        let hopf = BraidWord::parse("1 1", None).unwrap();
        let xi = BraidWord::parse("1", None).unwrap();
        let conj = hopf.markov_conjugate(&xi).unwrap();
        assert_eq!(conj.len(), 4);
        assert_eq!(
            conj.permutation().cycles().len(),
            hopf.permutation().cycles().len()
        );
        assert_eq!(
            hopf.markov_conjugate(&BraidWord::identity(2)).unwrap(),
            hopf
        );

        let stab = hopf.markov_stabilize(1);
        assert_eq!(stab.strand_count(), 3);
        assert_eq!(stab.to_string(), "2 1 1");
        assert_eq!(
            stab.permutation().cycles().len(),
            hopf.permutation().cycles().len()
        );

        let mismatch = hopf.markov_conjugate(&BraidWord::identity(3));
        assert!(matches!(mismatch, Err(BraidError::StrandMismatch { .. })));
    }

    #[test]
    fn linking_number_is_markov_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut found = 0;
        while found < 50 {
            let n = rng.gen_range(2..=5);
            let b = random_braid(&mut rng, n, 0..=10);
            if b.permutation().cycles().len() != 2 {
                continue;
            }
            found += 1;
            let lk = linking_number(&b).unwrap();

            let xi = random_braid(&mut rng, n, 0..=6);
            let conj = b.markov_conjugate(&xi).unwrap();
            assert_eq!(linking_number(&conj).unwrap(), lk);

            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let stab = b.markov_stabilize(sign);
            assert_eq!(linking_number(&stab).unwrap(), lk);
        }
    }

    #[test]
    fn braid_word_round_trips_through_display() {
        let b = BraidWord::parse("1 -2 1 -2", None).unwrap();
        assert_eq!(BraidWord::parse(&b.to_string(), Some(3)).unwrap(), b);
    }

    proptest! {
        #[test]
        fn free_words_stay_reduced(raw in proptest::collection::vec((1usize..5, prop_oneof![Just(1i8), Just(-1i8)]), 0..30)) {
            let w = FreeWord::from_letters(raw);
            for pair in w.letters().windows(2) {
                prop_assert!(!(pair[0].0 == pair[1].0 && pair[0].1 == -pair[1].1));
            }
        }

        #[test]
        fn concat_with_inverse_cancels(raw in proptest::collection::vec((1usize..5, prop_oneof![Just(1i8), Just(-1i8)]), 0..20)) {
            let w = FreeWord::from_letters(raw);
            prop_assert!(w.concat(&w.inverse()).is_empty());
        }

        #[test]
        fn permutation_of_inverse_word_is_inverse(letters in proptest::collection::vec((1usize..4, prop_oneof![Just(1i8), Just(-1i8)]), 0..12)) {
            let b = BraidWord::new(4, letters.into_iter().map(|(index, sign)| BraidLetter { index, sign }).collect());
            let p = b.permutation();
            let q = b.inverse().permutation();
            for i in 1..=4 {
                prop_assert_eq!(q.apply(p.apply(i)), i);
            }
        }
    }
}
