//! Fox free differential calculus, Burau matrices of braid words, their mod-2
//! reduction, and the determinant certificate for the lower-right block that
//! underpins the crossing-change transversality argument.

use crate::braid::{BraidError, BraidWord, FreeWord, Permutation};
use crate::linalg::Mat;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FoxError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("normal-form search failed after visiting {visited} states")]
    NormalFormSearchFailed { visited: usize },
}

/// Element of the integral group ring of the free group: a finite map from
/// freely reduced words to nonzero integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<FreeWord, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement::default()
    }

    pub fn one() -> Self {
        GroupRingElement::monomial(FreeWord::identity(), 1)
    }

    pub fn monomial(word: FreeWord, coeff: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert(word, coeff);
        }
        GroupRingElement { terms }
    }

    pub fn terms(&self) -> &BTreeMap<FreeWord, i64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: FreeWord, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn add(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> GroupRingElement {
        GroupRingElement {
            terms: self.terms.iter().map(|(w, &c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (u, &a) in &self.terms {
            for (v, &b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Ring map sending every generator to t: each word contributes its total
    /// exponent as a power of t.
    pub fn abelianized(&self) -> Laurent {
        let mut out = Laurent::zero();
        for (w, &c) in &self.terms {
            out.add_coeff(w.total_exponent() as i32, c);
        }
        out
    }
}

/// Fox derivative of a freely reduced word with respect to generator `j`.
///
/// Characterized by d(x_i)/d(x_j) = delta_ij, d(uv) = du + u dv, and
/// d(x^{-1}) = -x^{-1} d(x).
pub fn fox_derivative(w: &FreeWord, j: usize) -> GroupRingElement {
    let mut out = GroupRingElement::zero();
    let mut prefix = FreeWord::identity();
    for &(g, e) in w.letters() {
        if g == j {
            if e == 1 {
                out.add_term(prefix.clone(), 1);
            } else {
                out.add_term(prefix.concat(&FreeWord::from_letters(vec![(g, -1)])), -1);
            }
        }
        prefix = prefix.concat(&FreeWord::from_letters(vec![(g, e)]));
    }
    out
}

/// Laurent polynomial in t with integer coefficients, keyed by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Laurent {
    coeffs: BTreeMap<i32, i64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_coeff(0, c);
        l
    }

    pub fn add_coeff(&mut self, exp: i32, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.coeffs.remove(&exp);
        }
    }

    /// Exact evaluation at t = -1.
    pub fn eval_neg1(&self) -> i64 {
        self.coeffs
            .iter()
            .map(|(&e, &c)| if e.rem_euclid(2) == 0 { c } else { -c })
            .sum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&e, &c)| c as f64 * t.powi(e))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl std::fmt::Display for Laurent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, &c) in &self.coeffs {
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (e, mag) {
                (0, m) => write!(f, "{}", m)?,
                (1, 1) => write!(f, "t")?,
                (1, m) => write!(f, "{}*t", m)?,
                (_, 1) => write!(f, "t^{}", e)?,
                (_, m) => write!(f, "{}*t^{}", m, e)?,
            }
        }
        Ok(())
    }
}

/// Burau matrix of a braid word: entry (i, j) is the Fox derivative of the
/// image of x_i under the word's automorphism, abelianized to a Laurent
/// polynomial in t.
#[derive(Clone, Debug, PartialEq)]
pub struct BurauMatrix {
    n: usize,
    entries: Vec<Laurent>,
}

impl BurauMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i * self.n + j]
    }

    /// Exact integer evaluation at t = -1, row-major.
    pub fn eval_neg1(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j).eval_neg1()).collect())
            .collect()
    }

    pub fn eval(&self, t: f64) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.entry(i, j).eval(t);
            }
        }
        m
    }
}

pub fn burau(b: &BraidWord) -> BurauMatrix {
    let n = b.strand_count();
    let mut entries = Vec::with_capacity(n * n);
    for i in 1..=n {
        let image = b.automorphism_image(&FreeWord::generator(i));
        for j in 1..=n {
            entries.push(fox_derivative(&image, j).abelianized());
        }
    }
    BurauMatrix { n, entries }
}

/// Bit matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.cols + j] = v;
    }

    /// Matrix with a single 1 per row at column perm(i).
    pub fn permutation_matrix(p: &Permutation) -> Self {
        let n = p.size();
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 1..=n {
            m.set(i - 1, p.apply(i) - 1, true);
        }
        m
    }

    /// Determinant over GF(2) by Gaussian elimination.
    pub fn det(&self) -> u8 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col));
            let Some(pivot) = pivot else { return 0 };
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(pivot, j), a.get(col, j));
                    a.set(pivot, j, y);
                    a.set(col, j, x);
                }
            }
            for r in col + 1..n {
                if a.get(r, col) {
                    for j in col..n {
                        let v = a.get(r, j) ^ a.get(col, j);
                        a.set(r, j, v);
                    }
                }
            }
        }
        1
    }
}

impl std::fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j) as u8)?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Burau matrix at t = -1 reduced mod 2; equals the permutation matrix of the
/// inverse braid permutation.
pub fn burau_mod2(b: &BraidWord) -> Gf2Matrix {
    let ints = burau(b).eval_neg1();
    let n = b.strand_count();
    let mut m = Gf2Matrix::zeros(n, n);
    for (i, row) in ints.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m.set(i, j, v.rem_euclid(2) == 1);
        }
    }
    m
}

/// The interval normal form (1, 3, 4, ..., k)(2, k+1, ..., n) determined by
/// the size of the cycle containing strand 1.
fn interval_normal_form(n: usize, m1: usize) -> Permutation {
    let first: Vec<usize> = if m1 == 1 {
        vec![1]
    } else {
        let mut c = vec![1];
        c.extend(3..=m1 + 1);
        c
    };
    let second: Vec<usize> = if m1 == 1 {
        (2..=n).collect()
    } else {
        let mut c = vec![2];
        c.extend(m1 + 2..=n);
        c
    };
    let mut images = vec![0usize; n];
    for cycle in [first, second] {
        let len = cycle.len();
        for (t, &s) in cycle.iter().enumerate() {
            images[s - 1] = cycle[(t + 1) % len];
        }
    }
    Permutation::from_images(images)
}

/// Breadth-first search for a conjugating word xi, built from positive
/// generators, such that the permutation of xi^{-1} b xi is the interval
/// normal form. Conjugation by a generator acts on permutations by
/// conjugation with the corresponding transposition.
fn normal_form_conjugator(b: &BraidWord) -> Result<BraidWord, FoxError> {
    let n = b.strand_count();
    let start = b.permutation();
    let cycles = start.cycles();
    if cycles.len() != 2 {
        return Err(BraidError::NotTwoComponents {
            cycles: cycles.len(),
        }
        .into());
    }
    let m1 = cycles.iter().find(|c| c.contains(&1)).unwrap().len();
    let target = interval_normal_form(n, m1);

    let key = |p: &Permutation| -> Vec<usize> { (1..=n).map(|i| p.apply(i)).collect() };
    let conj = |p: &Permutation, g: usize| -> Permutation {
        // t o p o t for the transposition t = (g, g+1)
        let t = |v: usize| {
            if v == g {
                g + 1
            } else if v == g + 1 {
                g
            } else {
                v
            }
        };
        Permutation::from_images((1..=n).map(|i| t(p.apply(t(i)))).collect())
    };

    let mut cap = 1usize;
    for f in 1..=n {
        cap = cap.saturating_mul(f);
    }
    let mut queue = std::collections::VecDeque::new();
    let mut seen = std::collections::HashMap::new();
    queue.push_back(start.clone());
    seen.insert(key(&start), (0usize, Vec::<usize>::new()));
    while let Some(p) = queue.pop_front() {
        let path = seen.get(&key(&p)).unwrap().1.clone();
        if key(&p) == key(&target) {
            let text: Vec<String> = path.iter().map(|g| g.to_string()).collect();
            let xi = BraidWord::parse(&text.join(" "), Some(n)).expect("generator word");
            return Ok(xi);
        }
        if seen.len() > cap {
            return Err(FoxError::NormalFormSearchFailed {
                visited: seen.len(),
            });
        }
        for g in 1..n {
            let q = conj(&p, g);
            if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key(&q)) {
                let mut next = path.clone();
                next.push(g);
                slot.insert((0, next));
                queue.push_back(q);
            }
        }
    }
    Err(FoxError::NormalFormSearchFailed {
        visited: seen.len(),
    })
}

/// Result of the 1 - D invertibility check.
#[derive(Clone, Debug)]
pub struct DBlockCertificate {
    pub is_invertible: bool,
    pub det_mod2: u8,
    /// Integer determinant of 1 - D; `None` if the fraction-free elimination
    /// overflowed (diagnostic only, the mod-2 value is the certificate).
    pub det: Option<i64>,
    /// The conjugating word used to reach the interval normal form.
    pub conjugator: BraidWord,
    /// The conjugated braid whose Burau matrix supplied the block.
    pub normal_form: BraidWord,
}

/// Fraction-free (Bareiss) determinant over the integers with overflow
/// detection.
fn int_det(mut a: Vec<Vec<i128>>) -> Option<i128> {
    let n = a.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| a[r][k] != 0)?;
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = a[i][j].checked_mul(a[k][k])?;
                let t2 = a[i][k].checked_mul(a[k][j])?;
                a[i][j] = t1.checked_sub(t2)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

/// Conjugate the braid to interval normal form, extract the lower-right
/// (n-2)x(n-2) block D of its Burau matrix at t = -1, and certify that 1 - D
/// is invertible.
pub fn d_block_certificate(b: &BraidWord) -> Result<DBlockCertificate, FoxError> {
    let xi = normal_form_conjugator(b)?;
    let normal_form = b.markov_conjugate(&xi).expect("same strand count");
    let n = b.strand_count();
    let ints = burau(&normal_form).eval_neg1();

    let d = n.saturating_sub(2);
    // 1 - D over the integers
    let mut one_minus_d = vec![vec![0i128; d]; d];
    for i in 0..d {
        for j in 0..d {
            let v = -ints[i + 2][j + 2] as i128;
            one_minus_d[i][j] = if i == j { 1 + v } else { v };
        }
    }
    let det = int_det(one_minus_d);

    let mut gf2 = Gf2Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v = ints[i + 2][j + 2];
            let bit = v.rem_euclid(2) == 1;
            gf2.set(i, j, if i == j { !bit } else { bit });
        }
    }
    let det_mod2 = gf2.det();

    let is_invertible = det_mod2 == 1 || det.is_some_and(|v| v != 0);
    let det = det.and_then(|v| i64::try_from(v).ok());
    Ok(DBlockCertificate {
        is_invertible,
        det_mod2,
        det,
        conjugator: xi,
        normal_form,
    })
}
