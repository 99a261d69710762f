//! Dihedral Artin groups `A(m) = ⟨a, b | aba… = bab…⟩` (both sides of length `m`).
//!
//! Every element is `Δ^p · W` with `Δ` the alternating word of length `m` and
//! `W` a positive word containing no alternating subword of length `m`; the
//! pair `(p, W)` is unique. Conjugation by `Δ` is the letter permutation `τ`
//! (swap for odd `m`, identity for even `m`), so `u Δ = Δ τ(u)`.
//!
//! Canonical words use the left fraction form `x^-1 y` with `x, y` positive
//! and no common left divisor, which keeps parabolic elements such as `a^-3`
//! spelled inside their parabolic.

use std::cmp::Ordering;

use crate::word::{ElementWord, Letter};

/// Incremental right-multiplication state for `Δ^inf · W`.
#[derive(Clone, Debug)]
pub struct DihedralState {
    m: usize,
    inf: i64,
    /// Stored letters of `W`; the actual letter is `raw ^ twist` when `m` is odd.
    raw: Vec<u8>,
    twist: u8,
    /// Length of the maximal alternating suffix of `W`.
    run: usize,
}

impl DihedralState {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "dihedral label must be at least 2");
        DihedralState {
            m,
            inf: 0,
            raw: Vec::new(),
            twist: 0,
            run: 0,
        }
    }

    pub fn delta_power(m: usize, p: i64) -> Self {
        let mut s = Self::new(m);
        s.inf = p;
        s
    }

    pub fn label(&self) -> usize {
        self.m
    }

    pub fn inf(&self) -> i64 {
        self.inf
    }

    fn odd(&self) -> bool {
        self.m % 2 == 1
    }

    fn actual(&self, i: usize) -> u8 {
        if self.odd() {
            self.raw[i] ^ self.twist
        } else {
            self.raw[i]
        }
    }

    fn store(&self, s: u8) -> u8 {
        if self.odd() {
            s ^ self.twist
        } else {
            s
        }
    }

    /// Apply `τ` to `W` in place.
    fn twist_w(&mut self) {
        if self.odd() {
            self.twist ^= 1;
        }
    }

    fn recompute_run(&mut self) {
        let n = self.raw.len();
        if n == 0 {
            self.run = 0;
            return;
        }
        let mut r = 1;
        while r < n && r < self.m && self.raw[n - r] != self.raw[n - r - 1] {
            r += 1;
        }
        self.run = r;
    }

    /// The actual letters of `W`.
    pub fn w(&self) -> Vec<u8> {
        (0..self.raw.len()).map(|i| self.actual(i)).collect()
    }

    pub fn w_len(&self) -> usize {
        self.raw.len()
    }

    pub fn push_positive(&mut self, s: u8) {
        let n = self.raw.len();
        let run = if n > 0 && self.actual(n - 1) != s { self.run + 1 } else { 1 };
        if run == self.m {
            // W = u·t with t·s = Δ, and u·Δ = Δ·τ(u).
            self.raw.truncate(n + 1 - self.m);
            self.inf += 1;
            self.twist_w();
            self.recompute_run();
        } else {
            let stored = self.store(s);
            self.raw.push(stored);
            self.run = run;
        }
    }

    pub fn push_negative(&mut self, s: u8) {
        let n = self.raw.len();
        if n > 0 && self.actual(n - 1) == s {
            self.raw.pop();
            self.recompute_run();
            return;
        }
        // W·s^-1 = W·r·Δ^-1 = Δ^-1·τ(W)·τ(r) where Δ = s·r.
        self.inf -= 1;
        self.twist_w();
        let first = tau(self.m, 1 - s);
        for i in 0..self.m - 1 {
            self.push_positive(if i % 2 == 0 { first } else { 1 - first });
        }
    }

    pub fn push(&mut self, l: Letter) {
        let s = l.gen() as u8;
        debug_assert!(s < 2);
        if l.is_inverse() {
            self.push_negative(s);
        } else {
            self.push_positive(s);
        }
    }

    pub fn push_word(&mut self, w: &ElementWord) {
        for l in w.letters() {
            self.push(l);
        }
    }

    /// Letter length of `Δ^inf·W` counted as `m·|inf| + |W|`.
    pub fn key_len(&self) -> usize {
        self.m * self.inf.unsigned_abs() as usize + self.raw.len()
    }

    /// Height: every generator maps to 1.
    pub fn height(&self) -> i64 {
        self.m as i64 * self.inf + self.raw.len() as i64
    }

    /// Total order on elements: by `key_len`, then `inf`, then `W` letters.
    pub fn key_cmp(&self, other: &DihedralState) -> Ordering {
        self.key_len()
            .cmp(&other.key_len())
            .then(self.inf.cmp(&other.inf))
            .then_with(|| {
                let (n1, n2) = (self.raw.len(), other.raw.len());
                for i in 0..n1.min(n2) {
                    let c = self.actual(i).cmp(&other.actual(i));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                n1.cmp(&n2)
            })
    }

    pub fn is_identity(&self) -> bool {
        self.inf == 0 && self.raw.is_empty()
    }

    /// Canonical word `x^-1 y` in the left fraction form.
    pub fn canonical_word(&self) -> ElementWord {
        let m = self.m;
        if self.inf >= 0 {
            return positive_word(m, self.inf as usize, &self.w());
        }
        let mut x = DihedralState::delta_power(m, -self.inf);
        let y = self.w();
        let mut start = 0;
        while start < y.len() {
            let s = y[start];
            if !x.left_divisible_by(s) {
                break;
            }
            x = x.left_divide(s);
            start += 1;
        }
        let xw = positive_word(m, x.inf as usize, &x.w());
        let mut out = xw.inverse();
        for &s in &y[start..] {
            out.push_syllable(s as usize, 1);
        }
        out
    }

    /// For positive elements only.
    fn left_divisible_by(&self, s: u8) -> bool {
        self.inf >= 1 || (!self.raw.is_empty() && self.actual(0) == s)
    }

    /// `s^-1 · self` for a positive element divisible by `s`.
    fn left_divide(&self, s: u8) -> DihedralState {
        let m = self.m;
        if self.inf >= 1 {
            // s^-1 Δ^k V = r Δ^(k-1) V = Δ^(k-1) τ^(k-1)(r) V with Δ = s·r.
            let k = self.inf - 1;
            let mut out = DihedralState::delta_power(m, k);
            let mut first = 1 - s;
            if k % 2 == 1 {
                first = tau(m, first);
            }
            for i in 0..m - 1 {
                out.push_positive(if i % 2 == 0 { first } else { 1 - first });
            }
            for t in self.w() {
                out.push_positive(t);
            }
            out
        } else {
            let mut out = DihedralState::new(m);
            for t in self.w().into_iter().skip(1) {
                out.push_positive(t);
            }
            out
        }
    }
}

fn tau(m: usize, s: u8) -> u8 {
    if m % 2 == 1 {
        1 - s
    } else {
        s
    }
}

/// Alternating word of length `len` starting with `first`.
pub fn alternating(first: usize, len: usize) -> ElementWord {
    let mut w = ElementWord::identity();
    for i in 0..len {
        w.push_syllable(if i % 2 == 0 { first } else { 1 - first }, 1);
    }
    w
}

/// `Δ^k` spelled as `k` copies of the alternating word starting with `a`, then `w`.
fn positive_word(m: usize, k: usize, w: &[u8]) -> ElementWord {
    let mut out = ElementWord::identity();
    let delta = alternating(0, m);
    for _ in 0..k {
        out.append(&delta);
    }
    for &s in w {
        out.push_syllable(s as usize, 1);
    }
    out
}

pub fn state_of(m: usize, w: &ElementWord) -> DihedralState {
    let mut s = DihedralState::new(m);
    s.push_word(w);
    s
}

pub fn normalize(m: usize, w: &ElementWord) -> ElementWord {
    state_of(m, w).canonical_word()
}

/// Left-greedy simple factors of the positive part `W` (consecutive factors
/// meet with equal letters: the last letter of one is the first of the next).
pub fn simple_factors(state: &DihedralState) -> (i64, Vec<Vec<u8>>) {
    let w = state.w();
    let mut factors: Vec<Vec<u8>> = Vec::new();
    for s in w {
        match factors.last_mut() {
            Some(f) if *f.last().unwrap() != s => f.push(s),
            _ => factors.push(vec![s]),
        }
    }
    (state.inf(), factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"])
    }

    #[test]
    fn braid_relation_identifies_words() {
        let a = ab();
        for m in 2..8 {
            let x = alternating(0, m);
            let y = alternating(1, m);
            assert_eq!(normalize(m, &x), normalize(m, &y), "m={m}");
            assert!(normalize(m, &x.mul(&y.inverse())).is_identity());
        }
        assert_eq!(normalize(3, &a.parse("aba").unwrap()), normalize(3, &a.parse("bab").unwrap()));
    }

    #[test]
    fn parabolic_powers_stay_in_parabolic() {
        let a = ab();
        for e in -5..=5 {
            let w = ElementWord::gen_pow(0, e);
            assert_eq!(normalize(3, &w), w);
        }
        assert_eq!(normalize(4, &a.parse("b^-2").unwrap()), a.parse("b^-2").unwrap());
    }

    #[test]
    fn delta_is_quasi_central() {
        let a = ab();
        // a Δ = Δ b for m = 3; a Δ = Δ a for m = 4.
        let lhs = a.parse("a aba").unwrap();
        let rhs = a.parse("aba b").unwrap();
        assert_eq!(normalize(3, &lhs), normalize(3, &rhs));
        let lhs = a.parse("a abab").unwrap();
        let rhs = a.parse("abab a").unwrap();
        assert_eq!(normalize(4, &lhs), normalize(4, &rhs));
    }

    #[test]
    fn canonical_word_is_reduced_and_equivalent() {
        let a = ab();
        let w = a.parse("a^-1 b^2 a^-3 b a").unwrap();
        let c = normalize(3, &w);
        assert!(normalize(3, &c.mul(&w.inverse())).is_identity());
        assert_eq!(normalize(3, &c), c);
    }

    #[test]
    fn height_counts_exponent_sum() {
        let a = ab();
        let w = a.parse("a b^-1 a^3 b").unwrap();
        assert_eq!(state_of(5, &w).height(), w.total_exponent());
    }

    #[test]
    fn simple_factors_chain() {
        let a = ab();
        let s = state_of(5, &a.parse("ab bab").unwrap());
        let (p, f) = simple_factors(&s);
        assert_eq!(p, 0);
        assert_eq!(f, vec![vec![0, 1], vec![1, 0, 1]]);
        for pair in f.windows(2) {
            assert_eq!(pair[0].last(), pair[1].first());
        }
    }
}
