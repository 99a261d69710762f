//! Coset transversals `X = ⊔ r·φ(C)` for an embedded edge group `C`.
//!
//! The representative of a coset is its least element, where elements are
//! ordered by normal-form length and then lexicographically (for dihedral
//! groups: `m·|p| + |W|`, then `p`, then `W`, on the `Δ^p·W` form). For an
//! infinite cyclic edge group `⟨e⟩` and a homomorphism `h: X → ℤ` with letter
//! weights in `{-1, 0, 1}` and `h(e) ≠ 0`, the least element of `z·⟨e⟩` has
//! `|h(z) + j·h(e)| ≤ len(z)`, so a finite window of exponents `j` suffices.

use std::cmp::Ordering;

use super::garside::DihedralState;
use super::GroupDescription;
use crate::error::{Error, Result};
use crate::word::ElementWord;

#[derive(Clone, Debug)]
pub struct Transversal {
    x: GroupDescription,
    c: GroupDescription,
    images: Vec<ElementWord>,
    strategy: Strategy,
}

#[derive(Clone, Debug)]
enum Strategy {
    TrivialEdge,
    /// `X` is cyclic on generator 0 and `φ(c) = x^q`.
    CyclicPower { q: i64, modulus: Option<u64> },
    HeightWindow { weights: Vec<i64>, he: i64 },
    /// Free `X` with `φ(c)` in the commutator subgroup: `|z·e^j| ≤ |z|` forces `|j| ≤ 2|z|`.
    FreeWindow,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (mut t, mut nt, mut r, mut nr) = (0i64, 1i64, n, a.rem_euclid(n));
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(n))
}

impl Transversal {
    /// `images[i]` is the image of the `i`-th generator of `c`, as a word over `x`.
    pub fn new(x: GroupDescription, c: GroupDescription, images: Vec<ElementWord>) -> Result<Self> {
        if images.len() != c.alphabet().len() {
            return Err(Error::invalid("embedding must give one image per edge-group generator"));
        }
        let strategy = if c.alphabet().is_empty() || c.is_trivial_group() {
            Strategy::TrivialEdge
        } else if c.alphabet().len() == 1 && c.is_cyclic_group() {
            let e = x.normalize(&images[0])?;
            if e.is_identity() {
                return Err(Error::invalid("edge embedding sends the edge generator to the identity"));
            }
            match x.cyclic_structure() {
                Some(modulus) => {
                    let q = e.exponent_sum(0);
                    let q = match modulus {
                        Some(n) => q.rem_euclid(n as i64),
                        None => q,
                    };
                    Strategy::CyclicPower { q, modulus }
                }
                None => {
                    let homs = x.weight_homomorphisms();
                    let pick = homs.iter().find_map(|w| {
                        let he = weigh(w, &e);
                        (he != 0).then(|| (w.clone(), he))
                    });
                    match pick {
                        Some((weights, he)) => Strategy::HeightWindow { weights, he },
                        None if matches!(x.spec(), super::GroupSpec::Free { .. }) => Strategy::FreeWindow,
                        None => {
                            return Err(Error::UnsupportedMembership(format!(
                                "no integer-valued homomorphism detects the edge image {}",
                                x.render(&e)
                            )))
                        }
                    }
                }
            }
        } else {
            return Err(Error::UnsupportedMembership(
                "edge groups must be trivial or cyclic".to_string(),
            ));
        };
        Ok(Transversal {
            x,
            c,
            images,
            strategy,
        })
    }

    pub fn vertex_group(&self) -> &GroupDescription {
        &self.x
    }

    pub fn edge_group(&self) -> &GroupDescription {
        &self.c
    }

    pub fn images(&self) -> &[ElementWord] {
        &self.images
    }

    /// `φ(c)` as an (unnormalized) word over `x`.
    pub fn embed(&self, c: &ElementWord) -> ElementWord {
        c.substitute(&self.images)
    }

    /// Finite index `[X : φ(C)]` when known.
    pub fn index(&self) -> Option<u64> {
        match &self.strategy {
            Strategy::TrivialEdge => self.x.order(),
            Strategy::CyclicPower { q, modulus } => match modulus {
                None => Some(q.unsigned_abs()),
                Some(n) => Some(gcd(*q, *n as i64) as u64),
            },
            Strategy::HeightWindow { .. } | Strategy::FreeWindow => None,
        }
    }

    pub fn is_trivial_edge(&self) -> bool {
        matches!(self.strategy, Strategy::TrivialEdge)
    }

    /// Distinct coset representatives: all of them when the index is finite,
    /// otherwise those of elements spelled with at most `rho` letters.
    /// The flag is true iff the list is complete.
    pub fn sample_reps(&self, rho: usize) -> Result<(Vec<ElementWord>, bool)> {
        if let Strategy::CyclicPower { .. } = self.strategy {
            if let Some(d) = self.index() {
                let reps = (0..d as i64)
                    .map(|r| self.x.normalize(&ElementWord::gen_pow(0, r)))
                    .collect::<Result<Vec<_>>>()?;
                return Ok((reps, true));
            }
        }
        let finite = matches!(self.strategy, Strategy::TrivialEdge) && self.x.order().is_some();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut frontier = vec![ElementWord::identity()];
        let mut depth = 0;
        loop {
            let mut next = Vec::new();
            for w in frontier {
                let (rep, _) = self.decompose(&w)?;
                let fresh = seen.insert(rep.clone());
                if fresh {
                    out.push(rep);
                }
                // Finite groups prune by element; otherwise every word is extended.
                if fresh || !finite {
                    next.push(w);
                }
            }
            if next.is_empty() || (!finite && depth == rho) {
                break;
            }
            frontier = next
                .iter()
                .flat_map(|w| {
                    (0..self.x.rank()).flat_map(move |g| {
                        [false, true].into_iter().map(move |inv| {
                            let mut v = w.clone();
                            v.push_letter(crate::word::Letter::new(g, inv));
                            v
                        })
                    })
                })
                .collect();
            depth += 1;
        }
        Ok((out, finite))
    }

    pub fn contains(&self, z: &ElementWord) -> Result<bool> {
        Ok(self.decompose(z)?.0.is_identity())
    }

    /// `z = rep · φ(c)` with `rep` the canonical coset representative (in normal form).
    pub fn decompose(&self, z: &ElementWord) -> Result<(ElementWord, ElementWord)> {
        match &self.strategy {
            Strategy::TrivialEdge => Ok((self.x.normalize(z)?, ElementWord::identity())),
            Strategy::CyclicPower { q, modulus } => {
                let nz = self.x.normalize(z)?;
                let k = nz.exponent_sum(0);
                let (r, j) = match modulus {
                    None => {
                        let r = k.rem_euclid(q.abs());
                        (r, (k - r) / q)
                    }
                    Some(n) => {
                        let n = *n as i64;
                        let d = gcd(*q, n);
                        let r = k.rem_euclid(d);
                        let inv = mod_inverse(q / d, n / d).unwrap_or(0);
                        (r, ((k - r) / d * inv).rem_euclid((n / d).max(1)))
                    }
                };
                let rep = self.x.normalize(&ElementWord::gen_pow(0, r))?;
                let c = self.c.normalize(&ElementWord::gen_pow(0, j))?;
                Ok((rep, c))
            }
            Strategy::HeightWindow { .. } | Strategy::FreeWindow => {
                let e = &self.images[0];
                let nz = self.x.normalize(z)?;
                let (lo, hi) = match &self.strategy {
                    Strategy::HeightWindow { weights, he } => {
                        if let Some(m) = self.x.dihedral_label() {
                            return self.decompose_dihedral(m, z, weights, *he);
                        }
                        window(weigh(weights, &nz), *he, nz.len() as i64)
                    }
                    _ => (-2 * nz.len() as i64, 2 * nz.len() as i64),
                };
                let mut best: Option<(ElementWord, i64)> = None;
                for j in lo..=hi {
                    let cand = self.x.normalize(&nz.mul(&e.pow(j)))?;
                    let better = match &best {
                        None => true,
                        Some((b, _)) => cand.shortlex_cmp(b) == Ordering::Less,
                    };
                    if better {
                        best = Some((cand, j));
                    }
                }
                let (rep, j) = best.expect("window contains j = 0");
                Ok((rep, self.c.normalize(&ElementWord::gen_pow(0, -j))?))
            }
        }
    }

    fn decompose_dihedral(&self, m: usize, z: &ElementWord, weights: &[i64], he: i64) -> Result<(ElementWord, ElementWord)> {
        let e = &self.images[0];
        let mut state = DihedralState::new(m);
        state.push_word(z);
        let hz = weigh(weights, z);
        let (lo, hi) = window(hz, he, state.key_len() as i64);
        state.push_word(&e.pow(lo));
        let mut best = (state.clone(), lo);
        for j in lo + 1..=hi {
            state.push_word(e);
            if state.key_cmp(&best.0) == Ordering::Less {
                best = (state.clone(), j);
            }
        }
        let rep = best.0.canonical_word();
        Ok((rep, self.c.normalize(&ElementWord::gen_pow(0, -best.1))?))
    }
}

pub(crate) fn weigh(weights: &[i64], w: &ElementWord) -> i64 {
    w.syllables().iter().map(|&(g, e)| weights[g] * e).sum()
}

/// Exponents `j` with `|hz + j·he| ≤ bound`, ascending.
fn window(hz: i64, he: i64, bound: i64) -> (i64, i64) {
    let (a, b) = if he > 0 {
        (-bound - hz, bound - hz)
    } else {
        (bound - hz, -bound - hz)
    };
    (div_ceil(a, he), div_floor(b, he))
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_bounds_are_exact() {
        for he in [-3i64, -1, 1, 2, 5] {
            for hz in -7..=7 {
                for bound in 0..6 {
                    let (lo, hi) = window(hz, he, bound);
                    for j in -20..=20 {
                        let inside = (hz + j * he).abs() <= bound;
                        assert_eq!(inside, lo <= j && j <= hi, "he={he} hz={hz} bound={bound} j={j}");
                    }
                }
            }
        }
    }
}
