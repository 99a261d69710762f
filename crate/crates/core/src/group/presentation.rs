//! Finite presentations, Reidemeister–Schreier for cyclic quotients, Tietze moves.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::smith::{smith, Smith};
use crate::word::{Alphabet, ElementWord, Letter};

pub const TIETZE_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitePresentation {
    pub generators: Alphabet,
    pub relators: Vec<ElementWord>,
}

/// Homomorphism onto `ℤ/modulus` given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicQuotient {
    pub images: Vec<i64>,
    pub modulus: u64,
}

impl CyclicQuotient {
    pub fn image(&self, w: &ElementWord) -> i64 {
        let n = self.modulus as i64;
        w.syllables()
            .iter()
            .map(|&(g, e)| self.images[g] * e)
            .sum::<i64>()
            .rem_euclid(n)
    }
}

/// Kernel presentation together with the data needed to rewrite words into it.
#[derive(Clone, Debug)]
pub struct SchreierResult {
    pub presentation: FinitePresentation,
    /// Index of the kernel (size of the image).
    pub index: usize,
    /// `gen_of[(coset, g)]`: Schreier generator index of `rep(coset)·g·rep(coset·g)^-1`,
    /// or `None` when it is freely trivial (a tree edge).
    gen_of: HashMap<(usize, usize), Option<usize>>,
    coset_of: HashMap<i64, usize>,
    quotient: CyclicQuotient,
}

impl SchreierResult {
    /// Rewrite a word lying in the kernel into the Schreier generators.
    pub fn rewrite(&self, w: &ElementWord) -> Option<ElementWord> {
        rewrite(&self.gen_of, &self.coset_of, &self.quotient, 0, w).and_then(|(out, end)| (end == 0).then_some(out))
    }
}

fn rewrite(
    gen_of: &HashMap<(usize, usize), Option<usize>>,
    coset_of: &HashMap<i64, usize>,
    q: &CyclicQuotient,
    start: usize,
    w: &ElementWord,
) -> Option<(ElementWord, usize)> {
    let n = q.modulus as i64;
    let value: HashMap<usize, i64> = coset_of.iter().map(|(&v, &c)| (c, v)).collect();
    let mut c = start;
    let mut out = ElementWord::identity();
    for l in w.letters() {
        let g = l.gen();
        if l.is_inverse() {
            let prev = coset_of.get(&(value[&c] - q.images[g]).rem_euclid(n)).copied()?;
            if let Some(s) = gen_of[&(prev, g)] {
                out.push_letter(Letter::new(s, true));
            }
            c = prev;
        } else {
            let next = coset_of.get(&(value[&c] + q.images[g]).rem_euclid(n)).copied()?;
            if let Some(s) = gen_of[&(c, g)] {
                out.push_letter(Letter::new(s, false));
            }
            c = next;
        }
    }
    Some((out, c))
}

impl FinitePresentation {
    pub fn new(generators: Alphabet, relators: Vec<ElementWord>) -> Self {
        FinitePresentation { generators, relators }
    }

    /// Exponent-sum matrix (relators × generators).
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| (0..self.generators.len()).map(|g| r.exponent_sum(g)).collect())
            .collect()
    }

    pub fn abelianization(&self) -> Smith {
        smith(&self.relation_matrix(), self.generators.len())
    }

    pub fn abelianization_rank(&self) -> usize {
        self.abelianization().free_rank()
    }

    pub fn render(&self) -> String {
        let gens = self.generators.names().join(", ");
        let rels: Vec<String> = self.relators.iter().map(|r| self.generators.render(r)).collect();
        format!("< {} | {} >", gens, rels.join(", "))
    }

    /// Reidemeister–Schreier presentation of the kernel of `q`.
    pub fn reidemeister_schreier(&self, q: &CyclicQuotient) -> SchreierResult {
        let n = q.modulus as i64;
        // Breadth-first Schreier transversal over the image subgroup.
        let mut coset_of: HashMap<i64, usize> = HashMap::new();
        let mut values: Vec<i64> = Vec::new();
        let mut tree: Vec<(usize, usize)> = Vec::new();
        coset_of.insert(0, 0);
        values.push(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            for g in 0..self.generators.len() {
                for sign in [1i64, -1] {
                    let t = (values[c] + sign * q.images[g]).rem_euclid(n);
                    if let std::collections::hash_map::Entry::Vacant(e) = coset_of.entry(t) {
                        e.insert(values.len());
                        values.push(t);
                        queue.push_back(values.len() - 1);
                        // Tree edge: from c by g (sign 1) or into c by g (sign -1).
                        if sign == 1 {
                            tree.push((c, g));
                        } else {
                            tree.push((values.len() - 1, g));
                        }
                    }
                }
            }
        }
        let index = values.len();
        let mut names = Alphabet::default();
        let mut gen_of: HashMap<(usize, usize), Option<usize>> = HashMap::new();
        for (c, &v) in values.iter().enumerate() {
            for g in 0..self.generators.len() {
                if tree.contains(&(c, g)) {
                    gen_of.insert((c, g), None);
                } else {
                    let name = format!("{}_{}", self.generators.name(g), v);
                    gen_of.insert((c, g), Some(names.intern(&name)));
                }
            }
        }
        let mut relators = Vec::new();
        for c in 0..index {
            for r in &self.relators {
                let (w, end) = rewrite(&gen_of, &coset_of, q, c, r).expect("relators lie in the kernel");
                debug_assert_eq!(end, c);
                if !w.is_identity() {
                    relators.push(w);
                }
            }
        }
        SchreierResult {
            presentation: FinitePresentation::new(names, relators),
            index,
            gen_of,
            coset_of,
            quotient: q.clone(),
        }
    }

    /// Tietze simplification: drop trivial and duplicate relators, eliminate
    /// generators occurring exactly once in a relator. Returns the number of
    /// moves spent (at most `budget`).
    pub fn simplify(&self, budget: usize) -> (FinitePresentation, usize) {
        let ngen = self.generators.len();
        let mut alive = vec![true; ngen];
        let mut rels: Vec<Vec<Letter>> = self.relators.iter().map(|r| cyclic_reduce(r.to_letters())).collect();
        let mut steps = 0;
        loop {
            if steps >= budget {
                break;
            }
            rels.retain(|r| !r.is_empty());
            dedup_cyclic(&mut rels);
            // Shortest relator containing some generator exactly once.
            let mut best: Option<(usize, usize, usize)> = None;
            for (ri, r) in rels.iter().enumerate() {
                let mut count: HashMap<usize, usize> = HashMap::new();
                for l in r {
                    *count.entry(l.gen()).or_default() += 1;
                }
                for (pos, l) in r.iter().enumerate() {
                    if count[&l.gen()] == 1 && best.map_or(true, |(bi, _, _)| r.len() < rels[bi].len()) {
                        best = Some((ri, pos, l.gen()));
                        break;
                    }
                }
            }
            let Some((ri, pos, g)) = best else { break };
            // r = u x^e v  ⇒  x = (v u)^-1 when e = 1, x = v u when e = -1.
            let r = rels.remove(ri);
            let x = r[pos];
            let rotated: Vec<Letter> = r[pos + 1..].iter().chain(r[..pos].iter()).copied().collect();
            let value: Vec<Letter> = if x.is_inverse() {
                rotated
            } else {
                rotated.iter().rev().map(|l| l.inverse()).collect()
            };
            alive[g] = false;
            for other in rels.iter_mut() {
                let mut out = Vec::with_capacity(other.len());
                for &l in other.iter() {
                    if l.gen() == g {
                        if l.is_inverse() {
                            out.extend(value.iter().rev().map(|v| v.inverse()));
                        } else {
                            out.extend(value.iter().copied());
                        }
                    } else {
                        out.push(l);
                    }
                }
                *other = cyclic_reduce(ElementWord::from_letters(out).to_letters());
            }
            steps += 1;
        }
        // Renumber surviving generators.
        let mut map = vec![usize::MAX; ngen];
        let mut names = Alphabet::default();
        for g in 0..ngen {
            if alive[g] {
                map[g] = names.intern(self.generators.name(g));
            }
        }
        let relators = rels
            .iter()
            .map(|r| ElementWord::from_letters(r.iter().map(|l| Letter::new(map[l.gen()], l.is_inverse()))))
            .collect();
        (FinitePresentation::new(names, relators), steps)
    }
}

fn cyclic_reduce(letters: Vec<Letter>) -> Vec<Letter> {
    let w = ElementWord::from_letters(letters);
    w.cyclic_reduction().0.to_letters()
}

/// Remove relators equal to an earlier one up to rotation and inversion.
fn dedup_cyclic(rels: &mut Vec<Vec<Letter>>) {
    let canon = |r: &Vec<Letter>| -> Vec<Letter> {
        let inv: Vec<Letter> = r.iter().rev().map(|l| l.inverse()).collect();
        let mut best: Option<Vec<Letter>> = None;
        for w in [r, &inv] {
            for k in 0..w.len() {
                let rot: Vec<Letter> = w[k..].iter().chain(w[..k].iter()).copied().collect();
                if best.as_ref().map_or(true, |b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        best.unwrap_or_default()
    };
    let mut seen = std::collections::HashSet::new();
    rels.retain(|r| seen.insert(canon(r)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_one_is_a_renaming() {
        let a = Alphabet::new(["a", "b"]);
        let p = FinitePresentation::new(a.clone(), vec![a.parse("a b a^-1 b^-1").unwrap()]);
        let k = p.reidemeister_schreier(&CyclicQuotient { images: vec![0, 0], modulus: 1 });
        assert_eq!(k.index, 1);
        assert_eq!(k.presentation.generators.len(), 2);
        assert_eq!(k.presentation.relators.len(), 1);
    }

    #[test]
    fn free_rank_formula() {
        let a = Alphabet::new(["a", "b"]);
        let p = FinitePresentation::new(a, vec![]);
        for n in 1..6u64 {
            let k = p.reidemeister_schreier(&CyclicQuotient { images: vec![1, 1], modulus: n });
            assert_eq!(k.presentation.generators.len() as u64, 1 + n);
            assert!(k.presentation.relators.is_empty());
        }
    }

    #[test]
    fn tietze_keeps_abelianization() {
        let a = Alphabet::new(["a", "b", "c"]);
        let p = FinitePresentation::new(
            a.clone(),
            vec![a.parse("a b c").unwrap(), a.parse("a b a^-1 b^-1").unwrap(), a.parse("c b c^-1 b^-1").unwrap()],
        );
        let (s, steps) = p.simplify(TIETZE_BUDGET);
        assert!(steps >= 1);
        assert_eq!(s.abelianization_rank(), p.abelianization_rank());
        assert!(s.generators.len() < 3);
    }

    #[test]
    fn rewrite_follows_cosets() {
        let a = Alphabet::new(["a", "b"]);
        let p = FinitePresentation::new(a.clone(), vec![]);
        let k = p.reidemeister_schreier(&CyclicQuotient { images: vec![1, 1], modulus: 2 });
        assert!(k.rewrite(&a.parse("a b").unwrap()).is_some());
        assert!(k.rewrite(&a.parse("a").unwrap()).is_none());
    }
}
