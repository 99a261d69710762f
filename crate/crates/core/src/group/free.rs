//! Free-group tools: folded subgroup automata, maximal roots, conjugacy.

use std::collections::HashMap;

use crate::word::{ElementWord, Letter};

/// Folded core graph of a finitely generated subgroup of a free group.
#[derive(Clone, Debug)]
pub struct FoldedSubgroup {
    /// `edges[v]` maps a letter to the target vertex; inverse letters are stored too.
    edges: Vec<HashMap<Letter, usize>>,
}

impl FoldedSubgroup {
    pub fn new(generators: &[ElementWord]) -> Self {
        let mut raw: Vec<(usize, Letter, usize)> = Vec::new();
        let mut n = 1usize;
        for g in generators {
            let letters = g.to_letters();
            if letters.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                raw.push((cur, l, next));
                cur = next;
            }
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        loop {
            let mut changed = false;
            let mut seen: HashMap<(usize, Letter), usize> = HashMap::new();
            for &(u, l, v) in &raw {
                let (u, v) = (find(&mut parent, u), find(&mut parent, v));
                for (src, lab, dst) in [(u, l, v), (v, l.inverse(), u)] {
                    match seen.get(&(src, lab)).copied() {
                        Some(t) => {
                            let t = find(&mut parent, t);
                            let d = find(&mut parent, dst);
                            if t != d {
                                // Keep the base vertex as a class representative.
                                let (keep, drop) = if t < d { (t, d) } else { (d, t) };
                                parent[drop] = keep;
                                changed = true;
                            }
                        }
                        None => {
                            seen.insert((src, lab), dst);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let root = find(&mut parent, 0);
        ids.insert(root, 0);
        let mut edges: Vec<HashMap<Letter, usize>> = vec![HashMap::new()];
        for &(u, l, v) in &raw {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for x in [u, v] {
                if !ids.contains_key(&x) {
                    ids.insert(x, edges.len());
                    edges.push(HashMap::new());
                }
            }
            let (iu, iv) = (ids[&u], ids[&v]);
            edges[iu].insert(l, iv);
            edges[iv].insert(l.inverse(), iu);
        }
        FoldedSubgroup { edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, w: &ElementWord) -> bool {
        let mut v = 0;
        for l in w.letters() {
            match self.edges[v].get(&l) {
                Some(&t) => v = t,
                None => return false,
            }
        }
        v == 0
    }

    /// Rank of the subgroup: `E - V + 1` of the folded graph.
    pub fn rank(&self) -> usize {
        let e: usize = self.edges.iter().map(|m| m.len()).sum::<usize>() / 2;
        e + 1 - self.edges.len()
    }
}

/// `(k, u, p)` with `w = k u^p k^-1`, `u` cyclically reduced and not a proper power.
pub fn maximal_root(w: &ElementWord) -> (ElementWord, ElementWord, i64) {
    let (core, k) = w.cyclic_reduction();
    let letters = core.to_letters();
    let n = letters.len();
    if n == 0 {
        return (k, core, 0);
    }
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| letters[i] == letters[i - d]) {
            let u = ElementWord::from_letters(letters[..d].iter().copied());
            return (k, u, (n / d) as i64);
        }
    }
    unreachable!()
}

pub fn is_proper_power(w: &ElementWord) -> bool {
    maximal_root(w).2 > 1
}

/// Conjugacy in a free group: cyclic cores are rotations of each other.
pub fn are_conjugate(u: &ElementWord, v: &ElementWord) -> bool {
    let a = u.cyclic_reduction().0.to_letters();
    let b = v.cyclic_reduction().0.to_letters();
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i]))
}

/// Whether `u` is conjugate to `v` or to `v^-1`.
pub fn conjugate_up_to_inverse(u: &ElementWord, v: &ElementWord) -> bool {
    are_conjugate(u, v) || are_conjugate(u, &v.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    #[test]
    fn folded_membership() {
        let a = Alphabet::new(["a", "b"]);
        let h = FoldedSubgroup::new(&[a.parse("ab").unwrap()]);
        assert!(h.contains(&a.parse("abab").unwrap()));
        assert!(h.contains(&a.parse("b^-1 a^-1").unwrap()));
        assert!(!h.contains(&a.parse("ba").unwrap()));
        let k = FoldedSubgroup::new(&[a.parse("a^2").unwrap(), a.parse("b").unwrap(), a.parse("a b a^-1").unwrap()]);
        assert_eq!(k.rank(), 3);
        assert!(k.contains(&a.parse("a b^5 a^-1 a^2").unwrap()));
        assert!(!k.contains(&a.parse("a").unwrap()));
    }

    #[test]
    fn folding_merges_common_prefixes() {
        let a = Alphabet::new(["a", "b"]);
        let h = FoldedSubgroup::new(&[a.parse("ab").unwrap(), a.parse("a b^-1").unwrap()]);
        assert_eq!(h.rank(), 2);
        assert!(h.contains(&a.parse("b^2").unwrap().conjugate_by(&a.parse("a").unwrap())));
    }

    #[test]
    fn roots_and_conjugacy() {
        let a = Alphabet::new(["a", "b"]);
        let (_, u, p) = maximal_root(&a.parse("b (ab)^3 b^-1").unwrap());
        assert_eq!(p, 3);
        assert_eq!(u.len(), 2);
        assert!(!is_proper_power(&a.parse("a b a b^-1").unwrap()));
        assert!(are_conjugate(&a.parse("ab").unwrap(), &a.parse("ba").unwrap()));
        assert!(!are_conjugate(&a.parse("ab").unwrap(), &a.parse("a b^-1").unwrap()));
    }
}
