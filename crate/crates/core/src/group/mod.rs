//! Group descriptions with exact normal forms.
//!
//! A [`GroupDescription`] is built from a serialisable [`GroupSpec`] and is
//! immutable afterwards; cloning shares the underlying data.

pub mod free;
pub mod garside;
pub mod presentation;
pub mod raag;
pub mod smith;
pub mod split;
pub mod transversal;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PresentationGraph;
use crate::word::{Alphabet, ElementWord};
use presentation::{CyclicQuotient, FinitePresentation};
use smith::Smith;
pub use split::{GogEdge, GogSpec, GogVertex, SplitForm, SplitGroup, SplitKind, Syllable, GOG_SCHEMA_VERSION};
use transversal::Transversal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial,
    FiniteCyclic {
        generator: String,
        order: u64,
    },
    FreeAbelian {
        generators: Vec<String>,
    },
    Free {
        generators: Vec<String>,
    },
    /// Right-angled Artin group; `edges` lists commuting pairs.
    GraphProductOfZ {
        generators: Vec<String>,
        edges: Vec<(String, String)>,
    },
    DihedralArtin {
        generators: Vec<String>,
        label: u32,
    },
    Artin {
        graph: PresentationGraph,
    },
    DirectProduct {
        factors: Vec<GroupSpec>,
    },
    GraphOfGroups {
        gog: GogSpec,
    },
}

impl GroupSpec {
    pub fn free(names: &[&str]) -> Self {
        GroupSpec::Free {
            generators: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn integers(name: &str) -> Self {
        Self::free(&[name])
    }

    pub fn free_abelian(names: &[&str]) -> Self {
        GroupSpec::FreeAbelian {
            generators: names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn dihedral(m: u32) -> Self {
        GroupSpec::DihedralArtin {
            generators: vec!["a".into(), "b".into()],
            label: m,
        }
    }
}

#[derive(Clone)]
pub struct GroupDescription(Arc<Inner>);

struct Inner {
    spec: GroupSpec,
    alphabet: Alphabet,
    kind: Kind,
    smith: OnceLock<Smith>,
    homs: OnceLock<Vec<Vec<i64>>>,
}

enum Kind {
    Trivial,
    Cyclic(u64),
    FreeAbelian,
    Free,
    Raag(Vec<Vec<bool>>),
    Dihedral(usize),
    /// Artin group solved through a visual splitting; `to_engine[g]` is the
    /// engine generator of graph vertex `g`.
    Artin {
        graph: PresentationGraph,
        engine: std::result::Result<GroupDescription, String>,
        to_engine: Vec<usize>,
        from_engine: Vec<usize>,
    },
    Product {
        factors: Vec<GroupDescription>,
        offsets: Vec<usize>,
    },
    Split(Box<SplitGroup>),
}

impl fmt::Debug for GroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupDescription({})", self.summary())
    }
}

impl PartialEq for GroupDescription {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Serialize for GroupDescription {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDescription {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = GroupSpec::deserialize(d)?;
        GroupDescription::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

fn distinct(names: &[String]) -> Result<Alphabet> {
    let a = Alphabet::new(names.iter().cloned());
    if a.len() != names.len() {
        return Err(Error::invalid("repeated generator name"));
    }
    Ok(a)
}

impl GroupDescription {
    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let (alphabet, kind) = match spec {
            GroupSpec::Trivial => (Alphabet::default(), Kind::Trivial),
            GroupSpec::FiniteCyclic { generator, order } => {
                if *order == 0 {
                    return Err(Error::invalid("finite cyclic order must be positive"));
                }
                (Alphabet::new([generator.clone()]), Kind::Cyclic(*order))
            }
            GroupSpec::FreeAbelian { generators } => (distinct(generators)?, Kind::FreeAbelian),
            GroupSpec::Free { generators } => (distinct(generators)?, Kind::Free),
            GroupSpec::GraphProductOfZ { generators, edges } => {
                let a = distinct(generators)?;
                let mut c = vec![vec![false; a.len()]; a.len()];
                for (u, v) in edges {
                    let i = a.index_of(u).ok_or_else(|| Error::invalid(format!("unknown generator `{u}`")))?;
                    let j = a.index_of(v).ok_or_else(|| Error::invalid(format!("unknown generator `{v}`")))?;
                    if i == j {
                        return Err(Error::invalid(format!("loop at `{u}`")));
                    }
                    c[i][j] = true;
                    c[j][i] = true;
                }
                (a, Kind::Raag(c))
            }
            GroupSpec::DihedralArtin { generators, label } => {
                if generators.len() != 2 || *label < 2 {
                    return Err(Error::invalid("dihedral Artin group needs two generators and label ≥ 2"));
                }
                (distinct(generators)?, Kind::Dihedral(*label as usize))
            }
            GroupSpec::Artin { graph } => (Alphabet::new(graph.names().iter().cloned()), artin_kind(graph)?),
            GroupSpec::DirectProduct { factors } => {
                let factors: Vec<GroupDescription> =
                    factors.iter().map(GroupDescription::from_spec).collect::<Result<_>>()?;
                let mut names = Vec::new();
                let mut offsets = vec![0];
                for f in &factors {
                    names.extend(f.alphabet().names().iter().cloned());
                    offsets.push(names.len());
                }
                (distinct(&names)?, Kind::Product { factors, offsets })
            }
            GroupSpec::GraphOfGroups { gog } => {
                let s = SplitGroup::from_spec(gog)?;
                (s.alphabet.clone(), Kind::Split(Box::new(s)))
            }
        };
        Ok(GroupDescription(Arc::new(Inner {
            spec: spec.clone(),
            alphabet,
            kind,
            smith: OnceLock::new(),
            homs: OnceLock::new(),
        })))
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.0.spec
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.0.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet().len()
    }

    pub fn parse(&self, s: &str) -> Result<ElementWord> {
        self.alphabet().parse(s)
    }

    pub fn render(&self, w: &ElementWord) -> String {
        self.alphabet().render(w)
    }

    /// Short human description of the variant.
    pub fn summary(&self) -> String {
        match &self.0.kind {
            Kind::Trivial => "trivial".into(),
            Kind::Cyclic(n) => format!("Z/{n}"),
            Kind::FreeAbelian => format!("Z^{}", self.rank()),
            Kind::Free => format!("F{}", self.rank()),
            Kind::Raag(_) => format!("RAAG on {} generators", self.rank()),
            Kind::Dihedral(m) => format!("A(I2({m}))"),
            Kind::Artin { graph, .. } => format!("Artin group on {} vertices", graph.len()),
            Kind::Product { factors, .. } => factors.iter().map(|f| f.summary()).collect::<Vec<_>>().join(" x "),
            Kind::Split(s) => match s.kind {
                SplitKind::Amalgam => format!(
                    "({}) *_({}) ({})",
                    s.vertices[0].summary(),
                    s.edge.summary(),
                    s.vertices[1].summary()
                ),
                SplitKind::Hnn => format!("HNN of ({}) over ({})", s.vertices[0].summary(), s.edge.summary()),
            },
        }
    }

    pub fn split(&self) -> Option<&SplitGroup> {
        match &self.0.kind {
            Kind::Split(s) => Some(s),
            _ => None,
        }
    }

    pub fn artin_graph(&self) -> Option<&PresentationGraph> {
        match &self.0.kind {
            Kind::Artin { graph, .. } => Some(graph),
            _ => match &self.0.spec {
                GroupSpec::Artin { graph } => Some(graph),
                _ => None,
            },
        }
    }

    /// The amalgam solving an Artin group on three or more vertices, with the
    /// map from graph vertex indices to engine generators.
    pub fn artin_engine(&self) -> Option<Result<(&GroupDescription, &[usize])>> {
        match &self.0.kind {
            Kind::Artin { engine, to_engine, .. } => Some(match engine {
                Ok(e) => Ok((e, to_engine.as_slice())),
                Err(why) => Err(Error::UnsupportedWordProblem(why.clone())),
            }),
            _ => None,
        }
    }

    fn check_alphabet(&self, w: &ElementWord) -> Result<()> {
        if let Some(&(g, _)) = w.syllables().iter().find(|&&(g, _)| g >= self.rank()) {
            return Err(Error::invalid(format!("generator index {g} outside an alphabet of size {}", self.rank())));
        }
        Ok(())
    }

    /// Canonical word: equal elements give identical words.
    pub fn normalize(&self, w: &ElementWord) -> Result<ElementWord> {
        self.check_alphabet(w)?;
        Ok(match &self.0.kind {
            Kind::Trivial => ElementWord::identity(),
            Kind::Cyclic(n) => ElementWord::gen_pow(0, w.exponent_sum(0).rem_euclid(*n as i64)),
            Kind::FreeAbelian => {
                ElementWord::from_syllables((0..self.rank()).map(|g| (g, w.exponent_sum(g))))
            }
            Kind::Free => w.clone(),
            Kind::Raag(c) => raag::normalize(c, w),
            Kind::Dihedral(m) => garside::normalize(*m, w),
            Kind::Artin {
                engine,
                to_engine,
                from_engine,
                ..
            } => match engine {
                Ok(e) => e.normalize(&w.relabel(to_engine))?.relabel(from_engine),
                Err(why) => return Err(Error::UnsupportedWordProblem(why.clone())),
            },
            Kind::Product { factors, offsets } => {
                let mut parts = vec![ElementWord::identity(); factors.len()];
                for &(g, e) in w.syllables() {
                    let f = offsets.partition_point(|&o| o <= g) - 1;
                    parts[f].push_syllable(g - offsets[f], e);
                }
                let mut out = ElementWord::identity();
                for (f, part) in parts.iter().enumerate() {
                    let map: Vec<usize> = (0..factors[f].rank()).map(|i| i + offsets[f]).collect();
                    out.append(&factors[f].normalize(part)?.relabel(&map));
                }
                out
            }
            Kind::Split(s) => s.normalize(w)?,
        })
    }

    pub fn is_identity(&self, w: &ElementWord) -> Result<bool> {
        Ok(self.normalize(w)?.is_identity())
    }

    pub fn equal(&self, u: &ElementWord, v: &ElementWord) -> Result<bool> {
        self.is_identity(&u.mul(&v.inverse()))
    }

    pub fn commute(&self, u: &ElementWord, v: &ElementWord) -> Result<bool> {
        self.is_identity(&ElementWord::commutator(u, v))
    }

    pub fn dihedral_label(&self) -> Option<usize> {
        match self.0.kind {
            Kind::Dihedral(m) => Some(m),
            _ => None,
        }
    }

    /// `Some(None)` for `ℤ` on generator 0, `Some(Some(n))` for `ℤ/n`, `None` otherwise.
    pub fn cyclic_structure(&self) -> Option<Option<u64>> {
        if self.rank() != 1 {
            return None;
        }
        match &self.0.kind {
            Kind::Cyclic(n) => Some(Some(*n)),
            Kind::Free | Kind::FreeAbelian | Kind::Raag(_) => Some(None),
            Kind::Artin { .. } | Kind::Dihedral(_) | Kind::Trivial | Kind::Split(_) => None,
            Kind::Product { factors, .. } => factors.iter().find(|f| f.rank() == 1).and_then(|f| f.cyclic_structure()),
        }
    }

    pub fn is_trivial_group(&self) -> bool {
        match &self.0.kind {
            Kind::Trivial => true,
            Kind::Cyclic(n) => *n == 1,
            Kind::Product { factors, .. } => factors.iter().all(|f| f.is_trivial_group()),
            _ => self.rank() == 0,
        }
    }

    pub fn is_cyclic_group(&self) -> bool {
        self.is_trivial_group() || self.cyclic_structure().is_some()
    }

    /// Order of a finite group; `None` when infinite (or unknown).
    pub fn order(&self) -> Option<u64> {
        match &self.0.kind {
            Kind::Trivial => Some(1),
            Kind::Cyclic(n) => Some(*n),
            Kind::Product { factors, .. } => factors.iter().try_fold(1u64, |acc, f| f.order().map(|o| acc * o)),
            _ if self.rank() == 0 => Some(1),
            _ => None,
        }
    }

    pub fn is_abelian_variant(&self) -> bool {
        match &self.0.kind {
            Kind::Trivial | Kind::Cyclic(_) | Kind::FreeAbelian => true,
            Kind::Free => self.rank() <= 1,
            Kind::Raag(c) => (0..c.len()).all(|i| (0..c.len()).all(|j| i == j || c[i][j])),
            Kind::Dihedral(m) => *m == 2,
            Kind::Product { factors, .. } => factors.iter().all(|f| f.is_abelian_variant()),
            Kind::Artin { .. } | Kind::Split(_) => false,
        }
    }

    pub fn presentation(&self) -> FinitePresentation {
        let a = self.alphabet().clone();
        let n = a.len();
        let comm = |i: usize, j: usize| ElementWord::commutator(&ElementWord::gen(i), &ElementWord::gen(j));
        let relators = match &self.0.kind {
            Kind::Trivial => vec![],
            Kind::Cyclic(k) => vec![ElementWord::gen_pow(0, *k as i64)],
            Kind::FreeAbelian => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| comm(i, j)).collect(),
            Kind::Free => vec![],
            Kind::Raag(c) => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| c[i][j])
                .map(|(i, j)| comm(i, j))
                .collect(),
            Kind::Dihedral(m) => vec![artin_relator(0, 1, *m)],
            Kind::Artin { graph, .. } => graph
                .edges()
                .into_iter()
                .map(|(i, j, m)| artin_relator(i, j, m as usize))
                .collect(),
            Kind::Product { factors, offsets } => {
                let mut rels = Vec::new();
                for (f, g) in factors.iter().enumerate() {
                    let map: Vec<usize> = (0..g.rank()).map(|i| i + offsets[f]).collect();
                    rels.extend(g.presentation().relators.iter().map(|r| r.relabel(&map)));
                    for h in f + 1..factors.len() {
                        for i in offsets[f]..offsets[f + 1] {
                            for j in offsets[h]..offsets[h + 1] {
                                rels.push(comm(i, j));
                            }
                        }
                    }
                }
                rels
            }
            Kind::Split(s) => s.relators(),
        };
        FinitePresentation::new(a, relators)
    }

    pub fn smith(&self) -> &Smith {
        self.0.smith.get_or_init(|| self.presentation().abelianization())
    }

    /// Homomorphisms to `ℤ` as generator weights: a basis of the free part of the abelianization.
    pub fn integer_homomorphisms(&self) -> Vec<Vec<i64>> {
        let s = self.smith();
        (s.rank()..s.cols)
            .map(|j| (0..s.cols).map(|i| s.v[i][j] as i64).collect())
            .collect()
    }

    /// Homomorphisms to `ℤ` with every generator weight in `{-1, 0, 1}`:
    /// the height, unit vectors and odd-class indicators that kill every relator.
    pub fn weight_homomorphisms(&self) -> Vec<Vec<i64>> {
        self.0
            .homs
            .get_or_init(|| {
                let n = self.rank();
                let mut cands: Vec<Vec<i64>> = vec![vec![1; n]];
                for g in 0..n {
                    let mut u = vec![0; n];
                    u[g] = 1;
                    cands.push(u);
                }
                if let Some(graph) = self.artin_graph() {
                    for class in odd_classes(graph) {
                        let mut u = vec![0; n];
                        for g in class {
                            u[g] = 1;
                        }
                        cands.push(u);
                    }
                }
                if self.dihedral_label().is_some() {
                    cands.push(vec![1, 1]);
                }
                let rels = self.presentation().relators;
                let mut out: Vec<Vec<i64>> = Vec::new();
                for c in cands {
                    if !out.contains(&c) && rels.iter().all(|r| transversal::weigh(&c, r) == 0) {
                        out.push(c);
                    }
                }
                out
            })
            .clone()
    }

    /// Image in the abelianization. Artin-type variants use exponent sums,
    /// with generators joined by an odd label merged into one coordinate;
    /// other variants use Smith coordinates (free part, then torsion residues).
    pub fn abelianization_image(&self, w: &ElementWord) -> Vec<i64> {
        match &self.0.kind {
            Kind::Trivial => vec![],
            Kind::Cyclic(n) => vec![w.exponent_sum(0).rem_euclid(*n as i64)],
            Kind::Free | Kind::FreeAbelian | Kind::Raag(_) => (0..self.rank()).map(|g| w.exponent_sum(g)).collect(),
            Kind::Dihedral(m) => {
                if m % 2 == 1 {
                    vec![w.total_exponent()]
                } else {
                    vec![w.exponent_sum(0), w.exponent_sum(1)]
                }
            }
            Kind::Artin { graph, .. } => odd_classes(graph)
                .iter()
                .map(|c| c.iter().map(|&g| w.exponent_sum(g)).sum())
                .collect(),
            Kind::Product { .. } | Kind::Split(_) => {
                let x: Vec<i64> = (0..self.rank()).map(|g| w.exponent_sum(g)).collect();
                let (free, tors) = self.smith().coordinates(&x);
                free.into_iter().chain(tors).map(|v| v as i64).collect()
            }
        }
    }

    /// Height: every generator maps to 1.
    pub fn height(&self, w: &ElementWord) -> i64 {
        w.total_exponent()
    }

    /// Exact membership test.
    pub fn subgroup_membership(&self, h: &SubgroupDescriptor, w: &ElementWord) -> Result<bool> {
        let w = self.normalize(w)?;
        match &h.tag {
            SubgroupTag::Whole => Ok(true),
            SubgroupTag::Trivial => Ok(w.is_identity()),
            SubgroupTag::Cyclic => {
                let s = h.generators.first().cloned().unwrap_or_default();
                Ok(self.cyclic_exponent(&s, &w)?.is_some())
            }
            SubgroupTag::Parabolic { vertices } => self.parabolic_membership(vertices, &w),
            SubgroupTag::FreeFolded => match self.0.kind {
                Kind::Free => Ok(free::FoldedSubgroup::new(&h.generators).contains(&w)),
                _ => Err(Error::UnsupportedMembership("folded automata need a free ambient group".into())),
            },
            SubgroupTag::KernelOfCyclicQuotient(q) => {
                if q.images.len() != self.rank() {
                    return Err(Error::invalid("quotient needs one image per generator"));
                }
                for r in self.presentation().relators {
                    if q.image(&r) != 0 {
                        return Err(Error::invalid("cyclic quotient does not kill every relator"));
                    }
                }
                Ok(q.image(&w) == 0)
            }
            SubgroupTag::Untagged => Err(Error::UnsupportedMembership(
                "untagged subgroup descriptors carry no membership oracle".into(),
            )),
        }
    }

    /// `k` with `w = s^k`, if any.
    pub fn cyclic_exponent(&self, s: &ElementWord, w: &ElementWord) -> Result<Option<i64>> {
        let s = self.normalize(s)?;
        let w = self.normalize(w)?;
        if s.is_identity() {
            return Ok(w.is_identity().then_some(0));
        }
        // A homomorphism to ℤ not killing s pins down the only candidate exponent.
        let sv: Vec<i64> = (0..self.rank()).map(|g| s.exponent_sum(g)).collect();
        let wv: Vec<i64> = (0..self.rank()).map(|g| w.exponent_sum(g)).collect();
        for hom in self.integer_homomorphisms() {
            let hs: i64 = hom.iter().zip(&sv).map(|(a, b)| a * b).sum();
            if hs == 0 {
                continue;
            }
            let hw: i64 = hom.iter().zip(&wv).map(|(a, b)| a * b).sum();
            if hw % hs != 0 {
                return Ok(None);
            }
            let k = hw / hs;
            return Ok((self.normalize(&s.pow(k))? == w).then_some(k));
        }
        if let Kind::Free = self.0.kind {
            let (kc, root, p) = free::maximal_root(&s);
            let (kw, rw, pw) = free::maximal_root(&w);
            if kc == kw && rw == root && pw % p == 0 {
                return Ok(Some(pw / p));
            }
            if kc == kw && rw == root.inverse() && pw % p == 0 {
                return Ok(Some(-pw / p));
            }
            return Ok(w.is_identity().then_some(0));
        }
        if let Some(n) = self.order() {
            let mut x = ElementWord::identity();
            for k in 0..n as i64 {
                if x == w {
                    return Ok(Some(k));
                }
                x = self.normalize(&x.mul(&s))?;
            }
            return Ok(None);
        }
        Err(Error::UnsupportedMembership(format!(
            "no homomorphism to Z detects {}",
            self.render(&s)
        )))
    }

    fn parabolic_membership(&self, vertices: &[usize], w: &ElementWord) -> Result<bool> {
        let mut s: Vec<usize> = vertices.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() == self.rank() {
            return Ok(true);
        }
        if s.is_empty() {
            return Ok(w.is_identity());
        }
        match &self.0.kind {
            Kind::Free | Kind::Raag(_) | Kind::FreeAbelian => {
                return Ok(w.support().iter().all(|g| s.contains(g)));
            }
            _ => {}
        }
        if s.len() == 1 {
            return Ok(self.cyclic_exponent(&ElementWord::gen(s[0]), w)?.is_some());
        }
        Err(Error::UnsupportedMembership(format!(
            "parabolic membership on {} of {} generators",
            s.len(),
            self.rank()
        )))
    }

    /// `w = rep · rem` with `rem ∈ H` and `rep` the canonical representative of `w·H`.
    pub fn transversal_rep(&self, h: &SubgroupDescriptor, w: &ElementWord) -> Result<(ElementWord, ElementWord)> {
        match h.tag {
            SubgroupTag::Whole => Ok((ElementWord::identity(), self.normalize(w)?)),
            SubgroupTag::Trivial => Ok((self.normalize(w)?, ElementWord::identity())),
            SubgroupTag::Cyclic | SubgroupTag::Parabolic { .. } if h.generators.len() == 1 => {
                let z = GroupDescription::from_spec(&GroupSpec::integers("c"))?;
                let t = Transversal::new(self.clone(), z, vec![h.generators[0].clone()])?;
                let (rep, c) = t.decompose(w)?;
                Ok((rep, self.normalize(&t.embed(&c))?))
            }
            _ => Err(Error::UnsupportedMembership(
                "transversals are registered for trivial, whole and cyclic subgroups".into(),
            )),
        }
    }
}

/// `alt(i, j, m) · alt(j, i, m)^-1`.
fn artin_relator(i: usize, j: usize, m: usize) -> ElementWord {
    let alt = |x: usize, y: usize| ElementWord::from_syllables((0..m).map(|k| (if k % 2 == 0 { x } else { y }, 1)));
    alt(i, j).mul(&alt(j, i).inverse())
}

/// Classes of generators joined by odd-labelled edges (conjugate generators).
pub fn odd_classes(graph: &PresentationGraph) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, m) in graph.edges() {
        if m % 2 == 1 {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        match root_of[r] {
            Some(c) => classes[c].push(v),
            None => {
                root_of[r] = Some(classes.len());
                classes.push(vec![v]);
            }
        }
    }
    classes
}

fn artin_kind(graph: &PresentationGraph) -> Result<Kind> {
    let n = graph.len();
    let edges = graph.edges();
    if n == 0 {
        return Ok(Kind::Trivial);
    }
    if edges.is_empty() {
        return Ok(Kind::Free);
    }
    if edges.iter().all(|e| e.2 == 2) {
        let mut c = vec![vec![false; n]; n];
        for (i, j, _) in edges {
            c[i][j] = true;
            c[j][i] = true;
        }
        return Ok(Kind::Raag(c));
    }
    if n == 2 {
        return Ok(Kind::Dihedral(edges[0].2 as usize));
    }
    let engine = artin_engine(graph);
    let (to_engine, from_engine) = match &engine {
        Ok(e) => {
            let to: Vec<usize> = graph
                .names()
                .iter()
                .map(|v| e.alphabet().index_of(v).expect("engine keeps every vertex"))
                .collect();
            let mut from = vec![0; n];
            for (g, &t) in to.iter().enumerate() {
                from[t] = g;
            }
            (to, from)
        }
        Err(_) => ((0..n).collect(), (0..n).collect()),
    };
    Ok(Kind::Artin {
        graph: graph.clone(),
        engine,
        to_engine,
        from_engine,
    })
}

/// Amalgam over the preferred visual splitting, when its separator has at most one vertex.
fn artin_engine(graph: &PresentationGraph) -> std::result::Result<GroupDescription, String> {
    let Some(sp) = graph.preferred_splitting() else {
        return Err(format!(
            "complete defining graph on {} vertices with a label other than 2",
            graph.len()
        ));
    };
    if sp.gamma0.len() > 1 {
        return Err(format!(
            "smallest visual splitting has a separator of {} vertices; only cyclic or trivial edge groups are supported",
            sp.gamma0.len()
        ));
    }
    let side = |vs: &[usize]| GroupSpec::Artin {
        graph: graph.induced(vs),
    };
    let (edge_group, emb) = match sp.gamma0.first() {
        None => (GroupSpec::Trivial, Default::default()),
        Some(&v) => {
            let name = graph.name(v).to_string();
            let mut emb = std::collections::BTreeMap::new();
            emb.insert(name.clone(), name.clone());
            (GroupSpec::integers(&name), emb)
        }
    };
    let gog = GogSpec {
        schema_version: GOG_SCHEMA_VERSION,
        vertices: vec![
            GogVertex {
                name: "G1".into(),
                group: side(&sp.gamma1),
            },
            GogVertex {
                name: "G2".into(),
                group: side(&sp.gamma2),
            },
        ],
        edges: vec![GogEdge {
            source: "G1".into(),
            target: "G2".into(),
            group: edge_group,
            source_embedding: emb.clone(),
            target_embedding: emb,
            stable_letter: None,
        }],
    };
    GroupDescription::from_spec(&GroupSpec::GraphOfGroups { gog }).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SubgroupTag {
    Whole,
    Trivial,
    /// `⟨s⟩` for the single generator `s`.
    Cyclic,
    /// Standard parabolic subgroup on the listed generator indices.
    Parabolic { vertices: Vec<usize> },
    /// Finitely generated subgroup of a free group (Stallings folding).
    FreeFolded,
    KernelOfCyclicQuotient(CyclicQuotient),
    Untagged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupDescriptor {
    pub generators: Vec<ElementWord>,
    pub tag: SubgroupTag,
}

impl SubgroupDescriptor {
    pub fn whole() -> Self {
        SubgroupDescriptor {
            generators: vec![],
            tag: SubgroupTag::Whole,
        }
    }

    pub fn trivial() -> Self {
        SubgroupDescriptor {
            generators: vec![],
            tag: SubgroupTag::Trivial,
        }
    }

    pub fn cyclic(s: ElementWord) -> Self {
        SubgroupDescriptor {
            generators: vec![s],
            tag: SubgroupTag::Cyclic,
        }
    }

    pub fn parabolic(vertices: Vec<usize>) -> Self {
        SubgroupDescriptor {
            generators: vertices.iter().map(|&v| ElementWord::gen(v)).collect(),
            tag: SubgroupTag::Parabolic { vertices },
        }
    }

    pub fn folded(generators: Vec<ElementWord>) -> Self {
        SubgroupDescriptor {
            generators,
            tag: SubgroupTag::FreeFolded,
        }
    }

    pub fn kernel(q: CyclicQuotient) -> Self {
        SubgroupDescriptor {
            generators: vec![],
            tag: SubgroupTag::KernelOfCyclicQuotient(q),
        }
    }

    pub fn untagged(generators: Vec<ElementWord>) -> Self {
        SubgroupDescriptor {
            generators,
            tag: SubgroupTag::Untagged,
        }
    }

    /// Render with the ambient alphabet, e.g. `<a^2>`.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        match &self.tag {
            SubgroupTag::Whole => "G".into(),
            SubgroupTag::Trivial => "1".into(),
            _ => format!(
                "<{}>",
                self.generators.iter().map(|g| alphabet.render(g)).collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(spec: GroupSpec) -> GroupDescription {
        GroupDescription::from_spec(&spec).unwrap()
    }

    #[test]
    fn basic_normal_forms() {
        let f2 = g(GroupSpec::free(&["a", "b"]));
        let w = f2.parse("a b b^-1 a").unwrap();
        assert_eq!(f2.render(&f2.normalize(&w).unwrap()), "a^2");
        let raag = g(GroupSpec::GraphProductOfZ {
            generators: vec!["a".into(), "b".into()],
            edges: vec![("a".into(), "b".into())],
        });
        let w = raag.parse("a b a^-1").unwrap();
        assert_eq!(raag.render(&raag.normalize(&w).unwrap()), "b");
        let d3 = g(GroupSpec::dihedral(3));
        assert!(d3.equal(&d3.parse("aba").unwrap(), &d3.parse("bab").unwrap()).unwrap());
    }

    #[test]
    fn membership_examples() {
        let f2 = g(GroupSpec::free(&["a", "b"]));
        let h = SubgroupDescriptor::cyclic(f2.parse("ab").unwrap());
        assert!(f2.subgroup_membership(&h, &f2.parse("abab").unwrap()).unwrap());
        let d3 = g(GroupSpec::dihedral(3));
        let h = SubgroupDescriptor::cyclic(d3.parse("b").unwrap());
        assert!(!d3.subgroup_membership(&h, &d3.parse("(ab)^3").unwrap()).unwrap());
        assert!(d3.subgroup_membership(&h, &d3.parse("b^-4").unwrap()).unwrap());
        assert!(d3.subgroup_membership(&SubgroupDescriptor::whole(), &d3.parse("ab").unwrap()).unwrap());
        assert!(matches!(
            d3.subgroup_membership(&SubgroupDescriptor::untagged(vec![]), &ElementWord::identity()),
            Err(Error::UnsupportedMembership(_))
        ));
    }

    #[test]
    fn abelianization_examples() {
        let d3 = g(GroupSpec::dihedral(3));
        assert_eq!(d3.abelianization_image(&d3.parse("aba").unwrap()), vec![3]);
        let f2 = g(GroupSpec::free(&["a", "b"]));
        assert_eq!(f2.abelianization_image(&f2.parse("[a,b]").unwrap()), vec![0, 0]);
        assert_eq!(f2.abelianization_image(&ElementWord::identity()), vec![0, 0]);
    }

    #[test]
    fn parity_transversal() {
        let z = g(GroupSpec::integers("a"));
        let h = SubgroupDescriptor::cyclic(z.parse("a^2").unwrap());
        let (rep, rem) = z.transversal_rep(&h, &z.parse("a^3").unwrap()).unwrap();
        assert_eq!((z.render(&rep), z.render(&rem)), ("a".to_string(), "a^2".to_string()));
        let (rep, rem) = z.transversal_rep(&h, &z.parse("a^-4").unwrap()).unwrap();
        assert!(rep.is_identity());
        assert_eq!(z.render(&rem), "a^-4");
    }

    #[test]
    fn dihedral_transversal_over_b() {
        let d3 = g(GroupSpec::dihedral(3));
        let h = SubgroupDescriptor::cyclic(d3.parse("b").unwrap());
        for s in ["ab", "b", "a^2 b^3", "(ab)^3", "b a^-1 b^2"] {
            let w = d3.parse(s).unwrap();
            let (rep, rem) = d3.transversal_rep(&h, &w).unwrap();
            assert!(d3.equal(&rep.mul(&rem), &w).unwrap(), "{s}");
            assert!(d3.subgroup_membership(&h, &rem).unwrap());
            let (rep2, _) = d3.transversal_rep(&h, &w.mul(&d3.parse("b^5").unwrap())).unwrap();
            assert_eq!(rep, rep2, "{s}");
        }
    }

    #[test]
    fn artin_path_engine() {
        let graph = PresentationGraph::parse("graph { a -- b [label=3]; b -- c [label=4]; }").unwrap();
        let a = g(GroupSpec::Artin { graph });
        assert!(a.equal(&a.parse("aba").unwrap(), &a.parse("bab").unwrap()).unwrap());
        assert!(a.equal(&a.parse("bcbc").unwrap(), &a.parse("cbcb").unwrap()).unwrap());
        assert!(!a.commute(&a.parse("a").unwrap(), &a.parse("c").unwrap()).unwrap());
        let square = PresentationGraph::parse(
            "graph { a -- b [label=3]; b -- c [label=3]; c -- d [label=3]; d -- a [label=3]; }",
        )
        .unwrap();
        let sq = g(GroupSpec::Artin { graph: square });
        assert!(matches!(sq.normalize(&ElementWord::gen(0)), Err(Error::UnsupportedWordProblem(_))));
    }

    #[test]
    fn product_normal_form() {
        let p = g(GroupSpec::DirectProduct {
            factors: vec![GroupSpec::free(&["a", "b"]), GroupSpec::integers("t")],
        });
        let w = p.parse("t a t^-1 b t").unwrap();
        assert_eq!(p.render(&p.normalize(&w).unwrap()), "a*b*t");
    }
}
