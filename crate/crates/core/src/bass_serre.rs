//! Bass–Serre trees of one-edge graphs of groups.
//!
//! A vertex is `g·X_i` stored as its orbit `i` and the canonical
//! representative: the normal form of `g` with the trailing `X_i` part
//! dropped. Distances and geodesics come straight from normal forms; the
//! neighbour lists enumerate transversals and are truncated for infinite
//! index.
//!
//! Amalgam `X₀ ∗_C X₁`: edges `g·C` join `g·X₀` and `g·X₁`.
//! HNN with `t·α(c)·t⁻¹ = ω(c)`: the neighbours of `g·X` are `g·x·t·X` for
//! `x` in a transversal of `ω(C)` and `g·x·t⁻¹·X` for `x` in a transversal of `α(C)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupDescription, SplitGroup, SplitKind, SubgroupDescriptor, SubgroupTag};
use crate::tree::{classify_isometry, IsometryClass, Neighbors, TreeHandle, DEFAULT_NODE_BUDGET};
use crate::word::ElementWord;

pub const DEFAULT_WINDOW: usize = 8;
pub const DEFAULT_BRANCHING: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BsVertex {
    pub orbit: usize,
    pub rep: ElementWord,
}

#[derive(Clone, Debug)]
pub struct BassSerreTree {
    group: GroupDescription,
    branching: usize,
    node_budget: usize,
    /// Per transversal side: sampled representatives and completeness.
    reps: [(Vec<ElementWord>, bool); 2],
}

impl BassSerreTree {
    pub fn realize(group: GroupDescription) -> Result<Self> {
        Self::with_limits(group, DEFAULT_BRANCHING, DEFAULT_NODE_BUDGET)
    }

    /// `branching` bounds the letter length of sampled transversal elements
    /// when the edge group has infinite index.
    pub fn with_limits(group: GroupDescription, branching: usize, node_budget: usize) -> Result<Self> {
        let split = group
            .split()
            .ok_or_else(|| Error::invalid("a Bass–Serre tree needs a graph-of-groups description"))?;
        let reps = [split.sides[0].sample_reps(branching)?, split.sides[1].sample_reps(branching)?];
        Ok(BassSerreTree {
            group,
            branching,
            node_budget,
            reps,
        })
    }

    pub fn group(&self) -> &GroupDescription {
        &self.group
    }

    pub fn split(&self) -> &SplitGroup {
        self.group.split().expect("checked at construction")
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn orbit_count(&self) -> usize {
        self.split().vertex_count()
    }

    pub fn base_vertex(&self, orbit: usize) -> BsVertex {
        BsVertex {
            orbit,
            rep: ElementWord::identity(),
        }
    }

    /// The vertex `g·X_orbit`.
    pub fn vertex(&self, orbit: usize, g: &ElementWord) -> Result<BsVertex> {
        let s = self.split();
        let f = s.normal_form(g)?;
        let mut syl = f.syllables;
        if s.kind == SplitKind::Amalgam && syl.last().map_or(false, |x| x.vertex == orbit) {
            syl.pop();
        }
        Ok(BsVertex {
            orbit,
            rep: s.flatten_syllables(&syl),
        })
    }

    /// Geodesic from `X_i` to `w·X_j`.
    fn relative_path(&self, i: usize, w: &ElementWord, j: usize) -> Result<Vec<BsVertex>> {
        let s = self.split();
        let f = s.normal_form(w)?;
        let mut path = Vec::new();
        match s.kind {
            SplitKind::Hnn => {
                path.push(self.base_vertex(0));
                for l in 1..=f.syllables.len() {
                    path.push(BsVertex {
                        orbit: 0,
                        rep: s.flatten_syllables(&f.syllables[..l]),
                    });
                }
            }
            SplitKind::Amalgam => {
                let k = f.syllables.len();
                if k == 0 {
                    path.push(self.base_vertex(i));
                    if i != j {
                        path.push(self.base_vertex(j));
                    }
                    return Ok(path);
                }
                let s1 = f.syllables[0].vertex;
                if i != s1 {
                    path.push(self.base_vertex(i));
                }
                path.push(self.base_vertex(s1));
                for l in 1..=k {
                    path.push(BsVertex {
                        orbit: 1 - f.syllables[l - 1].vertex,
                        rep: s.flatten_syllables(&f.syllables[..l]),
                    });
                }
                if j == f.syllables[k - 1].vertex {
                    path.pop();
                }
            }
        }
        Ok(path)
    }

    fn translate(&self, g: &ElementWord, v: &BsVertex) -> Result<BsVertex> {
        self.vertex(v.orbit, &g.mul(&v.rep))
    }

    /// `g` conjugated into the vertex group at `v`, as a local word; `None` if `g` does not fix `v`.
    pub fn local_element(&self, g: &ElementWord, v: &BsVertex) -> Result<Option<ElementWord>> {
        let z = v.rep.inverse().mul(g).mul(&v.rep);
        self.split().localize(v.orbit, &z)
    }

    /// The edge from `v` towards `u` (adjacent): `(side, x)` where `x` is the
    /// local transversal element selecting the edge and `side` the edge-image side.
    fn edge_data(&self, v: &BsVertex, u: &BsVertex) -> Result<(usize, ElementWord)> {
        let s = self.split();
        let rel = v.rep.inverse().mul(&u.rep);
        let f = s.normal_form(&rel)?;
        Ok(match s.kind {
            SplitKind::Amalgam => match f.syllables.first() {
                Some(first) if first.vertex == v.orbit => (v.orbit, first.rep.clone()),
                _ => (v.orbit, ElementWord::identity()),
            },
            SplitKind::Hnn => {
                let first = f.syllables.first().ok_or_else(|| Error::invalid("vertices are not adjacent"))?;
                let side = if first.stable > 0 { 1 } else { 0 };
                (side, first.rep.clone())
            }
        })
    }

    /// Vertex group of `v`'s orbit in which the edge image of `side` lies.
    fn side_vertex(&self, side: usize) -> usize {
        match self.split().kind {
            SplitKind::Amalgam => side,
            SplitKind::Hnn => 0,
        }
    }

    /// Pointwise stabiliser of a geodesic (vertex list).
    pub fn pointwise_stabiliser(&self, path: &[BsVertex]) -> Result<StabiliserDescriptor> {
        let s = self.split();
        let first = path.first().ok_or_else(|| Error::invalid("empty geodesic"))?;
        if path.len() == 1 {
            return Ok(self.vertex_stabiliser(first));
        }
        let mut current: Option<ElementWord> = None;
        let mut descriptor = StabiliserDescriptor::trivial(self.group());
        for n in 0..path.len() - 1 {
            let (v, u) = (&path[n], &path[n + 1]);
            let (side, x) = self.edge_data(v, u)?;
            let t = &s.sides[side];
            let conj = v.rep.mul(&s.lift(v.orbit, &x));
            if t.is_trivial_edge() {
                return Ok(StabiliserDescriptor::trivial(self.group()));
            }
            if t.images().len() != 1 {
                if path.len() == 2 {
                    return Ok(self.edge_stabiliser(&conj, side));
                }
                return Err(Error::NoIntersectionOracle(format!(
                    "edge group of rank {} along a path of {} edges",
                    t.images().len(),
                    path.len() - 1
                )));
            }
            let e = t.images()[0].clone();
            let k = match &current {
                None => 1,
                Some(g) => {
                    let z = self
                        .local_element(g, v)?
                        .ok_or_else(|| Error::invalid("stabiliser element does not fix the path"))?;
                    let w = x.inverse().mul(&z).mul(&x);
                    let x_group = &s.vertices[self.side_vertex(side)];
                    match power_into(x_group, &w, &e, t)? {
                        Some(k) => k,
                        None => return Ok(StabiliserDescriptor::trivial(self.group())),
                    }
                }
            };
            let base_local = match &current {
                None => e.clone(),
                Some(g) => {
                    let z = self.local_element(g, v)?.expect("checked above");
                    x.inverse().mul(&z).mul(&x).pow(k as i64)
                }
            };
            let x_vertex = self.side_vertex(side);
            let base = self.group().normalize(&s.lift(x_vertex, &base_local))?;
            let generator = self.group().normalize(&conj.mul(&base).mul(&conj.inverse()))?;
            descriptor = StabiliserDescriptor::cyclic(self.group(), conj.clone(), base, generator.clone());
            current = Some(generator);
        }
        Ok(descriptor)
    }

    fn edge_stabiliser(&self, conj: &ElementWord, side: usize) -> StabiliserDescriptor {
        let s = self.split();
        let gens: Vec<ElementWord> = s.sides[side]
            .images()
            .iter()
            .map(|e| s.lift(self.side_vertex(side), e))
            .collect();
        let rendered = format!(
            "{}<{}>{}",
            conj_prefix(self.group(), conj),
            gens.iter().map(|g| self.group().render(g)).collect::<Vec<_>>().join(", "),
            conj_suffix(self.group(), conj)
        );
        StabiliserDescriptor {
            conjugator: conj.clone(),
            base: SubgroupDescriptor::untagged(gens),
            generator: None,
            rendered,
        }
    }

    pub fn vertex_stabiliser(&self, v: &BsVertex) -> StabiliserDescriptor {
        let s = self.split();
        let gens: Vec<ElementWord> = (0..s.vertices[v.orbit].rank())
            .map(|g| ElementWord::gen(s.embed[v.orbit][g]))
            .collect();
        let rendered = format!(
            "{}<{}>{}",
            conj_prefix(self.group(), &v.rep),
            gens.iter().map(|g| self.group().render(g)).collect::<Vec<_>>().join(", "),
            conj_suffix(self.group(), &v.rep)
        );
        StabiliserDescriptor {
            conjugator: v.rep.clone(),
            base: SubgroupDescriptor {
                tag: SubgroupTag::Parabolic {
                    vertices: s.embed[v.orbit].clone(),
                },
                generators: gens,
            },
            generator: None,
            rendered,
        }
    }

    /// Whether `g` fixes every vertex of `path`.
    pub fn fixes_all(&self, g: &ElementWord, path: &[BsVertex]) -> Result<bool> {
        for v in path {
            if &self.translate(g, v)? != v {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Chain of pointwise stabilisers of `γ_n = [p, g^n·p]`, `n = 0..=window`,
    /// with `p` the axis point of `g` nearest the basepoint.
    pub fn stabilisation_probe(&self, g: &ElementWord, window: usize) -> Result<StabilisationReport> {
        let p = match classify_isometry(self, g, &self.basepoint())? {
            IsometryClass::Loxodromic { axis_segment, .. } => axis_segment[0].clone(),
            IsometryClass::Elliptic { .. } => return Err(Error::NotLoxodromic),
        };
        let mut chain: Vec<ChainStep> = Vec::new();
        let mut paths = Vec::new();
        for n in 0..=window {
            let end = self.translate(&g.pow(n as i64), &p)?;
            let path = self.geodesic(&p, &end)?;
            let stab = self.pointwise_stabiliser(&path)?;
            chain.push(ChainStep {
                n,
                length: path.len() - 1,
                stabiliser: stab,
                separating: None,
                separating_rendered: None,
            });
            paths.push(path);
        }
        // Separating elements: something fixing γ_n but moving γ_{n+1}.
        let mut strict = vec![false; window];
        for n in 0..window {
            let cands: Vec<ElementWord> = match &chain[n].stabiliser.generator {
                Some(gen) => vec![gen.clone()],
                None if chain[n].stabiliser.is_trivial() => vec![],
                None => chain[n]
                    .stabiliser
                    .base
                    .generators
                    .iter()
                    .map(|x| chain[n].stabiliser.conjugator.mul(x).mul(&chain[n].stabiliser.conjugator.inverse()))
                    .collect(),
            };
            for c in cands {
                if self.fixes_all(&c, &paths[n])? && !self.fixes_all(&c, &paths[n + 1])? {
                    let c = self.group().normalize(&c)?;
                    chain[n].separating_rendered = Some(self.group().render(&c));
                    chain[n].separating = Some(c);
                    strict[n] = true;
                    break;
                }
            }
        }
        let verdict = if window > 0 && strict.iter().all(|&x| x) {
            StabilisationVerdict::StrictDecreaseWitness
        } else if window > 0 && !strict[window - 1] {
            let mut step = window - 1;
            while step > 0 && !strict[step - 1] {
                step -= 1;
            }
            StabilisationVerdict::StabilisesWithinWindow { step }
        } else {
            StabilisationVerdict::Inconclusive
        };
        Ok(StabilisationReport {
            ray: self.group().render(g),
            window,
            verdict,
            chain,
        })
    }

    /// Ray vertex `r_n` on the axis of `g` from `p` towards `g^{sign·∞}`.
    fn ray_vertex(&self, g: &ElementWord, sign: i8, seg: &[BsVertex], n: usize) -> Result<BsVertex> {
        let tau = seg.len() - 1;
        let (q, r) = (n / tau, n % tau);
        self.translate(&g.pow(sign as i64 * q as i64), &seg[r])
    }

    /// Ultimate translation length of `h` towards the end `ξ = g^{sign·∞}`:
    /// the shift `s` with `h·r_n = r_{n+s}` along a deep stretch of the ray.
    pub fn utl_value(&self, xi: &BoundaryWitness, h: &ElementWord, window: usize) -> Result<i64> {
        let g = &xi.defining;
        let (tau, seg) = match classify_isometry(self, g, &self.basepoint())? {
            IsometryClass::Loxodromic { tau, axis_segment } => (tau, axis_segment),
            IsometryClass::Elliptic { .. } => return Err(Error::NotLoxodromic),
        };
        let seg = if xi.sign > 0 {
            seg
        } else {
            let gp = self.translate(&g.inverse(), &seg[0])?;
            self.geodesic(&seg[0], &gp)?
        };
        debug_assert_eq!(seg.len(), tau + 1);
        let p = seg[0].clone();
        let n0 = self.distance(&p, &self.translate(h, &p)?)? + window;
        let image = self.translate(h, &self.ray_vertex(g, xi.sign, &seg, n0)?)?;
        let k = self.distance(&p, &image)?;
        if self.ray_vertex(g, xi.sign, &seg, k)? != image {
            return Err(Error::NotAStabiliser(format!(
                "{} moves the ray off itself at depth {n0}",
                self.group().render(h)
            )));
        }
        let shift = k as i64 - n0 as i64;
        for n in n0..=n0 + window {
            let target = (n as i64 + shift) as usize;
            if self.translate(h, &self.ray_vertex(g, xi.sign, &seg, n)?)? != self.ray_vertex(g, xi.sign, &seg, target)? {
                return Err(Error::NotAStabiliser(format!(
                    "{} does not shift the ray uniformly within the window",
                    self.group().render(h)
                )));
            }
        }
        Ok(shift)
    }

    /// Closure-under-roots hypothesis: edge images malnormal, root-closed and
    /// with finite intersections between distinct images in one vertex group.
    pub fn roots_closure_check(&self) -> RootsVerdict {
        let s = self.split();
        let mut evidence = Vec::new();
        if s.edge.is_trivial_group() {
            return RootsVerdict::Holds {
                evidence: vec!["edge groups are trivial; malnormality is vacuous".into()],
            };
        }
        let images_at = |v: usize| -> Vec<usize> { (0..2).filter(|&side| self.side_vertex(side) == v).collect() };
        for v in 0..s.vertex_count() {
            let x = &s.vertices[v];
            let name = &s.vertex_names[v];
            let sides = images_at(v);
            let imgs: Vec<ElementWord> = sides.iter().map(|&side| s.sides[side].images()[0].clone()).collect();
            if x.cyclic_structure() == Some(None) {
                for img in &imgs {
                    let q = img.exponent_sum(0);
                    if q.abs() != 1 {
                        return RootsVerdict::FailsAt {
                            vertex: name.clone(),
                            witness: (x.render(&ElementWord::gen(0)), x.render(img)),
                            reason: format!("{} has a root outside the image", x.render(img)),
                        };
                    }
                }
                if imgs.len() == 2 {
                    let (p, q) = (imgs[0].exponent_sum(0), imgs[1].exponent_sum(0));
                    let l = p.abs() * q.abs() / gcd(p.abs(), q.abs());
                    return RootsVerdict::FailsAt {
                        vertex: name.clone(),
                        witness: (x.render(&imgs[0]), x.render(&imgs[1])),
                        reason: format!("distinct images meet in the infinite subgroup <{}>", x.render(&ElementWord::gen_pow(0, l))),
                    };
                }
                evidence.push(format!("{name}: image is the whole cyclic vertex group"));
                continue;
            }
            if let GroupDescriptionKind::Free = kind_of(x) {
                for img in &imgs {
                    if crate::group::free::is_proper_power(img) {
                        return RootsVerdict::FailsAt {
                            vertex: name.clone(),
                            witness: (x.render(&crate::group::free::maximal_root(img).1), x.render(img)),
                            reason: format!("{} is a proper power", x.render(img)),
                        };
                    }
                }
                if imgs.len() == 2 && crate::group::free::conjugate_up_to_inverse(&imgs[0], &imgs[1]) {
                    return RootsVerdict::FailsAt {
                        vertex: name.clone(),
                        witness: (x.render(&imgs[0]), x.render(&imgs[1])),
                        reason: "the two images are conjugate".into(),
                    };
                }
                evidence.push(format!(
                    "{name}: images {} are not proper powers and pairwise non-conjugate",
                    imgs.iter().map(|w| x.render(w)).collect::<Vec<_>>().join(", ")
                ));
                continue;
            }
            return RootsVerdict::Unsupported {
                reason: format!("no malnormality oracle for vertex group {} ({})", name, x.summary()),
            };
        }
        RootsVerdict::Holds { evidence }
    }
}

enum GroupDescriptionKind {
    Free,
    Other,
}

fn kind_of(x: &GroupDescription) -> GroupDescriptionKind {
    match x.spec() {
        crate::group::GroupSpec::Free { .. } => GroupDescriptionKind::Free,
        _ => GroupDescriptionKind::Other,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Least `k ≥ 1` with `w^k ∈ ⟨e⟩` inside the vertex group `x`, or `None` if no power lands there.
fn power_into(
    x: &GroupDescription,
    w: &ElementWord,
    e: &ElementWord,
    t: &crate::group::transversal::Transversal,
) -> Result<Option<u64>> {
    if t.contains(w)? {
        return Ok(Some(1));
    }
    if let Some(modulus) = x.cyclic_structure() {
        let p = x.normalize(w)?.exponent_sum(0);
        let q = x.normalize(e)?.exponent_sum(0);
        return Ok(match modulus {
            None => (p != 0).then(|| (q.abs() / gcd(p, q)) as u64),
            Some(n) => {
                let n = n as i64;
                let d = gcd(q, n);
                Some((d / gcd(p.rem_euclid(n), d)) as u64)
            }
        });
    }
    if let Some(n) = x.order() {
        let mut y = x.normalize(w)?;
        for k in 1..=n {
            if t.contains(&y)? {
                return Ok(Some(k));
            }
            y = x.normalize(&y.mul(w))?;
        }
        return Ok(None);
    }
    if let GroupDescriptionKind::Free = kind_of(x) {
        let (kw, rw, pw) = crate::group::free::maximal_root(w);
        let (ke, re, pe) = crate::group::free::maximal_root(e);
        if kw == ke && (rw == re || rw == re.inverse()) {
            return Ok(Some((pe.abs() / gcd(pw.abs(), pe.abs())) as u64));
        }
        return Ok(None);
    }
    if x.dihedral_label().is_some() && e.len() == 1 {
        // A power of w in ⟨s⟩ commutes with s, so w lies in the centraliser
        // ⟨s, Δ²⟩ (⟨s, Δ⟩ for even labels), whose powers meet ⟨s⟩ only
        // when the Δ-part vanishes; that case was caught above.
        return Ok(None);
    }
    Err(Error::NoIntersectionOracle(format!(
        "powers of {} against <{}> in {}",
        x.render(w),
        x.render(e),
        x.summary()
    )))
}

fn conj_prefix(g: &GroupDescription, c: &ElementWord) -> String {
    if c.is_identity() {
        String::new()
    } else {
        format!("{}·", g.render(c))
    }
}

fn conj_suffix(g: &GroupDescription, c: &ElementWord) -> String {
    if c.is_identity() {
        String::new()
    } else {
        format!("·{}", g.render(&c.inverse()))
    }
}

/// `conjugator · ⟨base⟩ · conjugator⁻¹`; `generator` is the normalised
/// ambient generator when the subgroup is cyclic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabiliserDescriptor {
    pub conjugator: ElementWord,
    pub base: SubgroupDescriptor,
    pub generator: Option<ElementWord>,
    pub rendered: String,
}

impl StabiliserDescriptor {
    pub fn trivial(_g: &GroupDescription) -> Self {
        StabiliserDescriptor {
            conjugator: ElementWord::identity(),
            base: SubgroupDescriptor::trivial(),
            generator: None,
            rendered: "1".into(),
        }
    }

    fn cyclic(g: &GroupDescription, conjugator: ElementWord, base: ElementWord, generator: ElementWord) -> Self {
        StabiliserDescriptor {
            rendered: format!("<{}>", g.render(&generator)),
            conjugator,
            base: SubgroupDescriptor::cyclic(base),
            generator: Some(generator),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.base.tag == SubgroupTag::Trivial
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub n: usize,
    /// Edge count of `γ_n`.
    pub length: usize,
    pub stabiliser: StabiliserDescriptor,
    /// Element of `H_n` moving a vertex of `γ_{n+1}`, verified by direct action.
    pub separating: Option<ElementWord>,
    pub separating_rendered: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabilisationVerdict {
    /// `H_step = H_{step+1} = … = H_window`.
    StabilisesWithinWindow { step: usize },
    /// Every step of the window strictly decreases.
    StrictDecreaseWitness,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilisationReport {
    pub ray: String,
    pub window: usize,
    pub verdict: StabilisationVerdict,
    pub chain: Vec<ChainStep>,
}

/// The end `g^{sign·∞}` of a loxodromic `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    pub defining: ElementWord,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RootsVerdict {
    Holds { evidence: Vec<String> },
    FailsAt { vertex: String, witness: (String, String), reason: String },
    Unsupported { reason: String },
}

impl TreeHandle for BassSerreTree {
    type Vertex = BsVertex;

    fn basepoint(&self) -> BsVertex {
        self.base_vertex(0)
    }

    fn distance(&self, u: &BsVertex, v: &BsVertex) -> Result<usize> {
        Ok(self.relative_path(u.orbit, &u.rep.inverse().mul(&v.rep), v.orbit)?.len() - 1)
    }

    fn geodesic(&self, u: &BsVertex, v: &BsVertex) -> Result<Vec<BsVertex>> {
        self.relative_path(u.orbit, &u.rep.inverse().mul(&v.rep), v.orbit)?
            .iter()
            .map(|x| self.translate(&u.rep, x))
            .collect()
    }

    fn neighbors(&self, v: &BsVertex) -> Result<Neighbors<BsVertex>> {
        let s = self.split();
        let mut out = Vec::new();
        let mut complete = true;
        match s.kind {
            SplitKind::Amalgam => {
                let (reps, c) = &self.reps[v.orbit];
                complete &= *c;
                for x in reps {
                    out.push(self.vertex(1 - v.orbit, &v.rep.mul(&s.lift(v.orbit, x)))?);
                }
            }
            SplitKind::Hnn => {
                let t = ElementWord::gen(s.stable.expect("HNN has a stable letter"));
                for (side, step) in [(1usize, t.clone()), (0, t.inverse())] {
                    let (reps, c) = &self.reps[side];
                    complete &= *c;
                    for x in reps {
                        out.push(self.vertex(0, &v.rep.mul(&s.lift(0, x)).mul(&step))?);
                    }
                }
            }
        }
        Ok(Neighbors { vertices: out, complete })
    }

    fn act(&self, g: &ElementWord, v: &BsVertex) -> Result<BsVertex> {
        self.translate(g, v)
    }

    fn node_budget(&self) -> usize {
        self.node_budget
    }

    fn render_vertex(&self, v: &BsVertex) -> String {
        let name = &self.split().vertex_names[v.orbit];
        if v.rep.is_identity() {
            name.clone()
        } else {
            format!("{}·{}", self.group().render(&v.rep), name)
        }
    }

    /// Exact when the edge group is trivial or the vertex group is abelian:
    /// then a whole direction of neighbours is fixed or none is.
    fn fixed_neighbors(&self, g: &ElementWord, v: &BsVertex, powers: u32) -> Result<Neighbors<BsVertex>> {
        let s = self.split();
        // Powers of g fixing v form k0·ℤ; only those can fix a neighbour.
        let k0 = crate::tree::least_fixing_power(self, g, v, powers)?
            .ok_or_else(|| Error::invalid("fixed_neighbors needs a vertex fixed by a power"))?;
        let powers = powers / k0;
        let z = self.local_element(&g.pow(k0 as i64), v)?.expect("g^k0 fixes v");
        let x_group = &s.vertices[v.orbit];
        let directions: Vec<usize> = match s.kind {
            SplitKind::Amalgam => vec![v.orbit],
            SplitKind::Hnn => vec![1, 0],
        };
        let mut out = Vec::new();
        let mut complete = true;
        for side in directions {
            let t = &s.sides[side];
            let (reps, c) = &self.reps[side];
            let step = match s.kind {
                SplitKind::Amalgam => None,
                SplitKind::Hnn => {
                    let t = ElementWord::gen(s.stable.expect("HNN has a stable letter"));
                    Some(if side == 1 { t } else { t.inverse() })
                }
            };
            let neighbour = |x: &ElementWord| -> Result<BsVertex> {
                let h = v.rep.mul(&s.lift(v.orbit, x));
                match &step {
                    None => self.vertex(1 - v.orbit, &h),
                    Some(st) => self.vertex(0, &h.mul(st)),
                }
            };
            let power_hits = |x: &ElementWord| -> Result<bool> {
                let w = x.inverse().mul(&z).mul(x);
                let mut y = ElementWord::identity();
                for _ in 0..powers {
                    y = y.mul(&w);
                    if t.contains(&y)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            };
            let whole_direction = t.is_trivial_edge() || x_group.is_abelian_variant();
            if whole_direction {
                // x⁻¹ z^k x = z^k: the test does not depend on x.
                if power_hits(&ElementWord::identity())? {
                    complete &= *c;
                    for x in reps {
                        out.push(neighbour(x)?);
                    }
                }
            } else {
                complete &= *c;
                for x in reps {
                    if power_hits(x)? {
                        out.push(neighbour(x)?);
                    }
                }
            }
        }
        Ok(Neighbors { vertices: out, complete })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::{bfs_geodesic, fixed_set_ball};

    #[test]
    fn free_product_distances_match_bfs() {
        let t = BassSerreTree::realize(fixtures::z_star_z()).unwrap();
        let g = t.group().clone();
        let a = t.base_vertex(0);
        let ab_a = t.vertex(0, &g.parse("ab").unwrap()).unwrap();
        assert_eq!(t.distance(&a, &ab_a).unwrap(), 2);
        let bfs = bfs_geodesic(&t, &a, &ab_a, 6).unwrap().unwrap();
        assert_eq!(bfs, t.geodesic(&a, &ab_a).unwrap());
        let b_a = t.vertex(0, &g.parse("b").unwrap()).unwrap();
        let path = t.geodesic(&a, &b_a).unwrap();
        assert_eq!(path, vec![a.clone(), t.base_vertex(1), b_a]);
    }

    #[test]
    fn bs12_fixed_sets() {
        let t = BassSerreTree::realize(fixtures::bs(1, 2)).unwrap();
        let g = t.group().clone();
        let a = g.parse("a").unwrap();
        let x = t.base_vertex(0);
        assert!(classify_isometry(&t, &a, &x).unwrap().is_elliptic());
        let b_x = t.vertex(0, &g.parse("b").unwrap()).unwrap();
        let b2_x = t.vertex(0, &g.parse("b^2").unwrap()).unwrap();
        let binv_x = t.vertex(0, &g.parse("b^-1").unwrap()).unwrap();
        let s = fixed_set_ball(&t, &a, 3, 4).unwrap();
        assert!(s.exhaustive);
        assert!(s.fixed_by_power(1).contains(&&binv_x));
        assert!(!s.fixed_by_power(1).contains(&&b_x));
        assert!(s.fixed_by_power(2).contains(&&b_x));
        assert!(s.fixed_by_power(4).contains(&&b2_x));
        assert!(!s.fixed_by_power(2).contains(&&b2_x));
    }

    #[test]
    fn bs12_chain_and_utl() {
        let t = BassSerreTree::realize(fixtures::bs(1, 2)).unwrap();
        let g = t.group().clone();
        let b = g.parse("b").unwrap();
        let r = t.stabilisation_probe(&b, 4).unwrap();
        assert_eq!(r.verdict, StabilisationVerdict::StrictDecreaseWitness);
        let gens: Vec<String> = r.chain.iter().map(|c| c.stabiliser.rendered.clone()).collect();
        assert_eq!(gens, vec!["<a>", "<a^2>", "<a^4>", "<a^8>", "<a^16>"]);
        let xi = BoundaryWitness {
            defining: b.inverse(),
            sign: 1,
        };
        assert_eq!(t.utl_value(&xi, &b.inverse(), 4).unwrap(), 1);
        assert_eq!(t.utl_value(&xi, &b, 4).unwrap(), -1);
        assert_eq!(t.utl_value(&xi, &g.parse("a").unwrap(), 4).unwrap(), 0);
        assert_eq!(t.utl_value(&xi, &g.parse("b a").unwrap(), 4).unwrap(), -1);
        let far = BoundaryWitness { defining: b.clone(), sign: 1 };
        assert!(matches!(t.utl_value(&far, &g.parse("a").unwrap(), 4), Err(Error::NotAStabiliser(_))));
    }

    #[test]
    fn free_product_stabilises() {
        let t = BassSerreTree::realize(fixtures::z_star_z()).unwrap();
        let r = t.stabilisation_probe(&t.group().parse("ab").unwrap(), 4).unwrap();
        assert_eq!(r.verdict, StabilisationVerdict::StabilisesWithinWindow { step: 1 });
    }

    #[test]
    fn roots_closure_examples() {
        assert!(matches!(
            BassSerreTree::realize(fixtures::z_star_z()).unwrap().roots_closure_check(),
            RootsVerdict::Holds { .. }
        ));
        assert!(matches!(
            BassSerreTree::realize(fixtures::bs(1, 2)).unwrap().roots_closure_check(),
            RootsVerdict::FailsAt { .. }
        ));
        assert!(matches!(
            BassSerreTree::realize(fixtures::free_amalgam("a b a^-1 b^-1", "c d^2")).unwrap().roots_closure_check(),
            RootsVerdict::Holds { .. }
        ));
        assert!(matches!(
            BassSerreTree::realize(fixtures::free_amalgam("a^2", "c d")).unwrap().roots_closure_check(),
            RootsVerdict::FailsAt { .. }
        ));
    }

    #[test]
    fn dihedral_amalgam_edge_stabiliser() {
        let t = BassSerreTree::realize(fixtures::dihedral_amalgam(3, 4)).unwrap();
        let path = vec![t.base_vertex(0), t.base_vertex(1)];
        let s = t.pointwise_stabiliser(&path).unwrap();
        assert_eq!(s.rendered, "<b>");
    }
}
