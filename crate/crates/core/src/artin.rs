//! Presentation-graph analytics for Artin groups: class recognition, uniform
//! exponents, visual-splitting reduction, the dihedral kernel `ℤ × F_k`, the
//! relative pair pipeline and growth witnesses.
//!
//! Absent edges encode `m = ∞`. A label-2 edge contributes no edge to the
//! Coxeter diagram; an absent edge contributes an `∞` edge.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alternative::{
    classify_pair, free_to_length, resolve_vertex, Budgets, FreeCertificate, PairCase, PairVerdict, UnknownReason,
};
use crate::bass_serre::BassSerreTree;
use crate::error::{Error, Result};
use crate::graph::{PresentationGraph, VisualSplitting};
use crate::group::presentation::{CyclicQuotient, TIETZE_BUDGET};
use crate::group::{GroupDescription, GroupSpec};
use crate::tree::{axis_overlap, classify_isometry, TreeHandle};
use crate::word::ElementWord;

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    IntersectionProperty,
    NormaliserStructure,
    HyperbolicType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FlagStatus {
    ByRule { rule: String },
    UnprovenHypothesis,
    Undetermined,
}

impl FlagStatus {
    pub fn holds(&self) -> bool {
        matches!(self, FlagStatus::ByRule { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            FlagStatus::ByRule { rule } => format!("BY-RULE ({rule})"),
            FlagStatus::UnprovenHypothesis => "UNVERIFIED hypothesis".into(),
            FlagStatus::Undetermined => "undetermined".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFlag {
    pub property: Property,
    #[serde(flatten)]
    pub status: FlagStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub vertices: usize,
    pub dihedral: bool,
    pub even: bool,
    pub triangle_free: bool,
    pub two_two_free: bool,
    pub two_dimensional: bool,
    pub fc_type: bool,
    pub spherical: bool,
    pub free_of_infinity: bool,
    /// Coxeter types of the diagram components, when spherical.
    pub spherical_type: Option<Vec<String>>,
    pub flags: Vec<PropertyFlag>,
}

impl ClassificationReport {
    pub fn flag(&self, p: Property) -> &FlagStatus {
        &self
            .flags
            .iter()
            .find(|f| f.property == p)
            .expect("every property is reported")
            .status
    }

    pub fn render(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!("vertices: {}\n", self.vertices);
        for (name, v) in [
            ("dihedral", self.dihedral),
            ("even", self.even),
            ("triangle-free", self.triangle_free),
            ("(2,2)-free", self.two_two_free),
            ("two-dimensional", self.two_dimensional),
            ("FC-type", self.fc_type),
            ("spherical", self.spherical),
            ("free-of-infinity", self.free_of_infinity),
        ] {
            out += &format!("{name}: {}\n", yes(v));
        }
        if let Some(t) = &self.spherical_type {
            out += &format!("spherical type: {}\n", t.join(" × "));
        }
        for f in &self.flags {
            let name = serde_json::to_value(f.property).expect("serialises");
            out += &format!("{}: {}\n", name.as_str().unwrap_or_default(), f.status.describe());
        }
        out
    }
}

/// `1/p + 1/q + 1/r ≤ 1` in exact arithmetic.
fn triangle_two_dimensional(p: u32, q: u32, r: u32) -> bool {
    let (p, q, r) = (p as u64, q as u64, r as u64);
    q * r + p * r + p * q <= p * q * r
}

fn triangles(g: &PresentationGraph) -> Vec<[usize; 3]> {
    let n = g.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.adjacent(a, b) && g.adjacent(b, c) && g.adjacent(a, c) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Maximal cliques (Bron–Kerbosch with pivoting); each sorted, list sorted.
pub fn maximal_cliques(g: &PresentationGraph) -> Vec<Vec<usize>> {
    fn bk(g: &PresentationGraph, r: Vec<usize>, mut p: BTreeSet<usize>, mut x: BTreeSet<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut r = r;
            r.sort_unstable();
            out.push(r);
            return;
        }
        let pivot = *p.iter().chain(x.iter()).max_by_key(|&&u| p.iter().filter(|&&v| g.adjacent(u, v)).count()).expect("nonempty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.adjacent(pivot, v)).collect();
        for v in candidates {
            let mut r2 = r.clone();
            r2.push(v);
            let p2 = p.iter().copied().filter(|&u| g.adjacent(u, v)).collect();
            let x2 = x.iter().copied().filter(|&u| g.adjacent(u, v)).collect();
            bk(g, r2, p2, x2, out);
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    if g.is_empty() {
        return out;
    }
    bk(g, Vec::new(), (0..g.len()).collect(), BTreeSet::new(), &mut out);
    out.sort();
    out
}

/// Finite-type Coxeter classification of the parabolic on `vs`: the type of
/// each diagram component, or `None` when the Coxeter group is infinite.
pub fn coxeter_type(g: &PresentationGraph, vs: &[usize]) -> Option<Vec<String>> {
    // Diagram edges: label ≥ 3; an absent edge is ∞ and already infinite.
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            g.label(u, v)?;
        }
    }
    let diag = |u: usize, v: usize| g.label(u, v).filter(|&m| m >= 3);
    let mut seen = BTreeSet::new();
    let mut types = Vec::new();
    for &s in vs {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for &v in vs {
                if diag(u, v).is_some() && seen.insert(v) {
                    comp.push(v);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        types.push(component_type(&comp, &diag)?);
    }
    types.sort();
    Some(types)
}

fn component_type(comp: &[usize], diag: &dyn Fn(usize, usize) -> Option<u32>) -> Option<String> {
    let n = comp.len();
    let nbrs = |u: usize| -> Vec<usize> { comp.iter().copied().filter(|&v| v != u && diag(u, v).is_some()).collect() };
    let edge_count: usize = comp.iter().map(|&u| nbrs(u).len()).sum::<usize>() / 2;
    if n == 1 {
        return Some("A1".into());
    }
    if edge_count != n - 1 {
        return None;
    }
    if n == 2 {
        let m = diag(comp[0], comp[1]).expect("connected");
        return Some(match m {
            3 => "A2".into(),
            4 => "B2".into(),
            6 => "G2".into(),
            m => format!("I2({m})"),
        });
    }
    let labels: Vec<u32> = comp
        .iter()
        .flat_map(|&u| nbrs(u).into_iter().filter(move |&v| v > u).map(move |v| diag(u, v).expect("edge")))
        .collect();
    if labels.iter().any(|&m| m >= 6) || labels.iter().filter(|&&m| m > 3).count() > 1 {
        return None;
    }
    let branch: Vec<usize> = comp.iter().copied().filter(|&u| nbrs(u).len() >= 3).collect();
    if !branch.is_empty() {
        if branch.len() > 1 || nbrs(branch[0]).len() > 3 || labels.iter().any(|&m| m != 3) {
            return None;
        }
        let c = branch[0];
        let mut arms: Vec<usize> = nbrs(c)
            .into_iter()
            .map(|start| {
                let (mut prev, mut cur, mut len) = (c, start, 1);
                loop {
                    let next: Vec<usize> = nbrs(cur).into_iter().filter(|&v| v != prev).collect();
                    match next.first() {
                        Some(&v) => {
                            prev = cur;
                            cur = v;
                            len += 1;
                        }
                        None => return len,
                    }
                }
            })
            .collect();
        arms.sort_unstable();
        return match arms.as_slice() {
            [1, 1, _] => Some(format!("D{n}")),
            [1, 2, 2] => Some("E6".into()),
            [1, 2, 3] => Some("E7".into()),
            [1, 2, 4] => Some("E8".into()),
            _ => None,
        };
    }
    // A path: read its labels from one end.
    let end = comp.iter().copied().find(|&u| nbrs(u).len() == 1).expect("a tree has leaves");
    let mut seq = Vec::with_capacity(n - 1);
    let (mut prev, mut cur) = (usize::MAX, end);
    while let Some(next) = nbrs(cur).into_iter().find(|&v| v != prev) {
        seq.push(diag(cur, next).expect("edge"));
        prev = cur;
        cur = next;
    }
    let special = seq.iter().position(|&m| m > 3);
    match special {
        None => Some(format!("A{n}")),
        Some(i) => {
            let at_end = i == 0 || i == seq.len() - 1;
            match (seq[i], at_end, n) {
                (4, true, _) => Some(format!("B{n}")),
                (4, false, 4) if i == 1 => Some("F4".into()),
                (5, true, 3) => Some("H3".into()),
                (5, true, 4) => Some("H4".into()),
                _ => None,
            }
        }
    }
}

pub fn classify_graph(g: &PresentationGraph) -> ClassificationReport {
    let n = g.len();
    let edges = g.edges();
    let tris = triangles(g);
    let triangle_free = tris.is_empty();
    let two_dimensional = tris.iter().all(|&[a, b, c]| {
        let l = |u, v| g.label(u, v).expect("triangle edge");
        triangle_two_dimensional(l(a, b), l(b, c), l(a, c))
    });
    let two_two_free = !(0..n).any(|v| edges.iter().filter(|e| e.2 == 2 && (e.0 == v || e.1 == v)).count() >= 2);
    let even = edges.iter().all(|e| e.2 % 2 == 0);
    let all: Vec<usize> = (0..n).collect();
    let spherical_type = coxeter_type(g, &all);
    let spherical = spherical_type.is_some();
    let fc_type = maximal_cliques(g).iter().all(|c| coxeter_type(g, c).is_some());
    let rule = |r: &str| FlagStatus::ByRule { rule: r.into() };
    let hyperbolic = if two_two_free && triangle_free {
        rule("(2,2)-free and triangle-free")
    } else {
        FlagStatus::Undetermined
    };
    let intersection = if two_two_free && triangle_free {
        rule("(2,2)-free and triangle-free")
    } else if two_dimensional && two_two_free {
        rule("two-dimensional and (2,2)-free")
    } else if even && fc_type {
        rule("even and of FC-type")
    } else {
        FlagStatus::UnprovenHypothesis
    };
    let normaliser = if fc_type {
        rule("of FC-type")
    } else if two_dimensional {
        rule("two-dimensional")
    } else {
        FlagStatus::UnprovenHypothesis
    };
    ClassificationReport {
        vertices: n,
        dihedral: n == 2,
        even,
        triangle_free,
        two_two_free,
        two_dimensional,
        fc_type,
        spherical,
        free_of_infinity: g.is_complete(),
        spherical_type,
        flags: vec![
            PropertyFlag {
                property: Property::IntersectionProperty,
                status: intersection,
            },
            PropertyFlag {
                property: Property::NormaliserStructure,
                status: normaliser,
            },
            PropertyFlag {
                property: Property::HyperbolicType,
                status: hyperbolic,
            },
        ],
    }
}

// ---------------------------------------------------------------------------
// Uniform exponents

/// `m' = m/2` for even `m`, `2m` for odd `m`.
pub fn m_prime(m: u32) -> u64 {
    if m % 2 == 0 {
        (m / 2) as u64
    } else {
        2 * m as u64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `N` when `N ≥ 3`, otherwise 4.
pub fn adjusted_exponent(n: u64) -> u64 {
    if n >= 3 {
        n
    } else {
        4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeExponent {
    pub a: String,
    pub b: String,
    pub label: u32,
    pub m_prime: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub edges: Vec<EdgeExponent>,
    /// `lcm` of the `m'` values (1 without edges).
    pub raw: u64,
    pub adjusted: u64,
    /// Relative to spherical parabolics every exponent `≥ 3` works; this is the least.
    pub relative_exponent: u64,
    pub covered_by_theorem: bool,
    pub notes: Vec<String>,
}

impl ExponentReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            out += &format!("edge {} -- {} (m = {}): m' = {}\n", e.a, e.b, e.label, e.m_prime);
        }
        out += &format!("N = {}\nadjusted exponent = {}\nrelative exponent = {}\n", self.raw, self.adjusted, self.relative_exponent);
        out += &format!("covered: {}\n", if self.covered_by_theorem { "yes" } else { "no" });
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

pub fn uniform_exponent(g: &PresentationGraph) -> ExponentReport {
    let edges: Vec<EdgeExponent> = g
        .edges()
        .into_iter()
        .map(|(i, j, m)| EdgeExponent {
            a: g.name(i).into(),
            b: g.name(j).into(),
            label: m,
            m_prime: m_prime(m),
        })
        .collect();
    let raw = edges.iter().fold(1, |acc, e| lcm(acc, e.m_prime));
    let class = classify_graph(g);
    let covered = class.two_two_free && class.triangle_free;
    let mut notes = vec!["optimality of the exponent is not checked".to_string()];
    if !covered {
        notes.push("not covered by the theorem: the graph is not both (2,2)-free and triangle-free".into());
    }
    if raw == 2 {
        notes.push("experiment: exponent 2 is expected to suffice but is not established; try pair checks at n = 2".into());
    }
    ExponentReport {
        edges,
        raw,
        adjusted: adjusted_exponent(raw),
        relative_exponent: 3,
        covered_by_theorem: covered,
        notes,
    }
}

// ---------------------------------------------------------------------------
// Visual splittings and reduction

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSplitting {
    pub gamma1: Vec<String>,
    pub gamma2: Vec<String>,
    pub gamma0: Vec<String>,
}

impl NamedSplitting {
    pub fn new(g: &PresentationGraph, s: &VisualSplitting) -> Self {
        let names = |vs: &[usize]| vs.iter().map(|&v| g.name(v).to_string()).collect();
        NamedSplitting {
            gamma1: names(&s.gamma1),
            gamma2: names(&s.gamma2),
            gamma0: names(&s.gamma0),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "{{{}}} *_{{{}}} {{{}}}",
            self.gamma1.join(","),
            self.gamma0.join(","),
            self.gamma2.join(",")
        )
    }
}

pub fn visual_splittings(g: &PresentationGraph) -> Vec<NamedSplitting> {
    g.visual_splittings().iter().map(|s| NamedSplitting::new(g, s)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum ReductionNode {
    Leaf {
        vertices: Vec<String>,
        group: String,
    },
    Split {
        vertices: Vec<String>,
        splitting: NamedSplitting,
        intersection: FlagStatus,
        normaliser: FlagStatus,
        left: Box<ReductionNode>,
        right: Box<ReductionNode>,
    },
}

impl ReductionNode {
    pub fn leaves(&self) -> Vec<&[String]> {
        match self {
            ReductionNode::Leaf { vertices, .. } => vec![vertices],
            ReductionNode::Split { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }

    pub fn split_count(&self) -> usize {
        match self {
            ReductionNode::Leaf { .. } => 0,
            ReductionNode::Split { left, right, .. } => 1 + left.split_count() + right.split_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ReductionNode::Leaf { .. } => 0,
            ReductionNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            ReductionNode::Leaf { vertices, group } => {
                out.push_str(&format!("{pad}leaf {{{}}}: {group}\n", vertices.join(",")));
            }
            ReductionNode::Split {
                splitting,
                intersection,
                normaliser,
                left,
                right,
                ..
            } => {
                out.push_str(&format!(
                    "{pad}split {}  [intersection: {}; normaliser: {}]\n",
                    splitting.render(),
                    intersection.describe(),
                    normaliser.describe()
                ));
                left.render_into(depth + 1, out);
                right.render_into(depth + 1, out);
            }
        }
    }
}

fn leaf_group(g: &PresentationGraph) -> String {
    match g.len() {
        0 => "trivial".into(),
        1 => "Z".into(),
        2 => match g.label(0, 1) {
            Some(2) => "Z^2".into(),
            Some(m) => format!("dihedral A({m})"),
            None => unreachable!("leaves are complete"),
        },
        n => match coxeter_type(g, &(0..n).collect::<Vec<_>>()) {
            Some(t) => format!("spherical {}", t.join(" × ")),
            None => "free of infinity, not spherical".into(),
        },
    }
}

/// Recursive preferred splittings down to complete subgraphs.
pub fn reduction_report(g: &PresentationGraph) -> ReductionNode {
    let names: Vec<String> = g.names().to_vec();
    match g.preferred_splitting() {
        None => ReductionNode::Leaf {
            vertices: names,
            group: leaf_group(g),
        },
        Some(sp) => {
            let class = classify_graph(g);
            ReductionNode::Split {
                vertices: names,
                splitting: NamedSplitting::new(g, &sp),
                intersection: class.flag(Property::IntersectionProperty).clone(),
                normaliser: class.flag(Property::NormaliserStructure).clone(),
                left: Box::new(reduction_report(&g.induced(&sp.gamma1))),
                right: Box::new(reduction_report(&g.induced(&sp.gamma2))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Dihedral kernel `ℤ × F_k`

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralStructure {
    pub m: u32,
    pub m_prime: u64,
    pub quotient: CyclicQuotient,
    /// Kernel rank `k` read off the abelianization (`rank = k + 1`).
    pub k: usize,
    /// `k` predicted by the Euler characteristic of `A(m)/Z`.
    pub euler_k: usize,
    pub abelianization_rank: usize,
    pub abelianization_torsion: Vec<i64>,
    pub kernel_generators: usize,
    pub kernel_relators: usize,
    pub tietze_moves: usize,
    pub center: String,
    /// Free coordinates of the centre generator in the kernel abelianization.
    pub center_coordinates: Vec<i64>,
    pub center_primitive: bool,
    pub transcript: Vec<String>,
}

impl DihedralStructure {
    pub fn consistent(&self) -> bool {
        self.k == self.euler_k && self.center_primitive && self.abelianization_torsion.is_empty()
    }
}

fn center_word(m: u32) -> ElementWord {
    let ab = ElementWord::gen(0).mul(&ElementWord::gen(1));
    if m % 2 == 0 {
        ab.pow((m / 2) as i64)
    } else {
        ab.pow(m as i64)
    }
}

pub fn dihedral_structure(m: u32) -> Result<DihedralStructure> {
    if m < 3 {
        return Err(Error::invalid("the dihedral structure needs m ≥ 3"));
    }
    let mp = m_prime(m);
    // Both generators to 1 unless m ≡ 0 mod 4, where `ab` would become torsion in the quotient.
    let images = if m % 4 == 0 { vec![0, 1] } else { vec![1, 1] };
    let q = CyclicQuotient {
        images,
        modulus: mp,
    };
    let group = GroupDescription::from_spec(&GroupSpec::dihedral(m))?;
    let pres = group.presentation();
    let mut transcript = vec![
        format!("A({m}) = {}", pres.render()),
        format!("quotient: a ↦ {}, b ↦ {} mod {mp}", q.images[0], q.images[1]),
    ];
    let rs = pres.reidemeister_schreier(&q);
    if rs.index as u64 != mp {
        return Err(Error::invalid(format!("quotient map is not onto: image of size {}", rs.index)));
    }
    let kernel = &rs.presentation;
    transcript.push(format!(
        "kernel (index {}): {} generators, {} relators",
        rs.index,
        kernel.generators.len(),
        kernel.relators.len()
    ));
    let (simple, moves) = kernel.simplify(TIETZE_BUDGET);
    transcript.push(format!("after {moves} Tietze moves: {}", simple.render()));
    let ab = kernel.abelianization();
    let rank = ab.free_rank();
    let torsion: Vec<i64> = ab.torsion().into_iter().map(|d| d as i64).collect();
    transcript.push(format!("abelianization: Z^{rank}{}", torsion.iter().map(|d| format!(" + Z/{d}")).collect::<String>()));
    let z = center_word(m);
    let zk = rs
        .rewrite(&z)
        .ok_or_else(|| Error::invalid("the centre generator does not lie in the kernel"))?;
    let v: Vec<i64> = (0..kernel.generators.len()).map(|g| zk.exponent_sum(g)).collect();
    let (free, tors) = ab.coordinates(&v);
    let content = free.iter().fold(0i128, |acc, &x| {
        let (mut a, mut b) = (acc.abs(), x.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    });
    let primitive = content == 1 && tors.iter().all(|&t| t == 0);
    let center = group.render(&z);
    transcript.push(format!(
        "centre {center} rewrites to {} with coordinates {:?}: {}",
        kernel.generators.render(&zk),
        free,
        if primitive { "primitive" } else { "not primitive" }
    ));
    let euler_k = if m % 2 == 1 { (m - 1) as usize } else { (m / 2) as usize };
    let k = rank.saturating_sub(1);
    transcript.push(format!("k = {k} (rank − 1); Euler characteristic predicts {euler_k}"));
    Ok(DihedralStructure {
        m,
        m_prime: mp,
        quotient: q,
        k,
        euler_k,
        abelianization_rank: rank,
        abelianization_torsion: torsion,
        kernel_generators: kernel.generators.len(),
        kernel_relators: kernel.relators.len(),
        tietze_moves: moves,
        center,
        center_coordinates: free.into_iter().map(|x| x as i64).collect(),
        center_primitive: primitive,
        transcript,
    })
}

// ---------------------------------------------------------------------------
// Relative pair pipeline

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtinPairReport {
    pub exponent: u32,
    pub case: Option<PairCase>,
    pub trace: Vec<String>,
    pub verdict: PairVerdict,
}

fn in_class(g: &PresentationGraph) -> Result<ClassificationReport> {
    let c = classify_graph(g);
    if !(c.two_two_free && c.triangle_free) {
        return Err(Error::UnsupportedWordProblem(
            "pair checks need a (2,2)-free, triangle-free defining graph".into(),
        ));
    }
    Ok(c)
}

struct PairRun<'a> {
    top: GroupDescription,
    g: &'a ElementWord,
    h: &'a ElementWord,
    n: u32,
    budgets: &'a Budgets,
    trace: Vec<String>,
    case: Option<PairCase>,
}

impl PairRun<'_> {
    /// Exact commutator test at `N`, then the word check in the whole group.
    fn decide_at(&mut self, n: u32) -> Result<PairVerdict> {
        let (gn, hn) = (self.g.pow(n as i64), self.h.pow(n as i64));
        if self.top.commute(&gn, &hn)? {
            self.trace.push(format!("[g^{n}, h^{n}] = 1"));
            return Ok(PairVerdict::CommuteWitness { exponent: n });
        }
        let l = self.budgets.verify_length;
        let check = free_to_length(&self.top, &gn, &hn, l)?;
        self.trace.push(format!(
            "[g^{n}, h^{n}] ≠ 1; {} reduced words and {} powers checked up to length {l}",
            check.words_checked, check.power_checks
        ));
        Ok(match check.trivial_word {
            None => PairVerdict::FreeCertificate(FreeCertificate::new(&self.top, self.g, self.h, n, l)),
            Some(w) => PairVerdict::Unknown {
                reason: UnknownReason::ReplayFailed,
                detail: format!("trivial word {w} at exponent {n}"),
            },
        })
    }

    /// `(gl, hl)` are conjugates of `(g, h)` (or of powers) inside `A_Λ`.
    fn descend(&mut self, lambda: &PresentationGraph, gl: &ElementWord, hl: &ElementWord) -> Result<PairVerdict> {
        let local = GroupDescription::from_spec(&GroupSpec::Artin { graph: lambda.clone() })?;
        let (gl, hl) = (local.normalize(gl)?, local.normalize(hl)?);
        let mut support: Vec<usize> = gl.support();
        support.extend(hl.support());
        support.sort_unstable();
        support.dedup();
        if support.len() < lambda.len() {
            let sub = lambda.induced(&support);
            let map: Vec<usize> = (0..lambda.len())
                .map(|v| support.iter().position(|&s| s == v).unwrap_or(usize::MAX))
                .collect();
            self.trace.push(format!("restrict to the standard parabolic on {{{}}}", sub.names().join(",")));
            return self.descend(&sub, &gl.relabel(&map), &hl.relabel(&map));
        }
        let names = lambda.names().join(",");
        match lambda.len() {
            0 | 1 => {
                self.trace.push(format!("cyclic parabolic on {{{names}}}"));
                Ok(PairVerdict::CommuteWitness { exponent: 1 })
            }
            2 => match lambda.label(0, 1) {
                Some(m) => {
                    self.trace.push(format!("dihedral parabolic A({m}) on {{{names}}}: decide at N = {}", self.n));
                    self.decide_at(self.n)
                }
                None => {
                    self.trace.push(format!(
                        "free parabolic on {{{names}}}: non-commuting elements of a free group generate a free group"
                    ));
                    self.decide_at(1)
                }
            },
            _ => self.relative(lambda, &local, &gl, &hl),
        }
    }

    fn relative(&mut self, lambda: &PresentationGraph, local: &GroupDescription, gl: &ElementWord, hl: &ElementWord) -> Result<PairVerdict> {
        let (engine, to_engine) = local
            .artin_engine()
            .ok_or_else(|| Error::invalid("expected an Artin group on three or more vertices"))??;
        let tree = BassSerreTree::realize(engine.clone())?;
        let (ge, he) = (gl.relabel(to_engine), hl.relabel(to_engine));
        let sp = lambda.preferred_splitting().expect("the engine exists only for non-complete graphs");
        self.trace.push(format!("visual splitting {}", NamedSplitting::new(lambda, &sp).render()));
        let report = classify_pair(&tree, &ge, &he, self.budgets);
        self.case = report.case;
        let case = report.case.map_or("undetermined".to_string(), |c| {
            serde_json::to_value(c).expect("serialises").as_str().unwrap_or_default().replace('_', "-")
        });
        self.trace.push(format!("tree case: {case}"));
        match report.verdict {
            PairVerdict::CommonVertexWitness { vertex, .. } => {
                let v = resolve_vertex(&tree, &vertex)?;
                let (zg, zh) = (tree.local_element(&ge, &v)?, tree.local_element(&he, &v)?);
                match (zg, zh) {
                    (Some(zg), Some(zh)) => {
                        let vertex_group = &tree.split().vertices[v.orbit];
                        let sub = vertex_group
                            .artin_graph()
                            .ok_or_else(|| Error::invalid("vertex groups of the engine are Artin groups"))?
                            .clone();
                        self.trace.push(format!("common fixed vertex {}·{}; conjugate into it", vertex.rep, vertex.orbit));
                        self.descend(&sub, &zg, &zh)
                    }
                    _ => {
                        self.trace.push("only proper powers fix the common vertex".into());
                        self.decide_at(self.n)
                    }
                }
            }
            PairVerdict::Unknown { reason, detail } => {
                let shortcut = self.overlap_shortcut(&tree, &ge, &he)?;
                if shortcut {
                    self.decide_at(self.n)
                } else {
                    Ok(PairVerdict::Unknown { reason, detail })
                }
            }
            PairVerdict::FreeCertificate(cert) => {
                self.trace.push(format!("ping-pong on the splitting tree at exponent {}", cert.exponent));
                self.decide_at(self.n)
            }
            PairVerdict::CommuteWitness { .. } | PairVerdict::CommonBoundaryWitness { .. } => self.decide_at(self.n),
        }
    }

    /// Long axis overlaps force the powers to commute, so an exact commutator check decides.
    fn overlap_shortcut(&mut self, tree: &BassSerreTree, g: &ElementWord, h: &ElementWord) -> Result<bool> {
        let b = tree.basepoint();
        let (cg, ch) = (classify_isometry(tree, g, &b)?, classify_isometry(tree, h, &b)?);
        if cg.is_elliptic() || ch.is_elliptic() {
            return Ok(false);
        }
        let threshold = 2 * cg.tau().max(ch.tau()) + 2;
        let ov = axis_overlap(tree, g, h, self.budgets.window, self.budgets.max_power)?;
        let long = ov.edges.map_or(false, |e| e >= threshold);
        self.trace.push(format!(
            "axis overlap {:?} against threshold {threshold}{}",
            ov.edges,
            if long { ": exact commutator check" } else { "" }
        ));
        Ok(long)
    }
}

/// Power alternative for a pair in a (2,2)-free, triangle-free Artin group, at
/// the adjusted uniform exponent, by descent through visual splittings.
pub fn pair_check_artin(graph: &PresentationGraph, g: &ElementWord, h: &ElementWord, budgets: &Budgets) -> Result<ArtinPairReport> {
    in_class(graph)?;
    let top = GroupDescription::from_spec(&GroupSpec::Artin { graph: graph.clone() })?;
    let n = uniform_exponent(graph).adjusted as u32;
    let mut run = PairRun {
        top: top.clone(),
        g,
        h,
        n,
        budgets,
        trace: vec![format!("uniform exponent N = {n}")],
        case: None,
    };
    let verdict = if top.commute(g, h)? {
        run.trace.push("g and h commute".into());
        PairVerdict::CommuteWitness { exponent: 1 }
    } else {
        run.descend(graph, g, h)?
    };
    Ok(ArtinPairReport {
        exponent: n,
        case: run.case,
        trace: run.trace,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// Growth witnesses

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthAttempt {
    pub s: String,
    pub t: String,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub m: u32,
    pub attempts: Vec<GrowthAttempt>,
    /// `None` when every pair was exhausted.
    pub certificate: Option<FreeCertificate>,
}

/// Searches `S` for `s, t` with `⟨s^m, t^m⟩` free up to length `l`.
pub fn growth_witness(graph: &PresentationGraph, s: &[ElementWord], m: Option<u32>, l: usize) -> Result<GrowthReport> {
    let class = classify_graph(graph);
    if !(class.two_two_free && class.triangle_free) || class.spherical {
        return Err(Error::invalid(
            "precondition violated: the defining graph must be (2,2)-free, triangle-free and not spherical",
        ));
    }
    let group = GroupDescription::from_spec(&GroupSpec::Artin { graph: graph.clone() })?;
    let m = m.unwrap_or(uniform_exponent(graph).adjusted as u32);
    let mut attempts = Vec::new();
    for (i, x) in s.iter().enumerate() {
        for y in &s[i + 1..] {
            let (xm, ym) = (x.pow(m as i64), y.pow(m as i64));
            let outcome = if group.commute(&xm, &ym)? {
                "powers commute".to_string()
            } else {
                let check = free_to_length(&group, &xm, &ym, l)?;
                match check.trivial_word {
                    None => {
                        attempts.push(GrowthAttempt {
                            s: group.render(x),
                            t: group.render(y),
                            outcome: format!("free to length {l}"),
                        });
                        return Ok(GrowthReport {
                            m,
                            attempts,
                            certificate: Some(FreeCertificate::new(&group, x, y, m, l)),
                        });
                    }
                    Some(w) => format!("trivial word {w}"),
                }
            };
            attempts.push(GrowthAttempt {
                s: group.render(x),
                t: group.render(y),
                outcome,
            });
        }
    }
    Ok(GrowthReport {
        m,
        attempts,
        certificate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alternative::verify_free_certificate;
    use crate::fixtures::{path34, square3};

    fn edge(m: u32) -> PresentationGraph {
        PresentationGraph::from_edges(&["a", "b"], &[("a", "b", m)]).unwrap()
    }

    #[test]
    fn exponents_for_single_edges() {
        for (m, raw, adj) in [(3, 6, 6), (4, 2, 4), (5, 10, 10), (6, 3, 3)] {
            let r = uniform_exponent(&edge(m));
            assert_eq!((r.raw, r.adjusted), (raw, adj), "m = {m}");
        }
        let two = PresentationGraph::from_edges(&["a", "b", "c"], &[("a", "b", 4), ("b", "c", 6)]).unwrap();
        let r = uniform_exponent(&two);
        assert_eq!(r.edges.iter().map(|e| e.m_prime).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(r.raw, 6);
    }

    #[test]
    fn triangle_237_is_two_dimensional() {
        let g = PresentationGraph::from_edges(&["r", "s", "t"], &[("r", "s", 2), ("s", "t", 3), ("r", "t", 7)]).unwrap();
        let c = classify_graph(&g);
        assert!(c.two_dimensional);
        assert!(!c.triangle_free);
        assert!(!c.spherical);
        // (2,3,5) is H3: spherical, hence not two-dimensional.
        let h3 = PresentationGraph::from_edges(&["r", "s", "t"], &[("r", "s", 2), ("s", "t", 3), ("r", "t", 5)]).unwrap();
        let c = classify_graph(&h3);
        assert_eq!(c.spherical_type, Some(vec!["H3".to_string()]));
        assert!(!c.two_dimensional && c.fc_type);
    }

    #[test]
    fn coxeter_tables() {
        let path = |labels: &[u32]| {
            let names: Vec<String> = (0..=labels.len()).map(|i| format!("v{i}")).collect();
            let mut g = PresentationGraph::new(names.clone());
            for i in 0..names.len() {
                for j in i + 1..names.len() {
                    let m = if j == i + 1 { labels[i] } else { 2 };
                    g.add_edge(i, j, m).unwrap();
                }
            }
            coxeter_type(&g, &(0..names.len()).collect::<Vec<_>>())
        };
        assert_eq!(path(&[3, 3, 3]), Some(vec!["A4".into()]));
        assert_eq!(path(&[4, 3, 3]), Some(vec!["B4".into()]));
        assert_eq!(path(&[3, 4, 3]), Some(vec!["F4".into()]));
        assert_eq!(path(&[5, 3, 3]), Some(vec!["H4".into()]));
        assert_eq!(path(&[5, 3, 3, 3]), None);
        assert_eq!(path(&[3, 4, 3, 3]), None);
        assert_eq!(path(&[4, 3, 4]), None);
        assert_eq!(path(&[6, 3]), None);
    }

    #[test]
    fn two_two_and_dihedral_flags() {
        let g = PresentationGraph::from_edges(&["a", "b", "c"], &[("a", "b", 2), ("b", "c", 2)]).unwrap();
        assert!(!classify_graph(&g).two_two_free);
        let c = classify_graph(&edge(3));
        assert!(c.dihedral && c.spherical && c.fc_type);
        let p = classify_graph(&path34());
        assert!(p.flag(Property::HyperbolicType).holds());
        assert!(p.flag(Property::IntersectionProperty).holds());
        assert!(!p.spherical && p.fc_type);
    }

    #[test]
    fn splittings_and_reduction() {
        let p = path34();
        let s = visual_splittings(&p);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].gamma0, vec!["b"]);
        let r = reduction_report(&p);
        assert_eq!(r.split_count(), 1);
        assert_eq!(r.leaves(), vec![&["a".to_string(), "b".into()][..], &["b".to_string(), "c".into()][..]]);
        let sq = visual_splittings(&square3());
        let seps: Vec<Vec<String>> = sq.iter().map(|s| s.gamma0.clone()).collect();
        assert_eq!(seps, vec![vec!["a".to_string(), "c".into()], vec!["b".to_string(), "d".into()]]);
        let star = PresentationGraph::from_edges(&["x", "p", "q", "r"], &[("x", "p", 3), ("x", "q", 3), ("x", "r", 3)]).unwrap();
        let r = reduction_report(&star);
        assert_eq!((r.split_count(), r.depth(), r.leaves().len()), (2, 2, 3));
        let k3 = PresentationGraph::from_edges(&["a", "b", "c"], &[("a", "b", 3), ("b", "c", 3), ("a", "c", 2)]).unwrap();
        assert_eq!(reduction_report(&k3).leaves().len(), 1);
    }

    #[test]
    fn dihedral_kernels() {
        let d3 = dihedral_structure(3).unwrap();
        assert_eq!((d3.m_prime, d3.k, d3.abelianization_rank), (6, 2, 3));
        assert!(d3.consistent(), "{:#?}", d3.transcript);
        for m in [4, 5, 6, 8] {
            let d = dihedral_structure(m).unwrap();
            assert_eq!(d.abelianization_rank, d.k + 1);
            assert!(d.consistent(), "m = {m}: {:#?}", d.transcript);
        }
        assert_eq!(dihedral_structure(6).unwrap().m_prime, 3);
    }

    #[test]
    fn pair_pipeline_examples() {
        let b = Budgets {
            verify_length: 6,
            ..Budgets::default()
        };
        let p = path34();
        let grp = GroupDescription::from_spec(&GroupSpec::Artin { graph: p.clone() }).unwrap();
        let w = |s: &str| grp.parse(s).unwrap();
        let r = pair_check_artin(&p, &w("a"), &w("c"), &b).unwrap();
        match &r.verdict {
            PairVerdict::FreeCertificate(c) => assert_eq!(c.exponent, 1),
            v => panic!("{v:?}"),
        }
        let g = w("a*b*c^-1");
        let r = pair_check_artin(&p, &g, &g.inverse(), &b).unwrap();
        assert_eq!(r.verdict, PairVerdict::CommuteWitness { exponent: 1 });
        let r = pair_check_artin(&p, &w("a*b"), &w("b*c"), &b).unwrap();
        if let PairVerdict::FreeCertificate(c) = &r.verdict {
            assert!(c.exponent >= 3);
            assert!(verify_free_certificate(c, 4).unwrap().ok);
        }
        let tri = PresentationGraph::from_edges(&["a", "b", "c"], &[("a", "b", 3), ("b", "c", 3), ("a", "c", 3)]).unwrap();
        assert!(matches!(
            pair_check_artin(&tri, &ElementWord::gen(0), &ElementWord::gen(1), &b),
            Err(Error::UnsupportedWordProblem(_))
        ));
    }

    #[test]
    fn growth_preconditions_and_free_vertices() {
        assert!(growth_witness(&edge(3), &[ElementWord::gen(0), ElementWord::gen(1)], None, 4).is_err());
        let two = PresentationGraph::new(["a", "c"]);
        let r = growth_witness(&two, &[ElementWord::gen(0), ElementWord::gen(1)], Some(5), 6).unwrap();
        let c = r.certificate.expect("F2 is free");
        assert_eq!((c.g.as_str(), c.h.as_str()), ("a", "c"));
    }
}
