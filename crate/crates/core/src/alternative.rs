//! The pair pipeline: case analysis on a tree, ping-pong certificates with
//! independent replay, law checks and power-alternative exponent estimates.
//!
//! Freeness is only ever claimed up to a verified word length `L`: every
//! nontrivial reduced word of length `≤ L` in `g^n, h^n` has a nontrivial
//! normal form. Because a trivial word stays trivial under cyclic
//! permutation and inversion, it suffices to test reduced words starting with
//! `x` and the pure powers `y^k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bass_serre::{BassSerreTree, BoundaryWitness, BsVertex, StabilisationVerdict};
use crate::error::{Error, Result};
use crate::group::{GroupDescription, GroupSpec};
use crate::tree::{axis_window, classify_isometry, least_fixing_power, IsometryClass, TreeHandle};
use crate::word::{Alphabet, ElementWord, Letter};

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_VERIFY_LENGTH: usize = 10;
pub const DEFAULT_MAX_EXPONENT: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// `L` for word enumeration.
    pub verify_length: usize,
    /// `n_max` for exponent searches.
    pub max_exponent: u32,
    /// `K`: powers tried when sampling stable fixed sets.
    pub max_power: u32,
    /// `W`: fundamental domains on either side of an axis anchor.
    pub window: usize,
    /// Powers `±1..=±P` applied in the sampled ping-pong check.
    pub sample_powers: i64,
    /// `k ≤ K!` search bound for the mixed unbounded case.
    pub factorial_bound: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            verify_length: DEFAULT_VERIFY_LENGTH,
            max_exponent: DEFAULT_MAX_EXPONENT,
            max_power: 6,
            window: crate::bass_serre::DEFAULT_WINDOW,
            sample_powers: 3,
            factorial_bound: 6,
        }
    }
}

// ---------------------------------------------------------------------------
// Word enumeration

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordCheck {
    pub length: usize,
    /// Reduced words starting with `x`.
    pub words_checked: u64,
    /// Pure powers `y^k`, `1 ≤ k ≤ length`.
    pub power_checks: u64,
    /// Shortest (then least) trivial word found, over letters `x`, `y`.
    pub trivial_word: Option<String>,
}

impl WordCheck {
    pub fn passed(&self) -> bool {
        self.trivial_word.is_none()
    }
}

const LETTERS: [(usize, bool); 4] = [(0, false), (0, true), (1, false), (1, true)];

fn xy_render(word: &[u8]) -> String {
    let w = ElementWord::from_letters(word.iter().map(|&i| Letter::new(LETTERS[i as usize].0, LETTERS[i as usize].1)));
    Alphabet::new(["x", "y"]).render(&w)
}

/// Number of reduced words of length `1..=l` starting with `x`: `(3^l − 1)/2`.
pub fn candidate_count(l: usize) -> u64 {
    (3u64.pow(l as u32) - 1) / 2
}

/// Exhaustive check that no nontrivial reduced word of length `≤ l` in `x, y` is trivial in `group`.
pub fn free_to_length(group: &GroupDescription, x: &ElementWord, y: &ElementWord, l: usize) -> Result<WordCheck> {
    let pieces: Vec<ElementWord> = [x.clone(), x.inverse(), y.clone(), y.inverse()]
        .iter()
        .map(|p| group.normalize(p))
        .collect::<Result<_>>()?;
    let mut power_checks = 0;
    let mut found: Option<Vec<u8>> = None;
    let mut acc = ElementWord::identity();
    for k in 1..=l {
        acc = group.normalize(&acc.mul(&pieces[2]))?;
        power_checks += 1;
        if acc.is_identity() {
            found = Some(vec![2; k]);
            break;
        }
    }
    if l == 0 {
        return Ok(WordCheck {
            length: 0,
            words_checked: 0,
            power_checks: 0,
            trivial_word: None,
        });
    }
    // Seeds: all reduced prefixes of length ≤ 3 starting with x, searched in parallel.
    let mut seeds: Vec<Vec<u8>> = vec![vec![0]];
    for _ in 1..l.min(3) {
        seeds = seeds
            .into_iter()
            .flat_map(|s| {
                let last = *s.last().unwrap();
                (0u8..4).filter(move |&c| c != last ^ 1).map(move |c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    let shallow = seeds[0].len();
    // Words shorter than the seeds are checked once, sequentially.
    let mut words_checked = 0u64;
    let mut shallow_found: Option<Vec<u8>> = None;
    {
        let mut stack: Vec<(Vec<u8>, ElementWord)> = vec![(vec![0], pieces[0].clone())];
        while let Some((w, nf)) = stack.pop() {
            if w.len() >= shallow {
                continue;
            }
            words_checked += 1;
            if nf.is_identity() {
                keep_least(&mut shallow_found, w);
                continue;
            }
            let last = *w.last().unwrap();
            for c in (0u8..4).filter(|&c| c != last ^ 1) {
                let mut w2 = w.clone();
                w2.push(c);
                stack.push((w2, group.normalize(&nf.mul(&pieces[c as usize]))?));
            }
        }
    }
    let results: Vec<Result<(u64, Option<Vec<u8>>)>> = seeds
        .par_iter()
        .map(|seed| {
            let nf = group.normalize(&seed.iter().fold(ElementWord::identity(), |a, &c| a.mul(&pieces[c as usize])))?;
            let mut count = 0u64;
            let mut best = None;
            let mut stack = vec![(seed.clone(), nf)];
            while let Some((w, nf)) = stack.pop() {
                count += 1;
                if nf.is_identity() {
                    keep_least(&mut best, w);
                    continue;
                }
                if w.len() == l {
                    continue;
                }
                let last = *w.last().unwrap();
                for c in (0u8..4).filter(|&c| c != last ^ 1) {
                    let mut w2 = w.clone();
                    w2.push(c);
                    stack.push((w2, group.normalize(&nf.mul(&pieces[c as usize]))?));
                }
            }
            Ok((count, best))
        })
        .collect();
    let mut best = shallow_found;
    for r in results {
        let (c, b) = r?;
        words_checked += c;
        if let Some(b) = b {
            keep_least(&mut best, b);
        }
    }
    if let Some(f) = found {
        keep_least(&mut best, f);
    }
    Ok(WordCheck {
        length: l,
        words_checked,
        power_checks,
        trivial_word: best.map(|w| xy_render(&w)),
    })
}

fn keep_least(best: &mut Option<Vec<u8>>, w: Vec<u8>) {
    let better = match best {
        None => true,
        Some(b) => (w.len(), &w) < (b.len(), b),
    };
    if better {
        *best = Some(w);
    }
}

// ---------------------------------------------------------------------------
// Ping-pong sets

/// A vertex as it appears in a certificate: orbit name and coset representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRef {
    pub orbit: String,
    pub rep: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PingPongSet<V> {
    /// Vertices off `segment` whose projection onto it has index in `lo..=hi`.
    OffSegment { segment: Vec<V>, lo: usize, hi: usize },
    /// Vertices whose projection onto `segment` has index outside `lo..=hi`.
    Beyond { segment: Vec<V>, lo: usize, hi: usize },
}

impl<V: Clone> PingPongSet<V> {
    pub fn segment(&self) -> &[V] {
        match self {
            PingPongSet::OffSegment { segment, .. } | PingPongSet::Beyond { segment, .. } => segment,
        }
    }

    fn map<W>(&self, f: impl Fn(&V) -> Result<W>) -> Result<PingPongSet<W>> {
        Ok(match self {
            PingPongSet::OffSegment { segment, lo, hi } => PingPongSet::OffSegment {
                segment: segment.iter().map(f).collect::<Result<_>>()?,
                lo: *lo,
                hi: *hi,
            },
            PingPongSet::Beyond { segment, lo, hi } => PingPongSet::Beyond {
                segment: segment.iter().map(f).collect::<Result<_>>()?,
                lo: *lo,
                hi: *hi,
            },
        })
    }
}

/// Index of the projection of `x` onto `segment` and the distance to it.
pub fn project<T: TreeHandle + ?Sized>(t: &T, segment: &[T::Vertex], x: &T::Vertex) -> Result<(usize, usize)> {
    let mut best = (0, usize::MAX);
    for (i, v) in segment.iter().enumerate() {
        let d = t.distance(x, v)?;
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}

pub fn in_set<T: TreeHandle + ?Sized>(t: &T, s: &PingPongSet<T::Vertex>, x: &T::Vertex) -> Result<bool> {
    let (i, d) = project(t, s.segment(), x)?;
    Ok(match s {
        PingPongSet::OffSegment { lo, hi, .. } => d > 0 && *lo <= i && i <= *hi,
        PingPongSet::Beyond { lo, hi, .. } => i < *lo || i > *hi,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongReport {
    /// Sampled vertices: both segments and their (possibly truncated) neighbours.
    pub samples: usize,
    pub in_s_g: usize,
    pub in_s_h: usize,
    pub violation: Option<String>,
}

impl PingPongReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none() && self.in_s_g > 0 && self.in_s_h > 0
    }
}

/// Checks `g^{kn}·S_h ⊆ S_g`, `h^{kn}·S_g ⊆ S_h` for `1 ≤ |k| ≤ powers` and
/// `S_g ∩ S_h = ∅` on the vertices of both segments and their neighbours.
pub fn ping_pong_check<T: TreeHandle + ?Sized>(
    t: &T,
    g: &ElementWord,
    h: &ElementWord,
    n: u32,
    s_g: &PingPongSet<T::Vertex>,
    s_h: &PingPongSet<T::Vertex>,
    powers: i64,
) -> Result<PingPongReport> {
    let mut sample: Vec<T::Vertex> = Vec::new();
    for v in s_g.segment().iter().chain(s_h.segment()) {
        sample.push(v.clone());
        sample.extend(t.neighbors(v)?.vertices);
    }
    sample.sort();
    sample.dedup();
    let render = |v: &T::Vertex| t.render_vertex(v);
    let mut report = PingPongReport {
        samples: sample.len(),
        in_s_g: 0,
        in_s_h: 0,
        violation: None,
    };
    let ks: Vec<i64> = (1..=powers).flat_map(|k| [k, -k]).collect();
    for x in &sample {
        let a = in_set(t, s_g, x)?;
        let b = in_set(t, s_h, x)?;
        report.in_s_g += a as usize;
        report.in_s_h += b as usize;
        if a && b {
            report.violation = Some(format!("{} lies in both sets", render(x)));
            return Ok(report);
        }
        let (mover, target, name) = match (a, b) {
            (false, true) => (g, s_g, "g"),
            (true, false) => (h, s_h, "h"),
            _ => continue,
        };
        for &k in &ks {
            let y = t.act(&mover.pow(k * n as i64), x)?;
            if !in_set(t, target, &y)? {
                report.violation = Some(format!("{name}^{} sends {} to {}", k * n as i64, render(x), render(&y)));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongSets {
    pub s_g: PingPongSet<VertexRef>,
    pub s_h: PingPongSet<VertexRef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeCertificate {
    pub schema_version: u32,
    pub tool_version: String,
    pub group: GroupSpec,
    pub g: String,
    pub h: String,
    pub exponent: u32,
    pub verified_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ping_pong: Option<PingPongSets>,
}

impl FreeCertificate {
    pub fn new(group: &GroupDescription, g: &ElementWord, h: &ElementWord, exponent: u32, verified_length: usize) -> Self {
        FreeCertificate {
            schema_version: CERTIFICATE_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            group: group.spec().clone(),
            g: group.render(g),
            h: group.render(h),
            exponent,
            verified_length,
            ping_pong: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: FreeCertificate = serde_json::from_str(text).map_err(|e| {
            Error::parse(String::new(), e.column(), format!("certificate JSON, line {}: {e}", e.line()))
        })?;
        if c.schema_version != CERTIFICATE_SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported certificate schema {}", c.schema_version)));
        }
        Ok(c)
    }
}

pub fn vertex_ref(t: &BassSerreTree, v: &BsVertex) -> VertexRef {
    VertexRef {
        orbit: t.split().vertex_names[v.orbit].clone(),
        rep: t.group().render(&v.rep),
    }
}

pub fn resolve_vertex(t: &BassSerreTree, v: &VertexRef) -> Result<BsVertex> {
    let orbit = t
        .split()
        .vertex_names
        .iter()
        .position(|n| n == &v.orbit)
        .ok_or_else(|| Error::invalid(format!("unknown vertex group `{}`", v.orbit)))?;
    t.vertex(orbit, &t.group().parse(&v.rep)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeVerification {
    pub ok: bool,
    pub words: WordCheck,
    pub ping_pong: Option<PingPongReport>,
}

/// Replays a certificate from its own contents only.
pub fn verify_free_certificate(cert: &FreeCertificate, length: usize) -> Result<FreeVerification> {
    let group = GroupDescription::from_spec(&cert.group)?;
    let g = group.parse(&cert.g)?;
    let h = group.parse(&cert.h)?;
    let n = cert.exponent as i64;
    let words = free_to_length(&group, &g.pow(n), &h.pow(n), length)?;
    let ping_pong = match &cert.ping_pong {
        None => None,
        Some(sets) => {
            let t = BassSerreTree::realize(group.clone())?;
            let s_g = sets.s_g.map(|v| resolve_vertex(&t, v))?;
            let s_h = sets.s_h.map(|v| resolve_vertex(&t, v))?;
            Some(ping_pong_check(&t, &g, &h, cert.exponent, &s_g, &s_h, Budgets::default().sample_powers)?)
        }
    };
    let ok = words.passed() && ping_pong.as_ref().map_or(true, |p| p.passed());
    Ok(FreeVerification { ok, words, ping_pong })
}

// ---------------------------------------------------------------------------
// Pair classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCase {
    Commuting,
    EllipticElliptic,
    MixedBounded,
    MixedUnbounded,
    LoxLoxBounded,
    LoxLoxUnbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownReason {
    WindowExhausted,
    StabilisationUnverified,
    OracleMissing,
    ExponentExhausted,
    ReplayFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PairVerdict {
    FreeCertificate(FreeCertificate),
    CommuteWitness {
        exponent: u32,
    },
    CommonVertexWitness {
        vertex: VertexRef,
        exponent: u32,
    },
    CommonBoundaryWitness {
        boundary: BoundaryWitness,
        exponent: u32,
        utl_g: i64,
        utl_h: i64,
    },
    Unknown {
        reason: UnknownReason,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub case: Option<PairCase>,
    pub verdict: PairVerdict,
}

fn unknown(case: Option<PairCase>, reason: UnknownReason, detail: impl Into<String>) -> PairReport {
    PairReport {
        case,
        verdict: PairVerdict::Unknown {
            reason,
            detail: detail.into(),
        },
    }
}

fn oracle_reason(e: &Error) -> UnknownReason {
    match e {
        Error::ExpansionBudgetExceeded { .. } => UnknownReason::WindowExhausted,
        _ => UnknownReason::OracleMissing,
    }
}

/// Case analysis on the Bass–Serre tree; errors become `Unknown` reasons.
pub fn classify_pair(t: &BassSerreTree, g: &ElementWord, h: &ElementWord, b: &Budgets) -> PairReport {
    match classify_pair_inner(t, g, h, b) {
        Ok(r) => r,
        Err(e) => unknown(None, oracle_reason(&e), e.to_string()),
    }
}

fn classify_pair_inner(t: &BassSerreTree, g: &ElementWord, h: &ElementWord, b: &Budgets) -> Result<PairReport> {
    let group = t.group();
    let g = group.normalize(g)?;
    let h = group.normalize(h)?;
    if group.commute(&g, &h)? {
        return Ok(PairReport {
            case: Some(PairCase::Commuting),
            verdict: PairVerdict::CommuteWitness { exponent: 1 },
        });
    }
    let cg = classify_isometry(t, &g, &t.basepoint())?;
    let ch = classify_isometry(t, &h, &t.basepoint())?;
    match (&cg, &ch) {
        (IsometryClass::Elliptic { fixed: p }, IsometryClass::Elliptic { fixed: q }) => elliptic_pair(t, &g, &h, p, q, b),
        (IsometryClass::Elliptic { .. }, IsometryClass::Loxodromic { .. }) => mixed_pair(t, &g, &h, false, b),
        (IsometryClass::Loxodromic { .. }, IsometryClass::Elliptic { .. }) => mixed_pair(t, &h, &g, true, b),
        _ => lox_pair(t, &g, &h, b),
    }
}

fn finish_free(
    t: &BassSerreTree,
    g: &ElementWord,
    h: &ElementWord,
    n: u32,
    case: PairCase,
    sets: (PingPongSet<BsVertex>, PingPongSet<BsVertex>),
    b: &Budgets,
) -> Result<PairReport> {
    let words = free_to_length(t.group(), &g.pow(n as i64), &h.pow(n as i64), b.verify_length)?;
    if let Some(w) = words.trivial_word {
        return Ok(unknown(Some(case), UnknownReason::ReplayFailed, format!("trivial word {w} despite ping-pong sets")));
    }
    let mut cert = FreeCertificate::new(t.group(), g, h, n, b.verify_length);
    cert.ping_pong = Some(PingPongSets {
        s_g: sets.0.map(|v| Ok(vertex_ref(t, v)))?,
        s_h: sets.1.map(|v| Ok(vertex_ref(t, v)))?,
    });
    Ok(PairReport {
        case: Some(case),
        verdict: PairVerdict::FreeCertificate(cert),
    })
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Stable fixed sets are convex and contain `p` (resp. `q`), so on `[p, q]`
/// they are an initial and a final segment; disjoint iff those do not meet.
fn elliptic_pair(
    t: &BassSerreTree,
    g: &ElementWord,
    h: &ElementWord,
    p: &BsVertex,
    q: &BsVertex,
    b: &Budgets,
) -> Result<PairReport> {
    let case = Some(PairCase::EllipticElliptic);
    let bridge = t.geodesic(p, q)?;
    let mut last_g = 0;
    let mut kg = 1;
    for (i, v) in bridge.iter().enumerate() {
        match least_fixing_power(t, g, v, b.max_power)? {
            Some(k) => {
                last_g = i;
                kg = k;
            }
            None => break,
        }
    }
    let mut first_h = bridge.len() - 1;
    let mut kh = 1;
    for (i, v) in bridge.iter().enumerate().rev() {
        match least_fixing_power(t, h, v, b.max_power)? {
            Some(k) => {
                first_h = i;
                kh = k;
            }
            None => break,
        }
    }
    if last_g >= first_h {
        let v = &bridge[first_h];
        let kg = least_fixing_power(t, g, v, b.max_power)?.expect("fixed on the initial segment");
        let n = lcm(kg, kh);
        return Ok(PairReport {
            case,
            verdict: PairVerdict::CommonVertexWitness {
                vertex: vertex_ref(t, v),
                exponent: n,
            },
        });
    }
    let _ = kg;
    let seg = bridge[last_g..=first_h].to_vec();
    let end = seg.len() - 1;
    let s_g = PingPongSet::OffSegment {
        segment: seg.clone(),
        lo: 0,
        hi: 0,
    };
    let s_h = PingPongSet::OffSegment {
        segment: seg,
        lo: end,
        hi: end,
    };
    let report = ping_pong_check(t, g, h, 1, &s_g, &s_h, b.sample_powers)?;
    if !report.passed() {
        return Ok(unknown(
            case,
            UnknownReason::ReplayFailed,
            report.violation.unwrap_or_else(|| "empty sampled ping-pong set".into()),
        ));
    }
    finish_free(t, g, h, 1, PairCase::EllipticElliptic, (s_g, s_h), b)
}

/// `e` elliptic, `l` loxodromic; `swapped` restores the caller's order.
fn mixed_pair(t: &BassSerreTree, e: &ElementWord, l: &ElementWord, swapped: bool, b: &Budgets) -> Result<PairReport> {
    let (tau, axis) = axis_window(t, l, b.window)?;
    let mut fixed = Vec::new();
    for (i, v) in axis.iter().enumerate() {
        if least_fixing_power(t, e, v, b.max_power)?.is_some() {
            fixed.push(i);
        }
    }
    let last = axis.len() - 1;
    let (lo, hi) = match (fixed.first(), fixed.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => {
            let p = match classify_isometry(t, e, &t.basepoint())? {
                IsometryClass::Elliptic { fixed } => fixed,
                IsometryClass::Loxodromic { .. } => unreachable!("classified elliptic"),
            };
            let (c, _) = project(t, &axis, &p)?;
            (c, c)
        }
    };
    if lo == 0 || hi == last {
        return mixed_unbounded(t, e, l, swapped, lo == 0, hi == last, b);
    }
    let case = Some(PairCase::MixedBounded);
    let s_e = PingPongSet::OffSegment {
        segment: axis.clone(),
        lo,
        hi,
    };
    let s_l = PingPongSet::Beyond { segment: axis, lo, hi };
    // h^n must carry the central window past itself: n·τ > hi − lo.
    let start = ((hi - lo) / tau) as u32 + 1;
    for n in 1..=b.max_exponent {
        if n < start {
            continue;
        }
        let (g, h, s_g, s_h) = if swapped {
            (l, e, &s_l, &s_e)
        } else {
            (e, l, &s_e, &s_l)
        };
        let report = ping_pong_check(t, g, h, n, s_g, s_h, b.sample_powers)?;
        if report.passed() {
            return finish_free(t, g, h, n, PairCase::MixedBounded, (s_g.clone(), s_h.clone()), b);
        }
    }
    Ok(unknown(
        case,
        UnknownReason::ExponentExhausted,
        format!("no exponent up to {} passed the ping-pong window check", b.max_exponent),
    ))
}

fn factorial(k: u32) -> u32 {
    (1..=k).product()
}

fn mixed_unbounded(
    t: &BassSerreTree,
    e: &ElementWord,
    l: &ElementWord,
    swapped: bool,
    toward_minus: bool,
    toward_plus: bool,
    b: &Budgets,
) -> Result<PairReport> {
    let case = Some(PairCase::MixedUnbounded);
    let probe = t.stabilisation_probe(l, b.window)?;
    if probe.verdict == StabilisationVerdict::StrictDecreaseWitness {
        return Ok(unknown(
            case,
            UnknownReason::StabilisationUnverified,
            format!(
                "stable fixed set of the elliptic element keeps growing along the axis of {}; pointwise stabilisers strictly decrease over the window",
                t.group().render(l)
            ),
        ));
    }
    let (_, axis) = axis_window(t, l, b.window)?;
    let last = axis.len() - 1;
    // Least k with Fix(e^{k!}) reaching the window end.
    for k in 1..=b.factorial_bound {
        let n = factorial(k);
        let en = e.pow(n as i64);
        let reaches_plus = toward_plus && t.act(&en, &axis[last])? == axis[last];
        let reaches_minus = toward_minus && t.act(&en, &axis[0])? == axis[0];
        if !(reaches_plus || reaches_minus) {
            continue;
        }
        let boundary = BoundaryWitness {
            defining: l.clone(),
            sign: if reaches_plus { 1 } else { -1 },
        };
        let utl_l = t.utl_value(&boundary, &l.pow(n as i64), b.window)?;
        let utl_e = t.utl_value(&boundary, &en, b.window)?;
        let (utl_g, utl_h) = if swapped { (utl_l, utl_e) } else { (utl_e, utl_l) };
        return Ok(PairReport {
            case,
            verdict: PairVerdict::CommonBoundaryWitness {
                boundary,
                exponent: n,
                utl_g,
                utl_h,
            },
        });
    }
    Ok(unknown(
        case,
        UnknownReason::WindowExhausted,
        format!("no power k! with k ≤ {} fixes the end of the window", b.factorial_bound),
    ))
}

fn lox_pair(t: &BassSerreTree, g: &ElementWord, h: &ElementWord, b: &Budgets) -> Result<PairReport> {
    let (tg, ag) = axis_window(t, g, b.window)?;
    let (th, ah) = axis_window(t, h, b.window)?;
    let on_h: std::collections::HashSet<&BsVertex> = ah.iter().collect();
    let common_g: Vec<usize> = (0..ag.len()).filter(|&i| on_h.contains(&ag[i])).collect();
    let (lg, hg, lh, hh) = match (common_g.first(), common_g.last()) {
        (Some(&a), Some(&z)) => {
            let ia = ah.iter().position(|v| v == &ag[a]).unwrap();
            let iz = ah.iter().position(|v| v == &ag[z]).unwrap();
            (a, z, ia.min(iz), ia.max(iz))
        }
        _ => {
            // Disjoint axes: all of Axis(h) projects to one foot on Axis(g).
            let (fg, _) = project(t, &ag, &ah[ah.len() / 2])?;
            let (fh, _) = project(t, &ah, &ag[ag.len() / 2])?;
            (fg, fg, fh, fh)
        }
    };
    let (endg, endh) = (ag.len() - 1, ah.len() - 1);
    if lg == 0 || hg == endg || lh == 0 || hh == endh {
        if common_g.is_empty() {
            return Ok(unknown(
                Some(PairCase::LoxLoxBounded),
                UnknownReason::WindowExhausted,
                "the bridge between the axes leaves the window",
            ));
        }
        return lox_unbounded(t, g, h, &ag, lg == 0, hg == endg, b);
    }
    let s_g = PingPongSet::Beyond {
        segment: ag,
        lo: lg,
        hi: hg,
    };
    let s_h = PingPongSet::Beyond {
        segment: ah,
        lo: lh,
        hi: hh,
    };
    let start = (((hg - lg) / tg).max((hh - lh) / th) + 1) as u32;
    for n in start..=b.max_exponent {
        let report = ping_pong_check(t, g, h, n, &s_g, &s_h, b.sample_powers)?;
        if report.passed() {
            return finish_free(t, g, h, n, PairCase::LoxLoxBounded, (s_g, s_h), b);
        }
    }
    Ok(unknown(
        Some(PairCase::LoxLoxBounded),
        UnknownReason::ExponentExhausted,
        format!("no exponent up to {} passed the ping-pong window check", b.max_exponent),
    ))
}

fn lox_unbounded(
    t: &BassSerreTree,
    g: &ElementWord,
    h: &ElementWord,
    ag: &[BsVertex],
    toward_minus: bool,
    toward_plus: bool,
    b: &Budgets,
) -> Result<PairReport> {
    let case = Some(PairCase::LoxLoxUnbounded);
    let probe = t.stabilisation_probe(g, b.window)?;
    if probe.verdict == StabilisationVerdict::StrictDecreaseWitness {
        return Ok(unknown(
            case,
            UnknownReason::StabilisationUnverified,
            "pointwise stabilisers strictly decrease along the shared ray",
        ));
    }
    let _ = ag;
    let sign = if toward_plus || !toward_minus { 1 } else { -1 };
    let boundary = BoundaryWitness {
        defining: g.clone(),
        sign,
    };
    let utl_g = t.utl_value(&boundary, g, b.window)?;
    let utl_h = t.utl_value(&boundary, h, b.window)?;
    Ok(PairReport {
        case,
        verdict: PairVerdict::CommonBoundaryWitness {
            boundary,
            exponent: 1,
            utl_g,
            utl_h,
        },
    })
}

// ---------------------------------------------------------------------------
// Laws

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawSpec {
    pub rank: usize,
    /// Reduced word over letters `0..rank`.
    pub word: ElementWord,
    pub letters: Vec<String>,
}

impl LawSpec {
    /// Letters are numbered in order of first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut a = Alphabet::default();
        let word = a.parse_extending(text)?;
        if word.is_identity() {
            return Err(Error::invalid("a law must be a nontrivial reduced word"));
        }
        Ok(LawSpec {
            rank: a.len(),
            word,
            letters: a.names().to_vec(),
        })
    }

    pub fn render(&self) -> String {
        Alphabet::new(self.letters.clone()).render(&self.word)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawBudget {
    pub samples: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for LawBudget {
    fn default() -> Self {
        LawBudget {
            samples: 100,
            max_len: 5,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LawVerdict {
    HoldsOnSample { samples: usize },
    Counterexample { tuple: Vec<String>, value: String },
}

pub fn random_word<R: Rng>(rng: &mut R, gens: &[ElementWord], max_len: usize) -> ElementWord {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut w = ElementWord::identity();
    for _ in 0..len {
        let s = &gens[rng.gen_range(0..gens.len())];
        w = if rng.gen_bool(0.5) { w.mul(s) } else { w.mul(&s.inverse()) };
    }
    w
}

/// Tuples of the given generators first, then random words in them.
pub fn law_check(group: &GroupDescription, generators: &[ElementWord], law: &LawSpec, budget: &LawBudget) -> Result<LawVerdict> {
    if generators.is_empty() {
        return Ok(LawVerdict::HoldsOnSample { samples: 0 });
    }
    let mut tuples: Vec<Vec<ElementWord>> = Vec::new();
    let total = generators.len().pow(law.rank as u32);
    for i in 0..total.min(budget.samples) {
        let mut idx = i;
        let mut t = Vec::with_capacity(law.rank);
        for _ in 0..law.rank {
            t.push(generators[idx % generators.len()].clone());
            idx /= generators.len();
        }
        tuples.push(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    while tuples.len() < budget.samples {
        tuples.push((0..law.rank).map(|_| random_word(&mut rng, generators, budget.max_len)).collect());
    }
    let outcomes: Vec<Result<Option<ElementWord>>> = tuples
        .par_iter()
        .map(|t| {
            let v = group.normalize(&law.word.substitute(t))?;
            Ok((!v.is_identity()).then_some(v))
        })
        .collect();
    for (t, o) in tuples.iter().zip(outcomes) {
        if let Some(v) = o? {
            return Ok(LawVerdict::Counterexample {
                tuple: t.iter().map(|w| group.render(w)).collect(),
                value: group.render(&v),
            });
        }
    }
    Ok(LawVerdict::HoldsOnSample { samples: tuples.len() })
}

// ---------------------------------------------------------------------------
// Exponent estimates

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum PaOutcome {
    Commute,
    FreeToLength { length: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentAttempt {
    pub n: u32,
    /// Normal form of `[g^n, h^n]`.
    pub commutator: String,
    /// A trivial reduced word in `x = g^n`, `y = h^n`.
    pub trivial_word: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaEstimate {
    pub g: String,
    pub h: String,
    pub exponent: Option<u32>,
    pub outcome: Option<PaOutcome>,
    /// Smaller exponents for which neither branch verified.
    pub evidence: Vec<ExponentAttempt>,
}

pub fn pa_estimate(group: &GroupDescription, g: &ElementWord, h: &ElementWord, n_max: u32, length: usize) -> Result<PaEstimate> {
    let mut evidence = Vec::new();
    for n in 1..=n_max {
        let (gn, hn) = (g.pow(n as i64), h.pow(n as i64));
        let c = group.normalize(&ElementWord::commutator(&gn, &hn))?;
        let found = |outcome| PaEstimate {
            g: group.render(g),
            h: group.render(h),
            exponent: Some(n),
            outcome: Some(outcome),
            evidence: evidence.clone(),
        };
        if c.is_identity() {
            return Ok(found(PaOutcome::Commute));
        }
        let words = free_to_length(group, &gn, &hn, length)?;
        if words.passed() {
            return Ok(found(PaOutcome::FreeToLength { length }));
        }
        evidence.push(ExponentAttempt {
            n,
            commutator: group.render(&c),
            trivial_word: words.trivial_word,
        });
    }
    Ok(PaEstimate {
        g: group.render(g),
        h: group.render(h),
        exponent: None,
        outcome: None,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn g(spec: GroupSpec) -> GroupDescription {
        GroupDescription::from_spec(&spec).unwrap()
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_count(8), 3280);
        assert_eq!(candidate_count(10), 29524);
        let f2 = g(GroupSpec::free(&["a", "b"]));
        let w = free_to_length(&f2, &f2.parse("a").unwrap(), &f2.parse("b").unwrap(), 6).unwrap();
        assert_eq!(w.words_checked, candidate_count(6));
        assert_eq!(w.power_checks, 6);
        assert!(w.passed());
    }

    #[test]
    fn fake_certificate_fails() {
        let f2 = g(GroupSpec::free(&["a", "b"]));
        let cert = FreeCertificate::new(&f2, &f2.parse("a").unwrap(), &f2.parse("a^2").unwrap(), 1, 4);
        let v = verify_free_certificate(&cert, 4).unwrap();
        assert!(!v.ok);
        assert_eq!(v.words.trivial_word.as_deref(), Some("x^2*y^-1"));
        let good = FreeCertificate::new(&f2, &f2.parse("a").unwrap(), &f2.parse("b").unwrap(), 1, 10);
        let round = FreeCertificate::from_json(&good.to_json()).unwrap();
        assert!(verify_free_certificate(&round, 10).unwrap().ok);
    }

    #[test]
    fn dihedral_pa_estimate() {
        let a3 = g(GroupSpec::dihedral(3));
        let e = pa_estimate(&a3, &a3.parse("a").unwrap(), &a3.parse("b").unwrap(), 4, 8).unwrap();
        assert_eq!(e.exponent, Some(2));
        assert_eq!(e.outcome, Some(PaOutcome::FreeToLength { length: 8 }));
        assert_eq!(e.evidence.len(), 1);
        assert!(e.evidence[0].trivial_word.is_some());
        let z2 = g(GroupSpec::free_abelian(&["a", "b"]));
        let e = pa_estimate(&z2, &z2.parse("a").unwrap(), &z2.parse("b").unwrap(), 4, 8).unwrap();
        assert_eq!((e.exponent, e.outcome), (Some(1), Some(PaOutcome::Commute)));
    }

    #[test]
    fn laws() {
        let f2 = g(GroupSpec::free(&["a", "b"]));
        let gens = vec![f2.parse("a").unwrap(), f2.parse("b").unwrap()];
        let law = LawSpec::parse("[x1,x2]").unwrap();
        match law_check(&f2, &gens, &law, &LawBudget::default()).unwrap() {
            LawVerdict::Counterexample { tuple, .. } => assert_eq!(tuple, vec!["b", "a"]),
            v => panic!("{v:?}"),
        }
        let bs = fixtures::bs(1, 2);
        let gens = vec![bs.parse("a").unwrap(), bs.parse("b").unwrap()];
        let law = LawSpec::parse("[[x1,x2],[x3,x4]]").unwrap();
        assert_eq!(law.rank, 4);
        assert_eq!(
            law_check(&bs, &gens, &law, &LawBudget { samples: 40, ..Default::default() }).unwrap(),
            LawVerdict::HoldsOnSample { samples: 40 }
        );
    }

    #[test]
    fn pair_cases() {
        let t = BassSerreTree::realize(fixtures::z_star_z()).unwrap();
        let grp = t.group().clone();
        let p = |s: &str| grp.parse(s).unwrap();
        let b = Budgets::default();
        let r = classify_pair(&t, &p("a"), &p("b"), &b);
        assert_eq!(r.case, Some(PairCase::EllipticElliptic));
        let PairVerdict::FreeCertificate(cert) = &r.verdict else { panic!("{r:?}") };
        assert_eq!(cert.exponent, 1);
        assert!(verify_free_certificate(cert, 10).unwrap().ok);
        assert_eq!(classify_pair(&t, &p("ab"), &p("abab"), &b).verdict, PairVerdict::CommuteWitness { exponent: 1 });
        let r = classify_pair(&t, &p("a"), &p("ab"), &b);
        assert_eq!(r.case, Some(PairCase::MixedBounded), "{r:?}");
        assert!(matches!(r.verdict, PairVerdict::FreeCertificate(_)), "{r:?}");
        let r = classify_pair(&t, &p("ab"), &p("ba"), &b);
        assert_eq!(r.case, Some(PairCase::LoxLoxBounded), "{r:?}");
        let PairVerdict::FreeCertificate(cert) = &r.verdict else { panic!("{r:?}") };
        assert!(verify_free_certificate(cert, 8).unwrap().ok);

        let t = BassSerreTree::realize(fixtures::bs(1, 2)).unwrap();
        let grp = t.group().clone();
        let p = |s: &str| grp.parse(s).unwrap();
        let r = classify_pair(&t, &p("a"), &p("b"), &b);
        assert_eq!(
            r.verdict,
            PairVerdict::Unknown {
                reason: UnknownReason::StabilisationUnverified,
                detail: match &r.verdict {
                    PairVerdict::Unknown { detail, .. } => detail.clone(),
                    _ => String::new(),
                }
            }
        );
    }
}
