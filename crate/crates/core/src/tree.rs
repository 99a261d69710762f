//! Simplicial trees with an exact integer metric, acted on by a group.
//!
//! Implementors supply exact distances and geodesics (usually from normal
//! forms) and possibly truncated neighbour lists; everything here is generic.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::ElementWord;

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Neighbour list of a vertex; `complete` is false when the list was truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighbors<V> {
    pub vertices: Vec<V>,
    pub complete: bool,
}

pub trait TreeHandle {
    type Vertex: Clone + Eq + Hash + Ord + Debug;

    fn basepoint(&self) -> Self::Vertex;
    fn distance(&self, u: &Self::Vertex, v: &Self::Vertex) -> Result<usize>;
    /// Vertices of the unique geodesic from `u` to `v`, both included.
    fn geodesic(&self, u: &Self::Vertex, v: &Self::Vertex) -> Result<Vec<Self::Vertex>>;
    fn neighbors(&self, v: &Self::Vertex) -> Result<Neighbors<Self::Vertex>>;
    fn act(&self, g: &ElementWord, v: &Self::Vertex) -> Result<Self::Vertex>;
    fn node_budget(&self) -> usize {
        DEFAULT_NODE_BUDGET
    }
    fn render_vertex(&self, v: &Self::Vertex) -> String {
        format!("{v:?}")
    }

    /// Neighbours of `v` fixed by `g^k` for some `1 ≤ k ≤ powers`, assuming `g` fixes `v`.
    fn fixed_neighbors(&self, g: &ElementWord, v: &Self::Vertex, powers: u32) -> Result<Neighbors<Self::Vertex>> {
        let n = self.neighbors(v)?;
        let mut out = Vec::new();
        for u in n.vertices {
            if least_fixing_power(self, g, &u, powers)?.is_some() {
                out.push(u);
            }
        }
        Ok(Neighbors {
            vertices: out,
            complete: n.complete,
        })
    }
}

/// Least `1 ≤ k ≤ powers` with `g^k·v = v`.
pub fn least_fixing_power<T: TreeHandle + ?Sized>(t: &T, g: &ElementWord, v: &T::Vertex, powers: u32) -> Result<Option<u32>> {
    let mut x = v.clone();
    for k in 1..=powers {
        x = t.act(g, &x)?;
        if &x == v {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IsometryClass<V> {
    Elliptic { fixed: V },
    /// `axis_segment` runs from a point `p` of the axis to `g·p`.
    Loxodromic { tau: usize, axis_segment: Vec<V> },
}

impl<V> IsometryClass<V> {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, IsometryClass::Elliptic { .. })
    }

    pub fn tau(&self) -> usize {
        match self {
            IsometryClass::Elliptic { .. } => 0,
            IsometryClass::Loxodromic { tau, .. } => *tau,
        }
    }

    /// A vertex of `Min(g)`: the fixed vertex or the start of the axis segment.
    pub fn anchor(&self) -> &V {
        match self {
            IsometryClass::Elliptic { fixed } => fixed,
            IsometryClass::Loxodromic { axis_segment, .. } => &axis_segment[0],
        }
    }
}

/// Breadth-first ball through the (possibly truncated) neighbour lists.
/// Returns the vertices with their distance from `center`, and whether every
/// neighbour list met was complete.
pub fn ball<T: TreeHandle + ?Sized>(t: &T, center: &T::Vertex, radius: usize) -> Result<(Vec<(T::Vertex, usize)>, bool)> {
    let mut seen: HashMap<T::Vertex, usize> = HashMap::new();
    let mut order = vec![(center.clone(), 0)];
    seen.insert(center.clone(), 0);
    let mut queue = VecDeque::from([(center.clone(), 0usize)]);
    let mut exhaustive = true;
    while let Some((v, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        let n = t.neighbors(&v)?;
        exhaustive &= n.complete;
        for u in n.vertices {
            if !seen.contains_key(&u) {
                if seen.len() >= t.node_budget() {
                    return Err(Error::ExpansionBudgetExceeded { budget: t.node_budget() });
                }
                seen.insert(u.clone(), d + 1);
                order.push((u.clone(), d + 1));
                queue.push_back((u, d + 1));
            }
        }
    }
    Ok((order, exhaustive))
}

/// Breadth-first geodesic search through neighbour lists; `None` if `v` is not
/// reached within `max_depth` (possible when neighbour lists are truncated).
pub fn bfs_geodesic<T: TreeHandle + ?Sized>(
    t: &T,
    u: &T::Vertex,
    v: &T::Vertex,
    max_depth: usize,
) -> Result<Option<Vec<T::Vertex>>> {
    let mut parent: HashMap<T::Vertex, Option<T::Vertex>> = HashMap::new();
    parent.insert(u.clone(), None);
    let mut queue = VecDeque::from([(u.clone(), 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        if &x == v {
            let mut path = vec![x.clone()];
            let mut cur = x;
            while let Some(Some(p)) = parent.get(&cur) {
                path.push(p.clone());
                cur = p.clone();
            }
            path.reverse();
            return Ok(Some(path));
        }
        if d == max_depth {
            continue;
        }
        for y in t.neighbors(&x)?.vertices {
            if !parent.contains_key(&y) {
                if parent.len() >= t.node_budget() {
                    return Err(Error::ExpansionBudgetExceeded { budget: t.node_budget() });
                }
                parent.insert(y.clone(), Some(x.clone()));
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(None)
}

/// Displacement criterion: `g` is elliptic iff `d(x, g²x) ≤ d(x, gx)`;
/// otherwise `τ = d(x, g²x) − d(x, gx)` and the axis meets `[x, gx]`.
pub fn classify_isometry<T: TreeHandle + ?Sized>(t: &T, g: &ElementWord, x: &T::Vertex) -> Result<IsometryClass<T::Vertex>> {
    let gx = t.act(g, x)?;
    let g2x = t.act(g, &gx)?;
    let d1 = t.distance(x, &gx)?;
    let d2 = t.distance(x, &g2x)?;
    let path = t.geodesic(x, &gx)?;
    if d2 <= d1 {
        // No inversions, so d1 is even and the midpoint is fixed.
        debug_assert_eq!(d1 % 2, 0);
        let fixed = path[d1 / 2].clone();
        debug_assert_eq!(t.act(g, &fixed)?, fixed);
        return Ok(IsometryClass::Elliptic { fixed });
    }
    let tau = d2 - d1;
    let p = path[(d1 - tau) / 2].clone();
    let gp = t.act(g, &p)?;
    let axis_segment = t.geodesic(&p, &gp)?;
    debug_assert_eq!(axis_segment.len(), tau + 1);
    Ok(IsometryClass::Loxodromic { tau, axis_segment })
}

/// Brute-force minimum of `d(y, gy)` over the radius-`radius` ball around `x`
/// (truncated neighbour lists, plus the vertices of `[x, gx]` inside the ball).
pub fn min_displacement<T: TreeHandle + ?Sized>(t: &T, g: &ElementWord, x: &T::Vertex, radius: usize) -> Result<(usize, T::Vertex)> {
    let (mut cands, _) = ball(t, x, radius)?;
    let gx = t.act(g, x)?;
    for (i, y) in t.geodesic(x, &gx)?.into_iter().enumerate().take(radius + 1) {
        cands.push((y, i));
    }
    let mut best: Option<(usize, T::Vertex)> = None;
    for (y, _) in cands {
        let d = t.distance(&y, &t.act(g, &y)?)?;
        if best.as_ref().map_or(true, |(b, bv)| d < *b || (d == *b && y < *bv)) {
            best = Some((d, y));
        }
    }
    Ok(best.expect("the ball contains its center"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedSetSample<V> {
    /// Vertex the exploration started from (fixed by `g`).
    pub center: V,
    /// Fixed vertices with the least power `k ≤ K` fixing each, sorted by vertex.
    pub vertices: Vec<(V, u32)>,
    pub radius: usize,
    pub max_power: u32,
    /// True iff every neighbour list met during the exploration was complete.
    pub exhaustive: bool,
}

impl<V: Ord> FixedSetSample<V> {
    pub fn contains(&self, v: &V) -> bool {
        self.vertices.binary_search_by(|(x, _)| x.cmp(v)).is_ok()
    }

    /// Vertices fixed by `g^k` itself (i.e. whose least power divides `k`).
    pub fn fixed_by_power(&self, k: u32) -> Vec<&V> {
        self.vertices.iter().filter(|(_, p)| k % p == 0).map(|(v, _)| v).collect()
    }
}

/// `⋃_{k ≤ K} Fix(g^k)` within distance `radius` of the fixed vertex nearest the basepoint.
pub fn fixed_set_ball<T: TreeHandle + ?Sized>(t: &T, g: &ElementWord, radius: usize, max_power: u32) -> Result<FixedSetSample<T::Vertex>> {
    let center = match classify_isometry(t, g, &t.basepoint())? {
        IsometryClass::Elliptic { fixed } => fixed,
        IsometryClass::Loxodromic { .. } => return Err(Error::NotElliptic),
    };
    let mut power: HashMap<T::Vertex, u32> = HashMap::new();
    power.insert(center.clone(), 1);
    let mut queue = VecDeque::from([(center.clone(), 0usize)]);
    let mut exhaustive = true;
    while let Some((v, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        // Each Fix(g^k) is a subtree through the center, so their union is
        // reached by stepping only through fixed vertices.
        let n = t.fixed_neighbors(g, &v, max_power)?;
        exhaustive &= n.complete;
        for u in n.vertices {
            if power.contains_key(&u) {
                continue;
            }
            if power.len() >= t.node_budget() {
                return Err(Error::ExpansionBudgetExceeded { budget: t.node_budget() });
            }
            let k = least_fixing_power(t, g, &u, max_power)?.expect("fixed neighbours are fixed by some power");
            power.insert(u.clone(), k);
            queue.push_back((u, d + 1));
        }
    }
    let mut vertices: Vec<(T::Vertex, u32)> = power.into_iter().collect();
    vertices.sort();
    Ok(FixedSetSample {
        center,
        vertices,
        radius,
        max_power,
        exhaustive,
    })
}

/// Vertices of `Axis(h)` from `h^{-window}·p` to `h^{window}·p`, with `p` the
/// axis point nearest the basepoint.
pub fn axis_window<T: TreeHandle + ?Sized>(t: &T, h: &ElementWord, window: usize) -> Result<(usize, Vec<T::Vertex>)> {
    let (tau, p) = match classify_isometry(t, h, &t.basepoint())? {
        IsometryClass::Loxodromic { tau, axis_segment } => (tau, axis_segment[0].clone()),
        IsometryClass::Elliptic { .. } => return Err(Error::NotLoxodromic),
    };
    let w = window as i64;
    let from = t.act(&h.pow(-w), &p)?;
    let to = t.act(&h.pow(w), &p)?;
    Ok((tau, t.geodesic(&from, &to)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    /// Edge count of the intersection inside the window; `None` when it is empty.
    pub edges: Option<usize>,
    /// The intersection reaches an end of the window, so its true length may be larger.
    pub exceeds_window: bool,
    pub window: usize,
}

/// Overlap of `Axis(g)` (or of `⋃_{k ≤ K} Fix(g^k)` when `g` is elliptic) with
/// `Axis(h)`, inside `window` fundamental domains of `h` on either side.
pub fn axis_overlap<T: TreeHandle + ?Sized>(
    t: &T,
    g: &ElementWord,
    h: &ElementWord,
    window: usize,
    max_power: u32,
) -> Result<Overlap> {
    let (_, path) = axis_window(t, h, window)?;
    let class_g = classify_isometry(t, g, &t.basepoint())?;
    let mut inside = Vec::with_capacity(path.len());
    for y in &path {
        let hit = match &class_g {
            IsometryClass::Elliptic { .. } => least_fixing_power(t, g, y, max_power)?.is_some(),
            IsometryClass::Loxodromic { tau, .. } => t.distance(y, &t.act(g, y)?)? == *tau,
        };
        inside.push(hit);
    }
    let idx: Vec<usize> = (0..path.len()).filter(|&i| inside[i]).collect();
    let edges = match (idx.first(), idx.last()) {
        (Some(&a), Some(&b)) => {
            debug_assert!(idx.len() == b - a + 1, "intersection of subtrees is convex");
            Some(b - a)
        }
        _ => None,
    };
    let exceeds_window = !path.is_empty() && (inside[0] || inside[path.len() - 1]);
    Ok(Overlap {
        edges,
        exceeds_window,
        window,
    })
}

/// Distance from `x` to the axis of a loxodromic `g`: `(d(x, gx) − τ) / 2`.
pub fn distance_to_axis<T: TreeHandle + ?Sized>(t: &T, g: &ElementWord, x: &T::Vertex, tau: usize) -> Result<usize> {
    let d = t.distance(x, &t.act(g, x)?)?;
    Ok((d - tau) / 2)
}

/// Whether every vertex of `[u, v]` lies in `set` (convexity check helper).
pub fn geodesic_inside<T: TreeHandle + ?Sized>(t: &T, u: &T::Vertex, v: &T::Vertex, set: &BTreeSet<T::Vertex>) -> Result<bool> {
    Ok(t.geodesic(u, v)?.iter().all(|x| set.contains(x)))
}
