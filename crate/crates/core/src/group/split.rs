//! One-edge graphs of groups: amalgams `X₀ ∗_C X₁` and HNN extensions
//! `X₀ ∗_C` with relation `t·α(c)·t⁻¹ = ω(c)`.
//!
//! Normal forms are built left to right with a lazy top syllable: letters of
//! the current factor accumulate raw, and the syllable is only split into a
//! transversal representative and an edge-group remainder when a letter of the
//! other factor (or a stable letter) arrives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::transversal::Transversal;
use super::{GroupDescription, GroupSpec};
use crate::error::{Error, Result};
use crate::word::{Alphabet, ElementWord, Letter};

pub const GOG_SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    GOG_SCHEMA_VERSION
}

/// JSON form of a one-edge graph of groups. An edge whose source equals its
/// target is an HNN extension with `t·α(c)·t⁻¹ = ω(c)`, where `α` is the
/// source embedding and `ω` the target embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GogSpec {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub vertices: Vec<GogVertex>,
    pub edges: Vec<GogEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GogVertex {
    pub name: String,
    pub group: GroupSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GogEdge {
    pub source: String,
    pub target: String,
    pub group: GroupSpec,
    /// Edge generator name → word over the source vertex group.
    pub source_embedding: BTreeMap<String, String>,
    pub target_embedding: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_letter: Option<String>,
}

impl GogSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::parse(
                text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim().to_string(),
                e.column(),
                e.to_string(),
            )
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph of groups serialises")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Amalgam,
    Hnn,
}

/// Where an ambient generator lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Loc {
    Own { vertex: usize, local: usize },
    /// A generator of both amalgam factors, equal to an edge-group image on each side.
    Shared { local: [usize; 2] },
    Stable,
}

#[derive(Clone, Debug)]
pub struct SplitGroup {
    pub kind: SplitKind,
    pub vertex_names: Vec<String>,
    pub vertices: Vec<GroupDescription>,
    pub edge: GroupDescription,
    /// Amalgam: side `i` embeds into vertex `i`. HNN: side 0 is `α`, side 1 is `ω`, both into vertex 0.
    pub sides: [Transversal; 2],
    pub letters: Vec<Loc>,
    /// Per vertex group: local generator → ambient generator.
    pub embed: Vec<Vec<usize>>,
    pub stable: Option<usize>,
    pub alphabet: Alphabet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    /// Vertex group containing `rep` (always 0 for HNN).
    pub vertex: usize,
    /// Canonical transversal element, as a local word.
    pub rep: ElementWord,
    /// HNN stable-letter exponent following `rep`; 0 for amalgams.
    pub stable: i8,
}

/// Amalgam: `rep₁ ⋯ rep_k · φ₀(tail)` with `tail` in the edge group.
/// HNN: `rep₁ t^ε₁ ⋯ rep_k t^ε_k · tail` with `tail` in the vertex group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitForm {
    pub syllables: Vec<Syllable>,
    pub tail: ElementWord,
}

fn images(x: &GroupDescription, edge: &GroupDescription, emb: &BTreeMap<String, String>) -> Result<Vec<ElementWord>> {
    if let Some(k) = emb.keys().find(|k| edge.alphabet().index_of(k).is_none()) {
        return Err(Error::invalid(format!("embedding names unknown edge generator `{k}`")));
    }
    edge.alphabet()
        .names()
        .iter()
        .map(|c| {
            let w = emb
                .get(c)
                .ok_or_else(|| Error::invalid(format!("embedding misses edge generator `{c}`")))?;
            x.parse(w)
        })
        .collect()
}

impl SplitGroup {
    pub fn from_spec(spec: &GogSpec) -> Result<SplitGroup> {
        if spec.schema_version != GOG_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported graph-of-groups schema_version {}",
                spec.schema_version
            )));
        }
        let [e] = spec.edges.as_slice() else {
            return Err(Error::invalid("exactly one edge is supported"));
        };
        let find = |name: &str| {
            spec.vertices
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::invalid(format!("edge endpoint `{name}` is not a vertex")))
        };
        let (src, tgt) = (find(&e.source)?, find(&e.target)?);
        let edge = GroupDescription::from_spec(&e.group)?;
        if src == tgt {
            if spec.vertices.len() != 1 {
                return Err(Error::invalid("an HNN extension has exactly one vertex"));
            }
            let x = GroupDescription::from_spec(&spec.vertices[0].group)?;
            let alpha = images(&x, &edge, &e.source_embedding)?;
            let omega = images(&x, &edge, &e.target_embedding)?;
            let mut alphabet = x.alphabet().clone();
            let t = e.stable_letter.clone().unwrap_or_else(|| "t".to_string());
            if alphabet.index_of(&t).is_some() {
                return Err(Error::invalid(format!("stable letter `{t}` clashes with a vertex generator")));
            }
            let stable = alphabet.intern(&t);
            let mut letters: Vec<Loc> = (0..x.rank()).map(|i| Loc::Own { vertex: 0, local: i }).collect();
            letters.push(Loc::Stable);
            let sides = [
                Transversal::new(x.clone(), edge.clone(), alpha)?,
                Transversal::new(x.clone(), edge.clone(), omega)?,
            ];
            return Ok(SplitGroup {
                kind: SplitKind::Hnn,
                vertex_names: vec![spec.vertices[0].name.clone()],
                embed: vec![(0..x.rank()).collect()],
                vertices: vec![x],
                edge,
                sides,
                letters,
                stable: Some(stable),
                alphabet,
            });
        }
        if spec.vertices.len() != 2 {
            return Err(Error::invalid("an amalgam has exactly two vertices"));
        }
        if e.stable_letter.is_some() {
            return Err(Error::invalid("stable letters belong to loop edges"));
        }
        let x0 = GroupDescription::from_spec(&spec.vertices[src].group)?;
        let x1 = GroupDescription::from_spec(&spec.vertices[tgt].group)?;
        let im0 = images(&x0, &edge, &e.source_embedding)?;
        let im1 = images(&x1, &edge, &e.target_embedding)?;
        let mut alphabet = x0.alphabet().clone();
        let mut letters: Vec<Loc> = (0..x0.rank()).map(|i| Loc::Own { vertex: 0, local: i }).collect();
        let mut embed1 = Vec::new();
        for (j, name) in x1.alphabet().names().iter().enumerate() {
            match alphabet.index_of(name) {
                Some(i) => {
                    // A shared name must be one edge generator seen from both sides.
                    let ok = (0..edge.rank()).any(|c| im0[c] == ElementWord::gen(i) && im1[c] == ElementWord::gen(j));
                    if !ok {
                        return Err(Error::invalid(format!(
                            "generator `{name}` appears in both factors without being an edge generator image"
                        )));
                    }
                    letters[i] = Loc::Shared { local: [i, j] };
                    embed1.push(i);
                }
                None => {
                    embed1.push(alphabet.intern(name));
                    letters.push(Loc::Own { vertex: 1, local: j });
                }
            }
        }
        let sides = [
            Transversal::new(x0.clone(), edge.clone(), im0)?,
            Transversal::new(x1.clone(), edge.clone(), im1)?,
        ];
        Ok(SplitGroup {
            kind: SplitKind::Amalgam,
            vertex_names: vec![spec.vertices[src].name.clone(), spec.vertices[tgt].name.clone()],
            embed: vec![(0..x0.rank()).collect(), embed1],
            vertices: vec![x0, x1],
            edge,
            sides,
            letters,
            stable: None,
            alphabet,
        })
    }

    /// Relators of the ambient presentation: vertex relators plus edge relations.
    pub fn relators(&self) -> Vec<ElementWord> {
        let mut rels = Vec::new();
        for (v, x) in self.vertices.iter().enumerate() {
            rels.extend(x.presentation().relators.iter().map(|r| self.lift(v, r)));
        }
        for c in 0..self.edge.rank() {
            let c = ElementWord::gen(c);
            let r = match self.kind {
                SplitKind::Amalgam => self.edge_in_ambient(0, &c).mul(&self.edge_in_ambient(1, &c).inverse()),
                SplitKind::Hnn => {
                    let t = ElementWord::gen(self.stable.expect("HNN has a stable letter"));
                    t.mul(&self.edge_in_ambient(0, &c))
                        .mul(&t.inverse())
                        .mul(&self.edge_in_ambient(1, &c).inverse())
                }
            };
            if !r.is_identity() {
                rels.push(r);
            }
        }
        rels
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Local word of vertex `v` as an ambient word.
    pub fn lift(&self, v: usize, w: &ElementWord) -> ElementWord {
        w.relabel(&self.embed[v])
    }

    /// Edge-group word as a local word of side `s`.
    pub fn edge_image(&self, side: usize, c: &ElementWord) -> ElementWord {
        self.sides[side].embed(c)
    }

    /// Transversal used before a stable letter of sign `eps` (HNN).
    fn hnn_side(eps: i8) -> usize {
        if eps > 0 {
            1
        } else {
            0
        }
    }

    pub fn normal_form(&self, w: &ElementWord) -> Result<SplitForm> {
        match self.kind {
            SplitKind::Amalgam => self.amalgam_form(w),
            SplitKind::Hnn => self.hnn_form(w),
        }
    }

    fn amalgam_form(&self, w: &ElementWord) -> Result<SplitForm> {
        let mut reps: Vec<(usize, ElementWord)> = Vec::new();
        let mut top: Option<(usize, ElementWord)> = None;
        for l in w.letters() {
            let (side, local) = match self.letters[l.gen()] {
                Loc::Own { vertex, local } => (vertex, local),
                Loc::Shared { local } => {
                    let side = match &top {
                        Some((s, _)) => *s,
                        None => reps.last().map_or(0, |r| 1 - r.0),
                    };
                    (side, local[side])
                }
                Loc::Stable => unreachable!("amalgams have no stable letter"),
            };
            let letter = Letter::new(local, l.is_inverse());
            match top.as_mut() {
                Some((s, z)) if *s == side => z.push_letter(letter),
                Some((s, z)) => {
                    let (r, c) = self.sides[*s].decompose(z)?;
                    let mut nz = self.edge_image(side, &c);
                    if r.is_identity() {
                        if reps.last().map_or(false, |x| x.0 == side) {
                            let (_, prev) = reps.pop().unwrap();
                            nz = prev.mul(&nz);
                        }
                    } else {
                        reps.push((*s, r));
                    }
                    nz.push_letter(letter);
                    top = Some((side, nz));
                }
                None => {
                    let mut nz = ElementWord::identity();
                    if reps.last().map_or(false, |x| x.0 == side) {
                        nz = reps.pop().unwrap().1;
                    }
                    nz.push_letter(letter);
                    top = Some((side, nz));
                }
            }
        }
        let mut tail = ElementWord::identity();
        if let Some((s, z)) = top {
            let (r, c) = self.sides[s].decompose(&z)?;
            if !r.is_identity() {
                reps.push((s, r));
            }
            tail = c;
        }
        Ok(SplitForm {
            syllables: reps
                .into_iter()
                .map(|(vertex, rep)| Syllable { vertex, rep, stable: 0 })
                .collect(),
            tail,
        })
    }

    fn hnn_form(&self, w: &ElementWord) -> Result<SplitForm> {
        let mut syl: Vec<(ElementWord, i8)> = Vec::new();
        let mut z = ElementWord::identity();
        for l in w.letters() {
            match self.letters[l.gen()] {
                Loc::Own { local, .. } => z.push_letter(Letter::new(local, l.is_inverse())),
                Loc::Shared { .. } => unreachable!("HNN extensions have no shared letters"),
                Loc::Stable => {
                    let eps: i8 = if l.is_inverse() { -1 } else { 1 };
                    let before = Self::hnn_side(eps);
                    let after = 1 - before;
                    let (r, c) = self.sides[before].decompose(&z)?;
                    if r.is_identity() && syl.last().map_or(false, |x| x.1 == -eps) {
                        // t^-ε · (image of c before) · t^ε collapses to the other image.
                        let (prev, _) = syl.pop().unwrap();
                        z = prev.mul(&self.edge_image(after, &c));
                    } else {
                        syl.push((r, eps));
                        z = self.edge_image(after, &c);
                    }
                }
            }
        }
        let tail = self.vertices[0].normalize(&z)?;
        Ok(SplitForm {
            syllables: syl
                .into_iter()
                .map(|(rep, stable)| Syllable { vertex: 0, rep, stable })
                .collect(),
            tail,
        })
    }

    /// Ambient word of a syllable sequence (without tail).
    pub fn flatten_syllables(&self, syllables: &[Syllable]) -> ElementWord {
        let mut out = ElementWord::identity();
        for s in syllables {
            out.append(&self.lift(s.vertex, &s.rep));
            if s.stable != 0 {
                out.push_syllable(self.stable.expect("HNN has a stable letter"), s.stable as i64);
            }
        }
        out
    }

    /// Ambient word of the tail.
    pub fn flatten_tail(&self, tail: &ElementWord) -> Result<ElementWord> {
        Ok(match self.kind {
            SplitKind::Amalgam => {
                let local = self.vertices[0].normalize(&self.edge_image(0, tail))?;
                self.lift(0, &local)
            }
            SplitKind::Hnn => self.lift(0, tail),
        })
    }

    pub fn flatten(&self, f: &SplitForm) -> Result<ElementWord> {
        let mut w = self.flatten_syllables(&f.syllables);
        w.append(&self.flatten_tail(&f.tail)?);
        Ok(w)
    }

    pub fn normalize(&self, w: &ElementWord) -> Result<ElementWord> {
        let f = self.normal_form(w)?;
        self.flatten(&f)
    }

    /// The ambient word of edge-group element `c` via side `s`.
    pub fn edge_in_ambient(&self, side: usize, c: &ElementWord) -> ElementWord {
        let v = match self.kind {
            SplitKind::Amalgam => side,
            SplitKind::Hnn => 0,
        };
        self.lift(v, &self.edge_image(side, c))
    }

    /// Express an ambient word that lies in vertex group `v` as a local word, if it does.
    pub fn localize(&self, v: usize, w: &ElementWord) -> Result<Option<ElementWord>> {
        let f = self.normal_form(w)?;
        match self.kind {
            SplitKind::Amalgam => match f.syllables.as_slice() {
                [] => Ok(Some(self.vertices[v].normalize(&self.edge_image(v, &f.tail))?)),
                [s] if s.vertex == v => {
                    let local = s.rep.mul(&self.edge_image(v, &f.tail));
                    Ok(Some(self.vertices[v].normalize(&local)?))
                }
                _ => Ok(None),
            },
            SplitKind::Hnn => Ok(f.syllables.is_empty().then_some(f.tail)),
        }
    }
}
