//! Labelled Artin defining graphs.
//!
//! Text form (DOT-like):
//!
//! ```text
//! graph   := 'graph' ident? '{' stmt* '}'
//! stmt    := ident ( '--' ident '[' 'label' '=' label ']' )? ';'?
//! label   := int | '"' int '"'
//! ```
//!
//! `//` starts a comment running to the end of the line. An absent edge means
//! the label is infinite. JSON form:
//! `{"schema_version":1,"vertices":["a","b"],"edges":[{"u":"a","v":"b","label":3}]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAPH_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationGraph {
    names: Vec<String>,
    /// `labels[i][j]`; `None` encodes an infinite label.
    labels: Vec<Vec<Option<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: String,
    pub v: String,
    pub label: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

fn default_schema() -> u32 {
    GRAPH_SCHEMA_VERSION
}

impl Serialize for PresentationGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PresentationGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        PresentationGraph::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl PresentationGraph {
    pub fn new<S: Into<String>>(vertices: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let n = names.len();
        PresentationGraph {
            names,
            labels: vec![vec![None; n]; n],
        }
    }

    /// Convenience builder from `(u, v, label)` triples; vertices in first-seen order.
    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str, u32)]) -> Result<Self> {
        let mut g = PresentationGraph::new(vertices.iter().copied());
        for &(u, v, m) in edges {
            g.add_edge_by_name(u, v, m)?;
        }
        Ok(g)
    }

    pub fn add_edge_by_name(&mut self, u: &str, v: &str, m: u32) -> Result<()> {
        let i = self.index_of(u).ok_or_else(|| Error::invalid(format!("unknown vertex `{u}`")))?;
        let j = self.index_of(v).ok_or_else(|| Error::invalid(format!("unknown vertex `{v}`")))?;
        self.add_edge(i, j, m)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, m: u32) -> Result<()> {
        if i == j {
            return Err(Error::invalid(format!("loop at `{}`", self.names[i])));
        }
        if m < 2 {
            return Err(Error::invalid(format!("label {m} below 2")));
        }
        if self.labels[i][j].is_some() {
            return Err(Error::invalid(format!(
                "repeated edge `{}`--`{}`",
                self.names[i], self.names[j]
            )));
        }
        self.labels[i][j] = Some(m);
        self.labels[j][i] = Some(m);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        self.labels[i][j]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.labels[i][j].is_some()
    }

    /// Edges `(i, j, m)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if let Some(m) = self.labels[i][j] {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        (0..self.len()).all(|i| (i + 1..self.len()).all(|j| self.adjacent(i, j)))
    }

    /// Full subgraph on `vertices` (kept in the given order).
    pub fn induced(&self, vertices: &[usize]) -> PresentationGraph {
        let mut g = PresentationGraph::new(vertices.iter().map(|&v| self.names[v].clone()));
        for (a, &i) in vertices.iter().enumerate() {
            for (b, &j) in vertices.iter().enumerate() {
                g.labels[a][b] = self.labels[i][j];
            }
        }
        g
    }

    /// Connected components of the full subgraph on `vertices`, each sorted, ordered by minimum.
    pub fn components_within(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.len()];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.len()];
        let mut comps = Vec::new();
        let mut sorted: Vec<usize> = vertices.to_vec();
        sorted.sort_unstable();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for y in 0..self.len() {
                    if inside[y] && !seen[y] && self.adjacent(x, y) {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            schema_version: GRAPH_SCHEMA_VERSION,
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(i, j, m)| EdgeJson {
                    u: self.names[i].clone(),
                    v: self.names[j].clone(),
                    label: m,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self> {
        if j.schema_version != GRAPH_SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported graph schema_version {}", j.schema_version)));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &j.vertices {
            if !seen.insert(v) {
                return Err(Error::invalid(format!("repeated vertex `{v}`")));
            }
        }
        let mut g = PresentationGraph::new(j.vertices.iter().cloned());
        for e in &j.edges {
            g.add_edge_by_name(&e.u, &e.v, e.label)?;
        }
        Ok(g)
    }

    /// Parse either the DOT-like text form or the JSON form (detected by a leading `{`).
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let j: GraphJson = serde_json::from_str(text).map_err(|e| {
                Error::parse(
                    text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim().to_string(),
                    e.column(),
                    e.to_string(),
                )
            })?;
            return Self::from_json(&j);
        }
        parse_dot(text)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph {\n");
        let mut isolated = vec![true; self.len()];
        for (i, j, m) in self.edges() {
            isolated[i] = false;
            isolated[j] = false;
            s.push_str(&format!("  {} -- {} [label={}];\n", self.names[i], self.names[j], m));
        }
        for (i, iso) in isolated.iter().enumerate() {
            if *iso {
                s.push_str(&format!("  {};\n", self.names[i]));
            }
        }
        s.push('}');
        s
    }
}

/// `A_{Γ₁} ∗_{A_{Γ₀}} A_{Γ₂}` with `Γ₁ ∪ Γ₂ = Γ`, `Γ₁ ∩ Γ₂ = Γ₀`; vertex indices sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VisualSplitting {
    pub gamma1: Vec<usize>,
    pub gamma2: Vec<usize>,
    pub gamma0: Vec<usize>,
}

impl VisualSplitting {
    /// Order used to pick a splitting: fewest separator vertices, then lexicographic.
    pub fn preference_key(&self) -> (usize, Vec<usize>, Vec<usize>, Vec<usize>) {
        (self.gamma0.len(), self.gamma0.clone(), self.gamma1.clone(), self.gamma2.clone())
    }
}

pub const MAX_SPLITTING_VERTICES: usize = 20;

impl PresentationGraph {
    /// All visual splittings up to swapping the sides, from separators with at
    /// least two full components; each bipartition of the components gives one
    /// splitting. Sorted by [`VisualSplitting::preference_key`].
    pub fn visual_splittings(&self) -> Vec<VisualSplitting> {
        let n = self.len();
        assert!(n <= MAX_SPLITTING_VERTICES, "graph too large for separator enumeration");
        let mut out = Vec::new();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        for s in 0..full {
            let sep: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
            let rest: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 0).collect();
            let comps = self.components_within(&rest);
            if comps.len() < 2 {
                continue;
            }
            let full_count = comps
                .iter()
                .filter(|c| {
                    let mut nb: Vec<usize> = sep
                        .iter()
                        .copied()
                        .filter(|&x| c.iter().any(|&y| self.adjacent(x, y)))
                        .collect();
                    nb.sort_unstable();
                    nb == sep
                })
                .count();
            if full_count < 2 {
                continue;
            }
            let k = comps.len();
            for mask in 0u64..(1u64 << (k - 1)) {
                let mut p1: Vec<usize> = comps[0].clone();
                let mut p2: Vec<usize> = Vec::new();
                for (i, c) in comps.iter().enumerate().skip(1) {
                    if mask >> (i - 1) & 1 == 1 {
                        p1.extend(c);
                    } else {
                        p2.extend(c);
                    }
                }
                if p2.is_empty() {
                    continue;
                }
                p1.extend(&sep);
                p2.extend(&sep);
                p1.sort_unstable();
                p2.sort_unstable();
                out.push(VisualSplitting {
                    gamma1: p1,
                    gamma2: p2,
                    gamma0: sep.clone(),
                });
            }
        }
        out.sort_by_key(|v| v.preference_key());
        out
    }

    pub fn preferred_splitting(&self) -> Option<VisualSplitting> {
        self.visual_splittings().into_iter().next()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum DotTok {
    Ident(String),
    Int(u32),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Dash2,
    Eq,
    Semi,
    Comma,
    End,
}

fn dot_tokens(text: &str) -> Result<Vec<(DotTok, usize, String)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && i + 1 < b.len() && b[i + 1] == b'/' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            '{' => DotTok::LBrace,
            '}' => DotTok::RBrace,
            '[' => DotTok::LBracket,
            ']' => DotTok::RBracket,
            '=' => DotTok::Eq,
            ';' => DotTok::Semi,
            ',' => DotTok::Comma,
            '-' if i + 1 < b.len() && b[i + 1] == b'-' => {
                i += 1;
                DotTok::Dash2
            }
            '"' => {
                i += 1;
                while i < b.len() && b[i] != b'"' {
                    i += 1;
                }
                if i >= b.len() {
                    return Err(Error::parse("\"", start, "unterminated string"));
                }
                DotTok::Str(text[start + 1..i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i + 1 < b.len() && ((b[i + 1] as char).is_ascii_alphanumeric() || b[i + 1] == b'_') {
                    i += 1;
                }
                DotTok::Ident(text[start..=i].to_string())
            }
            c if c.is_ascii_digit() => {
                while i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit() {
                    i += 1;
                }
                let s = &text[start..=i];
                DotTok::Int(s.parse().map_err(|_| Error::parse(s, start, "label out of range"))?)
            }
            _ => {
                let ch: String = text[start..].chars().next().map(String::from).unwrap_or_default();
                return Err(Error::parse(ch, start, "unexpected character"));
            }
        };
        i += 1;
        out.push((tok, start, text[start..i.min(text.len())].to_string()));
    }
    out.push((DotTok::End, text.len(), "<end>".to_string()));
    Ok(out)
}

fn parse_dot(text: &str) -> Result<PresentationGraph> {
    let toks = dot_tokens(text)?;
    let mut at = 0;
    let err = |at: usize, msg: &str| -> Error {
        let (_, pos, t) = &toks[at];
        Error::parse(t.clone(), *pos, msg)
    };
    match &toks[at].0 {
        DotTok::Ident(k) if k == "graph" => at += 1,
        _ => return Err(err(at, "expected `graph`")),
    }
    if let DotTok::Ident(_) = toks[at].0 {
        at += 1;
    }
    if toks[at].0 != DotTok::LBrace {
        return Err(err(at, "expected `{`"));
    }
    at += 1;
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String, u32, usize)> = Vec::new();
    let intern = |names: &mut Vec<String>, n: &str| {
        if !names.iter().any(|x| x == n) {
            names.push(n.to_string());
        }
    };
    loop {
        match toks[at].0.clone() {
            DotTok::RBrace => {
                at += 1;
                break;
            }
            DotTok::Ident(u) => {
                let upos = at;
                at += 1;
                intern(&mut names, &u);
                if toks[at].0 == DotTok::Dash2 {
                    at += 1;
                    let v = match &toks[at].0 {
                        DotTok::Ident(v) => v.clone(),
                        _ => return Err(err(at, "expected a vertex name after `--`")),
                    };
                    at += 1;
                    intern(&mut names, &v);
                    if toks[at].0 != DotTok::LBracket {
                        return Err(err(at, "expected `[label=...]` on edge"));
                    }
                    at += 1;
                    match &toks[at].0 {
                        DotTok::Ident(k) if k == "label" => at += 1,
                        _ => return Err(err(at, "expected `label`")),
                    }
                    if toks[at].0 != DotTok::Eq {
                        return Err(err(at, "expected `=`"));
                    }
                    at += 1;
                    let m = match &toks[at].0 {
                        DotTok::Int(m) => *m,
                        DotTok::Str(s) => s.trim().parse().map_err(|_| err(at, "label is not an integer"))?,
                        _ => return Err(err(at, "expected an integer label")),
                    };
                    if m < 2 {
                        return Err(err(at, "label must be at least 2"));
                    }
                    at += 1;
                    if toks[at].0 != DotTok::RBracket {
                        return Err(err(at, "expected `]`"));
                    }
                    at += 1;
                    edges.push((u, v, m, upos));
                }
                if matches!(toks[at].0, DotTok::Semi | DotTok::Comma) {
                    at += 1;
                }
            }
            DotTok::End => return Err(err(at, "expected `}`")),
            _ => return Err(err(at, "expected a statement")),
        }
    }
    if toks[at].0 != DotTok::End {
        return Err(err(at, "trailing input after `}`"));
    }
    let mut g = PresentationGraph::new(names);
    for (u, v, m, pos) in edges {
        g.add_edge_by_name(&u, &v, m).map_err(|e| match e {
            Error::Invalid(msg) => {
                let (_, p, t) = &toks[pos];
                Error::parse(t.clone(), *p, msg)
            }
            other => other,
        })?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splittings_of_path_and_square() {
        let p = PresentationGraph::parse("graph { a -- b [label=3]; b -- c [label=4]; }").unwrap();
        assert_eq!(
            p.visual_splittings(),
            vec![VisualSplitting { gamma1: vec![0, 1], gamma2: vec![1, 2], gamma0: vec![1] }]
        );
        let sq = PresentationGraph::parse("graph { a -- b [label=2]; b -- c [label=3]; c -- d [label=2]; d -- a [label=3]; }")
            .unwrap();
        let seps: Vec<Vec<usize>> = sq.visual_splittings().into_iter().map(|s| s.gamma0).collect();
        assert_eq!(seps, vec![vec![0, 2], vec![1, 3]]);
        let k3 = PresentationGraph::parse("graph { a -- b [label=3]; b -- c [label=3]; a -- c [label=3]; }").unwrap();
        assert!(k3.visual_splittings().is_empty());
    }

    #[test]
    fn parses_dot_and_json_equivalently() {
        let dot = "graph { a -- b [label=3]; b -- c [label=4]; }";
        let g = PresentationGraph::parse(dot).unwrap();
        assert_eq!(g.names(), &["a", "b", "c"]);
        assert_eq!(g.label(0, 1), Some(3));
        assert_eq!(g.label(1, 2), Some(4));
        assert_eq!(g.label(0, 2), None);
        let json = serde_json::to_string(&g).unwrap();
        let h = PresentationGraph::parse(&json).unwrap();
        assert_eq!(g, h);
        assert_eq!(PresentationGraph::parse(&g.to_dot()).unwrap(), g);
    }

    #[test]
    fn isolated_vertices_and_quoted_labels() {
        let g = PresentationGraph::parse("graph G {\n a; c // two free generators\n x -- y [label=\"2\"]\n}").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges(), vec![(2, 3, 2)]);
    }

    #[test]
    fn dot_errors_name_token_and_position() {
        match PresentationGraph::parse("graph { a -- b [label=1]; }") {
            Err(Error::Parse { token, pos, .. }) => assert_eq!((token.as_str(), pos), ("1", 22)),
            other => panic!("{other:?}"),
        }
        match PresentationGraph::parse("graph { a -- b; }") {
            Err(Error::Parse { token, .. }) => assert_eq!(token, ";"),
            other => panic!("{other:?}"),
        }
        match PresentationGraph::parse("graph { a -- a [label=3]; }") {
            Err(Error::Parse { token, pos, .. }) => assert_eq!((token.as_str(), pos), ("a", 8)),
            other => panic!("{other:?}"),
        }
    }
}
