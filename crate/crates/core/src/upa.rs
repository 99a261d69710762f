//! Backward-chaining deduction for the classes `UPA` (uniform power
//! alternative) and `PA` over user-asserted group facts, with exponent
//! propagation.
//!
//! User facts are trusted and reported as UNVERIFIED; every conclusion is
//! conditional on them. A derivation is plain data and [`replay`] re-checks
//! each rule instance against its premises and the fact set.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bass_serre::{BassSerreTree, RootsVerdict};
use crate::error::{Error, Result};
use crate::group::{GogSpec, GroupDescription, GroupSpec};

pub const FACTS_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assertion {
    Hyperbolic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
    },
    /// Free of the given rank; hyperbolic, and any two non-commuting elements generate a free group.
    Free { rank: u32 },
    /// The subject is a central extension `ℤ ↪ G ↠ quotient`.
    CentralZExtensionOf { quotient: String },
    FiniteIndexSubgroupOf { group: String, index: u64 },
    FiniteIndexOvergroupOf { group: String, index: u64 },
    DirectProductOf { factors: Vec<String> },
    /// Graph product; `edges` join factor ids.
    GraphProductOf {
        factors: Vec<String>,
        #[serde(default)]
        edges: Vec<(String, String)>,
    },
    AcylindricalCocompactTreeActionWith {
        vertex_groups: Vec<String>,
        roots_closed: bool,
        /// A concrete splitting on which roots closure can be checked.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        action: Option<GogSpec>,
    },
    StabilisationTreeActionWith { point_stabilisers: Vec<String> },
    RelativelyHyperbolicWith {
        peripherals: Vec<String>,
        #[serde(default)]
        bounded_torsion: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<u64>,
    },
    BoundedTorsion { bound: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupFact {
    pub subject: String,
    pub assertion: Assertion,
}

impl GroupFact {
    pub fn render(&self) -> String {
        let list = |v: &[String]| v.join(", ");
        let a = match &self.assertion {
            Assertion::Hyperbolic { delta: Some(d) } => format!("is {d}-hyperbolic"),
            Assertion::Hyperbolic { delta: None } => "is hyperbolic".into(),
            Assertion::Free { rank } => format!("is free of rank {rank}"),
            Assertion::CentralZExtensionOf { quotient } => format!("is a central Z-extension of {quotient}"),
            Assertion::FiniteIndexSubgroupOf { group, index } => format!("has index {index} in {group}"),
            Assertion::FiniteIndexOvergroupOf { group, index } => format!("contains {group} with index {index}"),
            Assertion::DirectProductOf { factors } => format!("is the direct product of {}", list(factors)),
            Assertion::GraphProductOf { factors, .. } => format!("is a graph product of {}", list(factors)),
            Assertion::AcylindricalCocompactTreeActionWith {
                vertex_groups,
                roots_closed,
                ..
            } => format!(
                "acts cocompactly and acylindrically on a tree with vertex groups {}{}",
                list(vertex_groups),
                if *roots_closed { ", closed under roots" } else { "" }
            ),
            Assertion::StabilisationTreeActionWith { point_stabilisers } => {
                format!("acts on a tree with the stabilisation property, point stabilisers {}", list(point_stabilisers))
            }
            Assertion::RelativelyHyperbolicWith { peripherals, .. } => {
                format!("is hyperbolic relative to {}", list(peripherals))
            }
            Assertion::BoundedTorsion { bound } => format!("has torsion bounded by {bound}"),
        };
        format!("{} {a}", self.subject)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Upa0,
    Upa,
    Pa,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Judgement {
    pub group: String,
    pub class: Class,
}

impl Judgement {
    pub fn new(group: &str, class: Class) -> Self {
        Judgement {
            group: group.to_string(),
            class,
        }
    }

    pub fn render(&self) -> String {
        let c = match self.class {
            Class::Upa0 => "UPA_0",
            Class::Upa => "UPA",
            Class::Pa => "PA",
        };
        format!("{} ∈ {c}", self.group)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Hyperbolic with trivial central kernel.
    HyperbolicBase,
    CentralExtensionBase,
    BaseInclusion,
    FiniteIndexOvergroup,
    DirectProduct,
    AcylindricalTree,
    GraphProduct,
    RelativelyHyperbolic,
    StabilisationTree,
}

impl Rule {
    /// The closure clause the rule instantiates.
    pub fn clause(self) -> &'static str {
        match self {
            Rule::HyperbolicBase => "base class: hyperbolic quotient of a rank-0 central kernel",
            Rule::CentralExtensionBase => "base class: central Z-extension of a hyperbolic group",
            Rule::BaseInclusion => "base class is contained in the class",
            Rule::FiniteIndexOvergroup => "closure under finite-index overgroups",
            Rule::DirectProduct => "closure under direct products",
            Rule::AcylindricalTree => "cocompact acylindrical tree action with root-closed vertex stabilisers",
            Rule::GraphProduct => "closure under graph products of nontrivial groups",
            Rule::RelativelyHyperbolic => "relative hyperbolicity with peripherals in the class",
            Rule::StabilisationTree => "tree action with the stabilisation property",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: Judgement,
    pub rule: Rule,
    pub clause: String,
    /// User facts instantiated by this step; all UNVERIFIED.
    pub facts: Vec<GroupFact>,
    pub premises: Vec<Derivation>,
    /// Evidence computed by the tool (e.g. a roots closure check).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
}

impl Derivation {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}{}  [{}]\n", self.conclusion.render(), self.clause));
        for f in &self.facts {
            out.push_str(&format!("{pad}  fact (UNVERIFIED): {}\n", f.render()));
        }
        if let Some(e) = &self.evidence {
            out.push_str(&format!("{pad}  checked: {e}\n"));
        }
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivation serialises")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Judgement>,
    pub facts: Vec<GroupFact>,
}

impl FactFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: FactFile = serde_json::from_str(text)
            .map_err(|e| Error::parse(String::new(), e.column(), format!("facts JSON, line {}: {e}", e.line())))?;
        if f.schema_version != FACTS_SCHEMA_VERSION {
            return Err(Error::invalid(format!("unsupported facts schema {}", f.schema_version)));
        }
        f.validate()?;
        Ok(f)
    }

    /// Referenced ids must be subjects of some fact; numeric parameters positive.
    pub fn validate(&self) -> Result<()> {
        let known: std::collections::BTreeSet<&str> = self.facts.iter().map(|f| f.subject.as_str()).collect();
        let check = |id: &str| {
            if known.contains(id) {
                Ok(())
            } else {
                Err(Error::invalid(format!("group `{id}` is referenced but no fact describes it")))
            }
        };
        for f in &self.facts {
            match &f.assertion {
                Assertion::Hyperbolic { delta: Some(d) } if !(*d >= 0.0) => {
                    return Err(Error::invalid(format!("{}: δ must be nonnegative", f.subject)))
                }
                Assertion::Free { rank: 0 } | Assertion::BoundedTorsion { bound: 0 } => {
                    return Err(Error::invalid(format!("{}: parameter must be positive", f.subject)))
                }
                Assertion::FiniteIndexSubgroupOf { index: 0, .. } | Assertion::FiniteIndexOvergroupOf { index: 0, .. } => {
                    return Err(Error::invalid(format!("{}: index must be positive", f.subject)))
                }
                Assertion::RelativelyHyperbolicWith { bound: Some(0), .. } => {
                    return Err(Error::invalid(format!("{}: torsion bound must be positive", f.subject)))
                }
                _ => {}
            }
            for id in referenced(&f.assertion) {
                check(id)?;
            }
        }
        Ok(())
    }
}

fn referenced(a: &Assertion) -> Vec<&str> {
    match a {
        Assertion::CentralZExtensionOf { quotient } => vec![quotient],
        Assertion::FiniteIndexSubgroupOf { group, .. } | Assertion::FiniteIndexOvergroupOf { group, .. } => vec![group],
        Assertion::DirectProductOf { factors } | Assertion::GraphProductOf { factors, .. } => {
            factors.iter().map(String::as_str).collect()
        }
        Assertion::AcylindricalCocompactTreeActionWith { vertex_groups, .. } => vertex_groups.iter().map(String::as_str).collect(),
        Assertion::StabilisationTreeActionWith { point_stabilisers } => point_stabilisers.iter().map(String::as_str).collect(),
        Assertion::RelativelyHyperbolicWith { peripherals, .. } => peripherals.iter().map(String::as_str).collect(),
        _ => vec![],
    }
}

fn is_hyperbolic(f: &GroupFact, g: &str) -> bool {
    f.subject == g && matches!(f.assertion, Assertion::Hyperbolic { .. } | Assertion::Free { .. })
}

/// `(subgroup, index, fact)` for every fact placing a subgroup of finite index in `g`.
fn finite_index_subgroups<'a>(facts: &'a [GroupFact], g: &str) -> Vec<(&'a str, u64, &'a GroupFact)> {
    facts
        .iter()
        .filter_map(|f| match &f.assertion {
            Assertion::FiniteIndexSubgroupOf { group, index } if group == g => Some((f.subject.as_str(), *index, f)),
            Assertion::FiniteIndexOvergroupOf { group, index } if f.subject == g => Some((group.as_str(), *index, f)),
            _ => None,
        })
        .collect()
}

/// Result of a failed search: the missing premises, most specific last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureTrace {
    pub goal: Judgement,
    pub missing: Vec<String>,
}

struct Search<'a> {
    facts: &'a [GroupFact],
    stack: Vec<Judgement>,
    missing: Vec<String>,
    cycle: Option<String>,
}

impl Search<'_> {
    fn prove(&mut self, j: &Judgement) -> Option<Derivation> {
        if self.stack.contains(j) {
            self.cycle.get_or_insert_with(|| j.group.clone());
            return None;
        }
        self.stack.push(j.clone());
        let out = self.prove_inner(j);
        self.stack.pop();
        if out.is_none() {
            self.missing.push(format!("no rule establishes {}", j.render()));
        }
        out
    }

    fn all(&mut self, groups: &[String], class: Class) -> Option<Vec<Derivation>> {
        groups.iter().map(|g| self.prove(&Judgement::new(g, class))).collect()
    }

    fn node(&self, j: &Judgement, rule: Rule, facts: Vec<GroupFact>, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            conclusion: j.clone(),
            rule,
            clause: rule.clause().to_string(),
            facts,
            premises,
            evidence: None,
        }
    }

    fn prove_inner(&mut self, j: &Judgement) -> Option<Derivation> {
        let g = j.group.as_str();
        let facts = self.facts;
        if j.class == Class::Upa0 {
            if let Some(f) = facts.iter().find(|f| is_hyperbolic(f, g)) {
                return Some(self.node(j, Rule::HyperbolicBase, vec![f.clone()], vec![]));
            }
            for f in facts.iter().filter(|f| f.subject == g) {
                if let Assertion::CentralZExtensionOf { quotient } = &f.assertion {
                    if let Some(q) = facts.iter().find(|h| is_hyperbolic(h, quotient)) {
                        return Some(self.node(j, Rule::CentralExtensionBase, vec![f.clone(), q.clone()], vec![]));
                    }
                    self.missing.push(format!("no fact makes {quotient} hyperbolic"));
                }
            }
            return None;
        }
        // Both classes contain the base class and share every closure rule but the tree rule.
        if let Some(d) = self.prove(&Judgement::new(g, Class::Upa0)) {
            return Some(self.node(j, Rule::BaseInclusion, vec![], vec![d]));
        }
        for (sub, _, f) in finite_index_subgroups(facts, g) {
            if let Some(d) = self.prove(&Judgement::new(sub, j.class)) {
                return Some(self.node(j, Rule::FiniteIndexOvergroup, vec![f.clone()], vec![d]));
            }
        }
        for f in facts.iter().filter(|f| f.subject == g) {
            let found = match &f.assertion {
                Assertion::DirectProductOf { factors } => self.all(factors, j.class).map(|p| (Rule::DirectProduct, p, None)),
                Assertion::GraphProductOf { factors, .. } => self.all(factors, j.class).map(|p| (Rule::GraphProduct, p, None)),
                Assertion::RelativelyHyperbolicWith { peripherals, .. } => {
                    self.all(peripherals, j.class).map(|p| (Rule::RelativelyHyperbolic, p, None))
                }
                Assertion::AcylindricalCocompactTreeActionWith {
                    vertex_groups,
                    roots_closed,
                    action,
                } if j.class == Class::Upa => {
                    let evidence = match (roots_closed, action) {
                        (true, _) => Some(None),
                        (false, Some(gog)) => match roots_check(gog) {
                            Ok(e) => Some(Some(e)),
                            Err(why) => {
                                self.missing.push(format!("{g}: vertex stabilisers not shown closed under roots: {why}"));
                                None
                            }
                        },
                        (false, None) => {
                            self.missing.push(format!("{g}: vertex stabilisers not asserted closed under roots"));
                            None
                        }
                    };
                    match evidence {
                        Some(e) => self.all(vertex_groups, Class::Upa).map(|p| (Rule::AcylindricalTree, p, e)),
                        None => None,
                    }
                }
                Assertion::StabilisationTreeActionWith { point_stabilisers } if j.class == Class::Pa => {
                    self.all(point_stabilisers, Class::Pa).map(|p| (Rule::StabilisationTree, p, None))
                }
                _ => None,
            };
            if let Some((rule, premises, evidence)) = found {
                let mut d = self.node(j, rule, vec![f.clone()], premises);
                d.evidence = evidence;
                return Some(d);
            }
        }
        None
    }
}

fn roots_check(gog: &GogSpec) -> std::result::Result<String, String> {
    let group = GroupDescription::from_spec(&GroupSpec::GraphOfGroups { gog: gog.clone() }).map_err(|e| e.to_string())?;
    let tree = BassSerreTree::realize(group).map_err(|e| e.to_string())?;
    match tree.roots_closure_check() {
        RootsVerdict::Holds { evidence } => Ok(format!("roots closure holds: {}", evidence.join("; "))),
        RootsVerdict::FailsAt { vertex, witness, reason } => {
            Err(format!("fails at {vertex} ({}, {}): {reason}", witness.0, witness.1))
        }
        RootsVerdict::Unsupported { reason } => Err(reason),
    }
}

/// Backward chaining over the fixed rule set.
pub fn derive_membership(goal: &Judgement, facts: &[GroupFact]) -> Result<std::result::Result<Derivation, FailureTrace>> {
    let mut s = Search {
        facts,
        stack: Vec::new(),
        missing: Vec::new(),
        cycle: None,
    };
    match s.prove(goal) {
        Some(d) => Ok(Ok(d)),
        None => match s.cycle {
            Some(g) => Err(Error::CyclicFactDependency(g)),
            None => Ok(Err(FailureTrace {
                goal: goal.clone(),
                missing: s.missing,
            })),
        },
    }
}

/// Re-checks every rule instance against its premises and the fact set.
pub fn replay(d: &Derivation, facts: &[GroupFact]) -> Result<()> {
    let fail = |why: String| Err(Error::invalid(format!("replay of {}: {why}", d.conclusion.render())));
    for f in &d.facts {
        if !facts.contains(f) {
            return fail(format!("fact `{}` is not in the fact set", f.render()));
        }
    }
    if d.clause != d.rule.clause() {
        return fail("clause does not match the rule".into());
    }
    let g = d.conclusion.group.as_str();
    let class = d.conclusion.class;
    let concl: Vec<&Judgement> = d.premises.iter().map(|p| &p.conclusion).collect();
    let expect = |groups: &[String], c: Class| -> bool {
        concl.len() == groups.len() && concl.iter().zip(groups).all(|(j, g)| j.group == *g && j.class == c)
    };
    let ok = match (d.rule, d.facts.as_slice()) {
        (Rule::HyperbolicBase, [f]) => class == Class::Upa0 && is_hyperbolic(f, g) && concl.is_empty(),
        (Rule::CentralExtensionBase, [f, q]) => {
            class == Class::Upa0
                && concl.is_empty()
                && matches!(&f.assertion, Assertion::CentralZExtensionOf { quotient } if f.subject == g && is_hyperbolic(q, quotient))
        }
        (Rule::BaseInclusion, []) => class != Class::Upa0 && expect(&[g.to_string()], Class::Upa0),
        (Rule::FiniteIndexOvergroup, [f]) => {
            class != Class::Upa0
                && finite_index_subgroups(std::slice::from_ref(f), g)
                    .first()
                    .map_or(false, |(sub, _, _)| expect(&[sub.to_string()], class))
        }
        (Rule::DirectProduct, [f]) => {
            matches!(&f.assertion, Assertion::DirectProductOf { factors } if f.subject == g && class != Class::Upa0 && expect(factors, class))
        }
        (Rule::GraphProduct, [f]) => {
            matches!(&f.assertion, Assertion::GraphProductOf { factors, .. } if f.subject == g && class != Class::Upa0 && expect(factors, class))
        }
        (Rule::RelativelyHyperbolic, [f]) => {
            matches!(&f.assertion, Assertion::RelativelyHyperbolicWith { peripherals, .. } if f.subject == g && class != Class::Upa0 && expect(peripherals, class))
        }
        (Rule::AcylindricalTree, [f]) => match &f.assertion {
            Assertion::AcylindricalCocompactTreeActionWith {
                vertex_groups,
                roots_closed,
                action,
            } => {
                let roots = *roots_closed
                    || match action {
                        Some(gog) => roots_check(gog).is_ok(),
                        None => false,
                    };
                f.subject == g && class == Class::Upa && roots && expect(vertex_groups, Class::Upa)
            }
            _ => false,
        },
        (Rule::StabilisationTree, [f]) => {
            matches!(&f.assertion, Assertion::StabilisationTreeActionWith { point_stabilisers } if f.subject == g && class == Class::Pa && expect(point_stabilisers, Class::Pa))
        }
        _ => false,
    };
    if !ok {
        return fail(format!("premises or facts do not instantiate `{}`", d.rule.clause()));
    }
    d.premises.iter().try_for_each(|p| replay(p, facts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "snake_case")]
pub enum ExponentBound {
    Exact { exponent: u64, trail: Vec<String> },
    FiniteNotComputed { rule: String },
    NoUniformBound { reason: String },
}

impl ExponentBound {
    pub fn render(&self) -> String {
        match self {
            ExponentBound::Exact { exponent, trail } => format!("exponent {exponent}\n{}", trail.iter().map(|t| format!("  {t}\n")).collect::<String>()),
            ExponentBound::FiniteNotComputed { rule } => format!("finite, not computed (first non-effective rule: {rule})\n"),
            ExponentBound::NoUniformBound { reason } => format!("no uniform bound: {reason}\n"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Effective arithmetic: finite index multiplies, products take lcm, a central
/// `ℤ` doubles. Other rules give no explicit constant.
pub fn exponent_bound(d: &Derivation) -> ExponentBound {
    let mut subs = Vec::with_capacity(d.premises.len());
    for p in &d.premises {
        match exponent_bound(p) {
            e @ ExponentBound::Exact { .. } => subs.push(e),
            other => return other,
        }
    }
    let values: Vec<u64> = subs
        .iter()
        .map(|s| match s {
            ExponentBound::Exact { exponent, .. } => *exponent,
            _ => unreachable!("only exact bounds are kept"),
        })
        .collect();
    let mut trail: Vec<String> = subs
        .into_iter()
        .flat_map(|s| match s {
            ExponentBound::Exact { trail, .. } => trail,
            _ => vec![],
        })
        .collect();
    let g = &d.conclusion.group;
    let not_computed = |rule: &str| ExponentBound::FiniteNotComputed { rule: rule.to_string() };
    let exponent = match d.rule {
        Rule::HyperbolicBase => match d.facts.first().map(|f| &f.assertion) {
            Some(Assertion::Free { .. }) => {
                trail.push(format!("{g}: free, exponent 1"));
                1
            }
            _ => return not_computed("hyperbolic base: constants depend on the hyperbolicity constant"),
        },
        Rule::CentralExtensionBase => match d.facts.get(1).map(|f| &f.assertion) {
            Some(Assertion::Free { .. }) => {
                trail.push(format!("{g}: central Z-extension of a free group, 2 × 1 = 2"));
                2
            }
            _ => return not_computed("central extension of a hyperbolic group: constants depend on the hyperbolicity constant"),
        },
        Rule::BaseInclusion => values[0],
        Rule::FiniteIndexOvergroup => {
            let index = finite_index_subgroups(&d.facts, g).first().map_or(1, |x| x.1);
            let e = values[0] * index;
            trail.push(format!("{g}: finite-index overgroup, {} × {index} = {e}", values[0]));
            e
        }
        Rule::DirectProduct => {
            let e = values.iter().fold(1, |a, &b| a / gcd(a, b) * b);
            trail.push(format!(
                "{g}: direct product, lcm({}) = {e}",
                values.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
            ));
            e
        }
        Rule::AcylindricalTree => return not_computed("acylindrical tree action"),
        Rule::GraphProduct => return not_computed("graph product"),
        Rule::RelativelyHyperbolic => return not_computed("relative hyperbolicity"),
        Rule::StabilisationTree => {
            return ExponentBound::NoUniformBound {
                reason: "stabilisation tree actions give the power alternative without a uniform exponent".into(),
            }
        }
    };
    ExponentBound::Exact { exponent, trail }
}

/// Groups named in the facts, for reports.
pub fn subjects(facts: &[GroupFact]) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for f in facts {
        out.entry(f.subject.clone()).or_default().push(f.render());
    }
    out
}

pub const F2XF2_FACTS: &str = include_str!("../data/facts/f2xf2.json");
pub const INDEX6_FACTS: &str = include_str!("../data/facts/index6.json");
pub const RELHYP_FACTS: &str = include_str!("../data/facts/relhyp.json");
pub const BRAID3_FACTS: &str = include_str!("../data/facts/braid3.json");
pub const FREE_BY_Z_FACTS: &str = include_str!("../data/facts/free_by_z.json");
