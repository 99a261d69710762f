use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use powalt_core::alternative::{
    classify_pair, free_to_length, law_check, random_word, verify_free_certificate, FreeCertificate, LawBudget, LawSpec, LawVerdict,
    PairVerdict,
};
use powalt_core::artin::{
    classify_graph, dihedral_structure, growth_witness, pair_check_artin, reduction_report, uniform_exponent, visual_splittings,
    FlagStatus,
};
use powalt_core::bass_serre::{BassSerreTree, StabilisationVerdict, DEFAULT_BRANCHING};
use powalt_core::group::GogSpec;
use powalt_core::tree::{classify_isometry, TreeHandle};
use powalt_core::upa::{derive_membership, exponent_bound, replay, Class, ExponentBound, FactFile, Judgement};
use powalt_core::{fixtures, ElementWord, Error, GroupDescription, GroupSpec, PresentationGraph};

use crate::args::{ClassArg, Cli, Command, GroupArgs, Limits};
use crate::report::{Report, Status};

/// Why a command produced no report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Unreadable or malformed input; exit code 1.
    Input(String),
    /// A budget ran out before any verdict; exit code 2.
    Exhausted(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Exhausted(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Exhausted(m) => write!(f, "budget exhausted: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ExpansionBudgetExceeded { .. } => Failure::Exhausted(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: powalt_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::ExpansionBudgetExceeded { .. } => Failure::Exhausted(e.to_string()),
        _ => Failure::Input(format!("{}: {e}", path.display())),
    })
}

fn load_graph(path: &Path) -> Result<PresentationGraph, Failure> {
    in_file(path, PresentationGraph::parse(&read(path)?))
}

fn load_gog(path: &Path) -> Result<GroupDescription, Failure> {
    let gog = in_file(path, GogSpec::parse(&read(path)?))?;
    in_file(path, GroupDescription::from_spec(&GroupSpec::GraphOfGroups { gog }))
}

fn load_group(args: &GroupArgs) -> Result<GroupDescription, Failure> {
    if let Some(p) = &args.gog {
        return load_gog(p);
    }
    if let Some(p) = &args.graph {
        let graph = load_graph(p)?;
        return in_file(p, GroupDescription::from_spec(&GroupSpec::Artin { graph }));
    }
    let p = args.group.as_ref().expect("clap requires one group source");
    let spec: GroupSpec = serde_json::from_str(&read(p)?)
        .map_err(|e| Failure::Input(format!("{}: line {}, column {}: {e}", p.display(), e.line(), e.column())))?;
    in_file(p, GroupDescription::from_spec(&spec))
}

fn word(group: &GroupDescription, flag: &str, text: &str) -> Result<ElementWord, Failure> {
    group.parse(text).map_err(|e| Failure::Input(format!("--{flag} `{text}`: {e}")))
}

pub fn run(cli: &Cli) -> Outcome {
    let limits = cli.budgets.resolve();
    match &cli.command {
        Command::ClassifyGraph { graph } => classify(&load_graph(graph)?),
        Command::Exponent { graph } => exponent(&load_graph(graph)?),
        Command::Split { graph } => split(&load_graph(graph)?),
        Command::Reduce { graph } => reduce(&load_graph(graph)?),
        Command::PairCheck { group, g, h } => {
            let grp = load_group(group)?;
            let (g, h) = (word(&grp, "g", g)?, word(&grp, "h", h)?);
            pair_check(&grp, &g, &h, &limits)
        }
        Command::CertifyVerify { cert, length } => {
            let c = in_file(cert, FreeCertificate::from_json(&read(cert)?))?;
            certify_verify(&c, *length)
        }
        Command::ProbeStabilisation { gog, ray } => {
            let grp = load_gog(gog)?;
            let ray = word(&grp, "ray", ray)?;
            probe(grp, &ray, &limits)
        }
        Command::Dihedral { m } => dihedral(*m),
        Command::Growth { graph, generators, m } => {
            let graph = load_graph(graph)?;
            let grp = GroupDescription::from_spec(&GroupSpec::Artin { graph: graph.clone() })?;
            let s = if generators.is_empty() {
                (0..grp.rank()).map(ElementWord::gen).collect()
            } else {
                generators.iter().map(|w| word(&grp, "generators", w)).collect::<Result<Vec<_>, _>>()?
            };
            growth(&graph, &s, *m, &limits)
        }
        Command::UpaDerive { facts, goal, class } => {
            let file = in_file(facts, FactFile::parse(&read(facts)?))?;
            in_file(facts, file.validate())?;
            let goal = match (goal, class, &file.goal) {
                (Some(g), c, _) => Judgement::new(
                    g,
                    match c {
                        Some(ClassArg::Upa0) => Class::Upa0,
                        Some(ClassArg::Pa) => Class::Pa,
                        Some(ClassArg::Upa) | None => Class::Upa,
                    },
                ),
                (None, _, Some(g)) => g.clone(),
                (None, _, None) => return Err(Failure::Input(format!("{}: no goal in the file and no --goal", facts.display()))),
            };
            upa_derive(&goal, &file)
        }
        Command::LawCheck {
            group,
            law,
            samples,
            max_len,
            seed,
        } => {
            let grp = load_group(group)?;
            let law = LawSpec::parse(law).map_err(|e| Failure::Input(format!("--law `{law}`: {e}")))?;
            let budget = LawBudget {
                samples: *samples,
                max_len: *max_len,
                seed: *seed,
            };
            law_report(&grp, &law, &budget)
        }
        Command::Bench { samples, seed } => bench(*samples, *seed),
    }
}

pub fn classify(graph: &PresentationGraph) -> Outcome {
    let c = classify_graph(graph);
    let mut r = Report::new("classify-graph", Status::Definite, &c.render(), &c)
        .note("graph conditions are computed exactly from the labels");
    for f in &c.flags {
        if let FlagStatus::UnprovenHypothesis = f.status {
            r = r.note(format!("{:?} rests on an UNVERIFIED hypothesis", f.property));
        }
    }
    Ok(r.note("BY-RULE flags follow from the graph conditions; they are not computed from the group"))
}

pub fn exponent(graph: &PresentationGraph) -> Outcome {
    let e = uniform_exponent(graph);
    let mut r = Report::new("exponent", Status::Definite, &e.render(), &e)
        .note("N is the lcm of the per-edge values m' (BY-RULE); optimality is not checked");
    if !e.covered_by_theorem {
        r = r.note("the graph is outside the (2,2)-free triangle-free class, so N is UNVERIFIED for this group");
    }
    Ok(r)
}

pub fn split(graph: &PresentationGraph) -> Outcome {
    let s = visual_splittings(graph);
    let body = if s.is_empty() {
        "no visual splitting".to_string()
    } else {
        s.iter().map(|x| x.render()).collect::<Vec<_>>().join("\n")
    };
    Ok(Report::new("split", Status::Definite, &body, &s).note("separators are complete subgraphs found by exhaustive search"))
}

pub fn reduce(graph: &PresentationGraph) -> Outcome {
    let r = reduction_report(graph);
    let summary = format!("{}splits: {}, depth: {}, leaves: {}", r.render(), r.split_count(), r.depth(), r.leaves().len());
    Ok(Report::new("reduce", Status::Definite, &summary, &r)
        .note("leaf group names are BY-RULE from the induced labels; intersection and normaliser flags are BY-RULE"))
}

fn verdict_text(group: &GroupDescription, v: &PairVerdict) -> (Status, String, String) {
    match v {
        PairVerdict::FreeCertificate(c) => (
            Status::Definite,
            format!(
                "FreeCertificate: <({})^n, ({})^n> is free, n = {}, verified to length L = {}{}",
                c.g,
                c.h,
                c.exponent,
                c.verified_length,
                if c.ping_pong.is_some() { ", ping-pong sets attached" } else { "" }
            ),
            "freeness is verified to length L only; data.verdict is a certificate that certify-verify replays".into(),
        ),
        PairVerdict::CommuteWitness { exponent } => (
            Status::Definite,
            format!("CommuteWitness: [g^{exponent}, h^{exponent}] = 1"),
            "commutation checked by normal forms".into(),
        ),
        PairVerdict::CommonVertexWitness { vertex, exponent } => (
            Status::Definite,
            format!("CommonVertexWitness: g^{exponent} and h^{exponent} fix the vertex {}·{}", vertex.rep, vertex.orbit),
            "the fixed vertex is verified by the tree action".into(),
        ),
        PairVerdict::CommonBoundaryWitness {
            boundary,
            exponent,
            utl_g,
            utl_h,
        } => (
            Status::Definite,
            format!(
                "CommonBoundaryWitness: n = {exponent}, common end ({})^{}∞, utl(g) = {utl_g}, utl(h) = {utl_h}",
                group.render(&boundary.defining),
                if boundary.sign > 0 { "+" } else { "-" }
            ),
            "stabilisation of the end is verified over the window only".into(),
        ),
        PairVerdict::Unknown { reason, detail } => (
            Status::Unknown,
            format!("Unknown ({}): {detail}", serde_json::to_value(reason).expect("serialises").as_str().unwrap_or_default()),
            "no claim is made".into(),
        ),
    }
}

pub fn pair_check(group: &GroupDescription, g: &ElementWord, h: &ElementWord, limits: &Limits) -> Outcome {
    let budgets = limits.engine();
    let header = format!("group: {}\ng = {}, h = {}", group.summary(), group.render(g), group.render(h));
    if let Some(graph) = group.artin_graph() {
        let r = pair_check_artin(graph, g, h, &budgets)?;
        let (status, line, note) = verdict_text(group, &r.verdict);
        let mut body = format!("{header}\nexponent N = {}\n", r.exponent);
        for t in &r.trace {
            body += &format!("  {t}\n");
        }
        body += &line;
        return Ok(Report::new("pair-check", status, &body, &r).note(note));
    }
    if group.split().is_none() {
        return Err(Failure::Input(format!(
            "pair-check needs a graph of groups or an Artin graph, not {}",
            group.summary()
        )));
    }
    let t = BassSerreTree::with_limits(group.clone(), DEFAULT_BRANCHING, limits.node_budget)?;
    let r = classify_pair(&t, g, h, &budgets);
    let (status, line, note) = verdict_text(group, &r.verdict);
    let case = r.case.map_or("undetermined".into(), |c| {
        serde_json::to_value(c).expect("serialises").as_str().unwrap_or_default().replace('_', "-")
    });
    let body = format!("{header}\ncase: {case}\n{line}");
    Ok(Report::new("pair-check", status, &body, &r).note(note))
}

pub fn certify_verify(cert: &FreeCertificate, length: Option<usize>) -> Outcome {
    let l = length.unwrap_or(cert.verified_length);
    let v = verify_free_certificate(cert, l)?;
    let group = GroupDescription::from_spec(&cert.group)?;
    let mut body = format!(
        "certificate: <({})^{n}, ({})^{n}> free in {}\nreplayed to length {l}: {} reduced words, {} powers",
        cert.g,
        cert.h,
        group.summary(),
        v.words.words_checked,
        v.words.power_checks,
        n = cert.exponent,
    );
    body += &match &v.words.trivial_word {
        None => "\nno trivial word".to_string(),
        Some(w) => format!("\ntrivial word {w}"),
    };
    if let Some(p) = &v.ping_pong {
        body += &format!("\nping-pong: {}", if p.passed() { "passed" } else { "failed" });
    }
    let status = if v.ok { Status::Definite } else { Status::Rejected };
    Ok(Report::new("certify-verify", status, &body, &v).note("replayed from the certificate contents alone"))
}

pub fn probe(group: GroupDescription, ray: &ElementWord, limits: &Limits) -> Outcome {
    let t = BassSerreTree::with_limits(group, DEFAULT_BRANCHING, limits.node_budget)?;
    let r = t.stabilisation_probe(ray, limits.window)?;
    let mut body = format!("ray towards ({})^+∞, window {}\n", r.ray, r.window);
    for s in &r.chain {
        body += &format!(
            "H_{} = {} (γ of length {}){}\n",
            s.n,
            s.stabiliser.rendered,
            s.length,
            s.separating_rendered.as_ref().map_or(String::new(), |x| format!(", separated by {x}"))
        );
    }
    let status = match r.verdict {
        StabilisationVerdict::StabilisesWithinWindow { step } => {
            body += &format!("StabilisesWithinWindow at step {step}");
            Status::Definite
        }
        StabilisationVerdict::StrictDecreaseWitness => {
            body += &format!(
                "StrictDecreaseWitness {}",
                r.chain.iter().map(|s| s.stabiliser.rendered.as_str()).collect::<Vec<_>>().join(" ⊋ ")
            );
            Status::Definite
        }
        StabilisationVerdict::Inconclusive => {
            body += "Inconclusive";
            Status::Unknown
        }
    };
    Ok(Report::new("probe-stabilisation", status, &body, &r)
        .note("each separating element is checked by acting on the next ray segment")
        .note("a strict decrease is witnessed within the window only"))
}

pub fn dihedral(m: u32) -> Outcome {
    let d = dihedral_structure(m)?;
    let mut body = d.transcript.join("\n");
    body += &format!(
        "\nkernel of A({m}) → Z/{}: abelianization Z^{}, k = {} (Euler characteristic predicts {}), centre {} primitive: {}",
        d.quotient.modulus,
        d.abelianization_rank,
        d.k,
        d.euler_k,
        d.center,
        if d.center_primitive { "yes" } else { "no" }
    );
    let status = if d.consistent() { Status::Definite } else { Status::Unknown };
    Ok(Report::new("dihedral", status, &body, &d)
        .note("k is read from the abelianization rank (rank = k + 1) and cross-checked against the Euler characteristic")
        .note("the splitting Z × F_k itself is BY-RULE; only the abelian invariants are computed"))
}

pub fn growth(graph: &PresentationGraph, s: &[ElementWord], m: Option<u32>, limits: &Limits) -> Outcome {
    let r = growth_witness(graph, s, m, limits.verify_length)?;
    let mut body = format!("m = {}\n", r.m);
    for a in &r.attempts {
        body += &format!("({}, {}): {}\n", a.s, a.t, a.outcome);
    }
    let status = match &r.certificate {
        Some(c) => {
            body += &format!("witness ({}, {}) verified to length {}", c.g, c.h, c.verified_length);
            Status::Definite
        }
        None => {
            body += "every pair exhausted";
            Status::Unknown
        }
    };
    Ok(Report::new("growth", status, &body, &r).note("freeness is verified to length L only; data.certificate replays with certify-verify"))
}

pub fn upa_derive(goal: &Judgement, file: &FactFile) -> Outcome {
    match derive_membership(goal, &file.facts)? {
        Ok(d) => {
            replay(&d, &file.facts)?;
            let bound = exponent_bound(&d);
            let body = format!("{}{}replay: ok", d.render(), bound.render());
            let data = json!({ "derivation": d, "exponent_bound": bound });
            let mut r = Report::new("upa-derive", Status::Definite, &body, &data)
                .note("every user fact is UNVERIFIED input; rules are applied BY-RULE")
                .note("the proof tree was replayed against the fact file");
            if let ExponentBound::Exact { .. } = bound {
                r = r.note("the exponent follows from finite-index and product arithmetic over the leaves");
            }
            Ok(r)
        }
        Err(trace) => {
            let body = format!(
                "no derivation of {}\nmissing:\n{}",
                trace.goal.render(),
                trace.missing.iter().map(|m| format!("  {m}")).collect::<Vec<_>>().join("\n")
            );
            Ok(Report::new("upa-derive", Status::Unknown, &body, &trace).note("no claim is made"))
        }
    }
}

pub fn law_report(group: &GroupDescription, law: &LawSpec, budget: &LawBudget) -> Outcome {
    let gens: Vec<ElementWord> = (0..group.rank()).map(ElementWord::gen).collect();
    let v = law_check(group, &gens, law, budget)?;
    let (body, note) = match &v {
        LawVerdict::HoldsOnSample { samples } => (
            format!("law {} holds on {samples} random tuples in {}", law.render(), group.summary()),
            "holds on the sample only; the law itself is UNVERIFIED",
        ),
        LawVerdict::Counterexample { tuple, value } => (
            format!("law {} fails at ({}) with value {value}", law.render(), tuple.join(", ")),
            "the counterexample is checked by normal forms",
        ),
    };
    Ok(Report::new("law-check", Status::Definite, &body, &v).note(note))
}

pub fn bench(samples: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: BTreeMap<String, f64> = BTreeMap::new();
    let groups = [
        ("A(3)", GroupDescription::from_spec(&GroupSpec::dihedral(3))?),
        ("path34", GroupDescription::from_spec(&GroupSpec::Artin { graph: fixtures::path34() })?),
        ("BS(1,2)", fixtures::bs12()),
        ("A3 *_b A4", fixtures::a3_b_a4()),
    ];
    for (name, g) in &groups {
        let gens: Vec<ElementWord> = (0..g.rank()).map(ElementWord::gen).collect();
        let words: Vec<ElementWord> = (0..samples).map(|_| random_word(&mut rng, &gens, 20)).collect();
        let start = Instant::now();
        for w in &words {
            g.normalize(w)?;
        }
        times.insert(format!("normalize {samples} words, {name}"), start.elapsed().as_secs_f64() * 1e3);
    }
    let t = BassSerreTree::realize(fixtures::bs12())?;
    let gens = [ElementWord::gen(0), ElementWord::gen(1)];
    let words: Vec<ElementWord> = (0..samples).map(|_| random_word(&mut rng, &gens, 8)).collect();
    let start = Instant::now();
    for w in &words {
        classify_isometry(&t, w, &t.basepoint())?;
    }
    times.insert(format!("classify {samples} isometries, BS(1,2)"), start.elapsed().as_secs_f64() * 1e3);
    let a3 = &groups[0].1;
    let start = Instant::now();
    free_to_length(a3, &ElementWord::gen_pow(0, 6), &ElementWord::gen_pow(1, 6), 8)?;
    times.insert("free-to-length 8, (a^6, b^6) in A(3)".into(), start.elapsed().as_secs_f64() * 1e3);
    let body = times.iter().map(|(k, v)| format!("{k}: {v:.2} ms")).collect::<Vec<_>>().join("\n");
    Ok(Report::new("bench", Status::Definite, &body, &times).note("wall-clock timings; they vary between runs"))
}
