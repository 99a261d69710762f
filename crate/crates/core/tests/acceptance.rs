//! Acceptance run: one PASS/FAIL line per criterion, with its time budget.
//! Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use powalt_core::alternative::{
    classify_pair, free_to_length, law_check, random_word, verify_free_certificate, Budgets, LawBudget, LawSpec,
    LawVerdict, PairVerdict,
};
use powalt_core::artin::{dihedral_structure, growth_witness, pair_check_artin, reduction_report, uniform_exponent, visual_splittings};
use powalt_core::bass_serre::{BassSerreTree, BoundaryWitness, StabilisationVerdict, DEFAULT_BRANCHING};
use powalt_core::fixtures;
use powalt_core::tree::{ball, classify_isometry, IsometryClass, TreeHandle};
use powalt_core::upa::{self, derive_membership, exponent_bound, replay, ExponentBound, FactFile};
use powalt_core::{ElementWord, Error, GroupDescription, GroupSpec, PresentationGraph};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let edge = |m: u32| PresentationGraph::from_edges(&["a", "b"], &[("a", "b", m)]).map_err(err);
    let mut got = Vec::new();
    for (m, want) in [(3, 6), (4, 4), (5, 10), (6, 3)] {
        let r = uniform_exponent(&edge(m)?);
        ensure(r.adjusted == want, format!("m = {m}: N = {} (adjusted {}), want {want}", r.raw, r.adjusted))?;
        got.push(format!("m={m}→{}", r.adjusted));
    }
    let pair = PresentationGraph::from_edges(&["a", "b", "c"], &[("a", "b", 4), ("b", "c", 6)]).map_err(err)?;
    let r = uniform_exponent(&pair);
    ensure(r.raw == 6 && r.adjusted == 6, format!("{{4,6}}: N = {}, want 6", r.raw))?;
    got.push("{4,6}→6".into());
    Ok(got.join(", "))
}

fn criterion_2() -> Outcome {
    let t = BassSerreTree::realize(fixtures::bs12()).map_err(err)?;
    let b = t.group().parse("b").map_err(err)?;
    let r = t.stabilisation_probe(&b, 8).map_err(err)?;
    ensure(r.verdict == StabilisationVerdict::StrictDecreaseWitness, format!("verdict {:?}", r.verdict))?;
    ensure(r.chain.len() == 9, format!("chain has {} steps", r.chain.len()))?;
    for step in &r.chain {
        let e = 1i64 << step.n;
        let want = t.group().normalize(&ElementWord::gen_pow(0, e)).map_err(err)?;
        let rendered = format!("<{}>", t.group().render(&want));
        ensure(step.stabiliser.rendered == rendered, format!("H_{} = {}, want {rendered}", step.n, step.stabiliser.rendered))?;
        if step.n < 8 {
            ensure(step.separating.as_ref() == Some(&want), format!("step {} separating {:?}", step.n, step.separating_rendered))?;
        }
    }
    // The last step's separating element lies outside the window; check it directly.
    let p = t.basepoint();
    let gamma = |n: i64| -> Result<Vec<_>, String> {
        let end = t.act(&b.pow(n), &p).map_err(err)?;
        t.geodesic(&p, &end).map_err(err)
    };
    let a256 = ElementWord::gen_pow(0, 256);
    ensure(
        t.fixes_all(&a256, &gamma(8)?).map_err(err)? && !t.fixes_all(&a256, &gamma(9)?).map_err(err)?,
        "a^256 does not separate γ_8 from γ_9",
    )?;
    Ok(format!(
        "chain {}",
        r.chain.iter().map(|s| s.stabiliser.rendered.clone()).collect::<Vec<_>>().join(" ⊋ ")
    ))
}

fn criterion_3() -> Outcome {
    let t = BassSerreTree::realize(fixtures::z_star_z()).map_err(err)?;
    let gens = [ElementWord::gen(0), ElementWord::gen(1)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let budgets = Budgets::default();
    let b = t.basepoint();
    let mut pairs = 0;
    let mut tries = 0;
    while pairs < 50 {
        tries += 1;
        ensure(tries < 10_000, "could not sample 50 disjoint elliptic pairs")?;
        let mut elliptic = || {
            let u = random_word(&mut rng, &gens, 3);
            let k = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let x = ElementWord::gen_pow(rng.gen_range(0..2), k);
            u.mul(&x).mul(&u.inverse())
        };
        let (g, h) = (elliptic(), elliptic());
        let fixed = |w: &ElementWord| match classify_isometry(&t, w, &b) {
            Ok(IsometryClass::Elliptic { fixed }) => Ok(fixed),
            other => Err(format!("{other:?}")),
        };
        // Nontrivial elliptics fix exactly one vertex here, since edge groups are trivial.
        if fixed(&g)? == fixed(&h)? {
            continue;
        }
        pairs += 1;
        let cert = match classify_pair(&t, &g, &h, &budgets).verdict {
            PairVerdict::FreeCertificate(c) => c,
            v => return Err(format!("({}, {}) gave {v:?}", t.group().render(&g), t.group().render(&h))),
        };
        let replayed = verify_free_certificate(&cert, 10).map_err(err)?;
        ensure(
            replayed.ok && replayed.words.trivial_word.is_none(),
            format!("replay failed for ({}, {})", cert.g, cert.h),
        )?;
    }
    Ok(format!("50 pairs certified and replayed at L = 10 ({tries} samples)"))
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    for (name, group) in [
        ("Z*Z", fixtures::z_star_z()),
        ("BS(1,2)", fixtures::bs12()),
        ("A3*<b>A4", fixtures::a3_b_a4()),
    ] {
        // Infinite valence: fall back to narrower neighbour sampling if the ball outgrows the node budget.
        let mut sampled = None;
        for branching in [DEFAULT_BRANCHING, 1] {
            let t = BassSerreTree::with_limits(group.clone(), branching, 100_000).map_err(err)?;
            let x = t.basepoint();
            match ball(&t, &x, 6) {
                Ok((region, _)) => {
                    sampled = Some((t, x, region, branching));
                    break;
                }
                Err(Error::ExpansionBudgetExceeded { .. }) => continue,
                Err(e) => return Err(e.to_string()),
            }
        }
        let (t, x, region, branching) = sampled.ok_or_else(|| format!("{name}: ball exceeds the node budget"))?;
        let gens: Vec<ElementWord> = (0..group.rank()).map(ElementWord::gen).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut mismatches = 0;
        for _ in 0..200 {
            let g = random_word(&mut rng, &gens, 8);
            let tau = classify_isometry(&t, &g, &x).map_err(err)?.tau();
            // Brute force over the ball and the geodesic [x, gx].
            let gx = t.act(&g, &x).map_err(err)?;
            let mut best = usize::MAX;
            for y in region.iter().map(|(v, _)| v.clone()).chain(t.geodesic(&x, &gx).map_err(err)?) {
                best = best.min(t.distance(&y, &t.act(&g, &y).map_err(err)?).map_err(err)?);
            }
            if best != tau {
                mismatches += 1;
            }
        }
        ensure(mismatches == 0, format!("{name}: {mismatches} mismatches"))?;
        lines.push(format!("{name}: 0/200 mismatches (ball of {}, branching {branching})", region.len()));
    }
    Ok(lines.join("; "))
}

fn criterion_5() -> Outcome {
    let d3 = dihedral_structure(3).map_err(err)?;
    ensure(
        d3.k == 2 && d3.abelianization_rank == 3 && d3.abelianization_torsion.is_empty(),
        format!("m = 3: k = {}, rank {}", d3.k, d3.abelianization_rank),
    )?;
    let mut out = vec![format!("m=3: index {}, Z^3, k=2", d3.m_prime)];
    for m in [4, 6] {
        let d = dihedral_structure(m).map_err(err)?;
        ensure(d.abelianization_rank == d.k + 1, format!("m = {m}: rank {} vs k = {}", d.abelianization_rank, d.k))?;
        ensure(d.center_primitive, format!("m = {m}: centre not primitive"))?;
        out.push(format!("m={m}: k={}, rank {}", d.k, d.abelianization_rank));
    }
    Ok(out.join("; "))
}

fn criterion_6() -> Outcome {
    let graph = PresentationGraph::from_edges(&["a", "b"], &[("a", "b", 3)]).map_err(err)?;
    let budgets = Budgets {
        verify_length: 8,
        ..Budgets::default()
    };
    let (a, b) = (ElementWord::gen(0), ElementWord::gen(1));
    let report = pair_check_artin(&graph, &a, &b, &budgets).map_err(err)?;
    let cert = match report.verdict {
        PairVerdict::FreeCertificate(c) => c,
        v => return Err(format!("verdict {v:?}")),
    };
    ensure(cert.exponent == 6 && cert.verified_length == 8, format!("exponent {} at L = {}", cert.exponent, cert.verified_length))?;
    let replayed = verify_free_certificate(&cert, 8).map_err(err)?;
    ensure(replayed.ok, format!("trivial word {:?}", replayed.words.trivial_word))?;
    ensure(replayed.words.words_checked == 3280, format!("{} candidates", replayed.words.words_checked))?;
    let group = GroupDescription::from_spec(&GroupSpec::dihedral(3)).map_err(err)?;
    let comm = ElementWord::commutator(&a.pow(6), &b.pow(6));
    ensure(!group.is_identity(&comm).map_err(err)?, "[a^6, b^6] = 1")?;
    // Independent route: the raw word check on the dihedral engine.
    let direct = free_to_length(&group, &a.pow(6), &b.pow(6), 8).map_err(err)?;
    ensure(direct.passed(), "direct word check found a trivial word")?;
    Ok(format!("3280 candidates + {} powers, no trivial word; [a^6,b^6] ≠ 1", replayed.words.power_checks))
}

fn criterion_7() -> Outcome {
    let group = fixtures::bs12();
    let law = LawSpec::parse("[[x1,x2],[x3,x4]]").map_err(err)?;
    let gens = [ElementWord::gen(0), ElementWord::gen(1)];
    match law_check(&group, &gens, &law, &LawBudget::default()).map_err(err)? {
        LawVerdict::HoldsOnSample { samples } => {
            ensure(samples == 100, format!("{samples} samples"))?;
            Ok("100 tuples, 0 counterexamples".into())
        }
        LawVerdict::Counterexample { tuple, value } => Err(format!("counterexample {tuple:?} ↦ {value}")),
    }
}

fn criterion_8() -> Outcome {
    let t = BassSerreTree::realize(fixtures::bs12()).map_err(err)?;
    let g = t.group().clone();
    let (a, b) = (g.parse("a").map_err(err)?, g.parse("b").map_err(err)?);
    // The end fixed by ⟨a⟩: the ray b^{-n}·A.
    let xi = BoundaryWitness { defining: b.clone(), sign: -1 };
    let utl = |w: &ElementWord| t.utl_value(&xi, w, 4).map_err(err);
    let gens = [a.clone(), b.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let (x, y) = (random_word(&mut rng, &gens, 6), random_word(&mut rng, &gens, 6));
        let (ux, uy, uxy) = (utl(&x)?, utl(&y)?, utl(&x.mul(&y))?);
        ensure(ux + uy == uxy, format!("utl({}) + utl({}) ≠ utl(product)", g.render(&x), g.render(&y)))?;
        // Oracle: minus the stable-letter exponent sum.
        ensure(ux == -x.exponent_sum(1), format!("utl({}) = {ux}", g.render(&x)))?;
    }
    let (ua, ub) = (utl(&a)?, utl(&b)?);
    ensure(ua == 0, format!("utl(a) = {ua}"))?;
    ensure(ub == 1, format!("additivity holds on 100 pairs and utl(a) = 0, but utl(b) = {ub} at the end fixed by a (want 1)"))?;
    Ok("additive on 100 pairs, utl(b) = 1, utl(a) = 0".into())
}

fn criterion_9() -> Outcome {
    let p = fixtures::path34();
    let s = visual_splittings(&p);
    ensure(s.len() == 1, format!("{} splittings of the path", s.len()))?;
    ensure(
        s[0].gamma1 == ["a", "b"] && s[0].gamma2 == ["b", "c"] && s[0].gamma0 == ["b"],
        format!("splitting {}", s[0].render()),
    )?;
    let r = reduction_report(&p);
    let leaves: Vec<Vec<String>> = r.leaves().iter().map(|l| l.to_vec()).collect();
    ensure(leaves == [vec!["a", "b"], vec!["b", "c"]], format!("leaves {leaves:?}"))?;
    ensure(r.render().matches("dihedral A(").count() == 2, "leaves are not both dihedral")?;
    let sq = visual_splittings(&fixtures::square3());
    let seps: Vec<Vec<String>> = sq.iter().map(|s| s.gamma0.clone()).collect();
    ensure(seps == [vec!["a", "c"], vec!["b", "d"]], format!("4-cycle separators {seps:?}"))?;
    Ok(format!("{}; leaves {{a,b}}, {{b,c}}; 4-cycle over {{a,c}} and {{b,d}}", s[0].render()))
}

fn criterion_10() -> Outcome {
    let mut out = Vec::new();
    for (name, text, want) in [
        ("F2xF2", upa::F2XF2_FACTS, Some(1)),
        ("index-6 overgroup", upa::INDEX6_FACTS, Some(6)),
        ("rel-hyp", upa::RELHYP_FACTS, None),
    ] {
        let f = FactFile::parse(text).map_err(err)?;
        let goal = f.goal.clone().ok_or("fact file has no goal")?;
        let d = derive_membership(&goal, &f.facts)
            .map_err(err)?
            .map_err(|t| format!("{name}: missing {:?}", t.missing))?;
        replay(&d, &f.facts).map_err(err)?;
        let bound = exponent_bound(&d);
        match (want, &bound) {
            (Some(n), ExponentBound::Exact { exponent, .. }) if *exponent == n => out.push(format!("{name}: {n}")),
            (None, ExponentBound::FiniteNotComputed { .. }) => out.push(format!("{name}: finite, not computed")),
            _ => return Err(format!("{name}: bound {bound:?}")),
        }
    }
    Ok(out.join("; ") + "; all replays succeed")
}

fn criterion_11() -> Outcome {
    let p = fixtures::path34();
    let s: Vec<ElementWord> = (0..3).map(ElementWord::gen).collect();
    let r = growth_witness(&p, &s, Some(6), 8).map_err(err)?;
    let cert = r.certificate.ok_or_else(|| format!("exhausted: {:?}", r.attempts))?;
    let replayed = verify_free_certificate(&cert, 8).map_err(err)?;
    ensure(replayed.ok && cert.exponent == 6, "certificate does not replay")?;
    Ok(format!("witness ({}, {}) at m = 6, replayed at L = 8", cert.g, cert.h))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "uniform exponents", Duration::from_secs(1), criterion_1),
        (2, "BS(1,2) stabilisation failure", Duration::from_secs(10), criterion_2),
        (3, "elliptic-elliptic freeness in Z*Z", Duration::from_secs(60), criterion_3),
        (4, "isometry classification oracle", Duration::from_secs(120), criterion_4),
        (5, "dihedral kernel structure", Duration::from_secs(30), criterion_5),
        (6, "A(3) pair (a, b) at n = 6", Duration::from_secs(120), criterion_6),
        (7, "BS(1,2) metabelian law", Duration::from_secs(60), criterion_7),
        (8, "utl homomorphism", Duration::from_secs(60), criterion_8),
        (9, "visual splittings and reduction", Duration::from_secs(10), criterion_9),
        (10, "class derivations and exponents", Duration::from_secs(10), criterion_10),
        (11, "growth witness on path (3,4)", Duration::from_secs(300), criterion_11),
    ];
    let mut failures = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, over the {limit:?} limit")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {n:>2} [{status}] {name} ({took:.2?}): {detail}");
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
