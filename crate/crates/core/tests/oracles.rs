//! Independent routes to the same answers.
//!
//! The dihedral Garside engine is compared against Britton normal forms of the
//! splittings `A(m) ≅ ⟨x⟩ ∗_{x² = y^m} ⟨y⟩` (odd `m`) and
//! `A(2k) ≅ ⟨y, b | b y^k b⁻¹ = y^k⟩` (even `m`), with `y = ab`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use powalt_core::alternative::random_word;
use powalt_core::bass_serre::BassSerreTree;
use powalt_core::group::garside::alternating;
use powalt_core::group::{GogEdge, GogSpec, GogVertex, GOG_SCHEMA_VERSION};
use powalt_core::tree::{ball, classify_isometry, TreeHandle};
use powalt_core::{fixtures, ElementWord, GroupDescription, GroupSpec};

/// `aba… (bab…)⁻¹` with `m` letters on each side.
fn artin_relator(m: usize) -> ElementWord {
    alternating(0, m).mul(&alternating(1, m).inverse())
}

fn emb(k: &str, v: String) -> BTreeMap<String, String> {
    BTreeMap::from([(k.to_string(), v)])
}

/// The splitting of `A(m)` and the images of `a`, `b` in it.
fn dihedral_split(m: u32) -> (GroupDescription, [ElementWord; 2]) {
    let gog = if m % 2 == 1 {
        GogSpec {
            schema_version: GOG_SCHEMA_VERSION,
            vertices: vec![
                GogVertex {
                    name: "X".into(),
                    group: GroupSpec::integers("x"),
                },
                GogVertex {
                    name: "Y".into(),
                    group: GroupSpec::integers("y"),
                },
            ],
            edges: vec![GogEdge {
                source: "X".into(),
                target: "Y".into(),
                group: GroupSpec::integers("c"),
                source_embedding: emb("c", "x^2".into()),
                target_embedding: emb("c", format!("y^{m}")),
                stable_letter: None,
            }],
        }
    } else {
        GogSpec {
            schema_version: GOG_SCHEMA_VERSION,
            vertices: vec![GogVertex {
                name: "Y".into(),
                group: GroupSpec::integers("y"),
            }],
            edges: vec![GogEdge {
                source: "Y".into(),
                target: "Y".into(),
                group: GroupSpec::integers("c"),
                source_embedding: emb("c", format!("y^{}", m / 2)),
                target_embedding: emb("c", format!("y^{}", m / 2)),
                stable_letter: Some("b".into()),
            }],
        }
    };
    let g = GroupDescription::from_spec(&GroupSpec::GraphOfGroups { gog }).unwrap();
    let (a, b) = if m % 2 == 1 {
        let h = (m as i64 - 1) / 2;
        (format!("y^{}*x", -h), format!("x^-1*y^{}", h + 1))
    } else {
        ("y*b^-1".to_string(), "b".to_string())
    };
    let images = [g.parse(&a).unwrap(), g.parse(&b).unwrap()];
    (g, images)
}

/// Inserts `count` conjugated relators (or inverses) at random positions.
fn relator_moves(rng: &mut ChaCha8Rng, w: &ElementWord, r: &ElementWord, gens: &[ElementWord], count: usize) -> ElementWord {
    let mut letters = w.to_letters();
    for _ in 0..count {
        let u = random_word(rng, gens, 3);
        let rr = if rng.gen_bool(0.5) { r.clone() } else { r.inverse() };
        let piece = u.mul(&rr).mul(&u.inverse());
        let at = rng.gen_range(0..=letters.len());
        letters.splice(at..at, piece.to_letters());
    }
    ElementWord::from_letters(letters)
}

#[test]
fn garside_agrees_with_britton_on_dihedral_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 3..=8u32 {
        let garside = GroupDescription::from_spec(&GroupSpec::dihedral(m)).unwrap();
        let (split, images) = dihedral_split(m);
        let gens = [ElementWord::gen(0), ElementWord::gen(1)];
        let rel = artin_relator(m as usize);
        assert!(split.is_identity(&rel.substitute(&images)).unwrap(), "m = {m}: images satisfy the relator");
        for _ in 0..150 {
            let u = random_word(&mut rng, &gens, 10);
            // Equal by construction: both engines must agree.
            let v = relator_moves(&mut rng, &u, &rel, &gens, 2);
            assert!(garside.equal(&u, &v).unwrap(), "m = {m}: Garside misses a relator move");
            assert!(split.equal(&u.substitute(&images), &v.substitute(&images)).unwrap());
            // Unrelated pair: the verdicts must match.
            let w = random_word(&mut rng, &gens, 10);
            let g_eq = garside.equal(&u, &w).unwrap();
            let s_eq = split.equal(&u.substitute(&images), &w.substitute(&images)).unwrap();
            assert_eq!(g_eq, s_eq, "m = {m}: {} vs {}", garside.render(&u), garside.render(&w));
            // The normal form is the same element.
            let nf = garside.normalize(&u).unwrap();
            assert!(split.equal(&nf.substitute(&images), &u.substitute(&images)).unwrap());
        }
    }
}

#[test]
fn amalgam_engine_respects_relators() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in [fixtures::bs12(), fixtures::a3_b_a4(), fixtures::z_star_z()] {
        let rels = g.presentation().relators;
        let gens: Vec<ElementWord> = (0..g.rank()).map(ElementWord::gen).collect();
        for _ in 0..100 {
            let u = random_word(&mut rng, &gens, 8);
            let mut v = u.clone();
            for r in &rels {
                v = relator_moves(&mut rng, &v, r, &gens, 1);
            }
            assert!(g.equal(&u, &v).unwrap(), "{}: relator move changed {}", g.summary(), g.render(&u));
        }
    }
}

#[test]
fn artin_path_engine_matches_its_dihedral_pieces() {
    // Elements of a standard parabolic are equal in A_Γ iff equal in the parabolic.
    let p = fixtures::path34();
    let whole = GroupDescription::from_spec(&GroupSpec::Artin { graph: p }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (pair, m) in [([0usize, 1], 3u32), ([1, 2], 4)] {
        let piece = GroupDescription::from_spec(&GroupSpec::dihedral(m)).unwrap();
        let map = [ElementWord::gen(pair[0]), ElementWord::gen(pair[1])];
        let gens = [ElementWord::gen(0), ElementWord::gen(1)];
        for _ in 0..100 {
            let (u, w) = (random_word(&mut rng, &gens, 8), random_word(&mut rng, &gens, 8));
            let v = relator_moves(&mut rng, &u, &artin_relator(m as usize), &gens, 1);
            for other in [&v, &w] {
                assert_eq!(
                    piece.equal(&u, other).unwrap(),
                    whole.equal(&u.substitute(&map), &other.substitute(&map)).unwrap()
                );
            }
        }
    }
}

#[test]
fn tree_distances_match_breadth_first_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for g in [fixtures::z_star_z(), fixtures::bs12()] {
        let t = BassSerreTree::realize(g.clone()).unwrap();
        let x = t.basepoint();
        let (region, _) = ball(&t, &x, 4).unwrap();
        for (v, d) in &region {
            assert_eq!(t.distance(&x, v).unwrap(), *d);
        }
        let gens: Vec<ElementWord> = (0..g.rank()).map(ElementWord::gen).collect();
        for _ in 0..50 {
            let w = random_word(&mut rng, &gens, 6);
            let c = classify_isometry(&t, &w, &x).unwrap();
            let wx = t.act(&w, &x).unwrap();
            let d = t.distance(&x, &wx).unwrap();
            // Displacement at x is τ plus twice the distance to Min(w), so parities agree.
            assert_eq!((d - c.tau()) % 2, 0);
        }
    }
}
