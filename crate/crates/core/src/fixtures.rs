//! Groups used throughout the tests, benches and the acceptance harness.

use std::collections::BTreeMap;

use crate::graph::PresentationGraph;
use crate::word::{Alphabet, ElementWord};
use crate::group::{GogEdge, GogSpec, GogVertex, GroupDescription, GroupSpec, GOG_SCHEMA_VERSION};

pub const BS12_JSON: &str = include_str!("../data/bs12.json");
pub const Z_STAR_Z_JSON: &str = include_str!("../data/z_star_z.json");
pub const A3_B_A4_JSON: &str = include_str!("../data/a3_b_a4.json");
pub const PATH34_DOT: &str = include_str!("../data/path34.dot");
pub const SQUARE3_DOT: &str = include_str!("../data/square3.dot");

fn split(gog: GogSpec) -> GroupDescription {
    GroupDescription::from_spec(&GroupSpec::GraphOfGroups { gog }).expect("fixture is well formed")
}

fn load(json: &str) -> GroupDescription {
    split(GogSpec::parse(json).expect("fixture parses"))
}

fn emb(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// `ℤ ∗ ℤ = ⟨a⟩ ∗ ⟨b⟩` over the trivial group.
pub fn z_star_z() -> GroupDescription {
    load(Z_STAR_Z_JSON)
}

/// `BS(p, q) = ⟨a, b | b a^p b⁻¹ = a^q⟩` as an HNN extension of `⟨a⟩`.
pub fn bs(p: i64, q: i64) -> GroupDescription {
    let a = Alphabet::new(["a"]);
    let power = |e: i64| a.render(&ElementWord::gen_pow(0, e));
    split(GogSpec {
        schema_version: GOG_SCHEMA_VERSION,
        vertices: vec![GogVertex {
            name: "A".into(),
            group: GroupSpec::integers("a"),
        }],
        edges: vec![GogEdge {
            source: "A".into(),
            target: "A".into(),
            group: GroupSpec::integers("c"),
            source_embedding: emb(&[("c", &power(p))]),
            target_embedding: emb(&[("c", &power(q))]),
            stable_letter: Some("b".into()),
        }],
    })
}

/// `BS(1, 2)` loaded from the shipped JSON document.
pub fn bs12() -> GroupDescription {
    load(BS12_JSON)
}

/// `F(a, b) ∗_ℤ F(c, d)` identifying `left` with `right`.
pub fn free_amalgam(left: &str, right: &str) -> GroupDescription {
    split(GogSpec {
        schema_version: GOG_SCHEMA_VERSION,
        vertices: vec![
            GogVertex {
                name: "L".into(),
                group: GroupSpec::free(&["a", "b"]),
            },
            GogVertex {
                name: "R".into(),
                group: GroupSpec::free(&["c", "d"]),
            },
        ],
        edges: vec![GogEdge {
            source: "L".into(),
            target: "R".into(),
            group: GroupSpec::integers("z"),
            source_embedding: emb(&[("z", left)]),
            target_embedding: emb(&[("z", right)]),
            stable_letter: None,
        }],
    })
}

/// `A(m₁) ∗_⟨b⟩ A(m₂)` on generators `a, b` and `b, c`.
pub fn dihedral_amalgam(m1: u32, m2: u32) -> GroupDescription {
    split(GogSpec {
        schema_version: GOG_SCHEMA_VERSION,
        vertices: vec![
            GogVertex {
                name: "Aab".into(),
                group: GroupSpec::DihedralArtin {
                    generators: vec!["a".into(), "b".into()],
                    label: m1,
                },
            },
            GogVertex {
                name: "Abc".into(),
                group: GroupSpec::DihedralArtin {
                    generators: vec!["b".into(), "c".into()],
                    label: m2,
                },
            },
        ],
        edges: vec![GogEdge {
            source: "Aab".into(),
            target: "Abc".into(),
            group: GroupSpec::integers("b"),
            source_embedding: emb(&[("b", "b")]),
            target_embedding: emb(&[("b", "b")]),
            stable_letter: None,
        }],
    })
}

/// `A₃ ∗_⟨b⟩ A₄` loaded from the shipped JSON document.
pub fn a3_b_a4() -> GroupDescription {
    load(A3_B_A4_JSON)
}

/// Path `a -3- b -4- c`.
pub fn path34() -> PresentationGraph {
    PresentationGraph::parse(PATH34_DOT).expect("fixture parses")
}

/// 4-cycle `a b c d` with every label 3.
pub fn square3() -> PresentationGraph {
    PresentationGraph::parse(SQUARE3_DOT).expect("fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_documents_match_builders() {
        assert_eq!(bs12().spec(), bs(1, 2).spec());
        assert_eq!(a3_b_a4().spec(), dihedral_amalgam(3, 4).spec());
        assert_eq!(path34().len(), 3);
        assert_eq!(square3().edges().len(), 4);
    }
}
