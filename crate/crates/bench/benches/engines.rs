use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use powalt_bench::sample_words;
use powalt_core::alternative::{classify_pair, free_to_length, Budgets};
use powalt_core::artin::{dihedral_structure, pair_check_artin, uniform_exponent};
use powalt_core::bass_serre::BassSerreTree;
use powalt_core::tree::{classify_isometry, TreeHandle};
use powalt_core::upa::{self, derive_membership, FactFile};
use powalt_core::{fixtures, ElementWord, GroupDescription, GroupSpec};

fn normal_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalize");
    let groups = [
        ("dihedral-3", GroupDescription::from_spec(&GroupSpec::dihedral(3)).unwrap()),
        ("artin-path34", GroupDescription::from_spec(&GroupSpec::Artin { graph: fixtures::path34() }).unwrap()),
        ("bs12", fixtures::bs12()),
        ("a3-amalgam-a4", fixtures::a3_b_a4()),
    ];
    for (name, g) in &groups {
        let words = sample_words(g, 64, 24, 1);
        group.bench_with_input(BenchmarkId::from_parameter(name), &words, |b, words| {
            b.iter(|| {
                for w in words {
                    black_box(g.normalize(w).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn trees(c: &mut Criterion) {
    let t = BassSerreTree::realize(fixtures::bs12()).unwrap();
    let words = sample_words(t.group(), 32, 8, 2);
    c.bench_function("classify-isometry/bs12", |b| {
        b.iter(|| {
            for w in &words {
                black_box(classify_isometry(&t, w, &t.basepoint()).unwrap());
            }
        })
    });
    let t = BassSerreTree::realize(fixtures::z_star_z()).unwrap();
    let (g, h) = (ElementWord::gen_pow(0, 2), ElementWord::gen_pow(1, 3));
    let budgets = Budgets::default();
    c.bench_function("classify-pair/z-star-z", |b| b.iter(|| black_box(classify_pair(&t, &g, &h, &budgets))));
    let bs = BassSerreTree::realize(fixtures::bs12()).unwrap();
    let ray = ElementWord::gen(1);
    c.bench_function("stabilisation-probe/bs12-window-8", |b| b.iter(|| black_box(bs.stabilisation_probe(&ray, 8).unwrap())));
}

fn enumeration(c: &mut Criterion) {
    let a3 = GroupDescription::from_spec(&GroupSpec::dihedral(3)).unwrap();
    let (x, y) = (ElementWord::gen_pow(0, 6), ElementWord::gen_pow(1, 6));
    let mut group = c.benchmark_group("free-to-length/dihedral-3");
    group.sample_size(10);
    for l in [6usize, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| b.iter(|| black_box(free_to_length(&a3, &x, &y, l).unwrap())));
    }
    group.finish();
}

fn artin(c: &mut Criterion) {
    let p = fixtures::path34();
    c.bench_function("uniform-exponent/path34", |b| b.iter(|| black_box(uniform_exponent(&p))));
    let mut group = c.benchmark_group("artin");
    group.sample_size(10);
    group.bench_function("dihedral-kernel/6", |b| b.iter(|| black_box(dihedral_structure(6).unwrap())));
    let g = GroupDescription::from_spec(&GroupSpec::Artin { graph: p.clone() }).unwrap();
    let (u, v) = (g.parse("a*b").unwrap(), g.parse("b*c").unwrap());
    let budgets = Budgets {
        verify_length: 6,
        ..Budgets::default()
    };
    group.bench_function("pair-check/path34", |b| b.iter(|| black_box(pair_check_artin(&p, &u, &v, &budgets).unwrap())));
    group.finish();
}

fn derivations(c: &mut Criterion) {
    let file = FactFile::parse(upa::FREE_BY_Z_FACTS).unwrap();
    let goal = file.goal.clone().unwrap();
    c.bench_function("upa-derive/free-by-z", |b| b.iter(|| black_box(derive_membership(&goal, &file.facts).unwrap())));
}

criterion_group!(benches, normal_forms, trees, enumeration, artin, derivations);
criterion_main!(benches);
