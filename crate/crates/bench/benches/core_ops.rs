use criterion::{criterion_group, criterion_main, Criterion};
use rigid_core::hitchin::{local_hitchin, sample_jplus_perp, HitchinCase};
use rigid_core::opers::{ds_canonical_form, gauge_unipotent, oper_connection, principal_data, random_oper, random_unipotent_generator};
use rigid_core::rootsys::build_root_system;
use rigid_core::stabilizer::StabilizerContext;
use rigid_core::toricity::toric_check;
use rigid_core::{q, Family, GroupType};
use std::hint::black_box;

fn bench_rootsys(c: &mut Criterion) {
    c.bench_function("root_system_so_even_5", |b| b.iter(|| build_root_system(black_box(GroupType::new(Family::SOEven, 5))).unwrap()));
    c.bench_function("principal_data_sp_3", |b| b.iter(|| principal_data(black_box(GroupType::new(Family::Sp, 3))).unwrap()));
}

fn bench_opers(c: &mut Criterion) {
    let pd = principal_data(GroupType::new(Family::SOOdd, 3)).unwrap();
    let op = random_oper(&pd, 3, 1);
    let conn = gauge_unipotent(&oper_connection(&pd, &op), &random_unipotent_generator(&pd, 4, -1, 1));
    c.bench_function("ds_canonical_form_so7", |b| b.iter(|| ds_canonical_form(&pd, black_box(&conn)).unwrap()));
}

fn bench_hitchin(c: &mut Criterion) {
    let case = HitchinCase::new(Family::Sp, 3, 2).unwrap();
    let trunc = case.default_trunc();
    c.bench_function("hitchin_sample_sp6", |b| {
        b.iter(|| {
            let x = sample_jplus_perp(&case, black_box(11), trunc);
            local_hitchin(&x, case.rep()).unwrap()
        })
    });
}

fn bench_toric(c: &mut Criterion) {
    let ctx = StabilizerContext::new(Family::SOOdd, 3, 2, q(1)).unwrap();
    c.bench_function("toric_check_so7_m2", |b| b.iter(|| toric_check(black_box(&ctx)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_rootsys, bench_opers, bench_hitchin, bench_toric
}
criterion_main!(benches);
