use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use unistab_core::cones::{cone_contains, cone_from_highest_weights};
use unistab_core::flow::{flow_minimize, slice_infimum_for};
use unistab_core::scenario::{build_y_point, p1_grid, sweep_semistable_set};
use unistab_core::{BuiltinScenario, FlowConfig, GroupDescriptor, ProjectivePoint, RadialFamily, Rational, Weight};

fn point(v: &[f64]) -> ProjectivePoint {
    ProjectivePoint::from_slice(&v.iter().map(|&x| x.into()).collect::<Vec<_>>()).unwrap()
}

fn moment(c: &mut Criterion) {
    let s = BuiltinScenario::Sl2xSl2P2.materialize().unwrap();
    let ev = &s.setup().unwrap().evaluator;
    let p = build_y_point(&s, &point(&[0.6, 0.0, 0.8])).unwrap();
    c.bench_function("moment/sl2xsl2_p2", |b| b.iter(|| ev.evaluate(black_box(&p)).unwrap()));
}

fn flow(c: &mut Criterion) {
    let cfg = FlowConfig::default();
    let s = BuiltinScenario::Sl2LogC(2.0).materialize().unwrap();
    let ev = &s.setup().unwrap().evaluator;
    let p = build_y_point(&s, &point(&[0.6, 0.8])).unwrap();
    c.bench_function("flow/sl2_log_c(2)", |b| b.iter(|| flow_minimize(ev, black_box(&p), &cfg).unwrap()));

    let z3 = BuiltinScenario::NaiveP1Z3.materialize().unwrap();
    let grid = p1_grid(20);
    z3.setup().unwrap();
    c.bench_function("sweep/naive_p1_z3/20", |b| b.iter(|| sweep_semistable_set(&z3, black_box(&grid), &cfg).unwrap()));
}

fn slice(c: &mut Criterion) {
    c.bench_function("slice/log(0.5)", |b| {
        b.iter(|| slice_infimum_for(black_box(RadialFamily::Log { c: 0.5 })).unwrap())
    });
}

fn cones(c: &mut Criterion) {
    let cone = cone_from_highest_weights(&GroupDescriptor::sl3(), &[Weight::new(vec![1, 1]), Weight::new(vec![2, 1])])
        .unwrap();
    let w1 = [Rational::from_integer(1), Rational::from_integer(0)];
    c.bench_function("cone/contains", |b| b.iter(|| cone_contains(&cone, black_box(&w1)).unwrap()));
}

criterion_group!(benches, moment, flow, slice, cones);
criterion_main!(benches);
