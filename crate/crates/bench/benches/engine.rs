use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use qborel::dilog::{big_g, check_tau_beta, BParam};
use qborel::verify::{suite_decomposition, suite_quantum_group};
use qborel::{apply_script, builtin_script, Generator};
use qborel_bench::{coproduct_of, preset};

fn algebra(c: &mut Criterion) {
    let rep = preset("B2_full");
    let (e1, f1) = (rep.e(1).unwrap().clone(), rep.f(1).unwrap().clone());
    c.bench_function("mul B2 e1*f1", |b| {
        b.iter(|| black_box(&e1).mul(black_box(&f1)).unwrap())
    });
    c.bench_function("relations A3_simple", |b| {
        let r = preset("A3_simple");
        b.iter(|| suite_quantum_group(black_box(&r)).unwrap())
    });
}

fn rewriting(c: &mut Criterion) {
    let script = builtin_script("a3_decompose").unwrap();
    let de2 = coproduct_of("A3_simple", Generator::E(2));
    c.bench_function("a3_decompose on Δ(e2)", |b| {
        b.iter(|| apply_script(&script, black_box(&de2)).unwrap())
    });
    c.bench_function("decomposition suite A2", |b| {
        b.iter(|| suite_decomposition("A2").unwrap())
    });
}

fn numerics(c: &mut Criterion) {
    let p = BParam::new(0.75).unwrap();
    c.bench_function("G_b in strip", |b| {
        b.iter(|| big_g(&p, black_box(Complex64::new(0.9, 0.4))).unwrap())
    });
    c.bench_function("G_b with continuation", |b| {
        b.iter(|| big_g(&p, black_box(Complex64::new(-3.1, -0.7))).unwrap())
    });
    let mut g = c.benchmark_group("integrals");
    g.sample_size(10);
    g.bench_function("tau-beta", |b| {
        let q = p.Q();
        b.iter(|| {
            check_tau_beta(
                &p,
                Complex64::new(q / 3.0, 0.0),
                Complex64::new(q / 3.0, 0.0),
            )
            .unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, algebra, rewriting, numerics);
criterion_main!(benches);
