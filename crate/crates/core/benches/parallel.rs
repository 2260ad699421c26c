use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use omega_approx::constructions::buechi_to_safety;
use omega_approx::families::{gf_one, phi_n_oracle};
use omega_approx::lasso::check_lasso_precise_with;
use omega_approx::par::Exec;
use omega_approx::synth::{BruteForce, Target};
use omega_approx::Alphabet;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn precision_check(c: &mut Criterion) {
    let a = gf_one();
    let s = buechi_to_safety(&a, 8).unwrap();
    let mut g = c.benchmark_group("check_lasso_precise");
    for (name, exec) in MODES {
        g.bench_with_input(
            BenchmarkId::new(name, "gf_one n=8 B=12"),
            &exec,
            |b, &exec| b.iter(|| check_lasso_precise_with(exec, &s, &a, 8, 12).unwrap()),
        );
    }
    g.finish();
}

fn brute_force(c: &mut Criterion) {
    let phi = phi_n_oracle(Alphabet::numeric(2), 2).unwrap();
    let mut g = c.benchmark_group("brute_force");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mut search = BruteForce::new(2, 3, 4, Target::Deterministic);
        search.exec = exec;
        g.bench_with_input(
            BenchmarkId::new(name, "phi_2 k=3 m=4"),
            &search,
            |b, search| b.iter(|| search.run(&phi).unwrap()),
        );
    }
    g.finish();
}

criterion_group!(benches, precision_check, brute_force);
criterion_main!(benches);
