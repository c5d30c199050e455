use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cocofj::harness::invalidate_nat;
use cocofj::synth::synthesize;
use cocofj::{check_cocontextual, contextual, Tuning};
use cocofj_bench::{configs, warm_session};

fn checkers(c: &mut Criterion) {
    let tuning = Tuning::default();
    for cfg in configs() {
        let program = synthesize(&cfg);
        let id = cfg.to_string();
        let mut group = c.benchmark_group("check");
        group.bench_with_input(BenchmarkId::new("contextual", &id), &program, |b, p| {
            b.iter(|| contextual::check_program(p))
        });
        group.bench_with_input(BenchmarkId::new("co-init", &id), &program, |b, p| {
            b.iter(|| check_cocontextual(p, tuning))
        });
        let mut session = warm_session(&cfg, tuning);
        group.bench_function(BenchmarkId::new("co-inc", &id), |b| {
            b.iter(|| {
                invalidate_nat(&mut session);
                session.check()
            })
        });
        group.finish();
    }
}

criterion_group!(benches, checkers);
criterion_main!(benches);
