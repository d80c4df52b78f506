use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use seuguard_bench::{fan_speed_control, motivating_example};
use seuguard_core::cfg::pdg_of;
use seuguard_core::slicer::{backward_slice_multi, output_criteria};
use seuguard_core::{classify_variable, oracle_classify};

fn frontend(c: &mut Criterion) {
    let f = motivating_example();
    let out = f.program.find_var(&f.spec.output_variable).unwrap();
    c.bench_function("pdg_and_slice", |b| {
        b.iter(|| {
            let pdg = pdg_of(black_box(&f.program));
            backward_slice_multi(&pdg, &output_criteria(&f.program, out)).unwrap()
        })
    });
}

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    group.sample_size(10);
    for f in [motivating_example(), fan_speed_control()] {
        for var in f.program.list_variables() {
            let id = format!("{}/{}", f.name, f.program.var_name(var));
            group.bench_with_input(BenchmarkId::new("checker", &id), &var, |b, &x| {
                b.iter(|| classify_variable(&f.program, &f.spec, x, &f.config, None).unwrap())
            });
            group.bench_with_input(BenchmarkId::new("oracle", &id), &var, |b, &x| {
                b.iter(|| {
                    let cfg = &f.config;
                    oracle_classify(&f.program, &f.spec, &cfg.fault_model(x), &cfg.domain, cfg.bounds).unwrap()
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, frontend, engines);
criterion_main!(benches);
