use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sheafmealy::epsilon::{obstruction_depth, simplex_problem};
use sheafmealy::exec::Execution;
use sheafmealy::fixtures::sections_builtin;
use sheafmealy::local_global::bounded_synthesis;
use sheafmealy::properties::{cogerm_gluing_suite, helly_suite, separation_suite};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn property_suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(
            BenchmarkId::new("beh-separation-200", name),
            &exec,
            |b, &e| b.iter(|| separation_suite(1, 200, e)),
        );
        g.bench_with_input(
            BenchmarkId::new("cogerm-gluing-100", name),
            &exec,
            |b, &e| b.iter(|| cogerm_gluing_suite(1, 100, e)),
        );
        g.bench_with_input(BenchmarkId::new("helly-d3-200", name), &exec, |b, &e| {
            b.iter(|| helly_suite(1, 200, 3, e))
        });
    }
    g.finish();
}

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("searches");
    g.sample_size(10);
    let f = sections_builtin("cex-beh-gluing");
    let simplex = simplex_problem(3).unwrap();
    for (name, exec) in MODES {
        g.bench_with_input(
            BenchmarkId::new("bounded-synthesis-4", name),
            &exec,
            |b, &e| b.iter(|| bounded_synthesis(&f.covering, &f.sections, &f.judge, 4, e).unwrap()),
        );
        g.bench_with_input(BenchmarkId::new("simplex-depth-3", name), &exec, |b, &e| {
            b.iter(|| {
                obstruction_depth(&simplex.instance, &simplex.patches, simplex.epsilon, "⋆", e)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, property_suites, searches);
criterion_main!(benches);
