use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hodge_gp::gp::GpModel;
use hodge_gp::{eigendecompose, KernelContext};
use hodge_gp_bench::{hc_matern, market, train_indices};
use std::hint::black_box;

const SIZES: [usize; 3] = [10, 15, 25];

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigendecompose");
    for n in SIZES {
        let sc = market(n);
        group.bench_with_input(BenchmarkId::new("dense", sc.num_edges()), &sc, |b, sc| {
            b.iter(|| eigendecompose(black_box(sc), None).unwrap())
        });
        let l = sc.num_edges() / 4;
        group.bench_with_input(
            BenchmarkId::new("truncated", sc.num_edges()),
            &sc,
            |b, sc| b.iter(|| eigendecompose(black_box(sc), Some(l)).unwrap()),
        );
    }
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("hc_kernel");
    for n in SIZES {
        let ctx = KernelContext::new(market(n), None).unwrap();
        let spec = hc_matern();
        group.bench_with_input(
            BenchmarkId::new("assemble", ctx.spectrum().num_edges()),
            &ctx,
            |b, ctx| b.iter(|| spec.assemble(black_box(ctx)).unwrap().matrix()),
        );
    }
    group.finish();
}

fn objective(c: &mut Criterion) {
    let mut group = c.benchmark_group("objective");
    for n in SIZES {
        let sc = market(n);
        let ctx = KernelContext::new(sc.clone(), None).unwrap();
        let train = train_indices(sc.num_edges());
        let y: Vec<f64> = train.iter().map(|&i| (i as f64 * 0.37).sin()).collect();
        let model = GpModel::new(hc_matern(), train, y, 0.1, sc.num_edges()).unwrap();
        let mut kernel = model.kernel_spec.assemble(&ctx).unwrap();
        let theta = model.unconstrained.clone();
        group.bench_function(
            BenchmarkId::new("value_and_gradient", sc.num_edges()),
            |b| {
                b.iter(|| {
                    model
                        .objective(&mut kernel, &ctx, black_box(&theta))
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, eigen, kernel, objective);
criterion_main!(benches);
