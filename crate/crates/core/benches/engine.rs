use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lieheat::exec;
use lieheat::group::GroupSpec;
use lieheat::heatkernel::SpectralKernel;
use lieheat::linalg::RMat;
use lieheat::operators::{BiInvariantLaplacian, SubLaplacianSpec};

fn spec() -> SubLaplacianSpec {
    let g = GroupSpec::su2();
    let a = RMat::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 2.0]);
    SubLaplacianSpec::new(g.clone(), a, BiInvariantLaplacian::unit(&g)).unwrap()
}

fn bench(c: &mut Criterion) {
    let spec = spec();
    let g = spec.group().clone();
    let xs: Vec<_> = (0..64)
        .map(|i| {
            let s = i as f64 * 0.098;
            g.exp_vec(&[s.cos(), s.sin(), 0.3 * s]).unwrap()
        })
        .collect();
    let full = rayon::current_num_threads().max(2);
    let mut group = c.benchmark_group("engine");
    group.sample_size(10);
    for threads in [1, full] {
        group.bench_with_input(BenchmarkId::new("build", threads), &threads, |b, &n| {
            b.iter(|| exec::with_threads(n, || SpectralKernel::build(&spec, 4000.0).unwrap()).unwrap())
        });
        let kernel = SpectralKernel::build(&spec, 4000.0).unwrap();
        group.bench_with_input(BenchmarkId::new("densities", threads), &threads, |b, &n| {
            b.iter(|| exec::with_threads(n, || kernel.densities(0.05, &xs).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
