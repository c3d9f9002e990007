use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qweyl::center::scan_center;
use qweyl::discriminant::{discriminant, theorem_71_rhs};
use qweyl::poisson::PoissonContext;
use qweyl::{Mode, WeylAlgebra, WeylParams};

fn products(c: &mut Criterion) {
    let p = WeylParams::new(&[(1, 3), (1, 4), (3, 4)], &[(0, 1, 1, 2), (0, 2, -1, 3), (1, 2, 1, 4)]).unwrap();
    let alg = WeylAlgebra::new(&p).unwrap();
    let u = alg.x(0).pow(3) * alg.y(1) + alg.x(2) * alg.x(1).pow(2);
    let v = alg.y(0).pow(3) * alg.y(2).pow(2) + alg.y(1) * alg.x(0);
    c.bench_function("product n=3 degree 5", |b| b.iter(|| black_box(&u) * black_box(&v)));
    c.bench_function("z_3 squared", |b| b.iter(|| alg.z(3).unwrap().pow(2)));
}

fn discriminants(c: &mut Criterion) {
    let p = WeylParams::new(&[(1, 3)], &[]).unwrap();
    c.bench_function("discriminant n=1 d=3", |b| b.iter(|| discriminant(black_box(&p), &[3]).unwrap()));
    let q = WeylParams::new(&[(1, 2)], &[])
        .unwrap()
        .with_mode(Mode {
            c_formal: true,
            ..Mode::default()
        })
        .unwrap();
    c.bench_function("closed form n=1 d=2 L=4", |b| b.iter(|| theorem_71_rhs(black_box(&q), &[4]).unwrap()));
}

fn center(c: &mut Criterion) {
    let p = WeylParams::new(&[(1, 2), (1, 3)], &[]).unwrap();
    c.bench_function("center scan d=(2,3) bound 6", |b| b.iter(|| scan_center(black_box(&p), 6).unwrap()));
}

fn poisson(c: &mut Criterion) {
    let p = WeylParams::new(&[(1, 2), (1, 4)], &[(0, 1, 1, 2)]).unwrap();
    let ctx = PoissonContext::new(&p).unwrap();
    let (x, y) = (ctx.var("X2"), ctx.var("Y2"));
    c.bench_function("bracket {X2, Y2} d=(2,4)", |b| b.iter(|| ctx.bracket(&x, &y).unwrap()));
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = products, discriminants, center, poisson
}
criterion_main!(kernels);
