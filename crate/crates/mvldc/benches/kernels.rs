//! Sequential vs. parallel throughput on the four hot kernels. Build with
//! the default `parallel` feature so both execution modes are available;
//! without it the two series coincide.
//!
//!     cargo bench --bench kernels

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mvldc::decpoly::{canonical_polynomial, exhaustive_search, DecodingPolynomial};
use mvldc::gf2::{build_field, find_order_m_element, Fe};
use mvldc::ldc::{verify_smoothness_exact, Code};
use mvldc::mvfam::{search_family, FamilySearch, MatchingFamily};
use mvldc::par::Parallelism;
use mvldc::zmod::{canonical_set, Modulus, ZVector};

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Auto),
];

fn code_m511_h2() -> (Code, Vec<Fe>) {
    let poly = DecodingPolynomial::from_json(mvldc::M511_POLY_JSON).unwrap();
    let family = MatchingFamily::new(
        511,
        2,
        vec![ZVector::new(511, &[21, 56]), ZVector::new(511, &[259, 161])],
    )
    .unwrap();
    let code = Code::with_native_field(family, poly).unwrap();
    let ctx = code.ctx();
    let x = vec![
        ctx.element_from_bits(0x1ab).unwrap(),
        ctx.element_from_bits(0x17).unwrap(),
    ];
    (code, x)
}

/// Encode 2 symbols into the N = 261,121 positions of the m=511 code.
fn bench_encode(c: &mut Criterion) {
    let (code, x) = code_m511_h2();
    let mut group = c.benchmark_group("encode_m511_h2");
    group.sample_size(10);
    for (name, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| code.encode(&x, par).unwrap());
        });
    }
    group.finish();
}

/// Exact smoothness certificate (all bijections + exact decoding) for one
/// decoder of an m=15, h=4 code: 4 × 50,625 query maps plus 3 × 50,625
/// decode checks.
fn bench_smoothness(c: &mut Criterion) {
    let m15 = Modulus::factorize(15).unwrap();
    let family = match search_family(&m15, 4, 3, 0, None, Parallelism::Auto).unwrap() {
        FamilySearch::Found(f) => f,
        other => panic!("no m=15 h=4 family: {other:?}"),
    };
    let ctx = build_field(4, None).unwrap();
    let gamma = find_order_m_element(&ctx, &m15).unwrap();
    let poly = canonical_polynomial(canonical_set(&m15).sorted(), &gamma, &ctx).unwrap();
    let code = Code::new(family, poly, ctx, gamma).unwrap();
    let mut group = c.benchmark_group("smoothness_m15_h4");
    group.sample_size(10);
    for (name, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| verify_smoothness_exact(&code, 0, par).unwrap());
        });
    }
    group.finish();
}

/// Minimal-monomial search over m=15: exhausts all 575 subsets below k=4,
/// then finds the 4-monomial witness.
fn bench_poly_search(c: &mut Criterion) {
    let m15 = Modulus::factorize(15).unwrap();
    let ctx = build_field(4, None).unwrap();
    let gamma = find_order_m_element(&ctx, &m15).unwrap();
    let s: Vec<u64> = canonical_set(&m15).sorted().to_vec();
    let mut group = c.benchmark_group("poly_search_m15");
    group.sample_size(10);
    for (name, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| exhaustive_search(&s, &gamma, &ctx, 4, None, par).unwrap());
        });
    }
    group.finish();
}

/// Matching-pair search for m=1533, h=2 (linear-solve candidate pool plus
/// pairwise inner-product filtering).
fn bench_family_search(c: &mut Criterion) {
    let m1533 = Modulus::factorize(1533).unwrap();
    let mut group = c.benchmark_group("family_search_m1533_h2");
    group.sample_size(10);
    for (name, par) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| search_family(&m1533, 2, 2, 0, None, par).unwrap());
        });
    }
    group.finish();
}

criterion_group!(
    kernels,
    bench_encode,
    bench_smoothness,
    bench_poly_search,
    bench_family_search
);
criterion_main!(kernels);
