use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use entwit::witness::{build_css, build_w_state, sweep_detection, Axis, SweepGrid, SweepReference};
use entwit::work::{exact_evolution, sample_tpm, transition_matrix, trotter_evolution};
use entwit::{build_xxz, spectral_decompose, XXZParams};
use entwit_bench::{endpoints, seven_site_noncommuting, seven_site_protocol, three_site_protocol};

fn spectra(c: &mut Criterion) {
    let h = build_xxz(&XXZParams::periodic(7, 1.0, 0.4, 0.9).unwrap()).unwrap();
    c.bench_function("spectral_decompose n=7", |b| b.iter(|| spectral_decompose(black_box(&h)).unwrap()));
}

fn evolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("evolution");
    g.sample_size(10);
    let s = seven_site_noncommuting();
    g.bench_function("trotter n=7 M=1000", |b| b.iter(|| trotter_evolution(black_box(&s)).unwrap()));
    let s100 = s.with_steps(100).unwrap();
    g.bench_function("trotter n=7 M=100", |b| b.iter(|| trotter_evolution(black_box(&s100)).unwrap()));
    let s7 = seven_site_protocol();
    g.bench_function("exact n=7", |b| b.iter(|| exact_evolution(black_box(&s7)).unwrap()));
    g.finish();
}

fn transitions(c: &mut Criterion) {
    let s = seven_site_protocol();
    let u = exact_evolution(&s).unwrap();
    let (h_i, h_f) = (s.initial_hamiltonian().unwrap(), s.final_hamiltonian().unwrap());
    c.bench_function("transition_matrix n=7", |b| {
        b.iter(|| transition_matrix(black_box(&h_i), black_box(&h_f), black_box(&u)).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for n in [3, 7] {
        let reference = SweepReference {
            rho: build_w_state(n).unwrap().into(),
            sigma_ref: build_css(n).unwrap().into(),
        };
        let column = SweepGrid {
            b: Axis::new(0.5, 0.5, 1.0).unwrap(),
            jz: Axis::new(0.0, 0.0, 1.0).unwrap(),
            ..SweepGrid::default_for(n)
        };
        g.bench_function(format!("one (B, Jz) column n={n}"), |b| {
            b.iter(|| sweep_detection(black_box(&column), &reference, &Default::default()).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let s = three_site_protocol();
    let (i, f) = endpoints(&s);
    let u = exact_evolution(&s).unwrap();
    c.bench_function("sample_tpm n=3 count=1e4", |b| {
        b.iter(|| sample_tpm(&i, &f, &u, black_box(10_000), 1).unwrap())
    });
}

criterion_group!(benches, spectra, evolution, transitions, sweeps, sampling);
criterion_main!(benches);
