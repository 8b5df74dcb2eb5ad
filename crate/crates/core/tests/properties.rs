use entwit::random::{random_density, random_hermitian, random_product_state, random_unitary};
use entwit::thermo::relative_entropy_to_thermal;
use entwit::witness::{build_css, build_w_state, sweep_detection, witness_evaluate, Axis, SweepGrid, SweepReference};
use entwit::work::{jarzynski_average, relative_entropy_via_work, tasaki_average, work_distribution};
use entwit::{relative_entropy, DensityMatrix, QubitRegister, Route, ThermalSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reg(n: usize) -> QubitRegister {
    QubitRegister::new(n).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jarzynski_is_protocol_independent(seed in any::<u64>(), n in 1usize..=3, beta in 0.1f64..5.0) {
        let mut r = rng(seed);
        let q = reg(n);
        let (hi, hf) = (random_hermitian(&mut r, q), random_hermitian(&mut r, q));
        let zi = ThermalSpec::new(hi.clone(), beta).unwrap();
        let zf = ThermalSpec::new(hf.clone(), beta).unwrap();
        let exact = (zf.ln_partition_function() - zi.ln_partition_function()).exp();
        for _ in 0..3 {
            let u = random_unitary(&mut r, q);
            let avg = jarzynski_average(beta, &hi, &hf, &u).unwrap();
            prop_assert!(((avg - exact) / exact).abs() < 1e-10);
        }
    }

    #[test]
    fn tasaki_cross_temperature(seed in any::<u64>(), bi in 0.1f64..4.0, bf in 0.1f64..4.0) {
        let mut r = rng(seed);
        let q = reg(2);
        let (hi, hf) = (random_hermitian(&mut r, q), random_hermitian(&mut r, q));
        let u = random_unitary(&mut r, q);
        let zi = ThermalSpec::new(hi.clone(), bi).unwrap();
        let zf = ThermalSpec::new(hf.clone(), bf).unwrap();
        let exact = (zf.ln_partition_function() - zi.ln_partition_function()).exp();
        let avg = tasaki_average(bi, bf, &hi, &hf, &u).unwrap();
        prop_assert!(((avg - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn mean_work_exceeds_free_energy_change(seed in any::<u64>(), beta in 0.1f64..5.0) {
        let mut r = rng(seed);
        let q = reg(2);
        let i = ThermalSpec::new(random_hermitian(&mut r, q), beta).unwrap();
        let f = ThermalSpec::new(random_hermitian(&mut r, q), beta).unwrap();
        let dist = work_distribution(&i, &f, &random_unitary(&mut r, q)).unwrap();
        prop_assert!((dist.total_probability() - 1.0).abs() < 1e-12);
        let delta_f = f.free_energy() - i.free_energy();
        prop_assert!(dist.mean_work() >= delta_f - 1e-10);
    }

    #[test]
    fn work_route_matches_spectra_for_any_unitary(seed in any::<u64>(), bi in 0.2f64..3.0, bf in 0.2f64..3.0) {
        let mut r = rng(seed);
        let q = reg(2);
        let i = ThermalSpec::new(random_hermitian(&mut r, q), bi).unwrap();
        let f = ThermalSpec::new(random_hermitian(&mut r, q), bf).unwrap();
        let direct = relative_entropy_to_thermal(f.state(), &i).unwrap();
        let via = relative_entropy_via_work(&i, &f, &random_unitary(&mut r, q)).unwrap();
        prop_assert!((direct - via).abs() < 1e-9, "{} vs {}", direct, via);
    }

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), rank in 1usize..=4) {
        let mut r = rng(seed);
        let q = reg(2);
        let rho = random_density(&mut r, q, rank);
        let sigma = random_density(&mut r, q, 4);
        let s = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(s >= -1e-12);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);
    }

    #[test]
    fn product_states_never_detect(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = reg(3);
        let rho = build_w_state(3).unwrap().into();
        let css = build_css(3).unwrap().into();
        let pure = DensityMatrix::pure(q, &random_product_state(&mut r, q)).unwrap();
        prop_assert!(!witness_evaluate(&rho, &css, &pure.into(), Route::Direct).unwrap().detected);

        let single = reg(1);
        let mixed = random_density(&mut r, single, 2)
            .tensor(&random_density(&mut r, single, 2)).unwrap()
            .tensor(&random_density(&mut r, single, 2)).unwrap();
        let report = witness_evaluate(&rho, &css, &mixed.into(), Route::Direct).unwrap();
        prop_assert!(!report.detected);
        prop_assert!(report.s_right >= (9.0f64 / 4.0).ln() - 1e-9);
    }
}

#[test]
fn support_violation_is_infinite() {
    let q = reg(2);
    let mut r = rng(7);
    let rho = DensityMatrix::pure(q, &random_product_state(&mut r, q)).unwrap();
    let sigma = DensityMatrix::pure(q, &random_product_state(&mut r, q)).unwrap();
    assert!(relative_entropy(&rho, &sigma).unwrap().is_infinite());
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let grid = SweepGrid {
        b: Axis::new(0.0, 1.0, 0.25).unwrap(),
        jz: Axis::new(0.0, 1.0, 0.5).unwrap(),
        t: Axis::new(0.01, 0.5, 0.07).unwrap(),
        ..SweepGrid::default_for(3)
    };
    let reference = SweepReference {
        rho: build_w_state(3).unwrap().into(),
        sigma_ref: build_css(3).unwrap().into(),
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let result = pool.install(|| sweep_detection(&grid, &reference, &Default::default()).unwrap());
        let mut csv = Vec::new();
        result.write_csv(&mut csv).unwrap();
        csv
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert!(String::from_utf8(one).unwrap().lines().count() > 1);
}

#[test]
fn sampler_z_scores_cover_the_exact_value() {
    use entwit::witness::css_thermal_params_3;
    use entwit::work::{exact_evolution, sample_tpm};
    use entwit::{DrivingSchedule, XXZParams};

    let s = DrivingSchedule::linear(
        css_thermal_params_3(100.0, 1.0).unwrap(),
        XXZParams::periodic(3, 1.0, 0.0, 0.5).unwrap(),
    )
    .unwrap();
    let i = ThermalSpec::new(s.initial_hamiltonian().unwrap(), 100.0).unwrap();
    let f = ThermalSpec::new(s.final_hamiltonian().unwrap(), 100.0).unwrap();
    let u = exact_evolution(&s).unwrap();
    let inside = (0..100u64)
        .filter(|&seed| sample_tpm(&i, &f, &u, 1000, seed).unwrap().summary.z_score.unwrap().abs() <= 3.0)
        .count();
    assert!(inside >= 99, "{inside} of 100 seeds within 3 standard errors");
}
