use qlra_core::*;

fn plan(instance: QuantumInstance, n: u64, seed: u64) -> SlitExperimentPlan {
    SlitExperimentPlan {
        instance,
        samples_per_context: n,
        seed,
    }
}

fn max_sorkin(d: &ProbabilityData) -> f64 {
    sorkin_residual(d).iter().fold(0.0_f64, |m, r| m.max(r.abs()))
}

#[test]
fn b_frequencies_near_one_third() {
    let freq = simulate(&plan(mub_instance(MubParams::equal(0.4)), 1_000_000, 5)).unwrap();
    for x in freq.frequencies.p_b {
        assert!((x - 1.0 / 3.0).abs() <= 0.005);
    }
}

#[test]
fn empirical_sorkin_residual_shrinks() {
    let instance = mub_instance(MubParams::equal(0.4));
    let mut envelopes = Vec::new();
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let worst = (0..20)
            .map(|seed| max_sorkin(&to_probability_data(&simulate(&plan(instance, n, seed)).unwrap())))
            .fold(0.0_f64, f64::max);
        assert!(worst <= 5.0 / (n as f64).sqrt(), "N = {n}: {worst}");
        envelopes.push(worst);
    }
    for w in envelopes.windows(2) {
        assert!(w[1] < w[0], "{envelopes:?}");
    }
}

#[test]
fn probability_gates_pass_on_large_samples() {
    let n = 1_000_000u64;
    let tol = 5.0 / (n as f64).sqrt();
    for seed in 0..5 {
        let d = to_probability_data(&simulate(&plan(QuantumInstance::from_seed(seed), n, seed)).unwrap());
        let (report, _) = run_qlra(&d, &QlraOptions::with_tol(tol));
        assert!(report.sorkin_ok && report.lambda_norm_ok && report.double_stochastic_ok, "{report:?}");
        assert!(report.lambda_bounded);
    }
}

#[test]
fn small_samples_trip_tight_sorkin_gate() {
    let d = to_probability_data(&simulate(&plan(QuantumInstance::from_seed(17), 100, 1)).unwrap());
    let (report, models) = run_qlra(&d, &QlraOptions::with_tol(1e-9));
    assert!(!report.sorkin_ok);
    assert!(models.is_empty());
}

#[test]
fn frequency_document_feeds_the_loader() {
    let freq = simulate(&plan(QuantumInstance::from_seed(2), 500, 9)).unwrap();
    let doc = json::to_string(&freq);
    let back = ProbabilityData::load(&doc).unwrap();
    assert_eq!(back, freq.frequencies);
    let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(value["counts"]["samples_per_context"], 500);
}
