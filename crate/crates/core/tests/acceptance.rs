//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, LN_10, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use common::{basis_state, circuit_unitary, matvec, random_circuit};
use qmllab::data::{prepare_digits, split, two_blob_toy, Sample};
use qmllab::gradients::{
    central_difference, dense_backward, dense_forward, Activation, DenseLayer, GradTape,
    GradientComparison,
};
use qmllab::models::{build_model, ff_loss, Model, ModelKind, ModelSpec};
use qmllab::search::{
    evolve, evolve_with, mutate, parse_generator_response, response_document, AgentTopology,
    Archive, Candidate, GuardedGenerator, RemoteGenerator, SearchConfig, Transport,
};
use qmllab::sim::{run, Angle, Gate, Observable, Statevector};
use qmllab::training::{evaluate, softmax_cross_entropy, train, TrainConfig};
use qmllab::{Circuit, Error};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-10;
const ORACLE_CIRCUITS: usize = 50;
const SHIFT_TOL: f64 = 1e-4;
const FD_EPS: f64 = 1e-5;
const BACKPROP_REL_TOL: f64 = 1e-5;
const BACKPROP_ABS_TOL: f64 = 1e-7;
const BACKPROP_REL_FLOOR: f64 = 1e-6;
const COS_TOL: f64 = 1e-10;
const BELL_TOL: f64 = 1e-12;
const LOSS_TOL: f64 = 1e-9;
const TOY_TARGET: f64 = 0.95;
const TOY_EPOCHS: usize = 200;
const TOY_SAMPLES: usize = 40;
const CHANCE: f64 = 0.10;
const SEARCH_MAX_CANDIDATES: usize = 18;
const ROUND_TRIP_SPECS: usize = 100;
const MALFORMED_DOCS: usize = 20;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_CIRCUITS {
        let (circuit, params) = random_circuit(&mut rng, 3, 16);
        let n = circuit.num_qubits();
        let start = rng.gen_range(0..1usize << n);
        let input = Statevector::from_amplitudes(n, basis_state(n, start)).map_err(|e| e.to_string())?;
        let got = run(&circuit, &params, &input).map_err(|e| e.to_string())?;
        let want = matvec(&circuit_unitary(n, circuit.gates(), &params), &basis_state(n, start));
        for (a, b) in got.amplitudes().iter().zip(&want) {
            worst = worst.max((a - b).norm());
        }
    }
    check(
        worst < ORACLE_TOL,
        format!("{ORACLE_CIRCUITS} circuits, max amplitude error {worst:.2e} (tol {ORACLE_TOL:.0e})"),
    )
}

fn parameter_shift() -> Outcome {
    let mut worst = 0.0f64;
    let mut layers = 0;
    for kind in ModelKind::ALL {
        for seed in 1..=3u64 {
            let model = build_model(&ModelSpec::default_for(kind).with_seed(seed)).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(50 + seed);
            for layer in model.quantum_layers() {
                layers += 1;
                let angles: Vec<f64> = (0..layer.input_len()).map(|_| rng.gen_range(0.0..PI)).collect();
                let up: Vec<f64> = (0..layer.output_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let weighted = |out: Vec<f64>| -> f64 { out.iter().zip(&up).map(|(a, b)| a * b).sum() };
                let g = layer.backward(&angles, &up, true).map_err(|e| e.to_string())?;
                let fd_theta = central_difference(
                    |t: &[f64]| {
                        let mut l = layer.clone();
                        l.set_theta(t)?;
                        l.forward(&angles).map(weighted)
                    },
                    layer.theta(),
                    FD_EPS,
                )
                .map_err(|e| e.to_string())?;
                let fd_input = central_difference(
                    |a: &[f64]| layer.forward(a).map(weighted),
                    &angles,
                    FD_EPS,
                )
                .map_err(|e| e.to_string())?;
                let input = g.input.ok_or("no input gradient returned")?;
                worst = worst
                    .max(GradientComparison::new(&g.theta, &fd_theta).max_abs)
                    .max(GradientComparison::new(&input, &fd_input).max_abs);
            }
        }
    }
    check(
        worst < SHIFT_TOL,
        format!("{layers} quantum layers over 3 seeds, max |shift - fd| {worst:.2e} (tol {SHIFT_TOL:.0e})"),
    )
}

fn backprop() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let acts = [Activation::Tanh, Activation::ReLU, Activation::Identity];
    let mut failures = 0;
    let mut compared = 0;
    for _ in 0..30 {
        let depth = rng.gen_range(1..=3);
        let mut dims = vec![rng.gen_range(1..=6)];
        for _ in 0..depth {
            dims.push(rng.gen_range(1..=6));
        }
        let layers: Vec<DenseLayer<f64>> = dims
            .windows(2)
            .map(|w| {
                let mut l = DenseLayer::init(w[1], w[0], acts[rng.gen_range(0..3)], &mut rng);
                let p: Vec<f64> = (0..l.num_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                l.load_params(&p).unwrap();
                l
            })
            .collect();
        let x: Vec<f64> = (0..dims[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let coef: Vec<f64> = (0..dims[depth]).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let mut tape = GradTape::new();
        let mut h = x.clone();
        for l in &layers {
            h = dense_forward(l, &h, &mut tape).map_err(|e| e.to_string())?;
        }
        let mut upstream = coef.clone();
        let mut per_layer = Vec::new();
        for l in layers.iter().rev() {
            let g = dense_backward(l, &upstream, &mut tape).map_err(|e| e.to_string())?;
            upstream = g.input_grad;
            per_layer.push(g.weight_grad.into_iter().chain(g.bias_grad).collect::<Vec<_>>());
        }
        per_layer.reverse();
        let analytic = per_layer.concat();

        let params: Vec<f64> = layers.iter().flat_map(|l| l.params()).collect();
        let numeric = central_difference(
            |p: &[f64]| {
                let mut stack = layers.clone();
                let mut rest = p;
                for l in &mut stack {
                    rest = l.load_params(rest)?;
                }
                let mut h = x.clone();
                for l in &stack {
                    h = l.forward(&h)?;
                }
                Ok(h.iter().zip(&coef).map(|(a, b)| a * b).sum())
            },
            &params,
            FD_EPS,
        )
        .map_err(|e| e.to_string())?;
        for (a, n) in analytic.iter().zip(&numeric) {
            compared += 1;
            let err = (a - n).abs();
            let ok = if a.abs() > BACKPROP_REL_FLOOR {
                err / a.abs() < BACKPROP_REL_TOL || err < BACKPROP_ABS_TOL
            } else {
                err < BACKPROP_ABS_TOL
            };
            if !ok {
                failures += 1;
            }
        }
    }
    check(
        failures == 0,
        format!("{compared} components on 30 networks, {failures} outside {BACKPROP_REL_TOL:.0e} rel / {BACKPROP_ABS_TOL:.0e} abs"),
    )
}

fn analytic_identities() -> Outcome {
    let mut ry = Circuit::new(1, 1).map_err(|e| e.to_string())?;
    ry.push(Gate::ry(0, Angle::Ref(0))).map_err(|e| e.to_string())?;
    let mut cos_err = 0.0f64;
    for theta in [-2.5, -0.7, 0.0, 1.1, 3.0] {
        let s = run(&ry, &[theta], &Statevector::new(1).unwrap()).map_err(|e| e.to_string())?;
        let z = s.expectation(&Observable::z(0)).map_err(|e| e.to_string())?;
        cos_err = cos_err.max((z - f64::cos(theta)).abs());
    }

    let mut bell = Circuit::new(2, 0).map_err(|e| e.to_string())?;
    bell.push(Gate::h(0)).map_err(|e| e.to_string())?;
    bell.push(Gate::cnot(0, 1)).map_err(|e| e.to_string())?;
    let s = run(&bell, &[], &Statevector::new(2).unwrap()).map_err(|e| e.to_string())?;
    let want = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
    let bell_err = s
        .amplitudes()
        .iter()
        .zip(want)
        .map(|(a, w)| (a - w).norm())
        .fold(0.0, f64::max);

    let (ce, _) = softmax_cross_entropy(&[0.3; 10], 4).map_err(|e| e.to_string())?;
    let ce_err = (ce - LN_10).abs();
    let ff_err = (ff_loss(1.7, 1.7, 1.7) - 2.0 * LN_2).abs();

    check(
        cos_err < COS_TOL && bell_err < BELL_TOL && ce_err < LOSS_TOL && ff_err < LOSS_TOL,
        format!("cos {cos_err:.1e}, bell {bell_err:.1e}, ln10 {ce_err:.1e}, 2ln2 {ff_err:.1e}"),
    )
}

/// Epochs until train accuracy reaches the target, if it does.
fn ff_epochs_to_target(kind: ModelKind, seed: u64, toy: &[Sample]) -> qmllab::Result<Option<usize>> {
    let mut model = build_model(&ModelSpec::default_for(kind).with_seed(seed))?;
    let config = TrainConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..toy.len()).collect();
    for epoch in 1..=TOY_EPOCHS {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &toy[i]).collect();
            let net = model.as_ff_mut().expect("forward-forward kind");
            net.train_batch(&batch, config.learning_rate, &mut rng)?;
        }
        if evaluate(&model, toy)? >= TOY_TARGET {
            return Ok(Some(epoch));
        }
    }
    Ok(None)
}

fn ff_toy() -> Outcome {
    let toy = two_blob_toy(TOY_SAMPLES, 1);
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [ModelKind::ClassicalFf, ModelKind::Qff] {
        for seed in 1..=3 {
            match ff_epochs_to_target(kind, seed, &toy).map_err(|e| e.to_string())? {
                Some(e) => parts.push(format!("{kind} s{seed}: {e} ep")),
                None => {
                    ok = false;
                    parts.push(format!("{kind} s{seed}: not reached"));
                }
            }
        }
    }
    check(ok, format!("target {:.0}% train: {}", TOY_TARGET * 100.0, parts.join(", ")))
}

fn digits_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/digits.csv")
}

fn digits_band() -> Outcome {
    let samples = prepare_digits(digits_path()).map_err(|e| e.to_string())?;
    let data = split(&samples, 0.75, 1).map_err(|e| e.to_string())?;
    let config = TrainConfig::default();
    let rows = [
        (ModelKind::BaselineQnn, "Baseline QNN", 15.55, true),
        (ModelKind::Qmlp, "QMLP", 9.40, false),
        (ModelKind::Qff, "QFF", 15.17, true),
        (ModelKind::Qbp, "QBP", 12.37, false),
    ];
    let mut table = String::from("    | Model | Average Accuracy (%) |\n    |---|---|\n");
    let mut ok = true;
    let mut banded = Vec::new();
    for (kind, label, _, asserted) in rows {
        let mut model: Model = build_model(&ModelSpec::default_for(kind)).map_err(|e| e.to_string())?;
        let report = train(&mut model, &data, &config).map_err(|e| e.to_string())?;
        let acc = report.test_accuracy;
        table.push_str(&format!("    | {label} | {:.2} |\n", acc * 100.0));
        if asserted {
            ok &= acc > CHANCE;
            banded.push(format!("{label} {:.2}%", acc * 100.0));
        }
    }
    let footnote: Vec<String> = rows.iter().map(|r| format!("{} {:.2}", r.1, r.2)).collect();
    table.push_str(&format!("    Published reference (not asserted): {}", footnote.join(", ")));
    println!("{table}");
    check(ok, format!("{} (must exceed {:.0}%)", banded.join(", "), CHANCE * 100.0))
}

struct AlwaysFails;

impl Transport for AlwaysFails {
    fn post(&self, _: &str, _: &str) -> qmllab::Result<String> {
        Err(Error::Protocol("stub refuses".into()))
    }
}

fn stub<T: Transport>(t: T) -> RemoteGenerator<T> {
    RemoteGenerator::new(t, "http://stub", AgentTopology::default(), 5)
}

fn search_loop() -> Outcome {
    let samples = prepare_digits(digits_path()).map_err(|e| e.to_string())?;
    let data = split(&samples, 0.75, 1).map_err(|e| e.to_string())?;
    let config = SearchConfig::ci();
    let (_, first) = evolve(&config, &data).map_err(|e| e.to_string())?;
    let (_, again) = evolve(&config, &data).map_err(|e| e.to_string())?;
    let (_, fallback) = evolve_with(&config, &data, stub(AlwaysFails)).map_err(|e| e.to_string())?;
    let best = &first.best_per_generation;
    let monotone = best.windows(2).all(|w| w[1] >= w[0]);
    let identical = first.to_jsonl() == again.to_jsonl();
    let fell_back = fallback.generator_health.fell_back && fallback.len() == first.len();
    let trajectory: Vec<String> = best.iter().map(|f| format!("{:.3}", f)).collect();
    check(
        first.len() <= SEARCH_MAX_CANDIDATES && monotone && identical && fell_back,
        format!(
            "{} candidates (max {SEARCH_MAX_CANDIDATES}), best [{}], rerun identical: {identical}, stub fallback: {fell_back}",
            first.len(),
            trajectory.join(", ")
        ),
    )
}

struct Reply(String);

impl Transport for Reply {
    fn post(&self, _: &str, _: &str) -> qmllab::Result<String> {
        Ok(self.0.clone())
    }
}

fn malformed_documents() -> Vec<String> {
    let valid: serde_json::Value =
        serde_json::from_str(&response_document(&ModelSpec::default_for(ModelKind::Qmlp))).unwrap();
    let with = |f: &dyn Fn(&mut serde_json::Value)| {
        let mut v = valid.clone();
        f(&mut v);
        v.to_string()
    };
    let spec_field = |key: &'static str, value: serde_json::Value| {
        with(&move |v| v["spec"][key] = value.clone())
    };
    let full = valid.to_string();
    vec![
        String::new(),
        "not json".into(),
        "[]".into(),
        "null".into(),
        "{}".into(),
        r#"{"spec": null}"#.into(),
        r#"{"spec": 3}"#.into(),
        full[..full.len() / 2].to_string(),
        with(&|v| v["extra"] = serde_json::json!(1)),
        spec_field("unknown_field", serde_json::json!(true)),
        spec_field("kind", serde_json::json!("Transformer")),
        spec_field("num_qubits", serde_json::json!(1)),
        spec_field("num_qubits", serde_json::json!(14)),
        spec_field("num_qubits", serde_json::json!(-3)),
        spec_field("ansatz_depth", serde_json::json!(0)),
        spec_field("readout_classes", serde_json::json!(7)),
        spec_field("classical_widths", serde_json::json!([0])),
        spec_field("classical_widths", serde_json::json!([4097])),
        spec_field("seed", serde_json::json!("one")),
        with(&|v| {
            v["spec"].as_object_mut().unwrap().remove("kind");
        }),
    ]
}

fn protocol() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut round_trips = 0;
    for i in 0..ROUND_TRIP_SPECS {
        let base = ModelSpec::default_for(ModelKind::ALL[i % ModelKind::ALL.len()]).with_seed(rng.gen());
        let spec = (0..rng.gen_range(0..5)).fold(base, |s, _| mutate(&s, &mut rng));
        if parse_generator_response(&response_document(&spec)).ok() == Some(spec) {
            round_trips += 1;
        }
    }

    let docs = malformed_documents();
    let mut archive = Archive::new();
    archive
        .insert(Candidate {
            id: 0,
            generation: 0,
            parent_id: None,
            spec: ModelSpec::default_for(ModelKind::Qff),
            train_config: TrainConfig::default(),
            fitness: Some(0.5),
            note: None,
        })
        .map_err(|e| e.to_string())?;
    let parent = ModelSpec::default_for(ModelKind::Qff);
    let (mut rejected, mut counted) = (0, 0);
    for doc in &docs {
        if matches!(parse_generator_response(doc), Err(Error::Protocol(_))) {
            rejected += 1;
        }
        let mut guard = GuardedGenerator::new(stub(Reply(doc.clone())));
        let child = guard.propose(&parent, &archive, &mut ChaCha8Rng::seed_from_u64(2));
        if child.validate().is_ok() && guard.health().consecutive_failures == 1 {
            counted += 1;
        }
    }
    check(
        round_trips == ROUND_TRIP_SPECS && docs.len() == MALFORMED_DOCS && rejected == MALFORMED_DOCS && counted == MALFORMED_DOCS,
        format!(
            "{round_trips}/{ROUND_TRIP_SPECS} specs round-trip, {rejected}/{} malformed rejected, {counted} counted as failures",
            docs.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("parameter-shift correctness", parameter_shift),
        ("classical backprop correctness", backprop),
        ("analytic identities", analytic_identities),
        ("forward-forward toy learning", ff_toy),
        ("digits end-to-end band", digits_band),
        ("search loop", search_loop),
        ("protocol round-trip", protocol),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, criterion) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
