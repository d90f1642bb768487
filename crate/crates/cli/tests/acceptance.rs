//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! The 8-qubit datasets are generated once into `CARGO_TARGET_TMPDIR` and
//! reused across criteria (and across test runs — generation is
//! deterministic). The full three-strategy sweep runs twice so the
//! determinism criterion can compare raw output bytes. A process-wide mutex
//! serializes the tests, keeping the per-criterion wall-clock budgets honest
//! on a shared machine.

use std::path::{Path, PathBuf};
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use qcl_cli::config::ExperimentConfig;
use qcl_cli::runner::{self, StrategyRuns};
use qcl_core::autodiff::{fd_grad, loss_and_grad};
use qcl_core::classifier::ClassifierParams;
use qcl_core::continual::{gem_project, run_seeds, RunConfig, StrategyConfig, StrategyKind};
use qcl_core::dataset::{gen_task, Sample, TaskDataset};
use qcl_core::entanglement::{concentratable_entanglement, reduced_purity};
use qcl_core::hamiltonian::{build_cluster, ground_state};
use qcl_core::metrics::AccuracyMatrix;
use qcl_core::rng::seeded;
use qcl_core::Statevector;

/// Master seed for the acceptance datasets.
const DATA_SEED: u64 = 7;
const N_QUBITS: usize = 8;

fn gate() -> MutexGuard<'static, ()> {
    static GATE: Mutex<()> = Mutex::new(());
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn tmp_root() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("qcl-acceptance")
}

/// Generate (or reuse) the six 8-qubit dataset files.
fn data_dir() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tmp_root().join("data");
        std::fs::create_dir_all(&dir).expect("create data dir");
        for task_id in 1..=6u8 {
            let path = runner::dataset_path(&dir, task_id);
            let reusable = path.exists()
                && TaskDataset::load(&path, task_id)
                    .map(|d| d.validate_counts().is_ok() && d.n_qubits == N_QUBITS)
                    .unwrap_or(false);
            if !reusable {
                eprintln!("[acceptance] generating task {task_id} dataset...");
                let ds = gen_task(task_id, N_QUBITS, DATA_SEED).expect("dataset generation");
                ds.validate_counts().expect("generated dataset obeys invariants");
                ds.save(&path).expect("save dataset");
            }
        }
        dir
    })
}

struct Sweep {
    runs: Vec<StrategyRuns>,
    out_first: PathBuf,
    out_second: PathBuf,
    duration: Duration,
}

fn sweep_config(out_dir: &Path) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        "sequence=234561\nstrategies=plain,ewc,gem\nseeds=1,2,3,4,5\ndata_dir={}\nout_dir={}\n",
        data_dir().display(),
        out_dir.display()
    ))
    .expect("sweep config parses")
}

/// The full criterion-7 sweep, executed twice for the determinism check.
fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let out_first = tmp_root().join("sweep_first");
        let out_second = tmp_root().join("sweep_second");
        eprintln!("[acceptance] running the 3-strategy × 5-seed sweep (twice)...");
        let started = Instant::now();
        let runs = runner::cmd_run(&sweep_config(&out_first)).expect("sweep run");
        let duration = started.elapsed();
        runner::cmd_run(&sweep_config(&out_second)).expect("repeat sweep run");
        Sweep { runs, out_first, out_second, duration }
    })
}

fn random_state(n: usize, rng: &mut rand_chacha::ChaCha12Rng) -> Statevector {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Statevector::from_amplitudes(n, amps)
}

fn report(criterion: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_gradient_exactness() {
    let _g = gate();
    let started = Instant::now();
    let mut rng = seeded(2024);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let params = ClassifierParams::random_init(4, 1, &mut rng);
        let batch: Vec<Sample> = (0..4)
            .map(|_| Sample { state: random_state(4, &mut rng), label: rng.random_range(0..2) })
            .collect();
        let (_, grad) = loss_and_grad(&params, &batch).expect("gradient");
        let fd = fd_grad(&params, &batch, 1e-5);
        for (a, b) in grad.iter().zip(&fd) {
            let rel = (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs());
            worst = worst.max(rel);
        }
    }
    let elapsed = started.elapsed();
    let pass = worst < 1e-5 && elapsed < Duration::from_secs(10);
    report(
        1,
        "gradient exactness",
        pass,
        &format!("max rel err {worst:.3e} over 50 configs in {elapsed:.2?}"),
    );
    assert!(pass, "worst {worst}, elapsed {elapsed:?}");
}

/// Candidate-enumeration oracle for the projection QP.
fn projection_oracle(g: &[f64], grads: &[Vec<f64>]) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let t = grads.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << t) {
        let active: Vec<usize> = (0..t).filter(|k| mask & (1 << k) != 0).collect();
        let candidate = if active.is_empty() {
            Some(g.to_vec())
        } else {
            let m = DMatrix::from_fn(active.len(), active.len(), |r, c| {
                dot(&grads[active[r]], &grads[active[c]])
            });
            let rhs = DVector::from_fn(active.len(), |r, _| -dot(g, &grads[active[r]]));
            m.lu().solve(&rhs).map(|mu| {
                let mut z = g.to_vec();
                for (i, &k) in active.iter().enumerate() {
                    for (zj, gj) in z.iter_mut().zip(&grads[k]) {
                        *zj += mu[i] * gj;
                    }
                }
                z
            })
        };
        let Some(z) = candidate else { continue };
        if grads.iter().any(|gk| dot(&z, gk) < -1e-9) {
            continue;
        }
        let obj: f64 = g.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, z));
        }
    }
    best.expect("some candidate is feasible").1
}

#[test]
fn criterion_2_gem_projection_optimality() {
    let _g = gate();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let p = 8;
    let mut rng = seeded(555);
    let mut worst_gap = 0.0f64;
    let mut worst_violation = 0.0f64;
    let mut feasible_seen = 0usize;
    for trial in 0..100 {
        let m = trial % 3 + 1;
        let g: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let grads: Vec<Vec<f64>> =
            (0..m).map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let projected = gem_project(&g, &grads).expect("projection");

        if grads.iter().all(|gk| dot(&g, gk) >= 0.0) {
            feasible_seen += 1;
            assert_eq!(projected, g, "feasible input must come back unchanged");
        }
        for gk in &grads {
            worst_violation = worst_violation.max(-dot(&projected, gk));
        }
        let obj = |z: &[f64]| g.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let oracle = projection_oracle(&g, &grads);
        worst_gap = worst_gap.max(obj(&projected) - obj(&oracle));
    }
    let pass = worst_gap < 1e-6 && worst_violation <= 1e-8 && feasible_seen > 0;
    report(
        2,
        "GEM projection optimality",
        pass,
        &format!(
            "objective gap ≤ {worst_gap:.3e}, constraint violation ≤ {worst_violation:.3e}, \
             {feasible_seen} feasible short-circuits"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_ce_closed_forms() {
    let _g = gate();
    let ce_oracle = |psi: &Statevector| -> f64 {
        let n = psi.n_qubits();
        let sum: f64 = (0..(1u32 << n)).map(|mask| reduced_purity(psi, mask)).sum();
        1.0 - sum / (1u64 << n) as f64
    };

    let mut product = Statevector::zero_state(8);
    for q in 1..=8 {
        product.apply_rx(q, 0.17 * q as f64);
    }
    let bell = {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Statevector::from_amplitudes(2, vec![a, Complex64::ZERO, Complex64::ZERO, a])
    };
    let ghz8 = {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![Complex64::ZERO; 256];
        amps[0] = a;
        amps[255] = a;
        Statevector::from_amplitudes(8, amps)
    };

    let cases: [(&str, &Statevector, f64); 4] = [
        ("|0…0⟩", &Statevector::zero_state(8), 0.0),
        ("rotated product", &product, 0.0),
        ("Bell", &bell, 0.25),
        ("GHZ_8", &ghz8, 127.0 / 256.0),
    ];
    let mut worst = 0.0f64;
    for (name, state, expected) in cases {
        let fast = concentratable_entanglement(state);
        let oracle = ce_oracle(state);
        let err = (fast - expected).abs().max((oracle - expected).abs());
        worst = worst.max(err);
        assert!(err < 1e-10, "{name}: CE {fast}, oracle {oracle}, expected {expected}");
    }
    report(3, "CE closed forms", worst < 1e-10, &format!("max deviation {worst:.3e}"));
}

#[test]
fn criterion_4_hamiltonian_anchors() {
    let _g = gate();
    let h = build_cluster(8, 0.0);
    let psi = ground_state(&h).expect("ground state");
    let e0 = h.expectation(&psi);
    let energy_ok = (e0 + 8.0).abs() < 1e-9;

    let mut worst_drift = 0.0f64;
    for task_id in [4u8, 5, 6] {
        let path = runner::dataset_path(data_dir(), task_id);
        let ds = TaskDataset::load(&path, task_id).expect("fixture dataset");
        for s in ds.train.iter().chain(&ds.test) {
            worst_drift = worst_drift.max((s.state.norm_sqr().sqrt() - 1.0).abs());
        }
    }
    let drift_ok = worst_drift < 1e-10;
    let pass = energy_ok && drift_ok;
    report(
        4,
        "Hamiltonian anchors",
        pass,
        &format!("cluster h=0 energy {e0:.12}, max evolve norm drift {worst_drift:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_5_metric_arithmetic() {
    let _g = gate();
    let mut m = AccuracyMatrix::new();
    m.push_row(vec![0.8]);
    m.push_row(vec![0.9, 0.7]);
    let acc_ok = (m.acc() - 0.8).abs() < 1e-15;
    let bwt_ok = (m.bwt().unwrap() - 0.1).abs() < 1e-15;

    let mut ones = AccuracyMatrix::new();
    for i in 0..6 {
        ones.push_row(vec![1.0; i + 1]);
    }
    let ones_ok = ones.acc() == 1.0 && ones.bwt() == Some(0.0);

    let pass = acc_ok && bwt_ok && ones_ok;
    report(
        5,
        "metric arithmetic",
        pass,
        &format!("ACC {:.4}, BWT {:+.4}", m.acc(), m.bwt().unwrap()),
    );
    assert!(pass);
}

#[test]
fn criterion_6_single_task_learnability() {
    let _g = gate();
    let path = runner::dataset_path(data_dir(), 4);
    let task = TaskDataset::load(&path, 4).expect("task 4 dataset");
    let ordered = [&task];

    let started = Instant::now();
    let strategy = StrategyConfig::new(StrategyKind::Plain, 0.0);
    let (results, best) =
        run_seeds(&ordered, &strategy, &RunConfig::default(), &[1, 2, 3, 4, 5]).expect("runs");
    let elapsed = started.elapsed();

    let best_acc = results[best].matrix.acc();
    let pass = best_acc >= 0.85 && elapsed < Duration::from_secs(120);
    report(
        6,
        "single-task learnability",
        pass,
        &format!("task 4 best-of-5 accuracy {best_acc:.4} in {elapsed:.2?}"),
    );
    assert!(pass, "best {best_acc}, elapsed {elapsed:?}");
}

#[test]
fn criterion_7_end_to_end_ordering() {
    let _g = gate();
    let sweep = sweep();
    let metrics = |kind: StrategyKind| -> (f64, f64) {
        let runs = sweep.runs.iter().find(|r| r.kind == kind).expect("strategy present");
        let best = runs.best_result();
        (best.matrix.acc(), best.matrix.bwt().expect("six tasks"))
    };
    let (plain_acc, plain_bwt) = metrics(StrategyKind::Plain);
    let (ewc_acc, ewc_bwt) = metrics(StrategyKind::Ewc);
    let (gem_acc, gem_bwt) = metrics(StrategyKind::Gem);

    let budget_ok = sweep.duration <= Duration::from_secs(45 * 60);
    let pass = gem_acc >= 0.85
        && gem_bwt > 0.0
        && gem_acc >= ewc_acc
        && ewc_acc >= plain_acc
        && ewc_bwt > plain_bwt
        && budget_ok;
    report(
        7,
        "end-to-end ordering",
        pass,
        &format!(
            "sequence 234561 best-of-5: plain ACC {plain_acc:.4} BWT {plain_bwt:+.4} | \
             ewc ACC {ewc_acc:.4} BWT {ewc_bwt:+.4} | gem ACC {gem_acc:.4} BWT {gem_bwt:+.4} \
             | sweep took {:.1?}",
            sweep.duration
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_determinism() {
    let _g = gate();
    let sweep = sweep();
    let mut pass = true;
    for file in ["curves.csv", "summary.csv"] {
        let a = std::fs::read(sweep.out_first.join(file)).expect("first run output");
        let b = std::fs::read(sweep.out_second.join(file)).expect("second run output");
        pass &= a == b;
    }
    report(8, "determinism", pass, "repeated sweep produced byte-identical CSV outputs");
    assert!(pass);
}
