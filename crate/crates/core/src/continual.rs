//! Sequential training with three strategies: plain gradient descent, elastic
//! weight consolidation (a Fisher-weighted quadratic pull toward earlier
//! optima), and gradient episodic memory (projection of the batch gradient
//! onto the cone where no stored task's memory loss increases to first
//! order).

use rand_chacha::ChaCha12Rng;

use crate::autodiff::{loss_and_grad, AdamState};
use crate::classifier::{self, ClassifierParams};
use crate::dataset::{Sample, TaskDataset};
use crate::error::{Error, Result};
use crate::metrics::{test_accuracy, AccuracyMatrix};
use crate::rng::{sample_indices, seeded, shuffled_indices};

/// Which update rule a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Plain,
    Ewc,
    Gem,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Plain => "plain",
            StrategyKind::Ewc => "ewc",
            StrategyKind::Gem => "gem",
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(StrategyKind::Plain),
            "ewc" => Ok(StrategyKind::Ewc),
            "gem" => Ok(StrategyKind::Gem),
            other => Err(format!("unknown strategy '{other}'")),
        }
    }
}

/// Strategy settings. `lambda` only matters for EWC; the sample budgets
/// default to the 50-sample memories and Fisher estimates used throughout.
#[derive(Clone, Copy, Debug)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub lambda: f64,
    pub memory_size: usize,
    pub fisher_samples: usize,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, lambda: f64) -> Self {
        Self { kind, lambda, memory_size: 50, fisher_samples: 50 }
    }
}

/// Stored subset of a finished task's training samples (GEM).
#[derive(Clone, Debug)]
pub struct EpisodicMemory {
    pub task_id: u8,
    pub samples: Vec<Sample>,
}

/// Parameters and Fisher-diagonal importance recorded at the end of a task (EWC).
#[derive(Clone, Debug)]
pub struct FisherAnchor {
    pub task_id: u8,
    pub optimal_params: Vec<f64>,
    pub fisher_diag: Vec<f64>,
}

/// Everything that persists across tasks in one continual run: the
/// classifier, one Adam state (moments carry over task boundaries, as with a
/// single long-lived optimizer), and the per-strategy artifacts.
#[derive(Clone, Debug)]
pub struct TrainerState {
    pub params: ClassifierParams,
    pub adam: AdamState,
    pub anchors: Vec<FisherAnchor>,
    pub memories: Vec<EpisodicMemory>,
}

impl TrainerState {
    /// Fresh random initialization (drawn from `rng`) with empty artifacts.
    pub fn init(n_qubits: usize, n_layers: usize, lr: f64, rng: &mut ChaCha12Rng) -> Self {
        let params = ClassifierParams::random_init(n_qubits, n_layers, rng);
        let adam = AdamState::new(params.param_count(), lr);
        Self { params, adam, anchors: Vec::new(), memories: Vec::new() }
    }
}

/// Mean cross-entropy over an episodic memory.
pub fn memory_loss(params: &ClassifierParams, memory: &EpisodicMemory) -> f64 {
    assert!(!memory.samples.is_empty(), "loss over an empty episodic memory");
    classifier::loss(params, &memory.samples)
}

/// Empirical Fisher diagonal: mean squared per-sample gradient of the true
/// label's log-likelihood.
pub fn estimate_fisher_diag(params: &ClassifierParams, samples: &[Sample]) -> Result<Vec<f64>> {
    assert!(!samples.is_empty(), "Fisher estimate over no samples");
    let mut fisher = vec![0.0; params.param_count()];
    for s in samples {
        let (_, g) = loss_and_grad(params, std::slice::from_ref(s))?;
        for (f, gj) in fisher.iter_mut().zip(g) {
            *f += gj * gj;
        }
    }
    let scale = 1.0 / samples.len() as f64;
    for f in fisher.iter_mut() {
        *f *= scale;
    }
    Ok(fisher)
}

/// Gradient of the EWC-regularized loss: the task gradient plus
/// 2λ Σ_k F_k ⊙ (θ − θ*_k).
pub fn ewc_regularized_grad(
    params_flat: &[f64],
    task_grad: &[f64],
    anchors: &[FisherAnchor],
    lambda: f64,
) -> Vec<f64> {
    let mut out = task_grad.to_vec();
    for anchor in anchors {
        assert_eq!(anchor.optimal_params.len(), params_flat.len());
        for j in 0..out.len() {
            out[j] += 2.0
                * lambda
                * anchor.fisher_diag[j]
                * (params_flat[j] - anchor.optimal_params[j]);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize ½vᵀMv + bᵀv over v ≥ 0 by cyclic coordinate descent:
/// v_k ← max(0, v_k − ((Mv)_k + b_k)/M_kk), skipping near-zero diagonals,
/// until the largest coordinate change in a sweep falls below 1e-10.
///
/// The returned point is verified against the KKT conditions
/// (∇ = Mv + b ≥ −1e-8 where v = 0, |∇| ≤ 1e-8 where v > 0).
pub fn solve_nnqp(m: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let dim = b.len();
    assert_eq!(m.len(), dim, "matrix/vector size mismatch");
    for row in m {
        assert_eq!(row.len(), dim, "matrix must be square");
    }
    const MAX_SWEEPS: usize = 10_000;
    const DIAG_FLOOR: f64 = 1e-12;
    const STEP_TOL: f64 = 1e-10;
    const KKT_TOL: f64 = 1e-8;

    let mut v = vec![0.0; dim];
    let mut converged = false;
    let mut last_delta = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for k in 0..dim {
            if m[k][k] < DIAG_FLOOR {
                continue;
            }
            let grad_k = dot(&m[k], &v) + b[k];
            let next = (v[k] - grad_k / m[k][k]).max(0.0);
            max_delta = max_delta.max((next - v[k]).abs());
            v[k] = next;
        }
        last_delta = max_delta;
        if max_delta < STEP_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::QpConvergence { sweeps: MAX_SWEEPS, residual: last_delta });
    }

    // KKT residuals over the optimized coordinates. Skipped coordinates
    // (near-zero diagonal, meaning a near-zero gradient vector) carry no
    // enforceable stationarity condition.
    if cfg!(debug_assertions) {
        for k in 0..dim {
            if m[k][k] < DIAG_FLOOR {
                continue;
            }
            let grad_k = dot(&m[k], &v) + b[k];
            let violation = if v[k] > 0.0 { grad_k.abs() } else { (-grad_k).max(0.0) };
            debug_assert!(
                violation <= KKT_TOL,
                "KKT residual {violation:.3e} at coordinate {k} exceeds {KKT_TOL:.0e}"
            );
        }
    }
    Ok(v)
}

/// Project the task gradient so that its inner product with every stored
/// memory gradient is non-negative.
///
/// Feasible inputs come back unchanged (bitwise). Otherwise the projection
/// min ½‖g − z‖² s.t. ⟨z, g_k⟩ ≥ 0 is solved through its non-negative dual
/// over the Gram matrix of the memory gradients, and g̃ = g + Σ_k v*_k g_k.
///
/// Each constraint is scale-invariant (⟨z, g_k⟩ ≥ 0 defines the same
/// half-space as its unit-normalized form), so the dual is assembled from
/// unit directions. That keeps the Gram matrix well-conditioned when memory
/// losses have saturated and their gradients span many orders of magnitude;
/// memories with vanishing gradients (squared norm below 1e-12) constrain
/// nothing and are left out.
pub fn gem_project(g: &[f64], memory_grads: &[Vec<f64>]) -> Result<Vec<f64>> {
    let dots: Vec<f64> = memory_grads.iter().map(|gk| dot(g, gk)).collect();
    if dots.iter().all(|&d| d >= 0.0) {
        return Ok(g.to_vec());
    }
    let directions: Vec<Vec<f64>> = memory_grads
        .iter()
        .filter(|gk| dot(gk, gk) >= 1e-12)
        .map(|gk| {
            let norm = dot(gk, gk).sqrt();
            gk.iter().map(|x| x / norm).collect()
        })
        .collect();
    let t = directions.len();
    let gram: Vec<Vec<f64>> =
        (0..t).map(|k| (0..t).map(|j| dot(&directions[k], &directions[j])).collect()).collect();
    let b: Vec<f64> = directions.iter().map(|d| dot(g, d)).collect();
    let v = solve_nnqp(&gram, &b)?;
    let mut out = g.to_vec();
    for (vk, dk) in v.iter().zip(&directions) {
        for (o, x) in out.iter_mut().zip(dk) {
            *o += vk * x;
        }
    }
    debug_assert!(
        directions.iter().all(|dk| dot(&out, dk) >= -1e-8),
        "projection violates a memory constraint"
    );
    Ok(out)
}

/// Hyperparameters of the per-task loop.
#[derive(Clone, Copy, Debug)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs_per_task: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { batch_size: 10, epochs_per_task: 1 }
    }
}

/// Accuracy snapshot taken after one training iteration: (task id, test
/// accuracy) for every task whose training has begun.
pub type IterationSnapshot = Vec<(u8, f64)>;

/// Train on one task: per epoch, a seeded shuffle of the training set split
/// into full batches; per iteration, a strategy-specific update; after every
/// iteration, test accuracy on all of `eval_tasks`.
///
/// At the end of the task, EWC records a Fisher anchor and GEM stores an
/// episodic memory, both from randomly chosen training samples.
pub fn train_task(
    state: &mut TrainerState,
    task: &TaskDataset,
    eval_tasks: &[&TaskDataset],
    strategy: &StrategyConfig,
    cfg: &TrainConfig,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<IterationSnapshot>> {
    let batches_per_epoch = task.train.len() / cfg.batch_size;
    let mut snapshots = Vec::with_capacity(cfg.epochs_per_task * batches_per_epoch);

    for _ in 0..cfg.epochs_per_task {
        let order = shuffled_indices(task.train.len(), rng);
        for b in 0..batches_per_epoch {
            let batch: Vec<Sample> = order[b * cfg.batch_size..(b + 1) * cfg.batch_size]
                .iter()
                .map(|&i| task.train[i].clone())
                .collect();
            let (_, task_grad) = loss_and_grad(&state.params, &batch)?;

            let mut flat = state.params.flatten();
            let direction = match strategy.kind {
                StrategyKind::Plain => task_grad,
                StrategyKind::Ewc => {
                    ewc_regularized_grad(&flat, &task_grad, &state.anchors, strategy.lambda)
                }
                StrategyKind::Gem => {
                    let memory_grads: Vec<Vec<f64>> = state
                        .memories
                        .iter()
                        .map(|mem| loss_and_grad(&state.params, &mem.samples).map(|(_, g)| g))
                        .collect::<Result<_>>()?;
                    gem_project(&task_grad, &memory_grads)?
                }
            };
            state.adam.update(&mut flat, &direction);
            state.params.assign_from_flat(&flat);

            snapshots.push(
                eval_tasks
                    .iter()
                    .map(|t| (t.task_id, test_accuracy(&state.params, &t.test)))
                    .collect(),
            );
        }
    }

    match strategy.kind {
        StrategyKind::Plain => {}
        StrategyKind::Ewc => {
            let count = strategy.fisher_samples.min(task.train.len());
            let chosen: Vec<Sample> = sample_indices(task.train.len(), count, rng)
                .into_iter()
                .map(|i| task.train[i].clone())
                .collect();
            let fisher_diag = estimate_fisher_diag(&state.params, &chosen)?;
            state.anchors.push(FisherAnchor {
                task_id: task.task_id,
                optimal_params: state.params.flatten(),
                fisher_diag,
            });
        }
        StrategyKind::Gem => {
            let count = strategy.memory_size.min(task.train.len());
            let samples: Vec<Sample> = sample_indices(task.train.len(), count, rng)
                .into_iter()
                .map(|i| task.train[i].clone())
                .collect();
            state.memories.push(EpisodicMemory { task_id: task.task_id, samples });
        }
    }

    Ok(snapshots)
}

/// One point of a learning curve: after global iteration `iteration`
/// (1-based, spanning the whole sequence) while training the task at
/// 1-based sequence position `position`, the classifier scored `accuracy`
/// on `task_id`'s test set.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub position: usize,
    pub iteration: usize,
    pub task_id: u8,
    pub accuracy: f64,
}

/// Hyperparameters of a full sequential run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n_layers: usize,
    pub lr: f64,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { n_layers: 1, lr: 0.1, train: TrainConfig::default() }
    }
}

/// Outcome of one seed's sequential run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub seed: u64,
    pub matrix: AccuracyMatrix,
    pub curves: Vec<CurvePoint>,
    pub final_params: ClassifierParams,
}

/// Train sequentially over `ordered` tasks from a fresh seed-derived
/// initialization, recording per-iteration curves and the post-task accuracy
/// matrix.
pub fn run_sequence(
    ordered: &[&TaskDataset],
    strategy: &StrategyConfig,
    cfg: &RunConfig,
    seed: u64,
) -> Result<RunResult> {
    assert!(!ordered.is_empty(), "empty task sequence");
    let n_qubits = ordered[0].n_qubits;
    assert!(
        ordered.iter().all(|t| t.n_qubits == n_qubits),
        "all tasks must share a qubit count"
    );

    let mut rng = seeded(seed);
    let mut state = TrainerState::init(n_qubits, cfg.n_layers, cfg.lr, &mut rng);
    let mut matrix = AccuracyMatrix::new();
    let mut curves = Vec::new();
    let mut iteration = 0usize;

    for (pos, task) in ordered.iter().enumerate() {
        let eval: Vec<&TaskDataset> = ordered[..=pos].to_vec();
        let snapshots = train_task(&mut state, task, &eval, strategy, &cfg.train, &mut rng)?;
        for snap in snapshots {
            iteration += 1;
            for (task_id, accuracy) in snap {
                curves.push(CurvePoint { position: pos + 1, iteration, task_id, accuracy });
            }
        }
        matrix.push_row(
            ordered[..=pos]
                .iter()
                .map(|t| test_accuracy(&state.params, &t.test))
                .collect(),
        );
    }
    Ok(RunResult { seed, matrix, curves, final_params: state.params })
}

/// Run every seed and pick the winner by final ACC (ties keep the earliest
/// seed in the list).
pub fn run_seeds(
    ordered: &[&TaskDataset],
    strategy: &StrategyConfig,
    cfg: &RunConfig,
    seeds: &[u64],
) -> Result<(Vec<RunResult>, usize)> {
    assert!(!seeds.is_empty(), "need at least one seed");
    let mut results = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        results.push(run_sequence(ordered, strategy, cfg, seed)?);
    }
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.matrix.acc() > results[best].matrix.acc() {
            best = i;
        }
    }
    Ok((results, best))
}
