//! Command-line driver: sample, collect, train, tune, report, selfcheck.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use crate::config::{BackendKind, ConfigError, RunConfig};
use crate::harness::{
    self, load_dataset, Backend, CommandBackend, Dataset, DeviceSpec, Progress, RuntimeSource,
    SyntheticBackend, WorkloadBackend,
};
use crate::surrogate::{load_model, save_model, write_loss_csv, TrainedSurrogate};
use crate::tuner::{self, SearchSettings, TrainOutcome};
use clap::{Parser, Subcommand};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "kerntune", version, about = "Surrogate-model autotuner for kernel scheduling parameters")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw random configs and write them as CSV.
    Sample {
        #[arg(long)]
        n: usize,
        /// Output file; default `<out>/configs.csv`.
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Measure sampled configs into a dataset CSV.
    Collect {
        #[arg(long)]
        n: usize,
        /// Device name from the config's device table; default the first.
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        repeats: Option<usize>,
        /// Continue an interrupted collection in place.
        #[arg(long)]
        resume: bool,
        /// Output file; default `<out>/dataset-<device>.csv`.
        #[arg(long)]
        out_file: Option<PathBuf>,
    },
    /// Train a surrogate on one dataset (single device) or several
    /// (combined, with the device feature).
    Train {
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
        /// Model file; default `<out>/model.json`.
        #[arg(long)]
        model_out: Option<PathBuf>,
    },
    /// Search the space with a surrogate and re-measure the best configs.
    Tune {
        /// Previously trained model file.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Dataset CSVs to train on first (single or combined).
        #[arg(long = "data")]
        data: Vec<PathBuf>,
        #[arg(long)]
        topk: Option<usize>,
        #[arg(long)]
        device: Option<String>,
        #[arg(long)]
        candidates: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
    },
    /// Evaluate a saved model against a dataset and emit scatter data.
    Report {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "data", required = true)]
        data: Vec<PathBuf>,
    },
    /// Run the built-in numerical checks and print a pass/fail table.
    Selfcheck {
        /// Force the named check to fail (test hook).
        #[arg(long, hide = true)]
        inject_failure: Option<String>,
    },
}

/// Errors split by exit code.
pub enum CliError {
    /// Usage or configuration problem: exit 2.
    Usage(String),
    /// Runtime failure: exit 1.
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

macro_rules! runtime_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}
runtime_from!(
    crate::harness::HarnessError,
    crate::surrogate::SurrogateError,
    crate::tuner::TunerError,
    crate::workload::WorkloadError,
    std::io::Error
);

impl From<crate::space::SpaceError> for CliError {
    fn from(e: crate::space::SpaceError) -> Self {
        // sampling/encoding problems stem from the request, not the run
        CliError::Usage(e.to_string())
    }
}

/// Parse arguments, dispatch, and translate errors to the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("KERNTUNE_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Cmd::Selfcheck { inject_failure } = &cli.cmd {
        return selfcheck(inject_failure.as_deref());
    }

    let config_path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config is required for this subcommand".into()))?;
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        cfg.search.seed = seed;
        cfg.train.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    fs::create_dir_all(&cfg.out_dir)?;

    match cli.cmd {
        Cmd::Sample { n, out_file } => cmd_sample(&cfg, n, out_file),
        Cmd::Collect {
            n,
            device,
            repeats,
            resume,
            out_file,
        } => cmd_collect(&cfg, n, device.as_deref(), repeats, resume, out_file),
        Cmd::Train { data, model_out } => cmd_train(&cfg, &data, model_out).map(|_| ()),
        Cmd::Tune {
            model,
            data,
            topk,
            device,
            candidates,
            repeats,
        } => cmd_tune(&cfg, model, &data, topk, device.as_deref(), candidates, repeats),
        Cmd::Report { model, data } => cmd_report(&cfg, &model, &data),
        Cmd::Selfcheck { .. } => unreachable!("handled above"),
    }
}

fn make_backend(cfg: &RunConfig) -> Result<Box<dyn Backend>, CliError> {
    Ok(match cfg.backend {
        BackendKind::Synthetic => Box::new(SyntheticBackend {
            model: cfg.cost_model.clone(),
        }),
        BackendKind::Workload => Box::new(WorkloadBackend {
            base: cfg.workload.clone(),
        }),
        BackendKind::Command => {
            let section = cfg
                .command
                .as_ref()
                .expect("validated at config load");
            let source = match section.parse {
                crate::config::ParseMode::WallClock => RuntimeSource::WallClock,
                crate::config::ParseMode::TimeLine => RuntimeSource::TimeLine,
            };
            let names = cfg
                .space
                .param_names()
                .iter()
                .map(|s| s.to_string())
                .collect();
            Box::new(
                CommandBackend::new(
                    section.template.clone(),
                    std::time::Duration::from_secs_f64(section.timeout_s),
                    source,
                    names,
                    section.iters,
                )
                .map_err(|e| CliError::Usage(e.to_string()))?,
            )
        }
    })
}

fn cmd_sample(cfg: &RunConfig, n: usize, out_file: Option<PathBuf>) -> Result<(), CliError> {
    let configs = cfg.space.sample(n, cfg.seed)?;
    let path = out_file.unwrap_or_else(|| cfg.out_dir.join("configs.csv"));
    let mut f = fs::File::create(&path)?;
    writeln!(f, "{}", cfg.space.param_names().join(","))?;
    for c in &configs {
        let row: Vec<String> = c.values().iter().map(|v| v.to_string()).collect();
        writeln!(f, "{}", row.join(","))?;
    }
    println!("wrote {} configs to {}", configs.len(), path.display());
    Ok(())
}

fn cmd_collect(
    cfg: &RunConfig,
    n: usize,
    device: Option<&str>,
    repeats: Option<usize>,
    resume: bool,
    out_file: Option<PathBuf>,
) -> Result<(), CliError> {
    let device = cfg.device(device)?.clone();
    let backend = make_backend(cfg)?;
    let path = out_file
        .unwrap_or_else(|| cfg.out_dir.join(format!("dataset-{}.csv", device.name)));
    if path.exists() && !resume {
        return Err(CliError::Usage(format!(
            "{} already exists; pass --resume to continue it or remove it first",
            path.display()
        )));
    }
    let plan = harness::CollectPlan {
        space: &cfg.space,
        n,
        repeats: repeats.unwrap_or(cfg.repeats),
        seed: cfg.seed,
        include_device: cfg.include_device,
    };
    let mut progress = |p: Progress| {
        eprintln!(
            "PROGRESS {}/{} {:.3} {:.3}",
            p.done, p.total, p.elapsed_s, p.eta_s
        );
    };
    let dataset =
        harness::collect_to_csv(&path, &plan, backend.as_ref(), &device, Some(&mut progress))?;
    println!("collected {} rows into {}", dataset.len(), path.display());
    Ok(())
}

/// Resolve each dataset's device against the config table via the constant
/// device column the collection wrote.
fn resolve_devices(
    cfg: &RunConfig,
    datasets: Vec<Dataset>,
) -> Result<Vec<(DeviceSpec, Dataset)>, CliError> {
    datasets
        .into_iter()
        .map(|ds| {
            let gflops = ds
                .rows()
                .first()
                .and_then(|r| r.device_gflops)
                .ok_or_else(|| {
                    CliError::Usage(
                        "combined training needs datasets with a device_gflops column".into(),
                    )
                })?;
            let device = cfg.device_by_gflops(gflops).ok_or_else(|| {
                CliError::Usage(format!(
                    "no device with {gflops} GFLOPS in the config's device table"
                ))
            })?;
            Ok((device.clone(), ds))
        })
        .collect()
}

fn cmd_train(
    cfg: &RunConfig,
    data: &[PathBuf],
    model_out: Option<PathBuf>,
) -> Result<TrainOutcome, CliError> {
    let datasets: Vec<Dataset> = data
        .iter()
        .map(|p| load_dataset(p).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let outcome = if datasets.len() == 1 {
        log::info!("single-device training on {} rows", datasets[0].len());
        tuner::train_single(&datasets[0], &cfg.train)?
    } else {
        let entries = resolve_devices(cfg, datasets)?;
        let total: usize = entries.iter().map(|(_, d)| d.len()).sum();
        log::info!(
            "combined training on {} rows from {} devices",
            total,
            entries.len()
        );
        tuner::train_combined(&entries, &cfg.train)?
    };

    let model_path = model_out.unwrap_or_else(|| cfg.out_dir.join("model.json"));
    save_model(&outcome.surrogate, &model_path)?;
    write_loss_csv(&cfg.out_dir.join("loss.csv"), &outcome.report.loss_history)?;
    let report_json = serde_json::json!({
        "r2_train": outcome.report.r2_train,
        "r2_test": outcome.report.r2_test,
        "epochs_run": outcome.report.epochs_run,
        "final_lr": outcome.report.final_lr,
        "stop_reason": outcome.report.stop_reason,
        "per_device": outcome.per_device,
    });
    fs::write(
        cfg.out_dir.join("train_report.json"),
        serde_json::to_string_pretty(&report_json).expect("report serializes"),
    )?;
    println!(
        "trained: R^2 train {:.4}, test {:.4}, {} epochs -> {}",
        outcome.report.r2_train,
        outcome.report.r2_test,
        outcome.report.epochs_run,
        model_path.display()
    );
    for d in &outcome.per_device {
        println!(
            "  device {} ({} GFLOPS): test R^2 {:.4} over {} rows",
            d.name, d.gflops, d.r2_test, d.n_test
        );
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn cmd_tune(
    cfg: &RunConfig,
    model: Option<PathBuf>,
    data: &[PathBuf],
    topk: Option<usize>,
    device: Option<&str>,
    candidates: Option<usize>,
    repeats: Option<usize>,
) -> Result<(), CliError> {
    if model.is_none() && data.is_empty() {
        return Err(CliError::Usage(
            "tune needs --model or at least one --data dataset".into(),
        ));
    }
    let device = cfg.device(device)?.clone();
    let backend = make_backend(cfg)?;
    let settings = SearchSettings {
        n_candidates: candidates.unwrap_or(cfg.search.n_candidates),
        k: topk.unwrap_or(cfg.search.k),
        seed: cfg.search.seed,
        enum_cap: cfg.search.enum_cap,
    };
    let repeats = repeats.unwrap_or(cfg.repeats);

    let report = if let Some(model_path) = model {
        let surrogate: TrainedSurrogate = load_model(&model_path)?;
        tuner::tune_pretrained(
            &surrogate,
            &cfg.space,
            backend.as_ref(),
            &device,
            &settings,
            cfg.baseline.clone(),
            repeats,
            &cfg.out_dir,
        )?
    } else {
        let outcome = cmd_train(cfg, data, None)?;
        tuner::tune(
            &outcome,
            &cfg.space,
            backend.as_ref(),
            &device,
            &settings,
            cfg.baseline.clone(),
            repeats,
            &cfg.out_dir,
        )?
    };

    println!(
        "tuned on {}: best measured {:.6} s, baseline {:.6} s, speedup {:.3}",
        device.name,
        report
            .best_predicted
            .iter()
            .map(|e| e.measured_s)
            .fold(f64::INFINITY, f64::min),
        report.baseline_measured_s,
        report.speedup
    );
    println!("report artifacts in {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_report(cfg: &RunConfig, model: &Path, data: &[PathBuf]) -> Result<(), CliError> {
    let surrogate = load_model(model)?;
    let mut actual = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for path in data {
        let ds = load_dataset(path)?;
        let needs_device = surrogate.input_size() == ds.param_names().len() + 1;
        for r in ds.rows() {
            let mut features: Vec<f64> =
                r.config.values().iter().map(|&v| v as f64).collect();
            if needs_device {
                let g = r.device_gflops.ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}: model expects a device feature but the dataset has none",
                        path.display()
                    ))
                })?;
                features.push(g);
            }
            if features.len() != surrogate.input_size() {
                return Err(CliError::Usage(format!(
                    "{}: dataset encodes {} features but the model takes {}",
                    path.display(),
                    features.len(),
                    surrogate.input_size()
                )));
            }
            rows.push(features);
            actual.push(r.runtime_s);
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage("datasets are empty".into()));
    }
    let mut x = ndarray::Array2::zeros((rows.len(), surrogate.input_size()));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            x[[i, j]] = *v;
        }
    }
    let predicted = surrogate.predict(x.view())?;
    let score = crate::surrogate::r2(&actual, predicted.as_slice().unwrap())
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let path = cfg.out_dir.join("scatter_eval.csv");
    let mut f = fs::File::create(&path)?;
    writeln!(f, "actual_s,predicted_s")?;
    for (a, p) in actual.iter().zip(predicted.iter()) {
        writeln!(f, "{a:.16e},{p:.16e}")?;
    }
    println!(
        "evaluated {} rows: R^2 {:.4}{} -> {}",
        actual.len(),
        score.value,
        if score.degenerate { " (degenerate)" } else { "" },
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// selfcheck

type CheckResult = Result<(), String>;

fn check_gradients() -> CheckResult {
    use crate::surrogate::Mlp;
    use ndarray::{Array1, Array2};
    use rand::Rng;
    use rand::SeedableRng;

    for (arch, seed) in [(vec![2, 8, 1], 1u64), (vec![3, 6, 4, 1], 2)] {
        let model = Mlp::init(&arch, seed).map_err(|e| e.to_string())?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 10);
        let x = Array2::from_shape_fn((6, arch[0]), |_| rng.gen_range(-1.5..1.5));
        let y = Array1::from_shape_fn(6, |_| rng.gen_range(-1.0..1.0));
        let alpha = 1e-4;
        let grads = model
            .gradients(x.view(), y.view(), alpha)
            .map_err(|e| e.to_string())?;

        // compare per-layer gradient norms; elementwise relative error is
        // meaningless at the finite-difference noise floor
        let h = 1e-6;
        for l in 0..arch.len() - 1 {
            let dims = grads.weights[l].dim();
            let mut diff_sq = 0.0;
            let mut analytic_sq = 0.0;
            let mut fd_sq = 0.0;
            for r in 0..dims.0 {
                for c in 0..dims.1 {
                    let mut plus = model.clone();
                    plus.params_mut().0[l][[r, c]] += h;
                    let mut minus = model.clone();
                    minus.params_mut().0[l][[r, c]] -= h;
                    let fd = (plus.loss(x.view(), y.view(), alpha).unwrap()
                        - minus.loss(x.view(), y.view(), alpha).unwrap())
                        / (2.0 * h);
                    let got = grads.weights[l][[r, c]];
                    diff_sq += (got - fd) * (got - fd);
                    analytic_sq += got * got;
                    fd_sq += fd * fd;
                }
            }
            let rel = diff_sq.sqrt() / analytic_sq.sqrt().max(fd_sq.sqrt()).max(1e-12);
            if rel > 1e-5 {
                return Err(format!("layer {l} weights: norm relative error {rel:.2e}"));
            }
        }
    }
    Ok(())
}

fn check_scaler_round_trip() -> CheckResult {
    use crate::surrogate::Scaler;
    use ndarray::array;
    let x = array![[1.0, 5.0, 3.0], [3.0, 5.0, -2.0], [8.0, 5.0, 0.25]];
    let s = Scaler::fit(x.view()).map_err(|e| e.to_string())?;
    if !s.is_constant(1) {
        return Err("constant column not flagged".into());
    }
    let z = s.transform(x.view()).map_err(|e| e.to_string())?;
    if z.column(1).iter().any(|&v| v != 0.0) {
        return Err("constant column did not map to 0".into());
    }
    let back = s.inverse(z.view()).map_err(|e| e.to_string())?;
    for (a, b) in x.iter().zip(back.iter()) {
        if (a - b).abs() > 1e-12 {
            return Err(format!("round trip drifted: {a} vs {b}"));
        }
    }
    Ok(())
}

fn check_r2_hand_cases() -> CheckResult {
    use crate::surrogate::r2;
    let exact = r2(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    if (exact.value - 1.0).abs() > 1e-12 {
        return Err(format!("perfect prediction scored {}", exact.value));
    }
    let hand = r2(&[1.0, 2.0, 3.0], &[1.5, 2.0, 2.5]).map_err(|e| e.to_string())?;
    if (hand.value - 0.75).abs() > 1e-12 {
        return Err(format!("hand case scored {}", hand.value));
    }
    let degen = r2(&[2.0, 2.0], &[1.0, 3.0]).map_err(|e| e.to_string())?;
    if degen.value != 0.0 || !degen.degenerate {
        return Err("degenerate convention violated".into());
    }
    Ok(())
}

fn check_adam_hand_case() -> CheckResult {
    use crate::surrogate::{adam_step, AdamState, Gradients, Mlp, TrainConfig};
    use ndarray::array;
    let mut m = Mlp::from_parts(vec![array![[0.0]]], vec![array![0.0]])
        .map_err(|e| e.to_string())?;
    let grads = Gradients {
        weights: vec![array![[1.0]]],
        biases: vec![array![0.0]],
    };
    let mut state = AdamState::new(&m);
    let cfg = TrainConfig::default();
    adam_step(&mut m, &grads, &mut state, cfg.lr0, &cfg);
    let expected = -0.0009 / (1.0 + 1e-9);
    let got = m.weights()[0][[0, 0]];
    if (got - expected).abs() > 1e-12 {
        return Err(format!("step gave {got}, expected {expected}"));
    }
    Ok(())
}

fn check_muscl_linear_exactness() -> CheckResult {
    use crate::workload::muscl_reconstruct;
    for kappa in [-1.0, 0.0, 1.0 / 3.0, 1.0] {
        let (l, r) = muscl_reconstruct(1.0, 2.0, 3.0, 4.0, 1.0, kappa, 1.0, 1.0, 1.0, 1.0);
        if (l - 2.5).abs() > 1e-12 || (r - 2.5).abs() > 1e-12 {
            return Err(format!("kappa {kappa}: qL {l}, qR {r}, want 2.5"));
        }
    }
    Ok(())
}

fn check_tiling_invariance() -> CheckResult {
    use crate::workload::{run_workload, WorkloadSpec, NUM_STAGES};
    let base = WorkloadSpec {
        nx: 16,
        ny: 16,
        steps: 2,
        seed: 42,
        ..Default::default()
    };
    let reference = run_workload(&base).map_err(|e| e.to_string())?;
    for tiles in [[(1, 1); NUM_STAGES], [(16, 64); NUM_STAGES], [(5, 3); NUM_STAGES]] {
        let spec = WorkloadSpec {
            tiles,
            ..base.clone()
        };
        let res = run_workload(&spec).map_err(|e| e.to_string())?;
        if res.checksum.to_bits() != reference.checksum.to_bits() {
            return Err(format!(
                "tiles {tiles:?}: checksum {} differs from {}",
                res.checksum, reference.checksum
            ));
        }
    }
    Ok(())
}

/// Run every check, print the table, and fail with the first broken check's
/// name in the error.
fn selfcheck(inject_failure: Option<&str>) -> Result<(), CliError> {
    let checks: [(&str, fn() -> CheckResult); 6] = [
        ("gradient_check", check_gradients),
        ("scaler_round_trip", check_scaler_round_trip),
        ("r2_hand_cases", check_r2_hand_cases),
        ("adam_hand_case", check_adam_hand_case),
        ("muscl_linear_exactness", check_muscl_linear_exactness),
        ("tiling_invariance", check_tiling_invariance),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        let start = Instant::now();
        let mut result = check();
        if inject_failure == Some(name) {
            result = Err("injected failure".into());
        }
        let elapsed = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("{name:<26} PASS  ({elapsed:.2} s)"),
            Err(reason) => {
                println!("{name:<26} FAIL  ({elapsed:.2} s): {reason}");
                failures.push(name);
            }
        }
    }
    if failures.is_empty() {
        println!("selfcheck: all checks passed");
        Ok(())
    } else {
        Err(CliError::Runtime(format!(
            "selfcheck failed: {}",
            failures.join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_selfchecks_pass() {
        assert!(selfcheck(None).is_ok());
    }

    #[test]
    fn injected_failure_is_reported() {
        match selfcheck(Some("gradient_check")) {
            Err(CliError::Runtime(message)) => assert!(message.contains("gradient_check")),
            _ => panic!("expected a runtime failure"),
        }
    }
}
