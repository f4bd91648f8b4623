//! Experiment orchestration: per-device training, combined multi-device
//! training with the device-capability feature, surrogate-guided search,
//! re-measurement of the predicted best configs, and report artifacts.

use crate::harness::{measure, Backend, Dataset, DeviceSpec, HarnessError, Sample};
use crate::space::{Config, ParamSpace, SpaceError};
use crate::surrogate::{
    self, r2, Mlp, RegressionData, SurrogateError, TrainConfig, TrainReport, TrainedSurrogate,
};
use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Fraction of rows that go to the training split.
pub const SPLIT_FRACTION: f64 = 0.75;

/// Spaces at most this large are searched by full enumeration instead of
/// random candidates.
pub const DEFAULT_ENUM_CAP: u128 = 100_000;

/// Random candidates drawn when the space is too large to enumerate.
pub const DEFAULT_CANDIDATES: usize = 100_000;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TunerError {
    #[error("dataset has {0} rows; need at least 2 to split")]
    DatasetTooSmall(usize),
    #[error("dataset mixes {0} devices; enable combined training with a device feature instead")]
    MixedDevices(usize),
    #[error("combined training needs at least 2 devices, got {0}")]
    NeedTwoDevices(usize),
    #[error("dataset rows carry device {found} GFLOPS but the device table says {expected}")]
    DeviceValueMismatch { expected: f64, found: f64 },
    #[error("model takes {model_inputs} features but the space encodes {expected}")]
    FeatureLayout {
        model_inputs: usize,
        expected: usize,
    },
    #[error("no configs to validate")]
    NoConfigs,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Actual/predicted pairs of one data split, in seconds.
#[derive(Debug, Clone)]
pub struct SplitEval {
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

/// Per-device score inside a combined run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceScore {
    pub name: String,
    pub gflops: f64,
    pub r2_test: f64,
    pub n_test: usize,
}

/// A finished training run plus everything the report needs.
pub struct TrainOutcome {
    pub surrogate: TrainedSurrogate,
    pub report: TrainReport,
    pub train_eval: SplitEval,
    pub test_eval: SplitEval,
    /// Present only for combined training.
    pub per_device: Vec<DeviceScore>,
}

fn feature_matrix(dataset: &Dataset, device_override: Option<f64>) -> (Array2<f64>, Array1<f64>) {
    let k = dataset.param_names().len();
    let with_device = device_override.is_some();
    let cols = k + usize::from(with_device);
    let mut x = Array2::zeros((dataset.len(), cols));
    let mut y = Array1::zeros(dataset.len());
    for (i, row) in dataset.rows().iter().enumerate() {
        for (j, &v) in row.config.values().iter().enumerate() {
            x[[i, j]] = v as f64;
        }
        if let Some(g) = device_override {
            x[[i, k]] = g;
        }
        y[i] = row.runtime_s;
    }
    (x, y)
}

fn eval_split(
    surrogate: &TrainedSurrogate,
    data: &RegressionData,
) -> Result<SplitEval, TunerError> {
    let predicted = surrogate.predict(data.x())?;
    Ok(SplitEval {
        actual: data.y().to_vec(),
        predicted: predicted.to_vec(),
    })
}

fn distinct_device_values(dataset: &Dataset) -> Vec<f64> {
    let mut distinct: Vec<f64> = Vec::new();
    for row in dataset.rows() {
        if let Some(g) = row.device_gflops {
            if !distinct.iter().any(|x| x.to_bits() == g.to_bits()) {
                distinct.push(g);
            }
        }
    }
    distinct
}

/// Train on one device's measurements: seeded 75/25 split, scalers fitted on
/// the training split only, R^2 reported on both splits.
///
/// Features are the parameter values alone; a constant device column is
/// tolerated and ignored, a mixed one is an error.
pub fn train_single(
    dataset: &Dataset,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TunerError> {
    if dataset.len() < 2 {
        return Err(TunerError::DatasetTooSmall(dataset.len()));
    }
    let distinct = distinct_device_values(dataset);
    if distinct.len() > 1 {
        return Err(TunerError::MixedDevices(distinct.len()));
    }
    let (train_ds, test_ds) = dataset.split(SPLIT_FRACTION, cfg.seed)?;
    let (x_tr, y_tr) = feature_matrix(&train_ds, None);
    let (x_te, y_te) = feature_matrix(&test_ds, None);
    let train_data = RegressionData::new(x_tr, y_tr)?;
    let test_data = RegressionData::new(x_te, y_te)?;
    let model = Mlp::init(&cfg.layer_sizes(dataset.param_names().len()), cfg.seed)?;
    let (surrogate, report) = surrogate::train(model, &train_data, &test_data, cfg)?;
    let train_eval = eval_split(&surrogate, &train_data)?;
    let test_eval = eval_split(&surrogate, &test_data)?;
    Ok(TrainOutcome {
        surrogate,
        report,
        train_eval,
        test_eval,
        per_device: Vec::new(),
    })
}

/// Pool several single-device datasets, appending each device's GFLOPS as
/// the last feature, and train one model over the union. Reports the overall
/// scores plus a per-device breakdown on the test split.
pub fn train_combined(
    entries: &[(DeviceSpec, Dataset)],
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TunerError> {
    if entries.len() < 2 {
        return Err(TunerError::NeedTwoDevices(entries.len()));
    }
    let k = entries[0].1.param_names().len();
    let mut xs: Vec<Array2<f64>> = Vec::new();
    let mut ys: Vec<Array1<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (idx, (device, dataset)) in entries.iter().enumerate() {
        device.validate()?;
        let distinct = distinct_device_values(dataset);
        if distinct.len() > 1 {
            return Err(TunerError::MixedDevices(distinct.len()));
        }
        if let Some(&g) = distinct.first() {
            if g.to_bits() != device.gflops.to_bits() {
                return Err(TunerError::DeviceValueMismatch {
                    expected: device.gflops,
                    found: g,
                });
            }
        }
        let (x, y) = feature_matrix(dataset, Some(device.gflops));
        labels.extend(std::iter::repeat_n(idx, dataset.len()));
        xs.push(x);
        ys.push(y);
    }
    let x_all = ndarray::concatenate(
        Axis(0),
        &xs.iter().map(|x| x.view()).collect::<Vec<_>>(),
    )
    .expect("consistent widths");
    let y_all = ndarray::concatenate(
        Axis(0),
        &ys.iter().map(|y| y.view()).collect::<Vec<_>>(),
    )
    .expect("vectors concatenate");
    let n = x_all.nrows();
    if n < 2 {
        return Err(TunerError::DatasetTooSmall(n));
    }

    let (train_idx, test_idx) = crate::space::split_indices(n, SPLIT_FRACTION, cfg.seed)?;
    let train_data = RegressionData::new(
        x_all.select(Axis(0), &train_idx),
        y_all.select(Axis(0), &train_idx),
    )?;
    let test_data = RegressionData::new(
        x_all.select(Axis(0), &test_idx),
        y_all.select(Axis(0), &test_idx),
    )?;
    let model = Mlp::init(&cfg.layer_sizes(k + 1), cfg.seed)?;
    let (surrogate, report) = surrogate::train(model, &train_data, &test_data, cfg)?;
    let train_eval = eval_split(&surrogate, &train_data)?;
    let test_eval = eval_split(&surrogate, &test_data)?;

    let mut per_device = Vec::new();
    for (idx, (device, _)) in entries.iter().enumerate() {
        let rows: Vec<usize> = test_idx
            .iter()
            .enumerate()
            .filter(|(_, &orig)| labels[orig] == idx)
            .map(|(pos, _)| pos)
            .collect();
        let actual: Vec<f64> = rows.iter().map(|&p| test_eval.actual[p]).collect();
        let predicted: Vec<f64> = rows.iter().map(|&p| test_eval.predicted[p]).collect();
        let score = if actual.is_empty() {
            0.0
        } else {
            r2(&actual, &predicted)?.value
        };
        per_device.push(DeviceScore {
            name: device.name.clone(),
            gflops: device.gflops,
            r2_test: score,
            n_test: actual.len(),
        });
    }

    Ok(TrainOutcome {
        surrogate,
        report,
        train_eval,
        test_eval,
        per_device,
    })
}

/// Search settings; `enum_cap` switches between full enumeration and random
/// candidate draws.
#[derive(Debug, Clone)]
pub struct SearchSettings {
    pub n_candidates: usize,
    pub k: usize,
    pub seed: u64,
    pub enum_cap: u128,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            n_candidates: DEFAULT_CANDIDATES,
            k: 10,
            seed: 0,
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// Rank candidate configs by predicted runtime and return the best `k` with
/// their predictions, ascending. Ties break on lexicographic config order.
pub fn search(
    surrogate: &TrainedSurrogate,
    space: &ParamSpace,
    device_gflops: Option<f64>,
    settings: &SearchSettings,
) -> Result<Vec<(Config, f64)>, TunerError> {
    if surrogate.input_size() != space.encoded_len() {
        return Err(TunerError::FeatureLayout {
            model_inputs: surrogate.input_size(),
            expected: space.encoded_len(),
        });
    }
    let candidates: Vec<Config> = if space.size() <= settings.enum_cap {
        space.enumerate(settings.enum_cap)?.collect()
    } else {
        space.sample(settings.n_candidates, settings.seed)?
    };
    let mut x = Array2::zeros((candidates.len(), space.encoded_len()));
    for (i, c) in candidates.iter().enumerate() {
        let enc = space.encode(c, device_gflops)?;
        for (j, v) in enc.iter().enumerate() {
            x[[i, j]] = *v;
        }
    }
    let preds = surrogate.predict(x.view())?;
    let mut ranked: Vec<(Config, f64)> = candidates.into_iter().zip(preds).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(settings.k);
    Ok(ranked)
}

/// Re-measure configs through the harness, serially, in the given order.
pub fn validate(
    backend: &dyn Backend,
    device: &DeviceSpec,
    configs: &[Config],
    repeats: usize,
) -> Result<Vec<(Config, Sample)>, TunerError> {
    if configs.is_empty() {
        return Err(TunerError::NoConfigs);
    }
    configs
        .iter()
        .map(|c| Ok((c.clone(), measure(backend, c, device, repeats)?)))
        .collect()
}

/// Top-k entry of the report: what the model promised and what the device
/// delivered.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopkEntry {
    pub config: Vec<u64>,
    pub predicted_s: f64,
    pub measured_s: f64,
    pub dispersion_s: f64,
}

/// Machine-readable tuning report; the CSV artifacts next to it carry the
/// plot data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuneReport {
    pub format_version: u32,
    pub best_predicted: Vec<TopkEntry>,
    pub baseline_config: Vec<u64>,
    pub baseline_measured_s: f64,
    /// Baseline runtime over the best measured top-k runtime.
    pub speedup: f64,
    pub r2_train: f64,
    pub r2_test: f64,
    pub search_candidates: usize,
    pub loss_history_file: String,
    pub per_device: Vec<DeviceScore>,
}

/// Everything `make_report` renders. The split evaluations are absent when
/// tuning a pre-trained model without its datasets; the scores stored in the
/// model file stand in then.
pub struct ReportInputs<'a> {
    pub train_eval: Option<&'a SplitEval>,
    pub test_eval: Option<&'a SplitEval>,
    pub fallback_r2: (f64, f64),
    pub loss_history: &'a [f64],
    pub topk: &'a [(Config, f64, Sample)],
    pub baseline: &'a (Config, Sample),
    pub search_candidates: usize,
    pub per_device: &'a [DeviceScore],
}

fn write_scatter(path: &Path, eval: &SplitEval) -> Result<(), TunerError> {
    let mut f = fs::File::create(path)?;
    writeln!(f, "actual_s,predicted_s")?;
    for (a, p) in eval.actual.iter().zip(&eval.predicted) {
        writeln!(f, "{a:.16e},{p:.16e}")?;
    }
    Ok(())
}

/// Render `report.json`, `scatter_train.csv`, `scatter_test.csv`,
/// `loss.csv` and `topk.csv` into `out_dir`. The reported R^2 values are
/// recomputed from the scatter data itself.
pub fn make_report(inputs: &ReportInputs, out_dir: &Path) -> Result<TuneReport, TunerError> {
    fs::create_dir_all(out_dir)?;
    if let Some(eval) = inputs.train_eval {
        write_scatter(&out_dir.join("scatter_train.csv"), eval)?;
    }
    if let Some(eval) = inputs.test_eval {
        write_scatter(&out_dir.join("scatter_test.csv"), eval)?;
    }
    surrogate::write_loss_csv(&out_dir.join("loss.csv"), inputs.loss_history)?;

    let mut topk_file = fs::File::create(out_dir.join("topk.csv"))?;
    writeln!(topk_file, "rank,config,predicted_s,measured_s,dispersion_s")?;
    let mut best_predicted = Vec::with_capacity(inputs.topk.len());
    for (rank, (config, predicted, sample)) in inputs.topk.iter().enumerate() {
        let cfg_str = config
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            topk_file,
            "{},{},{:.16e},{:.16e},{:.16e}",
            rank + 1,
            cfg_str,
            predicted,
            sample.runtime_s,
            sample.dispersion_s
        )?;
        best_predicted.push(TopkEntry {
            config: config.values().to_vec(),
            predicted_s: *predicted,
            measured_s: sample.runtime_s,
            dispersion_s: sample.dispersion_s,
        });
    }

    let best_measured = inputs
        .topk
        .iter()
        .map(|(_, _, s)| s.runtime_s)
        .fold(f64::INFINITY, f64::min);
    let baseline_measured = inputs.baseline.1.runtime_s;

    let r2_of = |eval: Option<&SplitEval>, fallback: f64| -> Result<f64, TunerError> {
        match eval {
            Some(e) => Ok(r2(&e.actual, &e.predicted)?.value),
            None => Ok(fallback),
        }
    };
    let report = TuneReport {
        format_version: REPORT_FORMAT_VERSION,
        best_predicted,
        baseline_config: inputs.baseline.0.values().to_vec(),
        baseline_measured_s: baseline_measured,
        speedup: baseline_measured / best_measured,
        r2_train: r2_of(inputs.train_eval, inputs.fallback_r2.0)?,
        r2_test: r2_of(inputs.test_eval, inputs.fallback_r2.1)?,
        search_candidates: inputs.search_candidates,
        loss_history_file: "loss.csv".into(),
        per_device: inputs.per_device.to_vec(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(out_dir.join("report.json"), json)?;
    Ok(report)
}

/// (ranked-and-measured top-k, measured baseline, candidates examined).
type SearchOutcome = (Vec<(Config, f64, Sample)>, (Config, Sample), usize);

fn search_validate_baseline(
    surrogate: &TrainedSurrogate,
    space: &ParamSpace,
    backend: &dyn Backend,
    device: &DeviceSpec,
    settings: &SearchSettings,
    baseline: Option<Config>,
    repeats: usize,
) -> Result<SearchOutcome, TunerError> {
    let device_gflops = space.device_feature().then_some(device.gflops);
    let ranked = search(surrogate, space, device_gflops, settings)?;
    let configs: Vec<Config> = ranked.iter().map(|(c, _)| c.clone()).collect();
    let measured = validate(backend, device, &configs, repeats)?;
    let topk: Vec<(Config, f64, Sample)> = ranked
        .into_iter()
        .zip(measured)
        .map(|((c, pred), (_, sample))| (c, pred, sample))
        .collect();

    let baseline_config = baseline.unwrap_or_else(|| space.midpoint_config());
    space.validate_config(&baseline_config)?;
    let baseline_sample = measure(backend, &baseline_config, device, repeats)?;

    let candidates = if space.size() <= settings.enum_cap {
        space.size() as usize
    } else {
        settings.n_candidates
    };
    Ok((topk, (baseline_config, baseline_sample), candidates))
}

/// End-to-end tuning pass over a fresh training run: search the space,
/// re-measure the top-k and the baseline, and render the report artifacts.
#[allow(clippy::too_many_arguments)]
pub fn tune(
    outcome: &TrainOutcome,
    space: &ParamSpace,
    backend: &dyn Backend,
    device: &DeviceSpec,
    settings: &SearchSettings,
    baseline: Option<Config>,
    repeats: usize,
    out_dir: &Path,
) -> Result<TuneReport, TunerError> {
    let (topk, baseline, candidates) = search_validate_baseline(
        &outcome.surrogate,
        space,
        backend,
        device,
        settings,
        baseline,
        repeats,
    )?;
    make_report(
        &ReportInputs {
            train_eval: Some(&outcome.train_eval),
            test_eval: Some(&outcome.test_eval),
            fallback_r2: (outcome.report.r2_train, outcome.report.r2_test),
            loss_history: &outcome.report.loss_history,
            topk: &topk,
            baseline: &baseline,
            search_candidates: candidates,
            per_device: &outcome.per_device,
        },
        out_dir,
    )
}

/// Tuning pass over a previously saved model: no split evaluations or loss
/// history are available, so the report reuses the scores stored with the
/// model and skips the scatter files.
#[allow(clippy::too_many_arguments)]
pub fn tune_pretrained(
    surrogate: &TrainedSurrogate,
    space: &ParamSpace,
    backend: &dyn Backend,
    device: &DeviceSpec,
    settings: &SearchSettings,
    baseline: Option<Config>,
    repeats: usize,
    out_dir: &Path,
) -> Result<TuneReport, TunerError> {
    let (topk, baseline, candidates) = search_validate_baseline(
        surrogate, space, backend, device, settings, baseline, repeats,
    )?;
    make_report(
        &ReportInputs {
            train_eval: None,
            test_eval: None,
            fallback_r2: (surrogate.r2_train, surrogate.r2_test),
            loss_history: &[],
            topk: &topk,
            baseline: &baseline,
            search_candidates: candidates,
            per_device: &[],
        },
        out_dir,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{collect, CollectPlan, CostModel, SyntheticBackend};
    use crate::space::ParamSpec;

    /// Two-stage space: 10 * 12 * 10 * 12 = 14400 configs.
    fn reduced_space() -> ParamSpace {
        ParamSpace::new(
            vec![
                ParamSpec::from_range("g1", 100, 1000, 100).unwrap(),
                ParamSpec::from_range("v1", 32, 384, 32).unwrap(),
                ParamSpec::from_range("g2", 100, 1000, 100).unwrap(),
                ParamSpec::from_range("v2", 32, 384, 32).unwrap(),
            ],
            false,
        )
        .unwrap()
    }

    fn p100() -> DeviceSpec {
        DeviceSpec {
            name: "p100".into(),
            gflops: 4700.0,
            base_scale: 0.8,
        }
    }

    fn backend() -> SyntheticBackend {
        SyntheticBackend {
            model: CostModel::default_for_stages(2),
        }
    }

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            max_epochs: 150,
            batch_size: 50,
            lr0: 0.003,
            seed,
            ..TrainConfig::default()
        }
    }

    fn collected(n: usize, seed: u64, include_device: bool) -> Dataset {
        let space = reduced_space();
        collect(
            &CollectPlan {
                space: &space,
                n,
                repeats: 1,
                seed,
                include_device,
            },
            &backend(),
            &p100(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_training_learns_the_surface() {
        let ds = collected(2_000, 1, false);
        let outcome = train_single(&ds, &quick_cfg(2)).unwrap();
        assert!(
            outcome.report.r2_test >= 0.95,
            "test R^2 {}",
            outcome.report.r2_test
        );
        assert_eq!(outcome.test_eval.actual.len(), 500);
        assert_eq!(outcome.train_eval.actual.len(), 1_500);
    }

    #[test]
    fn single_training_rejects_tiny_and_mixed() {
        let ds = collected(1, 3, false);
        assert!(matches!(
            train_single(&ds, &quick_cfg(0)),
            Err(TunerError::DatasetTooSmall(1))
        ));

        let mut mixed = Dataset::new(vec!["g1".into(), "v1".into()], true);
        for (i, g) in [(1u64, 513.0), (2, 7500.0)] {
            mixed
                .push(Sample {
                    config: Config::new(vec![100 * i, 32]),
                    device_gflops: Some(g),
                    runtime_s: 1.0,
                    repeats: 1,
                    dispersion_s: 0.0,
                })
                .unwrap();
        }
        assert!(matches!(
            train_single(&mixed, &quick_cfg(0)),
            Err(TunerError::MixedDevices(2))
        ));
    }

    #[test]
    fn combined_training_needs_two_devices() {
        let ds = collected(10, 4, false);
        assert!(matches!(
            train_combined(&[(p100(), ds)], &quick_cfg(0)),
            Err(TunerError::NeedTwoDevices(1))
        ));
    }

    #[test]
    fn search_equals_brute_force_on_enumerable_space() {
        let space = reduced_space();
        let ds = collected(400, 7, false);
        let outcome = train_single(&ds, &quick_cfg(5)).unwrap();
        let settings = SearchSettings {
            k: 10,
            ..Default::default()
        };
        let got = search(&outcome.surrogate, &space, None, &settings).unwrap();

        // independent brute-force ranking under the same model
        let all: Vec<Config> = space.enumerate(20_000).unwrap().collect();
        let mut x = Array2::zeros((all.len(), 4));
        for (i, c) in all.iter().enumerate() {
            for (j, &v) in c.values().iter().enumerate() {
                x[[i, j]] = v as f64;
            }
        }
        let preds = outcome.surrogate.predict(x.view()).unwrap();
        let mut ranked: Vec<(Config, f64)> = all.into_iter().zip(preds).collect();
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(10);
        assert_eq!(got, ranked);
    }

    #[test]
    fn search_rejects_wrong_feature_layout() {
        let ds = collected(100, 9, false);
        let outcome = train_single(&ds, &quick_cfg(1)).unwrap();
        let wide = ParamSpace::new(
            vec![
                ParamSpec::from_range("g1", 100, 1000, 100).unwrap(),
                ParamSpec::from_range("v1", 32, 384, 32).unwrap(),
                ParamSpec::from_range("g2", 100, 1000, 100).unwrap(),
                ParamSpec::from_range("v2", 32, 384, 32).unwrap(),
                ParamSpec::from_range("g3", 100, 1000, 100).unwrap(),
            ],
            false,
        )
        .unwrap();
        assert!(matches!(
            search(&outcome.surrogate, &wide, None, &SearchSettings::default()),
            Err(TunerError::FeatureLayout { .. })
        ));
    }

    #[test]
    fn validate_on_noiseless_backend_equals_direct_cost() {
        let configs = vec![
            Config::new(vec![300, 96, 300, 96]),
            Config::new(vec![100, 384, 1000, 32]),
        ];
        let results = validate(&backend(), &p100(), &configs, 3).unwrap();
        for (config, sample) in &results {
            let direct =
                crate::harness::synthetic_cost(config, &p100(), &backend().model).unwrap();
            assert_eq!(sample.runtime_s, direct);
            assert_eq!(sample.dispersion_s, 0.0);
        }
        // ordering by measured time finds the true optimum first
        let best = results
            .iter()
            .min_by(|a, b| a.1.runtime_s.total_cmp(&b.1.runtime_s))
            .unwrap();
        assert_eq!(best.0.values(), &[300, 96, 300, 96]);
    }

    #[test]
    fn report_is_self_consistent() {
        let space = reduced_space();
        let ds = collected(400, 11, false);
        let outcome = train_single(&ds, &quick_cfg(13)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = tune(
            &outcome,
            &space,
            &backend(),
            &p100(),
            &SearchSettings {
                k: 5,
                ..Default::default()
            },
            None,
            1,
            dir.path(),
        )
        .unwrap();

        // reported R^2 equals r2 over the scatter rows
        let again = r2(&outcome.test_eval.actual, &outcome.test_eval.predicted)
            .unwrap()
            .value;
        assert!((report.r2_test - again).abs() <= 1e-12);
        assert_eq!(report.best_predicted.len(), 5);
        assert!(report.speedup > 0.0);
        assert_eq!(report.search_candidates, 14_400);
        for name in [
            "report.json",
            "scatter_train.csv",
            "scatter_test.csv",
            "loss.csv",
            "topk.csv",
        ] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        // baseline defaults to the per-parameter midpoint
        assert_eq!(report.baseline_config, vec![600, 224, 600, 224]);
    }

    #[test]
    fn speedup_is_one_when_baseline_equals_discovered_best() {
        let space = reduced_space();
        let ds = collected(400, 15, false);
        let outcome = train_single(&ds, &quick_cfg(17)).unwrap();
        let settings = SearchSettings {
            k: 3,
            ..Default::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let first = tune(&outcome, &space, &backend(), &p100(), &settings, None, 1, dir.path())
            .unwrap();
        let best = first
            .best_predicted
            .iter()
            .min_by(|a, b| a.measured_s.total_cmp(&b.measured_s))
            .unwrap()
            .config
            .clone();
        // rerun with the discovered best as the baseline: the noiseless
        // backend measures it identically, so the speedup is exactly 1
        let second = tune(
            &outcome,
            &space,
            &backend(),
            &p100(),
            &settings,
            Some(Config::new(best)),
            1,
            dir.path(),
        )
        .unwrap();
        assert_eq!(second.speedup, 1.0);
    }
}
