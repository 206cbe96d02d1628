//! Semi-supervised node classification: a fixed kernel propagation per
//! layer with trained dense heads, manual backpropagation (checkable by
//! finite differences), and parameter sweeps.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::filters::{DenoiseConfig, Kernel, PreparedKernel};
use crate::graph::{normalized_ops, FeatureMatrix, Graph};
use crate::stats::mean_std;
use crate::{Error, Result};

/// Default beta candidates for the edge-denoising kernels.
pub const DEFAULT_BETA_GRID: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0];

/// A graph with node features, integer labels, and disjoint split masks.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    pub train_mask: Vec<usize>,
    pub val_mask: Vec<usize>,
    pub test_mask: Vec<usize>,
}

impl LabeledDataset {
    /// Checks shapes, label ranges, mask disjointness, and that every
    /// class appears in the training mask.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.node_count();
        if self.features.nrows() != n {
            return Err(Error::DimensionMismatch {
                context: "dataset features",
                expected: format!("{n} rows"),
                got: format!("{} rows", self.features.nrows()),
            });
        }
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch {
                context: "dataset labels",
                expected: format!("{n} labels"),
                got: format!("{}", self.labels.len()),
            });
        }
        if let Some(&bad) = self.labels.iter().find(|&&c| c >= self.n_classes) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} out of range for {} classes",
                self.n_classes
            )));
        }
        let mut seen = vec![false; n];
        for (mask, name) in [
            (&self.train_mask, "train"),
            (&self.val_mask, "val"),
            (&self.test_mask, "test"),
        ] {
            for &i in mask.iter() {
                if i >= n {
                    return Err(Error::NodeOutOfRange { node: i, n });
                }
                if seen[i] {
                    return Err(Error::InvalidConfig(format!(
                        "node {i} appears in two masks (second: {name})"
                    )));
                }
                seen[i] = true;
            }
        }
        if self.train_mask.is_empty() {
            return Err(Error::EmptyMask("train"));
        }
        for class in 0..self.n_classes {
            if !self.train_mask.iter().any(|&i| self.labels[i] == class) {
                return Err(Error::EmptyTrainClass { class });
            }
        }
        Ok(())
    }
}

/// Which split mask to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn mask<'a>(&self, ds: &'a LabeledDataset) -> &'a [usize] {
        match self {
            Split::Train => &ds.train_mask,
            Split::Val => &ds.val_mask,
            Split::Test => &ds.test_mask,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Training hyperparameters around a chosen kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2_weight: f64,
    pub hidden_units: usize,
    pub layers: usize,
    pub epochs: usize,
    pub kernel: Kernel,
    pub denoise: DenoiseConfig,
    pub seed: u64,
    /// Validation-selected beta candidates; used by the edge-denoising
    /// kernels only.
    pub beta_grid: Vec<f64>,
}

impl TrainConfig {
    pub fn new(kernel: Kernel, denoise: DenoiseConfig) -> Self {
        TrainConfig {
            learning_rate: 0.02,
            l2_weight: 5e-4,
            hidden_units: 16,
            layers: 2,
            epochs: 200,
            kernel,
            denoise,
            seed: 0,
            beta_grid: DEFAULT_BETA_GRID.to_vec(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.l2_weight < 0.0 || !self.l2_weight.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "l2_weight must be >= 0, got {}",
                self.l2_weight
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.layers != 1 && self.layers != 2 {
            return Err(Error::InvalidConfig(format!(
                "layers must be 1 or 2, got {}",
                self.layers
            )));
        }
        if self.layers == 2 && self.hidden_units == 0 {
            return Err(Error::InvalidConfig("hidden_units must be >= 1".into()));
        }
        Ok(())
    }

    fn uses_beta_grid(&self) -> bool {
        matches!(self.kernel, Kernel::GsdnEf | Kernel::GsdnEfSparse) && !self.beta_grid.is_empty()
    }
}

/// Dense head weights; biases are deliberately absent.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    /// First layer (features x hidden); None for 1-layer models.
    pub w1: Option<Array2<f64>>,
    /// Output layer (hidden-or-features x classes).
    pub w2: Array2<f64>,
}

/// One training-epoch snapshot, taken before the weight update.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

/// CSV rows `epoch,train_loss,train_acc,val_acc`.
pub fn write_metrics_csv<W: std::io::Write>(rows: &[MetricsRow], mut w: W) -> Result<()> {
    writeln!(w, "epoch,train_loss,train_acc,val_acc")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.epoch, r.train_loss, r.train_acc, r.val_acc)?;
    }
    Ok(())
}

/// Trained parameters plus the config actually used (the edge-denoising
/// kernels bake the validation-selected beta back into `config`).
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub params: ClassifierParams,
    pub history: Vec<MetricsRow>,
    pub config: TrainConfig,
}

fn glorot(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Array2<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-limit..limit))
}

fn init_params(cfg: &TrainConfig, n_features: usize, n_classes: usize) -> ClassifierParams {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.layers == 2 {
        let w1 = glorot(&mut rng, n_features, cfg.hidden_units);
        let w2 = glorot(&mut rng, cfg.hidden_units, n_classes);
        ClassifierParams { w1: Some(w1), w2 }
    } else {
        ClassifierParams {
            w1: None,
            w2: glorot(&mut rng, n_features, n_classes),
        }
    }
}

struct Forward {
    logits: Array2<f64>,
    /// Pre-activation of the hidden layer (2-layer only).
    z1: Option<Array2<f64>>,
    /// Kernel-propagated relu(z1) (2-layer only).
    ph1: Option<Array2<f64>>,
}

fn forward(
    px: &FeatureMatrix,
    prepared: &PreparedKernel,
    params: &ClassifierParams,
) -> Result<Forward> {
    match &params.w1 {
        Some(w1) => {
            let z1 = px.dot(w1);
            let h1 = z1.mapv(|v| v.max(0.0));
            let ph1 = prepared.apply(&h1)?;
            let logits = ph1.dot(&params.w2);
            Ok(Forward {
                logits,
                z1: Some(z1),
                ph1: Some(ph1),
            })
        }
        None => Ok(Forward {
            logits: px.dot(&params.w2),
            z1: None,
            ph1: None,
        }),
    }
}

/// Row-wise softmax probabilities, numerically shifted by the row max.
fn softmax_row(logits: &Array2<f64>, i: usize) -> Vec<f64> {
    let row = logits.row(i);
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|&v| (v - max).exp()).collect();
    let denom: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / denom).collect()
}

fn cross_entropy(logits: &Array2<f64>, ds: &LabeledDataset, mask: &[usize]) -> f64 {
    let mut loss = 0.0;
    for &i in mask {
        let p = softmax_row(logits, i);
        loss -= p[ds.labels[i]].max(f64::MIN_POSITIVE).ln();
    }
    loss / mask.len() as f64
}

fn sq_norm(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

fn loss_value(
    px: &FeatureMatrix,
    prepared: &PreparedKernel,
    ds: &LabeledDataset,
    cfg: &TrainConfig,
    params: &ClassifierParams,
) -> Result<f64> {
    let fwd = forward(px, prepared, params)?;
    let l2 = params.w1.as_ref().map_or(0.0, sq_norm) + sq_norm(&params.w2);
    Ok(cross_entropy(&fwd.logits, ds, &ds.train_mask) + cfg.l2_weight * l2)
}

struct Grads {
    w1: Option<Array2<f64>>,
    w2: Array2<f64>,
}

fn loss_and_grads(
    px: &FeatureMatrix,
    prepared: &PreparedKernel,
    ds: &LabeledDataset,
    cfg: &TrainConfig,
    params: &ClassifierParams,
) -> Result<(f64, Grads, Forward)> {
    let fwd = forward(px, prepared, params)?;
    let l2 = params.w1.as_ref().map_or(0.0, sq_norm) + sq_norm(&params.w2);
    let loss = cross_entropy(&fwd.logits, ds, &ds.train_mask) + cfg.l2_weight * l2;

    let n = ds.graph.node_count();
    let c = ds.n_classes;
    let scale = 1.0 / ds.train_mask.len() as f64;
    let mut dlogits = Array2::<f64>::zeros((n, c));
    for &i in &ds.train_mask {
        let p = softmax_row(&fwd.logits, i);
        for k in 0..c {
            dlogits[(i, k)] = p[k] * scale;
        }
        dlogits[(i, ds.labels[i])] -= scale;
    }

    let grads = match &params.w1 {
        Some(w1) => {
            let ph1 = fwd.ph1.as_ref().expect("2-layer forward state");
            let z1 = fwd.z1.as_ref().expect("2-layer forward state");
            let mut dw2 = ph1.t().dot(&dlogits);
            dw2.scaled_add(2.0 * cfg.l2_weight, &params.w2);
            // The kernel is symmetric, so its adjoint is itself.
            let dph1 = dlogits.dot(&params.w2.t());
            let dh1 = prepared.apply(&dph1)?;
            let mut dz1 = dh1;
            dz1.zip_mut_with(z1, |g, &z| {
                if z <= 0.0 {
                    *g = 0.0;
                }
            });
            let mut dw1 = px.t().dot(&dz1);
            dw1.scaled_add(2.0 * cfg.l2_weight, w1);
            Grads {
                w1: Some(dw1),
                w2: dw2,
            }
        }
        None => {
            let mut dw2 = px.t().dot(&dlogits);
            dw2.scaled_add(2.0 * cfg.l2_weight, &params.w2);
            Grads { w1: None, w2: dw2 }
        }
    };
    Ok((loss, grads, fwd))
}

fn argmax_row(logits: &Array2<f64>, i: usize) -> usize {
    let row = logits.row(i);
    let mut best = 0;
    for k in 1..row.len() {
        if row[k] > row[best] {
            best = k;
        }
    }
    best
}

fn accuracy_on(logits: &Array2<f64>, ds: &LabeledDataset, mask: &[usize]) -> f64 {
    if mask.is_empty() {
        return f64::NAN;
    }
    let correct = mask
        .iter()
        .filter(|&&i| argmax_row(logits, i) == ds.labels[i])
        .count();
    correct as f64 / mask.len() as f64
}

fn train_single(
    ds: &LabeledDataset,
    cfg: &TrainConfig,
    prepared: &PreparedKernel,
) -> Result<(ClassifierParams, Vec<MetricsRow>)> {
    let px = prepared.apply(&ds.features)?;
    let mut params = init_params(cfg, ds.features.ncols(), ds.n_classes);
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let (loss, grads, fwd) = loss_and_grads(&px, prepared, ds, cfg, &params)?;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(MetricsRow {
            epoch,
            train_loss: loss,
            train_acc: accuracy_on(&fwd.logits, ds, &ds.train_mask),
            val_acc: accuracy_on(&fwd.logits, ds, &ds.val_mask),
        });
        if let (Some(w1), Some(dw1)) = (params.w1.as_mut(), grads.w1.as_ref()) {
            w1.scaled_add(-cfg.learning_rate, dw1);
        }
        params.w2.scaled_add(-cfg.learning_rate, &grads.w2);
    }
    Ok((params, history))
}

/// Full-batch gradient-descent training. The kernel propagation is
/// precomputed where possible; the edge-denoising kernels run an outer
/// validation grid over beta and the winning beta is baked into the
/// returned config.
pub fn train(ds: &LabeledDataset, cfg: &TrainConfig) -> Result<TrainResult> {
    ds.validate()?;
    cfg.validate()?;
    let ops = normalized_ops(&ds.graph)?;

    let betas: Vec<f64> = if cfg.uses_beta_grid() {
        if ds.val_mask.is_empty() {
            return Err(Error::EmptyMask("val (needed for the beta grid)"));
        }
        cfg.beta_grid.clone()
    } else {
        vec![cfg.denoise.beta]
    };

    let mut best: Option<(f64, TrainResult)> = None;
    for beta in betas {
        let mut run_cfg = cfg.clone();
        run_cfg.denoise.beta = beta;
        let prepared = run_cfg
            .kernel
            .prepare(&ds.graph, &ops, &ds.features, &run_cfg.denoise)?;
        let (params, history) = train_single(ds, &run_cfg, &prepared)?;
        let score = if ds.val_mask.is_empty() {
            0.0
        } else {
            let fwd = forward(&prepared.apply(&ds.features)?, &prepared, &params)?;
            accuracy_on(&fwd.logits, ds, &ds.val_mask)
        };
        let result = TrainResult {
            params,
            history,
            config: run_cfg,
        };
        match &best {
            Some((s, _)) if *s >= score => {}
            _ => best = Some((score, result)),
        }
    }
    Ok(best.expect("at least one beta candidate").1)
}

/// Logits for every node under a trained model.
pub fn predict(
    ds: &LabeledDataset,
    params: &ClassifierParams,
    cfg: &TrainConfig,
) -> Result<Array2<f64>> {
    let ops = normalized_ops(&ds.graph)?;
    let prepared = cfg
        .kernel
        .prepare(&ds.graph, &ops, &ds.features, &cfg.denoise)?;
    let px = prepared.apply(&ds.features)?;
    Ok(forward(&px, &prepared, params)?.logits)
}

/// Accuracy and micro-averaged F1 over a split. For single-label
/// multi-class prediction micro-F1 equals accuracy; both are computed
/// independently so the identity is observable, not assumed.
pub fn evaluate(
    ds: &LabeledDataset,
    params: &ClassifierParams,
    cfg: &TrainConfig,
    split: Split,
) -> Result<(f64, f64)> {
    let mask = split.mask(ds);
    if mask.is_empty() {
        return Err(Error::EmptyMask(split.name()));
    }
    let logits = predict(ds, params, cfg)?;
    let acc = accuracy_on(&logits, ds, mask);

    let c = ds.n_classes;
    let mut tp = vec![0usize; c];
    let mut fp = vec![0usize; c];
    let mut fnk = vec![0usize; c];
    for &i in mask {
        let pred = argmax_row(&logits, i);
        let truth = ds.labels[i];
        if pred == truth {
            tp[pred] += 1;
        } else {
            fp[pred] += 1;
            fnk[truth] += 1;
        }
    }
    let tp_sum: usize = tp.iter().sum();
    let fp_sum: usize = fp.iter().sum();
    let fn_sum: usize = fnk.iter().sum();
    let precision = tp_sum as f64 / (tp_sum + fp_sum).max(1) as f64;
    let recall = tp_sum as f64 / (tp_sum + fn_sum).max(1) as f64;
    let micro_f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok((acc, micro_f1))
}

/// Central finite-difference probe of the analytic gradient; returns the
/// maximum relative error over `n_probes` randomly chosen weight entries.
/// Hidden-layer probes whose column has near-zero pre-activations are
/// resampled to stay away from relu kinks.
pub fn gradient_check(
    ds: &LabeledDataset,
    cfg: &TrainConfig,
    params: &ClassifierParams,
    n_probes: usize,
) -> Result<f64> {
    if n_probes < 10 {
        return Err(Error::InvalidConfig(format!(
            "need >= 10 probes, got {n_probes}"
        )));
    }
    ds.validate()?;
    cfg.validate()?;
    let ops = normalized_ops(&ds.graph)?;
    let prepared = cfg
        .kernel
        .prepare(&ds.graph, &ops, &ds.features, &cfg.denoise)?;
    let px = prepared.apply(&ds.features)?;
    let (_, grads, fwd) = loss_and_grads(&px, &prepared, ds, cfg, params)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9d5));
    let mut max_rel: f64 = 0.0;
    let mut checked = 0;
    let mut work = params.clone();
    while checked < n_probes {
        // Choose a matrix: W1 probes must avoid relu kinks, W2 is always
        // smooth in the loss.
        let probe_w1 = work.w1.is_some() && rng.random_bool(0.5);
        let (r, c, analytic) = if probe_w1 {
            let w1 = work.w1.as_ref().expect("probe_w1 checked");
            let z1 = fwd.z1.as_ref().expect("2-layer forward state");
            let mut found = None;
            for _ in 0..50 {
                let r = rng.random_range(0..w1.nrows());
                let c = rng.random_range(0..w1.ncols());
                let safe = (0..z1.nrows())
                    .all(|i| z1[(i, c)].abs() > 1e-3 || px[(i, r)].abs() < 1e-12);
                if safe {
                    found = Some((r, c));
                    break;
                }
            }
            match found {
                Some((r, c)) => (r, c, grads.w1.as_ref().expect("2-layer grads")[(r, c)]),
                None => continue,
            }
        } else {
            let r = rng.random_range(0..work.w2.nrows());
            let c = rng.random_range(0..work.w2.ncols());
            (r, c, grads.w2[(r, c)])
        };

        let read = |p: &ClassifierParams| {
            if probe_w1 {
                p.w1.as_ref().expect("probe_w1 checked")[(r, c)]
            } else {
                p.w2[(r, c)]
            }
        };
        let write = |p: &mut ClassifierParams, v: f64| {
            if probe_w1 {
                p.w1.as_mut().expect("probe_w1 checked")[(r, c)] = v;
            } else {
                p.w2[(r, c)] = v;
            }
        };

        let w0 = read(&work);
        let h = 1e-5 * w0.abs().max(1.0);
        write(&mut work, w0 + h);
        let up = loss_value(&px, &prepared, ds, cfg, &work)?;
        write(&mut work, w0 - h);
        let down = loss_value(&px, &prepared, ds, cfg, &work)?;
        write(&mut work, w0);
        let fd = (up - down) / (2.0 * h);
        let rel = (fd - analytic).abs() / fd.abs().max(analytic.abs()).max(1e-4);
        max_rel = max_rel.max(rel);
        checked += 1;
    }
    Ok(max_rel)
}

/// Which hyperparameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Alpha,
    KOrder,
}

/// One sweep grid point: test accuracy aggregated over training seeds.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_acc: f64,
    pub std_acc: f64,
    pub per_seed: Vec<f64>,
}

/// Trains at every grid value for every seed and aggregates test accuracy.
pub fn sweep(
    ds: &LabeledDataset,
    base_cfg: &TrainConfig,
    param: SweepParam,
    grid: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepPoint>> {
    if grid.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "sweep needs >= 2 grid points, got {}",
            grid.len()
        )));
    }
    if seeds.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "sweep needs >= 3 seeds, got {}",
            seeds.len()
        )));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut per_seed = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let mut cfg = base_cfg.clone();
            cfg.seed = seed;
            match param {
                SweepParam::Alpha => cfg.denoise.alpha = value,
                SweepParam::KOrder => {
                    if value < 0.0 || value.fract() != 0.0 {
                        return Err(Error::InvalidConfig(format!(
                            "k grid values must be non-negative integers, got {value}"
                        )));
                    }
                    cfg.denoise.k_order = value as usize;
                }
            }
            let result = train(ds, &cfg)?;
            let (acc, _) = evaluate(ds, &result.params, &result.config, Split::Test)?;
            per_seed.push(acc);
        }
        let (mean_acc, std_acc) = mean_std(&per_seed);
        points.push(SweepPoint {
            value,
            mean_acc,
            std_acc,
            per_seed,
        });
    }
    Ok(points)
}

/// CSV rows `param,mean_acc,std_acc`.
pub fn write_sweep_csv<W: std::io::Write>(points: &[SweepPoint], mut w: W) -> Result<()> {
    writeln!(w, "param,mean_acc,std_acc")?;
    for p in points {
        writeln!(w, "{},{},{}", p.value, p.mean_acc, p.std_acc)?;
    }
    Ok(())
}
