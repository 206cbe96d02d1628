//! The five subcommands: thin orchestration over the library that turns
//! grids of (noise level, seed) cells into CSV tables plus one manifest.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use ndarray::{s, Axis};
use serde::Serialize;

use graphsig::bias_variance::mc_bias_variance;
use graphsig::classify::{evaluate, sweep, train, write_sweep_csv, Split, SweepParam, TrainConfig};
use graphsig::datasets::{gen_sbm, load_dataset, save_dataset, SbmSpec};
use graphsig::denoise::{denoise_report, inject_edge_noise, inject_feature_noise, NoiseSpec};
use graphsig::filters::{DenoiseConfig, Kernel};
use graphsig::graph::{normalized_ops, smooth_eigenvector};
use graphsig::stats::mean_std;
use graphsig::{Error, FeatureMatrix, Graph, Result};

use crate::args::{
    parse_sbm_spec, parse_seeds, BiasVarianceArgs, ClassifyArgs, DenoiseArgs, GenSbmArgs,
    SourceArgs, SweepArgs,
};
use crate::manifest::RunManifest;

/// One grid cell that could not run; the command keeps going and reports
/// these at exit.
#[derive(Debug, Serialize)]
pub struct CellFailure {
    pub cell: String,
    pub error: String,
}

impl CellFailure {
    fn new(cell: String, e: Error) -> Self {
        CellFailure {
            cell,
            error: e.to_string(),
        }
    }
}

enum DataSource {
    Loaded(Box<(graphsig::classify::LabeledDataset, Option<FeatureMatrix>)>),
    Sbm(SbmSpec),
}

impl DataSource {
    /// Data for one run seed: generated sources re-sample the graph per
    /// seed, loaded ones hand out the same dataset every time.
    fn for_seed(&self, seed: u64) -> Result<(graphsig::classify::LabeledDataset, Option<FeatureMatrix>)> {
        match self {
            DataSource::Loaded(boxed) => Ok(boxed.as_ref().clone()),
            DataSource::Sbm(spec) => {
                let mut spec = spec.clone();
                spec.seed = seed;
                let (ds, gt) = gen_sbm(&spec)?;
                Ok((ds, Some(gt)))
            }
        }
    }

    /// One fixed dataset, with generated sources using the seed baked
    /// into their spec.
    fn fixed(&self) -> Result<(graphsig::classify::LabeledDataset, Option<FeatureMatrix>)> {
        match self {
            DataSource::Loaded(boxed) => Ok(boxed.as_ref().clone()),
            DataSource::Sbm(spec) => {
                let (ds, gt) = gen_sbm(spec)?;
                Ok((ds, Some(gt)))
            }
        }
    }
}

fn resolve_source(src: &SourceArgs) -> Result<Option<DataSource>> {
    match (&src.dataset, &src.sbm) {
        (Some(dir), None) => Ok(Some(DataSource::Loaded(Box::new(load_dataset(dir)?)))),
        (None, Some(spec)) => Ok(Some(DataSource::Sbm(parse_sbm_spec(spec)?))),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(Error::InvalidConfig(
            "--dataset and --sbm are mutually exclusive".into(),
        )),
    }
}

fn required_source(src: &SourceArgs) -> Result<DataSource> {
    resolve_source(src)?
        .ok_or_else(|| Error::InvalidConfig("one of --dataset and --sbm is required".into()))
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(dir: &Path, name: &str, bytes: &[u8], manifest: &mut RunManifest) -> Result<()> {
    write_atomic(&dir.join(name), bytes)?;
    manifest.record(name);
    Ok(())
}

fn config_echo<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn denoise_cfg(alpha: f64, k: usize, beta: Option<f64>) -> DenoiseConfig {
    let cfg = DenoiseConfig::new(alpha, k);
    match beta {
        Some(b) => cfg.with_beta(b),
        None => cfg,
    }
}

struct DenoiseRow {
    sigma: f64,
    seed: u64,
    mean_noise_before: f64,
    mean_noise_after: f64,
    tv_before: f64,
    tv_after: f64,
}

pub fn cmd_denoise(args: &DenoiseArgs) -> Result<Vec<CellFailure>> {
    let started = Instant::now();
    let kernel: Kernel = args.kernel.parse()?;
    let dcfg = denoise_cfg(args.alpha, args.k, args.beta);
    let seeds = parse_seeds(&args.seeds)?;
    let source = required_source(&args.source)?;
    let out = args.out.out.as_path();
    fs::create_dir_all(out)?;

    let mut manifest = RunManifest::new("denoise", config_echo(args), seeds.clone());
    let mut failures = Vec::new();
    let mut rows: Vec<DenoiseRow> = Vec::new();

    for &sigma in &args.sigma {
        for &seed in &seeds {
            let report = (|| {
                let (ds, gt) = source.for_seed(seed)?;
                let ops = normalized_ops(&ds.graph)?;
                let clean = gt.unwrap_or_else(|| ds.features.clone());
                // Nothing to remove at sigma = 0: the features pass through
                // untouched and both noise columns are zero.
                let (noisy, output) = if sigma == 0.0 {
                    (clean.clone(), clean.clone())
                } else {
                    let noisy = inject_feature_noise(&clean, &NoiseSpec::features(sigma, seed))?;
                    let prepared = kernel.prepare(&ds.graph, &ops, &noisy, &dcfg)?;
                    let output = prepared.apply(&noisy)?;
                    (noisy, output)
                };
                denoise_report(&ops, &output, &clean, &noisy)
            })();
            match report {
                Ok(report) => {
                    let name = format!("denoise_{kernel}_sigma{sigma}_seed{seed}.csv");
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    emit(out, &name, &buf, &mut manifest)?;
                    rows.push(DenoiseRow {
                        sigma,
                        seed,
                        mean_noise_before: report.mean_noise_before,
                        mean_noise_after: report.mean_noise_after,
                        tv_before: report.tv_before,
                        tv_after: report.tv_after,
                    });
                }
                Err(e) => failures.push(CellFailure::new(format!("sigma={sigma} seed={seed}"), e)),
            }
        }
    }

    let mut csv = Vec::new();
    writeln!(
        csv,
        "kernel,sigma,seed,mean_noise_before,mean_noise_after,tv_before,tv_after"
    )?;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            kernel, r.sigma, r.seed, r.mean_noise_before, r.mean_noise_after, r.tv_before, r.tv_after
        )?;
    }
    emit(out, "summary.csv", &csv, &mut manifest)?;

    let mut cells = Vec::new();
    for &sigma in &args.sigma {
        let group: Vec<&DenoiseRow> = rows.iter().filter(|r| r.sigma == sigma).collect();
        if group.is_empty() {
            continue;
        }
        let avg = |f: fn(&DenoiseRow) -> f64| {
            group.iter().map(|r| f(r)).sum::<f64>() / group.len() as f64
        };
        cells.push(serde_json::json!({
            "sigma": sigma,
            "n_seeds": group.len(),
            "mean_noise_before": avg(|r| r.mean_noise_before),
            "mean_noise_after": avg(|r| r.mean_noise_after),
            "tv_before": avg(|r| r.tv_before),
            "tv_after": avg(|r| r.tv_after),
        }));
    }
    let summary = serde_json::json!({ "kernel": kernel.name(), "cells": cells });
    emit(
        out,
        "summary.json",
        serde_json::to_string_pretty(&summary)
            .expect("summary serializes")
            .as_bytes(),
        &mut manifest,
    )?;

    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(failures)
}

struct ClassifyRow {
    sigma: f64,
    ratio: f64,
    seed: u64,
    test_acc: f64,
    micro_f1: f64,
    beta: f64,
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Vec<CellFailure>> {
    let started = Instant::now();
    let kernel: Kernel = args.kernel.parse()?;
    let dcfg = denoise_cfg(args.alpha, args.k, args.beta);
    let seeds = parse_seeds(&args.seeds)?;
    let source = required_source(&args.source)?;
    let out = args.out.out.as_path();
    fs::create_dir_all(out)?;

    let mut manifest = RunManifest::new("classify", config_echo(args), seeds.clone());
    let mut failures = Vec::new();
    let mut rows: Vec<ClassifyRow> = Vec::new();

    for &sigma in &args.noise_sigma {
        for &ratio in &args.edge_ratio {
            for &seed in &seeds {
                let metrics = (|| {
                    let (mut ds, _) = source.for_seed(seed)?;
                    if sigma > 0.0 {
                        ds.features =
                            inject_feature_noise(&ds.features, &NoiseSpec::features(sigma, seed))?;
                    }
                    if ratio > 0.0 {
                        ds.graph = inject_edge_noise(
                            &ds.graph,
                            &NoiseSpec::edges(ratio, seed.wrapping_add(100)),
                        )?;
                    }
                    let mut cfg = TrainConfig::new(kernel, dcfg.clone()).with_seed(seed);
                    cfg.epochs = args.epochs;
                    if args.beta.is_some() {
                        cfg.beta_grid.clear();
                    }
                    let result = train(&ds, &cfg)?;
                    let (acc, f1) = evaluate(&ds, &result.params, &result.config, Split::Test)?;
                    Ok((acc, f1, result.config.denoise.beta))
                })();
                match metrics {
                    Ok((test_acc, micro_f1, beta)) => rows.push(ClassifyRow {
                        sigma,
                        ratio,
                        seed,
                        test_acc,
                        micro_f1,
                        beta,
                    }),
                    Err(e) => failures.push(CellFailure::new(
                        format!("sigma={sigma} r={ratio} seed={seed}"),
                        e,
                    )),
                }
            }
        }
    }

    let mut summary = Vec::new();
    writeln!(
        summary,
        "kernel,noise_sigma,edge_ratio,n_seeds,mean_acc,std_acc,mean_f1,std_f1"
    )?;
    for &sigma in &args.noise_sigma {
        for &ratio in &args.edge_ratio {
            let group: Vec<&ClassifyRow> = rows
                .iter()
                .filter(|r| r.sigma == sigma && r.ratio == ratio)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mut cell = Vec::new();
            writeln!(cell, "seed,test_acc,micro_f1,beta")?;
            for r in &group {
                writeln!(cell, "{},{},{},{}", r.seed, r.test_acc, r.micro_f1, r.beta)?;
            }
            let name = format!("classify_sigma{sigma}_r{ratio}.csv");
            emit(out, &name, &cell, &mut manifest)?;

            let accs: Vec<f64> = group.iter().map(|r| r.test_acc).collect();
            let f1s: Vec<f64> = group.iter().map(|r| r.micro_f1).collect();
            let (ma, sa) = mean_std(&accs);
            let (mf, sf) = mean_std(&f1s);
            writeln!(
                summary,
                "{},{},{},{},{},{},{},{}",
                kernel,
                sigma,
                ratio,
                group.len(),
                ma,
                sa,
                mf,
                sf
            )?;
        }
    }
    emit(out, "summary.csv", &summary, &mut manifest)?;

    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(failures)
}

pub fn cmd_bias_variance(args: &BiasVarianceArgs) -> Result<Vec<CellFailure>> {
    let started = Instant::now();
    let seeds = parse_seeds(&args.seeds)?;
    let out = args.out.out.as_path();
    fs::create_dir_all(out)?;

    // Without a data source the command runs on the two-node path, whose
    // closed-form variance column is the textbook reference value.
    let (ops, x_hat) = match resolve_source(&args.source)? {
        None => {
            let g = Graph::build(2, &[(0, 1, 1.0)])?;
            let ops = normalized_ops(&g)?;
            let x_hat = smooth_eigenvector(&g).insert_axis(Axis(1));
            (ops, x_hat)
        }
        Some(source) => {
            let (ds, gt) = source.fixed()?;
            let ops = normalized_ops(&ds.graph)?;
            let base = gt.unwrap_or(ds.features);
            (ops, base.slice(s![.., 0..1]).to_owned())
        }
    };

    let mut manifest = RunManifest::new("bias-variance", config_echo(args), seeds.clone());
    let mut failures = Vec::new();
    for &sigma in &args.sigma {
        for &seed in &seeds {
            match mc_bias_variance(
                &ops,
                &x_hat,
                sigma,
                &args.grid_alpha,
                args.k,
                args.samples,
                seed,
            ) {
                Ok(report) => {
                    let name = format!("bias_variance_sigma{sigma}_seed{seed}.csv");
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    emit(out, &name, &buf, &mut manifest)?;
                }
                Err(e) => failures.push(CellFailure::new(format!("sigma={sigma} seed={seed}"), e)),
            }
        }
    }

    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(failures)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<CellFailure>> {
    let started = Instant::now();
    let kernel: Kernel = args.kernel.parse()?;
    let dcfg = denoise_cfg(args.alpha, args.k, args.beta);
    let seeds = parse_seeds(&args.seeds)?;
    let source = required_source(&args.source)?;
    let out = args.out.out.as_path();
    fs::create_dir_all(out)?;

    let (param, grid) = match (&args.grid_alpha, &args.grid_k) {
        (Some(g), None) => (SweepParam::Alpha, g.clone()),
        (None, Some(g)) => (SweepParam::KOrder, g.clone()),
        _ => {
            return Err(Error::InvalidConfig(
                "exactly one of --grid-alpha and --grid-k is required".into(),
            ))
        }
    };

    let (ds, _) = source.fixed()?;
    let mut cfg = TrainConfig::new(kernel, dcfg);
    cfg.epochs = args.epochs;
    if args.beta.is_some() {
        cfg.beta_grid.clear();
    }
    let points = sweep(&ds, &cfg, param, &grid, &seeds)?;

    let mut manifest = RunManifest::new("sweep", config_echo(args), seeds);
    let mut buf = Vec::new();
    write_sweep_csv(&points, &mut buf)?;
    emit(out, "sweep.csv", &buf, &mut manifest)?;

    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(Vec::new())
}

pub fn cmd_gen_sbm(args: &GenSbmArgs) -> Result<Vec<CellFailure>> {
    let started = Instant::now();
    let spec = parse_sbm_spec(&args.sbm)?;
    let seeds = parse_seeds(&args.seeds)?;
    let out = args.out.out.as_path();
    fs::create_dir_all(out)?;

    let mut manifest = RunManifest::new("gen-sbm", config_echo(args), seeds.clone());
    let mut failures = Vec::new();
    for &seed in &seeds {
        let mut spec = spec.clone();
        spec.seed = seed;
        let name = format!("sbm_seed{seed}");
        let saved = gen_sbm(&spec)
            .and_then(|(ds, gt)| save_dataset(out.join(&name), &ds, Some(&gt)));
        match saved {
            Ok(_) => manifest.record(name),
            Err(e) => failures.push(CellFailure::new(format!("seed={seed}"), e)),
        }
    }

    manifest.duration_secs = started.elapsed().as_secs_f64();
    manifest.write(out)?;
    Ok(failures)
}
