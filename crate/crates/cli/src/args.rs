//! Argument structures shared by the subcommands, plus the little
//! parsers for seed lists and inline generator specs.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use graphsig::datasets::SbmSpec;
use graphsig::{Error, Result};

/// Where the graph and features come from.
#[derive(Debug, Args, Serialize)]
pub struct SourceArgs {
    /// Directory holding a saved dataset (graph.tsv, features.tsv,
    /// labels.tsv, masks.json, manifest.json).
    #[arg(long, conflicts_with = "sbm")]
    pub dataset: Option<PathBuf>,
    /// Inline generator spec: comma-separated key=value pairs with keys
    /// n, c, p_in, p_out, f, scale, sigma, train, val, test, seed.
    #[arg(long)]
    pub sbm: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "GRAPHSIG_OUT", default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DenoiseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// cheby | gcn | sgc | gsdn-f | gsdn-ef | gsdn-ef-sparse | i-plus-an | identity
    #[arg(long, default_value = "gsdn-f")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    /// Polynomial order.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Fixed edge-correction weight for the gsdn-ef kernels.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated feature-noise levels.
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub sigma: Vec<f64>,
    /// Comma-separated seeds; ranges like 0..20 also work.
    #[arg(long, visible_alias = "seed", default_value = "0")]
    pub seeds: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// cheby | gcn | sgc | gsdn-f | gsdn-ef | gsdn-ef-sparse | i-plus-an | identity
    #[arg(long, default_value = "gsdn-f")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    /// Polynomial order.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Fixed edge-correction weight; omits the validation grid.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Feature-noise levels added before training.
    #[arg(long = "noise-sigma", visible_alias = "sigma", value_delimiter = ',', default_value = "0")]
    pub noise_sigma: Vec<f64>,
    /// Edge-noise ratios (operations per existing edge) applied before training.
    #[arg(long = "edge-ratio", value_delimiter = ',', default_value = "0")]
    pub edge_ratio: Vec<f64>,
    #[arg(long, visible_alias = "seed", default_value = "0")]
    pub seeds: String,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BiasVarianceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Noise standard deviations, one table per value.
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub sigma: Vec<f64>,
    /// Smoothing weights for the trade-off rows.
    #[arg(long = "grid-alpha", value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub grid_alpha: Vec<f64>,
    /// Polynomial order of the sampled kernel.
    #[arg(long, default_value_t = 60)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, visible_alias = "seed", default_value = "0")]
    pub seeds: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// cheby | gcn | sgc | gsdn-f | gsdn-ef | gsdn-ef-sparse | i-plus-an | identity
    #[arg(long, default_value = "gsdn-f")]
    pub kernel: String,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    /// Polynomial order.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Fixed edge-correction weight; omits the validation grid.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Alpha values to sweep; mutually exclusive with --grid-k.
    #[arg(long = "grid-alpha", value_delimiter = ',', conflicts_with = "grid_k")]
    pub grid_alpha: Option<Vec<f64>>,
    /// K values to sweep.
    #[arg(long = "grid-k", value_delimiter = ',')]
    pub grid_k: Option<Vec<f64>>,
    /// Training seeds; the library wants at least three.
    #[arg(long, default_value = "0,1,2")]
    pub seeds: String,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct GenSbmArgs {
    /// Inline generator spec, see --sbm on the other subcommands.
    #[arg(long)]
    pub sbm: String,
    /// One dataset directory per seed.
    #[arg(long, visible_alias = "seed", default_value = "0")]
    pub seeds: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutArgs,
}

/// Expands "0..20,31,40..42" into explicit seeds; ranges are half-open.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = num("seed range start", lo)?;
            let hi: u64 = num("seed range end", hi)?;
            if hi <= lo {
                return Err(Error::InvalidConfig(format!(
                    "empty seed range {lo}..{hi}"
                )));
            }
            seeds.extend(lo..hi);
        } else {
            seeds.push(num("seed", part)?);
        }
    }
    Ok(seeds)
}

/// Builds an SbmSpec from "n=150,c=3,p_in=0.2,p_out=0.02,...". The four
/// shape keys are required, the rest keep the generator defaults.
pub fn parse_sbm_spec(s: &str) -> Result<SbmSpec> {
    let mut n = None;
    let mut c = None;
    let mut p_in = None;
    let mut p_out = None;
    let mut rest: Vec<(String, String)> = Vec::new();
    for part in s.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("sbm spec entry {part:?} is not key=value"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => n = Some(num("n", value)?),
            "c" => c = Some(num("c", value)?),
            "p_in" => p_in = Some(num("p_in", value)?),
            "p_out" => p_out = Some(num("p_out", value)?),
            _ => rest.push((key.to_string(), value.to_string())),
        }
    }
    let missing = |what: &str| Error::InvalidConfig(format!("sbm spec is missing {what}"));
    let mut spec = SbmSpec::new(
        n.ok_or_else(|| missing("n"))?,
        c.ok_or_else(|| missing("c"))?,
        p_in.ok_or_else(|| missing("p_in"))?,
        p_out.ok_or_else(|| missing("p_out"))?,
    );
    for (key, value) in rest {
        match key.as_str() {
            "f" => spec.feature_dim = num("f", &value)?,
            "scale" => spec.community_mean_scale = num("scale", &value)?,
            "sigma" => spec.feature_noise_sigma = num("sigma", &value)?,
            "train" => spec.n_train = num("train", &value)?,
            "val" => spec.n_val = num("val", &value)?,
            "test" => spec.n_test = num("test", &value)?,
            "seed" => spec.seed = num("seed", &value)?,
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sbm spec key {key:?}"
                )))
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn num<T: std::str::FromStr>(what: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad {what} value {value:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_expand_ranges() {
        assert_eq!(parse_seeds("5").unwrap(), vec![5]);
        assert_eq!(parse_seeds("0..3,7").unwrap(), vec![0, 1, 2, 7]);
        assert_eq!(parse_seeds("1, 2").unwrap(), vec![1, 2]);
        assert!(parse_seeds("3..3").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("").is_err());
    }

    #[test]
    fn sbm_specs_fill_defaults() {
        let spec = parse_sbm_spec("n=60,c=3,p_in=0.4,p_out=0.04").unwrap();
        assert_eq!(spec.n_nodes, 60);
        assert_eq!(spec.feature_dim, 16);
        assert_eq!(spec.n_train, 15);
        assert_eq!(spec.seed, 0);

        let spec =
            parse_sbm_spec("n=60,c=3,p_in=0.4,p_out=0.04,f=8,sigma=0.5,train=9,seed=4").unwrap();
        assert_eq!(spec.feature_dim, 8);
        assert_eq!(spec.feature_noise_sigma, 0.5);
        assert_eq!(spec.n_train, 9);
        assert_eq!(spec.seed, 4);
    }

    #[test]
    fn sbm_specs_reject_junk() {
        assert!(parse_sbm_spec("c=3,p_in=0.4,p_out=0.04").is_err());
        assert!(parse_sbm_spec("n=60,c=3,p_in=0.4,p_out=0.04,zzz=1").is_err());
        assert!(parse_sbm_spec("n=60 c=3").is_err());
        assert!(parse_sbm_spec("n=60,c=3,p_in=0.04,p_out=0.4").is_err());
    }
}
