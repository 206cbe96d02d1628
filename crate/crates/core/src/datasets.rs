//! Dataset construction: stochastic block models with planted smooth
//! features, a citation-style raw-file loader, and a directory format
//! with checksummed manifests.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::LabeledDataset;
use crate::graph::{FeatureMatrix, Graph};
use crate::{Error, Result};

const RETRY_CAP: usize = 20;
const SEED_STRIDE: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stochastic block model with planted per-community feature means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub n_nodes: usize,
    pub n_communities: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub feature_dim: usize,
    /// Scale of the orthogonal community mean vectors.
    pub community_mean_scale: f64,
    /// Standard deviation of the Gaussian noise on observed features.
    pub feature_noise_sigma: f64,
    /// Total training nodes; must divide evenly across communities.
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub seed: u64,
}

impl SbmSpec {
    pub fn new(n_nodes: usize, n_communities: usize, p_in: f64, p_out: f64) -> Self {
        SbmSpec {
            n_nodes,
            n_communities,
            p_in,
            p_out,
            feature_dim: 16,
            community_mean_scale: 1.0,
            feature_noise_sigma: 0.1,
            n_train: 5 * n_communities,
            n_val: n_nodes / 5,
            n_test: n_nodes / 5,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_features(mut self, dim: usize, mean_scale: f64, noise_sigma: f64) -> Self {
        self.feature_dim = dim;
        self.community_mean_scale = mean_scale;
        self.feature_noise_sigma = noise_sigma;
        self
    }

    pub fn with_splits(mut self, n_train: usize, n_val: usize, n_test: usize) -> Self {
        self.n_train = n_train;
        self.n_val = n_val;
        self.n_test = n_test;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_communities < 2 {
            return Err(Error::InvalidConfig(format!(
                "need >= 2 communities, got {}",
                self.n_communities
            )));
        }
        if self.n_nodes < self.n_communities {
            return Err(Error::InvalidConfig(format!(
                "{} nodes cannot host {} communities",
                self.n_nodes, self.n_communities
            )));
        }
        if !(self.p_out >= 0.0 && self.p_out < self.p_in && self.p_in <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= p_out < p_in <= 1, got p_in={} p_out={}",
                self.p_in, self.p_out
            )));
        }
        if self.feature_dim < self.n_communities {
            return Err(Error::InvalidConfig(format!(
                "feature_dim {} cannot hold {} orthogonal community means",
                self.feature_dim, self.n_communities
            )));
        }
        if !(self.community_mean_scale > 0.0) || !self.community_mean_scale.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "community_mean_scale must be positive, got {}",
                self.community_mean_scale
            )));
        }
        if self.feature_noise_sigma < 0.0 || !self.feature_noise_sigma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "feature_noise_sigma must be >= 0, got {}",
                self.feature_noise_sigma
            )));
        }
        Ok(())
    }
}

/// Contiguous block labels; community sizes differ by at most one, with
/// the remainder spread over the leading communities.
pub fn block_labels(n_nodes: usize, n_communities: usize) -> Vec<usize> {
    let base = n_nodes / n_communities;
    let rem = n_nodes % n_communities;
    let mut labels = Vec::with_capacity(n_nodes);
    for k in 0..n_communities {
        let size = base + usize::from(k < rem);
        labels.extend(std::iter::repeat(k).take(size));
    }
    labels
}

/// Samples a connected SBM graph with planted features. Returns the
/// dataset (observed features = ground truth + Gaussian noise) and the
/// noise-free ground-truth features. Retries disconnected draws with
/// derived seeds up to a fixed cap.
pub fn gen_sbm(spec: &SbmSpec) -> Result<(LabeledDataset, FeatureMatrix)> {
    spec.validate()?;
    let n = spec.n_nodes;
    let labels = block_labels(n, spec.n_communities);

    let mut accepted = None;
    for attempt in 0..RETRY_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(
            spec.seed.wrapping_add((attempt as u64).wrapping_mul(SEED_STRIDE)),
        );
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if labels[i] == labels[j] {
                    spec.p_in
                } else {
                    spec.p_out
                };
                if rng.random_bool(p) {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let graph = Graph::build(n, &edges)?;
        if graph.is_connected() {
            accepted = Some((graph, rng));
            break;
        }
    }
    let (graph, mut rng) = accepted.ok_or(Error::GenerationFailed {
        attempts: RETRY_CAP,
    })?;

    let mut gt = Array2::<f64>::zeros((n, spec.feature_dim));
    for (i, &label) in labels.iter().enumerate() {
        gt[(i, label)] = spec.community_mean_scale;
    }
    let mut features = gt.clone();
    if spec.feature_noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.feature_noise_sigma)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        features.mapv_inplace(|v| v + normal.sample(&mut rng));
    }

    let (train_mask, val_mask, test_mask) = make_split(
        &labels,
        spec.n_communities,
        spec.n_train,
        spec.n_val,
        spec.n_test,
        spec.seed,
    )?;
    let ds = LabeledDataset {
        graph,
        features,
        labels,
        n_classes: spec.n_communities,
        train_mask,
        val_mask,
        test_mask,
    };
    if !ds.train_mask.is_empty() {
        ds.validate()?;
    }
    Ok((ds, gt))
}

/// Class-balanced train mask plus random val/test masks drawn from the
/// remaining nodes. `n_train` must divide evenly across classes; masks
/// are disjoint and returned sorted.
pub fn make_split(
    labels: &[usize],
    n_classes: usize,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    if n_train + n_val + n_test > n {
        return Err(Error::InvalidConfig(format!(
            "split sizes {}+{}+{} exceed {} nodes",
            n_train, n_val, n_test, n
        )));
    }
    if n_classes == 0 || n_train % n_classes != 0 {
        return Err(Error::InvalidConfig(format!(
            "n_train {} is not divisible by {} classes",
            n_train, n_classes
        )));
    }
    let per_class = n_train / n_classes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &label) in labels.iter().enumerate() {
        if label >= n_classes {
            return Err(Error::InvalidConfig(format!(
                "label {label} out of range for {n_classes} classes"
            )));
        }
        by_class[label].push(i);
    }

    let mut train = Vec::with_capacity(n_train);
    let mut in_train = vec![false; n];
    for (class, nodes) in by_class.iter_mut().enumerate() {
        if nodes.len() < per_class {
            return Err(Error::InsufficientClassNodes {
                class,
                available: nodes.len(),
                requested: per_class,
            });
        }
        nodes.shuffle(&mut rng);
        for &i in nodes.iter().take(per_class) {
            train.push(i);
            in_train[i] = true;
        }
    }

    let mut pool: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();
    pool.shuffle(&mut rng);
    let mut val: Vec<usize> = pool[..n_val].to_vec();
    let mut test: Vec<usize> = pool[n_val..n_val + n_test].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok((train, val, test))
}

/// A citation-style dataset parsed from raw files.
#[derive(Debug, Clone)]
pub struct CitationLoad {
    pub graph: Graph,
    pub features: FeatureMatrix,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    /// Class names sorted alphabetically; `labels` index into this.
    pub label_names: Vec<String>,
    /// Original string ids in content-file order.
    pub node_ids: Vec<String>,
    /// Citation lines dropped for unknown ids or self-citations.
    pub dropped_edges: usize,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads `content_path` (lines `id<TAB>f1<TAB>..<TAB>fF<TAB>label`) and
/// `cites_path` (lines `cited<TAB>citing`). Node order follows the
/// content file; class indices follow alphabetical label order.
/// Duplicate and reversed citation pairs collapse into one undirected
/// unit edge; lines naming unknown ids are dropped and counted.
pub fn load_citation_raw(
    content_path: impl AsRef<Path>,
    cites_path: impl AsRef<Path>,
) -> Result<CitationLoad> {
    let content_path = content_path.as_ref();
    let cites_path = cites_path.as_ref();

    let content = fs::read_to_string(content_path)?;
    let mut node_ids = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut feature_dim = None;
    for (lineno, raw) in content.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(parse_err(
                content_path,
                lineno,
                format!("expected id, features, and label; got {} fields", fields.len()),
            ));
        }
        let id = fields[0].to_string();
        if index_of.contains_key(&id) {
            return Err(parse_err(content_path, lineno, format!("duplicate id {id}")));
        }
        let feats: Vec<f64> = fields[1..fields.len() - 1]
            .iter()
            .enumerate()
            .map(|(k, f)| {
                f.parse::<f64>().map_err(|_| {
                    parse_err(content_path, lineno, format!("bad feature {} ({f})", k + 1))
                })
            })
            .collect::<Result<_>>()?;
        match feature_dim {
            None => feature_dim = Some(feats.len()),
            Some(dim) if dim != feats.len() => {
                return Err(parse_err(
                    content_path,
                    lineno,
                    format!("expected {dim} features, got {}", feats.len()),
                ));
            }
            _ => {}
        }
        index_of.insert(id.clone(), node_ids.len());
        node_ids.push(id);
        rows.push(feats);
        raw_labels.push(fields[fields.len() - 1].to_string());
    }
    if node_ids.is_empty() {
        return Err(parse_err(content_path, 0, "no nodes in content file"));
    }
    let n = node_ids.len();
    let feature_dim = feature_dim.unwrap_or(0);

    let mut label_names: Vec<String> = raw_labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    label_names.sort();
    let labels: Vec<usize> = raw_labels
        .iter()
        .map(|l| label_names.binary_search(l).expect("label seen above"))
        .collect();

    let mut features = Array2::<f64>::zeros((n, feature_dim));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            features[(i, j)] = v;
        }
    }

    let cites = fs::read_to_string(cites_path)?;
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut dropped = 0usize;
    for (lineno, raw) in cites.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(parse_err(
                cites_path,
                lineno,
                format!("expected cited<TAB>citing, got {} fields", fields.len()),
            ));
        }
        match (index_of.get(fields[0]), index_of.get(fields[1])) {
            (Some(&a), Some(&b)) if a != b => {
                pairs.insert((a.min(b), a.max(b)));
            }
            _ => dropped += 1,
        }
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} citation lines (unknown ids or self-citations)");
    }
    let edges: Vec<(usize, usize, f64)> = pairs.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    let graph = Graph::build(n, &edges)?;

    Ok(CitationLoad {
        graph,
        features,
        labels,
        n_classes: label_names.len(),
        label_names,
        node_ids,
        dropped_edges: dropped,
    })
}

/// Files written by `save_dataset`, with SHA-256 content checksums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_classes: usize,
    pub feature_dim: usize,
    pub has_ground_truth: bool,
    pub checksums: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct MasksFile {
    train: Vec<usize>,
    val: Vec<usize>,
    test: Vec<usize>,
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn write_matrix_tsv(path: &Path, m: &FeatureMatrix) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn read_matrix_tsv(path: &Path) -> Result<FeatureMatrix> {
    let content = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let cells: Vec<f64> = line
            .split('\t')
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| parse_err(path, lineno + 1, format!("bad number {c}")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if first.len() != cells.len() {
                return Err(parse_err(path, lineno + 1, "ragged matrix row"));
            }
        }
        rows.push(cells);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m = Array2::<f64>::zeros((rows.len(), ncols));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Writes a dataset directory (`graph.tsv`, `features.tsv`, `labels.tsv`,
/// `masks.json`, optional `gt_features.tsv`) and its `manifest.json`.
pub fn save_dataset(
    dir: impl AsRef<Path>,
    ds: &LabeledDataset,
    ground_truth: Option<&FeatureMatrix>,
) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;

    ds.graph.write_edge_list(dir.join("graph.tsv"))?;
    write_matrix_tsv(&dir.join("features.tsv"), &ds.features)?;
    let labels_text: String = ds.labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(dir.join("labels.tsv"), labels_text)?;
    let masks = MasksFile {
        train: ds.train_mask.clone(),
        val: ds.val_mask.clone(),
        test: ds.test_mask.clone(),
    };
    fs::write(
        dir.join("masks.json"),
        serde_json::to_string_pretty(&masks).map_err(|e| Error::InvalidConfig(e.to_string()))?,
    )?;
    if let Some(gt) = ground_truth {
        write_matrix_tsv(&dir.join("gt_features.tsv"), gt)?;
    }

    let mut checksums = BTreeMap::new();
    let mut files = vec!["graph.tsv", "features.tsv", "labels.tsv", "masks.json"];
    if ground_truth.is_some() {
        files.push("gt_features.tsv");
    }
    for name in files {
        checksums.insert(name.to_string(), sha256_hex(&dir.join(name))?);
    }
    let manifest = DatasetManifest {
        n_nodes: ds.graph.node_count(),
        n_edges: ds.graph.edge_count(),
        n_classes: ds.n_classes,
        feature_dim: ds.features.ncols(),
        has_ground_truth: ground_truth.is_some(),
        checksums,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::InvalidConfig(e.to_string()))?,
    )?;
    Ok(manifest)
}

/// Reads a dataset directory back, verifying every checksum recorded in
/// its manifest.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<(LabeledDataset, Option<FeatureMatrix>)> {
    let dir = dir.as_ref();
    let manifest_path = dir.join("manifest.json");
    let manifest: DatasetManifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)
        .map_err(|e| parse_err(&manifest_path, 0, e.to_string()))?;
    for (name, expected) in &manifest.checksums {
        let actual = sha256_hex(&dir.join(name))?;
        if &actual != expected {
            return Err(Error::InvalidConfig(format!(
                "checksum mismatch for {} under {}",
                name,
                dir.display()
            )));
        }
    }

    let graph = Graph::read_edge_list(dir.join("graph.tsv"), Some(manifest.n_nodes))?;
    let features = read_matrix_tsv(&dir.join("features.tsv"))?;
    let labels_path = dir.join("labels.tsv");
    let labels: Vec<usize> = fs::read_to_string(&labels_path)?
        .lines()
        .enumerate()
        .map(|(lineno, l)| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| parse_err(&labels_path, lineno + 1, format!("bad label {l}")))
        })
        .collect::<Result<_>>()?;
    let masks_path = dir.join("masks.json");
    let masks: MasksFile = serde_json::from_str(&fs::read_to_string(&masks_path)?)
        .map_err(|e| parse_err(&masks_path, 0, e.to_string()))?;
    let ground_truth = if manifest.has_ground_truth {
        Some(read_matrix_tsv(&dir.join("gt_features.tsv"))?)
    } else {
        None
    };

    let ds = LabeledDataset {
        graph,
        features,
        labels,
        n_classes: manifest.n_classes,
        train_mask: masks.train,
        val_mask: masks.val,
        test_mask: masks.test,
    };
    Ok((ds, ground_truth))
}

/// Directory layout summary used when generating datasets from the
/// command line.
pub fn manifest_path(dir: impl AsRef<Path>) -> PathBuf {
    dir.as_ref().join("manifest.json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{normalized_ops, total_variation};

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("graphsig_{tag}_{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn quick_spec() -> SbmSpec {
        SbmSpec::new(60, 3, 0.4, 0.04)
            .with_features(8, 1.0, 0.1)
            .with_splits(9, 12, 12)
    }

    #[test]
    fn block_labels_spread_the_remainder() {
        assert_eq!(block_labels(10, 3), vec![0, 0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(block_labels(4, 2), vec![0, 0, 1, 1]);
    }

    #[test]
    fn gen_sbm_is_deterministic_and_connected() {
        let spec = quick_spec();
        let (a, gt_a) = gen_sbm(&spec).unwrap();
        let (b, gt_b) = gen_sbm(&spec).unwrap();
        assert!(a.graph.is_connected());
        assert_eq!(a.graph.edges(), b.graph.edges());
        assert_eq!(a.features, b.features);
        assert_eq!(gt_a, gt_b);
        assert_eq!(a.train_mask, b.train_mask);

        let (c, _) = gen_sbm(&spec.clone().with_seed(7)).unwrap();
        assert_ne!(a.graph.edges(), c.graph.edges());
    }

    #[test]
    fn gen_sbm_plants_orthogonal_scaled_means() {
        let spec = quick_spec().with_features(8, 2.5, 0.0);
        let (ds, gt) = gen_sbm(&spec).unwrap();
        assert_eq!(ds.features, gt);
        for (i, &label) in ds.labels.iter().enumerate() {
            for j in 0..8 {
                let expected = if j == label { 2.5 } else { 0.0 };
                assert_eq!(gt[(i, j)], expected);
            }
        }
        // Distinct community means are orthogonal.
        let m0 = gt.row(0);
        let m2 = gt.row(59);
        assert_ne!(ds.labels[0], ds.labels[59]);
        assert_eq!(m0.dot(&m2), 0.0);
    }

    #[test]
    fn gen_sbm_reports_failure_for_disconnected_specs() {
        // Two full cliques with no cross edges can never connect.
        let spec = SbmSpec::new(10, 2, 1.0, 0.0)
            .with_features(4, 1.0, 0.0)
            .with_splits(2, 2, 2);
        assert!(matches!(
            gen_sbm(&spec),
            Err(Error::GenerationFailed { attempts: 20 })
        ));
    }

    #[test]
    fn planted_features_are_smooth_against_permutations() {
        let (ds, gt) = gen_sbm(&quick_spec()).unwrap();
        let ops = normalized_ops(&ds.graph).unwrap();
        let tv_gt = total_variation(&ops, &gt).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = ds.graph.node_count();
        let mut beaten = 0;
        let trials = 1000;
        for _ in 0..trials {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mut shuffled = gt.clone();
            for (new_row, &old_row) in perm.iter().enumerate() {
                shuffled.row_mut(new_row).assign(&gt.row(old_row));
            }
            if total_variation(&ops, &shuffled).unwrap() > tv_gt {
                beaten += 1;
            }
        }
        assert!(
            beaten >= trials * 99 / 100,
            "ground truth only smoother than {beaten}/{trials} permutations"
        );
    }

    #[test]
    fn make_split_is_balanced_disjoint_and_deterministic() {
        let labels = block_labels(30, 3);
        let (train, val, test) = make_split(&labels, 3, 6, 8, 8, 5).unwrap();
        assert_eq!(train.len(), 6);
        assert_eq!(val.len(), 8);
        assert_eq!(test.len(), 8);
        for class in 0..3 {
            assert_eq!(train.iter().filter(|&&i| labels[i] == class).count(), 2);
        }
        let mut all: Vec<usize> = train.iter().chain(&val).chain(&test).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 22);

        let again = make_split(&labels, 3, 6, 8, 8, 5).unwrap();
        assert_eq!((train, val, test), again);
    }

    #[test]
    fn make_split_rejects_bad_requests() {
        let labels = block_labels(10, 2);
        assert!(matches!(
            make_split(&labels, 2, 4, 4, 4, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            make_split(&labels, 2, 3, 2, 2, 0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            make_split(&labels, 2, 12, 0, 0, 0),
            Err(Error::InvalidConfig(_))
        ));
        let lopsided = vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        assert!(matches!(
            make_split(&lopsided, 2, 4, 0, 0, 0),
            Err(Error::InsufficientClassNodes {
                class: 1,
                available: 1,
                requested: 2
            })
        ));
    }

    #[test]
    fn citation_loader_round_trip() {
        let dir = temp_dir("cites");
        let content = dir.join("content.tsv");
        let cites = dir.join("cites.tsv");
        fs::write(
            &content,
            "paper_c\t1.0\t0.0\ttheory\npaper_a\t0.5\t0.5\tml\npaper_b\t0.0\t1.0\tml\n",
        )
        .unwrap();
        fs::write(
            &cites,
            "paper_a\tpaper_b\npaper_b\tpaper_a\npaper_a\tpaper_c\npaper_x\tpaper_a\npaper_a\tpaper_a\n",
        )
        .unwrap();

        let load = load_citation_raw(&content, &cites).unwrap();
        assert_eq!(load.node_ids, vec!["paper_c", "paper_a", "paper_b"]);
        assert_eq!(load.label_names, vec!["ml", "theory"]);
        assert_eq!(load.labels, vec![1, 0, 0]);
        assert_eq!(load.n_classes, 2);
        assert_eq!(load.dropped_edges, 2);
        // Reversed duplicates collapse to a single unit edge.
        assert_eq!(load.graph.edge_count(), 2);
        for e in load.graph.edges() {
            assert_eq!(e.weight, 1.0);
        }
        assert_eq!(load.features[(1, 0)], 0.5);
        assert_eq!(load.features[(2, 1)], 1.0);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn citation_loader_reports_line_numbers() {
        let dir = temp_dir("cites_bad");
        let content = dir.join("content.tsv");
        let cites = dir.join("cites.tsv");
        fs::write(&cites, "").unwrap();

        fs::write(&content, "a\t1.0\tml\nb\toops\tml\n").unwrap();
        match load_citation_raw(&content, &cites) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        fs::write(&content, "a\t1.0\tml\na\t2.0\tml\n").unwrap();
        match load_citation_raw(&content, &cites) {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        fs::write(&content, "").unwrap();
        assert!(matches!(
            load_citation_raw(&content, &cites),
            Err(Error::Parse { .. })
        ));

        fs::write(&content, "a\t1.0\tml\nb\t2.0\tml\n").unwrap();
        fs::write(&cites, "a\tb\tc\n").unwrap();
        match load_citation_raw(&content, &cites) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn dataset_directory_round_trip_with_checksums() {
        let (ds, gt) = gen_sbm(&quick_spec()).unwrap();
        let dir = temp_dir("roundtrip");
        let manifest = save_dataset(&dir, &ds, Some(&gt)).unwrap();
        assert_eq!(manifest.n_nodes, 60);
        assert_eq!(manifest.n_classes, 3);
        assert!(manifest.has_ground_truth);
        assert_eq!(manifest.checksums.len(), 5);

        let (loaded, loaded_gt) = load_dataset(&dir).unwrap();
        assert_eq!(loaded.graph.edges(), ds.graph.edges());
        assert_eq!(loaded.features, ds.features);
        assert_eq!(loaded.labels, ds.labels);
        assert_eq!(loaded.train_mask, ds.train_mask);
        assert_eq!(loaded.val_mask, ds.val_mask);
        assert_eq!(loaded.test_mask, ds.test_mask);
        assert_eq!(loaded_gt.as_ref(), Some(&gt));
        loaded.validate().unwrap();

        // Tampering with any listed file breaks the checksum.
        fs::write(dir.join("labels.tsv"), "0\n").unwrap();
        match load_dataset(&dir) {
            Err(Error::InvalidConfig(msg)) => assert!(msg.contains("checksum")),
            other => panic!("expected checksum failure, got {other:?}"),
        }
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn save_without_ground_truth_omits_the_file() {
        let (ds, _) = gen_sbm(&quick_spec()).unwrap();
        let dir = temp_dir("no_gt");
        let manifest = save_dataset(&dir, &ds, None).unwrap();
        assert!(!manifest.has_ground_truth);
        assert!(!dir.join("gt_features.tsv").exists());
        let (_, gt) = load_dataset(&dir).unwrap();
        assert!(gt.is_none());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn spec_validation_rejects_bad_parameters() {
        assert!(SbmSpec::new(10, 1, 0.5, 0.1).validate().is_err());
        assert!(SbmSpec::new(10, 2, 0.1, 0.5).validate().is_err());
        assert!(SbmSpec::new(10, 2, 1.2, 0.1).validate().is_err());
        assert!(SbmSpec::new(3, 4, 0.5, 0.1).validate().is_err());
        assert!(SbmSpec::new(10, 2, 0.5, 0.1)
            .with_features(1, 1.0, 0.1)
            .validate()
            .is_err());
        assert!(SbmSpec::new(10, 2, 0.5, 0.1)
            .with_features(4, 0.0, 0.1)
            .validate()
            .is_err());
        assert!(quick_spec().validate().is_ok());
    }
}
