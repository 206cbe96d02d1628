//! Sparse symmetric graphs, their normalized operators, and the
//! total-variation smoothness functional Tr(X^T L_n X).

use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::{Error, Result};

/// Dense node-feature / graph-signal matrix. Row i holds the features of
/// node i; column j is the j-th signal over all nodes.
pub type FeatureMatrix = Array2<f64>;

/// An undirected weighted edge, stored once with `i <= j`. `i == j` is an
/// explicit self-loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Symmetric weighted graph. Each undirected edge is stored once and
/// interpreted symmetrically; weights are finite and strictly positive.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate symmetric pairs are merged
    /// by summing weights; storage is canonical (sorted by `(i, j)` with
    /// `i <= j`). Self-loops are rejected here; use
    /// [`Graph::build_with_self_loops`] when they are intended.
    pub fn build(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        Self::build_inner(n, edge_list, false)
    }

    /// Same as [`Graph::build`] but permits explicit `i == j` self-loop
    /// entries.
    pub fn build_with_self_loops(n: usize, edge_list: &[(usize, usize, f64)]) -> Result<Self> {
        Self::build_inner(n, edge_list, true)
    }

    fn build_inner(n: usize, edge_list: &[(usize, usize, f64)], self_loops: bool) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, w) in edge_list {
            if i >= n {
                return Err(Error::NodeOutOfRange { node: i, n });
            }
            if j >= n {
                return Err(Error::NodeOutOfRange { node: j, n });
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::BadEdgeWeight { i, j, weight: w });
            }
            if i == j && !self_loops {
                return Err(Error::SelfLoopNotAllowed { node: i });
            }
            let key = (i.min(j), i.max(j));
            *merged.entry(key).or_insert(0.0) += w;
        }
        let edges = merged
            .into_iter()
            .map(|((i, j), weight)| Edge { i, j, weight })
            .collect();
        Ok(Graph { n, edges })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of stored undirected edges (self-loops count once).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weighted degrees d_i = sum_j A_ij. A self-loop contributes its weight
    /// once, matching the matrix row sum.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.i] += e.weight;
            if e.i != e.j {
                d[e.j] += e.weight;
            }
        }
        d
    }

    /// Canonical `(min, max)` pairs of the stored edges.
    pub fn edge_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|e| (e.i, e.j))
    }

    /// True when the graph is connected (singleton graphs are connected;
    /// an empty graph is not).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            if e.i != e.j {
                adj[e.i].push(e.j);
                adj[e.j].push(e.i);
            }
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Symmetric sparse adjacency A with both triangles expanded.
    pub fn adjacency(&self) -> SparseMatrix {
        let mut triplets = Vec::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            triplets.push((e.i, e.j, e.weight));
            if e.i != e.j {
                triplets.push((e.j, e.i, e.weight));
            }
        }
        SparseMatrix::from_triplets(self.n, self.n, &triplets)
    }

    /// Renormalized adjacency A~_n = D~^{-1/2} (A + I) D~^{-1/2}. Well
    /// defined even with isolated nodes since the added self-loop keeps
    /// every d~_i >= 1.
    pub fn renormalized_adjacency(&self) -> SparseMatrix {
        let d = self.degrees();
        let dt: Vec<f64> = d.iter().map(|x| x + 1.0).collect();
        let mut triplets = Vec::with_capacity(2 * self.edges.len() + self.n);
        let mut diag_extra = vec![0.0; self.n];
        for e in &self.edges {
            if e.i == e.j {
                diag_extra[e.i] += e.weight;
            } else {
                let v = e.weight / (dt[e.i] * dt[e.j]).sqrt();
                triplets.push((e.i, e.j, v));
                triplets.push((e.j, e.i, v));
            }
        }
        for i in 0..self.n {
            triplets.push((i, i, (diag_extra[i] + 1.0) / dt[i]));
        }
        SparseMatrix::from_triplets(self.n, self.n, &triplets)
    }

    /// Reads the edge-list text format: one `src<TAB>dst[<TAB>weight]` per
    /// line, 0-based indices, `#` comments, weight defaulting to 1.0. The
    /// node count is `max index + 1` unless a larger `n` is given.
    pub fn read_edge_list(path: impl AsRef<Path>, n: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let mut raw = Vec::new();
        let mut max_node = 0usize;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                msg,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(parse_err(format!(
                    "expected 2 or 3 fields, got {}",
                    fields.len()
                )));
            }
            let src: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad source index {:?}", fields[0])))?;
            let dst: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad target index {:?}", fields[1])))?;
            let weight: f64 = match fields.get(2) {
                Some(s) => s
                    .parse()
                    .map_err(|_| parse_err(format!("bad weight {:?}", s)))?,
                None => 1.0,
            };
            max_node = max_node.max(src).max(dst);
            raw.push((src, dst, weight));
        }
        let n = n.unwrap_or(if raw.is_empty() { 0 } else { max_node + 1 });
        Self::build_with_self_loops(n, &raw)
    }

    /// Writes the edge-list text format (tab separated, weight always
    /// written).
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "# {} nodes, {} edges", self.n, self.edges.len())?;
        for e in &self.edges {
            writeln!(w, "{}\t{}\t{}", e.i, e.j, e.weight)?;
        }
        Ok(())
    }
}

/// Compressed sparse row matrix over f64.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds CSR storage from (row, col, value) triplets. Duplicates are
    /// summed; columns within each row end up sorted.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n_rows];
        for &(i, j, v) in triplets {
            *rows[i].entry(j).or_insert(0.0) += v;
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// (column, value) pairs of row i.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// All (row, col, value) entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Sparse-dense product: Y = M X.
    pub fn mul_dense(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.nrows() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "spmm",
                expected: format!("{} rows", self.n_cols),
                got: format!("{} rows", x.nrows()),
            });
        }
        let f = x.ncols();
        let mut y = Array2::zeros((self.n_rows, f));
        for i in 0..self.n_rows {
            let mut acc = y.row_mut(i);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let v = self.values[k];
                let xr = x.row(self.col_idx[k]);
                acc.iter_mut().zip(xr.iter()).for_each(|(a, &b)| *a += v * b);
            }
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n_rows, self.n_cols));
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }
}

/// Normalized graph operators derived from one graph.
#[derive(Debug, Clone)]
pub struct NormalizedOps {
    /// A_n = D^{-1/2} A D^{-1/2}; eigenvalues in [-1, 1].
    pub a_norm: SparseMatrix,
    /// L_n = I - A_n, positive semidefinite.
    pub lap_norm: SparseMatrix,
    /// A~_n = D~^{-1/2} (A + I) D~^{-1/2}, self-loop renormalized.
    pub a_renorm: SparseMatrix,
    /// Diagonal of D_r = diag(d_i / d~_i), each entry in (0, 1].
    pub d_ratio: Vec<f64>,
    /// Diagonal of D~^{-1}.
    pub d_tilde_inv: Vec<f64>,
}

/// Builds all normalized operators. Errors on the first isolated node since
/// D^{-1/2} is undefined there; the renormalized operator alone is available
/// through [`Graph::renormalized_adjacency`].
pub fn normalized_ops(g: &Graph) -> Result<NormalizedOps> {
    let n = g.node_count();
    let d = g.degrees();
    if let Some(node) = d.iter().position(|&x| x == 0.0) {
        return Err(Error::IsolatedNode { node });
    }

    let mut a_triplets = Vec::with_capacity(2 * g.edge_count());
    for e in g.edges() {
        let v = e.weight / (d[e.i] * d[e.j]).sqrt();
        a_triplets.push((e.i, e.j, v));
        if e.i != e.j {
            a_triplets.push((e.j, e.i, v));
        }
    }
    let a_norm = SparseMatrix::from_triplets(n, n, &a_triplets);

    // L_n keeps an explicit diagonal so its row pattern always covers I.
    let mut l_triplets: Vec<(usize, usize, f64)> =
        a_triplets.iter().map(|&(i, j, v)| (i, j, -v)).collect();
    for i in 0..n {
        l_triplets.push((i, i, 1.0));
    }
    let lap_norm = SparseMatrix::from_triplets(n, n, &l_triplets);

    let a_renorm = g.renormalized_adjacency();
    let d_ratio = d.iter().map(|&x| x / (x + 1.0)).collect();
    let d_tilde_inv = d.iter().map(|&x| 1.0 / (x + 1.0)).collect();

    Ok(NormalizedOps {
        a_norm,
        lap_norm,
        a_renorm,
        d_ratio,
        d_tilde_inv,
    })
}

impl NormalizedOps {
    pub fn node_count(&self) -> usize {
        self.a_norm.n_rows()
    }
}

/// Unit eigenvector of A_n at eigenvalue 1 (equivalently of L_n at 0):
/// the D^{1/2} 1 direction, the fixed point of every smoothing kernel.
pub fn smooth_eigenvector(g: &Graph) -> Array1<f64> {
    let mut v: Array1<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    let norm = v.dot(&v).sqrt();
    if norm > 0.0 {
        v /= norm;
    }
    v
}

/// Total variation Tr(X^T L_n X) >= 0; rounding noise below zero is clamped.
pub fn total_variation(ops: &NormalizedOps, x: &FeatureMatrix) -> Result<f64> {
    let lx = ops.lap_norm.mul_dense(x).map_err(|_| Error::DimensionMismatch {
        context: "total_variation",
        expected: format!("{} rows", ops.node_count()),
        got: format!("{} rows", x.nrows()),
    })?;
    let tv = x.iter().zip(lx.iter()).map(|(a, b)| a * b).sum::<f64>();
    Ok(tv.max(0.0))
}

/// Checks a feature matrix against its owning graph: matching row count and
/// finite entries.
pub fn check_features(g: &Graph, x: &FeatureMatrix) -> Result<()> {
    if x.nrows() != g.node_count() {
        return Err(Error::DimensionMismatch {
            context: "features",
            expected: format!("{} rows", g.node_count()),
            got: format!("{} rows", x.nrows()),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature matrix"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    pub(crate) fn p2() -> Graph {
        Graph::build(2, &[(0, 1, 1.0)]).unwrap()
    }

    pub(crate) fn triangle() -> Graph {
        Graph::build(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn p2_degrees() {
        assert_eq!(p2().degrees(), vec![1.0, 1.0]);
    }

    #[test]
    fn triangle_degrees() {
        assert_eq!(triangle().degrees(), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn duplicate_symmetric_pairs_merge_by_sum() {
        let g = Graph::build(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges()[0].weight, 2.0);
    }

    #[test]
    fn build_rejects_bad_inputs() {
        assert!(matches!(
            Graph::build(2, &[(0, 2, 1.0)]),
            Err(Error::NodeOutOfRange { node: 2, n: 2 })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 1, 0.0)]),
            Err(Error::BadEdgeWeight { .. })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 1, f64::NAN)]),
            Err(Error::BadEdgeWeight { .. })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 1, -1.0)]),
            Err(Error::BadEdgeWeight { .. })
        ));
        assert!(matches!(
            Graph::build(2, &[(0, 0, 1.0)]),
            Err(Error::SelfLoopNotAllowed { node: 0 })
        ));
        assert!(Graph::build_with_self_loops(2, &[(0, 0, 1.0)]).is_ok());
    }

    #[test]
    fn p2_normalized_operators() {
        let ops = normalized_ops(&p2()).unwrap();
        let a = ops.a_norm.to_dense();
        assert_eq!(a, array![[0.0, 1.0], [1.0, 0.0]]);
        let l = ops.lap_norm.to_dense();
        assert_eq!(l, array![[1.0, -1.0], [-1.0, 1.0]]);
        let ar = ops.a_renorm.to_dense();
        assert_abs_diff_eq!(ar[(0, 0)], 0.5);
        assert_abs_diff_eq!(ar[(0, 1)], 0.5);
        assert_abs_diff_eq!(ar[(1, 0)], 0.5);
        assert_abs_diff_eq!(ar[(1, 1)], 0.5);
    }

    #[test]
    fn triangle_a_norm_is_half_adjacency() {
        let g = triangle();
        let ops = normalized_ops(&g).unwrap();
        let a = g.adjacency().to_dense();
        let an = ops.a_norm.to_dense();
        assert_abs_diff_eq!(an[(0, 1)], a[(0, 1)] / 2.0);
        assert_abs_diff_eq!(an[(1, 2)], a[(1, 2)] / 2.0);
        assert_abs_diff_eq!(an[(0, 0)], 0.0);
    }

    #[test]
    fn isolated_node_named_in_error() {
        let g = Graph::build(3, &[(0, 1, 1.0)]).unwrap();
        match normalized_ops(&g) {
            Err(Error::IsolatedNode { node }) => assert_eq!(node, 2),
            other => panic!("expected IsolatedNode, got {other:?}"),
        }
        // Renormalized operator still works: d~ = [2, 2, 1].
        let ar = g.renormalized_adjacency().to_dense();
        assert_abs_diff_eq!(ar[(2, 2)], 1.0);
        assert_abs_diff_eq!(ar[(0, 1)], 0.5);
    }

    #[test]
    fn total_variation_hand_values() {
        let ops = normalized_ops(&p2()).unwrap();
        let tv = total_variation(&ops, &array![[1.0], [0.0]]).unwrap();
        assert_abs_diff_eq!(tv, 1.0, epsilon = 1e-15);
        let tv = total_variation(&ops, &array![[1.0], [1.0]]).unwrap();
        assert_abs_diff_eq!(tv, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn total_variation_vanishes_on_smooth_eigenvector() {
        // Star graph has non-uniform degrees, so D^{1/2} 1 is a real test.
        let g = Graph::build(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0)]).unwrap();
        let ops = normalized_ops(&g).unwrap();
        let v = smooth_eigenvector(&g);
        let x = v.clone().insert_axis(ndarray::Axis(1));
        assert_abs_diff_eq!(total_variation(&ops, &x).unwrap(), 0.0, epsilon = 1e-12);
        // Shifting any signal along v leaves TV unchanged.
        let y = array![[0.3], [-1.0], [2.0], [0.5]];
        let shifted = &y + &(x.clone() * 7.5);
        assert_abs_diff_eq!(
            total_variation(&ops, &y).unwrap(),
            total_variation(&ops, &shifted).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn total_variation_is_column_additive() {
        let g = triangle();
        let ops = normalized_ops(&g).unwrap();
        let x = array![[1.0, -0.5], [0.0, 2.0], [3.0, 0.25]];
        let c0 = x.column(0).insert_axis(ndarray::Axis(1)).to_owned();
        let c1 = x.column(1).insert_axis(ndarray::Axis(1)).to_owned();
        let whole = total_variation(&ops, &x).unwrap();
        let parts =
            total_variation(&ops, &c0).unwrap() + total_variation(&ops, &c1).unwrap();
        assert_abs_diff_eq!(whole, parts, epsilon = 1e-12);
    }

    #[test]
    fn spmm_hand_values() {
        let ops = normalized_ops(&p2()).unwrap();
        let x = array![[1.0], [0.0]];
        assert_eq!(ops.a_norm.mul_dense(&x).unwrap(), array![[0.0], [1.0]]);
        assert_eq!(
            ops.a_renorm.mul_dense(&x).unwrap(),
            array![[0.5], [0.5]]
        );
        let id = SparseMatrix::identity(2);
        assert_eq!(id.mul_dense(&x).unwrap(), x);
    }

    #[test]
    fn spmm_dimension_mismatch() {
        let ops = normalized_ops(&p2()).unwrap();
        let x = array![[1.0], [0.0], [0.0]];
        assert!(matches!(
            ops.a_norm.mul_dense(&x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spmm_preserves_smooth_eigenvector() {
        let g = Graph::build(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 1.5), (0, 3, 1.0)]).unwrap();
        let ops = normalized_ops(&g).unwrap();
        let v = smooth_eigenvector(&g).insert_axis(ndarray::Axis(1));
        let av = ops.a_norm.mul_dense(&v).unwrap();
        for (a, b) in av.iter().zip(v.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn renorm_matches_first_order_expansion_on_regular_graphs() {
        // On d-regular graphs D~^{-1} + D_r A_n equals A~_n exactly.
        for g in [p2(), triangle()] {
            let ops = normalized_ops(&g).unwrap();
            let ar = ops.a_renorm.to_dense();
            let an = ops.a_norm.to_dense();
            let n = g.node_count();
            for i in 0..n {
                for j in 0..n {
                    let expansion = if i == j { ops.d_tilde_inv[i] } else { 0.0 }
                        + ops.d_ratio[i] * an[(i, j)];
                    assert_abs_diff_eq!(ar[(i, j)], expansion, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let dir = std::env::temp_dir().join("graphsig_edge_list_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.tsv");
        let g = Graph::build(4, &[(0, 1, 1.0), (1, 2, 0.25), (2, 3, 4.0)]).unwrap();
        g.write_edge_list(&path).unwrap();
        let g2 = Graph::read_edge_list(&path, None).unwrap();
        assert_eq!(g2.node_count(), 4);
        assert_eq!(g2.edges(), g.edges());
    }

    #[test]
    fn edge_list_parses_comments_and_default_weight() {
        let dir = std::env::temp_dir().join("graphsig_edge_list_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("default_weight.tsv");
        std::fs::write(&path, "# comment\n0\t1\n\n1\t2\t0.5\n").unwrap();
        let g = Graph::read_edge_list(&path, None).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0].weight, 1.0);
        assert_eq!(g.edges()[1].weight, 0.5);
    }

    #[test]
    fn edge_list_reports_line_number_on_bad_row() {
        let dir = std::env::temp_dir().join("graphsig_edge_list_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.tsv");
        std::fs::write(&path, "0\t1\nnot_a_node\t2\n").unwrap();
        match Graph::read_edge_list(&path, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
