//! Graph representation, derived matrices, vertex-distance matrices and the
//! deterministic generators used by the experiments.
//!
//! A graph is stored as its dense weight matrix `W`. For undirected graphs
//! `W` is symmetric with a zero diagonal; the degree matrix has entries
//! `D_nn = Σ_m W_mn` and the Laplacian is `L = D − W`. The directed cycle is
//! kept as a separate kind: its adjacency is the cyclic shift and its
//! spectral basis is the DFT (see [`crate::spectral`]).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Undirected,
    DirectedCycle,
}

/// A weighted graph on `N` vertices.
#[derive(Debug, Clone)]
pub struct Graph {
    weights: Array2<f64>,
    kind: GraphKind,
}

impl Graph {
    /// Builds an undirected graph from a symmetric, nonnegative weight matrix
    /// with zero diagonal.
    pub fn undirected(weights: Array2<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "weight matrix must be square, got {}x{}",
                n,
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "nonzero diagonal weight at vertex {}",
                    i + 1
                )));
            }
            for j in 0..i {
                let (a, b) = (weights[(i, j)], weights[(j, i)]);
                if a < 0.0 || b < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "negative weight between vertices {} and {}",
                        j + 1,
                        i + 1
                    )));
                }
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter(format!(
                        "weight matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { weights, kind: GraphKind::Undirected })
    }

    /// Path graph `1 - 2 - ... - N` with unit weights.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("path graph needs at least 2 vertices".into()));
        }
        let mut w = Array2::zeros((n, n));
        for i in 0..n - 1 {
            w[(i, i + 1)] = 1.0;
            w[(i + 1, i)] = 1.0;
        }
        Ok(Self { weights: w, kind: GraphKind::Undirected })
    }

    /// Undirected cycle with unit weights.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("undirected cycle needs at least 3 vertices".into()));
        }
        let mut w = Array2::zeros((n, n));
        for i in 0..n {
            let j = (i + 1) % n;
            w[(i, j)] = 1.0;
            w[(j, i)] = 1.0;
        }
        Ok(Self { weights: w, kind: GraphKind::Undirected })
    }

    /// Directed cycle whose adjacency acts as the unit delay:
    /// `(W x)(m) = x(m − 1 mod N)`.
    pub fn directed_cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("directed cycle needs at least 2 vertices".into()));
        }
        let mut w = Array2::zeros((n, n));
        for m in 0..n {
            w[(m, (m + n - 1) % n)] = 1.0;
        }
        Ok(Self { weights: w, kind: GraphKind::DirectedCycle })
    }

    /// Random geometric graph on the Swiss-roll surface; see [`SwissRollParams`].
    pub fn swiss_roll(params: &SwissRollParams) -> Result<Self> {
        params.build()
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// Binary adjacency `A = sign(W)`.
    pub fn adjacency(&self) -> Array2<f64> {
        self.weights.mapv(|w| if w != 0.0 { 1.0 } else { 0.0 })
    }

    /// Vertex degrees `D_nn = Σ_m W_mn` (column sums).
    pub fn degrees(&self) -> Array1<f64> {
        self.weights.sum_axis(ndarray::Axis(0))
    }

    /// Graph Laplacian `L = D − W`. Undirected graphs only.
    pub fn laplacian(&self) -> Result<Array2<f64>> {
        if self.kind != GraphKind::Undirected {
            return Err(Error::UnsupportedKind(
                "Laplacian is defined here for undirected graphs".into(),
            ));
        }
        let mut l = -&self.weights;
        let deg = self.degrees();
        for i in 0..self.n() {
            l[(i, i)] += deg[i];
        }
        Ok(l)
    }

    /// Sparse (CSR) view of the Laplacian for polynomial operators.
    pub fn sparse_laplacian(&self) -> Result<CsrMatrix> {
        Ok(CsrMatrix::from_dense(&self.laplacian()?))
    }

    /// True when every vertex is reachable from vertex 1 along nonzero
    /// weights (edge direction ignored).
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !seen[v] && (self.weights[(u, v)] != 0.0 || self.weights[(v, u)] != 0.0) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Shortest-walk distances from every vertex (BFS on the binary
    /// adjacency); `None` marks unreachable pairs.
    pub fn bfs_distances(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.n();
        let adj = self.adjacency();
        (0..n)
            .map(|src| {
                let mut dist = vec![None; n];
                dist[src] = Some(0);
                let mut queue = std::collections::VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    for v in 0..n {
                        if adj[(u, v)] != 0.0 && dist[v].is_none() {
                            dist[v] = Some(dist[u].unwrap() + 1);
                            queue.push_back(v);
                        }
                    }
                }
                dist
            })
            .collect()
    }
}

/// Generator parameters accepted by [`generate`]; serialized into graph
/// sidecar files and experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Path { n: usize },
    CycleUndirected { n: usize },
    CycleDirected { n: usize },
    SwissRoll(SwissRollParams),
}

/// Dispatches to the named generator.
pub fn generate(spec: &GraphSpec) -> Result<Graph> {
    match spec {
        GraphSpec::Path { n } => Graph::path(*n),
        GraphSpec::CycleUndirected { n } => Graph::cycle(*n),
        GraphSpec::CycleDirected { n } => Graph::directed_cycle(*n),
        GraphSpec::SwissRoll(p) => p.build(),
    }
}

/// Swiss-roll graph: `n` points placed uniformly at random on the rolled
/// surface `(t cos t, h, t sin t)`, `t ∈ [1.5π, 4.5π]`, `h ∈ [0, 45]`.
///
/// Distances are measured in the unrolled `(arc length, height)` plane,
/// which is the geodesic metric of the surface. Weights are
/// `W_mn = exp(−r_mn² / alpha)`, hard-thresholded per vertex to the `kappa`
/// strongest edges and symmetrized by the elementwise maximum. Vertices are
/// reordered so the Fiedler eigenvector `u_2` is nondecreasing. Placement is
/// uniform in arc length, i.e. uniform in surface area.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwissRollParams {
    pub n: usize,
    pub alpha: f64,
    pub kappa: usize,
    pub seed: u64,
}

impl SwissRollParams {
    pub const T_MIN: f64 = 1.5 * std::f64::consts::PI;
    pub const T_MAX: f64 = 4.5 * std::f64::consts::PI;
    pub const HEIGHT: f64 = 45.0;

    pub fn new(n: usize, alpha: f64, kappa: usize, seed: u64) -> Self {
        Self { n, alpha, kappa, seed }
    }

    /// Arc length of the spiral `(t cos t, t sin t)` from 0 to `t`.
    fn arc_length(t: f64) -> f64 {
        0.5 * (t * (1.0 + t * t).sqrt() + t.asinh())
    }

    fn build(&self) -> Result<Graph> {
        if self.n < 2 {
            return Err(Error::InvalidParameter("swiss roll needs at least 2 vertices".into()));
        }
        if self.kappa == 0 || self.kappa >= self.n {
            return Err(Error::InvalidParameter(format!(
                "kappa must be in 1..N, got {} for N = {}",
                self.kappa, self.n
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter("alpha must be positive".into()));
        }

        let n = self.n;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (s_lo, s_hi) = (Self::arc_length(Self::T_MIN), Self::arc_length(Self::T_MAX));
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let s: f64 = rng.random_range(s_lo..s_hi);
            let h: f64 = rng.random_range(0.0..Self::HEIGHT);
            pts.push((s, h));
        }

        let mut full = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let ds = pts[i].0 - pts[j].0;
                    let dh = pts[i].1 - pts[j].1;
                    full[(i, j)] = (-(ds * ds + dh * dh) / self.alpha).exp();
                }
            }
        }

        // Keep the kappa strongest edges per vertex; grow kappa if the result
        // is disconnected.
        let mut kappa = self.kappa;
        let w = loop {
            let mut thr = Array2::zeros((n, n));
            for i in 0..n {
                let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                order.sort_by(|&a, &b| {
                    full[(i, b)]
                        .partial_cmp(&full[(i, a)])
                        .unwrap()
                        .then(a.cmp(&b))
                });
                for &j in order.iter().take(kappa) {
                    thr[(i, j)] = full[(i, j)];
                }
            }
            // symmetrize by max
            for i in 0..n {
                for j in 0..i {
                    let m = thr[(i, j)].max(thr[(j, i)]);
                    thr[(i, j)] = m;
                    thr[(j, i)] = m;
                }
            }
            let candidate = Graph { weights: thr, kind: GraphKind::Undirected };
            if candidate.is_connected() || kappa + 1 >= n {
                break candidate;
            }
            kappa += 1;
        };

        // Reorder vertices so the Fiedler eigenvector is nondecreasing.
        let lap = w.laplacian()?;
        let (_, vecs) = lap
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Eigen(format!("fiedler decomposition: {e}")))?;
        let mut fiedler: Vec<f64> = vecs.column(1).to_vec();
        let peak = (0..n)
            .max_by(|&a, &b| {
                fiedler[a]
                    .abs()
                    .partial_cmp(&fiedler[b].abs())
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap();
        if fiedler[peak] < 0.0 {
            fiedler.iter_mut().for_each(|v| *v = -*v);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fiedler[a].partial_cmp(&fiedler[b]).unwrap().then(a.cmp(&b)));
        let mut perm = Array2::zeros((n, n));
        for (new, &old) in order.iter().enumerate() {
            for (new2, &old2) in order.iter().enumerate() {
                perm[(new, new2)] = w.weights[(old, old2)];
            }
        }
        Ok(Graph { weights: perm, kind: GraphKind::Undirected })
    }
}

/// Indicator matrices `A_d`, `d = 1 … D − 1`: `A_d(m, n) = 1` exactly when
/// the shortest walk between `m` and `n` has length `d`.
#[derive(Debug, Clone)]
pub struct DistanceMatrices {
    mats: Vec<Array2<f64>>,
    max_distance: usize,
    n: usize,
}

impl DistanceMatrices {
    /// `A_d` for `d ≥ 1`.
    pub fn at(&self, d: usize) -> &Array2<f64> {
        &self.mats[d - 1]
    }

    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Builds the per-distance indicators by the Boolean-product recursion
/// `A_d = (A ⊙ A_{d−1}) ∘ (1 − reach_{d−1})`, where `reach_{d−1}` accumulates
/// `I + A_1 + … + A_{d−1}`. Masking with the cumulative reach (rather than
/// `A_{d−1}` alone) keeps each pair in exactly one `A_d`.
pub fn distance_matrices(g: &Graph, max_d: usize) -> Result<DistanceMatrices> {
    if g.kind() != GraphKind::Undirected {
        return Err(Error::UnsupportedKind("distance matrices need an undirected graph".into()));
    }
    if max_d < 1 {
        return Err(Error::InvalidParameter("max_d must be at least 1".into()));
    }
    let n = g.n();
    let a = g.adjacency();
    let mut mats = Vec::new();
    let mut reach: Array2<f64> = Array2::eye(n);
    if max_d >= 2 {
        reach = &reach + &a;
        mats.push(a.clone());
        for _ in 2..max_d {
            let prev = mats.last().unwrap();
            let walk = a.dot(prev); // Boolean product: nonzero entry = connecting walk exists
            let mut next = Array2::zeros((n, n));
            let mut any = false;
            for i in 0..n {
                for j in 0..n {
                    if walk[(i, j)] > 0.0 && reach[(i, j)] == 0.0 {
                        next[(i, j)] = 1.0;
                        any = true;
                    }
                }
            }
            reach = &reach + &next;
            mats.push(next);
            if !any {
                // graph diameter reached; remaining matrices stay zero
            }
        }
    }
    Ok(DistanceMatrices { mats, max_distance: max_d, n })
}

/// Vertex-domain window matrix `P_D = g(0) I + g(1) A_1 + … + g(D−1) A_{D−1}`.
pub fn window_matrix(dm: &DistanceMatrices, taps: &[f64]) -> Result<Array2<f64>> {
    if taps.len() != dm.max_distance() {
        return Err(Error::DimensionMismatch(format!(
            "expected {} taps (one per distance 0..{}), got {}",
            dm.max_distance(),
            dm.max_distance() - 1,
            taps.len()
        )));
    }
    let n = dm.n();
    let mut p = Array2::<f64>::eye(n) * taps[0];
    for (d, &g) in taps.iter().enumerate().skip(1) {
        p = p + dm.at(d) * g;
    }
    Ok(p)
}

/// Compressed sparse row matrix; just enough for repeated `y = M x`.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_dense(m: &Array2<f64>) -> Self {
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    col_idx.push(j);
                    values.push(m[(i, j)]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { n, row_ptr, col_idx, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &Array1<f64>) -> Array1<f64> {
        let mut y = Array1::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[idx] * x[self.col_idx[idx]];
            }
            y[i] = acc;
        }
        y
    }
}
