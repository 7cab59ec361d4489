//! Spin-lattice graphs, edge colorings and circuit-cost accounting.
//!
//! Heavy-hex fragments come from one fixed 130-qubit patch: six rows of row
//! qubits joined by bridge qubits every fourth column, with the bridge offset
//! alternating between row gaps. Vertices are relabelled in breadth-first
//! order from a central degree-3 qubit, so every fragment is a prefix of the
//! same ordering and the fifteen named layouts are nested.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected connected graph on vertices `0..n_vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRecord", into = "GraphRecord")]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    layout_id: Option<String>,
    adjacency: Vec<Vec<usize>>,
}

/// On-disk form: `{"n_vertices": n, "edges": [[u, v], ...], "layout_id": ...}`.
#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    layout_id: Option<String>,
}

impl TryFrom<GraphRecord> for Graph {
    type Error = Error;

    fn try_from(r: GraphRecord) -> Result<Self> {
        Graph::new(
            r.n_vertices,
            r.edges.into_iter().map(|[u, v]| (u, v)).collect(),
            r.layout_id,
        )
    }
}

impl From<Graph> for GraphRecord {
    fn from(g: Graph) -> Self {
        GraphRecord {
            n_vertices: g.n_vertices,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            layout_id: g.layout_id,
        }
    }
}

impl Graph {
    /// Validates and builds a graph. Each edge is stored lower index first;
    /// edge order is otherwise preserved.
    pub fn new(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        layout_id: Option<String>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut seen = HashMap::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) references a vertex >= {n_vertices}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if seen.insert(e, i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {e:?}")));
            }
            normalized.push(e);
            adjacency[e.0].push(e.1);
            adjacency[e.1].push(e.0);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let g = Graph {
            n_vertices,
            edges: normalized,
            layout_id,
            adjacency,
        };
        if g.bfs_distances(0).iter().any(Option::is_none) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        Graph::new(n, (1..n).map(|v| (v - 1, v)).collect(), Some(format!("path-{n}")))
    }

    /// Cycle graph on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph("a cycle needs at least 3 vertices".into()));
        }
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Graph::new(n, edges, Some(format!("cycle-{n}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization is infallible")
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn layout_id(&self) -> Option<&str> {
        self.layout_id.as_deref()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_vertices];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn eccentricity(&self, v: usize) -> Option<usize> {
        self.bfs_distances(v)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
    }

    /// Two-colouring of the vertices, if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n_vertices];
        for start in 0..self.n_vertices {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &w in &self.adjacency[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[usize], layout_id: Option<String>) -> Result<Self> {
        let mut relabel = vec![usize::MAX; self.n_vertices];
        for (new, &old) in vertices.iter().enumerate() {
            relabel[old] = new;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let (na, nb) = (relabel[a], relabel[b]);
                (na != usize::MAX && nb != usize::MAX).then(|| (na.min(nb), na.max(nb)))
            })
            .collect();
        edges.sort_unstable();
        Graph::new(vertices.len(), edges, layout_id)
    }
}

/// Exact diameter by breadth-first search from every vertex.
pub fn graph_diameter(g: &Graph) -> Result<usize> {
    (0..g.n_vertices()).try_fold(0, |acc, v| {
        g.eccentricity(v)
            .map(|e| acc.max(e))
            .ok_or_else(|| Error::InvalidGraph("diameter of a disconnected graph".into()))
    })
}

// ---------------------------------------------------------------------------
// Heavy-hex layouts

/// Inclusive column span of each row of row qubits in the base patch.
const ROW_SPANS: [(usize, usize); 6] = [(0, 19), (1, 19), (3, 19), (4, 19), (1, 19), (0, 18)];

/// Vertex counts of the nested layouts 1..=15.
pub const LAYOUT_SIZES: [usize; 15] = [4, 7, 10, 13, 19, 27, 33, 40, 52, 64, 75, 87, 102, 116, 130];

/// Number of named heavy-hex layouts.
pub const N_LAYOUTS: usize = LAYOUT_SIZES.len();

/// The full base patch, vertices in breadth-first order from its centre.
fn heavy_hex_base() -> Graph {
    // (row coordinate, column): row qubits sit on even rows, bridges on odd.
    let mut coords: Vec<(usize, usize)> = Vec::new();
    for (r, &(a, b)) in ROW_SPANS.iter().enumerate() {
        coords.extend((a..=b).map(|c| (2 * r, c)));
    }
    for r in 0..ROW_SPANS.len() - 1 {
        let offset = if r % 2 == 0 { 0 } else { 2 };
        let lo = ROW_SPANS[r].0.max(ROW_SPANS[r + 1].0);
        let hi = ROW_SPANS[r].1.min(ROW_SPANS[r + 1].1);
        coords.extend((lo..=hi).filter(|c| c % 4 == offset).map(|c| (2 * r + 1, c)));
    }
    coords.sort_unstable();
    let index: HashMap<(usize, usize), usize> =
        coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();

    let mut edges = Vec::new();
    for (i, &(y, x)) in coords.iter().enumerate() {
        if y % 2 == 0 {
            if let Some(&j) = index.get(&(y, x + 1)) {
                edges.push((i, j));
            }
        } else {
            edges.push((index[&(y - 1, x)], i));
            edges.push((i, index[&(y + 1, x)]));
        }
    }
    let grid = Graph::new(coords.len(), edges, None).expect("base patch is a valid graph");

    // Most central degree-3 vertex; ties go to the lowest canonical index.
    let start = (0..grid.n_vertices())
        .filter(|&v| grid.degree(v) == 3)
        .min_by_key(|&v| (grid.eccentricity(v).unwrap(), v))
        .expect("base patch has degree-3 vertices");
    let mut order = Vec::with_capacity(grid.n_vertices());
    let mut seen = vec![false; grid.n_vertices()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in grid.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    grid.induced(&order, None).expect("relabelling preserves validity")
}

/// Named layout `index` in `1..=15`; layout 15 is the full 130-qubit patch.
pub fn heavy_hex_layout(index: usize) -> Result<Graph> {
    if !(1..=N_LAYOUTS).contains(&index) {
        return Err(Error::InvalidParameter(format!(
            "layout index {index} outside 1..={N_LAYOUTS}"
        )));
    }
    let n = LAYOUT_SIZES[index - 1];
    let base = heavy_hex_base();
    let order: Vec<usize> = (0..n).collect();
    base.induced(&order, Some(format!("heavy-hex-L{index}")))
}

/// Connected heavy-hex fragment with exactly `size` vertices.
pub fn heavy_hex_fragment(size: usize) -> Result<Graph> {
    let max = LAYOUT_SIZES[N_LAYOUTS - 1];
    if size < 2 {
        return Err(Error::InvalidParameter(format!(
            "heavy-hex fragment needs at least 2 vertices, got {size}"
        )));
    }
    if size > max {
        return Err(Error::SizeLimit {
            what: "heavy-hex fragment size",
            actual: size,
            limit: max,
        });
    }
    let order: Vec<usize> = (0..size).collect();
    heavy_hex_base().induced(&order, Some(format!("heavy-hex-n{size}")))
}

// ---------------------------------------------------------------------------
// Edge coloring

/// Proper edge coloring; `color_of_edge[i]` colours `graph.edges()[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    color_of_edge: Vec<usize>,
    n_colors: usize,
}

impl EdgeColoring {
    pub fn new(color_of_edge: Vec<usize>) -> Self {
        let n_colors = color_of_edge.iter().map(|&c| c + 1).max().unwrap_or(0);
        EdgeColoring {
            color_of_edge,
            n_colors,
        }
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    pub fn color_of_edge(&self) -> &[usize] {
        &self.color_of_edge
    }

    /// Edge indices grouped by colour, each class in edge-list order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.n_colors];
        for (e, &c) in self.color_of_edge.iter().enumerate() {
            classes[c].push(e);
        }
        classes
    }

    /// Checks that this colouring belongs to `g` and is proper.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.color_of_edge.len() != g.n_edges() {
            return Err(Error::InvalidParameter(format!(
                "colouring has {} edges, graph has {}",
                self.color_of_edge.len(),
                g.n_edges()
            )));
        }
        let mut used = vec![Vec::new(); g.n_vertices()];
        for (&(a, b), &c) in g.edges().iter().zip(&self.color_of_edge) {
            for v in [a, b] {
                if used[v].contains(&c) {
                    return Err(Error::InvalidParameter(format!(
                        "colour {c} repeats at vertex {v}"
                    )));
                }
                used[v].push(c);
            }
        }
        Ok(())
    }
}

/// Working state shared by both colouring routines: for each vertex and
/// colour, the neighbour reached through an edge of that colour.
struct ColorTable {
    at: Vec<Vec<Option<usize>>>,
    color: HashMap<(usize, usize), usize>,
}

impl ColorTable {
    fn new(n: usize, palette: usize) -> Self {
        ColorTable {
            at: vec![vec![None; palette]; n],
            color: HashMap::new(),
        }
    }

    fn key(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.color.get(&Self::key(u, v)).copied()
    }

    fn set(&mut self, u: usize, v: usize, c: Option<usize>) {
        if let Some(old) = self.color.remove(&Self::key(u, v)) {
            self.at[u][old] = None;
            self.at[v][old] = None;
        }
        if let Some(c) = c {
            debug_assert!(self.at[u][c].is_none() && self.at[v][c].is_none());
            self.at[u][c] = Some(v);
            self.at[v][c] = Some(u);
            self.color.insert(Self::key(u, v), c);
        }
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn first_free(&self, v: usize) -> usize {
        self.at[v].iter().position(Option::is_none).expect("palette exhausted")
    }

    /// Swaps colours `a` and `b` along the maximal path that leaves `start`
    /// through its `a`-coloured edge.
    fn swap_path(&mut self, start: usize, a: usize, b: usize) {
        let mut path = Vec::new();
        let (mut v, mut c) = (start, a);
        while let Some(w) = self.at[v][c] {
            path.push((v, w, c));
            v = w;
            c = if c == a { b } else { a };
        }
        for &(u, w, _) in &path {
            self.set(u, w, None);
        }
        for (u, w, c) in path {
            self.set(u, w, Some(if c == a { b } else { a }));
        }
    }
}

/// Proper edge colouring of `g`.
///
/// Bipartite graphs get Δ colours by alternating-path recolouring (König);
/// other graphs get at most Δ + 1 colours via fan rotation (Misra–Gries).
/// Edges are processed in edge-list order.
pub fn color_edges(g: &Graph) -> EdgeColoring {
    let delta = g.max_degree();
    let table = if g.bipartition().is_some() {
        color_bipartite(g, delta)
    } else {
        color_misra_gries(g, delta + 1)
    };
    EdgeColoring::new(
        g.edges()
            .iter()
            .map(|&(a, b)| table.get(a, b).expect("every edge is coloured"))
            .collect(),
    )
}

fn color_bipartite(g: &Graph, palette: usize) -> ColorTable {
    let mut t = ColorTable::new(g.n_vertices(), palette);
    for &(u, v) in g.edges() {
        let a = t.first_free(u);
        if !t.is_free(v, a) {
            let b = t.first_free(v);
            // The a/b path from v cannot reach u in a bipartite graph.
            t.swap_path(v, a, b);
        }
        t.set(u, v, Some(a));
    }
    t
}

fn color_misra_gries(g: &Graph, palette: usize) -> ColorTable {
    let mut t = ColorTable::new(g.n_vertices(), palette);
    for &(u, v) in g.edges() {
        // Maximal fan of u starting at v.
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = g.neighbors(u).iter().copied().find(|&w| {
                !fan.contains(&w) && t.get(u, w).is_some_and(|c| t.is_free(last, c))
            });
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let c = t.first_free(u);
        let d = t.first_free(*fan.last().unwrap());
        if c != d {
            t.swap_path(u, d, c);
        }
        // First fan vertex with d free whose prefix is still a fan.
        let mut end = None;
        for (i, &w) in fan.iter().enumerate() {
            if i > 0 {
                let still_fan = t.get(u, w).is_some_and(|col| t.is_free(fan[i - 1], col));
                if !still_fan {
                    break;
                }
            }
            if t.is_free(w, d) {
                end = Some(i);
                break;
            }
        }
        let end = end.expect("fan rotation always finds a vertex with d free");
        for i in 0..end {
            let next_color = t.get(u, fan[i + 1]);
            t.set(u, fan[i + 1], None);
            t.set(u, fan[i], next_color);
        }
        t.set(u, fan[end], Some(d));
    }
    t
}

// ---------------------------------------------------------------------------
// Circuit cost

/// Gate count and layer depth for one gate type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTally {
    pub count: usize,
    pub layers: usize,
}

/// Per-gate-type cost of the full two-point-measurement circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub n_qubits: usize,
    pub n_edges: usize,
    pub n_colors: usize,
    pub n_trotter: usize,
    pub ry: GateTally,
    pub mid_measure: GateTally,
    pub rz: GateTally,
    pub rxx: GateTally,
    pub final_measure: GateTally,
    pub total_depth: usize,
    pub total_ops: usize,
}

impl CostReport {
    pub fn from_counts(
        n_qubits: usize,
        n_edges: usize,
        n_colors: usize,
        n_trotter: usize,
    ) -> Result<Self> {
        if n_trotter == 0 {
            return Err(Error::InvalidParameter("n_T must be at least 1".into()));
        }
        let n = n_qubits;
        let ry = GateTally { count: n, layers: 1 };
        let mid_measure = GateTally { count: n, layers: 1 };
        let rz = GateTally {
            count: n * (n_trotter + 1),
            layers: n_trotter + 1,
        };
        let rxx = GateTally {
            count: n_edges * n_trotter,
            layers: n_colors * n_trotter,
        };
        let final_measure = GateTally { count: n, layers: 1 };
        let parts = [ry, mid_measure, rz, rxx, final_measure];
        Ok(CostReport {
            n_qubits,
            n_edges,
            n_colors,
            n_trotter,
            ry,
            mid_measure,
            rz,
            rxx,
            final_measure,
            total_depth: parts.iter().map(|p| p.layers).sum(),
            total_ops: parts.iter().map(|p| p.count).sum(),
        })
    }
}

/// Cost of the drive circuit on `g` with `n_trotter` steps.
pub fn circuit_cost(g: &Graph, n_trotter: usize) -> Result<CostReport> {
    let coloring = color_edges(g);
    CostReport::from_counts(g.n_vertices(), g.n_edges(), coloring.n_colors(), n_trotter)
}
