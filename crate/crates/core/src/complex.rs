//! Oriented simplicial 2-complexes, their incidence matrices and the
//! discrete calculus built on them.
//!
//! Nodes are stored in increasing label order and every edge `[i, j]` and
//! triangle `[i, j, k]` is stored with increasing node labels. Because the
//! node list is sorted, increasing labels and increasing node *indices*
//! coincide, so the internal representation works purely with indices.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A node label. Integers order numerically, names lexicographically, and
/// every integer sorts before every name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeId {
    Int(i64),
    Name(String),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Int(i) => write!(f, "{i}"),
            NodeId::Name(s) => f.write_str(s),
        }
    }
}

impl From<i64> for NodeId {
    fn from(v: i64) -> Self {
        NodeId::Int(v)
    }
}

impl From<&str> for NodeId {
    fn from(v: &str) -> Self {
        NodeId::Name(v.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(v: String) -> Self {
        NodeId::Name(v)
    }
}

/// Simplex dimension a cochain lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Degree {
    Node,
    Edge,
    Triangle,
}

impl Degree {
    pub fn as_usize(self) -> usize {
        match self {
            Degree::Node => 0,
            Degree::Edge => 1,
            Degree::Triangle => 2,
        }
    }
}

/// A real-valued function on the oriented simplices of one degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    degree: Degree,
    values: DVector<f64>,
}

impl Cochain {
    pub fn new(degree: Degree, values: DVector<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Usage(format!(
                "{degree:?} cochain has a non-finite value at position {i}"
            )));
        }
        Ok(Self { degree, values })
    }

    pub fn zeros(degree: Degree, len: usize) -> Self {
        Self {
            degree,
            values: DVector::zeros(len),
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_values(self) -> DVector<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The five Laplacians of a 2-complex.
#[derive(Clone, Debug)]
pub struct Laplacians {
    /// Graph Laplacian `B1 B1ᵀ`.
    pub l0: DMatrix<f64>,
    /// Hodge Laplacian `Ld + Lu`.
    pub l1: DMatrix<f64>,
    /// Down Laplacian `B1ᵀ B1`.
    pub ld: DMatrix<f64>,
    /// Up Laplacian `B2 B2ᵀ`.
    pub lu: DMatrix<f64>,
    /// Triangle Laplacian `B2ᵀ B2`.
    pub l2: DMatrix<f64>,
}

/// An oriented simplicial 2-complex.
#[derive(Clone, Debug)]
pub struct SimplicialComplex2 {
    nodes: Vec<NodeId>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    /// Edge indices of `[i,j]`, `[i,k]`, `[j,k]` for each triangle.
    triangle_edges: Vec<[usize; 3]>,
    edge_lookup: HashMap<[usize; 2], usize>,
    node_lookup: HashMap<NodeId, usize>,
}

/// Signs of the boundary edges `[i,j]`, `[i,k]`, `[j,k]` of triangle `[i,j,k]`.
pub const TRIANGLE_BOUNDARY_SIGNS: [i8; 3] = [1, -1, 1];

impl SimplicialComplex2 {
    /// Builds a complex from labelled simplices.
    ///
    /// Edges and triangles may be given in any vertex order; they are stored
    /// with increasing labels. With `infer_triangles` every 3-clique of the
    /// graph is closed as a triangle in addition to those listed.
    pub fn build(
        nodes: Vec<NodeId>,
        edges: Vec<[NodeId; 2]>,
        triangles: Vec<[NodeId; 3]>,
        infer_triangles: bool,
    ) -> Result<Self> {
        let mut sorted_nodes = nodes;
        sorted_nodes.sort();
        for w in sorted_nodes.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Structural(format!("duplicate node {}", w[0])));
            }
        }
        let node_lookup: HashMap<NodeId, usize> = sorted_nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let index_of = |n: &NodeId, what: &str| -> Result<usize> {
            node_lookup
                .get(n)
                .copied()
                .ok_or_else(|| Error::Structural(format!("{what} references undeclared node {n}")))
        };

        let mut edge_set = BTreeSet::new();
        for [a, b] in &edges {
            let (i, j) = (index_of(a, "edge")?, index_of(b, "edge")?);
            if i == j {
                return Err(Error::Structural(format!("self-loop on node {a}")));
            }
            if !edge_set.insert([i.min(j), i.max(j)]) {
                return Err(Error::Structural(format!("duplicate edge [{a},{b}]")));
            }
        }

        let mut tri_set = BTreeSet::new();
        for [a, b, c] in &triangles {
            let mut t = [
                index_of(a, "triangle")?,
                index_of(b, "triangle")?,
                index_of(c, "triangle")?,
            ];
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::Structural(format!(
                    "triangle [{a},{b},{c}] repeats a node"
                )));
            }
            for pair in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if !edge_set.contains(&pair) {
                    return Err(Error::Structural(format!(
                        "triangle [{a},{b},{c}] has undeclared boundary edge [{},{}]",
                        sorted_nodes[pair[0]], sorted_nodes[pair[1]]
                    )));
                }
            }
            if !tri_set.insert(t) {
                return Err(Error::Structural(format!(
                    "duplicate triangle [{a},{b},{c}]"
                )));
            }
        }

        if infer_triangles {
            let mut adjacency = vec![HashSet::new(); sorted_nodes.len()];
            for &[i, j] in &edge_set {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
            for &[i, j] in &edge_set {
                for &k in &adjacency[j] {
                    if k > j && adjacency[i].contains(&k) {
                        tri_set.insert([i, j, k]);
                    }
                }
            }
        }

        Ok(Self::from_sorted_parts(
            sorted_nodes,
            edge_set.into_iter().collect(),
            tri_set.into_iter().collect(),
        ))
    }

    /// Integer-labelled convenience constructor.
    pub fn from_indices(
        nodes: impl IntoIterator<Item = i64>,
        edges: &[[i64; 2]],
        triangles: &[[i64; 3]],
        infer_triangles: bool,
    ) -> Result<Self> {
        Self::build(
            nodes.into_iter().map(NodeId::Int).collect(),
            edges.iter().map(|e| e.map(NodeId::Int)).collect(),
            triangles.iter().map(|t| t.map(NodeId::Int)).collect(),
            infer_triangles,
        )
    }

    fn from_sorted_parts(
        nodes: Vec<NodeId>,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
    ) -> Self {
        let edge_lookup: HashMap<[usize; 2], usize> =
            edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let triangle_edges = triangles
            .iter()
            .map(|&[i, j, k]| {
                [
                    edge_lookup[&[i, j]],
                    edge_lookup[&[i, k]],
                    edge_lookup[&[j, k]],
                ]
            })
            .collect();
        let node_lookup = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Self {
            nodes,
            edges,
            triangles,
            triangle_edges,
            edge_lookup,
            node_lookup,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Number of simplices of the given degree.
    pub fn count(&self, degree: Degree) -> usize {
        match degree {
            Degree::Node => self.num_nodes(),
            Degree::Edge => self.num_edges(),
            Degree::Triangle => self.num_triangles(),
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges as pairs of node indices `i < j`.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Triangles as triples of node indices `i < j < k`.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edge indices of the boundary `[i,j]`, `[i,k]`, `[j,k]` of each triangle.
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.node_lookup.get(id).copied()
    }

    /// Index of the edge between two nodes and the sign relating the given
    /// orientation `a -> b` to the stored one.
    pub fn oriented_edge(&self, a: &NodeId, b: &NodeId) -> Option<(usize, f64)> {
        let (i, j) = (self.node_index(a)?, self.node_index(b)?);
        let key = [i.min(j), i.max(j)];
        let idx = *self.edge_lookup.get(&key)?;
        Some((idx, if i < j { 1.0 } else { -1.0 }))
    }

    /// Index of a triangle and the parity of the given vertex order relative
    /// to the stored increasing order.
    pub fn oriented_triangle(&self, a: &NodeId, b: &NodeId, c: &NodeId) -> Option<(usize, f64)> {
        let mut v = [
            self.node_index(a)?,
            self.node_index(b)?,
            self.node_index(c)?,
        ];
        // parity of the permutation by counting bubble-sort swaps
        let mut sign = 1.0;
        for pass in 0..2 {
            for p in 0..2 - pass {
                if v[p] > v[p + 1] {
                    v.swap(p, p + 1);
                    sign = -sign;
                }
            }
        }
        let idx = self.triangles.binary_search(&v).ok()?;
        Some((idx, sign))
    }

    /// `i-j` label of an edge.
    pub fn edge_label(&self, e: usize) -> String {
        let [i, j] = self.edges[e];
        format!("{}-{}", self.nodes[i], self.nodes[j])
    }

    /// `i-j-k` label of a triangle.
    pub fn triangle_label(&self, t: usize) -> String {
        let [i, j, k] = self.triangles[t];
        format!("{}-{}-{}", self.nodes[i], self.nodes[j], self.nodes[k])
    }

    pub fn simplex_label(&self, degree: Degree, idx: usize) -> String {
        match degree {
            Degree::Node => self.nodes[idx].to_string(),
            Degree::Edge => self.edge_label(idx),
            Degree::Triangle => self.triangle_label(idx),
        }
    }

    /// Nonzero entries `(node, edge, sign)` of `B1`.
    pub fn b1_triplets(&self) -> Vec<(usize, usize, i8)> {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(e, &[i, j])| [(i, e, -1), (j, e, 1)])
            .collect()
    }

    /// Nonzero entries `(edge, triangle, sign)` of `B2`.
    pub fn b2_triplets(&self) -> Vec<(usize, usize, i8)> {
        self.triangle_edges
            .iter()
            .enumerate()
            .flat_map(|(t, es)| {
                es.iter()
                    .zip(TRIANGLE_BOUNDARY_SIGNS)
                    .map(move |(&e, s)| (e, t, s))
            })
            .collect()
    }

    /// Node-to-edge incidence matrix, `N0 x N1`, integer entries.
    pub fn b1_int(&self) -> DMatrix<i64> {
        dense_from_triplets(self.num_nodes(), self.num_edges(), &self.b1_triplets())
    }

    /// Edge-to-triangle incidence matrix, `N1 x N2`, integer entries.
    pub fn b2_int(&self) -> DMatrix<i64> {
        dense_from_triplets(self.num_edges(), self.num_triangles(), &self.b2_triplets())
    }

    pub fn b1(&self) -> DMatrix<f64> {
        self.b1_int().map(|v| v as f64)
    }

    pub fn b2(&self) -> DMatrix<f64> {
        self.b2_int().map(|v| v as f64)
    }

    pub fn laplacians(&self) -> Laplacians {
        let b1 = self.b1();
        let b2 = self.b2();
        let ld = b1.transpose() * &b1;
        let lu = &b2 * b2.transpose();
        Laplacians {
            l0: &b1 * b1.transpose(),
            l1: &ld + &lu,
            l2: b2.transpose() * &b2,
            ld,
            lu,
        }
    }

    /// Line-graph Laplacian over edges, `diag(A 1) - A` with
    /// `A = |B1ᵀ B1 - 2 I|`. Triangles play no role.
    pub fn line_graph_laplacian(&self) -> DMatrix<f64> {
        let b1 = self.b1();
        let n = self.num_edges();
        let adjacency = (b1.transpose() * &b1 - DMatrix::identity(n, n) * 2.0).abs();
        let degree = adjacency.column_sum();
        DMatrix::from_diagonal(&degree) - adjacency
    }

    fn expect(&self, f: &Cochain, degree: Degree, op: &str) -> Result<()> {
        if f.degree != degree {
            return Err(Error::Usage(format!(
                "{op} expects a {degree:?} cochain, got {:?}",
                f.degree
            )));
        }
        if f.len() != self.count(degree) {
            return Err(Error::Usage(format!(
                "{op}: cochain has length {} but the complex has {} {degree:?} simplices",
                f.len(),
                self.count(degree)
            )));
        }
        Ok(())
    }

    /// Builds a cochain after checking its length against this complex.
    pub fn cochain(&self, degree: Degree, values: DVector<f64>) -> Result<Cochain> {
        let c = Cochain::new(degree, values)?;
        self.expect(&c, degree, "cochain")?;
        Ok(c)
    }

    /// `B1ᵀ f0`: the difference of node values along each edge.
    pub fn grad(&self, f0: &Cochain) -> Result<Cochain> {
        self.expect(f0, Degree::Node, "grad")?;
        Ok(Cochain {
            degree: Degree::Edge,
            values: self.grad_values(f0.values()),
        })
    }

    /// `B1 f1`: net flow at each node.
    pub fn div(&self, f1: &Cochain) -> Result<Cochain> {
        self.expect(f1, Degree::Edge, "div")?;
        Ok(Cochain {
            degree: Degree::Node,
            values: self.div_values(f1.values()),
        })
    }

    /// `B2ᵀ f1`: net circulation around each triangle.
    pub fn curl(&self, f1: &Cochain) -> Result<Cochain> {
        self.expect(f1, Degree::Edge, "curl")?;
        Ok(Cochain {
            degree: Degree::Triangle,
            values: self.curl_values(f1.values()),
        })
    }

    /// `B2 f2`: the edge flow circulating around triangles.
    pub fn curl_adjoint(&self, f2: &Cochain) -> Result<Cochain> {
        self.expect(f2, Degree::Triangle, "curl_adjoint")?;
        Ok(Cochain {
            degree: Degree::Edge,
            values: self.curl_adjoint_values(f2.values()),
        })
    }

    pub(crate) fn grad_values(&self, f0: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.num_edges(),
            self.edges.iter().map(|&[i, j]| f0[j] - f0[i]),
        )
    }

    pub(crate) fn div_values(&self, f1: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.num_nodes());
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            out[i] -= f1[e];
            out[j] += f1[e];
        }
        out
    }

    pub(crate) fn curl_values(&self, f1: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.num_triangles(),
            self.triangle_edges
                .iter()
                .map(|&[ij, ik, jk]| f1[ij] - f1[ik] + f1[jk]),
        )
    }

    pub(crate) fn curl_adjoint_values(&self, f2: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.num_edges());
        for (t, es) in self.triangle_edges.iter().enumerate() {
            for (&e, s) in es.iter().zip(TRIANGLE_BOUNDARY_SIGNS) {
                out[e] += f64::from(s) * f2[t];
            }
        }
        out
    }

    /// Connected components of the underlying graph, as sorted node index lists.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.num_nodes();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &[i, j] in &self.edges {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Sub-complex induced by a set of node indices.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let keep_set: HashSet<usize> = keep.iter().copied().collect();
        let mut kept: Vec<usize> = keep_set.iter().copied().collect();
        kept.sort_unstable();
        let remap: HashMap<usize, usize> = kept
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let nodes = kept.iter().map(|&i| self.nodes[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|v| keep_set.contains(v)))
            .map(|e| e.map(|v| remap[&v]))
            .collect();
        let triangles = self
            .triangles
            .iter()
            .filter(|t| t.iter().all(|v| keep_set.contains(v)))
            .map(|t| t.map(|v| remap[&v]))
            .collect();
        Self::from_sorted_parts(nodes, edges, triangles)
    }

    /// Edge list with node labels, in storage order.
    pub fn labelled_edges(&self) -> Vec<[NodeId; 2]> {
        self.edges
            .iter()
            .map(|e| e.map(|v| self.nodes[v].clone()))
            .collect()
    }

    /// Triangle list with node labels, in storage order.
    pub fn labelled_triangles(&self) -> Vec<[NodeId; 3]> {
        self.triangles
            .iter()
            .map(|t| t.map(|v| self.nodes[v].clone()))
            .collect()
    }
}

fn dense_from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i8)]) -> DMatrix<i64> {
    let mut m = DMatrix::zeros(rows, cols);
    for &(r, c, v) in triplets {
        m[(r, c)] = i64::from(v);
    }
    m
}
