//! Coloured graphs and relaxed local models.
//!
//! A coloured graph is an undirected graph `G = (V, E)` together with a
//! partition of `V` into vertex colour classes and a partition of `E` into
//! edge colour classes. The colouring encodes equality constraints on a
//! Gaussian precision matrix: diagonal entries are equal within a vertex
//! class, off-diagonal entries are equal within an edge class, and non-edges
//! are zero.
//!
//! For distributed estimation every vertex `i` gets a *relaxed local model*
//! built from its one-hop or two-hop neighbourhood `N_i`:
//!
//! * the *buffer* `B_i` holds the vertices of `N_i` with at least one
//!   neighbour outside `N_i`; the *protected* set is `P_i = N_i \ B_i`;
//! * edges with at least one protected endpoint are preserved together with
//!   their colours, while the buffer block `B_i × B_i` is completed and left
//!   colour-free (every buffer diagonal entry and buffer-block edge is its
//!   own fresh singleton class with no global counterpart).
//!
//! Marginalizing a Gaussian over `N_i` confines inversion fill-in to the
//! buffer block, so the protected rows of the local precision matrix coincide
//! with the global ones — that is what makes local estimates combinable.
//!
//! Vertices are indexed `0..p` everywhere in this crate; user-facing 1-based
//! labels are translated at the CLI boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Which of the two partitions a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Vertex,
    Edge,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKind::Vertex => write!(f, "vertex"),
            ClassKind::Edge => write!(f, "edge"),
        }
    }
}

/// A single defect found while validating a coloured graph.
///
/// Violations are data, not errors: validation returns all of them so a
/// config author can fix everything in one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Edge endpoint outside `0..p`.
    EdgeOutOfRange { edge: (usize, usize) },
    /// Self-loop in the edge list.
    SelfLoop { vertex: usize },
    /// The same unordered pair appears twice in the edge list.
    DuplicateEdge { edge: (usize, usize) },
    /// A vertex class member outside `0..p`.
    VertexOutOfRange { class: usize, vertex: usize },
    /// An edge class member that is not an edge of the graph.
    UnknownEdge { class: usize, edge: (usize, usize) },
    /// A vertex or edge missing from, or repeated across, its partition.
    PartitionViolation { kind: ClassKind, detail: String },
    /// A class with no members.
    EmptyClass { kind: ClassKind, class: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeOutOfRange { edge } => {
                write!(f, "edge ({}, {}) has an endpoint out of range", edge.0, edge.1)
            }
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::DuplicateEdge { edge } => {
                write!(f, "duplicate edge ({}, {})", edge.0, edge.1)
            }
            Violation::VertexOutOfRange { class, vertex } => {
                write!(f, "vertex class {class} contains out-of-range vertex {vertex}")
            }
            Violation::UnknownEdge { class, edge } => write!(
                f,
                "edge class {class} contains ({}, {}) which is not an edge",
                edge.0, edge.1
            ),
            Violation::PartitionViolation { kind, detail } => {
                write!(f, "{kind} classes do not form a partition: {detail}")
            }
            Violation::EmptyClass { kind, class } => write!(f, "{kind} class {class} is empty"),
        }
    }
}

/// Normalizes an unordered pair to `(min, max)`.
fn norm_edge((a, b): (usize, usize)) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Validates candidate coloured-graph data without constructing a graph.
///
/// Returns every violation found (empty means valid). Self-loops and
/// out-of-range endpoints are reported once per offending entry; partition
/// defects name the repeated or missing item.
pub fn validate_coloured_graph(
    p: usize,
    edges: &[(usize, usize)],
    vertex_classes: &[Vec<usize>],
    edge_classes: &[Vec<(usize, usize)>],
) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut edge_set = BTreeSet::new();
    for &(a, b) in edges {
        if a == b {
            violations.push(Violation::SelfLoop { vertex: a });
            continue;
        }
        if a >= p || b >= p {
            violations.push(Violation::EdgeOutOfRange { edge: (a, b) });
            continue;
        }
        if !edge_set.insert(norm_edge((a, b))) {
            violations.push(Violation::DuplicateEdge { edge: norm_edge((a, b)) });
        }
    }

    // Vertex classes: members in range, each vertex in exactly one class.
    let mut seen_vertex: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, members) in vertex_classes.iter().enumerate() {
        if members.is_empty() {
            violations.push(Violation::EmptyClass { kind: ClassKind::Vertex, class: c });
        }
        for &v in members {
            if v >= p {
                violations.push(Violation::VertexOutOfRange { class: c, vertex: v });
                continue;
            }
            if let Some(first) = seen_vertex.insert(v, c) {
                violations.push(Violation::PartitionViolation {
                    kind: ClassKind::Vertex,
                    detail: format!("vertex {v} appears in classes {first} and {c}"),
                });
            }
        }
    }
    for v in 0..p {
        if !seen_vertex.contains_key(&v) {
            violations.push(Violation::PartitionViolation {
                kind: ClassKind::Vertex,
                detail: format!("vertex {v} belongs to no class"),
            });
        }
    }

    // Edge classes: members are real edges, each edge in exactly one class.
    let mut seen_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (c, members) in edge_classes.iter().enumerate() {
        if members.is_empty() {
            violations.push(Violation::EmptyClass { kind: ClassKind::Edge, class: c });
        }
        for &e in members {
            let e = norm_edge(e);
            if !edge_set.contains(&e) {
                violations.push(Violation::UnknownEdge { class: c, edge: e });
                continue;
            }
            if let Some(first) = seen_edge.insert(e, c) {
                violations.push(Violation::PartitionViolation {
                    kind: ClassKind::Edge,
                    detail: format!(
                        "edge ({}, {}) appears in classes {first} and {c}",
                        e.0, e.1
                    ),
                });
            }
        }
    }
    for &e in &edge_set {
        if !seen_edge.contains_key(&e) {
            violations.push(Violation::PartitionViolation {
                kind: ClassKind::Edge,
                detail: format!("edge ({}, {}) belongs to no class", e.0, e.1),
            });
        }
    }

    violations
}

/// An undirected graph with vertex and edge colour classes.
///
/// Construction validates all invariants; an existing `ColouredGraph` is
/// always well-formed. Class ids are stable: vertex class `k` has id `k`
/// (`0..T`), edge class `k` has id `T + k` (`T..T+S`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    p: usize,
    edges: Vec<(usize, usize)>,
    vertex_classes: Vec<Vec<usize>>,
    edge_classes: Vec<Vec<(usize, usize)>>,
    adjacency: Vec<Vec<usize>>,
}

impl ColouredGraph {
    /// Builds a validated coloured graph.
    ///
    /// Edge pairs may be given in either orientation; they are normalized to
    /// `(min, max)` and class member lists are sorted, so two graphs with the
    /// same content compare equal regardless of input order.
    pub fn new(
        p: usize,
        edges: Vec<(usize, usize)>,
        vertex_classes: Vec<Vec<usize>>,
        edge_classes: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self> {
        let violations = validate_coloured_graph(p, &edges, &vertex_classes, &edge_classes);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(violations));
        }

        let mut edges: Vec<_> = edges.into_iter().map(norm_edge).collect();
        edges.sort_unstable();
        let mut vertex_classes = vertex_classes;
        for members in &mut vertex_classes {
            members.sort_unstable();
        }
        let mut edge_classes: Vec<Vec<(usize, usize)>> = edge_classes
            .into_iter()
            .map(|members| members.into_iter().map(norm_edge).collect())
            .collect();
        for members in &mut edge_classes {
            members.sort_unstable();
        }

        let mut adjacency = vec![Vec::new(); p];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Self { p, edges, vertex_classes, edge_classes, adjacency })
    }

    /// Number of vertices.
    pub fn p(&self) -> usize {
        self.p
    }

    /// Edges as sorted `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertex colour classes (class `k` has id `k`).
    pub fn vertex_classes(&self) -> &[Vec<usize>] {
        &self.vertex_classes
    }

    /// Edge colour classes (class `k` has id `n_vertex_classes() + k`).
    pub fn edge_classes(&self) -> &[Vec<(usize, usize)>] {
        &self.edge_classes
    }

    /// Number of vertex colour classes (`T`).
    pub fn n_vertex_classes(&self) -> usize {
        self.vertex_classes.len()
    }

    /// Number of edge colour classes (`S`).
    pub fn n_edge_classes(&self) -> usize {
        self.edge_classes.len()
    }

    /// Total class count `T + S` — the global parameter dimension.
    pub fn n_classes(&self) -> usize {
        self.vertex_classes.len() + self.edge_classes.len()
    }

    /// Sorted neighbours of `i`.
    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    /// Whether `(a, b)` is an edge.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (a, b) = norm_edge((a, b));
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Global class id of vertex `v` (its vertex-class index).
    pub fn vertex_class_of(&self, v: usize) -> usize {
        self.vertex_classes
            .iter()
            .position(|members| members.binary_search(&v).is_ok())
            .expect("validated graph covers every vertex")
    }

    /// Global class id of edge `(a, b)` in the unified numbering `T..T+S`.
    pub fn edge_class_of(&self, a: usize, b: usize) -> Option<usize> {
        let e = norm_edge((a, b));
        self.edge_classes
            .iter()
            .position(|members| members.binary_search(&e).is_ok())
            .map(|k| self.n_vertex_classes() + k)
    }
}

/// The one-hop or two-hop neighbourhood `N_i`, in ascending vertex order.
///
/// One hop is `{i} ∪ ne(i)`; two hops additionally include the neighbours of
/// the neighbours.
pub fn neighbourhood(g: &ColouredGraph, i: usize, hops: u8) -> Result<Vec<usize>> {
    if i >= g.p() {
        return Err(Error::InvalidVertex { vertex: i, p: g.p() });
    }
    check_hops(hops)?;
    let mut set: BTreeSet<usize> = BTreeSet::new();
    set.insert(i);
    set.extend(g.neighbours(i).iter().copied());
    if hops == 2 {
        for &j in g.neighbours(i) {
            set.extend(g.neighbours(j).iter().copied());
        }
    }
    Ok(set.into_iter().collect())
}

fn check_hops(hops: u8) -> Result<()> {
    if hops == 1 || hops == 2 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("hops must be 1 or 2, got {hops}")))
    }
}

/// Splits a neighbourhood into protected and buffer vertices.
///
/// The buffer `B_i` collects the members of `N_i` with at least one neighbour
/// outside `N_i`; the protected set is the rest. Both are returned in
/// ascending order.
pub fn buffer_split(g: &ColouredGraph, n_i: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let inside: BTreeSet<usize> = n_i.iter().copied().collect();
    let mut protected = Vec::new();
    let mut buffer = Vec::new();
    for &j in n_i {
        if g.neighbours(j).iter().any(|n| !inside.contains(n)) {
            buffer.push(j);
        } else {
            protected.push(j);
        }
    }
    (protected, buffer)
}

/// The relaxed local model of a centre vertex.
///
/// `local_graph` lives on local indices `0..p_i` that are the positions of
/// the (ascending) global vertices in `vertices`. `class_map[c]` gives the
/// global class id a local class `c` inherits, or `None` for the fresh
/// singleton classes covering the buffer block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalModel {
    pub centre: usize,
    pub hops: u8,
    /// `N_i` in ascending global order; position = local index.
    pub vertices: Vec<usize>,
    /// Protected vertices (global ids, ascending).
    pub protected: Vec<usize>,
    /// Buffer vertices (global ids, ascending).
    pub buffer: Vec<usize>,
    /// The relaxed local coloured graph on `0..p_i`.
    pub local_graph: ColouredGraph,
    /// Local class id → inherited global class id (`None` = fresh buffer class).
    pub class_map: Vec<Option<usize>>,
}

impl LocalModel {
    /// Local dimension `p_i = |N_i|`.
    pub fn p_i(&self) -> usize {
        self.vertices.len()
    }

    /// Local parameter count `S_i` (number of local colour classes).
    pub fn s_i(&self) -> usize {
        self.class_map.len()
    }

    /// Local index of a global vertex, if it lies in `N_i`.
    pub fn local_index(&self, global: usize) -> Option<usize> {
        self.vertices.binary_search(&global).ok()
    }
}

/// Builds the relaxed local model of vertex `i`.
///
/// The local edge set is `E ∩ (P×P ∪ P×B ∪ B×P)` — every global edge inside
/// `N_i` with at least one protected endpoint — plus the complete buffer
/// block `B×B`. Preserved vertices and edges inherit their global classes
/// (one local class per global class, keeping within-model equality); the
/// buffer diagonal and the buffer block are covered by fresh singleton
/// classes. A global edge between two buffer vertices is swallowed by the
/// completed block and therefore also becomes a fresh singleton.
///
/// Local class ids are deterministic: inherited vertex classes in ascending
/// global id, then fresh buffer-vertex singletons in ascending vertex order;
/// then inherited edge classes in ascending global id, then fresh
/// buffer-block singletons in ascending pair order.
pub fn local_model(g: &ColouredGraph, i: usize, hops: u8) -> Result<LocalModel> {
    let vertices = neighbourhood(g, i, hops)?;
    let (protected, buffer) = buffer_split(g, &vertices);
    let local_of: BTreeMap<usize, usize> =
        vertices.iter().enumerate().map(|(l, &v)| (v, l)).collect();
    let is_protected: BTreeSet<usize> = protected.iter().copied().collect();

    // Preserved edges: at least one protected endpoint, both inside N_i.
    let mut preserved: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in g.edges() {
        if let (Some(&la), Some(&lb)) = (local_of.get(&a), local_of.get(&b)) {
            if is_protected.contains(&a) || is_protected.contains(&b) {
                preserved.insert(norm_edge((la, lb)));
            }
        }
    }
    // Completed buffer block: every pair of buffer vertices.
    let mut buffer_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (x, &a) in buffer.iter().enumerate() {
        for &b in buffer.iter().skip(x + 1) {
            buffer_pairs.insert(norm_edge((local_of[&a], local_of[&b])));
        }
    }

    let local_edges: Vec<(usize, usize)> =
        preserved.union(&buffer_pairs).copied().collect();

    // Vertex classes: inherited (ascending global id) then fresh singletons.
    let mut vertex_classes: Vec<Vec<usize>> = Vec::new();
    let mut class_map: Vec<Option<usize>> = Vec::new();
    for (k, members) in g.vertex_classes().iter().enumerate() {
        let local_members: Vec<usize> = members
            .iter()
            .filter(|v| is_protected.contains(v))
            .map(|v| local_of[v])
            .collect();
        if !local_members.is_empty() {
            vertex_classes.push(local_members);
            class_map.push(Some(k));
        }
    }
    for &b in &buffer {
        vertex_classes.push(vec![local_of[&b]]);
        class_map.push(None);
    }

    // Edge classes: inherited (ascending global id) then fresh singletons.
    let t_global = g.n_vertex_classes();
    let mut edge_classes: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut edge_class_map: Vec<Option<usize>> = Vec::new();
    for (k, members) in g.edge_classes().iter().enumerate() {
        let local_members: Vec<(usize, usize)> = members
            .iter()
            .map(|&(a, b)| (a, b))
            .filter(|&(a, b)| {
                local_of.contains_key(&a)
                    && local_of.contains_key(&b)
                    && (is_protected.contains(&a) || is_protected.contains(&b))
            })
            .map(|(a, b)| norm_edge((local_of[&a], local_of[&b])))
            .collect();
        if !local_members.is_empty() {
            edge_classes.push(local_members);
            edge_class_map.push(Some(t_global + k));
        }
    }
    for &pair in &buffer_pairs {
        edge_classes.push(vec![pair]);
        edge_class_map.push(None);
    }
    class_map.extend(edge_class_map);

    let local_graph = ColouredGraph::new(vertices.len(), local_edges, vertex_classes, edge_classes)
        .expect("local model construction yields a valid coloured graph");

    Ok(LocalModel {
        centre: i,
        hops,
        vertices,
        protected,
        buffer,
        local_graph,
        class_map,
    })
}
