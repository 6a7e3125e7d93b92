//! Complex unit gain graphs.
//!
//! A [`GainGraph`] stores one arc per unordered vertex pair together with its
//! phase `alpha`. The arc `(a, b, alpha)` stands for the Hermitian pair of
//! entries `H[a][b] = e^{i alpha}` and `H[b][a] = e^{-i alpha}`; the reverse
//! entry is never stored. A phase of zero is an undirected unit edge.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::TAU;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Vertex label, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    /// CSV column name for the probability of this vertex.
    pub fn column_name(self) -> String {
        format!("p_{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A directed arc carrying a unit complex weight `e^{i alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub alpha: f64,
}

/// Whether generated tree arcs are undirected or carry random phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    Zero,
    Uniform,
}

/// Reduce a phase to `[0, 2pi)`.
pub fn canonical_phase(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(TAU);
    // rem_euclid may round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainGraph {
    n_vertices: usize,
    arcs: Vec<Arc>,
    potentials: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    arcs: Vec<Arc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    potentials: Option<Vec<f64>>,
}

impl GainGraph {
    /// Validates the arc list and canonicalizes every phase.
    pub fn new(
        n_vertices: usize,
        arcs: Vec<Arc>,
        potentials: Option<Vec<f64>>,
    ) -> Result<Self, GraphError> {
        let potentials = match potentials {
            Some(p) => {
                if p.len() != n_vertices {
                    return Err(GraphError::PotentialLength {
                        expected: n_vertices,
                        found: p.len(),
                    });
                }
                if let Some(i) = p.iter().position(|v| !v.is_finite()) {
                    return Err(GraphError::NonFinitePotential(i));
                }
                p
            }
            None => vec![0.0; n_vertices],
        };

        let mut seen = HashSet::with_capacity(arcs.len());
        let mut canonical = Vec::with_capacity(arcs.len());
        for arc in arcs {
            for v in [arc.from, arc.to] {
                if v >= n_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: v,
                        n: n_vertices,
                    });
                }
            }
            if arc.from == arc.to {
                return Err(GraphError::SelfLoop(arc.from));
            }
            if !arc.alpha.is_finite() {
                return Err(GraphError::NonFinitePhase {
                    from: arc.from,
                    to: arc.to,
                });
            }
            let key = (arc.from.min(arc.to), arc.from.max(arc.to));
            if !seen.insert(key) {
                return Err(GraphError::DuplicatePair(key.0, key.1));
            }
            canonical.push(Arc {
                alpha: canonical_phase(arc.alpha),
                ..arc
            });
        }

        Ok(Self {
            n_vertices,
            arcs: canonical,
            potentials,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn has_potentials(&self) -> bool {
        self.potentials.iter().any(|&p| p != 0.0)
    }

    /// Re-checks every structural invariant. Constructors already guarantee
    /// these; the routine exists for tests and for graphs built by hand.
    pub fn validate(&self) -> Result<(), GraphError> {
        let rebuilt = Self::new(
            self.n_vertices,
            self.arcs.clone(),
            Some(self.potentials.clone()),
        )?;
        if rebuilt.arcs != self.arcs {
            return Err(GraphError::NotCanonical);
        }
        Ok(())
    }

    /// Neighbour lists, sorted by vertex index.
    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for arc in &self.arcs {
            adj[arc.from].push(arc.to);
            adj[arc.to].push(arc.from);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Phase seen when walking from `u` to `v`: `alpha` along the stored arc,
    /// `-alpha` against it. `None` when the vertices are not adjacent.
    pub fn phase_along(&self, u: usize, v: usize) -> Option<f64> {
        self.arcs.iter().find_map(|arc| {
            if arc.from == u && arc.to == v {
                Some(arc.alpha)
            } else if arc.from == v && arc.to == u {
                Some(-arc.alpha)
            } else {
                None
            }
        })
    }

    /// Parses the graph JSON format `{"n", "arcs", "potentials"?}`.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile = serde_json::from_str(text)?;
        Self::new(file.n, file.arcs, file.potentials)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n_vertices,
            arcs: self.arcs.clone(),
            potentials: self.has_potentials().then(|| self.potentials.clone()),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization is infallible")
    }

    /// Walk order around a single cycle, starting at vertex 0 and stepping
    /// first to its lower-index neighbour.
    pub fn cycle_order(&self) -> Result<Vec<usize>, GraphError> {
        let n = self.n_vertices;
        if n < 3 || self.arcs.len() != n {
            return Err(GraphError::NotACycle);
        }
        let adj = self.neighbours();
        if adj.iter().any(|nb| nb.len() != 2) {
            return Err(GraphError::NotACycle);
        }
        let mut order = Vec::with_capacity(n);
        let mut prev = 0;
        let mut cur = adj[0][0];
        order.push(0);
        while cur != 0 {
            if order.len() == n {
                return Err(GraphError::NotACycle);
            }
            order.push(cur);
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        if order.len() != n {
            // closed a shorter cycle, so the graph is disconnected
            return Err(GraphError::NotACycle);
        }
        Ok(order)
    }
}

/// Parse the graph JSON format.
pub fn parse_graph(text: &str) -> Result<GainGraph, GraphError> {
    GainGraph::from_json(text)
}

/// Even cycle `0 -> 1 -> ... -> n-1 -> 0` whose first `weighted_arcs` arcs carry
/// phase `alpha` and the rest phase zero.
pub fn cycle_family(n: usize, weighted_arcs: usize, alpha: f64) -> Result<GainGraph, GraphError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(GraphError::InvalidCycleLength(n));
    }
    if weighted_arcs < 1 || weighted_arcs > n {
        return Err(GraphError::InvalidWeightedArcs { k: weighted_arcs, n });
    }
    let arcs = (0..n)
        .map(|j| Arc {
            from: j,
            to: (j + 1) % n,
            alpha: if j < weighted_arcs { alpha } else { 0.0 },
        })
        .collect();
    GainGraph::new(n, arcs, None)
}

/// Directed cycle on any `n >= 3` with a constant phase on every arc.
pub fn directed_cycle(n: usize, alpha: f64) -> Result<GainGraph, GraphError> {
    if n < 3 {
        return Err(GraphError::TooFewVertices { n, min: 3 });
    }
    let arcs = (0..n)
        .map(|j| Arc {
            from: j,
            to: (j + 1) % n,
            alpha,
        })
        .collect();
    GainGraph::new(n, arcs, None)
}

/// Complete graph with every edge oriented `i -> j` for `i < j`.
pub fn complete_family(n: usize, alpha: f64) -> Result<GainGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices { n, min: 2 });
    }
    let mut arcs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            arcs.push(Arc { from: i, to: j, alpha });
        }
    }
    GainGraph::new(n, arcs, None)
}

/// Path `0 -> 1 -> ... -> n-1` with constant phase.
pub fn path_family(n: usize, alpha: f64) -> Result<GainGraph, GraphError> {
    if n < 1 {
        return Err(GraphError::TooFewVertices { n, min: 1 });
    }
    let arcs = (0..n.saturating_sub(1))
        .map(|j| Arc {
            from: j,
            to: j + 1,
            alpha,
        })
        .collect();
    GainGraph::new(n, arcs, None)
}

/// Uniform random labelled tree by Prüfer decoding, seeded ChaCha8.
pub fn random_tree(n: usize, seed: u64, phase_mode: PhaseMode) -> Result<GainGraph, GraphError> {
    if n < 1 {
        return Err(GraphError::TooFewVertices { n, min: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = if n == 1 {
        Vec::new()
    } else {
        let pruefer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        decode_pruefer(n, &pruefer)
    };
    let arcs = edges
        .into_iter()
        .map(|(u, v)| {
            // random stored direction so both arc orientations get exercised
            let (from, to) = if rng.random_bool(0.5) { (u, v) } else { (v, u) };
            let alpha = match phase_mode {
                PhaseMode::Zero => 0.0,
                PhaseMode::Uniform => rng.random_range(0.0..TAU),
            };
            Arc { from, to, alpha }
        })
        .collect();
    GainGraph::new(n, arcs, None)
}

/// Decodes a Prüfer sequence of length `n - 2` into `n - 1` tree edges.
fn decode_pruefer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let mut rest = leaves.into_iter();
    let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((u, v));
    edges
}

/// Same arcs and potentials with every phase set to zero.
pub fn underlying_undirected(g: &GainGraph) -> GainGraph {
    GainGraph {
        n_vertices: g.n_vertices,
        arcs: g
            .arcs
            .iter()
            .map(|a| Arc { alpha: 0.0, ..*a })
            .collect(),
        potentials: g.potentials.clone(),
    }
}

/// Total phase around a single cycle, following [`GainGraph::cycle_order`],
/// reduced to `[0, 2pi)`.
pub fn cycle_phase_sum(g: &GainGraph) -> Result<f64, GraphError> {
    let order = g.cycle_order()?;
    let n = order.len();
    let total: f64 = (0..n)
        .map(|j| {
            g.phase_along(order[j], order[(j + 1) % n])
                .expect("consecutive cycle vertices are adjacent")
        })
        .sum();
    Ok(canonical_phase(total))
}

/// Connected components by BFS, each listed from its lowest-index vertex.
pub(crate) fn components(g: &GainGraph) -> Vec<Vec<usize>> {
    let adj = g.neighbours();
    let mut seen = vec![false; g.n_vertices];
    let mut out = Vec::new();
    for root in 0..g.n_vertices {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Circular distance between two phases.
pub(crate) fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
