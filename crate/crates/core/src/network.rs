//! Acyclic single-source multicast networks carrying a linear network code.
//!
//! Edges are identified by their position in [`NetworkSpec::edges`], which
//! must already be an ancestral order. The builder checks that order instead
//! of re-sorting, so edge indices stay exactly as the input numbered them.
//!
//! Kernel defaults when a description leaves them out:
//! - a node with no `beta` coefficient at all combines every incoming edge
//!   into every outgoing edge with coefficient 1; once any coefficient is
//!   given for a node, its missing adjacent pairs are 0;
//! - missing source kernels map the i-th outgoing source edge to input i,
//!   and missing sink kernels map the i-th incoming edge of the sink to
//!   column i; both need exactly `n` such edges.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::polymat::ScalarMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub tail: String,
    pub head: String,
}

/// Network topology plus local kernels. All indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub field: Field,
    pub num_inputs: usize,
    pub source: String,
    pub sinks: Vec<String>,
    pub edges: Vec<Edge>,
    /// `(input, edge) -> alpha`
    pub source_kernels: BTreeMap<(usize, usize), Elem>,
    /// `(edge_i, edge_j) -> beta` with `head(e_i) = tail(e_j)`
    pub node_kernels: BTreeMap<(usize, usize), Elem>,
    /// `(sink, edge, column) -> epsilon`
    pub sink_kernels: BTreeMap<(usize, usize, usize), Elem>,
}

/// Transfer data for one sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkTransfer {
    pub name: String,
    /// `B^T`, |E| x n
    pub b: ScalarMatrix,
    /// `F_T = F B^T`, |E| x n
    pub f_t: ScalarMatrix,
    /// `M_T = A F_T`, n x n
    pub m_t: ScalarMatrix,
    pub m_t_inv: ScalarMatrix,
}

/// Matrices derived from a [`NetworkSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferSet {
    pub field: Field,
    pub a: ScalarMatrix,
    pub k: ScalarMatrix,
    pub f: ScalarMatrix,
    pub sinks: Vec<SinkTransfer>,
}

impl NetworkSpec {
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn in_edges(&self, v: &str) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].head == v).collect()
    }

    pub fn out_edges(&self, v: &str) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].tail == v).collect()
    }

    fn check_acyclic(&self) -> Result<()> {
        let vertices: BTreeSet<&str> = self
            .edges
            .iter()
            .flat_map(|e| [e.tail.as_str(), e.head.as_str()])
            .collect();
        let mut indeg: BTreeMap<&str, usize> = vertices.iter().map(|&v| (v, 0)).collect();
        for e in &self.edges {
            *indeg.get_mut(e.head.as_str()).unwrap() += 1;
        }
        let mut ready: Vec<&str> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for e in self.edges.iter().filter(|e| e.tail == v) {
                let d = indeg.get_mut(e.head.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(e.head.as_str());
                }
            }
        }
        if seen == vertices.len() {
            Ok(())
        } else {
            Err(Error::CyclicGraph)
        }
    }

    fn check_ordering(&self) -> Result<()> {
        for (i, ei) in self.edges.iter().enumerate() {
            for (j, ej) in self.edges.iter().enumerate() {
                if ei.head == ej.tail && i >= j {
                    return Err(Error::BadOrdering {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_kernels(&self) -> Result<()> {
        let n = self.num_inputs;
        let num_edges = self.edges.len();
        let f = &self.field;
        for (&(i, e), &v) in &self.source_kernels {
            f.check(v)?;
            if i >= n || e >= num_edges || self.edges[e].tail != self.source {
                return Err(Error::InvalidNetwork(format!(
                    "source kernel for input {} on edge {} is not on a source edge",
                    i + 1,
                    e + 1
                )));
            }
        }
        for (&(i, j), &v) in &self.node_kernels {
            f.check(v)?;
            if i >= num_edges || j >= num_edges || self.edges[i].head != self.edges[j].tail {
                return Err(Error::InvalidNetwork(format!(
                    "node kernel between edges {} and {} which are not adjacent",
                    i + 1,
                    j + 1
                )));
            }
        }
        for (&(t, e, c), &v) in &self.sink_kernels {
            f.check(v)?;
            if t >= self.sinks.len() || e >= num_edges || c >= n || self.edges[e].head != self.sinks[t] {
                return Err(Error::InvalidNetwork(format!(
                    "sink kernel for edge {} column {} is not on an incoming edge of that sink",
                    e + 1,
                    c + 1
                )));
            }
        }
        Ok(())
    }

    fn source_matrix(&self) -> Result<ScalarMatrix> {
        let mut a = ScalarMatrix::zeros(&self.field, self.num_inputs, self.edges.len());
        if self.source_kernels.is_empty() {
            let outs = self.out_edges(&self.source);
            if outs.len() != self.num_inputs {
                return Err(Error::InvalidNetwork(format!(
                    "no source kernels given and the source has {} outgoing edges, not {}",
                    outs.len(),
                    self.num_inputs
                )));
            }
            for (i, e) in outs.into_iter().enumerate() {
                a.set(i, e, 1);
            }
        } else {
            for (&(i, e), &v) in &self.source_kernels {
                a.set(i, e, v);
            }
        }
        Ok(a)
    }

    fn adjacency_matrix(&self) -> ScalarMatrix {
        let m = self.edges.len();
        let mut k = ScalarMatrix::zeros(&self.field, m, m);
        let explicit: BTreeSet<&str> = self
            .node_kernels
            .keys()
            .map(|&(i, _)| self.edges[i].head.as_str())
            .collect();
        for i in 0..m {
            for j in 0..m {
                let node = &self.edges[i].head;
                if *node != self.edges[j].tail {
                    continue;
                }
                let v = if explicit.contains(node.as_str()) {
                    self.node_kernels.get(&(i, j)).copied().unwrap_or(0)
                } else {
                    1
                };
                k.set(i, j, v);
            }
        }
        k
    }

    fn sink_matrix(&self, t: usize) -> Result<ScalarMatrix> {
        let mut b = ScalarMatrix::zeros(&self.field, self.edges.len(), self.num_inputs);
        let given: Vec<_> = self.sink_kernels.iter().filter(|(k, _)| k.0 == t).collect();
        if given.is_empty() {
            let ins = self.in_edges(&self.sinks[t]);
            if ins.len() != self.num_inputs {
                return Err(Error::InvalidNetwork(format!(
                    "no sink kernels given for {} and it has {} incoming edges, not {}",
                    self.sinks[t],
                    ins.len(),
                    self.num_inputs
                )));
            }
            for (c, e) in ins.into_iter().enumerate() {
                b.set(e, c, 1);
            }
        } else {
            for (&(_, e, c), &v) in given {
                b.set(e, c, v);
            }
        }
        Ok(b)
    }
}

/// Solves `(I - K) F = I` for strictly upper triangular `K` by
/// back-substitution: row i of F is `e_i + sum_{j>i} K_ij F_j`.
fn solve_unit_upper(k: &ScalarMatrix) -> ScalarMatrix {
    let field = k.field();
    let m = k.rows();
    let mut f = ScalarMatrix::identity(field, m);
    for i in (0..m).rev() {
        for j in i + 1..m {
            let kij = k.get(i, j);
            if kij == 0 {
                continue;
            }
            for c in j..m {
                let v = field.add(f.get(i, c), field.mul(kij, f.get(j, c)));
                f.set(i, c, v);
            }
        }
    }
    f
}

/// Assembles `A`, `K`, `F` and the per-sink `B^T`, `F_T`, `M_T`, `M_T^-1`.
pub fn build_transfer(spec: &NetworkSpec) -> Result<TransferSet> {
    if spec.num_inputs == 0 {
        return Err(Error::InvalidNetwork("network needs at least one input".into()));
    }
    if spec.sinks.is_empty() {
        return Err(Error::InvalidNetwork("network has no sinks".into()));
    }
    spec.check_acyclic()?;
    spec.check_ordering()?;
    spec.check_kernels()?;

    let a = spec.source_matrix()?;
    let k = spec.adjacency_matrix();
    let f = solve_unit_upper(&k);

    let mut sinks = Vec::with_capacity(spec.sinks.len());
    for (t, name) in spec.sinks.iter().enumerate() {
        let b = spec.sink_matrix(t)?;
        let f_t = f.mul(&b)?;
        let m_t = a.mul(&f_t)?;
        let m_t_inv = m_t
            .inverse()
            .map_err(|_| Error::RankDeficientSink(name.clone()))?;
        sinks.push(SinkTransfer {
            name: name.clone(),
            b,
            f_t,
            m_t,
            m_t_inv,
        });
    }
    Ok(TransferSet {
        field: spec.field.clone(),
        a,
        k,
        f,
        sinks,
    })
}

impl TransferSet {
    pub fn num_inputs(&self) -> usize {
        self.a.rows()
    }

    pub fn num_edges(&self) -> usize {
        self.k.rows()
    }

    /// One network use: `y_T = x M_T + w F_T` for every sink.
    pub fn propagate(&self, x: &[Elem], w: &[Elem]) -> Result<Vec<Vec<Elem>>> {
        if x.len() != self.num_inputs() || w.len() != self.num_edges() {
            return Err(Error::dims(format!(
                "input of length {} and error of length {} for a network with n = {} and {} edges",
                x.len(),
                w.len(),
                self.num_inputs(),
                self.num_edges()
            )));
        }
        let field = &self.field;
        self.sinks
            .iter()
            .map(|s| {
                let clean = s.m_t.left_mul(x)?;
                let err = s.f_t.left_mul(w)?;
                Ok(clean.iter().zip(&err).map(|(&a, &b)| field.add(a, b)).collect())
            })
            .collect()
    }
}
