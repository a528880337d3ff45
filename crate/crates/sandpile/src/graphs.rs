//! Simple graphs, Erdos-Renyi sampling and sandpile groups.
//!
//! Laplacians use the sign convention `L[i][i] = -deg(i)`, `L[i][j] = 1` for
//! an edge. The sandpile group is the cokernel of the reduced Laplacian
//! (last row and column deleted), which is the zero-sum lattice modulo the
//! column space of `L`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::FinAbGroup;
use crate::linalg::IntMatrix;
use crate::local::{local_tensor_dual_pairing, local_torsion_pairing};
use crate::pairings::{cokernel_tensor_dual_pairing, torsion_pairing, PairedGroup, PairingGram};
use crate::rng::rng_from_seed;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Edges may be given in any order and orientation.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut es = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("loop at {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!("edge {a}-{b} out of range")));
            }
            es.push((a.min(b), a.max(b)));
        }
        es.sort_unstable();
        if es.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("repeated edge".into()));
        }
        Ok(Graph { n, edges: es })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("a cycle needs 3 vertices".into()));
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        Graph::new(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Component label of every vertex, labels in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut out = vec![0; self.n];
        for v in 0..self.n {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().iter().max().map_or(0, |&c| c + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.n)?;
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{}", es.join(","))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({self})")
    }
}

impl FromStr for Graph {
    type Err = Error;

    /// `"4:0-1,1-2"`; the edge list may be empty.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("graph {s:?}"));
        let (n, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let mut edges = Vec::new();
        for e in rest.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (a, b) = e.split_once('-').ok_or_else(bad)?;
            edges.push((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?));
        }
        Graph::new(n, &edges)
    }
}

impl TryFrom<String> for Graph {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Graph> for String {
    fn from(g: Graph) -> String {
        g.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    pub q: f64,
    pub seed: u64,
}

/// Each pair `i < j`, in lexicographic order, is an edge when a uniform
/// `f64` from the seeded stream falls below `q`.
pub fn sample_er(params: &ErParams) -> Graph {
    let mut rng = rng_from_seed(params.seed);
    let n = params.n;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < params.q {
                edges.push((i, j));
            }
        }
    }
    Graph { n, edges }
}

pub fn laplacian(g: &Graph) -> IntMatrix {
    let n = g.n;
    let mut m = vec![vec![0i64; n]; n];
    for &(a, b) in &g.edges {
        m[a][b] = 1;
        m[b][a] = 1;
        m[a][a] -= 1;
        m[b][b] -= 1;
    }
    IntMatrix::from_rows(&m).expect("square")
}

/// The Laplacian without its last row and column.
pub fn reduced_laplacian(g: &Graph) -> IntMatrix {
    let l = laplacian(g);
    if g.n == 0 {
        return l;
    }
    l.minor(g.n - 1, g.n - 1)
}

pub fn spanning_tree_count(g: &Graph) -> BigUint {
    match g.n {
        0 => BigUint::zero(),
        1 => BigUint::from(1u32),
        _ => reduced_laplacian(g).determinant().expect("square").abs().to_biguint().unwrap(),
    }
}

/// Torsion of the Laplacian cokernel with its pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandpile {
    pub torsion: PairedGroup,
    pub free_rank: usize,
    pub connected: bool,
}

pub fn sandpile_with_pairing(g: &Graph) -> Result<Sandpile> {
    if g.n == 0 {
        let torsion = PairedGroup::new(PairingGram::zero(FinAbGroup::trivial()));
        return Ok(Sandpile { torsion, free_rank: 0, connected: true });
    }
    let tp = torsion_pairing(&laplacian(g))?;
    Ok(Sandpile { torsion: tp.paired_group()?, free_rank: tp.free_rank, connected: g.is_connected() })
}

/// The part of the sandpile torsion at `primes` with its pairing. Connected
/// graphs go through the word-size local reduction of the reduced Laplacian
/// when it certifies the answer.
pub fn sandpile_sylow(g: &Graph, primes: &[u64]) -> Result<PairingGram> {
    if g.n <= 1 {
        return Ok(PairingGram::zero(FinAbGroup::trivial()));
    }
    if g.is_connected() {
        if let Some(gram) = local_torsion_pairing(&reduced_laplacian(g), primes) {
            return Ok(gram);
        }
    }
    Ok(torsion_pairing(&laplacian(g))?.sylow(primes)?.pairing)
}

/// `S (x) Z/b` with the pairing on its dual, where `S` is the cokernel of the
/// reduced Laplacian (free part included).
pub fn sandpile_tensor_dual(g: &Graph, b: u64) -> Result<PairingGram> {
    if g.n <= 1 {
        return Ok(PairingGram::zero(FinAbGroup::trivial()));
    }
    let d = reduced_laplacian(g);
    match local_tensor_dual_pairing(&d, b) {
        Ok(gram) => Ok(gram),
        Err(_) => cokernel_tensor_dual_pairing(&d, b),
    }
}
