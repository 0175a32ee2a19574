//! Independent oracles and generators shared by the integration tests and the
//! acceptance harness. Nothing here calls into the library's algorithms.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signed_omas::{Sign, SignedDigraph, SignedEdge};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub const FIXTURES: [&str; 5] = [
    "nine_mode.scn",
    "sb_tree.scn",
    "sub_cycle.scn",
    "sub_with_root.scn",
    "multileader.scn",
];

pub fn graph(nodes: &[&str], edges: &[(&str, &str, i8)]) -> SignedDigraph {
    let e: Vec<(&str, &str, Sign)> = edges
        .iter()
        .map(|&(t, h, s)| (t, h, if s > 0 { Sign::Positive } else { Sign::Negative }))
        .collect();
    SignedDigraph::from_labels(nodes, &e).expect("valid test graph")
}

pub fn g1() -> SignedDigraph {
    graph(&["1", "2", "3", "4"], &[("1", "2", -1), ("3", "1", 1), ("2", "4", 1), ("3", "4", -1)])
}

pub fn multileader() -> SignedDigraph {
    graph(
        &["1", "2", "3", "4", "5", "6", "7", "8", "9"],
        &[
            ("1", "2", -1),
            ("3", "1", 1),
            ("2", "4", 1),
            ("4", "3", -1),
            ("5", "6", 1),
            ("6", "7", 1),
            ("7", "5", -1),
            ("2", "9", -1),
            ("5", "9", 1),
            ("8", "9", -1),
        ],
    )
}

/// Valid digraph on `n` nodes: each ordered pair is an edge with probability
/// `p`, signs are random except that a digon copies the sign of its twin.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> SignedDigraph {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut edges: Vec<SignedEdge> = Vec::new();
    for t in 0..n {
        for h in 0..n {
            if t == h || !rng.random_bool(p) {
                continue;
            }
            let sign = match edges.iter().find(|e| e.tail == h && e.head == t) {
                Some(twin) => twin.sign,
                None if rng.random_bool(0.5) => Sign::Positive,
                None => Sign::Negative,
            };
            edges.push(SignedEdge::new(t, h, sign));
        }
    }
    SignedDigraph::new(labels, edges)
}

/// Random weakly connected valid graph with `2 ≤ N ≤ max_n`.
pub fn random_connected(rng: &mut impl Rng, max_n: usize) -> SignedDigraph {
    loop {
        let n = rng.random_range(2..=max_n);
        let p = rng.random_range(0.15..0.6);
        let g = random_graph(rng, n, p);
        if g.edge_count() > 0 && weakly_connected(&g) {
            return g;
        }
    }
}

/// Random directed spanning tree (arborescence) on `n` nodes.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> SignedDigraph {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let edges = (1..n)
        .map(|h| {
            let t = rng.random_range(0..h);
            let s = if rng.random_bool(0.5) { Sign::Positive } else { Sign::Negative };
            SignedEdge::new(t, h, s)
        })
        .collect();
    SignedDigraph::new(labels, edges)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `reach[i][j]`: a directed path (possibly empty) leads from `i` to `j`.
pub fn closure(g: &SignedDigraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges() {
        r[e.tail][e.head] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

pub fn weakly_connected(g: &SignedDigraph) -> bool {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for e in g.edges() {
        let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == root)
}

/// Balance by exhausting all gauges of the given node subset (edges with an
/// endpoint outside the subset are ignored).
pub fn balanced_brute(g: &SignedDigraph, nodes: &[usize]) -> bool {
    let k = nodes.len();
    assert!(k <= 16);
    (0u32..1 << k).any(|mask| {
        let side = |v: usize| {
            let pos = nodes.iter().position(|&u| u == v)?;
            Some(if mask >> pos & 1 == 1 { -1.0 } else { 1.0 })
        };
        g.edges().iter().all(|e| match (side(e.tail), side(e.head)) {
            (Some(a), Some(b)) => a * b == e.sign.value(),
            _ => true,
        })
    })
}

/// `ℓ_ii = Σ_k |a_ik|`, `ℓ_ij = -a_ij`, with `a_ij` the sign of edge `j -> i`.
pub fn laplacian_by_definition(g: &SignedDigraph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for e in g.edges() {
        l[(e.head, e.head)] += 1.0;
        l[(e.head, e.tail)] -= e.sign.value();
    }
    l
}

/// Signed edge Laplacian built entry by entry: row `k` is the head reading of
/// edge `k` through every edge's state.
pub fn edge_laplacian_by_definition(g: &SignedDigraph) -> Vec<Vec<i64>> {
    let m = g.edge_count();
    let sgn = |s: Sign| if s.is_cooperative() { 1i64 } else { -1 };
    let mut le = vec![vec![0i64; m]; m];
    for (k, ek) in g.edges().iter().enumerate() {
        for (j, ej) in g.edges().iter().enumerate() {
            // (E_sᵀ)_{k,·} · (E⊙)_{·,j}, with E⊙ holding -sign at the head.
            let mut v = 0i64;
            let inj = -sgn(ej.sign);
            if ek.tail == ej.head {
                v += inj;
            }
            if ek.head == ej.head {
                v += -sgn(ek.sign) * inj;
            }
            le[k][j] = v;
        }
    }
    le
}

fn mod_pow(mut b: i128, mut e: i128, p: i128) -> i128 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn rank_mod(mut a: Vec<Vec<i128>>, p: i128) -> usize {
    let (rows, cols) = (a.len(), a.first().map_or(0, Vec::len));
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = mod_pow(a[rank][c], p - 2, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * inv % p;
                for k in c..cols {
                    a[r][k] = ((a[r][k] - f * a[rank][k]) % p + p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mat_mul_mod(a: &[Vec<i128>], b: &[Vec<i128>], p: i128) -> Vec<Vec<i128>> {
    let m = a.len();
    let mut out = vec![vec![0i128; m]; m];
    for i in 0..m {
        for k in 0..m {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = (out[i][j] + a[i][k] * b[k][j]) % p;
            }
        }
    }
    out
}

/// Exact algebraic multiplicity of the zero eigenvalue of an integer matrix:
/// `M - rank(A^k)` for any `k ≥ M`, the rank computed in two large prime fields.
pub fn exact_zero_multiplicity(a: &[Vec<i64>]) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let mut best = 0;
    for p in [2_305_843_009_213_693_951i128, 4_611_686_018_427_387_847] {
        let base: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| (v as i128 % p + p) % p).collect()).collect();
        // A^e for e = next power of two ≥ M; the null space has stabilised by then
        let mut pow = base;
        let mut e = 1;
        while e < m {
            pow = mat_mul_mod(&pow, &pow, p);
            e *= 2;
        }
        best = best.max(rank_mod(pow, p));
    }
    m - best
}

/// Solves `P R + Rᵀ P = Q` through the `m² × m²` Kronecker system.
pub fn lyapunov_kronecker(r: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let m = r.nrows();
    let i = DMatrix::<f64>::identity(m, m);
    // vec(P R) = (Rᵀ ⊗ I) vec P, vec(Rᵀ P) = (I ⊗ Rᵀ) vec P (column-major vec)
    let a = r.transpose().kronecker(&i) + i.kronecker(&r.transpose());
    let b = nalgebra::DVector::from_column_slice(q.as_slice());
    let x = a.lu().solve(&b).expect("nonsingular Kronecker system");
    DMatrix::from_column_slice(m, m, x.as_slice())
}
