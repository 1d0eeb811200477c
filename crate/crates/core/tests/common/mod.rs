//! Helpers shared by the integration tests: word enumeration and a
//! block-counting entropy oracle that never touches the partition code.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::HashMap;

use kneadkit::{SignedGraph, Word};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

pub fn w(s: &str) -> Word {
    s.parse().unwrap()
}

pub fn extremal_words(g: &SignedGraph, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|n| g.enumerate_wn(n, 1 << 22).unwrap())
        .filter(|x| g.is_extremal(x))
        .collect()
}

pub fn admissible_words(g: &SignedGraph, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|n| g.enumerate_wn(n, 1 << 22).unwrap())
        .filter(|x| g.is_admissible_word(x))
        .collect()
}

/// Plain signed comparison of two equal-length letter slices.
fn signed_order(g: &SignedGraph, a: &[usize], b: &[usize]) -> Ordering {
    let mut sign = 1;
    for (x, y) in a.iter().zip(b) {
        if x != y {
            let o = x.cmp(y);
            return if sign > 0 { o } else { o.reverse() };
        }
        sign *= g.sign_of(*x);
    }
    Ordering::Equal
}

/// Every suffix of `u` is at most the prefix of `w^∞` of the same length.
pub fn locally_admissible(g: &SignedGraph, w: &Word, u: &[usize]) -> bool {
    let wp: Vec<usize> = (0..u.len()).map(|i| w.periodic_at(i)).collect();
    (0..u.len()).all(|s| signed_order(g, &u[s..], &wp[..u.len() - s]) != Ordering::Greater)
}

/// `log` of the growth rate of the higher-block graph: vertices are the
/// locally admissible `(n-1)`-blocks, edges the locally admissible `n`-blocks.
pub fn block_growth_entropy(g: &SignedGraph, w: &Word, n: usize) -> f64 {
    let mut blocks: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| vec![v]).collect();
    blocks.retain(|b| locally_admissible(g, w, b));
    for _ in 1..n - 1 {
        let mut next = Vec::new();
        for b in &blocks {
            for &x in g.successors(*b.last().unwrap()) {
                let mut c = b.clone();
                c.push(x);
                if locally_admissible(g, w, &c) {
                    next.push(c);
                }
            }
        }
        blocks = next;
    }
    let index: HashMap<&[usize], usize> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (b.as_slice(), i))
        .collect();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = blocks.iter().map(|_| graph.add_node(())).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for (i, b) in blocks.iter().enumerate() {
        for &x in g.successors(*b.last().unwrap()) {
            let mut c = b.clone();
            c.push(x);
            if !locally_admissible(g, w, &c) {
                continue;
            }
            if let Some(&j) = index.get(&c[1..]) {
                succ[i].push(j);
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut rho = 0.0f64;
    for comp in tarjan_scc(&graph) {
        let members: Vec<usize> = comp.iter().map(|x| x.index()).collect();
        if members.len() == 1 {
            let v = members[0];
            if succ[v].contains(&v) {
                rho = rho.max(1.0);
            }
            continue;
        }
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut x = vec![1.0f64; members.len()];
        let mut estimate = 0.0;
        for _ in 0..200_000 {
            let mut y = x.clone();
            for (k, &v) in members.iter().enumerate() {
                for s in &succ[v] {
                    if let Some(&t) = local.get(s) {
                        y[k] += x[t];
                    }
                }
            }
            let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
            let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(r), h.max(r)));
            estimate = 0.5 * (lo + hi) - 1.0;
            if hi - lo < 1e-13 * hi {
                break;
            }
            let m = y.iter().copied().fold(0.0, f64::max);
            x = y.into_iter().map(|v| v / m).collect();
        }
        rho = rho.max(estimate);
    }
    rho.ln()
}
