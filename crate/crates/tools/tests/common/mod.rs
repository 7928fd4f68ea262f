#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use kcore::{normalize, EdgeList, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A named raw edge list, as it would appear in a file.
pub struct Case {
    pub name: String,
    pub edges: Vec<(u64, u64)>,
}

impl Case {
    fn new(name: impl Into<String>, edges: Vec<(u64, u64)>) -> Self {
        Self {
            name: name.into(),
            edges,
        }
    }

    pub fn graph(&self) -> Graph {
        normalize(&EdgeList::new(self.edges.clone()))
    }

    pub fn write(&self, dir: &Path) -> PathBuf {
        let path = dir.join(format!("{}.txt", self.name));
        write_edge_file(&path, &self.edges);
        path
    }
}

pub fn write_edge_file(path: &Path, edges: &[(u64, u64)]) {
    let mut text = String::from("# generated\n# FromNodeId\tToNodeId\n");
    for (u, v) in edges {
        text.push_str(&format!("{u}\t{v}\n"));
    }
    fs::write(path, text).unwrap();
}

pub fn erdos_renyi(rng: &mut impl Rng, n: u64, p: f64) -> Vec<(u64, u64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// `m` uniformly random pairs over `n` ids (duplicates and loops included).
pub fn random_pairs(rng: &mut impl Rng, n: u64, m: usize) -> Vec<(u64, u64)> {
    (0..m)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect()
}

pub fn clique(ids: impl IntoIterator<Item = u64>) -> Vec<(u64, u64)> {
    let ids: Vec<u64> = ids.into_iter().collect();
    let mut e = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            e.push((a, b));
        }
    }
    e
}

pub fn star(leaves: u64) -> Vec<(u64, u64)> {
    (1..=leaves).map(|l| (0, l)).collect()
}

pub fn path(n: u64) -> Vec<(u64, u64)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn cycle(n: u64) -> Vec<(u64, u64)> {
    let mut e = path(n);
    e.push((n - 1, 0));
    e
}

/// Two `k`-cliques joined by a path of `bridge` edges.
pub fn barbell(k: u64, bridge: u64) -> Vec<(u64, u64)> {
    let mut e = clique(0..k);
    e.extend(clique(k..2 * k));
    let mut prev = k - 1;
    for i in 0..bridge.saturating_sub(1) {
        let mid = 2 * k + i;
        e.push((prev, mid));
        prev = mid;
    }
    e.push((prev, k));
    e
}

pub fn structured() -> Vec<Case> {
    let mut cases = Vec::new();
    for k in 2..=10 {
        cases.push(Case::new(format!("clique-{k}"), clique(0..k)));
    }
    for leaves in [1, 3, 10, 50] {
        cases.push(Case::new(format!("star-{leaves}"), star(leaves)));
    }
    for n in [2, 4, 17, 100] {
        cases.push(Case::new(format!("path-{n}"), path(n)));
    }
    for n in [3, 4, 9, 64] {
        cases.push(Case::new(format!("cycle-{n}"), cycle(n)));
    }
    for (k, b) in [(3, 1), (5, 3), (8, 2)] {
        cases.push(Case::new(format!("barbell-{k}-{b}"), barbell(k, b)));
    }
    cases.push(Case::new(
        "bridged-triangles",
        vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
    ));
    // Duplicates, reversed copies and self-loops that collapse away.
    cases.push(Case::new(
        "dedup-components",
        vec![
            (1, 2),
            (2, 1),
            (1, 2),
            (7, 7),
            (9, 9),
            (3, 4),
            (4, 5),
            (5, 3),
            (3, 3),
            (4, 3),
            (20, 21),
            (21, 20),
        ],
    ));
    cases.push(Case::new("self-loops-only", vec![(4, 4), (8, 8)]));
    cases.push(Case::new("empty", vec![]));
    let mut k5p = clique(0..5);
    k5p.push((4, 5));
    cases.push(Case::new("k5-pendant", k5p));
    cases
}

/// `count` random graphs with `n` in `[1, 500]`, cycling through the edge
/// probabilities.
pub fn erdos_renyi_corpus(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = [0.005, 0.02, 0.1, 0.5];
    (0..count)
        .map(|i| {
            let p = ps[i % ps.len()];
            let n = rng.gen_range(1..=500);
            Case::new(format!("er-{i}-n{n}-p{p}"), erdos_renyi(&mut rng, n, p))
        })
        .collect()
}

/// Core numbers from the definition: for every `k`, strip vertices with
/// fewer than `k` surviving neighbours until nothing changes.
pub fn definition_cores(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut core = vec![0u32; n];
    for k in 1..=g.max_degree() {
        let mut alive = vec![true; n];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if alive[v] {
                    let live = g
                        .neighbors(v as u32)
                        .iter()
                        .filter(|&&w| alive[w as usize])
                        .count();
                    if live < k {
                        alive[v] = false;
                        changed = true;
                    }
                }
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k as u32;
            }
        }
    }
    core
}

/// Largest `i <= value` with at least `i` entries `>= i`, else `min(value, 1)`.
pub fn brute_bound(value: u32, ests: &[u32]) -> u32 {
    (1..=value)
        .rev()
        .find(|&i| ests.iter().filter(|&&e| e >= i).count() >= i as usize)
        .unwrap_or(value.min(1))
}

/// Runs the CLI in-process and returns `(exit code, stdout, stderr)`.
pub fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["kcore"];
    argv.extend_from_slice(args);
    let code = kcore_tools::cli::run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
