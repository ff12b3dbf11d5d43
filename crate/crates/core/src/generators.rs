//! Deterministic graph fixtures and seeded random graph corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::modmat::Model;

fn build(n: usize, edges: Vec<(usize, usize, f64)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced a valid edge list")
}

fn clique_edges(offset: usize, size: usize, edges: &mut Vec<(usize, usize, f64)>) {
    for i in 0..size {
        for j in i + 1..size {
            edges.push((offset + i, offset + j, 1.0));
        }
    }
}

/// Complete graph `K_n`.
pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    clique_edges(0, n, &mut edges);
    build(n, edges)
}

/// Path `P_n` on nodes `0 – 1 – … – n-1`.
pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|i| (i - 1, i, 1.0)).collect())
}

/// Two copies of `K_k` joined by the single edge `(k-1, k)`.
pub fn barbell(k: usize) -> Graph {
    let mut edges = Vec::new();
    clique_edges(0, k, &mut edges);
    clique_edges(k, k, &mut edges);
    edges.push((k - 1, k, 1.0));
    build(2 * k, edges)
}

/// Star with center 0 and `m` leaves, every node carrying a loop of
/// weight `√m`.
pub fn looped_star(m: usize) -> Graph {
    let r = (m as f64).sqrt();
    let mut edges: Vec<_> = (1..=m).map(|i| (0, i, 1.0)).collect();
    edges.extend((0..=m).map(|i| (i, i, r)));
    build(m + 1, edges)
}

/// `count` cliques of `size` nodes arranged in a ring; clique `b`'s last
/// node is joined to clique `b+1`'s first node.
pub fn clique_ring(count: usize, size: usize) -> Graph {
    let mut edges = Vec::new();
    for b in 0..count {
        clique_edges(b * size, size, &mut edges);
        if count > 1 && !(count == 2 && b == 1) {
            edges.push((b * size + size - 1, ((b + 1) % count) * size, 1.0));
        }
    }
    build(count * size, edges)
}

/// `blocks` cliques of `size` nodes with a loop of weight `loop_weight` on
/// every node, consecutive blocks joined by one unit edge.
pub fn looped_blocks(blocks: usize, size: usize, loop_weight: f64) -> Graph {
    let mut edges = Vec::new();
    for b in 0..blocks {
        clique_edges(b * size, size, &mut edges);
        edges.extend((0..size).map(|i| (b * size + i, b * size + i, loop_weight)));
        if b + 1 < blocks {
            edges.push((b * size + size - 1, (b + 1) * size, 1.0));
        }
    }
    build(blocks * size, edges)
}

/// Connected random graph: a random spanning tree plus independent extra
/// edges with probability `density`, weights uniform on `(0, max_weight]`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, density: f64, max_weight: f64) -> Graph {
    let weight = |rng: &mut R| max_weight * (1.0 - rng.random::<f64>());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![false; n * n];
    let mut edges = Vec::new();
    for k in 1..n {
        let (a, b) = (order[k], order[rng.random_range(0..k)]);
        present[a.min(b) * n + a.max(b)] = true;
        edges.push((a, b, weight(rng)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i * n + j] && rng.random::<f64>() < density {
                edges.push((i, j, weight(rng)));
            }
        }
    }
    build(n, edges)
}

/// Planted partition: `groups` blocks of `size` nodes, within-block edge
/// probability `p_in`, across-block `p_out`, unit weights. Not necessarily
/// connected.
pub fn planted_partition<R: Rng>(rng: &mut R, groups: usize, size: usize, p_in: f64, p_out: f64) -> Graph {
    let n = groups * size;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if i / size == j / size { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    build(n, edges)
}

/// Parameters of a seeded random corpus.
#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub count: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub min_density: f64,
    pub max_density: f64,
    pub max_weight: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 200,
            min_n: 5,
            max_n: 60,
            min_density: 0.1,
            max_density: 0.5,
            max_weight: 2.0,
            seed: 42,
        }
    }
}

pub fn random_corpus(spec: &CorpusSpec) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|_| {
            let n = rng.random_range(spec.min_n..=spec.max_n);
            let density = rng.random_range(spec.min_density..=spec.max_density);
            random_connected(&mut rng, n, density, spec.max_weight)
        })
        .collect()
}

/// Resolution parameter for the Ronhovde–Nussinov model matching the
/// graph's edge density: mean degree over `n`, i.e. `vol G / n²`.
pub fn rn_gamma(g: &Graph) -> f64 {
    let n = g.n() as f64;
    g.volume() / (n * n)
}

/// The model panel exercised on every corpus graph.
pub fn model_panel(g: &Graph) -> Vec<Model> {
    vec![
        Model::Ng,
        Model::Norm,
        Model::Rb(0.5),
        Model::Rb(1.0),
        Model::Rb(2.0),
        Model::Rn(rn_gamma(g)),
        Model::Afg(0.0),
        Model::Afg(1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        assert_eq!(complete(4).edge_count(), 6);
        assert_eq!(path(5).edge_count(), 4);
        let b = barbell(3);
        assert_eq!(b.n(), 6);
        assert_eq!(b.edge_count(), 7);
        let s = looped_star(4);
        assert_eq!(s.n(), 5);
        assert_eq!(s.degrees()[0], 4.0 + 2.0);
        let r = clique_ring(4, 4);
        assert_eq!(r.n(), 16);
        assert_eq!(r.edge_count(), 4 * 6 + 4);
        assert!(r.is_connected());
        assert_eq!(clique_ring(2, 3).edge_count(), 7);
        assert!(looped_blocks(3, 3, 4.0).is_connected());
    }

    #[test]
    fn corpus_is_connected_and_reproducible() {
        let spec = CorpusSpec {
            count: 20,
            ..CorpusSpec::default()
        };
        let a = random_corpus(&spec);
        assert!(a.iter().all(|g| g.is_connected() && (5..=60).contains(&g.n())));
        assert!(a.iter().flat_map(|g| g.edges()).all(|(_, _, w)| w > 0.0 && w <= 2.0));
        assert_eq!(a, random_corpus(&spec));
    }
}
