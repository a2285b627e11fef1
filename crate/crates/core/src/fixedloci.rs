//! Torus-fixed graph censuses for P^1, the H^4 ledger of M_{0,0}(P^1, 2k),
//! flag-variety fixed-locus family counts and the Grassmannian/P^3 transfer.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{domain, limit, unsupported, Result};
use crate::modspace::{codim2_catalog, dim_h2, SpaceSignature, Target};
use crate::rational::{binom, half_power_bracket, ser_int, ser_opt_int, Int};
use crate::schubert::Grass;
use crate::symgroup::invariant_dim;

pub const P1_CENSUS_BOUND: u32 = 12;

/// A fixed-locus graph for P^1: a tree whose vertices carry the fixed
/// points 0/1 (adjacent labels differ) and whose edges carry degrees.
#[derive(Clone, Debug, Serialize)]
pub struct FixedGraph {
    pub labels: Vec<u8>,
    pub edges: Vec<(usize, usize, u32)>,
    pub encoding: String,
}

impl FixedGraph {
    fn new(labels: Vec<u8>, edges: Vec<(usize, usize, u32)>) -> Self {
        let mut g = FixedGraph { labels, edges, encoding: String::new() };
        g.encoding = g.canonical();
        g
    }

    pub fn degree(&self) -> u32 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    /// Vertices over the point 1 with at least three flags.
    pub fn s(&self) -> usize {
        (0..self.labels.len()).filter(|&v| self.labels[v] == 1 && self.valence(v) >= 3).count()
    }

    /// Vertices over the point 1 with exactly one flag.
    pub fn u(&self) -> usize {
        (0..self.labels.len()).filter(|&v| self.labels[v] == 1 && self.valence(v) == 1).count()
    }

    pub fn negative_weights(&self) -> i64 {
        self.degree() as i64 - self.u() as i64 + self.s() as i64
    }

    fn rooted(&self, v: usize, parent: Option<usize>) -> String {
        let mut kids: Vec<String> = self
            .edges
            .iter()
            .filter_map(|&(a, b, d)| {
                let w = if a == v { b } else if b == v { a } else { return None };
                (Some(w) != parent).then(|| format!("{d}{}", self.rooted(w, Some(v))))
            })
            .collect();
        kids.sort();
        format!("({}{})", self.labels[v], kids.concat())
    }

    fn canonical(&self) -> String {
        (0..self.labels.len()).map(|v| self.rooted(v, None)).min().unwrap_or_default()
    }
}

/// All isomorphism classes of P^1 fixed graphs of total degree d.
pub fn p1_graphs(d: u32) -> Result<Vec<FixedGraph>> {
    p1_graphs_bounded(d, i64::MAX)
}

/// Graphs with at most max_neg negative weights. Both growth moves below
/// never lower d - u + s, so pruning each layer loses nothing.
pub fn p1_graphs_bounded(d: u32, max_neg: i64) -> Result<Vec<FixedGraph>> {
    if d == 0 {
        return domain("degree must be positive");
    }
    if d > P1_CENSUS_BOUND {
        return limit("P^1 census degree", P1_CENSUS_BOUND as usize);
    }
    let mut layer: BTreeMap<String, FixedGraph> = BTreeMap::new();
    let g = FixedGraph::new(vec![0, 1], vec![(0, 1, 1)]);
    layer.insert(g.encoding.clone(), g);
    for _ in 1..d {
        // every graph of degree e+1 arises from one of degree e by raising an
        // edge degree or by attaching a degree-one leaf
        let mut next = BTreeMap::new();
        for g in layer.values() {
            for i in 0..g.edges.len() {
                let mut edges = g.edges.clone();
                edges[i].2 += 1;
                let h = FixedGraph::new(g.labels.clone(), edges);
                if h.negative_weights() <= max_neg {
                    next.insert(h.encoding.clone(), h);
                }
            }
            for v in 0..g.labels.len() {
                let mut labels = g.labels.clone();
                labels.push(1 - g.labels[v]);
                let mut edges = g.edges.clone();
                edges.push((v, labels.len() - 1, 1));
                let h = FixedGraph::new(labels, edges);
                if h.negative_weights() <= max_neg {
                    next.insert(h.encoding.clone(), h);
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_values().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct P1Census {
    pub d: u32,
    pub buckets: BTreeMap<i64, Vec<FixedGraph>>,
}

impl P1Census {
    pub fn counts(&self, max_neg: i64) -> Vec<usize> {
        (0..=max_neg).map(|k| self.buckets.get(&k).map_or(0, |v| v.len())).collect()
    }
}

/// P^1 fixed graphs of degree d bucketed by d - u + s, keeping buckets <= max_neg.
pub fn p1_graph_census(d: u32, max_neg: i64) -> Result<P1Census> {
    if d < 2 {
        return domain("census starts at d = 2");
    }
    let mut buckets: BTreeMap<i64, Vec<FixedGraph>> = BTreeMap::new();
    for g in p1_graphs_bounded(d, max_neg)? {
        buckets.entry(g.negative_weights()).or_default().push(g);
    }
    Ok(P1Census { d, buckets })
}

/// Unordered chains (i, j, l) with i + j + l = d, ends >= 2, middle >= 1.
pub fn bijl_triples(d: u32) -> Vec<(u32, u32, u32)> {
    let mut out = BTreeSet::new();
    for i in 2..=d {
        for l in 2..=d {
            if i + l < d {
                let t = (i, d - i - l, l);
                out.insert(t.min((l, d - i - l, i)));
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct H4Ledger {
    pub d: u32,
    pub k: u32,
    pub count_bijl: usize,
    #[serde(serialize_with = "ser_int")]
    pub h2_term: Int,
    pub two_neg: usize,
    #[serde(serialize_with = "ser_int")]
    pub total: Int,
    pub k_squared: u32,
    pub balanced: bool,
    pub bijl_expected: u32,
}

/// h^4(M_{0,0}(P^1, 2k)) assembled from the B_{ijl} chains, the invariant
/// H^2 of M_{0,d-1} under S_{d-2}, and the graphs with two negative weights.
pub fn h4_ledger_p1(d: u32) -> Result<H4Ledger> {
    if d % 2 == 1 {
        return unsupported("odd-degree H^4 ledger");
    }
    if !(2..=12).contains(&d) {
        return domain("ledger implemented for 2 <= d <= 12");
    }
    let k = d / 2;
    let count_bijl = bijl_triples(d).len();
    // M_{0,d-1} needs three points
    let h2_term = if d >= 4 { invariant_dim(1, &[d - 2])? } else { Int::from(0) };
    let two_neg = p1_graph_census(d, 2)?.counts(2)[2];
    let total = Int::from(count_bijl) + &h2_term + Int::from(two_neg);
    let bijl_expected = (k - 1) * k.saturating_sub(2);
    Ok(H4Ledger {
        d,
        k,
        count_bijl,
        balanced: total == Int::from(k * k) && count_bijl as u32 == bijl_expected,
        h2_term,
        two_neg,
        total,
        k_squared: k * k,
        bijl_expected,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlagFamilyCounts {
    #[serde(serialize_with = "ser_int")]
    pub big_locus: Int,
    pub a: usize,
    pub b: usize,
    pub cde: u64,
    #[serde(serialize_with = "ser_int")]
    pub total: Int,
    #[serde(serialize_with = "ser_int")]
    pub dim_h2: Int,
}

impl FlagFamilyCounts {
    pub fn matches(&self) -> bool {
        self.total == self.dim_h2
    }
}

pub fn flag_family_counts(sig: &SpaceSignature) -> Result<FlagFamilyCounts> {
    if sig.degrees.iter().any(|&d| d == 0) {
        return domain("family counts need every d_i >= 1");
    }
    let l = sig.l();
    // the closed form of invariant_dim, also meaningful when n + sum(d) < 3
    let prod: Int = sig.degrees.iter().map(|&d| Int::from(d + 1)).product();
    let (n, li) = (sig.n as i64, l as i64);
    let big_locus = half_power_bracket(sig.n as u32, &prod) - 1 - li * n - binom(li + 1, 2) - binom(n, 2) + Int::from(sig.ones());
    let a = sig.n * l;
    let b = l - sig.ones();
    let cde = sig.target.h4();
    let total = &big_locus + Int::from(a + b) + Int::from(cde);
    Ok(FlagFamilyCounts { big_locus, a, b, cde, total, dim_h2: dim_h2(sig)? })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferCheck {
    pub d: u32,
    pub gap_n0: i64,
    pub gap_n1: i64,
    #[serde(serialize_with = "ser_opt_int")]
    pub five_graph: Option<Int>,
    pub ok: bool,
}

/// h^4 gaps between M_{0,n}(G, d) and M_{0,n}(P^3, d) from the catalog nets,
/// plus the five-graph count invariant_dim(1,(d-1)) + 2 + 1 + 1 + 2.
pub fn betti_transfer_check(d: u32) -> Result<TransferCheck> {
    if !(2..=8).contains(&d) {
        return limit("transfer check degree (2..=8)", 8);
    }
    let g = Target::Grass(Grass::new(3, 6)?);
    let p3 = Target::Proj(3);
    let gap = |n| -> Result<i64> { Ok(codim2_catalog(&g, n, d)?.net() - codim2_catalog(&p3, n, d)?.net()) };
    let gap_n0 = gap(0)?;
    let gap_n1 = gap(1)?;
    let five_graph = if d >= 3 { Some(invariant_dim(1, &[d - 1])? + 6) } else { None };
    let d64 = d as i64;
    let ok = gap_n0 == d64 + 3 && gap_n1 == 2 * d64 + 3 && five_graph.as_ref().map_or(true, |v| *v == Int::from(d64 + 3));
    Ok(TransferCheck { d, gap_n0, gap_n1, five_graph, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(t: &str, n: usize, d: &[u32]) -> SpaceSignature {
        SpaceSignature::new(Target::parse(t).unwrap(), n, d.to_vec()).unwrap()
    }

    #[test]
    fn small_graph_lists() {
        assert_eq!(p1_graphs(1).unwrap().len(), 1);
        // edge of degree 2, and the paths 0-1-0 and 1-0-1
        assert_eq!(p1_graphs(2).unwrap().len(), 3);
        assert!(p1_graphs(13).is_err());
        assert!(p1_graph_census(1, 2).is_err());
    }

    #[test]
    fn census_low_buckets() {
        for d in 2..=10 {
            let c = p1_graph_census(d, 2).unwrap().counts(2);
            assert_eq!(&c[..2], &[1, 1], "d = {d}");
        }
        assert_eq!(p1_graph_census(2, 2).unwrap().counts(2)[2], 1);
        assert_eq!(p1_graph_census(3, 2).unwrap().counts(2)[2], 2);
        for d in 4..=10 {
            assert_eq!(p1_graph_census(d, 2).unwrap().counts(2)[2], 2 + d as usize / 2, "d = {d}");
        }
    }

    #[test]
    fn census_is_duplicate_free() {
        for d in 1..=7 {
            let gs = p1_graphs(d).unwrap();
            let enc: BTreeSet<_> = gs.iter().map(|g| g.encoding.clone()).collect();
            assert_eq!(enc.len(), gs.len());
            for g in &gs {
                assert_eq!(g.degree(), d);
                assert!(g.edges.iter().all(|&(a, b, _)| g.labels[a] != g.labels[b]));
            }
        }
    }

    #[test]
    fn pruned_census_matches_full() {
        for d in 2..=7 {
            let full = p1_graphs(d).unwrap().into_iter().filter(|g| g.negative_weights() <= 3).count();
            assert_eq!(p1_graphs_bounded(d, 3).unwrap().len(), full);
        }
    }

    #[test]
    fn relabelled_graph_has_same_encoding() {
        let a = FixedGraph::new(vec![0, 1, 0], vec![(0, 1, 2), (1, 2, 1)]);
        let b = FixedGraph::new(vec![0, 0, 1], vec![(2, 1, 1), (0, 2, 2)]);
        assert_eq!(a.encoding, b.encoding);
        let c = FixedGraph::new(vec![1, 0, 1], vec![(0, 1, 2), (1, 2, 1)]);
        assert_ne!(a.encoding, c.encoding);
    }

    #[test]
    fn ledger_examples() {
        let l = h4_ledger_p1(4).unwrap();
        assert_eq!((l.count_bijl, l.h2_term.clone(), l.two_neg), (0, Int::from(0), 4));
        assert!(l.balanced);
        let l = h4_ledger_p1(6).unwrap();
        assert_eq!(bijl_triples(6), vec![(2, 1, 3), (2, 2, 2)]);
        assert_eq!(l.total, Int::from(9));
        for d in (2..=12).step_by(2) {
            assert!(h4_ledger_p1(d).unwrap().balanced, "d = {d}");
        }
        assert!(h4_ledger_p1(5).is_err());
    }

    #[test]
    fn family_examples() {
        let f = flag_family_counts(&sig("g:2,4", 0, &[2])).unwrap();
        assert_eq!((f.big_locus.clone(), f.a, f.b, f.cde), (Int::from(0), 0, 1, 2));
        assert!(f.matches());
        let f = flag_family_counts(&sig("pr:3", 1, &[2])).unwrap();
        assert_eq!((f.big_locus.clone(), f.a, f.b, f.cde), (Int::from(0), 1, 1, 1));
        assert_eq!(f.total, Int::from(3));
        let f = flag_family_counts(&sig("flag:1,2@3", 0, &[1, 1])).unwrap();
        assert_eq!(f.b, 0);
        assert!(f.matches());
    }

    #[test]
    fn transfer_examples() {
        let t = betti_transfer_check(3).unwrap();
        assert_eq!((t.gap_n0, t.five_graph.clone()), (6, Some(Int::from(6))));
        let t = betti_transfer_check(4).unwrap();
        assert_eq!((t.gap_n0, t.gap_n1), (7, 11));
        let t = betti_transfer_check(2).unwrap();
        assert_eq!(t.gap_n0, 5);
        assert!(t.ok);
        assert!(betti_transfer_check(9).is_err());
    }
}
