//! Independent n-point oracle: exact torus localization on M_{0,n}(G(k,N), d)
//! over Kontsevich's fixed graphs (trees of T-invariant curves).
//!
//! A graph contributes
//!   1/(|Aut| prod d_e) * prod_e 1/E_e * prod_v e(T_v)^{val-1} C_v * prod_i (sum_v B_v alpha_i(v))
//! where B_v = sum_F 1/omega_F, C_v = prod_F omega_F^{-1} * B_v^{val-3}. Placing a
//! marking on a vertex multiplies its Hodge integral by B_v, which is why the
//! insertions factor out of the graph sum.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{limit, Error, Result};
use crate::gwcore::quantum::three_point;
use crate::gwcore::{expected_dim_gate, InvariantKey};
use crate::rational::{factorial, frac, q, qi, Q};
use crate::schubert::{integrate, jacobi_trudi_words, product_all, size, CohClass, Grass, Partition};

pub const MAX_DEGREE: u32 = 3;
pub const MAX_N: usize = 8;

const PRIMES: [i64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Deterministic weight vectors; later attempts are used when an earlier one
/// makes some vertex or edge factor degenerate.
pub fn candidate_weights(attempt: u32, n: usize) -> Vec<i64> {
    let a = attempt as i64;
    (0..n).map(|j| {
        let p = PRIMES[j];
        p * p * p * (a + 1) - 11 * p * p + (3 + a) * p * (j as i64 % 3)
    }).collect()
}

struct GraphTerm {
    base: Q,
    verts: Vec<(usize, Q)>,
}

pub struct Oracle {
    pub target: Grass,
    pub weights: Vec<i64>,
    points: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    euler: Vec<Q>,
    graphs: HashMap<u32, Vec<GraphTerm>>,
    restrictions: HashMap<Partition, Vec<Q>>,
    memo: HashMap<InvariantKey, Q>,
    max_degree: u32,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut vec![], &mut out);
    out
}

/// Labelled trees on V vertices via Pruefer sequences.
fn labelled_trees(v: usize) -> Vec<Vec<(usize, usize)>> {
    if v == 1 {
        return vec![vec![]];
    }
    if v == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = vec![];
    let total = v.pow((v - 2) as u32);
    for code in 0..total {
        let mut seq = vec![];
        let mut c = code;
        for _ in 0..v - 2 {
            seq.push(c % v);
            c /= v;
        }
        let mut deg = vec![1usize; v];
        for &s in &seq {
            deg[s] += 1;
        }
        let mut edges = vec![];
        for &s in &seq {
            let leaf = (0..v).find(|&i| deg[i] == 1).unwrap();
            edges.push((leaf, s));
            deg[leaf] -= 1;
            deg[s] -= 1;
        }
        let rest: Vec<usize> = (0..v).filter(|&i| deg[i] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for first in 1..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Oracle {
    /// Oracle for degrees up to max_degree, with the first non-degenerate
    /// candidate weight vector at or after `first_attempt`.
    pub fn with_attempt(target: Grass, max_degree: u32, first_attempt: u32) -> Result<Self> {
        if max_degree > MAX_DEGREE {
            return limit("oracle degree", MAX_DEGREE as usize);
        }
        if target.n > MAX_N {
            return limit("oracle N", MAX_N);
        }
        let mut last = None;
        for attempt in first_attempt..first_attempt + 12 {
            match Self::build(target, max_degree, candidate_weights(attempt, target.n)) {
                Ok(o) => return Ok(o),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap())
    }

    pub fn new(target: Grass, max_degree: u32) -> Result<Self> {
        Self::with_attempt(target, max_degree, 0)
    }

    /// Oracle that has passed its self-certification.
    pub fn certified(target: Grass, max_degree: u32) -> Result<Self> {
        let mut o = Self::new(target, max_degree)?;
        o.certify()?;
        Ok(o)
    }

    fn build(target: Grass, max_degree: u32, weights: Vec<i64>) -> Result<Self> {
        let points = subsets(target.n, target.k);
        let index = points.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut o = Oracle {
            target,
            weights,
            points,
            index,
            euler: vec![],
            graphs: HashMap::new(),
            restrictions: HashMap::new(),
            memo: HashMap::new(),
            max_degree,
        };
        o.euler = (0..o.points.len())
            .map(|p| o.tangent(p).iter().map(|t| q(t.2)).product())
            .collect();
        if o.euler.iter().any(|e| e.is_zero()) {
            return Err(Error::Integrity("weights are not distinct".into()));
        }
        for d in 1..=max_degree {
            let g = o.graph_terms(d)?;
            o.graphs.insert(d, g);
        }
        Ok(o)
    }

    /// Tangent directions at a fixed point: (s in I, q not in I, x_q - x_s).
    fn tangent(&self, p: usize) -> Vec<(usize, usize, i64)> {
        let set = &self.points[p];
        let mut out = vec![];
        for &s in set {
            for qq in 0..self.target.n {
                if !set.contains(&qq) {
                    out.push((s, qq, self.weights[qq] - self.weights[s]));
                }
            }
        }
        out
    }

    fn neighbour(&self, p: usize, s: usize, qq: usize) -> usize {
        let mut set: Vec<usize> = self.points[p].iter().map(|&x| if x == s { qq } else { x }).collect();
        set.sort_unstable();
        self.index[&set]
    }

    /// Product of the nonzero weights of H^0(C_e, f^*T) for a degree-e cover
    /// of the T-curve leaving p in direction (s, q).
    fn edge_euler(&self, p: usize, s: usize, qq: usize, e: u32) -> Result<Q> {
        let w = self.weights[qq] - self.weights[s];
        let mut prod = Q::one();
        let mut zeros = 0;
        for (s2, q2, alpha) in self.tangent(p) {
            let a = (q2 == qq) as u32 + (s2 == s) as u32;
            for j in 0..=a * e {
                let v = q(alpha) - frac(j as i64 * w, e as i64);
                if v.is_zero() {
                    zeros += 1;
                } else {
                    prod *= v;
                }
            }
        }
        if zeros != 1 {
            return Err(Error::Integrity(format!("degenerate edge weights ({zeros} zero weights)")));
        }
        Ok(prod)
    }

    fn graph_terms(&self, d: u32) -> Result<Vec<GraphTerm>> {
        let mut out = vec![];
        let mut edge_cache: HashMap<(usize, usize, usize, u32), Q> = HashMap::new();
        for v in 2..=(d as usize + 1) {
            let vfact = qi(&factorial(v as u32));
            for tree in labelled_trees(v) {
                let mut adj = vec![vec![]; v];
                for (ei, &(a, b)) in tree.iter().enumerate() {
                    adj[a].push((b, ei));
                    adj[b].push((a, ei));
                }
                // BFS order from vertex 0 so every later vertex has a placed parent
                let mut order = vec![0usize];
                let mut parent = vec![usize::MAX; v];
                let mut seen = vec![false; v];
                seen[0] = true;
                let mut i = 0;
                while i < order.len() {
                    let x = order[i];
                    for &(y, ei) in &adj[x] {
                        if !seen[y] {
                            seen[y] = true;
                            parent[y] = ei;
                            order.push(y);
                        }
                    }
                    i += 1;
                }
                for degs in compositions(d, v - 1) {
                    let mut labels = vec![usize::MAX; v];
                    for p0 in 0..self.points.len() {
                        labels[0] = p0;
                        self.place(1, &order, &parent, &tree, &degs, &mut labels, &vfact, &mut edge_cache, &mut out)?;
                    }
                }
            }
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn place(
        &self,
        at: usize,
        order: &[usize],
        parent: &[usize],
        tree: &[(usize, usize)],
        degs: &[u32],
        labels: &mut Vec<usize>,
        vfact: &Q,
        cache: &mut HashMap<(usize, usize, usize, u32), Q>,
        out: &mut Vec<GraphTerm>,
    ) -> Result<()> {
        if at == order.len() {
            out.push(self.term(tree, degs, labels, vfact, cache)?);
            return Ok(());
        }
        let y = order[at];
        let (a, b) = tree[parent[y]];
        let x = if a == y { b } else { a };
        for (s, qq, _) in self.tangent(labels[x]) {
            labels[y] = self.neighbour(labels[x], s, qq);
            self.place(at + 1, order, parent, tree, degs, labels, vfact, cache, out)?;
        }
        labels[y] = usize::MAX;
        Ok(())
    }

    fn direction(&self, from: usize, to: usize) -> (usize, usize) {
        let a = &self.points[from];
        let b = &self.points[to];
        let s = *a.iter().find(|x| !b.contains(x)).unwrap();
        let qq = *b.iter().find(|x| !a.contains(x)).unwrap();
        (s, qq)
    }

    fn term(
        &self,
        tree: &[(usize, usize)],
        degs: &[u32],
        labels: &[usize],
        vfact: &Q,
        cache: &mut HashMap<(usize, usize, usize, u32), Q>,
    ) -> Result<GraphTerm> {
        let v = labels.len();
        let mut base = Q::one() / vfact;
        let mut flags: Vec<Vec<Q>> = vec![vec![]; v];
        for (&(a, b), &e) in tree.iter().zip(degs) {
            let (s, qq) = self.direction(labels[a], labels[b]);
            let key = (labels[a], s, qq, e);
            if !cache.contains_key(&key) {
                let val = self.edge_euler(labels[a], s, qq, e)?;
                cache.insert(key, val);
            }
            base /= &cache[&key] * q(e as i64);
            let w = frac(self.weights[qq] - self.weights[s], e as i64);
            flags[a].push(w.clone());
            flags[b].push(-w);
        }
        let mut verts = vec![];
        for (x, fl) in flags.iter().enumerate() {
            let val = fl.len() as i32;
            let bsum: Q = fl.iter().map(|w| Q::one() / w).sum();
            let pow = val - 3;
            if bsum.is_zero() && pow < 0 {
                return Err(Error::Integrity("degenerate vertex weights".into()));
            }
            for w in fl {
                base /= w;
            }
            base *= pow_q(&bsum, pow);
            base *= pow_q(&self.euler[labels[x]], val - 1);
            verts.push((labels[x], bsum));
        }
        Ok(GraphTerm { base, verts })
    }

    fn restriction(&mut self, p: &Partition) -> &Vec<Q> {
        if !self.restrictions.contains_key(p) {
            let mut vals = vec![];
            for pt in 0..self.points.len() {
                let qweights: Vec<i64> = (0..self.target.n).filter(|x| !self.points[pt].contains(x)).map(|x| self.weights[x]).collect();
                let e = elementary(&qweights);
                let mut total = Q::zero();
                for (sign, word) in jacobi_trudi_words(p) {
                    let mut t = q(sign);
                    for m in word {
                        t *= e.get(m as usize).cloned().unwrap_or_else(Q::zero);
                    }
                    total += t;
                }
                vals.push(total);
            }
            self.restrictions.insert(p.clone(), vals);
        }
        &self.restrictions[p]
    }

    /// Classical integral by localization (used only for certification).
    pub fn classical_localized(&mut self, classes: &[Partition]) -> Q {
        let mut total = Q::zero();
        for pt in 0..self.points.len() {
            let mut t = Q::one() / &self.euler[pt];
            for c in classes {
                t *= &self.restriction(c)[pt];
            }
            total += t;
        }
        total
    }

    pub fn eval(&mut self, key: &InvariantKey) -> Result<Q> {
        if key.target != self.target {
            return Err(Error::Domain(format!("oracle for {} asked about {}", self.target, key.target)));
        }
        if key.degree > self.max_degree {
            return limit("oracle degree", self.max_degree as usize);
        }
        if let Some(v) = self.memo.get(key) {
            return Ok(v.clone());
        }
        let v = self.compute(key)?;
        self.memo.insert(key.clone(), v.clone());
        Ok(v)
    }

    fn compute(&mut self, key: &InvariantKey) -> Result<Q> {
        if key.insertions.iter().any(|p| !self.target.fits(p)) {
            return Err(Error::Domain("insertion outside the box".into()));
        }
        if !expected_dim_gate(key) {
            return Ok(Q::zero());
        }
        if key.degree == 0 {
            if key.n() != 3 {
                return Ok(Q::zero());
            }
            let classes: Vec<CohClass> = key.insertions.iter().map(|p| CohClass::schubert(self.target, p.clone())).collect::<Result<_>>()?;
            return Ok(integrate(&product_all(self.target, &classes)?));
        }
        let mut distinct: Vec<(Partition, usize)> = vec![];
        for p in &key.insertions {
            match distinct.last_mut() {
                Some((last, m)) if last == p => *m += 1,
                _ => distinct.push((p.clone(), 1)),
            }
        }
        let rest: Vec<Vec<Q>> = distinct.iter().map(|(p, _)| self.restriction(p).clone()).collect();
        let mut total = Q::zero();
        for g in &self.graphs[&key.degree] {
            let mut t = g.base.clone();
            for ((_, m), r) in distinct.iter().zip(&rest) {
                let s: Q = g.verts.iter().map(|(pt, b)| b * &r[*pt]).sum();
                t *= pow_q(&s, *m as i32);
                if t.is_zero() {
                    break;
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Self-checks before the oracle is trusted: classical integrals, every
    /// 3-point key against the rim-hook products, and independence of the
    /// weights on a sample of 4-point keys.
    pub fn certify(&mut self) -> Result<()> {
        let g = self.target;
        let basis = g.basis();
        for a in &basis {
            for b in &basis {
                // only top-degree products localize to a number
                if size(a) + size(b) != g.dim() {
                    continue;
                }
                let classes = vec![a.clone(), b.clone()];
                let want = integrate(&product_all(g, &[CohClass::schubert(g, a.clone())?, CohClass::schubert(g, b.clone())?])?);
                if self.classical_localized(&classes) != want {
                    return Err(Error::Integrity(format!("classical localization disagrees on {a:?} {b:?}")));
                }
            }
        }
        for d in 0..=self.max_degree.min(2) {
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate().skip(i) {
                    for c in basis.iter().skip(j) {
                        let key = InvariantKey::new(g, d, vec![a.clone(), b.clone(), c.clone()]);
                        if !expected_dim_gate(&key) {
                            continue;
                        }
                        let want = three_point(g, a, b, c, d)?;
                        let got = self.eval(&key)?;
                        if got != want {
                            return Err(Error::Integrity(format!("oracle {got} vs quantum {want} on {key:?}")));
                        }
                    }
                }
            }
        }
        let mut other = Oracle::with_attempt(g, self.max_degree.min(2), 5)?;
        let mut checked = 0;
        'outer: for d in 1..=self.max_degree.min(2) {
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        let key = InvariantKey::new(g, d, vec![a.clone(), b.clone(), c.clone(), vec![1]]);
                        if !expected_dim_gate(&key) {
                            continue;
                        }
                        if self.eval(&key)? != other.eval(&key)? {
                            return Err(Error::Integrity(format!("oracle depends on weights at {key:?}")));
                        }
                        checked += 1;
                        if checked > 12 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn elementary(xs: &[i64]) -> Vec<Q> {
    let mut e = vec![Q::one()];
    for &x in xs {
        let mut next = e.clone();
        next.push(Q::zero());
        for i in 0..e.len() {
            next[i + 1] += &e[i] * q(x);
        }
        e = next;
    }
    e
}

fn pow_q(x: &Q, e: i32) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(Q::one() / x, (-e) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(g: Grass, d: u32, ins: &[&[u32]]) -> InvariantKey {
        InvariantKey::new(g, d, ins.iter().map(|p| p.to_vec()).collect())
    }

    #[test]
    fn tree_and_composition_counts() {
        assert_eq!(labelled_trees(4).len(), 16);
        assert_eq!(labelled_trees(3).len(), 3);
        assert_eq!(compositions(3, 2).len(), 2);
    }

    #[test]
    fn projective_plane_counts() {
        let p2 = Grass::projective(2);
        let mut o = Oracle::new(p2, 2).unwrap();
        assert_eq!(o.eval(&key(p2, 1, &[&[2], &[2]])).unwrap(), q(1));
        assert_eq!(o.eval(&key(p2, 1, &[&[2], &[2], &[1]])).unwrap(), q(1));
        assert_eq!(o.eval(&key(p2, 2, &[&[2], &[2], &[2], &[2], &[2]])).unwrap(), q(1));
        assert_eq!(o.eval(&key(p2, 1, &[&[2], &[2], &[2]])).unwrap(), q(0));
    }

    #[test]
    fn g24_examples() {
        let g = Grass::new(2, 4).unwrap();
        let mut o = Oracle::certified(g, 2).unwrap();
        assert_eq!(o.eval(&key(g, 1, &[&[2], &[1, 1], &[2, 2]])).unwrap(), q(1));
        assert_eq!(o.eval(&key(g, 1, &[&[1], &[2], &[1, 1], &[2, 2]])).unwrap(), q(1));
        assert_eq!(o.eval(&key(g, 1, &[&[1], &[2], &[2], &[2, 2]])).unwrap(), q(0));
        assert_eq!(o.classical_localized(&[vec![1], vec![1], vec![1], vec![1]]), q(2));
        // two general lines of P^3 do not span a pencil
        assert_eq!(o.eval(&key(g, 1, &[&[2, 2], &[2, 2]])).unwrap(), q(0));
    }

    #[test]
    fn weight_independence_degree_two() {
        let g = Grass::new(2, 4).unwrap();
        let mut a = Oracle::new(g, 2).unwrap();
        let mut b = Oracle::with_attempt(g, 2, 3).unwrap();
        assert_ne!(a.weights, b.weights);
        for ins in [&[&[2u32, 2][..], &[2, 2], &[1, 1], &[2]][..], &[&[2, 1], &[2, 1], &[2, 1], &[2, 1]]] {
            let k = key(g, 2, ins);
            if expected_dim_gate(&k) {
                assert_eq!(a.eval(&k).unwrap(), b.eval(&k).unwrap());
            }
        }
    }
}
