//! Reconstruction of the invariants of G(2,N) from the two-point family
//! <b1, b2, c2, ..., c2>_d, working in the c1^a c2^b monomial basis.
//!
//! Each step rewrites an invariant by a relation pulled back to n markings:
//!  strip: c2 moves from a slot i onto the accumulator slot j, using the
//!         relation ev_i^*c2 - ev_j^*c2 - psi_j kappa(c2) = -Delta({i},{j}|c2,.)
//!         with psi_j expanded through a third slot l;
//!  km:    a c1 factor moves onto slot j by WDVV on four points.
//! Every rewrite lowers (d, n, #slots other than c2, degree outside slot j),
//! and a visiting set reports any cycle.

use std::collections::{HashMap, HashSet};

use num_traits::Zero;

use crate::error::{unsupported, Error, Result};
use crate::gwcore::kontsevich::multiset_splits;
use crate::gwcore::localization::Oracle;
use crate::gwcore::table::{InvariantTable, Provenance};
use crate::gwcore::InvariantKey;
use crate::rational::{q, Q};
use crate::schubert::{class_to_monomials, integrate, mono_degree, monomials_to_class, CohClass, Grass, Partition, Poly2};

pub type Mono = (u32, u32);

const C1: Mono = (1, 0);
const C2: Mono = (0, 1);
const ONE: Mono = (0, 0);

/// Supplies <b1, b2, c2, ..., c2>_d (count copies of c2); symmetric in b1, b2.
pub trait BaseProvider {
    fn base(&mut self, b1: Mono, b2: Mono, count: usize, d: u32) -> Result<Q>;
}

fn mono_poly(m: Mono) -> Poly2 {
    [(m, q(1))].into_iter().collect()
}

/// Expand a list of monomials into Schubert keys.
fn schubert_terms(g: Grass, monos: &[Mono]) -> Result<Vec<(Vec<Partition>, Q)>> {
    let mut out = vec![(vec![], q(1))];
    for m in monos {
        let class = monomials_to_class(g, &mono_poly(*m))?;
        let mut next = vec![];
        for (parts, c) in &out {
            for (p, v) in &class.terms {
                let mut p2 = parts.clone();
                p2.push(p.clone());
                next.push((p2, c * v));
            }
        }
        out = next;
    }
    Ok(out)
}

/// Base invariants read from the localization oracle.
pub struct OracleProvider {
    pub oracle: Oracle,
    pub calls: usize,
}

impl OracleProvider {
    pub fn new(oracle: Oracle) -> Self {
        OracleProvider { oracle, calls: 0 }
    }
}

impl BaseProvider for OracleProvider {
    fn base(&mut self, b1: Mono, b2: Mono, count: usize, d: u32) -> Result<Q> {
        self.calls += 1;
        let g = self.oracle.target;
        let mut monos = vec![b1, b2];
        monos.extend(std::iter::repeat(C2).take(count));
        let mut total = Q::zero();
        for (parts, c) in schubert_terms(g, &monos)? {
            total += c * self.oracle.eval(&InvariantKey::new(g, d, parts))?;
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanishingRule {
    Vanishes,
    Defers,
}

/// For d >= 3 the base invariants with n points vanish when N > (n-3)/(d-2).
/// d = 2 has no bound (division by zero read as "no vanishing"); d = 1 defers.
pub fn base_provider_vanishing(n_ambient: usize, n: usize, d: u32) -> VanishingRule {
    if d >= 3 && (n_ambient as i64) * (d as i64 - 2) > n as i64 - 3 {
        VanishingRule::Vanishes
    } else {
        VanishingRule::Defers
    }
}

/// Applies the vanishing rule before deferring to `inner`.
pub struct VanishingProvider<P: BaseProvider> {
    pub n_ambient: usize,
    pub inner: P,
    pub vanished: usize,
}

impl<P: BaseProvider> VanishingProvider<P> {
    pub fn new(n_ambient: usize, inner: P) -> Self {
        VanishingProvider { n_ambient, inner, vanished: 0 }
    }
}

impl<P: BaseProvider> BaseProvider for VanishingProvider<P> {
    fn base(&mut self, b1: Mono, b2: Mono, count: usize, d: u32) -> Result<Q> {
        if base_provider_vanishing(self.n_ambient, count + 2, d) == VanishingRule::Vanishes {
            self.vanished += 1;
            return Ok(Q::zero());
        }
        self.inner.base(b1, b2, count, d)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub strip: usize,
    pub km: usize,
    pub provider: usize,
    pub divisor: usize,
}

pub struct G2Reconstructor<P: BaseProvider> {
    pub target: Grass,
    pub provider: P,
    pub stats: Stats,
    memo: HashMap<(u32, Vec<Mono>), Q>,
    active: HashSet<(u32, Vec<Mono>)>,
    chain: Vec<(u32, Vec<Mono>)>,
    duals: Vec<(Poly2, Poly2)>,
}

impl<P: BaseProvider> G2Reconstructor<P> {
    pub fn new(target: Grass, provider: P) -> Result<Self> {
        if target.k != 2 || target.n < 4 {
            return unsupported("reconstruction is implemented for G(2,N), N >= 4");
        }
        let mut duals = vec![];
        for p in target.basis() {
            let a = class_to_monomials(&CohClass::schubert(target, p.clone())?)?;
            let b = class_to_monomials(&CohClass::schubert(target, target.dual(&p)?)?)?;
            duals.push((a, b));
        }
        Ok(G2Reconstructor {
            target,
            provider,
            stats: Stats::default(),
            memo: HashMap::new(),
            active: HashSet::new(),
            chain: vec![],
            duals,
        })
    }

    fn dim(&self) -> u32 {
        self.target.dim()
    }

    /// reconstruct_g2 on a key in the Schubert basis.
    pub fn eval_key(&mut self, key: &InvariantKey) -> Result<Q> {
        if key.target != self.target {
            return Err(Error::Domain(format!("reconstructor for {} asked about {}", self.target, key.target)));
        }
        let mut polys = vec![];
        for p in &key.insertions {
            polys.push(class_to_monomials(&CohClass::schubert(self.target, p.clone())?)?);
        }
        self.eval_polys(key.degree, &[], &polys)
    }

    /// Record every evaluated Schubert key into a table.
    pub fn eval_into(&mut self, key: &InvariantKey, table: &mut InvariantTable) -> Result<Q> {
        let v = self.eval_key(key)?;
        table.insert(key.clone(), v.clone(), Provenance::Recursion)?;
        Ok(v)
    }

    /// Multilinear expansion: fixed monomials plus polynomial slots.
    fn eval_polys(&mut self, d: u32, fixed: &[Mono], polys: &[Poly2]) -> Result<Q> {
        let mut total = Q::zero();
        let mut stack: Vec<(Vec<Mono>, Q)> = vec![(fixed.to_vec(), q(1))];
        for p in polys {
            let mut next = vec![];
            for (ms, c) in &stack {
                for (m, v) in p {
                    let mut ms2 = ms.clone();
                    ms2.push(*m);
                    next.push((ms2, c * v));
                }
            }
            stack = next;
        }
        for (ms, c) in stack {
            total += c * self.f(d, &ms)?;
        }
        Ok(total)
    }

    /// Sum over the diagonal: sum_mu F_a(left, T_mu) F_b(T_mu^vee, right).
    fn split(&mut self, da: u32, left: &[Mono], db: u32, right: &[Mono]) -> Result<Q> {
        let mut total = Q::zero();
        for idx in 0..self.duals.len() {
            let (a, b) = self.duals[idx].clone();
            let fa = self.eval_polys(da, left, &[a])?;
            if fa.is_zero() {
                continue;
            }
            total += fa * self.eval_polys(db, right, &[b])?;
        }
        Ok(total)
    }

    pub fn f(&mut self, d: u32, monos: &[Mono]) -> Result<Q> {
        let mut ms = monos.to_vec();
        ms.sort_unstable();
        let key = (d, ms);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if !self.active.insert(key.clone()) {
            let chain: Vec<String> = self.chain.iter().map(|(d, m)| format!("{d}:{m:?}")).collect();
            return Err(Error::Algorithm(format!("reconstruction cycle at {}:{:?} via {}", key.0, key.1, chain.join(" -> "))));
        }
        self.chain.push(key.clone());
        let v = self.compute(d, &key.1);
        self.chain.pop();
        self.active.remove(&key);
        let v = v?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn compute(&mut self, d: u32, s: &[Mono]) -> Result<Q> {
        let n = s.len();
        let g = self.target;
        let total_deg: u32 = s.iter().map(|&m| mono_degree(m)).sum();
        if total_deg as i64 != self.dim() as i64 + d as i64 * g.n as i64 + n as i64 - 3 {
            return Ok(Q::zero());
        }
        if s.iter().any(|&m| mono_degree(m) > self.dim()) {
            return Ok(Q::zero());
        }
        if d == 0 {
            if n != 3 {
                return Ok(Q::zero());
            }
            let prod = s.iter().fold(ONE, |acc, m| (acc.0 + m.0, acc.1 + m.1));
            return Ok(integrate(&monomials_to_class(g, &mono_poly(prod))?));
        }
        if n < 2 || s.contains(&ONE) {
            return Ok(Q::zero());
        }
        if n == 2 {
            self.stats.provider += 1;
            return self.provider.base(s[0], s[1], 0, d);
        }
        if let Some(pos) = s.iter().position(|&m| m == C1) {
            self.stats.divisor += 1;
            let mut rest = s.to_vec();
            rest.remove(pos);
            return Ok(q(d as i64) * self.f(d, &rest)?);
        }
        let loose: Vec<usize> = (0..n).filter(|&i| s[i] != C2).collect();
        if loose.len() <= 2 {
            self.stats.provider += 1;
            let b1 = loose.first().map_or(C2, |&i| s[i]);
            let b2 = loose.get(1).map_or(C2, |&i| s[i]);
            return self.provider.base(b1, b2, n - 2, d);
        }
        // accumulator: the loose slot of largest degree (last one on ties)
        let j = *loose.iter().max_by_key(|&&i| (mono_degree(s[i]), i)).unwrap();
        let strip_from = loose.iter().copied().find(|&i| i != j && s[i].1 >= 1);
        if let Some(i) = strip_from {
            let l = *loose.iter().find(|&&t| t != i && t != j).unwrap();
            self.stats.strip += 1;
            self.strip(d, s, i, j, l)
        } else {
            let i = *loose.iter().find(|&&t| t != j).unwrap();
            let k = (0..n).find(|&t| t != i && t != j).unwrap();
            self.stats.km += 1;
            self.km(d, s, i, j, k)
        }
    }

    fn strip(&mut self, d: u32, s: &[Mono], i: usize, j: usize, l: usize) -> Result<Q> {
        let x = (s[i].0, s[i].1 - 1);
        let y = s[j];
        let z = s[l];
        let r: Vec<Mono> = (0..s.len()).filter(|&t| t != i && t != j && t != l).map(|t| s[t]).collect();
        let mul = |a: Mono, b: Mono| (a.0 + b.0, a.1 + b.1);
        let with = |extra: &[Mono]| {
            let mut v = r.clone();
            v.extend_from_slice(extra);
            v
        };
        let mut total = self.f(d, &with(&[x, mul(C2, y), z]))?;
        total += self.f(d, &with(&[mul(x, z), y, C2]))?;
        total -= self.f(d, &with(&[x, mul(y, z), C2]))?;
        for da in 1..d {
            let db = d - da;
            for (ra, rb, w) in multiset_splits(&r) {
                let w = q(w as i64);
                // psi_j through {i, l}: A holds j, B holds i and l; kappa(c2) on either side
                let mut a1 = ra.clone();
                a1.extend_from_slice(&[y, C2]);
                let mut b1 = rb.clone();
                b1.extend_from_slice(&[x, z]);
                let mut psi = self.split(da, &a1, db, &b1)?;
                let mut a2 = ra.clone();
                a2.push(y);
                let mut b2 = rb.clone();
                b2.extend_from_slice(&[x, z, C2]);
                psi += self.split(da, &a2, db, &b2)?;
                total += &w * psi;
            }
            // Delta({i},{j}|c2,.): i with c2 on one side, j on the other, z and R anywhere
            let mut others = r.clone();
            others.push(z);
            others.sort_unstable();
            for (sa, sb, w) in multiset_splits(&others) {
                let mut a = sa.clone();
                a.extend_from_slice(&[x, C2]);
                let mut b = sb.clone();
                b.push(y);
                total -= q(w as i64) * self.split(da, &a, db, &b)?;
            }
        }
        Ok(total)
    }

    fn km(&mut self, d: u32, s: &[Mono], i: usize, j: usize, k: usize) -> Result<Q> {
        let x = s[j];
        let y = (s[i].0 - 1, s[i].1);
        let z = s[k];
        let r: Vec<Mono> = (0..s.len()).filter(|&t| t != i && t != j && t != k).map(|t| s[t]).collect();
        let mul = |a: Mono, b: Mono| (a.0 + b.0, a.1 + b.1);
        let with = |extra: &[Mono]| {
            let mut v = r.clone();
            v.extend_from_slice(extra);
            v
        };
        let dq = q(d as i64);
        let mut total = self.f(d, &with(&[mul(C1, x), z, y]))?;
        total += &dq * self.f(d, &with(&[x, mul(z, y)]))?;
        total -= &dq * self.f(d, &with(&[mul(x, z), y]))?;
        for da in 1..d {
            let db = d - da;
            for (ra, rb, w) in multiset_splits(&r) {
                let w = q(w as i64);
                let mut a1 = ra.clone();
                a1.push(x);
                let mut b1 = rb.clone();
                b1.extend_from_slice(&[z, y]);
                total += &w * q(da as i64) * self.split(da, &a1, db, &b1)?;
                let mut a2 = ra.clone();
                a2.extend_from_slice(&[x, z]);
                let mut b2 = rb.clone();
                b2.push(y);
                total -= &w * q(db as i64) * self.split(da, &a2, db, &b2)?;
            }
        }
        Ok(total)
    }
}

/// reconstruct_g2 with an oracle-backed provider.
pub fn reconstruct_g2<P: BaseProvider>(key: &InvariantKey, provider: P) -> Result<Q> {
    G2Reconstructor::new(key.target, provider)?.eval_key(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwcore::expected_dim_gate;

    fn key(g: Grass, d: u32, ins: &[&[u32]]) -> InvariantKey {
        InvariantKey::new(g, d, ins.iter().map(|p| p.to_vec()).collect())
    }

    fn engine(g: Grass) -> G2Reconstructor<OracleProvider> {
        G2Reconstructor::new(g, OracleProvider::new(Oracle::new(g, 2).unwrap())).unwrap()
    }

    #[test]
    fn examples() {
        let g = Grass::new(2, 4).unwrap();
        let mut e = engine(g);
        assert_eq!(e.eval_key(&key(g, 1, &[&[1], &[2], &[1, 1], &[2, 2]])).unwrap(), q(1));
        assert_eq!(e.eval_key(&key(g, 1, &[&[1], &[2], &[2], &[2, 2]])).unwrap(), q(0));
        assert_eq!(e.eval_key(&key(g, 1, &[&[1], &[1], &[1]])).unwrap(), q(0));
    }

    #[test]
    fn vanishing_rule() {
        assert_eq!(base_provider_vanishing(7, 4, 3), VanishingRule::Vanishes);
        assert_eq!(base_provider_vanishing(7, 4, 1), VanishingRule::Defers);
        assert_eq!(base_provider_vanishing(4, 6, 2), VanishingRule::Defers);
    }

    #[test]
    fn agrees_with_oracle_on_small_keys() {
        let g = Grass::new(2, 4).unwrap();
        let mut e = engine(g);
        let mut o = Oracle::new(g, 2).unwrap();
        let basis = g.basis();
        let mut checked = 0;
        for d in 1..=2u32 {
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        for x in &basis {
                            let k = InvariantKey::new(g, d, vec![a.clone(), b.clone(), c.clone(), x.clone()]);
                            if !expected_dim_gate(&k) {
                                continue;
                            }
                            assert_eq!(e.eval_key(&k).unwrap(), o.eval(&k).unwrap(), "{k:?}");
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 10);
    }
}
