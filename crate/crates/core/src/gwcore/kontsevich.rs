//! Genus-0 invariants of P^r by WDVV, coded twice: the closed Kontsevich
//! recursion for N_d of P^2, and a general reconstruction engine over
//! insertions H^a.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::Zero;

use crate::error::{limit, Error, Result};
use crate::rational::{binom, binom_u, q, qi, Int, Q};

pub const MAX_R: u32 = 3;
pub const MAX_DEGREE: u32 = 6;

/// N_d = sum N_{d1} N_{d2} d1^2 d2 (d2 C(3d-4, 3d1-2) - d1 C(3d-4, 3d1-1)).
pub fn kontsevich_closed(dmax: u32) -> Vec<Int> {
    let mut n: Vec<Int> = vec![Int::from(0), Int::from(1)];
    for d in 2..=dmax as i64 {
        let mut total = Int::from(0);
        for d1 in 1..d {
            let d2 = d - d1;
            let t = binom(3 * d - 4, 3 * d1 - 2) * d2 - binom(3 * d - 4, 3 * d1 - 1) * d1;
            total += &n[d1 as usize] * &n[d2 as usize] * (d1 * d1 * d2) * t;
        }
        n.push(total);
    }
    n.truncate(dmax as usize + 1);
    n
}

/// Ways to split a sorted multiset into (left, right), with multiplicity.
pub(crate) fn multiset_splits<T: Clone + Ord>(items: &[T]) -> Vec<(Vec<T>, Vec<T>, u64)> {
    let mut groups: Vec<(T, usize)> = vec![];
    for x in items {
        match groups.last_mut() {
            Some((y, m)) if y == x => *m += 1,
            _ => groups.push((x.clone(), 1)),
        }
    }
    let mut out = vec![(vec![], vec![], 1u64)];
    for (x, m) in groups {
        let mut next = vec![];
        for (l, r, w) in &out {
            for take in 0..=m {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.extend(std::iter::repeat(x.clone()).take(take));
                r2.extend(std::iter::repeat(x.clone()).take(m - take));
                next.push((l2, r2, w * binom_u(m, take)));
            }
        }
        out = next;
    }
    out
}

/// Memoized WDVV reconstruction of <H^{a_1}, ..., H^{a_n}>_d on P^r.
pub struct PrEngine {
    pub r: u32,
    memo: HashMap<(u32, Vec<u32>), Q>,
    active: HashSet<(u32, Vec<u32>)>,
}

impl PrEngine {
    pub fn new(r: u32) -> Result<Self> {
        if !(1..=MAX_R).contains(&r) {
            return limit("projective rank r", MAX_R as usize);
        }
        Ok(PrEngine { r, memo: HashMap::new(), active: HashSet::new() })
    }

    pub fn gate(&self, d: u32, a: &[u32]) -> bool {
        let r = self.r as i64;
        a.iter().map(|&x| x as i64).sum::<i64>() == r + d as i64 * (r + 1) + a.len() as i64 - 3
    }

    pub fn eval(&mut self, d: u32, a: &[u32]) -> Result<Q> {
        let mut a = a.to_vec();
        a.sort_unstable();
        let key = (d, a);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        if !self.active.insert(key.clone()) {
            return Err(Error::Algorithm(format!("WDVV recursion revisits degree {} insertions {:?}", key.0, key.1)));
        }
        let v = self.compute(d, &key.1);
        self.active.remove(&key);
        let v = v?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn compute(&mut self, d: u32, a: &[u32]) -> Result<Q> {
        let r = self.r;
        let n = a.len();
        if !self.gate(d, a) || a.iter().any(|&x| x > r) {
            return Ok(Q::zero());
        }
        if d == 0 {
            return Ok(if n == 3 { q(1) } else { Q::zero() });
        }
        if a.contains(&0) {
            return Ok(Q::zero());
        }
        if let Some(pos) = a.iter().position(|&x| x == 1) {
            let mut rest = a.to_vec();
            rest.remove(pos);
            return Ok(q(d as i64) * self.eval(d, &rest)?);
        }
        if n < 2 {
            return Ok(Q::zero());
        }
        if n == 2 {
            // only a line through two points survives the gate
            return Ok(if d == 1 && a == [r, r] { q(1) } else { Q::zero() });
        }
        // x at slot j (largest), H*y at slot i, z at slot k
        let j = n - 1;
        let i = 0;
        let k = 1;
        let (x, y, z) = (a[j], a[i] - 1, a[k]);
        let rest: Vec<u32> = a[2..n - 1].to_vec();
        let with = |extra: &[u32]| -> Vec<u32> {
            let mut v = rest.clone();
            v.extend_from_slice(extra);
            v
        };
        let dq = q(d as i64);
        let mut total = self.eval(d, &with(&[x + 1, z, y]))?;
        total += &dq * self.eval(d, &with(&[x, z + y]))?;
        total -= &dq * self.eval(d, &with(&[x + z, y]))?;
        for da in 1..d {
            let db = d - da;
            for (ra, rb, w) in multiset_splits(&rest) {
                let w = q(w as i64);
                for mu in 0..=r {
                    let nu = r - mu;
                    let mk = |side: &[u32], extra: &[u32]| {
                        let mut v = side.to_vec();
                        v.extend_from_slice(extra);
                        v
                    };
                    // {j, p} | {k, q}: the divisor at p gives a factor da
                    let l1 = self.eval(da, &mk(&ra, &[x, mu]))?;
                    if !l1.is_zero() {
                        total += &w * q(da as i64) * l1 * self.eval(db, &mk(&rb, &[nu, z, y]))?;
                    }
                    // {j, k} | {p, q}
                    let l2 = self.eval(da, &mk(&ra, &[x, z, mu]))?;
                    if !l2.is_zero() {
                        total -= &w * q(db as i64) * l2 * self.eval(db, &mk(&rb, &[nu, y]))?;
                    }
                }
            }
        }
        Ok(total)
    }
}

/// Table of the invariants of P^r up to degree d with all insertions of
/// codimension >= 2; for r = 2 also the counts N_d.
#[derive(Clone, Debug)]
pub struct PrTable {
    pub r: u32,
    pub values: BTreeMap<(u32, Vec<u32>), Q>,
    pub n_d: BTreeMap<u32, Q>,
}

pub fn km_recursion_pr(r: u32, d: u32) -> Result<PrTable> {
    if !(2..=MAX_R).contains(&r) {
        return limit("projective rank r (2..=3)", MAX_R as usize);
    }
    if d > MAX_DEGREE {
        return limit("degree", MAX_DEGREE as usize);
    }
    let mut eng = PrEngine::new(r)?;
    let mut values = BTreeMap::new();
    let mut n_d = BTreeMap::new();
    for deg in 1..=d {
        // insertions in 2..=r; the gate fixes the total
        let top = r + deg * (r + 1);
        for n in 2.. {
            let need = top as i64 + n as i64 - 3;
            if (2 * n as i64) > need {
                break;
            }
            if (r as i64 * n as i64) < need {
                continue;
            }
            for combo in multisets(2, r, n) {
                if combo.iter().sum::<u32>() as i64 == need {
                    let v = eng.eval(deg, &combo)?;
                    values.insert((deg, combo), v);
                }
            }
        }
        if r == 2 {
            n_d.insert(deg, eng.eval(deg, &vec![2; (3 * deg - 1) as usize])?);
        }
    }
    Ok(PrTable { r, values, n_d })
}

fn multisets(lo: u32, hi: u32, n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for first in lo..=hi {
        for mut rest in multisets(first, hi, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn closed_as_q(dmax: u32) -> Vec<Q> {
    kontsevich_closed(dmax).iter().map(qi).collect()
}
