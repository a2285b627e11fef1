//! Small quantum cohomology of G(k,N) by rim-hook reduction of products of
//! Schur polynomials in k variables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{domain, unsupported, Result};
use crate::rational::{q, Q};
use crate::schubert::{schur_mult, size, Grass, Partition, SymFn};

pub const MAX_K: usize = 3;
pub const MAX_N: usize = 8;

/// Classes sum c * q^e * sigma_p, keyed by (p, e).
pub type QClass = BTreeMap<(Partition, u32), Q>;

fn check(g: Grass) -> Result<()> {
    if g.k > MAX_K || g.n > MAX_N {
        return unsupported(format!("quantum products limited to k <= {MAX_K}, N <= {MAX_N}"));
    }
    Ok(())
}

/// Reduce s_p (at most k rows) into the k x (N-k) box: Some((sign, box
/// partition, q-degree)) or None when it vanishes.
pub fn rim_hook_reduce(g: Grass, p: &[u32]) -> Option<(i64, Partition, u32)> {
    let k = g.k;
    debug_assert!(p.len() <= k);
    let mut beta: Vec<i64> = (0..k).map(|i| *p.get(i).unwrap_or(&0) as i64 + (k - 1 - i) as i64).collect();
    let n = g.n as i64;
    let mut sign = 1i64;
    let mut qdeg = 0u32;
    loop {
        let (pos, &top) = beta.iter().enumerate().max_by_key(|(_, &b)| b).unwrap();
        if top < n {
            break;
        }
        let new = top - n;
        if beta.contains(&new) {
            return None;
        }
        let between = beta.iter().filter(|&&b| b > new && b < top).count();
        if (k - 1 + between) % 2 == 1 {
            sign = -sign;
        }
        beta[pos] = new;
        qdeg += 1;
    }
    beta.sort_unstable_by(|a, b| b.cmp(a));
    let part: Partition = beta.iter().enumerate().map(|(i, &b)| (b - (k - 1 - i) as i64) as u32).filter(|&x| x > 0).collect();
    Some((sign, part, qdeg))
}

fn reduce_symfn(g: Grass, f: &SymFn, extra_q: u32, scale: &Q, out: &mut QClass) {
    for (p, c) in f {
        if let Some((sign, part, e)) = rim_hook_reduce(g, p) {
            let key = (part, e + extra_q);
            let v = out.entry(key.clone()).or_insert_with(Q::zero);
            *v += c * scale * q(sign);
            if v.is_zero() {
                out.remove(&key);
            }
        }
    }
}

pub fn quantum_mult(g: Grass, x: &QClass, y: &QClass) -> Result<QClass> {
    check(g)?;
    let mut out = QClass::new();
    for ((p1, e1), c1) in x {
        for ((p2, e2), c2) in y {
            let a: SymFn = [(p1.clone(), Q::one())].into_iter().collect();
            let b: SymFn = [(p2.clone(), Q::one())].into_iter().collect();
            reduce_symfn(g, &schur_mult(&a, &b, g.k), e1 + e2, &(c1 * c2), &mut out);
        }
    }
    Ok(out)
}

pub fn qclass(p: Partition) -> QClass {
    [((p, 0), Q::one())].into_iter().collect()
}

/// sigma_l * sigma_m in QH*(G(k,N)); coefficients are the 3-point invariants
/// <sigma_l, sigma_m, sigma_nu^vee>_d.
pub fn quantum_product_3pt(g: Grass, l: &[u32], m: &[u32]) -> Result<QClass> {
    if !g.fits(l) || !g.fits(m) {
        return domain("partition outside the box");
    }
    quantum_mult(g, &qclass(l.to_vec()), &qclass(m.to_vec()))
}

/// <sigma_a, sigma_b, sigma_c>_d from the quantum product.
pub fn three_point(g: Grass, a: &[u32], b: &[u32], c: &[u32], d: u32) -> Result<Q> {
    let prod = quantum_product_3pt(g, a, b)?;
    let nu = g.dual(c)?;
    if size(a) + size(b) != size(&nu) + d * g.n as u32 {
        return Ok(Q::zero());
    }
    Ok(prod.get(&(nu, d)).cloned().unwrap_or_else(Q::zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g24() -> Grass {
        Grass::new(2, 4).unwrap()
    }

    fn one_term(p: Partition, e: u32, c: i64) -> QClass {
        [((p, e), q(c))].into_iter().collect()
    }

    #[test]
    fn rim_hooks() {
        let g = g24();
        assert_eq!(rim_hook_reduce(g, &[4]), Some((-1, vec![], 1)));
        assert_eq!(rim_hook_reduce(g, &[3, 1]), Some((1, vec![], 1)));
        assert_eq!(rim_hook_reduce(g, &[3]), None);
        assert_eq!(rim_hook_reduce(g, &[2, 1]), Some((1, vec![2, 1], 0)));
        // P^2: H^3 = q
        assert_eq!(rim_hook_reduce(Grass::projective(2), &[3]), Some((1, vec![], 1)));
    }

    #[test]
    fn product_examples() {
        let g = g24();
        assert_eq!(quantum_product_3pt(g, &[2], &[1, 1]).unwrap(), one_term(vec![], 1, 1));
        assert_eq!(quantum_product_3pt(g, &[2], &[2]).unwrap(), one_term(vec![2, 2], 0, 1));
        let mut want = one_term(vec![2, 2], 0, 1);
        want.insert((vec![], 1), q(1));
        assert_eq!(quantum_product_3pt(g, &[1], &[2, 1]).unwrap(), want);
        assert_eq!(quantum_product_3pt(g, &[1], &[2, 2]).unwrap(), one_term(vec![1], 1, 1));
        assert_eq!(three_point(g, &[2], &[1, 1], &[2, 2], 1).unwrap(), q(1));
        assert!(quantum_product_3pt(Grass::new(4, 9).unwrap(), &[1], &[1]).is_err());
    }

    #[test]
    fn associativity() {
        for g in [g24(), Grass::new(2, 5).unwrap(), Grass::new(3, 6).unwrap(), Grass::projective(3)] {
            // G(3,6) on a sample to keep debug runs short
            let b: Vec<_> = g.basis().into_iter().take(10).collect();
            for x in &b {
                for y in &b {
                    for z in &b {
                        let (x, y, z) = (qclass(x.clone()), qclass(y.clone()), qclass(z.clone()));
                        let l = quantum_mult(g, &quantum_mult(g, &x, &y).unwrap(), &z).unwrap();
                        let r = quantum_mult(g, &x, &quantum_mult(g, &y, &z).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }
}
