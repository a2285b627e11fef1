//! Cycle types of symmetric groups, traces on H^2 of M_{0,m}-bar, and the
//! dimension of invariant subspaces under products of symmetric groups.

use num_traits::{One, Zero};

use crate::error::{domain, limit, Error, Result};
use crate::rational::{binom, factorial, half_power_bracket, int, pow2, Int, Q};

pub const CYCLE_TYPE_BOUND: u32 = 20;
pub const ORACLE_BOUND: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleType {
    /// Non-increasing cycle lengths.
    pub parts: Vec<u32>,
    pub k: u32,
    pub class_size: Int,
}

impl CycleType {
    pub fn from_parts(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let k: u32 = parts.iter().sum();
        let mut denom = Int::one();
        let mut i = 0;
        while i < parts.len() {
            let j = parts[i];
            let mult = parts[i..].iter().take_while(|&&p| p == j).count();
            denom *= Int::from(j).pow(mult as u32) * factorial(mult as u32);
            i += mult;
        }
        CycleType {
            class_size: factorial(k) / denom,
            parts,
            k,
        }
    }

    pub fn n_j(&self, j: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == j).count() as u32
    }

    pub fn c(&self) -> u32 {
        self.parts.len() as u32
    }

    pub fn profile(&self) -> PermProfile {
        PermProfile {
            k: self.k,
            n1: self.n_j(1),
            n2: self.n_j(2),
            c: self.c(),
            all_even: self.k > 0 && self.parts.iter().all(|p| p % 2 == 0),
        }
    }

    /// A concrete permutation of `0..k` with this cycle type, cycles laid out
    /// on consecutive points.
    pub fn representative(&self) -> Vec<usize> {
        let mut perm = Vec::with_capacity(self.k as usize);
        let mut start = 0usize;
        for &len in &self.parts {
            let len = len as usize;
            for t in 0..len {
                perm.push(start + (t + 1) % len);
            }
            start += len;
        }
        perm
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermProfile {
    pub k: u32,
    pub n1: u32,
    pub n2: u32,
    pub c: u32,
    pub all_even: bool,
}

impl PermProfile {
    pub fn identity(k: u32) -> Self {
        PermProfile {
            k,
            n1: k,
            n2: 0,
            c: k,
            all_even: false,
        }
    }
}

fn partitions_into(k: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=max.min(k)).rev() {
        cur.push(p);
        partitions_into(k - p, p, cur, out);
        cur.pop();
    }
}

/// All partitions of k, in reverse lexicographic order.
pub fn partitions(k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    partitions_into(k, k, &mut Vec::new(), &mut out);
    out
}

pub fn cycle_types(k: u32) -> Result<Vec<CycleType>> {
    if k > CYCLE_TYPE_BOUND {
        return limit("cycle_types k", CYCLE_TYPE_BOUND as usize);
    }
    Ok(partitions(k).into_iter().map(CycleType::from_parts).collect())
}

struct Combined {
    m: u32,
    n1: i64,
    n2: i64,
    c: u32,
    all_even: bool,
}

fn combine(n_fixed: u32, profiles: &[PermProfile]) -> Combined {
    let m = n_fixed + profiles.iter().map(|p| p.k).sum::<u32>();
    let has_cycle = m > 0;
    Combined {
        m,
        n1: (n_fixed + profiles.iter().map(|p| p.n1).sum::<u32>()) as i64,
        n2: profiles.iter().map(|p| p.n2).sum::<u32>() as i64,
        c: n_fixed + profiles.iter().map(|p| p.c).sum::<u32>(),
        all_even: has_cycle && n_fixed == 0 && profiles.iter().all(|p| p.k == 0 || p.all_even),
    }
}

/// Trace of a permutation on H^2(M_{0,m}-bar).
pub fn trace_h2(n_fixed: u32, profiles: &[PermProfile]) -> Result<Int> {
    let cb = combine(n_fixed, profiles);
    if cb.m < 3 {
        return domain(format!("trace_h2 needs at least 3 points, got {}", cb.m));
    }
    let half = pow2(cb.c - 1);
    let delta = if cb.all_even { half.clone() } else { Int::zero() };
    Ok(half - 1 - cb.n2 - binom(cb.n1, 2) + delta)
}

/// Trace on H^1 of the open part M_{0,m}.
pub fn trace_h1_open(profiles: &[PermProfile], n_fixed: u32) -> Result<Int> {
    let cb = combine(n_fixed, profiles);
    if cb.m < 3 {
        return domain(format!("trace_h1_open needs at least 3 points, got {}", cb.m));
    }
    Ok(int(cb.n2 + (cb.n1 * cb.n1 - 3 * cb.n1) / 2))
}

fn check_weights(n: u32, a: &[u32]) -> Result<u32> {
    if let Some(bad) = a.iter().find(|&&x| x == 0) {
        return domain(format!("block sizes must be positive, got {bad}"));
    }
    let m = n + a.iter().sum::<u32>();
    if m < 3 {
        return domain(format!("need n + sum(a) >= 3, got {m}"));
    }
    Ok(m)
}

/// dim H^2(M_{0,n+sum a}-bar)^{S_{a_1} x ... x S_{a_l}} by the closed formula.
pub fn invariant_dim(n: u32, a: &[u32]) -> Result<Int> {
    check_weights(n, a)?;
    let l = a.len() as i64;
    let prod: Int = a.iter().map(|&x| Int::from(x + 1)).product();
    let ones = a.iter().filter(|&&x| x == 1).count() as i64;
    let n = n as i64;
    Ok(half_power_bracket(n as u32, &prod) - 1 - binom(n, 2) - l * n - binom(l + 1, 2) + ones)
}

fn apply_mask(perm: &[usize], mask: u32) -> u32 {
    let mut out = 0u32;
    let mut bits = mask;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        out |= 1 << perm[i];
        bits &= bits - 1;
    }
    out
}

/// Number of unordered splits {A, B} of the m points with |A|,|B| >= 2 that
/// the permutation maps to itself (fixed or swapped).
pub fn stable_split_fixed_count(perm: &[usize]) -> u64 {
    let m = perm.len();
    if m < 4 {
        return 0;
    }
    let full = (1u32 << m) - 1;
    let mut count = 0u64;
    // point 0 is always in A
    for rest in 0..(1u32 << (m - 1)) {
        let a = (rest << 1) | 1;
        let sz = a.count_ones() as usize;
        if sz < 2 || m - sz < 2 {
            continue;
        }
        let img = apply_mask(perm, a);
        if img == a || img == full ^ a {
            count += 1;
        }
    }
    count
}

pub fn invariant_dim_oracle(n: u32, a: &[u32]) -> Result<Int> {
    invariant_dim_oracle_bounded(n, a, ORACLE_BOUND)
}

pub fn invariant_dim_oracle_bounded(n: u32, a: &[u32], bound: u32) -> Result<Int> {
    let m = check_weights(n, a)?;
    if m > bound {
        return limit("invariant_dim_oracle point count", bound as usize);
    }
    let factors: Vec<Vec<CycleType>> = a
        .iter()
        .map(|&ai| cycle_types(ai))
        .collect::<Result<_>>()?;
    let order: Int = a.iter().map(|&ai| factorial(ai)).product();
    let mut total = Int::zero();
    let mut idx = vec![0usize; factors.len()];
    loop {
        let chosen: Vec<&CycleType> = idx.iter().zip(&factors).map(|(&i, f)| &f[i]).collect();
        let mut perm: Vec<usize> = (0..n as usize).collect();
        let mut weight = Int::one();
        for ct in &chosen {
            let off = perm.len();
            perm.extend(ct.representative().into_iter().map(|p| p + off));
            weight *= &ct.class_size;
        }
        let profiles: Vec<PermProfile> = chosen.iter().map(|ct| ct.profile()).collect();
        let fixed = Int::from(stable_split_fixed_count(&perm));
        let trace = fixed - trace_h1_open(&profiles, n)?;
        total += weight * trace;
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let avg = Q::new(total, order);
                if !avg.is_integer() {
                    return Err(Error::Integrity(format!(
                        "non-integral average {avg} for n={n}, a={a:?}"
                    )));
                }
                return Ok(avg.to_integer());
            }
            idx[pos] += 1;
            if idx[pos] < factors[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySums {
    pub k: u32,
    pub pow2_c: Int,
    pub delta: Int,
    pub n1: Int,
    pub n2_plus_pairs: Int,
}

impl IdentitySums {
    /// Closed values ((k+1)!, k!/2 or 0, k!, k!).
    pub fn expected(k: u32) -> (Int, Int, Int, Int) {
        let kf = factorial(k);
        let even = if k % 2 == 0 { &kf / 2 } else { Int::zero() };
        (factorial(k + 1), even, kf.clone(), kf)
    }

    pub fn matches_closed_form(&self) -> bool {
        let (a, b, c, d) = Self::expected(self.k);
        self.pow2_c == a && self.delta == b && self.n1 == c && (self.k < 2 || self.n2_plus_pairs == d)
    }
}

pub fn identity_sums(k: u32) -> Result<IdentitySums> {
    if k == 0 || k > 9 {
        return limit("identity_sums k (1..=9)", 9);
    }
    let mut s = IdentitySums {
        k,
        pow2_c: Int::zero(),
        delta: Int::zero(),
        n1: Int::zero(),
        n2_plus_pairs: Int::zero(),
    };
    for ct in cycle_types(k)? {
        let p = ct.profile();
        let w = &ct.class_size;
        s.pow2_c += w * pow2(p.c);
        if p.all_even {
            s.delta += w * pow2(p.c - 1);
        }
        s.n1 += w * p.n1;
        s.n2_plus_pairs += w * (int(p.n2 as i64) + binom(p.n1 as i64, 2));
    }
    Ok(s)
}

/// Sums over the product group S_{a_1} x ... x S_{a_l} of
/// sum_i n_1(sigma_i) and of sum_{i<j} n_1(sigma_i) n_1(sigma_j).
pub fn product_group_n1_sums(a: &[u32]) -> Result<(Int, Int)> {
    let per: Vec<(Int, Int)> = a
        .iter()
        .map(|&ai| {
            let types = cycle_types(ai)?;
            let order = factorial(ai);
            let s1: Int = types.iter().map(|t| &t.class_size * t.n_j(1)).sum();
            Ok((order, s1))
        })
        .collect::<Result<_>>()?;
    let order: Int = per.iter().map(|(o, _)| o.clone()).product();
    let mut single = Int::zero();
    let mut pairs = Int::zero();
    for i in 0..per.len() {
        single += &per[i].1 * (&order / &per[i].0);
        for j in i + 1..per.len() {
            pairs += &per[i].1 * &per[j].1 * (&order / (&per[i].0 * &per[j].0));
        }
    }
    Ok((single, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(k: u32) -> Vec<Int> {
        cycle_types(k).unwrap().into_iter().map(|c| c.class_size).collect()
    }

    #[test]
    fn small_cycle_types() {
        assert_eq!(sizes(0), vec![int(1)]);
        assert_eq!(sizes(3), vec![int(2), int(3), int(1)]);
        let mut s4 = sizes(4);
        s4.sort();
        assert_eq!(s4, vec![int(1), int(3), int(6), int(6), int(8)]);
        assert!(cycle_types(21).is_err());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_h2(5, &[]).unwrap(), int(5));
        let p22 = CycleType::from_parts(vec![2, 2]).profile();
        let p4 = CycleType::from_parts(vec![4]).profile();
        assert_eq!(trace_h2(0, &[p22]).unwrap(), int(1));
        assert_eq!(trace_h2(0, &[p4]).unwrap(), int(1));
        assert!(trace_h2(2, &[]).is_err());
        assert_eq!(trace_h1_open(&[], 4).unwrap(), int(2));
        assert_eq!(trace_h1_open(&[], 3).unwrap(), int(0));
        let t = CycleType::from_parts(vec![2]).profile();
        assert_eq!(trace_h1_open(&[t], 2).unwrap(), int(0));
    }

    #[test]
    fn invariant_dim_examples() {
        assert_eq!(invariant_dim(0, &[4]).unwrap(), int(1));
        assert_eq!(invariant_dim(2, &[1]).unwrap(), int(0));
        assert_eq!(invariant_dim(3, &[2]).unwrap(), int(4));
        assert!(invariant_dim(3, &[0]).is_err());
        assert!(invariant_dim(1, &[1]).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(invariant_dim_oracle(0, &[4]).unwrap(), int(1));
        assert_eq!(invariant_dim_oracle(3, &[2]).unwrap(), int(4));
        assert_eq!(invariant_dim_oracle(0, &[5]).unwrap(), int(1));
        assert!(invariant_dim_oracle(13, &[]).is_err());
    }

    #[test]
    fn identity_small() {
        let s = identity_sums(2).unwrap();
        assert_eq!((s.pow2_c.clone(), s.delta.clone(), s.n1.clone(), s.n2_plus_pairs.clone()), (int(6), int(1), int(2), int(2)));
        let s = identity_sums(3).unwrap();
        assert_eq!((s.pow2_c.clone(), s.delta.clone()), (int(24), int(0)));
        let s = identity_sums(4).unwrap();
        assert_eq!((s.pow2_c.clone(), s.delta.clone(), s.n1.clone(), s.n2_plus_pairs.clone()), (int(120), int(12), int(24), int(24)));
    }

    // every permutation of S_k, bucketed by cycle type
    fn brute_class_sizes(k: usize) -> std::collections::BTreeMap<Vec<u32>, u64> {
        let mut perm: Vec<usize> = (0..k).collect();
        let mut out = std::collections::BTreeMap::new();
        loop {
            let mut seen = vec![false; k];
            let mut parts = vec![];
            for s in 0..k {
                if !seen[s] {
                    let mut len = 0;
                    let mut x = s;
                    while !seen[x] {
                        seen[x] = true;
                        x = perm[x];
                        len += 1;
                    }
                    parts.push(len);
                }
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            *out.entry(parts).or_insert(0) += 1;
            // next permutation
            let Some(i) = (1..k).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
            let j = (i..k).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
        }
        out
    }

    #[test]
    fn class_sizes_match_brute_force() {
        for k in 1..=7 {
            let brute = brute_class_sizes(k);
            for ct in cycle_types(k as u32).unwrap() {
                assert_eq!(ct.class_size, Int::from(brute[&ct.parts]), "k={k} {:?}", ct.parts);
            }
        }
    }

    #[test]
    fn representative_has_its_type() {
        for ct in cycle_types(6).unwrap() {
            let perm = ct.representative();
            let mut seen = vec![false; perm.len()];
            let mut parts = vec![];
            for s in 0..perm.len() {
                if !seen[s] {
                    let (mut x, mut len) = (s, 0);
                    while !seen[x] {
                        seen[x] = true;
                        x = perm[x];
                        len += 1;
                    }
                    parts.push(len);
                }
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            assert_eq!(parts, ct.parts);
        }
    }

    #[test]
    fn n1_product_sums() {
        let (s, p) = product_group_n1_sums(&[2, 3]).unwrap();
        assert_eq!(s, int(2 * 12));
        assert_eq!(p, int(12));
    }

    proptest::proptest! {
        #[test]
        fn bracket_plus_offset(num in -200i64..200) {
            let x = crate::rational::frac(num, 2);
            let b = crate::rational::HalfBracket::new(x.clone()).unwrap().bracket_plus();
            let diff = Q::from_integer(b.clone()) - x;
            proptest::prop_assert!(diff == crate::rational::q(0) || diff == crate::rational::frac(1, 2));
            let again = crate::rational::HalfBracket::new(Q::from_integer(b.clone())).unwrap().bracket_plus();
            proptest::prop_assert_eq!(again, b);
        }

        #[test]
        fn identity_trace_closed(m in 3u32..16) {
            let t = trace_h2(m, &[]).unwrap();
            proptest::prop_assert_eq!(t.clone(), pow2(m - 1) - 1 - binom(m as i64, 2));
            proptest::prop_assert!(t >= Int::zero());
        }

        #[test]
        fn closed_form_matches_oracle(n in 0u32..5, a in proptest::collection::vec(1u32..4, 0..3)) {
            let m = n + a.iter().sum::<u32>();
            proptest::prop_assume!(m >= 3 && m <= 9);
            proptest::prop_assert_eq!(invariant_dim(n, &a).unwrap(), invariant_dim_oracle(n, &a).unwrap());
        }
    }
}
