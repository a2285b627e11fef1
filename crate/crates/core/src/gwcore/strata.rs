//! Integrals of products of evaluation, kappa and psi classes and one
//! decorated boundary stratum over M_{0,n}(X, d), reduced to primary
//! invariants.
//!
//! kappa(a_1, ..., a_m) is the pushforward of ev^*a_1 ... ev^*a_m along the
//! map forgetting m extra points; in an integral it becomes m extra
//! insertions. A single psi_j is replaced by the boundary sum over splits with
//! j on one side and the two largest other markings on the other.

use num_traits::{One, Zero};

use crate::error::{domain, unsupported, Result};
use crate::gwcore::kontsevich::PrEngine;
use crate::gwcore::localization::Oracle;
use crate::gwcore::reconstruct::{BaseProvider, G2Reconstructor};
use crate::gwcore::{virtual_dim, InvariantKey};
use crate::rational::{fmt_q, Q};
use crate::schubert::{product, CohClass, Grass, Partition};

/// Primary invariants of a fixed target.
pub trait PrimarySource {
    fn target(&self) -> Grass;
    fn primary(&mut self, d: u32, insertions: &[Partition]) -> Result<Q>;
}

impl PrimarySource for PrEngine {
    fn target(&self) -> Grass {
        Grass::projective(self.r as usize)
    }

    fn primary(&mut self, d: u32, insertions: &[Partition]) -> Result<Q> {
        let a: Vec<u32> = insertions.iter().map(|p| p.iter().sum()).collect();
        self.eval(d, &a)
    }
}

impl PrimarySource for Oracle {
    fn target(&self) -> Grass {
        self.target
    }

    fn primary(&mut self, d: u32, insertions: &[Partition]) -> Result<Q> {
        self.eval(&InvariantKey::new(self.target, d, insertions.to_vec()))
    }
}

impl<P: BaseProvider> PrimarySource for G2Reconstructor<P> {
    fn target(&self) -> Grass {
        self.target
    }

    fn primary(&mut self, d: u32, insertions: &[Partition]) -> Result<Q> {
        self.eval_key(&InvariantKey::new(self.target, d, insertions.to_vec()))
    }
}

/// One vertex of a stratum: curve class, markings and extra kappa points.
#[derive(Clone, Debug)]
pub struct Component {
    pub degree: u32,
    pub markings: Vec<usize>,
    pub extras: Vec<CohClass>,
}

impl Component {
    pub fn new(degree: u32, markings: Vec<usize>) -> Self {
        Component { degree, markings, extras: vec![] }
    }

    pub fn with_extra(mut self, c: CohClass) -> Self {
        self.extras.push(c);
        self
    }
}

/// A node; `class` (if any) is restricted to the node on the side of `a`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub class: Option<CohClass>,
}

/// A tree of components. Values are integrals over the gluing of the
/// component spaces, which is the stratum itself when it has no automorphisms.
#[derive(Clone, Debug)]
pub struct Stratum {
    pub components: Vec<Component>,
    pub edges: Vec<Edge>,
}

impl Stratum {
    pub fn divisor(a: Component, b: Component) -> Self {
        Stratum { components: vec![a, b], edges: vec![Edge { a: 0, b: 1, class: None }] }
    }

    pub fn chain(components: Vec<Component>) -> Self {
        let edges = (1..components.len()).map(|i| Edge { a: i - 1, b: i, class: None }).collect();
        Stratum { components, edges }
    }

    pub fn stable(&self) -> bool {
        (0..self.components.len()).all(|v| {
            let c = &self.components[v];
            let nodes = self.edges.iter().filter(|e| e.a == v || e.b == v).count();
            c.degree > 0 || c.markings.len() + nodes >= 3
        })
    }

    pub fn codim(&self) -> Result<i64> {
        let mut total = self.edges.len() as i64;
        for e in &self.edges {
            if let Some(c) = &e.class {
                total += class_degree(c)? as i64;
            }
        }
        for c in &self.components {
            for x in &c.extras {
                total += class_degree(x)? as i64 - 1;
            }
        }
        Ok(total)
    }

    fn validate(&self, n: usize, d: u32) -> Result<()> {
        let m = self.components.len();
        if m == 0 || self.edges.len() + 1 != m {
            return domain("a stratum is a tree with at least one component");
        }
        if self.components.iter().map(|c| c.degree).sum::<u32>() != d {
            return domain("component degrees do not add up to the curve class");
        }
        let mut seen = vec![false; n + 1];
        for c in &self.components {
            for &i in &c.markings {
                if i == 0 || i > n || seen[i] {
                    return domain(format!("marking {i} missing, repeated or out of range"));
                }
                seen[i] = true;
            }
        }
        if seen[1..].iter().any(|s| !s) {
            return domain("every marking must sit on some component");
        }
        // connectivity
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for e in &self.edges {
            if e.a >= m || e.b >= m || e.a == e.b {
                return domain("bad edge");
            }
            let (ra, rb) = (find(&mut parent, e.a), find(&mut parent, e.b));
            if ra == rb {
                return domain("stratum graph has a cycle");
            }
            parent[ra] = rb;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum Factor {
    Ev(usize, CohClass),
    Kappa(Vec<CohClass>),
    Psi(usize),
    Stratum(Stratum),
}

/// A coefficient times a product of factors.
#[derive(Clone, Debug)]
pub struct DecoratedClass {
    pub coeff: Q,
    pub factors: Vec<Factor>,
}

impl DecoratedClass {
    pub fn new(coeff: Q, factors: Vec<Factor>) -> Self {
        DecoratedClass { coeff, factors }
    }

    pub fn times(&self, other: &[Factor]) -> Self {
        let mut f = self.factors.clone();
        f.extend_from_slice(other);
        DecoratedClass { coeff: self.coeff.clone(), factors: f }
    }

    /// True when some factor carries the zero class (H^3 on P^2, say).
    pub fn has_zero_class(&self) -> bool {
        self.factors.iter().any(|f| match f {
            Factor::Ev(_, c) => c.is_zero(),
            Factor::Kappa(cs) => cs.iter().any(|c| c.is_zero()),
            Factor::Psi(_) => false,
            Factor::Stratum(s) => {
                s.edges.iter().any(|e| e.class.as_ref().is_some_and(|c| c.is_zero()))
                    || s.components.iter().any(|c| c.extras.iter().any(|x| x.is_zero()))
            }
        })
    }

    pub fn codim(&self) -> Result<i64> {
        let mut total = 0;
        for f in &self.factors {
            total += match f {
                Factor::Ev(_, c) => class_degree(c)? as i64,
                Factor::Kappa(cs) => {
                    let mut t = 0;
                    for c in cs {
                        t += class_degree(c)? as i64 - 1;
                    }
                    t
                }
                Factor::Psi(_) => 1,
                Factor::Stratum(s) => s.codim()?,
            };
        }
        Ok(total)
    }
}

fn class_degree(c: &CohClass) -> Result<u32> {
    match c.degree() {
        Some(d) => Ok(d),
        None if c.is_zero() => Ok(0),
        None => domain(format!("class {} is not homogeneous", c.fmt_terms())),
    }
}

/// The integral of `x` over M_{0,n}(X, d).
pub fn reduce_integral<S: PrimarySource>(src: &mut S, n: usize, d: u32, x: &DecoratedClass) -> Result<Q> {
    let g = src.target();
    if x.has_zero_class() {
        return Ok(Q::zero());
    }
    let dim = virtual_dim(g, d, n);
    let codim = x.codim()?;
    if codim != dim {
        return domain(format!("integrand has codimension {codim} on a space of dimension {dim}"));
    }
    if x.coeff.is_zero() {
        return Ok(Q::zero());
    }
    let mut evs: Vec<CohClass> = vec![CohClass::one(g); n + 1];
    let mut extras = vec![];
    let mut psis = vec![];
    let mut strata = vec![];
    for f in &x.factors {
        match f {
            Factor::Ev(i, c) => {
                if *i == 0 || *i > n {
                    return domain(format!("marking {i} out of range 1..={n}"));
                }
                evs[*i] = product(&evs[*i], c)?;
            }
            Factor::Kappa(cs) => extras.extend(cs.iter().cloned()),
            Factor::Psi(j) => psis.push(*j),
            Factor::Stratum(s) => strata.push(s),
        }
    }
    if strata.len() > 1 {
        return unsupported("more than one boundary factor");
    }
    if psis.len() > 1 {
        return unsupported("more than one psi factor");
    }
    if !psis.is_empty() && !strata.is_empty() {
        return unsupported("psi times a boundary stratum");
    }
    let v = if let Some(&j) = psis.first() {
        if n < 3 {
            return unsupported("psi elimination needs n >= 3");
        }
        if j == 0 || j > n {
            return domain(format!("marking {j} out of range"));
        }
        let mut total = Q::zero();
        for s in psi_divisors(n, d, j) {
            total += eval_stratum(src, &s, &evs, &extras)?;
        }
        total
    } else if let Some(s) = strata.first() {
        s.validate(n, d)?;
        eval_stratum(src, s, &evs, &extras)?
    } else {
        let s = Stratum { components: vec![Component::new(d, (1..=n).collect())], edges: vec![] };
        eval_stratum(src, &s, &evs, &extras)?
    };
    Ok(&x.coeff * v)
}

/// psi_j as the sum of stable divisors with j on one side and the two
/// largest other markings on the other.
pub fn psi_divisors(n: usize, d: u32, j: usize) -> Vec<Stratum> {
    let others: Vec<usize> = (1..=n).rev().filter(|&i| i != j).collect();
    let (k, l) = (others[0], others[1]);
    let free: Vec<usize> = (1..=n).filter(|&i| i != j && i != k && i != l).collect();
    let mut out = vec![];
    for mask in 0..(1u32 << free.len()) {
        let mut a = vec![j];
        let mut b = vec![k, l];
        for (t, &i) in free.iter().enumerate() {
            if mask >> t & 1 == 1 {
                a.push(i);
            } else {
                b.push(i);
            }
        }
        a.sort_unstable();
        b.sort_unstable();
        for da in 0..=d {
            let s = Stratum::divisor(Component::new(da, a.clone()), Component::new(d - da, b.clone()));
            if s.stable() {
                out.push(s);
            }
        }
    }
    out
}

fn eval_stratum<S: PrimarySource>(src: &mut S, s: &Stratum, evs: &[CohClass], extras: &[CohClass]) -> Result<Q> {
    if !s.stable() {
        return Ok(Q::zero());
    }
    let g = src.target();
    let m = s.components.len();
    let basis = g.basis();
    let duals: Vec<Partition> = basis.iter().map(|p| g.dual(p)).collect::<Result<_>>()?;
    let mut total = Q::zero();
    // every way of putting the kappa points on components
    let assignments = (m as u64).pow(extras.len() as u32);
    for code in 0..assignments {
        let mut slots: Vec<Vec<CohClass>> = s
            .components
            .iter()
            .map(|c| {
                let mut v: Vec<CohClass> = c.markings.iter().map(|&i| evs[i].clone()).collect();
                v.extend(c.extras.iter().cloned());
                v
            })
            .collect();
        let mut c = code;
        for x in extras {
            slots[(c % m as u64) as usize].push(x.clone());
            c /= m as u64;
        }
        // every choice of diagonal term at the nodes
        let choices = (basis.len() as u64).pow(s.edges.len() as u32);
        for code in 0..choices {
            let mut sl = slots.clone();
            let mut c = code;
            for e in &s.edges {
                let mu = (c % basis.len() as u64) as usize;
                c /= basis.len() as u64;
                let mut ta = CohClass::schubert(g, basis[mu].clone())?;
                if let Some(h) = &e.class {
                    ta = product(h, &ta)?;
                }
                sl[e.a].push(ta);
                sl[e.b].push(CohClass::schubert(g, duals[mu].clone())?);
            }
            let mut t = Q::one();
            for (v, comp) in s.components.iter().enumerate() {
                t *= component_value(src, comp.degree, &sl[v])?;
                if t.is_zero() {
                    break;
                }
            }
            total += t;
        }
    }
    Ok(total)
}

fn component_value<S: PrimarySource>(src: &mut S, d: u32, slots: &[CohClass]) -> Result<Q> {
    let mut stack: Vec<(Vec<Partition>, Q)> = vec![(vec![], Q::one())];
    for c in slots {
        let mut next = vec![];
        for (ps, coef) in &stack {
            for (p, v) in &c.terms {
                let mut ps2 = ps.clone();
                ps2.push(p.clone());
                next.push((ps2, coef * v));
            }
        }
        stack = next;
        if stack.is_empty() {
            return Ok(Q::zero());
        }
    }
    let mut total = Q::zero();
    for (ps, coef) in stack {
        total += coef * src.primary(d, &ps)?;
    }
    Ok(total)
}

pub fn describe(x: &DecoratedClass) -> String {
    let parts: Vec<String> = x
        .factors
        .iter()
        .map(|f| match f {
            Factor::Ev(i, c) => format!("ev{i}({})", c.fmt_terms()),
            Factor::Kappa(cs) => format!("kappa({})", cs.iter().map(|c| c.fmt_terms()).collect::<Vec<_>>().join(",")),
            Factor::Psi(j) => format!("psi{j}"),
            Factor::Stratum(s) => format!(
                "D[{}]",
                s.components.iter().map(|c| format!("{}:{:?}", c.degree, c.markings)).collect::<Vec<_>>().join("|")
            ),
        })
        .collect();
    format!("{}*{}", fmt_q(&x.coeff), parts.join("*"))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::rational::q;

    fn h(g: Grass, p: &[u32]) -> CohClass {
        CohClass::schubert(g, p.to_vec()).unwrap()
    }

    #[test]
    fn line_through_two_points_with_divisor() {
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let x = DecoratedClass::new(q(1), vec![Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[2])), Factor::Ev(3, h(g, &[1]))]);
        assert_eq!(reduce_integral(&mut src, 3, 1, &x).unwrap(), q(1));
    }

    #[test]
    fn codim_mismatch_is_domain_error() {
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let x = DecoratedClass::new(q(1), vec![Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[2]))]);
        assert!(matches!(reduce_integral(&mut src, 3, 1, &x), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_of_divisor_is_degree() {
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let x = DecoratedClass::new(q(1), vec![Factor::Kappa(vec![h(g, &[1])]), Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[2]))]);
        assert_eq!(reduce_integral(&mut src, 2, 1, &x).unwrap(), q(1));
        // conics: kappa(H) = 2
        let mut f = vec![Factor::Kappa(vec![h(g, &[1])])];
        f.extend((1..=5).map(|i| Factor::Ev(i, h(g, &[2]))));
        assert_eq!(reduce_integral(&mut src, 5, 2, &DecoratedClass::new(q(1), f)).unwrap(), q(2));
    }

    #[test]
    fn dilaton() {
        // <tau_1(1), pt, pt, H>_1 = (n - 2) <pt, pt, H>_1 with n = 3
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let x = DecoratedClass::new(
            q(1),
            vec![Factor::Psi(1), Factor::Ev(2, h(g, &[2])), Factor::Ev(3, h(g, &[2])), Factor::Ev(4, h(g, &[1]))],
        );
        assert_eq!(reduce_integral(&mut src, 4, 1, &x).unwrap(), q(1));
        // string equation: <tau_1(pt), 1, pt>_1 = <pt, pt>_1 on P^2
        let y = DecoratedClass::new(q(1), vec![Factor::Psi(1), Factor::Ev(1, h(g, &[2])), Factor::Ev(3, h(g, &[2]))]);
        assert_eq!(reduce_integral(&mut src, 3, 1, &y).unwrap(), q(1));
    }

    #[test]
    fn divisor_with_node_class() {
        // D(1 | 2,3) on M_{0,3}(P^2, 1) split as degree 0 | 1
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let s = Stratum::divisor(Component::new(1, vec![1]), Component::new(0, vec![2, 3]));
        let x = DecoratedClass::new(
            q(1),
            vec![Factor::Stratum(s.clone()), Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[1])), Factor::Ev(3, h(g, &[1]))],
        );
        // the contracted side forces ev2 = ev3, leaving <pt, H.H>_1 = 1
        assert_eq!(reduce_integral(&mut src, 3, 1, &x).unwrap(), q(1));
        let unstable = Stratum::divisor(Component::new(1, vec![1, 2]), Component::new(0, vec![3]));
        let y = DecoratedClass::new(
            q(1),
            vec![Factor::Stratum(unstable), Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[1])), Factor::Ev(3, h(g, &[1]))],
        );
        assert_eq!(reduce_integral(&mut src, 3, 1, &y).unwrap(), q(0));
    }

    #[test]
    fn two_boundaries_unsupported() {
        let g = Grass::projective(2);
        let mut src = PrEngine::new(2).unwrap();
        let s = Stratum::divisor(Component::new(1, vec![1]), Component::new(0, vec![2, 3]));
        let x = DecoratedClass::new(q(1), vec![Factor::Stratum(s.clone()), Factor::Stratum(s), Factor::Ev(1, h(g, &[2])), Factor::Ev(2, h(g, &[1]))]);
        assert!(matches!(reduce_integral(&mut src, 3, 1, &x), Err(Error::Unsupported(_))));
    }
}
