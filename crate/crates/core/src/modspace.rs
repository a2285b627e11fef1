//! Boundary strata of M_{0,n}(X, beta), the H^2 dimension formula and its
//! generators, and the codimension-2 catalogs for projective spaces and
//! Grassmannians.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{domain, unsupported, Error, Result};
use crate::rational::{binom, frac, half_power_bracket, Int, Q};
use crate::schubert::{FlagDescriptor, Grass};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Target {
    Proj(usize),
    Grass(Grass),
    Flag(FlagDescriptor),
}

impl Target {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad target {s:?}; expected pr:<r>, g:<k>,<N> or flag:<m1,..>@<N>"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        if let Some(r) = s.strip_prefix("pr:") {
            let r = num(r)?;
            if r == 0 {
                return domain("projective space needs r >= 1");
            }
            Ok(Target::Proj(r))
        } else if let Some(rest) = s.strip_prefix("g:") {
            let (k, n) = rest.split_once(',').ok_or_else(bad)?;
            Ok(Target::Grass(Grass::new(num(k)?, num(n)?)?))
        } else if let Some(rest) = s.strip_prefix("flag:") {
            let (dims, n) = rest.split_once('@').ok_or_else(bad)?;
            let dims = dims.split(',').map(num).collect::<Result<Vec<_>>>()?;
            Ok(Target::Flag(FlagDescriptor::new(num(n)?, dims)?))
        } else {
            Err(bad())
        }
    }

    pub fn flag(&self) -> FlagDescriptor {
        match self {
            Target::Proj(r) => FlagDescriptor { n: r + 1, dims: vec![1] },
            Target::Grass(g) => FlagDescriptor { n: g.n, dims: vec![g.k] },
            Target::Flag(f) => f.clone(),
        }
    }

    pub fn grass(&self) -> Option<Grass> {
        match self {
            Target::Proj(r) => Some(Grass::projective(*r)),
            Target::Grass(g) => Some(*g),
            Target::Flag(f) if f.l() == 1 => Some(Grass { k: f.dims[0], n: f.n }),
            _ => None,
        }
    }

    pub fn h2(&self) -> usize {
        self.flag().l()
    }

    pub fn h4(&self) -> u64 {
        self.flag().betti().h4
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Proj(r) => write!(f, "pr:{r}"),
            Target::Grass(g) => write!(f, "g:{},{}", g.k, g.n),
            Target::Flag(fl) => {
                let dims: Vec<String> = fl.dims.iter().map(|d| d.to_string()).collect();
                write!(f, "flag:{}@{}", dims.join(","), fl.n)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceSignature {
    pub target: Target,
    pub n: usize,
    pub degrees: Vec<u32>,
}

impl SpaceSignature {
    pub fn new(target: Target, n: usize, degrees: Vec<u32>) -> Result<Self> {
        if degrees.len() != target.h2() {
            return domain(format!("{} needs {} degree slots, got {}", target, target.h2(), degrees.len()));
        }
        let sig = SpaceSignature { target, n, degrees };
        if sig.is_empty_space() {
            return domain(format!("M_0,{}({}, 0) is empty", sig.n, sig.target));
        }
        Ok(sig)
    }

    fn is_empty_space(&self) -> bool {
        self.degrees.iter().all(|&d| d == 0) && self.n < 3
    }

    pub fn l(&self) -> usize {
        self.degrees.len()
    }

    fn prod(&self) -> Int {
        self.degrees.iter().map(|&d| Int::from(d + 1)).product()
    }

    /// Number of i with d_i = 1.
    pub fn ones(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 1).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Side {
    pub markings: Vec<usize>,
    pub degrees: Vec<u32>,
}

impl Side {
    pub fn stable(&self) -> bool {
        self.degrees.iter().any(|&d| d > 0) || self.markings.len() >= 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundarySplit {
    pub sides: [Side; 2],
    pub stable: [bool; 2],
    pub symmetric: bool,
}

impl BoundarySplit {
    pub fn new(a: Side, b: Side) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let symmetric = a == b;
        BoundarySplit { stable: [a.stable(), b.stable()], sides: [a, b], symmetric }
    }
}

impl fmt::Display for BoundarySplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Side| {
            let m: Vec<String> = s.markings.iter().map(|x| x.to_string()).collect();
            let d: Vec<String> = s.degrees.iter().map(|x| x.to_string()).collect();
            format!("{{{}}}:({})", m.join(","), d.join(","))
        };
        write!(f, "{} | {}", side(&self.sides[0]), side(&self.sides[1]))
    }
}

/// All stable unordered two-component splits.
pub fn boundary_divisors(sig: &SpaceSignature) -> Result<Vec<BoundarySplit>> {
    if sig.is_empty_space() {
        return domain("empty moduli space");
    }
    let mut out = vec![];
    let n = sig.n;
    let mut degs = vec![0u32; sig.l()];
    loop {
        for mask in 0u64..(1u64 << n) {
            let a = Side {
                markings: (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect(),
                degrees: degs.clone(),
            };
            let b = Side {
                markings: (0..n).filter(|i| mask >> i & 1 == 0).map(|i| i + 1).collect(),
                degrees: sig.degrees.iter().zip(&degs).map(|(t, x)| t - x).collect(),
            };
            if !(a.stable() && b.stable()) || a > b {
                continue;
            }
            out.push(BoundarySplit::new(a, b));
        }
        // odometer over the degree of side A
        let mut i = 0;
        while i < degs.len() && degs[i] == sig.degrees[i] {
            degs[i] = 0;
            i += 1;
        }
        if i == degs.len() {
            break;
        }
        degs[i] += 1;
    }
    Ok(out)
}

pub fn boundary_count_formula(sig: &SpaceSignature) -> Int {
    half_power_bracket(sig.n as u32, &sig.prod()) - 1 - Int::from(sig.n)
}

/// [2^{n-1} prod(d_i+1) + 1/2] - 1 - C(n,2) + h4(X) - C(h2(X),2).
pub fn dim_h2(sig: &SpaceSignature) -> Result<Int> {
    if sig.is_empty_space() {
        return domain("empty moduli space");
    }
    let n = sig.n as i64;
    let l = sig.l() as i64;
    // for 2^{n-1}P an integer or half-integer, [x + 1/2] = [x]^+
    Ok(half_power_bracket(sig.n as u32, &sig.prod()) - 1 - binom(n, 2) + Int::from(sig.target.h4()) - binom(l, 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub kind: String,
    pub parameters: BTreeMap<String, String>,
}

impl Generator {
    fn new(name: impl Into<String>, kind: &str, params: &[(&str, String)]) -> Self {
        Generator {
            name: name.into(),
            kind: kind.into(),
            parameters: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCatalog {
    pub generators: Vec<Generator>,
    pub relations: Vec<String>,
}

impl GeneratorCatalog {
    pub fn net(&self) -> i64 {
        self.generators.len() as i64 - self.relations.len() as i64
    }

    pub fn count_prefix(&self, prefix: &str) -> usize {
        self.generators.iter().filter(|g| g.kind.starts_with(prefix)).count()
    }

    pub fn to_csv(&self) -> String {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for g in &self.generators {
            *counts.entry(g.kind.as_str()).or_default() += 1;
        }
        let mut s = String::from("kind,count\n");
        for (k, v) in counts {
            s.push_str(&format!("{k},{v}\n"));
        }
        s.push_str(&format!("relations,{}\nnet,{}\n", self.relations.len(), self.net()));
        s
    }
}

/// Boundaries, kappa(c1(Q_i)^2), kappa(c2(K_i)) for rank K_i >= 2, and one
/// evaluation class for n in {1,2}. Relations: (flageq) plus the boundary
/// relations pulled back from M_{0,n}.
pub fn h2_generators(sig: &SpaceSignature) -> Result<GeneratorCatalog> {
    let mut gens: Vec<Generator> = boundary_divisors(sig)?
        .into_iter()
        .map(|s| Generator::new(format!("D[{s}]"), "boundary", &[]))
        .collect();
    let flag = sig.target.flag();
    let p1 = flag.n == 2;
    let mut relations = vec![];
    // on P^1 every kappa class vanishes and (flageq) is empty
    if !p1 {
        for i in 1..=flag.l() {
            gens.push(Generator::new(format!("kappa(c1(Q{i})^2)"), "kappa", &[("i", i.to_string())]));
        }
        for (i, r) in flag.kernel_ranks().iter().enumerate() {
            if *r >= 2 {
                gens.push(Generator::new(format!("kappa(c2(K{i}))"), "kappa", &[("i", i.to_string())]));
            }
        }
        relations.push("flageq".to_string());
    }
    if sig.n == 1 || sig.n == 2 {
        gens.push(Generator::new("ev1(c1(Q1))", "ev", &[("marking", "1".into()), ("j", "1".into())]));
    }
    let keel = binom(sig.n as i64, 2) - Int::from(sig.n);
    let mut r = 0;
    while Int::from(r) < keel {
        r += 1;
        relations.push(format!("keel[{r}]"));
    }
    Ok(GeneratorCatalog { generators: gens, relations })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum KappaClass {
    C1QSquared(usize),
    C2K(usize),
}

impl fmt::Display for KappaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KappaClass::C1QSquared(i) => write!(f, "kappa(c1(Q{i})^2)"),
            KappaClass::C2K(i) => write!(f, "kappa(c2(K{i}))"),
        }
    }
}

/// Coefficients of (flageq), modulo boundaries.
pub fn flageq_coefficients(sig: &SpaceSignature) -> Result<BTreeMap<KappaClass, Q>> {
    if sig.degrees.iter().any(|&d| d == 0) {
        return domain("flageq divides by every d_i");
    }
    let l = sig.l();
    let d = |i: usize| if i == 0 || i > l { 0 } else { sig.degrees[i - 1] as i64 };
    let mut out = BTreeMap::new();
    for (i, r) in sig.target.flag().kernel_ranks().iter().enumerate() {
        if *r >= 2 {
            out.insert(KappaClass::C2K(i), frac(1, 1));
        }
    }
    for i in 1..=l {
        out.insert(KappaClass::C1QSquared(i), frac(d(i - 1) + d(i + 1), 2 * d(i)) - frac(1, 1));
    }
    Ok(out)
}

/// Boundary weights (i/d - j/e)^2 for the bidegree (d,e) relation, one per
/// unordered stable split, labelled by the representative with larger (i,j).
pub fn bidegree_relation(d: u32, e: u32) -> Result<BTreeMap<(u32, u32), Q>> {
    if d == 0 || e == 0 {
        return domain("bidegree relation needs d, e >= 1");
    }
    let mut out = BTreeMap::new();
    for i in 0..=d {
        for j in 0..=e {
            if (i, j) == (0, 0) || (i, j) == (d, e) {
                continue;
            }
            let key = (i, j).max((d - i, e - j));
            let w = frac(i as i64, d as i64) - frac(j as i64, e as i64);
            out.insert(key, &w * &w);
        }
    }
    Ok(out)
}

fn push(out: &mut Vec<Generator>, kind: &str, params: &[(&str, String)]) {
    let tag: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push(Generator::new(format!("{kind}[{}]", tag.join(",")), kind, params));
}

fn chain_name(c: &[(u32, Vec<usize>)]) -> String {
    c.iter()
        .map(|(d, m)| {
            let m: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            format!("{d}{{{}}}", m.join(","))
        })
        .collect::<Vec<_>>()
        .join("-")
}

/// Three-component chains of total degree d with markings 1..=n, up to reversal.
pub fn chains(d: u32, n: usize) -> Vec<Vec<(u32, Vec<usize>)>> {
    let mut out = vec![];
    for i in 0..=d {
        for j in 0..=d - i {
            let l = d - i - j;
            for place in 0..3usize.pow(n as u32) {
                let mut comps: Vec<(u32, Vec<usize>)> = vec![(i, vec![]), (j, vec![]), (l, vec![])];
                let mut p = place;
                for m in 1..=n {
                    comps[p % 3].1.push(m);
                    p /= 3;
                }
                let stable = comps.iter().enumerate().all(|(pos, (deg, ms))| {
                    let nodes = if pos == 1 { 2 } else { 1 };
                    *deg > 0 || ms.len() + nodes >= 3
                });
                let rev: Vec<_> = comps.iter().rev().cloned().collect();
                if stable && comps <= rev {
                    out.push(comps);
                }
            }
        }
    }
    out
}

fn proj_catalog(r: usize, n: usize, d: u32, hyper: &str) -> Result<GeneratorCatalog> {
    let mut g = vec![];
    let mut relations = vec![];
    let h = |p: u32| if p == 1 { hyper.to_string() } else { format!("{hyper}^{p}") };
    for c in chains(d, n) {
        let kind = match n {
            0 => "A.1",
            1 => "B.1",
            _ => "C.1",
        };
        g.push(Generator::new(format!("{kind}[{}]", chain_name(&c)), kind, &[("chain", chain_name(&c))]));
    }
    match n {
        0 => {
            for a in 1..=d / 2 {
                push(&mut g, "A.2.1", &[("a", a.to_string()), ("b", (d - a).to_string()), ("node", h(1))]);
            }
            if r >= 2 {
                for a in 1..d {
                    push(&mut g, "A.2.2", &[("a", a.to_string()), ("b", (d - a).to_string()), ("C1", h(2))]);
                }
                push(&mut g, "A.3.1", &[("kappa", format!("({},{})", h(2), h(2)))]);
            }
            if r >= 3 {
                push(&mut g, "A.3.2", &[("kappa", h(3))]);
            }
        }
        1 => {
            for a in 1..d {
                push(&mut g, "B.2.1", &[("a", a.to_string()), ("b", (d - a).to_string()), ("ev1", h(1))]);
            }
            if r >= 2 {
                for a in 1..d {
                    for side in ["C1", "C2"] {
                        push(&mut g, "B.2.2", &[("a", a.to_string()), ("b", (d - a).to_string()), (side, h(2))]);
                    }
                }
                push(&mut g, "B.3.1", &[("ev1", h(2))]);
                push(&mut g, "B.3.2", &[("ev1", h(1)), ("kappa", h(2))]);
                push(&mut g, "B.3.3", &[("kappa", format!("({},{})", h(2), h(2)))]);
                relations.push("marked".to_string());
            }
            if r >= 3 {
                push(&mut g, "B.3.4", &[("kappa", h(3))]);
            }
        }
        2 => {
            if r >= 2 {
                for a in 1..d {
                    for side in ["C1", "C2"] {
                        push(&mut g, "C.2.1", &[("a", a.to_string()), ("b", (d - a).to_string()), (side, h(2))]);
                    }
                }
            }
            for a in 1..d {
                push(&mut g, "C.2.2", &[("a", a.to_string()), ("b", (d - a).to_string()), ("node", h(1))]);
            }
            push(&mut g, "C.2.3", &[("a", "0".into()), ("b", d.to_string()), ("node", h(1))]);
            if r >= 2 {
                for a in 0..d {
                    push(&mut g, "C.2.4", &[("a", a.to_string()), ("b", (d - a).to_string()), ("C2", h(2))]);
                }
                for m in 1..=2 {
                    push(&mut g, "C.3", &[(if m == 1 { "ev1" } else { "ev2" }, h(2))]);
                }
            }
        }
        _ => return unsupported(format!("codimension-2 catalog for n = {n}")),
    }
    Ok(GeneratorCatalog { generators: g, relations })
}

/// Codimension-2 generators of M_{0,n}(X, d), d >= 2.
pub fn codim2_catalog(target: &Target, n: usize, d: u32) -> Result<GeneratorCatalog> {
    if d < 2 {
        return domain("codimension-2 catalogs need d >= 2");
    }
    if n > 2 {
        return unsupported(format!("codimension-2 catalog for n = {n}"));
    }
    match target {
        Target::Proj(r) => proj_catalog(*r, n, d, "H"),
        Target::Grass(g) if g.k == 1 => proj_catalog(g.n - 1, n, d, "H"),
        Target::Grass(g) => {
            if g.k < 3 || g.n - g.k < 3 {
                return unsupported("Grassmannian catalogs need k >= 3 and N - k >= 3");
            }
            if n == 2 {
                return unsupported("Grassmannian catalog for n = 2");
            }
            let mut cat = proj_catalog(3, n, d, "c1")?;
            let (two, three) = if n == 0 { ("D.2", "D.3") } else { ("E.2", "E.3") };
            for a in 1..d {
                let sides: &[&str] = if n == 0 { &["C1"] } else { &["C1", "C2"] };
                for side in sides {
                    push(&mut cat.generators, two, &[("a", a.to_string()), ("b", (d - a).to_string()), (side, "c2".into())]);
                }
            }
            let interior: &[(&str, &str)] = if n == 0 {
                &[("kappa", "(c2,c2)"), ("kappa", "(c1^2,c2)"), ("kappa", "c1c2"), ("kappa", "c3")]
            } else {
                &[
                    ("ev1", "c2"),
                    ("ev1", "c1;kappa=c2"),
                    ("kappa", "(c2,c2)"),
                    ("kappa", "(c1^2,c2)"),
                    ("kappa", "c1c2"),
                    ("kappa", "c3"),
                ]
            };
            for (i, (k, v)) in interior.iter().enumerate() {
                push(&mut cat.generators, &format!("{three}.{}", i + 1), &[(k, v.to_string())]);
            }
            if n == 1 {
                cat.relations.push("1mb".into());
            }
            Ok(cat)
        }
        Target::Flag(f) if f.l() == 1 => {
            codim2_catalog(&Target::Grass(Grass { k: f.dims[0], n: f.n }), n, d)
        }
        Target::Flag(_) => unsupported("codimension-2 catalogs for multi-step flags"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use num_traits::Zero;

    fn sig(t: &str, n: usize, d: &[u32]) -> SpaceSignature {
        SpaceSignature::new(Target::parse(t).unwrap(), n, d.to_vec()).unwrap()
    }

    #[test]
    fn target_roundtrip() {
        for s in ["pr:2", "g:2,4", "flag:1,2@3"] {
            assert_eq!(Target::parse(s).unwrap().to_string(), s);
        }
        assert!(Target::parse("g:4,4").is_err());
        assert!(Target::parse("x").is_err());
        assert!(SpaceSignature::new(Target::Proj(2), 0, vec![1, 1]).is_err());
        assert!(SpaceSignature::new(Target::Proj(2), 2, vec![0]).is_err());
    }

    #[test]
    fn boundary_examples() {
        let b = boundary_divisors(&sig("pr:2", 0, &[2])).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].symmetric);
        assert_eq!(boundary_divisors(&sig("pr:3", 3, &[1])).unwrap().len(), 4);
        let b = boundary_divisors(&sig("flag:1,2@3", 0, &[1, 1])).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].sides[0].degrees, vec![0, 1]);
        // M_{0,5}: ten boundary divisors
        assert_eq!(boundary_divisors(&sig("pr:1", 5, &[0])).unwrap().len(), 10);
    }

    #[test]
    fn dim_h2_examples() {
        assert_eq!(dim_h2(&sig("g:2,4", 0, &[2])).unwrap(), Int::from(3));
        assert_eq!(dim_h2(&sig("pr:1", 0, &[2])).unwrap(), Int::from(1));
        assert_eq!(dim_h2(&sig("pr:2", 0, &[3])).unwrap(), Int::from(2));
        assert_eq!(dim_h2(&sig("pr:4", 0, &[3])).unwrap(), Int::from(2));
        assert_eq!(dim_h2(&sig("pr:2", 1, &[2])).unwrap(), Int::from(3));
    }

    #[test]
    fn generator_examples() {
        let c = h2_generators(&sig("g:2,4", 0, &[2])).unwrap();
        assert_eq!(c.generators.len(), 4);
        assert_eq!(c.net(), 3);
        let c = h2_generators(&sig("pr:1", 0, &[2])).unwrap();
        assert_eq!((c.generators.len(), c.net()), (1, 1));
        assert_eq!(h2_generators(&sig("pr:3", 1, &[2])).unwrap().net(), 3);
    }

    #[test]
    fn flageq_examples() {
        let c = flageq_coefficients(&sig("pr:3", 0, &[4])).unwrap();
        assert_eq!(c[&KappaClass::C1QSquared(1)], q(-1));
        assert_eq!(c[&KappaClass::C2K(1)], q(1));
        let c = flageq_coefficients(&sig("flag:1,2@3", 0, &[1, 1])).unwrap();
        assert_eq!(c[&KappaClass::C1QSquared(1)], frac(-1, 2));
        assert_eq!(c[&KappaClass::C1QSquared(2)], frac(-1, 2));
        let c = flageq_coefficients(&sig("flag:1,2@3", 0, &[2, 1])).unwrap();
        assert_eq!(c[&KappaClass::C1QSquared(1)], frac(-3, 4));
        assert_eq!(c[&KappaClass::C1QSquared(2)], q(0));
        assert!(flageq_coefficients(&sig("flag:1,2@3", 0, &[2, 0])).is_err());
    }

    #[test]
    fn bidegree_examples() {
        let w = bidegree_relation(2, 1).unwrap();
        assert_eq!(w[&(1, 1)], frac(1, 4));
        let w = bidegree_relation(2, 2).unwrap();
        assert_eq!(w[&(1, 2)], frac(1, 4));
        assert_eq!(w[&(1, 1)], q(0));
        // (1,1): the only stable split is {(1,0),(0,1)}
        let w = bidegree_relation(1, 1).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[&(1, 0)], q(1));
    }

    #[test]
    fn catalog_examples() {
        let c = codim2_catalog(&Target::Proj(1), 0, 4).unwrap();
        assert_eq!(c.count_prefix("A.1"), 2);
        assert_eq!(c.count_prefix("A.2"), 2);
        assert_eq!(c.net(), 4);
        for d in 2..=6 {
            let g = Target::parse("g:3,6").unwrap();
            let gap0 = codim2_catalog(&g, 0, d).unwrap().net() - codim2_catalog(&Target::Proj(3), 0, d).unwrap().net();
            let gap1 = codim2_catalog(&g, 1, d).unwrap().net() - codim2_catalog(&Target::Proj(3), 1, d).unwrap().net();
            assert_eq!((gap0, gap1), (d as i64 + 3, 2 * d as i64 + 3));
        }
        assert!(codim2_catalog(&Target::Proj(2), 0, 1).is_err());
        assert!(matches!(codim2_catalog(&Target::parse("g:2,4").unwrap(), 0, 2), Err(Error::Unsupported(_))));
        let c = codim2_catalog(&Target::Proj(2), 2, 3).unwrap();
        assert_eq!(c.count_prefix("C.2.1"), 4);
        assert_eq!(c.count_prefix("C.2.4"), 3);
    }

    #[test]
    fn chains_have_no_reversal_duplicates() {
        for n in 0..=2 {
            for d in 2..=6 {
                let cs = chains(d, n);
                for c in &cs {
                    let rev: Vec<_> = c.iter().rev().cloned().collect();
                    assert!(rev == *c || !cs.contains(&rev));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn boundary_formula_and_net(n in 0usize..6, d in proptest::collection::vec(0u32..3, 1..4)) {
            let target = match d.len() {
                1 => Target::Proj(2),
                2 => Target::parse("flag:1,2@3").unwrap(),
                _ => Target::parse("flag:1,2,3@4").unwrap(),
            };
            if let Ok(s) = SpaceSignature::new(target, n, d) {
                proptest::prop_assert_eq!(Int::from(boundary_divisors(&s).unwrap().len()), boundary_count_formula(&s));
                proptest::prop_assert_eq!(Int::from(h2_generators(&s).unwrap().net()), dim_h2(&s).unwrap());
            }
        }

        #[test]
        fn flageq_reversal(d in proptest::collection::vec(1u32..5, 1..4)) {
            let t = match d.len() { 1 => "pr:3", 2 => "flag:1,2@3", _ => "flag:1,2,3@4" };
            let c = flageq_coefficients(&sig(t, 0, &d)).unwrap();
            let rev: Vec<u32> = d.iter().rev().cloned().collect();
            let cr = flageq_coefficients(&sig(t, 0, &rev)).unwrap();
            let l = d.len();
            for i in 1..=l {
                proptest::prop_assert_eq!(&c[&KappaClass::C1QSquared(i)], &cr[&KappaClass::C1QSquared(l + 1 - i)]);
            }
        }

        #[test]
        fn bidegree_zero_iff_proportional(d in 1u32..6, e in 1u32..6) {
            for ((i, j), w) in bidegree_relation(d, e).unwrap() {
                proptest::prop_assert_eq!(w.is_zero(), i * e == j * d);
            }
        }
    }
}
