//! Audits of the tautological relations on M_{0,n}(X, d) for X = P^2 and
//! G(2,4): both sides are integrated against a grid of test monomials.
//!
//! Relations stated on one or two markings are pulled back to n = 3, 4 along
//! the forgetful map: kappa and ev classes pull back to themselves, boundary
//! strata to the sum over the ways of placing the new markings, and
//!   pi^* psi_j = psi_j - sum_{T nonempty} D(j + T on a contracted component).
//! For (marked) and (1mb) the boundary side is only known to lie in a span;
//! there the audit solves for the coefficients over Q and passes when the
//! system is consistent.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, unsupported, Error, Result};
use crate::gwcore::strata::{reduce_integral, Component, DecoratedClass, Factor, PrimarySource, Stratum};
use crate::gwcore::virtual_dim;
use crate::modspace::chains;
use crate::rational::{fmt_q, frac, q, Q};
use crate::schubert::{fmt_partition, product, size, CohClass, Grass, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Diff,
    Psisum,
    Strange,
    Evsum,
    TwoM,
    Marked,
    Re2,
    OneMb,
}

impl Relation {
    pub const ALL: [Relation; 8] = [
        Relation::Diff,
        Relation::Psisum,
        Relation::Strange,
        Relation::Evsum,
        Relation::TwoM,
        Relation::Marked,
        Relation::Re2,
        Relation::OneMb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Diff => "diff",
            Relation::Psisum => "psisum",
            Relation::Strange => "strange",
            Relation::Evsum => "evsum",
            Relation::TwoM => "2m",
            Relation::Marked => "marked",
            Relation::Re2 => "re2",
            Relation::OneMb => "1mb",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Relation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation '{s}'")))
    }

    /// Number of markings the relation is stated on.
    pub fn base_n(self) -> usize {
        match self {
            Relation::Strange | Relation::Marked | Relation::OneMb => 1,
            _ => 2,
        }
    }

    pub fn codim(self) -> u32 {
        match self {
            Relation::Diff | Relation::Psisum | Relation::Strange | Relation::Evsum => 1,
            _ => 2,
        }
    }

    /// Relations whose boundary side is fitted rather than given.
    pub fn is_span(self) -> bool {
        matches!(self, Relation::Marked | Relation::OneMb)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One instance of a relation on the base space: lhs = rhs + (span).
#[derive(Clone, Debug)]
pub struct RelationTerms {
    pub label: String,
    pub n0: usize,
    pub lhs: Vec<DecoratedClass>,
    pub rhs: Vec<DecoratedClass>,
    pub span: Vec<(String, DecoratedClass)>,
}

fn sch(g: Grass, p: &[u32]) -> CohClass {
    CohClass::schubert(g, p.to_vec()).expect("class in the box")
}

fn term(c: Q, f: Vec<Factor>) -> DecoratedClass {
    DecoratedClass::new(c, f)
}

fn comp(deg: u32, m: &[usize]) -> Component {
    Component::new(deg, m.to_vec())
}

fn div(a: Component, b: Component) -> Factor {
    Factor::Stratum(Stratum::divisor(a, b))
}

/// The instances of `rel` on X in degree d. H is sigma_1 (the hyperplane
/// class of P^r, and of the Pluecker embedding on G(k,N)).
pub fn relation_terms(g: Grass, rel: Relation, d: u32) -> Result<Vec<RelationTerms>> {
    if d == 0 {
        return domain("relations are stated in positive degree");
    }
    let h = sch(g, &[1]);
    let h2 = product(&h, &h)?;
    let h3 = product(&h2, &h)?;
    let dq = q(d as i64);
    let splits: Vec<(u32, u32)> = (1..d).map(|a| (a, d - a)).collect();
    let one = |rhs: Vec<DecoratedClass>, lhs: Vec<DecoratedClass>| {
        vec![RelationTerms { label: rel.name().into(), n0: rel.base_n(), lhs, rhs, span: vec![] }]
    };
    Ok(match rel {
        Relation::Diff => one(
            {
                let mut r = vec![term(dq.clone(), vec![Factor::Psi(2)])];
                for &(a, b) in &splits {
                    r.push(term(-q(a as i64), vec![div(comp(a, &[1]), comp(b, &[2]))]));
                }
                r
            },
            vec![term(q(1), vec![Factor::Ev(1, h.clone())]), term(q(-1), vec![Factor::Ev(2, h.clone())])],
        ),
        Relation::Psisum => one(
            splits.iter().map(|&(a, b)| term(q(1), vec![div(comp(a, &[1]), comp(b, &[2]))])).collect(),
            vec![term(q(1), vec![Factor::Psi(1)]), term(q(1), vec![Factor::Psi(2)])],
        ),
        Relation::Strange => one(
            splits.iter().map(|&(a, b)| term(frac((b * b) as i64, (d * d) as i64), vec![div(comp(a, &[1]), comp(b, &[]))])).collect(),
            vec![
                term(q(1), vec![Factor::Psi(1)]),
                term(frac(2, d as i64), vec![Factor::Ev(1, h.clone())]),
                term(-frac(1, (d * d) as i64), vec![Factor::Kappa(vec![h2.clone()])]),
            ],
        ),
        Relation::Evsum => one(
            {
                let mut r = vec![term(frac(1, d as i64), vec![Factor::Kappa(vec![h2.clone()])])];
                for &(a, b) in &splits {
                    r.push(term(-frac((a * b) as i64, d as i64), vec![div(comp(a, &[1]), comp(b, &[2]))]));
                }
                for a in 0..d {
                    let b = d - a;
                    r.push(term(frac((b * b) as i64, d as i64), vec![div(comp(a, &[1, 2]), comp(b, &[]))]));
                }
                r
            },
            vec![term(q(1), vec![Factor::Ev(1, h.clone())]), term(q(1), vec![Factor::Ev(2, h.clone())])],
        ),
        Relation::TwoM => vec![re2_terms("2m", &h2, &splits)],
        Relation::Re2 => {
            let alphas: Vec<Partition> = vec![vec![2], vec![1, 1]];
            let mut out = vec![];
            for a in alphas {
                if !g.fits(&a) {
                    continue;
                }
                out.push(re2_terms(&format!("re2[{}]", fmt_partition(&a)), &sch(g, &a), &splits));
            }
            out
        }
        Relation::Marked => {
            let lhs = vec![
                term(q(1), vec![Factor::Ev(1, h2.clone())]),
                term(-frac(1, d as i64), vec![Factor::Ev(1, h.clone()), Factor::Kappa(vec![h2.clone()])]),
                term(frac(1, (d * d) as i64), vec![Factor::Kappa(vec![h2.clone(), h2.clone()])]),
                term(-frac(1, d as i64), vec![Factor::Kappa(vec![h3.clone()])]),
            ];
            let mut span = vec![];
            for c in chains(d, 1) {
                let comps: Vec<Component> = c.iter().map(|(deg, ms)| comp(*deg, ms)).collect();
                let name = c.iter().map(|(deg, ms)| format!("{deg}{ms:?}")).collect::<Vec<_>>().join("-");
                span.push((format!("B.1[{name}]"), term(q(1), vec![Factor::Stratum(Stratum::chain(comps))])));
            }
            for &(a, b) in &splits {
                span.push((format!("B.2.1[{a},{b}]"), term(q(1), vec![Factor::Ev(1, h.clone()), div(comp(a, &[1]), comp(b, &[]))])));
                span.push((format!("B.2.2[{a},{b}|H2,.]"), term(q(1), vec![div(comp(a, &[1]).with_extra(h2.clone()), comp(b, &[]))])));
                span.push((format!("B.2.2[{a},{b}|.,H2]"), term(q(1), vec![div(comp(a, &[1]), comp(b, &[]).with_extra(h2.clone()))])));
            }
            vec![RelationTerms { label: "marked".into(), n0: 1, lhs, rhs: vec![], span }]
        }
        Relation::OneMb => {
            if g.k != 2 || g.n < 4 {
                return unsupported("(1mb) is audited on G(2,N)");
            }
            let c1 = h.clone();
            let c2 = sch(g, &[2]);
            let lhs = vec![
                term(q(1), vec![Factor::Ev(1, c2.clone())]),
                term(-frac(1, d as i64), vec![Factor::Ev(1, c1.clone()), Factor::Kappa(vec![c2.clone()])]),
                term(frac(1, (d * d) as i64), vec![Factor::Kappa(vec![h2.clone(), c2.clone()])]),
                term(-frac(1, d as i64), vec![Factor::Kappa(vec![product(&c1, &c2)?])]),
            ];
            let mut span = vec![];
            for &(a, b) in &splits {
                span.push((format!("E.2[{a},{b}|c2,.]"), term(q(1), vec![div(comp(a, &[1]).with_extra(c2.clone()), comp(b, &[]))])));
                span.push((format!("E.2[{a},{b}|.,c2]"), term(q(1), vec![div(comp(a, &[1]), comp(b, &[]).with_extra(c2.clone()))])));
            }
            vec![RelationTerms { label: "1mb".into(), n0: 1, lhs, rhs: vec![], span }]
        }
    })
}

/// ev_1 a - ev_2 a - psi_2 kappa(a) = -Delta({1},{2} | a, .)
fn re2_terms(label: &str, alpha: &CohClass, splits: &[(u32, u32)]) -> RelationTerms {
    RelationTerms {
        label: label.into(),
        n0: 2,
        lhs: vec![
            term(q(1), vec![Factor::Ev(1, alpha.clone())]),
            term(q(-1), vec![Factor::Ev(2, alpha.clone())]),
            term(q(-1), vec![Factor::Psi(2), Factor::Kappa(vec![alpha.clone()])]),
        ],
        rhs: splits
            .iter()
            .map(|&(a, b)| term(q(-1), vec![div(comp(a, &[1]).with_extra(alpha.clone()), comp(b, &[2]))]))
            .collect(),
        span: vec![],
    }
}

/// Pull a base term on n0 markings back to n markings.
pub fn pullback(t: &DecoratedClass, n0: usize, n: usize, d: u32) -> Vec<DecoratedClass> {
    let extra: Vec<usize> = (n0 + 1..=n).collect();
    let mut out = vec![DecoratedClass::new(t.coeff.clone(), vec![])];
    for f in &t.factors {
        let mut next = vec![];
        for partial in &out {
            match f {
                Factor::Psi(j) => {
                    next.push(partial.times(&[f.clone()]));
                    for mask in 1..(1u32 << extra.len()) {
                        let mut a = vec![*j];
                        let mut b: Vec<usize> = (1..=n0).filter(|i| i != j).collect();
                        for (t, &e) in extra.iter().enumerate() {
                            if mask >> t & 1 == 1 {
                                a.push(e);
                            } else {
                                b.push(e);
                            }
                        }
                        a.sort_unstable();
                        b.sort_unstable();
                        let mut p = partial.times(&[div(comp(0, &a), comp(d, &b))]);
                        p.coeff = -p.coeff;
                        next.push(p);
                    }
                }
                Factor::Stratum(s) => {
                    let m = s.components.len();
                    for code in 0..(m as u64).pow(extra.len() as u32) {
                        let mut s2 = s.clone();
                        let mut c = code;
                        for &e in &extra {
                            s2.components[(c % m as u64) as usize].markings.push(e);
                            c /= m as u64;
                        }
                        for cm in &mut s2.components {
                            cm.markings.sort_unstable();
                        }
                        next.push(partial.times(&[Factor::Stratum(s2)]));
                    }
                }
                _ => next.push(partial.times(&[f.clone()])),
            }
        }
        out = next;
    }
    out
}

/// A test monomial: ev classes at the markings and at most one kappa class.
#[derive(Clone, Debug)]
pub struct TestMonomial {
    pub evs: Vec<Partition>,
    pub kappa: Option<Partition>,
}

impl TestMonomial {
    pub fn factors(&self, g: Grass) -> Vec<Factor> {
        let mut f: Vec<Factor> = self
            .evs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(i, p)| Factor::Ev(i + 1, sch(g, p)))
            .collect();
        if let Some(k) = &self.kappa {
            f.push(Factor::Kappa(vec![sch(g, k)]));
        }
        f
    }

    pub fn codim(&self) -> i64 {
        self.evs.iter().map(|p| size(p) as i64).sum::<i64>() + self.kappa.as_ref().map_or(0, |k| size(k) as i64 - 1)
    }
}

impl fmt::Display for TestMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .evs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(i, p)| format!("ev{}({})", i + 1, fmt_partition(p)))
            .collect();
        if let Some(k) = &self.kappa {
            parts.push(format!("kappa({})", fmt_partition(k)));
        }
        if parts.is_empty() {
            parts.push("1".into());
        }
        f.write_str(&parts.join("*"))
    }
}

/// Test monomials complementary to a relation of codimension c on
/// M_{0,n}(X, d). Markings above n0 are symmetric, so their classes are
/// taken in nondecreasing order.
pub fn test_monomials(g: Grass, d: u32, n: usize, n0: usize, c: u32) -> Vec<TestMonomial> {
    let target = virtual_dim(g, d, n) - c as i64;
    let basis = g.basis();
    let kappas: Vec<Option<Partition>> =
        std::iter::once(None).chain(basis.iter().filter(|p| size(p) >= 2).cloned().map(Some)).collect();
    let mut out = vec![];
    let mut idx = vec![0usize; n];
    loop {
        let sorted_tail = (n0 + 1..n).all(|i| idx[i - 1] <= idx[i]);
        if sorted_tail {
            for k in &kappas {
                let m = TestMonomial { evs: idx.iter().map(|&i| basis[i].clone()).collect(), kappa: k.clone() };
                if m.codim() == target {
                    out.push(m);
                }
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < basis.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn integrate_pulled<S: PrimarySource>(src: &mut S, terms: &[DecoratedClass], n0: usize, n: usize, d: u32, m: &[Factor]) -> Result<Q> {
    let mut total = Q::zero();
    for t in terms {
        for p in pullback(t, n0, n, d) {
            total += reduce_integral(src, n, d, &p.times(m))?;
        }
    }
    Ok(total)
}

/// (lhs, rhs) of an exact relation integrated against one monomial.
pub fn relation_audit<S: PrimarySource>(src: &mut S, rel: &RelationTerms, n: usize, d: u32, m: &[Factor]) -> Result<(Q, Q)> {
    if !rel.span.is_empty() {
        return unsupported("span relations are audited over a grid (audit_instance)");
    }
    if n < 3 {
        return unsupported("audits pull back to n >= 3");
    }
    let lhs = integrate_pulled(src, &rel.lhs, rel.n0, n, d, m)?;
    let rhs = integrate_pulled(src, &rel.rhs, rel.n0, n, d, m)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditFailure {
    pub n: usize,
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub relation: String,
    pub target: String,
    pub degree: u32,
    pub ns: Vec<usize>,
    pub monomials: usize,
    /// monomials where some side is nonzero
    pub nontrivial: usize,
    pub passed: bool,
    /// for fitted relations: rank of the span and of the span with the lhs
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<(String, String)>>,
    pub failures: Vec<AuditFailure>,
}

/// Audit one relation instance over the test monomials for the given n.
pub fn audit_instance<S: PrimarySource>(src: &mut S, rel: &RelationTerms, codim: u32, d: u32, ns: &[usize]) -> Result<AuditReport> {
    let g = src.target();
    let mut report = AuditReport {
        relation: rel.label.clone(),
        target: g.to_string(),
        degree: d,
        ns: ns.to_vec(),
        monomials: 0,
        nontrivial: 0,
        passed: true,
        rank: None,
        coefficients: None,
        failures: vec![],
    };
    if rel.span.is_empty() {
        for &n in ns {
            for m in test_monomials(g, d, n, rel.n0, codim) {
                let (l, r) = relation_audit(src, rel, n, d, &m.factors(g))?;
                report.monomials += 1;
                if !l.is_zero() || !r.is_zero() {
                    report.nontrivial += 1;
                }
                if l != r {
                    report.passed = false;
                    report.failures.push(AuditFailure { n, monomial: m.to_string(), lhs: fmt_q(&l), rhs: fmt_q(&r) });
                }
            }
        }
        return Ok(report);
    }
    // lhs = sum_g c_g g on every monomial
    let mut rows = vec![];
    let mut labels = vec![];
    for &n in ns {
        for m in test_monomials(g, d, n, rel.n0, codim) {
            let f = m.factors(g);
            let l = integrate_pulled(src, &rel.lhs, rel.n0, n, d, &f)?;
            let mut row = vec![];
            for (_, gen) in &rel.span {
                row.push(integrate_pulled(src, std::slice::from_ref(gen), rel.n0, n, d, &f)?);
            }
            report.monomials += 1;
            if !l.is_zero() || row.iter().any(|x| !x.is_zero()) {
                report.nontrivial += 1;
            }
            row.push(l);
            rows.push(row);
            labels.push((n, m.to_string()));
        }
    }
    let fit = span_fit(&rows, rel.span.len());
    report.rank = Some((fit.rank, fit.rank_augmented));
    if let Some(sol) = &fit.solution {
        report.coefficients = Some(rel.span.iter().zip(sol).map(|((name, _), c)| (name.clone(), fmt_q(c))).collect());
    } else {
        report.passed = false;
        // name the first monomial the best partial fit misses
        let (n, m) = labels[fit.first_bad.unwrap_or(0)].clone();
        let row = &rows[fit.first_bad.unwrap_or(0)];
        report.failures.push(AuditFailure {
            n,
            monomial: m,
            lhs: fmt_q(&row[rel.span.len()]),
            rhs: "outside the span".into(),
        });
    }
    Ok(report)
}

struct Fit {
    rank: usize,
    rank_augmented: usize,
    solution: Option<Vec<Q>>,
    first_bad: Option<usize>,
}

/// Solve A c = b over Q where each row is [A | b].
fn span_fit(rows: &[Vec<Q>], cols: usize) -> Fit {
    let mut m: Vec<(usize, Vec<Q>)> = rows.iter().cloned().enumerate().collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..=cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i].1[c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r].1[c];
        for x in m[r].1.iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i].1[c].is_zero() {
                let f = m[i].1[c].clone();
                let pr = m[r].1.clone();
                for (x, y) in m[i].1.iter_mut().zip(pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.iter().filter(|&&c| c < cols).count();
    if pivots.contains(&cols) {
        let bad = m[rank].0;
        return Fit { rank, rank_augmented: rank + 1, solution: None, first_bad: Some(bad) };
    }
    let mut sol = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = m[i].1[cols].clone();
    }
    Fit { rank, rank_augmented: rank, solution: Some(sol), first_bad: None }
}

/// Targets, degrees and marking counts audited by `audit_all`.
#[derive(Clone, Debug)]
pub struct AuditGrid {
    pub degrees: Vec<u32>,
    pub ns: Vec<usize>,
}

impl AuditGrid {
    pub fn default_grid() -> Self {
        AuditGrid { degrees: vec![1, 2], ns: vec![3, 4] }
    }

    pub fn small() -> Self {
        AuditGrid { degrees: vec![1, 2], ns: vec![3] }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Self::default_grid()),
            "small" => Ok(Self::small()),
            _ => Err(Error::Parse(format!("unknown grid '{s}' (default | small)"))),
        }
    }
}

/// Every instance of the relations in `rels` that makes sense on the target.
pub fn audit_target<S: PrimarySource>(src: &mut S, rels: &[Relation], grid: &AuditGrid) -> Result<Vec<AuditReport>> {
    let g = src.target();
    let mut out = vec![];
    for &rel in rels {
        if rel == Relation::OneMb && g.k != 2 {
            continue;
        }
        for &d in &grid.degrees {
            for inst in relation_terms(g, rel, d)? {
                out.push(audit_instance(src, &inst, rel.codim(), d, &grid.ns)?);
            }
        }
    }
    Ok(out)
}
