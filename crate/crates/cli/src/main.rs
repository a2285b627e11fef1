use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gwrecon_core::fixedloci::{betti_transfer_check, flag_family_counts, h4_ledger_p1, p1_graph_census, P1_CENSUS_BOUND};
use gwrecon_core::gwcore::audit::{audit_target, AuditGrid, AuditReport, Relation};
use gwrecon_core::gwcore::kontsevich::{closed_as_q, km_recursion_pr, PrEngine};
use gwrecon_core::gwcore::localization::Oracle;
use gwrecon_core::gwcore::quantum::{qclass, quantum_mult, QClass};
use gwrecon_core::gwcore::reconstruct::{G2Reconstructor, OracleProvider, VanishingProvider};
use gwrecon_core::gwcore::strata::PrimarySource;
use gwrecon_core::gwcore::table::{InvariantTable, Provenance, SCHEMA_VERSION};
use gwrecon_core::gwcore::{expected_dim_gate, InvariantKey};
use gwrecon_core::modspace::{boundary_count_formula, boundary_divisors, codim2_catalog, dim_h2, SpaceSignature, Target};
use gwrecon_core::rational::{fmt_q, to_i64};
use gwrecon_core::schubert::{fmt_partition, parse_partition, product_all, CohClass, Grass, Partition};
use gwrecon_core::symgroup::{invariant_dim, invariant_dim_oracle};
use gwrecon_core::{Error, Int};

const EXIT_INVALID: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Reconstruct,
    Both,
}

/// Dimension formulas, stratum censuses and genus-0 Gromov-Witten invariants
/// of Grassmannians and flag varieties, in exact arithmetic.
///
/// Targets: pr:<r>, g:<k>,<N>, flag:<m1,...,ml>@<N>. Class lists are
/// partitions joined by '|' with parts joined by ',' ("0" is the empty
/// partition). Rationals print as "p/q".
///
/// CSV output: a flat JSON object becomes "key,value" rows; an array of
/// objects becomes one row per element with the union of keys as header.
/// Nested values are written as quoted JSON.
///
/// Exit codes: 0 success, 2 invalid input or out-of-range request,
/// 3 a checked identity failed (the failing pair is printed), 1 other errors.
#[derive(Debug, Parser)]
#[command(name = "gwrecon", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Invariant cache file (overridden by GWRECON_CACHE)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// h^2 of M_{0,n}(X, d)
    DimsH2 {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// curve class, one entry per H^2 generator ("2" or "1,2")
        #[arg(long)]
        deg: String,
    },
    /// Dimension of the S_{a_1} x ... x S_{a_l} invariant part of H^2(M_{0,n+sum a})
    DimsInvariant {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        weights: String,
        /// also run the brute-force count
        #[arg(long)]
        oracle: bool,
    },
    /// Boundary divisors of M_{0,n}(X, d), enumerated and counted
    Boundary {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        deg: String,
    },
    /// Codimension-2 generator catalog
    CatalogCodim2 {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        deg: u32,
    },
    /// Torus-fixed graphs of M_{0,0}(P^1, d) by number of negative weights
    CensusP1 {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        max_neg: i64,
        /// list graph encodings
        #[arg(long)]
        graphs: bool,
    },
    /// Fixed-locus family counts against dim h^2
    CensusFlag {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        deg: String,
    },
    /// h^4 ledger of M_{0,0}(P^1, d) for even d
    LedgerH4 {
        #[arg(long)]
        d: u32,
    },
    /// h^4 gaps between G(3,6) and P^3
    Transfer {
        #[arg(long)]
        d: u32,
    },
    /// Classical or quantum product of Schubert classes
    SchubertMult {
        #[arg(long)]
        target: String,
        #[arg(long)]
        classes: String,
        #[arg(long)]
        quantum: bool,
    },
    /// A primary invariant <sigma_1, ..., sigma_n>_d
    GwEval {
        #[arg(long)]
        target: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        classes: String,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// N_d for P^2 (r = 2) or the invariant table of P^3 (r = 3)
    GwKontsevich {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        r: u32,
    },
    /// Relation audits on P^2 and G(2,4), plus the ledger identities
    ///
    /// CSV columns: kind,name,target,degree,monomials,nontrivial,lhs,rhs,passed
    /// (relation rows carry lhs/rhs of the first failing monomial, if any).
    Audit {
        /// every relation and every ledger identity
        #[arg(long)]
        all: bool,
        /// one relation: diff, psisum, strange, evsum, 2m, marked, re2, 1mb
        #[arg(long)]
        relation: Option<String>,
        /// restrict to pr:2 or g:2,4
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value = "default")]
        grid: String,
    },
    /// Inspect or clear the invariant cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    Inspect,
    Clear,
}

struct Output {
    value: Value,
    /// CSV rendering when the generic one does not fit
    csv: Option<String>,
    failed: bool,
}

impl Output {
    fn ok(value: Value) -> Self {
        Output { value, csv: None, failed: false }
    }
}

enum Failure {
    Invalid(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::ResourceLimit { .. } | Error::Unsupported(_) | Error::Parse(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn int_json(x: &Int) -> Value {
    match to_i64(x) {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn parse_degrees(s: &str) -> Result<Vec<u32>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| invalid(format!("bad degree '{t}'"))))
        .collect()
}

fn parse_classes(s: &str) -> Result<Vec<Partition>, Failure> {
    Ok(s.split('|').map(parse_partition).collect::<Result<_, _>>()?)
}

fn signature(target: &str, n: usize, deg: &str) -> Result<SpaceSignature, Failure> {
    Ok(SpaceSignature::new(Target::parse(target)?, n, parse_degrees(deg)?)?)
}

fn grass(target: &str) -> Result<Grass, Failure> {
    Target::parse(target)?.grass().ok_or_else(|| invalid(format!("{target} is not a projective space or Grassmannian")))
}

fn cache_path(flag: &Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os("GWRECON_CACHE").map(PathBuf::from).or_else(|| flag.clone())
}

fn qclass_json(x: &QClass) -> Value {
    let terms: Vec<Value> = x
        .iter()
        .map(|((p, e), c)| json!({"class": fmt_partition(p), "q": e, "coeff": fmt_q(c)}))
        .collect();
    Value::Array(terms)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::DimsH2 { target, n, deg } => {
            let sig = signature(target, *n, deg)?;
            Ok(Output::ok(json!({"dim_h2": int_json(&dim_h2(&sig)?)})))
        }
        Command::DimsInvariant { n, weights, oracle } => {
            let a = parse_degrees(weights)?;
            let v = invariant_dim(*n, &a)?;
            let mut m = Map::new();
            m.insert("invariant_dim".into(), int_json(&v));
            let mut failed = false;
            if *oracle {
                let o = invariant_dim_oracle(*n, &a)?;
                failed = o != v;
                m.insert("oracle".into(), int_json(&o));
                m.insert("agree".into(), json!(o == v));
            }
            Ok(Output { value: Value::Object(m), csv: None, failed })
        }
        Command::Boundary { target, n, deg } => {
            let sig = signature(target, *n, deg)?;
            let splits = boundary_divisors(&sig)?;
            let formula = boundary_count_formula(&sig);
            let agree = Int::from(splits.len()) == formula;
            let csv = std::iter::once("split,symmetric".to_string())
                .chain(splits.iter().map(|s| format!("\"{s}\",{}", s.symmetric)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output {
                value: json!({
                    "count": splits.len(),
                    "formula": int_json(&formula),
                    "agree": agree,
                    "splits": splits.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                }),
                csv: Some(csv + "\n"),
                failed: !agree,
            })
        }
        Command::CatalogCodim2 { target, n, deg } => {
            let cat = codim2_catalog(&Target::parse(target)?, *n, *deg)?;
            let mut value = serde_json::to_value(&cat).map_err(|e| Failure::Other(e.to_string()))?;
            value["net"] = json!(cat.net());
            Ok(Output { value, csv: Some(cat.to_csv()), failed: false })
        }
        Command::CensusP1 { d, max_neg, graphs } => {
            if *d > P1_CENSUS_BOUND {
                return Err(invalid(format!("census degree {d} exceeds bound {P1_CENSUS_BOUND}")));
            }
            let c = p1_graph_census(*d, *max_neg)?;
            let mut m = Map::new();
            m.insert("d".into(), json!(d));
            m.insert("counts".into(), json!(c.counts(*max_neg)));
            if *graphs {
                let g: Map<String, Value> = c
                    .buckets
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v.iter().map(|g| g.encoding.clone()).collect::<Vec<_>>())))
                    .collect();
                m.insert("graphs".into(), Value::Object(g));
            }
            Ok(Output::ok(Value::Object(m)))
        }
        Command::CensusFlag { target, n, deg } => {
            let sig = signature(target, *n, deg)?;
            let f = flag_family_counts(&sig)?;
            let failed = !f.matches();
            Ok(Output { value: serde_json::to_value(&f).map_err(|e| Failure::Other(e.to_string()))?, csv: None, failed })
        }
        Command::LedgerH4 { d } => {
            let l = h4_ledger_p1(*d)?;
            let failed = !l.balanced;
            Ok(Output { value: serde_json::to_value(&l).map_err(|e| Failure::Other(e.to_string()))?, csv: None, failed })
        }
        Command::Transfer { d } => {
            let t = betti_transfer_check(*d)?;
            let failed = !t.ok;
            Ok(Output { value: serde_json::to_value(&t).map_err(|e| Failure::Other(e.to_string()))?, csv: None, failed })
        }
        Command::SchubertMult { target, classes, quantum } => {
            let g = grass(target)?;
            let parts = parse_classes(classes)?;
            for p in &parts {
                if !g.fits(p) {
                    return Err(invalid(format!("partition {} does not fit {g}", fmt_partition(p))));
                }
            }
            let value = if *quantum {
                let mut acc = qclass(vec![]);
                for p in &parts {
                    acc = quantum_mult(g, &acc, &qclass(p.clone()))?;
                }
                json!({"product": qclass_json(&acc)})
            } else {
                let cs: Vec<CohClass> = parts.iter().map(|p| CohClass::schubert(g, p.clone())).collect::<Result<_, _>>()?;
                let prod = product_all(g, &cs)?;
                let terms: Vec<Value> = prod.terms.iter().map(|(p, c)| json!({"class": fmt_partition(p), "coeff": fmt_q(c)})).collect();
                json!({"product": terms})
            };
            Ok(Output::ok(value))
        }
        Command::GwEval { target, d, classes, method } => gw_eval(cli, target, *d, classes, *method),
        Command::GwKontsevich { d, r } => {
            let t = km_recursion_pr(*r, *d)?;
            if *r == 2 {
                let closed = closed_as_q(*d);
                let mut n = Map::new();
                let mut failed = false;
                for (deg, v) in &t.n_d {
                    failed |= closed[*deg as usize] != *v;
                    n.insert(deg.to_string(), json!(fmt_q(v)));
                }
                Ok(Output { value: json!({"N": n}), csv: None, failed })
            } else {
                let rows: Vec<Value> = t
                    .values
                    .iter()
                    .map(|((deg, ins), v)| {
                        let ins: Vec<String> = ins.iter().map(|a| a.to_string()).collect();
                        json!({"d": deg, "insertions": ins.join("|"), "value": fmt_q(v)})
                    })
                    .collect();
                Ok(Output::ok(json!({"r": r, "invariants": rows})))
            }
        }
        Command::Audit { all, relation, target, grid } => audit(*all, relation.as_deref(), target.as_deref(), grid),
        Command::Cache { action } => {
            let path = cache_path(&cli.cache).ok_or_else(|| invalid("no cache path (use --cache or GWRECON_CACHE)"))?;
            match action {
                CacheAction::Inspect => {
                    let t = InvariantTable::load(&path)?;
                    let by: Map<String, Value> = t
                        .counts_by_provenance()
                        .iter()
                        .map(|(p, c)| (serde_json::to_value(p).unwrap().as_str().unwrap_or("?").to_string(), json!(c)))
                        .collect();
                    Ok(Output::ok(json!({
                        "path": path.display().to_string(),
                        "exists": path.exists(),
                        "entries": t.len(),
                        "by_provenance": by,
                        "schema_version": SCHEMA_VERSION,
                    })))
                }
                CacheAction::Clear => {
                    let existed = path.exists();
                    if existed {
                        std::fs::remove_file(&path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
                    }
                    Ok(Output::ok(json!({"path": path.display().to_string(), "cleared": existed})))
                }
            }
        }
    }
}

fn gw_eval(cli: &Cli, target: &str, d: u32, classes: &str, method: Method) -> Result<Output, Failure> {
    let g = grass(target)?;
    let parts = parse_classes(classes)?;
    for p in &parts {
        if !g.fits(p) {
            return Err(invalid(format!("partition {} does not fit {g}", fmt_partition(p))));
        }
    }
    let key = InvariantKey::new(g, d, parts);
    let path = cache_path(&cli.cache);
    let mut table = match &path {
        Some(p) => InvariantTable::load(p)?,
        None => InvariantTable::new(),
    };
    let mut m = Map::new();
    m.insert("gate".into(), json!(expected_dim_gate(&key)));
    // a single method may answer from the cache; "both" always recomputes
    let cached = if method == Method::Both { None } else { table.get(&key).map(|e| e.value.clone()) };
    let mut oracle_v = None;
    let mut rec_v = None;
    if method != Method::Reconstruct {
        let v = match &cached {
            Some(v) => v.clone(),
            None => Oracle::certified(g, d.max(1))?.eval(&key)?,
        };
        table.insert(key.clone(), v.clone(), Provenance::Oracle)?;
        oracle_v = Some(v);
    }
    if method != Method::Oracle {
        let v = match &cached {
            Some(v) => v.clone(),
            None => reconstruct(&key)?,
        };
        // a disagreement is reported below, not stored
        if oracle_v.as_ref().is_none_or(|o| *o == v) {
            table.insert(key.clone(), v.clone(), Provenance::Recursion)?;
        }
        rec_v = Some(v);
    }
    if let Some(p) = &path {
        table.save(p)?;
    }
    let mut failed = false;
    if let Some(v) = &oracle_v {
        m.insert("oracle".into(), json!(fmt_q(v)));
    }
    if let Some(v) = &rec_v {
        m.insert("reconstruct".into(), json!(fmt_q(v)));
    }
    if let (Some(a), Some(b)) = (&oracle_v, &rec_v) {
        m.insert("agree".into(), json!(a == b));
        failed = a != b;
    }
    Ok(Output { value: Value::Object(m), csv: None, failed })
}

/// WDVV on P^r (r <= 3), the c2-stripping recursion on G(2,N).
fn reconstruct(key: &InvariantKey) -> Result<gwrecon_core::Q, Failure> {
    let g = key.target;
    if g.k == 1 {
        let mut e = PrEngine::new((g.n - 1) as u32)?;
        return Ok(e.primary(key.degree, &key.insertions)?);
    }
    if g.k == 2 {
        let provider = VanishingProvider::new(g.n, OracleProvider::new(Oracle::certified(g, key.degree.max(1))?));
        let mut r = G2Reconstructor::new(g, provider)?;
        return Ok(r.eval_key(key)?);
    }
    Err(invalid(format!("no reconstruction for {g}; use --method oracle")))
}

fn audit(all: bool, relation: Option<&str>, target: Option<&str>, grid: &str) -> Result<Output, Failure> {
    if !all && relation.is_none() {
        return Err(invalid("audit needs --all or --relation"));
    }
    let grid = AuditGrid::parse(grid)?;
    let rels: Vec<Relation> = match relation {
        Some(r) => vec![Relation::parse(r)?],
        None => Relation::ALL.to_vec(),
    };
    let targets: Vec<Grass> = match target {
        Some(t) => {
            let g = grass(t)?;
            if g != Grass::projective(2) && g != Grass::new(2, 4)? {
                return Err(invalid("audits run on pr:2 and g:2,4"));
            }
            vec![g]
        }
        None => vec![Grass::projective(2), Grass::new(2, 4)?],
    };
    let mut reports: Vec<AuditReport> = vec![];
    for g in targets {
        if g.k == 1 {
            let mut src = PrEngine::new(2)?;
            reports.extend(audit_target(&mut src, &rels, &grid)?);
        } else {
            let mut src = Oracle::certified(g, *grid.degrees.iter().max().unwrap_or(&1))?;
            reports.extend(audit_target(&mut src, &rels, &grid)?);
        }
    }
    let mut failed = reports.iter().any(|r| !r.passed);
    let mut m = Map::new();
    m.insert("relations".into(), serde_json::to_value(&reports).map_err(|e| Failure::Other(e.to_string()))?);
    if all {
        let mut ledgers = vec![];
        for d in (2..=12).step_by(2) {
            let l = h4_ledger_p1(d)?;
            failed |= !l.balanced;
            ledgers.push(json!({"identity": "h4-ledger", "d": d, "lhs": int_json(&l.total), "rhs": l.k_squared, "passed": l.balanced}));
        }
        for d in 2..=6 {
            let t = betti_transfer_check(d)?;
            failed |= !t.ok;
            ledgers.push(json!({"identity": "transfer", "d": d, "lhs": [t.gap_n0, t.gap_n1], "rhs": [d + 3, 2 * d + 3], "passed": t.ok}));
        }
        m.insert("ledgers".into(), Value::Array(ledgers));
    }
    m.insert("passed".into(), json!(!failed));
    let csv = audit_csv(&m);
    Ok(Output { value: Value::Object(m), csv: Some(csv), failed })
}

/// One row per relation instance and per ledger identity.
fn audit_csv(m: &Map<String, Value>) -> String {
    let mut out = String::from("kind,name,target,degree,monomials,nontrivial,lhs,rhs,passed\n");
    for r in m.get("relations").and_then(|r| r.as_array()).into_iter().flatten() {
        let first = r["failures"].as_array().and_then(|f| f.first());
        let row = [
            json!("relation"),
            r["relation"].clone(),
            r["target"].clone(),
            r["degree"].clone(),
            r["monomials"].clone(),
            r["nontrivial"].clone(),
            first.map_or(Value::Null, |f| f["lhs"].clone()),
            first.map_or(Value::Null, |f| f["rhs"].clone()),
            r["passed"].clone(),
        ];
        out.push_str(&row.iter().map(csv_field).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    for l in m.get("ledgers").and_then(|r| r.as_array()).into_iter().flatten() {
        let row = [
            json!("ledger"),
            l["identity"].clone(),
            Value::Null,
            l["d"].clone(),
            Value::Null,
            Value::Null,
            l["lhs"].clone(),
            l["rhs"].clone(),
            l["passed"].clone(),
        ];
        out.push_str(&row.iter().map(csv_field).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn to_csv(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Array(rows) if rows.iter().all(|r| r.is_object()) => {
            let mut keys: Vec<String> = rows.iter().flat_map(|r| r.as_object().unwrap().keys().cloned()).collect();
            keys.sort();
            keys.dedup();
            out.push_str(&keys.join(","));
            out.push('\n');
            for r in rows {
                let line: Vec<String> = keys.iter().map(|k| csv_field(r.get(k).unwrap_or(&Value::Null))).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        Value::Object(m) => {
            out.push_str("key,value\n");
            for (k, x) in m {
                out.push_str(&format!("{},{}\n", csv_field(&json!(k)), csv_field(x)));
            }
        }
        _ => {
            out.push_str(&csv_field(v));
            out.push('\n');
        }
    }
    out
}

fn print_failures(v: &Value) {
    if let Some(rels) = v.get("relations").and_then(|r| r.as_array()) {
        for r in rels {
            for f in r.get("failures").and_then(|f| f.as_array()).into_iter().flatten() {
                eprintln!(
                    "FAIL {} {} d={} n={} {}: lhs={} rhs={}",
                    r["relation"].as_str().unwrap_or("?"),
                    r["target"].as_str().unwrap_or("?"),
                    r["degree"],
                    f["n"],
                    f["monomial"].as_str().unwrap_or("?"),
                    f["lhs"].as_str().unwrap_or("?"),
                    f["rhs"].as_str().unwrap_or("?"),
                );
            }
        }
    }
    if let Some(ls) = v.get("ledgers").and_then(|r| r.as_array()) {
        for l in ls.iter().filter(|l| l["passed"] == json!(false)) {
            eprintln!("FAIL {} d={}: lhs={} rhs={}", l["identity"].as_str().unwrap_or("?"), l["d"], l["lhs"], l["rhs"]);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string(&out.value).expect("json")),
                Format::Csv => print!("{}", out.csv.clone().unwrap_or_else(|| to_csv(&out.value))),
            }
            if out.failed {
                print_failures(&out.value);
                eprintln!("identity check failed: {}", serde_json::to_string(&out.value).expect("json"));
                ExitCode::from(EXIT_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
