use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use chromatic_core::chromatic::{
    b_q, b_rq_delcon, b_rq_numeric, b_rq_symbolic, m_q, m_rq_delcon, m_rq_statesum, m_rq_subset, EvalPoint, MqAlgorithm,
};
use chromatic_core::classicpoly::{u_polynomial, xb_truncated};
use chromatic_core::graphcore::{enumerate_small_graphs, parse_graph, random_weighted_graphs, write_graph_json, WeightedMultigraph};
use chromatic_core::partitiondep::{
    self, c_tau_product, c_tau_via_s, find_dependency, partition_count, partitions, rank_bound, rank_m, sequence_combination,
    threshold_scan, DepMode, MatrixCaps,
};
use chromatic_core::potts::{partition_function, PottsField};
use chromatic_core::verify::{check_graph, Grid, Identity, Recorder, Summary};
use chromatic_core::{Error, Limits, Result};

use crate::{Algorithm, Cli, Command, ComputeArgs, CorpusArgs, CorpusOpts, Format, Function, Mode, Outcome, RankArgs, ScanArgs, VerifyArgs};

pub fn run(cli: &Cli) -> Result<Outcome> {
    let limits = cli.limits();
    let (report, outcome) = match &cli.command {
        Command::Compute(a) => (compute(a, &limits)?, Outcome::Ok),
        Command::Verify(a) => verify(a, cli, &limits)?,
        Command::PartitionRank(a) => partition_rank(a)?,
        Command::ThresholdScan(a) => {
            let text = threshold(a);
            emit(cli.out.as_deref(), &text)?;
            return Ok(Outcome::Ok);
        }
        Command::CorpusCheck(a) => corpus_check(a, cli, &limits)?,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(cli.out.as_deref(), &text)?;
    Ok(outcome)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Error::InvalidInput(e.to_string()))
        }
    }
}

fn read_graph(path: &Path) -> Result<WeightedMultigraph> {
    let src = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&src)
}

fn parse_rational(name: &str, s: &str) -> Result<BigRational> {
    s.trim().parse().map_err(|_| Error::Parse(format!("--{name}: {s:?} is not a rational number")))
}

fn graph_json(g: &WeightedMultigraph) -> Value {
    serde_json::from_str(&write_graph_json(g)).expect("graph json")
}

fn compute(a: &ComputeArgs, limits: &Limits) -> Result<Value> {
    let g = read_graph(&a.graph)?;
    let r = parse_rational("r", &a.r)?;
    let x = parse_rational("x", &a.x)?;
    let p = EvalPoint::new(r.clone(), a.q, a.k, x.clone());
    let alg = match a.algorithm {
        Algorithm::Statesum => "statesum",
        Algorithm::Subset => "subset",
        Algorithm::Delcon => "delcon",
    };
    let (point, algorithm, result) = match a.function {
        Function::M => {
            let v = match a.algorithm {
                Algorithm::Statesum => m_rq_statesum(&g, &p, limits)?,
                Algorithm::Subset => m_rq_subset(&g, &p, limits)?,
                Algorithm::Delcon => m_rq_delcon(&g, &p)?,
            };
            (json!({"r": r.to_string(), "q": a.q, "k": a.k}), alg, json!(v.to_string()))
        }
        Function::B => {
            let v = match a.algorithm {
                Algorithm::Delcon => b_rq_delcon(&g, &p)?,
                Algorithm::Subset => b_rq_numeric(&g, &p, limits)?,
                Algorithm::Statesum => return Err(Error::InvalidInput("B_{r,q} has subset and delcon algorithms".into())),
            };
            (json!({"r": r.to_string(), "q": a.q, "k": a.k, "x": x.to_string()}), alg, json!(v.to_string()))
        }
        Function::Mq => {
            let algo = match a.algorithm {
                Algorithm::Statesum => MqAlgorithm::StateSum,
                Algorithm::Subset => MqAlgorithm::Subset,
                Algorithm::Delcon => return Err(Error::InvalidInput("M_q has statesum and subset algorithms".into())),
            };
            let v = m_q(&g, a.k, a.q, algo, limits)?;
            (json!({"q": a.q, "k": a.k}), alg, json!(v.to_string()))
        }
        Function::Bq => {
            let v = b_q(&g, &x, a.k, a.q, limits)?;
            (json!({"q": a.q, "k": a.k, "x": x.to_string()}), "subset", json!(v.to_string()))
        }
        Function::U => (json!({}), "subset", serde_json::to_value(u_polynomial(&g, limits)?).expect("json")),
        Function::Xb => (json!({"k": a.k}), "statesum", serde_json::to_value(xb_truncated(&g, a.k, limits)?).expect("json")),
        Function::BrqTable => (json!({"k": a.k}), "subset", serde_json::to_value(b_rq_symbolic(&g, a.k, limits)?).expect("json")),
        Function::Z => {
            let path = a.field.as_ref().ok_or_else(|| Error::InvalidInput("--function z needs --field".into()))?;
            let src = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let f = PottsField::from_json(&src, g.vertex_count())?;
            let z = partition_function(&g, &f, limits)?;
            (json!({"k": f.k, "J": f.j, "beta": f.beta, "H": f.h}), "statesum", json!(z))
        }
    };
    let function = format!("{:?}", a.function).to_lowercase();
    Ok(json!({"function": function, "algorithm": algorithm, "graph": graph_json(&g), "point": point, "result": result}))
}

fn corpus(opts: &CorpusOpts, seed: u64) -> Result<Vec<WeightedMultigraph>> {
    if opts.max_vertices > 7 {
        return Err(Error::InvalidInput("--max-vertices is limited to 7".into()));
    }
    let mut gs = enumerate_small_graphs(opts.max_vertices, opts.max_edges);
    gs.extend(random_weighted_graphs(opts.random, opts.max_vertices.max(1), opts.max_edges, seed));
    Ok(gs)
}

fn provenance(id: Identity, grid: &Grid, cli: &Cli, source: Value) -> Value {
    let (a, b) = id.routes();
    json!({
        "identity": id.name(),
        "statement": id.statement(),
        "algorithms": [a, b],
        "grid": grid.to_json(),
        "graphs": source,
        "seed": cli.seed,
        "caps": {"states": cli.cap_states, "subsets": cli.cap_subsets},
        "tool": concat!("chromfn ", env!("CARGO_PKG_VERSION")),
    })
}

/// One identity over many graphs on the worker pool; results merged in graph order.
fn run_parallel(id: Identity, graphs: &[WeightedMultigraph], grid: &Grid, limits: &Limits) -> Result<Summary> {
    const CHUNK: usize = 64;
    let parts: Vec<Result<Summary>> = graphs
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut rec = Recorder::new(false);
            for (i, g) in chunk.iter().enumerate() {
                check_graph(id, c * CHUNK + i, g, grid, limits, &mut rec)?;
            }
            Ok(rec.summary)
        })
        .collect();
    let mut total = Summary::default();
    for p in parts {
        total.merge(p?);
    }
    Ok(total)
}

fn verify(a: &VerifyArgs, cli: &Cli, limits: &Limits) -> Result<(Value, Outcome)> {
    let id: Identity = a.identity.parse()?;
    let grid = Grid::parse(&a.grid)?;
    let (body, ok) = match &a.graph {
        Some(path) => {
            let g = read_graph(path)?;
            let mut rec = Recorder::new(true);
            check_graph(id, 0, &g, &grid, limits, &mut rec)?;
            let ok = rec.summary.ok();
            let src = json!({"file": path.display().to_string(), "graph": graph_json(&g)});
            (json!({"provenance": provenance(id, &grid, cli, src), "summary": rec.summary, "cases": rec.cases}), ok)
        }
        None => {
            let gs = corpus(&a.corpus, cli.seed)?;
            let s = run_parallel(id, &gs, &grid, limits)?;
            let src = json!({"corpus": {"max_vertices": a.corpus.max_vertices, "max_edges": a.corpus.max_edges, "random": a.corpus.random}});
            let ok = s.ok();
            (json!({"provenance": provenance(id, &grid, cli, src), "summary": s}), ok)
        }
    };
    let mut body = body;
    body["pass"] = json!(ok);
    Ok((body, if ok { Outcome::Ok } else { Outcome::AssertionFailed }))
}

fn partition_rank(a: &RankArgs) -> Result<(Value, Outcome)> {
    let mode = match a.mode {
        Mode::Exact => DepMode::Exact,
        Mode::Modular => DepMode::Modular,
    };
    let caps = MatrixCaps::default();
    let rank = rank_m(a.n, mode, caps)?;
    let p = partition_count(a.n);
    let mut out = json!({
        "n": a.n,
        "mode": if mode == DepMode::Exact { "exact" } else { "modular" },
        "rank": rank,
        "p": p.to_string(),
        "bound": rank_bound(a.n).to_string(),
        "columns": partitiondep::monomial_dimension(a.n),
        "full_rank": BigInt::from(rank) == p,
    });
    if a.dependency {
        let max_n = if mode == DepMode::Exact { caps.exact_max_n } else { caps.modular_max_n };
        if a.n > max_n {
            return Err(Error::CapExceeded { what: "dependency search", needed: format!("n = {}", a.n), cap: max_n as u64 });
        }
        let parts: Vec<_> = partitions(a.n).collect();
        out["dependency"] = match find_dependency(a.n, &parts, mode)? {
            None => Value::Null,
            Some(dep) => {
                let checks: Vec<Value> = (0..=5)
                    .map(|y| json!({"y": y, "vanishes": sequence_combination(&dep, y).is_empty()}))
                    .collect();
                let alpha: Vec<Value> = dep.iter().map(|(t, a)| json!({"partition": t.parts(), "alpha": format!("{}/{}", a.numer(), a.denom())})).collect();
                json!({"alpha": alpha, "symbolically_verified": true, "sequence_checks": checks})
            }
        };
    }
    Ok((out, Outcome::Ok))
}

fn threshold(a: &ScanArgs) -> String {
    let rows = threshold_scan(a.max);
    let first = rows.iter().find(|r| r.exceeds).map(|r| r.n);
    match a.format {
        Format::Csv => {
            let mut s = String::from("n,p,bound,exceeds\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.n, r.p, r.bound, r.exceeds));
            }
            s
        }
        Format::Json => {
            let v = json!({"max": a.max, "first_exceedance": first, "rows": rows});
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    }
}

fn corpus_check(a: &CorpusArgs, cli: &Cli, limits: &Limits) -> Result<(Value, Outcome)> {
    let grid = Grid::parse(&a.grid)?;
    let gs = corpus(&a.corpus, cli.seed)?;
    let unit: Vec<WeightedMultigraph> = gs.iter().map(WeightedMultigraph::with_unit_weights).collect();
    let weighted: Vec<WeightedMultigraph> = gs.iter().filter(|g| !g.is_unit_weighted()).cloned().collect();
    let unit_only: Vec<WeightedMultigraph> = gs.iter().filter(|g| g.is_unit_weighted()).cloned().collect();
    let small = vec![WeightedMultigraph::unweighted(1, vec![])?, WeightedMultigraph::complete(2)];
    let eq2_grid = Grid {
        q: grid.q.iter().copied().filter(|&q| q >= 1).collect(),
        k: grid.k.iter().copied().filter(|&k| k >= 1).collect(),
        ..grid.clone()
    };
    let jobs: Vec<(&str, Identity, &[WeightedMultigraph], &Grid)> = vec![
        ("prop3", Identity::Prop3, &gs, &grid),
        ("prop4", Identity::Prop4, &gs, &grid),
        ("lemma5", Identity::Lemma5, &gs, &grid),
        ("lemma6", Identity::Lemma6, &unit_only, &grid),
        ("lemma6-weighted", Identity::Lemma6, &weighted, &grid),
        ("thm7", Identity::Thm7, &unit, &grid),
        ("u-subst", Identity::USubst, &unit, &grid),
        ("eq2", Identity::Eq2, &gs, &eq2_grid),
        ("eq1", Identity::Eq1, &small, &grid),
    ];
    let mut suites = serde_json::Map::new();
    let mut all_ok = true;
    for (name, id, graphs, g) in jobs {
        let s = run_parallel(id, graphs, g, limits)?;
        all_ok &= s.ok();
        suites.insert(name.to_string(), json!({"identity": id.name(), "algorithms": id.routes(), "summary": s}));
    }
    // partition machinery
    let mut problems = Vec::new();
    for n in 1..=a.n {
        for tau in partitions(n) {
            for y in 0..=5 {
                if c_tau_via_s(&tau, y).ok() != Some(c_tau_product(&tau, y)) {
                    problems.push(format!("c({tau}, {y})"));
                }
            }
        }
    }
    let ranks: Vec<Value> = (1..=a.n.min(6))
        .map(|n| {
            let r = rank_m(n, DepMode::Exact, MatrixCaps::default())?;
            if BigInt::from(r) != partition_count(n) {
                problems.push(format!("rank_m({n}) = {r}"));
            }
            Ok(json!({"n": n, "rank": r}))
        })
        .collect::<Result<_>>()?;
    let first = threshold_scan(60).into_iter().find(|r| r.exceeds).map(|r| r.n);
    if first != Some(39) {
        problems.push(format!("first exceedance {first:?}"));
    }
    all_ok &= problems.is_empty();
    suites.insert("partitions".into(), json!({"rank_m": ranks, "first_exceedance": first, "problems": problems}));
    let report = json!({
        "provenance": {
            "grid": grid.to_json(),
            "corpus": {"max_vertices": a.corpus.max_vertices, "max_edges": a.corpus.max_edges, "random": a.corpus.random, "graphs": gs.len()},
            "seed": cli.seed,
            "tool": concat!("chromfn ", env!("CARGO_PKG_VERSION")),
        },
        "suites": suites,
        "pass": all_ok,
    });
    Ok((report, if all_ok { Outcome::Ok } else { Outcome::AssertionFailed }))
}
