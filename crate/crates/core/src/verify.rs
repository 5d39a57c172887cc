//! Identity checks over a parameter grid, shared by the command-line tool and
//! the acceptance tests. Each check compares two independent routes and
//! yields one [`Case`] per grid point.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::chromatic::{
    b_rq_from_expansion, b_rq_from_profile, b_rq_symbolic, m_rq_from_expansion, m_rq_from_profile,
    m_rq_statesum_poly, weight_profile, EvalPoint, Expander, Recurrence,
};
use crate::classicpoly::{brq_poly_from_u, u_polynomial, xb_from_brq, xb_truncated};
use crate::error::{Error, Result};
use crate::graphcore::WeightedMultigraph;
use crate::limits::Limits;
use crate::potts::{bpotts_histogram, bpotts_report, lemma6_state_sums, verify_upotts, Lemma6Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    Prop2,
    Prop3,
    Prop4,
    Lemma5,
    Lemma6,
    Eq1,
    Eq2,
    Thm7,
    USubst,
}

impl Identity {
    pub const ALL: [Identity; 9] = [
        Identity::Prop2,
        Identity::Prop3,
        Identity::Prop4,
        Identity::Lemma5,
        Identity::Lemma6,
        Identity::Eq1,
        Identity::Eq2,
        Identity::Thm7,
        Identity::USubst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Prop2 => "prop2",
            Identity::Prop3 => "prop3",
            Identity::Prop4 => "prop4",
            Identity::Lemma5 => "lemma5",
            Identity::Lemma6 => "lemma6",
            Identity::Eq1 => "eq1",
            Identity::Eq2 => "eq2",
            Identity::Thm7 => "thm7",
            Identity::USubst => "u-subst",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Identity::Prop2 => "unit-weight subset expansion of M_{r,q}",
            Identity::Prop3 => "deletion-contraction for M^w_{r,q}",
            Identity::Prop4 => "weighted subset expansion of M^w_{r,q}",
            Identity::Lemma5 => "deletion-contraction for B^w_{r,q}, loop factor (x+1), B at x=-1 equals M",
            Identity::Lemma6 => "B^w_{r,q} as a Potts state sum with (1+x)^mono",
            Identity::Eq1 => "U at Potts parameters against the Potts partition function",
            Identity::Eq2 => "B_q as a Potts state sum with q^{sum s}",
            Identity::Thm7 => "B_{r,q} from truncated XB and back",
            Identity::USubst => "B_{r,q} from the U-polynomial substitution",
        }
    }

    /// The two routes being compared.
    pub fn routes(self) -> (&'static str, &'static str) {
        match self {
            Identity::Prop2 | Identity::Prop4 => ("m_rq_subset", "m_rq_statesum"),
            Identity::Prop3 => ("m_rq_delcon", "m_rq_statesum"),
            Identity::Lemma5 => ("b_rq_numeric", "b_rq_delcon"),
            Identity::Lemma6 => ("b_rq_delcon", "potts_state_sum"),
            Identity::Eq1 => ("u_polynomial", "partition_function"),
            Identity::Eq2 => ("b_q", "potts_state_sum"),
            Identity::Thm7 => ("xb_truncated", "b_rq_symbolic"),
            Identity::USubst => ("brq_from_u", "b_rq_numeric"),
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

impl Serialize for Identity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Real Potts parameters for the floating-point check: the same per-spin
/// field list at every vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PottsPoint {
    pub beta: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub name: String,
    pub r: Vec<BigRational>,
    pub q: Vec<u64>,
    pub k: Vec<u32>,
    pub x: Vec<BigRational>,
    pub potts: Vec<PottsPoint>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn default_potts() -> Vec<PottsPoint> {
    vec![
        PottsPoint { beta: 1.0, j: std::f64::consts::LN_2, h: vec![0.0, 0.0] },
        PottsPoint { beta: 0.5, j: 1.3, h: vec![0.0, 0.0] },
        PottsPoint { beta: 0.9, j: 0.7, h: vec![0.3, -0.2, 0.1] },
        PottsPoint { beta: 1.1, j: 0.5, h: vec![0.4] },
    ]
}

impl Grid {
    pub fn default_grid() -> Self {
        Grid {
            name: "default".into(),
            r: vec![rat(2, 1), rat(3, 2)],
            q: vec![0, 1, 2, 3],
            k: vec![0, 1, 2, 3],
            x: vec![rat(-1, 1), rat(1, 1), rat(2, 1), rat(7, 3)],
            potts: default_potts(),
        }
    }

    pub fn quick() -> Self {
        Grid {
            name: "quick".into(),
            r: vec![rat(2, 1)],
            q: vec![1, 2],
            k: vec![1, 2],
            x: vec![rat(1, 1), rat(2, 1)],
            potts: default_potts(),
        }
    }

    /// `default`, `quick`, or `r=2,3/2;q=0,1;k=1,2;x=-1,7/3` (missing lists
    /// fall back to the default grid).
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "default" => return Ok(Self::default_grid()),
            "quick" => return Ok(Self::quick()),
            _ => {}
        }
        let mut g = Self::default_grid();
        g.name = s.to_string();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, vals) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad grid entry {part:?}")))?;
            let vals: Vec<&str> = vals.split(',').map(str::trim).collect();
            let bad = |v: &str| Error::Parse(format!("bad value {v:?} for {key}"));
            match key.trim() {
                "r" => g.r = vals.iter().map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                "x" => g.x = vals.iter().map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                "q" => g.q = vals.iter().map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                "k" => g.k = vals.iter().map(|v| v.parse().map_err(|_| bad(v))).collect::<Result<_>>()?,
                other => return Err(Error::Parse(format!("unknown grid key {other:?}"))),
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strs = |v: &[BigRational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "name": self.name,
            "r": strs(&self.r),
            "q": self.q,
            "k": self.k,
            "x": strs(&self.x),
            "potts": self.potts,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub identity: Identity,
    pub graph: usize,
    pub point: BTreeMap<&'static str, String>,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    /// Cases that only record a finding do not count as failures.
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

type Detail = (BTreeMap<&'static str, String>, String, String);

struct Sink<'a> {
    identity: Identity,
    graph: usize,
    rec: &'a mut Recorder,
}

impl Sink<'_> {
    /// Counts a case; the point and the two values are rendered only when the
    /// case is kept.
    fn push<F: FnOnce() -> Detail>(&mut self, pass: bool, asserted: bool, note: Option<String>, detail: F) {
        let s = &mut self.rec.summary;
        s.cases += 1;
        if !asserted {
            *s.findings.entry(note.clone().unwrap_or_default()).or_insert(0) += 1;
        }
        let failure = asserted && !pass;
        if failure {
            s.failed += 1;
        } else {
            s.passed += 1;
        }
        let keep_failure = failure && s.failures.len() < Summary::KEEP_FAILURES;
        if !keep_failure && !self.rec.keep_cases {
            return;
        }
        let (point, lhs, rhs) = detail();
        let case = Case { identity: self.identity, graph: self.graph, point, lhs, rhs, pass, asserted, note };
        if keep_failure {
            self.rec.summary.failures.push(case.clone());
        }
        if self.rec.keep_cases {
            self.rec.cases.push(case);
        }
    }

    fn exact<F: FnOnce() -> BTreeMap<&'static str, String>>(&mut self, point: F, lhs: &BigRational, rhs: &BigRational) {
        self.push(lhs == rhs, true, None, || (point(), lhs.to_string(), rhs.to_string()));
    }
}

/// Collects the outcome of [`check_graph`] calls: always a [`Summary`], and
/// every case when `keep_cases` is set.
#[derive(Clone, Debug, Default)]
pub struct Recorder {
    pub keep_cases: bool,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Recorder {
    pub fn new(keep_cases: bool) -> Self {
        Recorder { keep_cases, ..Default::default() }
    }
}

fn pt(p: &EvalPoint, with_x: bool) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::from([("r", p.r.to_string()), ("q", p.q.to_string()), ("k", p.k.to_string())]);
    if with_x {
        m.insert("x", p.x.to_string());
    }
    m
}

/// Runs one identity on one graph over the grid. Identities stated for unit
/// weights are run on `g` with its weights reset.
pub fn check_graph(identity: Identity, graph: usize, g: &WeightedMultigraph, grid: &Grid, limits: &Limits, rec: &mut Recorder) -> Result<()> {
    rec.summary.graphs += 1;
    let mut sink = Sink { identity, graph, rec };
    let unit = g.with_unit_weights();
    match identity {
        Identity::Prop2 | Identity::Prop4 => {
            let h = if identity == Identity::Prop2 { &unit } else { g };
            let profile = weight_profile(h, limits)?;
            for &q in &grid.q {
                for &k in &grid.k {
                    let a = m_rq_from_profile(&profile, q, k)?;
                    let b = m_rq_statesum_poly(h, q, k, limits)?;
                    for r in &grid.r {
                        let p = EvalPoint::new(r.clone(), q, k, BigRational::zero());
                        sink.exact(|| pt(&p, false), &a.eval(r), &b.eval(r));
                    }
                }
            }
        }
        Identity::Prop3 => {
            let expansion = Expander::new(Recurrence::Chromatic).expand(g);
            for &q in &grid.q {
                for &k in &grid.k {
                    let a = m_rq_from_expansion(&expansion, q, k)?;
                    let b = m_rq_statesum_poly(g, q, k, limits)?;
                    for r in &grid.r {
                        let p = EvalPoint::new(r.clone(), q, k, BigRational::zero());
                        sink.exact(|| pt(&p, false), &a.eval(r), &b.eval(r));
                    }
                }
            }
        }
        Identity::Lemma5 => {
            let expansion = Expander::new(Recurrence::Dichromatic).expand(g);
            let profile = weight_profile(g, limits)?;
            let loopless = first_loop(g).map(|e| g.delete_edge(e)).transpose()?;
            let loopless = loopless.map(|h| weight_profile(&h, limits)).transpose()?;
            for &q in &grid.q {
                for &k in &grid.k {
                    let a = b_rq_from_profile(&profile, q, k)?;
                    let b = b_rq_from_expansion(&expansion, q, k)?;
                    let m = m_rq_statesum_poly(g, q, k, limits)?;
                    let reduced = loopless.as_ref().map(|h| b_rq_from_profile(h, q, k)).transpose()?;
                    for r in &grid.r {
                        let (a_r, b_r) = (Collapsed::new(&a, r), Collapsed::new(&b, r));
                        let red_r = reduced.as_ref().map(|p| Collapsed::new(p, r));
                        for x in &grid.x {
                            let p = EvalPoint::new(r.clone(), q, k, x.clone());
                            let lhs = a_r.at(x);
                            sink.exact(|| pt(&p, true), &lhs, &b_r.at(x));
                            if let Some(red) = &red_r {
                                let rhs = (BigRational::one() + x) * red.at(x);
                                let point = || {
                                    let mut m = pt(&p, true);
                                    m.insert("check", "loop factor".into());
                                    m
                                };
                                sink.exact(point, &lhs, &rhs);
                            }
                        }
                        if grid.x.iter().any(|x| *x == -BigRational::one()) {
                            let point = || {
                                let mut m = pt(&EvalPoint::new(r.clone(), q, k, -BigRational::one()), true);
                                m.insert("check", "B(x=-1) = M".into());
                                m
                            };
                            sink.exact(point, &a_r.at(&-BigRational::one()), &m.eval(r));
                        }
                    }
                }
            }
        }
        Identity::Lemma6 => {
            // only the unit-weight placement is asserted; weighted graphs record which placement holds
            let asserted = g.is_unit_weighted();
            let expansion = Expander::new(Recurrence::Dichromatic).expand(g);
            for &q in &grid.q {
                for &k in &grid.k {
                    let lhs = b_rq_from_expansion(&expansion, q, k)?;
                    let sums = lemma6_state_sums(g, q, k, limits)?;
                    for r in &grid.r {
                        let (l_r, d_r, p_r) = (Collapsed::new(&lhs, r), Collapsed::new(&sums.0, r), Collapsed::new(&sums.1, r));
                        for x in &grid.x {
                            let p = EvalPoint::new(r.clone(), q, k, x.clone());
                            let t = BigRational::one() + x;
                            let (lv, dv, pv) = (l_r.at(x), d_r.at(&t), p_r.at(&t));
                            let rep = Lemma6Report { match_outer: lv == dv, match_inner: lv == pv, lhs: lv, rhs_outer: dv, rhs_inner: pv };
                            let pass = if asserted { rep.match_outer } else { rep.match_outer || rep.match_inner };
                            let note = Some(format!("placement={}", rep.placement()));
                            sink.push(pass, asserted, note, || (pt(&p, true), rep.lhs.to_string(), rep.rhs_outer.to_string()));
                        }
                    }
                }
            }
        }
        Identity::Eq1 => {
            for pp in &grid.potts {
                let rep = verify_upotts(g, &pp.h, pp.beta, pp.j, limits)?;
                let point = BTreeMap::from([
                    ("beta", pp.beta.to_string()),
                    ("J", pp.j.to_string()),
                    ("H", format!("{:?}", pp.h)),
                ]);
                let note = Some(format!("normalization={}", rep.placement));
                let pass = rep.match_plus || rep.match_minus;
                sink.push(pass, false, note, || (point, rep.u_value.to_string(), rep.state_sum.to_string()));
            }
        }
        Identity::Eq2 => {
            let profile = weight_profile(g, limits)?;
            for &k in &grid.k {
                let hist = bpotts_histogram(g, k, limits)?;
                for &q in &grid.q {
                    for x in &grid.x {
                        let rep = bpotts_report(&profile, &hist, q, k, x);
                        let point = || BTreeMap::from([("q", q.to_string()), ("k", k.to_string()), ("x", x.to_string())]);
                        let note = Some(format!("falling_factorial_match={}", rep.falling_matches()));
                        sink.push(rep.matches(), true, note, || (point(), rep.lhs.to_string(), rep.rhs.to_string()));
                    }
                }
            }
        }
        Identity::Thm7 => {
            let unit_profile = weight_profile(&unit, limits)?;
            for &k in &grid.k {
                let table = b_rq_symbolic(&unit, k, limits)?;
                let xb = xb_truncated(&unit, k, limits)?;
                let back = xb_from_brq(&table, unit.vertex_count());
                let ok = back.as_ref().map(|b| *b == xb).unwrap_or(false);
                let point = BTreeMap::from([("k", k.to_string()), ("check", "round trip".into())]);
                let note = back.err().map(|e| e.to_string());
                sink.push(ok, true, note, || (point, format!("{} terms", xb.len()), format!("{} terms", table.len())));
                for &q in &grid.q {
                    let poly = b_rq_from_profile(&unit_profile, q, k)?;
                    let (xb_poly, table_poly) = (xb.to_poly(q)?, table.to_poly(q)?);
                    for r in &grid.r {
                        let poly_r = Collapsed::new(&poly, r);
                        let (xb_r, table_r) = (Collapsed::new(&xb_poly, r), Collapsed::new(&table_poly, r));
                        for x in &grid.x {
                            let t = BigRational::one() + x;
                            let p = EvalPoint::new(r.clone(), q, k, x.clone());
                            let lhs = xb_r.at(&t);
                            let rhs = table_r.at(&t);
                            let direct = poly_r.at(x);
                            let note = (rhs != direct).then(|| format!("b_rq_numeric={direct}"));
                            let pass = lhs == rhs && rhs == direct;
                            sink.push(pass, true, note, || (pt(&p, true), lhs.to_string(), rhs.to_string()));
                        }
                    }
                }
            }
        }
        Identity::USubst => {
            let u = u_polynomial(&unit, limits)?;
            let unit_profile = weight_profile(&unit, limits)?;
            for &q in &grid.q {
                for &k in &grid.k {
                    let poly = b_rq_from_profile(&unit_profile, q, k)?;
                    let subst = brq_poly_from_u(&u, unit.vertex_count(), q, k)?;
                    for r in &grid.r {
                        let (poly_r, subst_r) = (Collapsed::new(&poly, r), Collapsed::new(&subst, r));
                        for x in grid.x.iter().filter(|x| !x.is_zero()) {
                            let p = EvalPoint::new(r.clone(), q, k, x.clone());
                            sink.exact(|| pt(&p, true), &subst_r.at(x), &poly_r.at(x));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// A polynomial in `(x, r)` with `r` fixed, for repeated evaluation in `x`.
struct Collapsed {
    poly: crate::exactalg::UniPoly,
    den: BigRational,
}

impl Collapsed {
    fn new(p: &crate::exactalg::BivariatePoly, r: &BigRational) -> Self {
        let (poly, den) = p.collapse_second(r);
        Collapsed { poly, den: BigRational::from_integer(den) }
    }

    fn at(&self, x: &BigRational) -> BigRational {
        self.poly.eval(x) / &self.den
    }
}

fn first_loop(g: &WeightedMultigraph) -> Option<usize> {
    (0..g.edge_count()).find(|&e| g.is_loop(e))
}

/// Totals for one identity over many graphs; keeps the first few failures.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub graphs: usize,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Non-asserted cases, by their note.
    pub findings: BTreeMap<String, usize>,
    pub failures: Vec<Case>,
}

impl Summary {
    pub const KEEP_FAILURES: usize = 20;

    /// Adds another summary's counts; failures stay in order, capped.
    pub fn merge(&mut self, other: Summary) {
        self.graphs += other.graphs;
        self.cases += other.cases;
        self.passed += other.passed;
        self.failed += other.failed;
        for (k, v) in other.findings {
            *self.findings.entry(k).or_insert(0) += v;
        }
        let room = Self::KEEP_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Runs an identity over a list of graphs, sequentially.
pub fn check_corpus(identity: Identity, graphs: &[WeightedMultigraph], grid: &Grid, limits: &Limits) -> Result<Summary> {
    let mut rec = Recorder::new(false);
    for (i, g) in graphs.iter().enumerate() {
        check_graph(identity, i, g, grid, limits, &mut rec)?;
    }
    Ok(rec.summary)
}
