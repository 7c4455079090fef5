//! Seeded property corpus: every instance is drawn from its own stream
//! `(seed, "<family>/<index>")`, checked independently and reported in id
//! order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    unraveled_radius, verify_lemma4, verify_thm1, verify_thm2, verify_thm3, ball_radius, BoundVerdict, Direction,
    Param, SubCheck, SLACK,
};
use crate::cover::{unraveled_ball_with, NodeBudget};
use crate::error::{Error, Result};
use crate::generate::{gnp, open_closed, MAX_ATTEMPTS};
use crate::graph::io::{GraphDocument, SCHEMA_VERSION};
use crate::graph::{EdgeWeights, Graph, VertexWeighting};
use crate::prooflab::{identity_suite, IdentityReport};
use crate::rng::{self, Stream};
use crate::robustness::{check_robust, max_robust_params, RobustMode, RobustOptions};
use crate::scalar::Rational;
use crate::spectra::closed_walk_weight;

/// Relative slack of the closed-walk comparison.
pub const WALK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Thm1,
    Identities,
    Lemma1,
    Thm3,
    Lemma4,
    Thm2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Thm1,
        Family::Identities,
        Family::Lemma1,
        Family::Thm3,
        Family::Lemma4,
        Family::Thm2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Thm1 => "thm1",
            Family::Identities => "identities",
            Family::Lemma1 => "lemma1",
            Family::Thm3 => "thm3",
            Family::Lemma4 => "lemma4",
            Family::Thm2 => "thm2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteSize {
    Small,
    Full,
}

/// Instances per corpus: `(thm1 and identities, lemma1, thm3, lemma4 and thm2)`.
impl SuiteSize {
    pub fn counts(self) -> (usize, usize, usize, usize) {
        match self {
            SuiteSize::Small => (200, 100, 100, 50),
            SuiteSize::Full => (1000, 500, 500, 250),
        }
    }
}

fn stream_for(seed: u64, family: &str, i: usize) -> Stream {
    rng::stream(seed, &format!("{family}/{i}"))
}

fn random_weights(g: &Graph, s: &mut Stream) -> Result<EdgeWeights> {
    let values = (0..g.edge_count()).map(|_| open_closed(s, 2.0)).collect();
    EdgeWeights::from_edge_values(g, values)
}

fn rejection<T>(what: &str, mut draw: impl FnMut() -> Option<T>) -> Result<T> {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(x) = draw() {
            return Ok(x);
        }
    }
    Err(Error::resource(format!("no {what} instance in {MAX_ATTEMPTS} attempts")))
}

/// Connected, minimum degree ≥ 2, `n ≤ 12`, weights in `(0, 2]`, `g` in
/// `(0, 1]`, `r ∈ {1, 2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm1Instance {
    pub graph: Graph,
    pub weights: EdgeWeights,
    pub g: VertexWeighting,
    pub r: usize,
}

pub fn thm1_instance(seed: u64, i: usize) -> Result<Thm1Instance> {
    thm1_instance_with(seed, i, false)
}

/// With `negative_control` the first weight has its sign flipped, which the
/// weight constructor rejects.
pub fn thm1_instance_with(seed: u64, i: usize, negative_control: bool) -> Result<Thm1Instance> {
    let mut s = stream_for(seed, "thm1", i);
    let graph = rejection("thm1", || {
        let n = s.gen_range(3..=12);
        let p = s.gen_range(0.25..0.8);
        let g = gnp(n, p, &mut s);
        (g.is_connected() && g.min_degree() >= Some(2)).then_some(g)
    })?;
    let mut values: Vec<f64> = (0..graph.edge_count()).map(|_| open_closed(&mut s, 2.0)).collect();
    if negative_control {
        values[0] = -values[0];
    }
    let weights = EdgeWeights::from_edge_values(&graph, values)?;
    let gv = (0..graph.vertex_count()).map(|_| open_closed(&mut s, 1.0)).collect();
    let g = VertexWeighting::new(&graph, gv)?;
    let r = s.gen_range(1..=3);
    Ok(Thm1Instance { graph, weights, g, r })
}

/// `n ≤ 10`, any gnp graph, weights in `(0, 2]`, `r ≤ 3`, `k ≤ 6`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Instance {
    pub graph: Graph,
    pub weights: EdgeWeights,
    pub v: usize,
    pub r: usize,
    pub k_max: usize,
}

pub fn lemma1_instance(seed: u64, i: usize) -> Result<Lemma1Instance> {
    let mut s = stream_for(seed, "lemma1", i);
    let n = s.gen_range(2..=10);
    let p = s.gen_range(0.2..0.8);
    let graph = gnp(n, p, &mut s);
    let weights = random_weights(&graph, &mut s)?;
    let v = s.gen_range(0..n);
    let r = s.gen_range(1..=3);
    Ok(Lemma1Instance { graph, weights, v, r, k_max: 6 })
}

/// Average degree ≥ 2, `n ≤ 12`, possibly disconnected, `r ∈ {1, 2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thm3Instance {
    pub graph: Graph,
    pub r: usize,
}

pub fn thm3_instance(seed: u64, i: usize) -> Result<Thm3Instance> {
    let mut s = stream_for(seed, "thm3", i);
    let graph = rejection("thm3", || {
        let n = s.gen_range(3..=12);
        let p = s.gen_range(0.15..0.7);
        let g = gnp(n, p, &mut s);
        (g.edge_count() >= n).then_some(g)
    })?;
    let r = s.gen_range(1..=3);
    Ok(Thm3Instance { graph, r })
}

/// `n ≤ 12`, no isolated vertex, `r ∈ {1, 2}`, `s ∈ {2, 3}`, and every
/// sequence of `s − 1` deletions leaves average degree ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Instance {
    pub graph: Graph,
    pub r: usize,
    pub s: usize,
    pub d: Rational,
    pub dtilde: Rational,
}

fn blocks(s: &mut Stream) -> Graph {
    let count = s.gen_range(2..=3);
    let hi = if count == 2 { 5 } else { 4 };
    let p = s.gen_range(0.5..=1.0);
    let bridge = s.gen_bool(0.5);
    let mut g = Graph::empty(0);
    let mut edges = Vec::new();
    for b in 0..count {
        let block = gnp(s.gen_range(3..=hi), p, s);
        let off = g.vertex_count();
        if bridge && b > 0 {
            edges.push((off - 1, off));
        }
        g = g.disjoint_union(&block);
    }
    edges.extend(g.edges());
    Graph::from_edges(g.vertex_count(), &edges).expect("bridges join distinct blocks")
}

pub fn lemma4_instance(seed: u64, i: usize) -> Result<Lemma4Instance> {
    let mut s = stream_for(seed, "lemma4", i);
    let r = s.gen_range(1..=2);
    let deletions = s.gen_range(1..=2);
    let two = Rational::from_integer(2);
    rejection("lemma4", || {
        let graph = if s.gen_bool(0.5) {
            let n = s.gen_range(6..=12);
            let p = s.gen_range(0.4..0.9);
            gnp(n, p, &mut s)
        } else {
            blocks(&mut s)
        };
        if graph.min_degree() == Some(0) || graph.vertex_count() <= deletions {
            return None;
        }
        let p = max_robust_params(&graph, r, deletions, RobustOptions::default()).ok()?;
        (p.d_max >= two).then(|| Lemma4Instance {
            graph,
            r,
            s: deletions + 1,
            d: p.d_max,
            dtilde: p.dtilde_min.max(p.d_max),
        })
    })
}

/// Closed walks of the unraveled ball at its root against those of the
/// ball at `v`, then the two spectral radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkComparison {
    pub tree_walks: Vec<f64>,
    pub ball_walks: Vec<f64>,
    pub tree_radius: f64,
    pub ball_radius: f64,
    pub checks: Vec<SubCheck>,
}

impl WalkComparison {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn compare_walks(g: &Graph, w: &EdgeWeights, v: usize, r: usize, k_max: usize) -> Result<WalkComparison> {
    let budget = NodeBudget::from_env();
    let tree = unraveled_ball_with(g, w, v, r, budget)?;
    let tree_walks = closed_walk_weight(tree.tree(), tree.lifted_weights(), tree.root(), k_max)?.values;
    let ball = g.ball(v, r)?;
    let local = ball.to_local(v).expect("center lies in its ball");
    let ball_walks = closed_walk_weight(&ball.graph, &w.restrict(&ball), local, k_max)?.values;
    let tree_radius = unraveled_radius(g, w, v, r, budget)?;
    let ball_r = ball_radius(g, w, v, r)?;
    let mut checks: Vec<SubCheck> = tree_walks
        .iter()
        .zip(&ball_walks)
        .enumerate()
        .map(|(i, (&t, &b))| SubCheck::new(format!("walks-2k{}", 2 * (i + 1)), b, t, Direction::AtLeast, WALK_TOL * b.abs()))
        .collect();
    checks.push(SubCheck::new("radius", ball_r, tree_radius, Direction::AtLeast, SLACK));
    Ok(WalkComparison {
        tree_walks,
        ball_walks,
        tree_radius,
        ball_radius: ball_r,
        checks,
    })
}

/// One checked instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub id: String,
    pub family: Family,
    pub index: usize,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Failed intermediate checks; for `thm3` these do not gate `pass`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    pub params: BTreeMap<String, Param>,
    pub instance: GraphDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
}

impl SuiteRow {
    fn from_verdict(family: Family, index: usize, v: BoundVerdict, instance: GraphDocument) -> Self {
        let failed_checks: Vec<String> = v.failed_checks().map(|c| c.name.clone()).collect();
        SuiteRow {
            id: format!("{}-{index:04}", family.name()),
            family,
            index,
            pass: v.gating_pass(),
            lhs: v.lhs,
            rhs: v.rhs,
            margin: v.margin,
            failed_checks,
            flags: v.flags,
            params: v.params,
            instance,
            g: None,
        }
    }
}

pub fn thm1_rows(inst: &Thm1Instance, index: usize) -> Result<Vec<SuiteRow>> {
    let doc = GraphDocument::new(&inst.graph, Some(&inst.weights));
    let v = verify_thm1(&inst.graph, &inst.weights, &inst.g, inst.r)?;
    let mut thm1 = SuiteRow::from_verdict(Family::Thm1, index, v, doc.clone());
    thm1.g = Some(inst.g.values().to_vec());
    let report = identity_suite(&inst.graph, &inst.weights, &inst.g, inst.r)?;
    Ok(vec![thm1, identity_row(&report, index, doc)])
}

fn identity_row(report: &IdentityReport, index: usize, instance: GraphDocument) -> SuiteRow {
    let worst = report.checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let mut params = BTreeMap::new();
    params.insert("r".into(), Param::Natural(report.r as u64));
    params.insert("w1".into(), Param::Natural(report.w1_size as u64));
    params.insert("forest_nodes".into(), Param::Natural(report.forest_nodes as u64));
    SuiteRow {
        id: format!("{}-{index:04}", Family::Identities.name()),
        family: Family::Identities,
        index,
        pass: report.all_pass(),
        lhs: report.quotient,
        rhs: report.bound,
        margin: -worst,
        failed_checks: report.failures().map(|c| c.name.clone()).collect(),
        flags: Vec::new(),
        params,
        instance,
        g: Some(report.g.clone()),
    }
}

pub fn lemma1_row(inst: &Lemma1Instance, index: usize) -> Result<SuiteRow> {
    let cmp = compare_walks(&inst.graph, &inst.weights, inst.v, inst.r, inst.k_max)?;
    let mut params = BTreeMap::new();
    params.insert("v".into(), Param::Natural(inst.v as u64));
    params.insert("r".into(), Param::Natural(inst.r as u64));
    params.insert("k_max".into(), Param::Natural(inst.k_max as u64));
    Ok(SuiteRow {
        id: format!("{}-{index:04}", Family::Lemma1.name()),
        family: Family::Lemma1,
        index,
        pass: cmp.pass(),
        lhs: cmp.ball_radius,
        rhs: cmp.tree_radius,
        margin: cmp.checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min),
        failed_checks: cmp.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect(),
        flags: Vec::new(),
        params,
        instance: GraphDocument::new(&inst.graph, Some(&inst.weights)),
        g: None,
    })
}

pub fn thm3_row(inst: &Thm3Instance, index: usize) -> Result<SuiteRow> {
    let v = verify_thm3(&inst.graph, inst.r)?;
    Ok(SuiteRow::from_verdict(Family::Thm3, index, v, GraphDocument::new(&inst.graph, None)))
}

pub fn lemma4_rows(inst: &Lemma4Instance, index: usize) -> Result<Vec<SuiteRow>> {
    let cert = check_robust(
        &inst.graph,
        inst.r,
        inst.d,
        inst.dtilde,
        inst.s - 1,
        RobustMode::Exhaustive,
        RobustOptions::default(),
    )?;
    let doc = GraphDocument::new(&inst.graph, None);
    let l4 = verify_lemma4(&inst.graph, inst.r, inst.s, &cert)?;
    let t2 = verify_thm2(&inst.graph, inst.r, inst.s, &cert)?;
    Ok(vec![
        SuiteRow::from_verdict(Family::Lemma4, index, l4, doc.clone()),
        SuiteRow::from_verdict(Family::Thm2, index, t2, doc),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub family: Family,
    pub instances: usize,
    pub passed: usize,
    pub min_margin: f64,
    /// Instances with at least one failed intermediate check.
    pub sub_check_failures: usize,
    pub vacuous: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub seed: u64,
    pub size: SuiteSize,
    pub all_pass: bool,
    pub summary: Vec<FamilySummary>,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Fixed-width pass/fail table, one line per family.
    pub fn table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<11} {:>9} {:>7} {:>14} {:>11} {:>8}",
            "family", "instances", "passed", "min margin", "sub-fails", "vacuous"
        )
        .unwrap();
        for s in &self.summary {
            writeln!(
                out,
                "{:<11} {:>9} {:>7} {:>14.6e} {:>11} {:>8}",
                s.family.name(),
                s.instances,
                s.passed,
                s.min_margin,
                s.sub_check_failures,
                s.vacuous
            )
            .unwrap();
        }
        write!(out, "{}", if self.all_pass { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

fn summarize(rows: &[SuiteRow]) -> Vec<FamilySummary> {
    Family::ALL
        .iter()
        .map(|&family| {
            let of: Vec<&SuiteRow> = rows.iter().filter(|r| r.family == family).collect();
            FamilySummary {
                family,
                instances: of.len(),
                passed: of.iter().filter(|r| r.pass).count(),
                min_margin: of.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
                sub_check_failures: of.iter().filter(|r| !r.failed_checks.is_empty()).count(),
                vacuous: of.iter().filter(|r| r.flags.iter().any(|f| f == "vacuous")).count(),
            }
        })
        .collect()
}

enum Task {
    Thm1(usize, Thm1Instance),
    Lemma1(usize, Lemma1Instance),
    Thm3(usize, Thm3Instance),
    Lemma4(usize, Lemma4Instance),
}

/// Runs the whole corpus. Instances are drawn first, in id order, so a bad
/// instance stops the run before any checking; with `negative_control` that
/// is the rejected weight of `thm1-0000`.
pub fn run_suite(seed: u64, size: SuiteSize, negative_control: bool) -> Result<SuiteReport> {
    let (n1, nl1, n3, n4) = size.counts();
    let mut tasks = Vec::with_capacity(n1 + nl1 + n3 + n4);
    for i in 0..n1 {
        tasks.push(Task::Thm1(i, thm1_instance_with(seed, i, negative_control && i == 0)?));
    }
    for i in 0..nl1 {
        tasks.push(Task::Lemma1(i, lemma1_instance(seed, i)?));
    }
    for i in 0..n3 {
        tasks.push(Task::Thm3(i, thm3_instance(seed, i)?));
    }
    for i in 0..n4 {
        tasks.push(Task::Lemma4(i, lemma4_instance(seed, i)?));
    }
    let results: Vec<Result<Vec<SuiteRow>>> = tasks
        .par_iter()
        .map(|t| match t {
            Task::Thm1(i, inst) => thm1_rows(inst, *i),
            Task::Lemma1(i, inst) => Ok(vec![lemma1_row(inst, *i)?]),
            Task::Thm3(i, inst) => Ok(vec![thm3_row(inst, *i)?]),
            Task::Lemma4(i, inst) => lemma4_rows(inst, *i),
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    let summary = summarize(&rows);
    Ok(SuiteReport {
        schema: SCHEMA_VERSION,
        seed,
        size,
        all_pass: rows.iter().all(|r| r.pass),
        summary,
        rows,
    })
}
