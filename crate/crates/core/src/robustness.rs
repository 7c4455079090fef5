//! Robust average degree: certify or refute `(r, d, d̃, s)`-robustness by
//! enumerating (or sampling) sequences of radius-`r` ball deletions.
//!
//! By default the `i`-th ball is measured in the graph surviving the first
//! `i − 1` deletions. [`BallMetric::Original`] measures every ball in the
//! input graph instead and intersects it with the survivors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{average_degree, second_order_average_degree, Graph, InducedSubgraph};
use crate::rng;
use crate::scalar::{rational_text, Rational};

pub const DEFAULT_MAX_SEQUENCES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallMetric {
    #[default]
    Current,
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustMode {
    Exhaustive,
    Sampled { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RobustOptions {
    pub metric: BallMetric,
    /// Exhaustive enumeration aborts with a resource error beyond this many
    /// deletion sequences.
    pub max_sequences: u64,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions {
            metric: BallMetric::Current,
            max_sequences: DEFAULT_MAX_SEQUENCES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustStatus {
    CertifiedExhaustive,
    CertifiedSampled,
    Refuted,
}

/// One deletion: the center in the ids of the graph it was deleted from,
/// and in the ids of the input graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionStep {
    pub center_current: usize,
    pub center_original: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCertificate {
    pub schema: u32,
    pub graph_digest: String,
    pub r: usize,
    pub s: usize,
    #[serde(with = "rational_text")]
    pub required_d: Rational,
    #[serde(with = "rational_text")]
    pub required_dtilde: Rational,
    pub metric: BallMetric,
    pub status: RobustStatus,
    /// For a refutation, the first violating sequence in enumeration order;
    /// otherwise a sequence attaining the smallest remainder average degree.
    /// Shorter than `s` when the graph ran out of vertices.
    pub worst_sequence: Vec<DeletionStep>,
    /// Vertices of the remainder left by `worst_sequence`, original ids.
    pub worst_remainder: Vec<usize>,
    /// `None` once some sequence leaves the empty graph.
    #[serde(with = "rational_text::option")]
    pub achieved_min_avg_degree: Option<Rational>,
    /// Largest `d̃` over remainders that have edges.
    #[serde(with = "rational_text::option")]
    pub achieved_max_second_order: Option<Rational>,
    pub empty_remainder_seen: bool,
    pub sequences_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RobustnessCertificate {
    pub fn is_certified(&self) -> bool {
        self.status != RobustStatus::Refuted
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Degree statistics of a remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemainderStats {
    pub vertices: Vec<usize>,
    pub average: Option<Rational>,
    pub second_order: Option<Rational>,
}

impl RemainderStats {
    fn of(rem: &InducedSubgraph) -> Self {
        RemainderStats {
            vertices: rem.original.clone(),
            average: average_degree(&rem.graph).ok(),
            second_order: second_order_average_degree(&rem.graph).ok(),
        }
    }

    /// Empty remainders fail; `d̃` is only constrained when there are edges.
    pub fn satisfies(&self, d: Rational, dtilde: Rational) -> bool {
        match self.average {
            None => false,
            Some(a) => a >= d && self.second_order.is_none_or(|q| q <= dtilde),
        }
    }
}

fn delete(
    input: &Graph,
    cur: &InducedSubgraph,
    center: usize,
    r: usize,
    metric: BallMetric,
) -> Result<InducedSubgraph> {
    match metric {
        BallMetric::Current => Ok(cur.compose(cur.graph.delete_ball(center, r)?)),
        BallMetric::Original => {
            let dist = input.distances_from(cur.to_parent(center), Some(r))?;
            let keep: Vec<usize> = cur
                .graph
                .vertices()
                .filter(|&x| dist[cur.to_parent(x)].is_none())
                .collect();
            Ok(cur.compose(cur.graph.induced_subgraph(&keep)?))
        }
    }
}

/// Depth-first enumeration of every deletion sequence of length `s` (or
/// until the graph is exhausted), centers in ascending current id.
fn enumerate(
    g: &Graph,
    r: usize,
    s: usize,
    opts: RobustOptions,
    visit: &mut dyn FnMut(&[DeletionStep], &InducedSubgraph),
) -> Result<u64> {
    fn rec(
        g: &Graph,
        cur: &InducedSubgraph,
        r: usize,
        left: usize,
        opts: RobustOptions,
        seq: &mut Vec<DeletionStep>,
        count: &mut u64,
        visit: &mut dyn FnMut(&[DeletionStep], &InducedSubgraph),
    ) -> Result<()> {
        if left == 0 || cur.graph.is_empty() {
            *count += 1;
            if *count > opts.max_sequences {
                return Err(Error::resource(format!(
                    "more than {} deletion sequences; use sampled mode",
                    opts.max_sequences
                )));
            }
            visit(seq, cur);
            return Ok(());
        }
        for c in cur.graph.vertices() {
            let next = delete(g, cur, c, r, opts.metric)?;
            seq.push(DeletionStep {
                center_current: c,
                center_original: cur.to_parent(c),
            });
            rec(g, &next, r, left - 1, opts, seq, count, visit)?;
            seq.pop();
        }
        Ok(())
    }
    let mut count = 0;
    rec(g, &InducedSubgraph::whole(g), r, s, opts, &mut Vec::new(), &mut count, visit)?;
    Ok(count)
}

struct Tally {
    d: Rational,
    dtilde: Rational,
    min_avg: Option<Rational>,
    empty_seen: bool,
    max_second: Option<Rational>,
    worst: Option<(Vec<DeletionStep>, Vec<usize>)>,
    worst_avg: Option<Option<Rational>>,
    violation: Option<(Vec<DeletionStep>, Vec<usize>)>,
}

impl Tally {
    fn new(d: Rational, dtilde: Rational) -> Self {
        Tally {
            d,
            dtilde,
            min_avg: None,
            empty_seen: false,
            max_second: None,
            worst: None,
            worst_avg: None,
            violation: None,
        }
    }

    fn record(&mut self, seq: &[DeletionStep], rem: &InducedSubgraph) {
        let stats = RemainderStats::of(rem);
        match stats.average {
            None => self.empty_seen = true,
            Some(a) => self.min_avg = Some(self.min_avg.map_or(a, |m| m.min(a))),
        }
        if let Some(q) = stats.second_order {
            self.max_second = Some(self.max_second.map_or(q, |m| m.max(q)));
        }
        // `None` (empty) ranks below every average
        let worse = match (&self.worst_avg, stats.average) {
            (None, _) => true,
            (Some(None), _) => false,
            (Some(Some(_)), None) => true,
            (Some(Some(best)), Some(a)) => a < *best,
        };
        if worse {
            self.worst_avg = Some(stats.average);
            self.worst = Some((seq.to_vec(), stats.vertices.clone()));
        }
        if self.violation.is_none() && !stats.satisfies(self.d, self.dtilde) {
            self.violation = Some((seq.to_vec(), stats.vertices));
        }
    }

    fn certificate(
        self,
        g: &Graph,
        r: usize,
        s: usize,
        metric: BallMetric,
        examined: u64,
        seed: Option<u64>,
    ) -> RobustnessCertificate {
        let status = match (&self.violation, seed) {
            (Some(_), _) => RobustStatus::Refuted,
            (None, None) => RobustStatus::CertifiedExhaustive,
            (None, Some(_)) => RobustStatus::CertifiedSampled,
        };
        let (worst_sequence, worst_remainder) = self
            .violation
            .or(self.worst)
            .unwrap_or_default();
        RobustnessCertificate {
            schema: 1,
            graph_digest: g.digest(),
            r,
            s,
            required_d: self.d,
            required_dtilde: self.dtilde,
            metric,
            status,
            worst_sequence,
            worst_remainder,
            achieved_min_avg_degree: if self.empty_seen { None } else { self.min_avg },
            achieved_max_second_order: self.max_second,
            empty_remainder_seen: self.empty_seen,
            sequences_examined: examined,
            seed,
        }
    }
}

/// Certifies or refutes that every sequence of `s` radius-`r` ball deletions
/// leaves average degree `≥ d` and second order average degree `≤ d̃`.
pub fn check_robust(
    g: &Graph,
    r: usize,
    d: Rational,
    dtilde: Rational,
    s: usize,
    mode: RobustMode,
    opts: RobustOptions,
) -> Result<RobustnessCertificate> {
    if s == 0 {
        return Err(Error::input("robustness needs at least one deletion (s ≥ 1)"));
    }
    let mut tally = Tally::new(d, dtilde);
    match mode {
        RobustMode::Exhaustive => {
            let examined = enumerate(g, r, s, opts, &mut |seq, rem| tally.record(seq, rem))?;
            Ok(tally.certificate(g, r, s, opts.metric, examined, None))
        }
        RobustMode::Sampled { seed, trials } => {
            if trials == 0 {
                return Err(Error::input("sampled robustness check needs at least one trial"));
            }
            let mut rng = rng::stream(seed, "robust-sampled");
            let mut seq = Vec::with_capacity(s);
            for _ in 0..trials {
                seq.clear();
                let mut cur = InducedSubgraph::whole(g);
                while seq.len() < s && !cur.graph.is_empty() {
                    let c = rng.gen_range(0..cur.graph.vertex_count());
                    seq.push(DeletionStep {
                        center_current: c,
                        center_original: cur.to_parent(c),
                    });
                    cur = delete(g, &cur, c, r, opts.metric)?;
                }
                tally.record(&seq, &cur);
            }
            Ok(tally.certificate(g, r, s, opts.metric, trials, Some(seed)))
        }
    }
}

/// Re-executes a certificate's `worst_sequence` on `g`.
pub fn replay(g: &Graph, cert: &RobustnessCertificate) -> Result<RemainderStats> {
    if cert.graph_digest != g.digest() {
        return Err(Error::precondition("certificate was issued for a different graph"));
    }
    let mut cur = InducedSubgraph::whole(g);
    for (i, step) in cert.worst_sequence.iter().enumerate() {
        if cur.to_local(step.center_original) != Some(step.center_current) {
            return Err(Error::precondition(format!(
                "step {} of the certificate names vertex {} (current id {}), which does not match",
                i + 1,
                step.center_original,
                step.center_current
            )));
        }
        cur = delete(g, &cur, step.center_current, cert.r, cert.metric)?;
    }
    Ok(RemainderStats::of(&cur))
}

/// Outcome of deleting single balls: the smallest remainder average degree,
/// or the first center whose ball swallows the whole graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RobustDegree {
    Value {
        #[serde(with = "rational_text")]
        degree: Rational,
        center: usize,
    },
    /// Some deletion leaves nothing: the graph has no `r`-robust average
    /// degree `≥ d` for any `d`.
    EmptyRemainder { center: Option<usize> },
}

impl RobustDegree {
    pub fn value(&self) -> Option<Rational> {
        match self {
            RobustDegree::Value { degree, .. } => Some(*degree),
            RobustDegree::EmptyRemainder { .. } => None,
        }
    }
}

/// `min_v average_degree(G − G(v, r))`.
pub fn r_robust_average_degree(g: &Graph, r: usize) -> Result<RobustDegree> {
    if g.is_empty() {
        return Ok(RobustDegree::EmptyRemainder { center: None });
    }
    let mut best: Option<(Rational, usize)> = None;
    for v in g.vertices() {
        match average_degree(&g.delete_ball(v, r)?.graph) {
            Err(_) => return Ok(RobustDegree::EmptyRemainder { center: Some(v) }),
            Ok(a) => {
                if best.is_none_or(|(b, _)| a < b) {
                    best = Some((a, v));
                }
            }
        }
    }
    let (degree, center) = best.expect("nonempty graph");
    Ok(RobustDegree::Value { degree, center })
}

/// The tightest `(d, d̃)` for which `g` is `(r, d, d̃, s)`-robust.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustParams {
    #[serde(with = "rational_text")]
    pub d_max: Rational,
    /// Largest remainder `d̃`; 0 when every remainder is edgeless.
    #[serde(with = "rational_text")]
    pub dtilde_min: Rational,
    pub sequences: u64,
}

pub fn max_robust_params(g: &Graph, r: usize, s: usize, opts: RobustOptions) -> Result<RobustParams> {
    if s == 0 {
        return Err(Error::input("robustness needs at least one deletion (s ≥ 1)"));
    }
    let mut tally = Tally::new(Rational::from_integer(0), Rational::from_integer(0));
    let sequences = enumerate(g, r, s, opts, &mut |seq, rem| tally.record(seq, rem))?;
    if tally.empty_seen {
        return Err(Error::domain(
            "some deletion sequence empties the graph, so no average degree is certifiable",
        ));
    }
    Ok(RobustParams {
        d_max: tally.min_avg.expect("at least one nonempty remainder"),
        dtilde_min: tally.max_second.unwrap_or_default(),
        sequences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn exhaustive(g: &Graph, r: usize, d: Rational, dt: Rational, s: usize) -> RobustnessCertificate {
        check_robust(g, r, d, dt, s, RobustMode::Exhaustive, RobustOptions::default()).unwrap()
    }

    #[test]
    fn single_ball_goldens() {
        let c6 = Graph::cycle(6).unwrap();
        assert_eq!(
            r_robust_average_degree(&c6, 1).unwrap().value(),
            Some(q(4, 3))
        );
        assert_eq!(
            r_robust_average_degree(&Graph::petersen(), 1).unwrap().value(),
            Some(q(2, 1))
        );
        assert_eq!(
            r_robust_average_degree(&Graph::complete(4), 1).unwrap(),
            RobustDegree::EmptyRemainder { center: Some(0) }
        );
    }

    #[test]
    fn petersen_certifies() {
        let cert = exhaustive(&Graph::petersen(), 1, q(2, 1), q(2, 1), 1);
        assert_eq!(cert.status, RobustStatus::CertifiedExhaustive);
        assert_eq!(cert.sequences_examined, 10);
        assert_eq!(cert.achieved_min_avg_degree, Some(q(2, 1)));
        assert_eq!(cert.achieved_max_second_order, Some(q(2, 1)));
    }

    #[test]
    fn cycle_refuted_by_path_remainder() {
        let c6 = Graph::cycle(6).unwrap();
        let cert = exhaustive(&c6, 1, q(2, 1), q(2, 1), 1);
        assert_eq!(cert.status, RobustStatus::Refuted);
        assert_eq!(cert.worst_remainder, vec![2, 3, 4]);
        let stats = replay(&c6, &cert).unwrap();
        assert_eq!(stats.average, Some(q(4, 3)));
        assert!(!stats.satisfies(q(2, 1), q(2, 1)));
    }

    #[test]
    fn empty_remainder_refutes() {
        let k4 = Graph::complete(4);
        let cert = exhaustive(&k4, 1, q(2, 1), q(3, 1), 1);
        assert_eq!(cert.status, RobustStatus::Refuted);
        assert!(cert.empty_remainder_seen);
        assert_eq!(cert.achieved_min_avg_degree, None);
        assert!(replay(&k4, &cert).unwrap().average.is_none());
        assert!(max_robust_params(&k4, 1, 1, RobustOptions::default()).is_err());
    }

    #[test]
    fn tightest_parameters() {
        let p = max_robust_params(&Graph::petersen(), 1, 1, RobustOptions::default()).unwrap();
        assert_eq!((p.d_max, p.dtilde_min), (q(2, 1), q(2, 1)));
        let c8 = Graph::cycle(8).unwrap();
        let p = max_robust_params(&c8, 1, 1, RobustOptions::default()).unwrap();
        assert_eq!((p.d_max, p.dtilde_min), (q(8, 5), q(7, 4)));
        let cert = exhaustive(&c8, 1, p.d_max, p.dtilde_min, 1);
        assert!(cert.is_certified());
    }

    #[test]
    fn sampled_mode() {
        let g = Graph::petersen();
        let mode = RobustMode::Sampled { seed: 3, trials: 25 };
        let a = check_robust(&g, 1, q(2, 1), q(2, 1), 2, mode, RobustOptions::default()).unwrap();
        let b = check_robust(&g, 1, q(2, 1), q(2, 1), 2, mode, RobustOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.status, RobustStatus::CertifiedExhaustive);
        assert_eq!(a.sequences_examined, 25);
        let zero = RobustMode::Sampled { seed: 3, trials: 0 };
        assert!(matches!(
            check_robust(&g, 1, q(2, 1), q(2, 1), 1, zero, RobustOptions::default()),
            Err(Error::Input(_))
        ));
        assert!(check_robust(&g, 1, q(2, 1), q(2, 1), 0, RobustMode::Exhaustive, RobustOptions::default()).is_err());
    }

    #[test]
    fn sequence_cap() {
        let opts = RobustOptions {
            max_sequences: 50,
            ..RobustOptions::default()
        };
        let g = Graph::cycle(12).unwrap();
        let err = check_robust(&g, 1, q(1, 1), q(3, 1), 3, RobustMode::Exhaustive, opts).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn original_metric_sees_through_deleted_hub() {
        // hub 2 joins 3 and 4, which are otherwise 4 apart along 3-5-6-7-4
        let g = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (2, 4), (3, 5), (5, 6), (6, 7), (4, 7)],
        )
        .unwrap();
        let whole = InducedSubgraph::whole(&g);
        let first = delete(&g, &whole, 0, 2, BallMetric::Current).unwrap();
        assert_eq!(first.original, vec![3, 4, 5, 6, 7]);
        let a = first.to_local(3).unwrap();
        let cur = delete(&g, &first, a, 2, BallMetric::Current).unwrap();
        let orig = delete(&g, &first, a, 2, BallMetric::Original).unwrap();
        assert_eq!(cur.original, vec![4, 7]);
        assert_eq!(orig.original, vec![7]);
    }

    #[test]
    fn second_order_requirement_is_not_monotone_in_s() {
        let g = Graph::from_edges(
            7,
            &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5), (5, 6)],
        )
        .unwrap();
        let (d, dtilde) = (q(0, 1), q(15, 4));
        assert!(exhaustive(&g, 0, d, dtilde, 2).is_certified());
        let one = exhaustive(&g, 0, d, dtilde, 1);
        assert_eq!(one.status, RobustStatus::Refuted);
        assert_eq!(replay(&g, &one).unwrap().second_order, Some(q(19, 5)));
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = exhaustive(&Graph::cycle(8).unwrap(), 1, q(8, 5), q(7, 4), 1);
        let back = RobustnessCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(cert.to_json().contains("\"8/5\""));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..9, proptest::collection::vec(any::<bool>(), 36)).prop_map(|(n, mask)| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mask[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn extremes_certify_and_replay(g in arb_graph(), r in 0usize..3, s in 1usize..3) {
            if let Ok(p) = max_robust_params(&g, r, s, RobustOptions::default()) {
                let cert = exhaustive(&g, r, p.d_max, p.dtilde_min, s);
                prop_assert!(cert.is_certified());
                prop_assert_eq!(cert.achieved_min_avg_degree, Some(p.d_max));
                prop_assert_eq!(replay(&g, &cert).unwrap().average, Some(p.d_max));
                let tighter = exhaustive(&g, r, p.d_max + q(1, 1000), p.dtilde_min, s);
                prop_assert_eq!(tighter.status, RobustStatus::Refuted);
                let stats = replay(&g, &tighter).unwrap();
                prop_assert!(!stats.satisfies(tighter.required_d, tighter.required_dtilde));
            }
        }

        #[test]
        fn degree_certification_is_monotone_in_s(g in arb_graph(), r in 0usize..3, dn in 0i64..13) {
            let (d, dtilde) = (q(dn, 4), q(1000, 1));
            let c2 = exhaustive(&g, r, d, dtilde, 2);
            if c2.is_certified() {
                prop_assert!(exhaustive(&g, r, d, dtilde, 1).is_certified());
            }
        }

        #[test]
        fn single_deletion_agrees_with_robust_degree(g in arb_graph(), r in 0usize..3) {
            let single = r_robust_average_degree(&g, r).unwrap();
            let params = max_robust_params(&g, r, 1, RobustOptions::default());
            prop_assert_eq!(single.value(), params.ok().map(|p| p.d_max));
        }
    }
}
