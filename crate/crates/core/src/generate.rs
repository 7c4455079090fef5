//! Seeded graph and weight generators.
//!
//! Spec strings are colon separated: `cycle:6`, `path:5`, `complete:4`,
//! `petersen`, `star:3`, `gnp:10:0.5`, `random-regular:10:3`, and for
//! weights `uniform:0.5:2`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::rng::{self, Stream};

/// Rejection-sampling budget of `gnp` with `connected` and of
/// `random-regular`.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphSpec {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Petersen,
    Star(usize),
    Gnp { n: usize, p: f64, connected: bool },
    RandomRegular { n: usize, d: usize },
}

fn field<T: FromStr>(parts: &[&str], i: usize, text: &str) -> Result<T> {
    parts
        .get(i)
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::input(format!("malformed generator spec {text:?}")))
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let arity = |k: usize| {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(Error::input(format!("{} takes {k} argument(s): {text:?}", parts[0])))
            }
        };
        let spec = match parts[0].trim() {
            "cycle" => {
                arity(1)?;
                GraphSpec::Cycle(field(&parts, 1, text)?)
            }
            "path" => {
                arity(1)?;
                GraphSpec::Path(field(&parts, 1, text)?)
            }
            "complete" => {
                arity(1)?;
                GraphSpec::Complete(field(&parts, 1, text)?)
            }
            "petersen" => {
                arity(0)?;
                GraphSpec::Petersen
            }
            "star" => {
                arity(1)?;
                GraphSpec::Star(field(&parts, 1, text)?)
            }
            "gnp" => {
                arity(2)?;
                GraphSpec::Gnp {
                    n: field(&parts, 1, text)?,
                    p: field(&parts, 2, text)?,
                    connected: false,
                }
            }
            "random-regular" => {
                arity(2)?;
                GraphSpec::RandomRegular {
                    n: field(&parts, 1, text)?,
                    d: field(&parts, 2, text)?,
                }
            }
            other => return Err(Error::input(format!("unknown generator {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Path(n) => write!(f, "path:{n}"),
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::Petersen => write!(f, "petersen"),
            GraphSpec::Star(n) => write!(f, "star:{n}"),
            GraphSpec::Gnp { n, p, .. } => write!(f, "gnp:{n}:{p}"),
            GraphSpec::RandomRegular { n, d } => write!(f, "random-regular:{n}:{d}"),
        }
    }
}

pub fn generate(spec: &GraphSpec, seed: u64) -> Result<Graph> {
    match *spec {
        GraphSpec::Cycle(n) => Graph::cycle(n),
        GraphSpec::Path(n) => Ok(Graph::path(n)),
        GraphSpec::Complete(n) => Ok(Graph::complete(n)),
        GraphSpec::Petersen => Ok(Graph::petersen()),
        GraphSpec::Star(n) => Ok(Graph::star(n)),
        GraphSpec::Gnp { n, p, connected } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::input(format!("edge probability {p} is outside [0, 1]")));
            }
            let mut s = rng::stream(seed, "gnp");
            if !connected {
                return Ok(gnp(n, p, &mut s));
            }
            for _ in 0..MAX_ATTEMPTS {
                let g = gnp(n, p, &mut s);
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::resource(format!(
                "no connected gnp:{n}:{p} in {MAX_ATTEMPTS} attempts"
            )))
        }
        GraphSpec::RandomRegular { n, d } => random_regular(n, d, &mut rng::stream(seed, "random-regular")),
    }
}

/// Each of the `n(n−1)/2` pairs independently with probability `p`.
pub fn gnp(n: usize, p: f64, s: &mut Stream) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if s.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("pairs are simple")
}

/// Pairing model: shuffle `n·d` half-edges, pair them up, reject loops and
/// multi-edges.
pub fn random_regular(n: usize, d: usize, s: &mut Stream) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(Error::input(format!("n·d = {} is odd", n * d)));
    }
    if d >= n.max(1) && !(n == 0 || d == 0) {
        return Err(Error::input(format!("degree {d} needs more than {n} vertices")));
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        points.shuffle(s);
        let mut edges: Vec<(usize, usize)> = points
            .chunks(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        if edges.iter().any(|&(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                continue 'attempt;
            }
        }
        return Graph::from_edges(n, &edges);
    }
    Err(Error::resource(format!(
        "no simple {d}-regular pairing on {n} vertices in {MAX_ATTEMPTS} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Uniform { lo: f64, hi: f64 },
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        match (parts[0].trim(), parts.len()) {
            ("uniform", 3) => {
                let (lo, hi): (f64, f64) = (field(&parts, 1, text)?, field(&parts, 2, text)?);
                if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                    return Err(Error::input(format!("need 0 < lo ≤ hi, got {text:?}")));
                }
                Ok(WeightSpec::Uniform { lo, hi })
            }
            _ => Err(Error::input(format!("malformed weight spec {text:?}"))),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

/// One weight per edge in edge order.
pub fn generate_weights(g: &Graph, spec: &WeightSpec, seed: u64) -> Result<EdgeWeights> {
    let mut s = rng::stream(seed, "weights");
    match *spec {
        WeightSpec::Uniform { lo, hi } => {
            let values = (0..g.edge_count()).map(|_| s.gen_range(lo..=hi)).collect();
            EdgeWeights::from_edge_values(g, values)
        }
    }
}

/// A draw from `(0, hi]`.
pub fn open_closed(s: &mut Stream, hi: f64) -> f64 {
    hi * (1.0 - s.gen::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for text in ["cycle:6", "path:5", "complete:4", "petersen", "star:3", "gnp:10:0.5", "random-regular:10:3"] {
            let spec: GraphSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        for bad in ["cycle", "cycle:x", "gnp:10", "hypercube:3", "petersen:1"] {
            assert!(matches!(bad.parse::<GraphSpec>(), Err(Error::Input(_))), "{bad}");
        }
        assert!("uniform:0:1".parse::<WeightSpec>().is_err());
        assert!("uniform:2:1".parse::<WeightSpec>().is_err());
        assert_eq!("uniform:0.5:2".parse::<WeightSpec>().unwrap(), WeightSpec::Uniform { lo: 0.5, hi: 2.0 });
    }

    #[test]
    fn named_families() {
        assert_eq!(generate(&GraphSpec::Cycle(6), 0).unwrap(), Graph::cycle(6).unwrap());
        assert_eq!(generate(&GraphSpec::Complete(4), 0).unwrap(), Graph::complete(4));
        assert_eq!(generate(&GraphSpec::Petersen, 9).unwrap(), Graph::petersen());
    }

    #[test]
    fn gnp_is_deterministic() {
        let spec = GraphSpec::Gnp { n: 10, p: 0.5, connected: false };
        let a = generate(&spec, 7).unwrap();
        assert_eq!(a, generate(&spec, 7).unwrap());
        assert_ne!(a, generate(&spec, 8).unwrap());
        let c = generate(&GraphSpec::Gnp { n: 12, p: 0.3, connected: true }, 7).unwrap();
        assert!(c.is_connected());
        assert!(matches!(
            generate(&GraphSpec::Gnp { n: 12, p: 0.0, connected: true }, 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn regular_pairing() {
        for seed in 0..5 {
            let g = generate(&GraphSpec::RandomRegular { n: 10, d: 3 }, seed).unwrap();
            assert!(g.degrees().iter().all(|&d| d == 3));
        }
        assert!(matches!(
            generate(&GraphSpec::RandomRegular { n: 7, d: 3 }, 0),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            generate(&GraphSpec::RandomRegular { n: 4, d: 4 }, 0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn weights_in_range_and_seeded() {
        let g = Graph::petersen();
        let spec = WeightSpec::Uniform { lo: 0.5, hi: 2.0 };
        let w = generate_weights(&g, &spec, 3).unwrap();
        assert!(w.values().iter().all(|&x| (0.5..=2.0).contains(&x)));
        assert_eq!(w, generate_weights(&g, &spec, 3).unwrap());
    }
}
