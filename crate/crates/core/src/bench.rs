//! Scaling sweeps: time and count the checker over growing instances, fit
//! transitions against input size, and report doubling ratios.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::checker::{run_check, Backend, Query};
use crate::generators::{
    alpha_rename, gen_random_sharing_many, gen_random_term, gen_shared_power_pair, Family,
};
use crate::graph::{BuildOptions, GraphBuilder, LamGraph};
use crate::surface::compile_many;

/// Largest instance (in nodes) a sweep will build.
pub const MAX_BENCH_NODES: usize = 1 << 26;
/// Largest size accepted for the random families, which are generated and
/// compiled recursively.
pub const MAX_RANDOM_SIZE: usize = 1 << 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("size {n} would build about {nodes} nodes, over the limit of {MAX_BENCH_NODES}")]
    TooLarge { n: usize, nodes: u128 },
    #[error("random families accept sizes up to {MAX_RANDOM_SIZE}, got {0}")]
    RandomTooLarge(usize),
    #[error("bad size list {0:?}: expected e.g. 2^10..2^20, 1024,2048 or 64")]
    BadSizes(String),
}

/// Parses `2^a..2^b` (every power of two in range), `a..b` (every integer),
/// or a comma-separated list of integers and powers `2^k`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, BenchError> {
    let bad = || BenchError::BadSizes(spec.to_string());
    let one = |s: &str| -> Result<usize, BenchError> {
        let s = s.trim();
        match s.strip_prefix("2^") {
            Some(k) => k
                .parse::<u32>()
                .ok()
                .and_then(|k| 1usize.checked_shl(k))
                .ok_or_else(bad),
            None => s.parse().map_err(|_| bad()),
        }
    };
    if let Some((lo, hi)) = spec.split_once("..") {
        let (a, b) = (one(lo)?, one(hi)?);
        if a > b {
            return Err(bad());
        }
        if lo.trim().starts_with("2^") && hi.trim().starts_with("2^") {
            return Ok(std::iter::successors(Some(a), |&s| s.checked_mul(2))
                .take_while(|&s| s <= b)
                .collect());
        }
        return Ok((a..=b).collect());
    }
    let sizes = spec.split(',').map(one).collect::<Result<Vec<_>, _>>()?;
    if sizes.is_empty() {
        return Err(bad());
    }
    Ok(sizes)
}

/// Two equal instances of `family` at size `n` in one graph, and the query
/// relating their roots.
pub fn bench_instance(family: Family, n: usize, seed: u64) -> Result<(LamGraph, Query), BenchError> {
    let estimate: u128 = match family {
        Family::SharedPower => 2 * n as u128 + 1,
        Family::UnsharedTree => {
            if n >= 64 {
                u128::MAX
            } else {
                2u128 << n
            }
        }
        Family::RandomTerm | Family::RandomDag => {
            if n > MAX_RANDOM_SIZE {
                return Err(BenchError::RandomTooLarge(n));
            }
            2 * n as u128
        }
    };
    if estimate > MAX_BENCH_NODES as u128 {
        return Err(BenchError::TooLarge { n, nodes: estimate });
    }
    Ok(match family {
        Family::SharedPower => {
            let (g, a, b) = gen_shared_power_pair(n);
            (g, Query::single(a, b))
        }
        Family::UnsharedTree => {
            let mut builder = GraphBuilder::new();
            let x = builder.free_var("x");
            let mut roots = [x; 2];
            for root in &mut roots {
                let mut level = vec![x; 1usize << n];
                while level.len() > 1 {
                    level = level.chunks(2).map(|p| builder.app(p[0], p[1])).collect();
                }
                *root = level[0];
            }
            let g = builder.build(BuildOptions::default()).expect("trees are λ-graphs");
            (g, Query::single(roots[0], roots[1]))
        }
        Family::RandomTerm | Family::RandomDag => {
            let t = gen_random_term(n.max(1), seed);
            let u = alpha_rename(&t);
            let (g, roots) = if family == Family::RandomDag {
                gen_random_sharing_many(&[&t, &u], seed ^ 0x9e37_79b9)
            } else {
                compile_many(&[&t, &u]).expect("generated terms compile")
            };
            (g, Query::single(roots[0], roots[1]))
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub nodes: usize,
    pub edges: usize,
    pub query_pairs: usize,
    pub transitions: u64,
    pub max_query_edges: usize,
    /// Best wall time of one check, in seconds.
    pub seconds: f64,
    pub equal: bool,
}

impl BenchRow {
    pub fn input_size(&self) -> usize {
        self.nodes + self.edges + self.query_pairs
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares `c` in `transitions ≈ c · (|N| + |E| + |Q|)`.
    pub slope: f64,
    /// `‖t − c·s‖ / ‖t‖` over the rows.
    pub relative_residual: f64,
    /// Time ratios between consecutive rows whose sizes double.
    pub doubling_ratios: Vec<f64>,
    pub median_doubling_ratio: Option<f64>,
}

/// Checks the instance repeatedly and keeps the fastest run; repeats until
/// `min_total` has elapsed, at least `min_runs` times.
pub fn time_check(
    g: &LamGraph,
    q: &Query,
    backend: Backend,
    min_runs: usize,
    min_total: Duration,
) -> (crate::checker::CheckReport, Duration) {
    let mut best = Duration::MAX;
    let mut report = None;
    let started = Instant::now();
    let mut runs = 0;
    while runs < min_runs || started.elapsed() < min_total {
        let t = Instant::now();
        let r = run_check(g, q, backend);
        best = best.min(t.elapsed());
        report = Some(r);
        runs += 1;
    }
    (report.expect("at least one run"), best)
}

pub fn least_squares_through_origin(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c * x).powi(2)).sum();
    let norm: f64 = ys.iter().map(|y| y * y).sum();
    let rel = if norm > 0.0 { (res / norm).sqrt() } else { 0.0 };
    (c, rel)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

impl SweepReport {
    pub fn from_rows(rows: Vec<BenchRow>) -> Self {
        let xs: Vec<f64> = rows.iter().map(|r| r.input_size() as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.transitions as f64).collect();
        let (slope, relative_residual) = least_squares_through_origin(&xs, &ys);
        let doubling_ratios: Vec<f64> = rows
            .windows(2)
            .filter(|w| w[1].n == 2 * w[0].n && w[0].seconds > 0.0)
            .map(|w| w[1].seconds / w[0].seconds)
            .collect();
        let median_doubling_ratio = median(&doubling_ratios);
        SweepReport {
            rows,
            slope,
            relative_residual,
            doubling_ratios,
            median_doubling_ratio,
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>10} {:>10} {:>10} {:>4} {:>12} {:>12} {:>6}\n",
            "n", "nodes", "edges", "|Q|", "transitions", "time (ms)", "ratio"
        );
        let mut prev: Option<&BenchRow> = None;
        for r in &self.rows {
            let ratio = match prev {
                Some(p) if r.n == 2 * p.n && p.seconds > 0.0 => format!("{:.2}", r.seconds / p.seconds),
                _ => "-".into(),
            };
            out += &format!(
                "{:>10} {:>10} {:>10} {:>4} {:>12} {:>12.3} {:>6}\n",
                r.n,
                r.nodes,
                r.edges,
                r.query_pairs,
                r.transitions,
                r.seconds * 1e3,
                ratio
            );
            prev = Some(r);
        }
        out += &format!(
            "fit: transitions = {:.4} * (|N|+|E|+|Q|), relative residual {:.3e}\n",
            self.slope, self.relative_residual
        );
        if let Some(m) = self.median_doubling_ratio {
            out += &format!("median doubling ratio: {m:.3}\n");
        }
        out
    }
}

/// Runs one row per size. Every size is validated against the limits before
/// anything is built.
pub fn run_sweep(
    family: Family,
    sizes: &[usize],
    backend: Backend,
    seed: u64,
) -> Result<SweepReport, BenchError> {
    for &n in sizes {
        if family == Family::SharedPower && 2 * n as u128 + 1 > MAX_BENCH_NODES as u128 {
            return Err(BenchError::TooLarge {
                n,
                nodes: 2 * n as u128 + 1,
            });
        }
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (g, q) = bench_instance(family, n, seed)?;
        let (report, best) = time_check(&g, &q, backend, 5, Duration::from_millis(60));
        let s = report.stats;
        rows.push(BenchRow {
            n,
            nodes: s.nodes,
            edges: s.edges,
            query_pairs: s.query_pairs,
            transitions: s.transitions,
            max_query_edges: s.max_query_edges,
            seconds: best.as_secs_f64(),
            equal: report.is_equal(),
        });
    }
    Ok(SweepReport::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("2^2..2^5").unwrap(), vec![4, 8, 16, 32]);
        assert_eq!(parse_sizes("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_sizes("1024, 2^11").unwrap(), vec![1024, 2048]);
        assert_eq!(parse_sizes("0").unwrap(), vec![0]);
        assert!(parse_sizes("2^5..2^2").is_err());
        assert!(parse_sizes("big").is_err());
    }

    #[test]
    fn refuses_huge_instances() {
        assert!(matches!(
            run_sweep(Family::SharedPower, &[10, 1 << 26], Backend::Queue, 0),
            Err(BenchError::TooLarge { .. })
        ));
        assert!(bench_instance(Family::UnsharedTree, 30, 0).is_err());
        assert!(bench_instance(Family::RandomDag, MAX_RANDOM_SIZE + 1, 0).is_err());
    }

    #[test]
    fn zero_size_sweep() {
        let r = run_sweep(Family::SharedPower, &[0], Backend::Queue, 0).unwrap();
        assert!(r.rows[0].equal);
        assert_eq!(r.rows[0].nodes, 1);
    }

    #[test]
    fn transitions_double_with_the_input() {
        let r = run_sweep(Family::SharedPower, &[1 << 10, 1 << 11], Backend::Queue, 0).unwrap();
        assert!(r.rows.iter().all(|row| row.equal));
        let ratio = r.rows[1].transitions as f64 / r.rows[0].transitions as f64;
        assert!((1.8..=2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn all_families_check_equal() {
        for family in [Family::SharedPower, Family::UnsharedTree, Family::RandomTerm, Family::RandomDag] {
            let r = run_sweep(family, &[4, 8], Backend::Recursive, 7).unwrap();
            assert!(r.rows.iter().all(|row| row.equal), "{family:?}");
        }
    }

    #[test]
    fn fit_statistics() {
        let (c, rel) = least_squares_through_origin(&[1.0, 2.0, 4.0], &[3.0, 6.0, 12.0]);
        assert!((c - 3.0).abs() < 1e-12 && rel < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[1.0, 2.0]), Some(1.5));
        assert_eq!(median(&[]), None);
    }
}
