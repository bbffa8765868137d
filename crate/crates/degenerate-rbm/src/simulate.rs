//! Euler scheme for the degenerate gap process with exact two-dimensional
//! reflection, time-averaged Laplace estimates and local-time histograms.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::density::integrate;
use crate::error::{Error, Result};
use crate::model::{to_float, ModelParams};

/// Solves `g = y + R dL`, `g >= 0`, `dL >= 0`, `g_i dL_i = 0` with
/// `R = [[1, r2], [r1, 1]]`. Cases are tried in the order interior, face 1,
/// face 2, corner.
pub fn reflect_step(y: (f64, f64), r1: f64, r2: f64) -> Result<((f64, f64), (f64, f64))> {
    let (y1, y2) = y;
    if y1 >= 0.0 && y2 >= 0.0 {
        return Ok(((y1, y2), (0.0, 0.0)));
    }
    if y1 < 0.0 {
        let l1 = -y1;
        let g2 = y2 + r1 * l1;
        if g2 >= 0.0 {
            return Ok(((0.0, g2), (l1, 0.0)));
        }
    }
    if y2 < 0.0 {
        let l2 = -y2;
        let g1 = y1 + r2 * l2;
        if g1 >= 0.0 {
            return Ok(((g1, 0.0), (0.0, l2)));
        }
    }
    let det = 1.0 - r1 * r2;
    if det != 0.0 {
        let l1 = (-y1 + r2 * y2) / det;
        let l2 = (-y2 + r1 * y1) / det;
        if l1 >= 0.0 && l2 >= 0.0 {
            return Ok(((0.0, 0.0), (l1, l2)));
        }
    }
    Err(Error::NoSolution(y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Estimator {
    TimeAverage,
    EnsembleAtHorizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub dt: f64,
    pub horizon: f64,
    pub burn_in: f64,
    pub paths: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub grid: Vec<(f64, f64)>,
    pub bins: usize,
    pub blocks: usize,
    pub start: (f64, f64),
}

impl SimConfig {
    pub fn new(params: ModelParams) -> Self {
        let axis = [-2.0, -1.25, -0.5];
        let grid = axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect();
        SimConfig {
            params,
            dt: 1e-4,
            horizon: 2000.0,
            burn_in: 200.0,
            paths: 1,
            seed: 0,
            estimator: Estimator::TimeAverage,
            grid,
            bins: 200,
            blocks: 30,
            start: (0.0, 0.0),
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self.burn_in = horizon / 10.0;
        self
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.horizon) {
            return bad("burn-in must lie in [0, horizon)");
        }
        if self.paths == 0 || self.blocks == 0 || self.bins == 0 {
            return bad("paths, blocks and bins must be positive");
        }
        let report = self.params.validate();
        if !report.passed() {
            return Err(Error::Hypothesis(report));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplaceEstimate {
    pub x: f64,
    pub y: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Local-time-weighted histogram of the opposite coordinate, per unit time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub upper: f64,
    pub weights: Vec<f64>,
    pub tail: f64,
    #[serde(skip)]
    pub block_weights: Vec<Vec<f64>>,
    #[serde(skip)]
    pub block_tails: Vec<f64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        self.upper / self.weights.len() as f64
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.tail
    }

    pub fn csv(&self) -> String {
        let w = self.bin_width();
        let mut s = String::from("lower,upper,weight\n");
        for (i, v) in self.weights.iter().enumerate() {
            writeln!(s, "{:.16e},{:.16e},{v:.16e}", i as f64 * w, (i + 1) as f64 * w).unwrap();
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalSummary {
    pub laplace_grid: Vec<LaplaceEstimate>,
    pub boundary_histogram1: Histogram,
    pub boundary_histogram2: Histogram,
    pub total_local_time1: f64,
    pub total_local_time2: f64,
    pub steps: u64,
    pub paths: usize,
}

struct PathOutput {
    sums: Vec<Vec<f64>>,
    counts: Vec<u64>,
    terminal: Vec<f64>,
    events1: Vec<(f64, f64, u32)>,
    events2: Vec<(f64, f64, u32)>,
}

fn run_path(cfg: &SimConfig, index: u64) -> Result<PathOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let p = &cfg.params;
    let (m1, m2) = (to_float(&p.mu1), to_float(&p.mu2));
    let (s1, s2) = (to_float(&p.sigma1), to_float(&p.sigma2));
    let (r1, r2) = (to_float(&p.r1), to_float(&p.r2));
    let sq = cfg.dt.sqrt();
    let steps = (cfg.horizon / cfg.dt).round() as u64;
    let burn = (cfg.burn_in / cfg.dt).round() as u64;
    let kept = (steps - burn).max(1);
    let nb = cfg.blocks;
    let mut sums = vec![vec![0.0; cfg.grid.len()]; nb];
    let mut counts = vec![0u64; nb];
    let mut events1 = Vec::new();
    let mut events2 = Vec::new();
    let (mut g1, mut g2) = cfg.start;
    for k in 0..steps {
        let xi: f64 = StandardNormal.sample(&mut rng);
        let free = (g1 - m1 * cfg.dt + s1 * xi * sq, g2 - m2 * cfg.dt - s2 * xi * sq);
        let ((n1, n2), (l1, l2)) = reflect_step(free, r1, r2)?;
        g1 = n1;
        g2 = n2;
        if k >= burn {
            let b = ((k - burn) as u128 * nb as u128 / kept as u128) as usize;
            counts[b] += 1;
            if cfg.estimator == Estimator::TimeAverage {
                for (acc, &(x, y)) in sums[b].iter_mut().zip(&cfg.grid) {
                    *acc += (x * g1 + y * g2).exp();
                }
            }
            if l1 > 0.0 {
                events1.push((g2, l1, b as u32));
            }
            if l2 > 0.0 {
                events2.push((g1, l2, b as u32));
            }
        }
    }
    let terminal = cfg.grid.iter().map(|&(x, y)| (x * g1 + y * g2).exp()).collect();
    Ok(PathOutput { sums, counts, terminal, events1, events2 })
}

fn weighted_quantile(events: &[(f64, f64, u32)], q: f64) -> f64 {
    let mut v: Vec<(f64, f64)> = events.iter().map(|e| (e.0, e.1)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = v.iter().map(|e| e.1).sum();
    let mut acc = 0.0;
    for (x, w) in &v {
        acc += w;
        if acc >= q * total {
            return *x;
        }
    }
    v.last().map_or(1.0, |e| e.0)
}

fn histogram(events: &[(f64, f64, u32)], bins: usize, blocks: usize, time: f64, block_time: f64) -> Histogram {
    let mut upper = weighted_quantile(events, 0.999);
    if !(upper > 0.0) {
        upper = 1.0;
    }
    let w = upper / bins as f64;
    let mut weights = vec![0.0; bins];
    let mut tail = 0.0;
    let mut block_weights = vec![vec![0.0; bins]; blocks];
    let mut block_tails = vec![0.0; blocks];
    for &(x, l, b) in events {
        let i = (x / w) as usize;
        if i < bins {
            weights[i] += l;
            block_weights[b as usize][i] += l;
        } else {
            tail += l;
            block_tails[b as usize] += l;
        }
    }
    weights.iter_mut().for_each(|v| *v /= time);
    tail /= time;
    block_weights.iter_mut().flatten().for_each(|v| *v /= block_time);
    block_tails.iter_mut().for_each(|v| *v /= block_time);
    Histogram { upper, weights, tail, block_weights, block_tails }
}

/// Runs the simulation; paths are independent and results do not depend on
/// scheduling.
pub fn simulate(cfg: &SimConfig) -> Result<EmpiricalSummary> {
    cfg.check()?;
    let outs: Vec<PathOutput> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|i| run_path(cfg, i))
        .collect::<Result<_>>()?;
    let nb = cfg.blocks;
    let mut means: Vec<Vec<f64>> = Vec::new();
    let mut totals = vec![0.0; cfg.grid.len()];
    let mut count = 0u64;
    for o in &outs {
        for b in 0..nb {
            if o.counts[b] > 0 {
                means.push(o.sums[b].iter().map(|s| s / o.counts[b] as f64).collect());
            }
            for (t, s) in totals.iter_mut().zip(&o.sums[b]) {
                *t += s;
            }
            count += o.counts[b];
        }
    }
    let laplace_grid = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(j, &(x, y))| {
            let (estimate, stderr) = match cfg.estimator {
                Estimator::TimeAverage => {
                    let m = totals[j] / count as f64;
                    (m, stderr_of(means.iter().map(|v| v[j])))
                }
                Estimator::EnsembleAtHorizon => {
                    let vals: Vec<f64> = outs.iter().map(|o| o.terminal[j]).collect();
                    let m = vals.iter().sum::<f64>() / vals.len() as f64;
                    (m, stderr_of(vals.into_iter()))
                }
            };
            LaplaceEstimate { x, y, estimate, stderr }
        })
        .collect();
    let time = count as f64 * cfg.dt;
    let block_time = time / (nb * cfg.paths) as f64;
    let merge = |f: fn(&PathOutput) -> &Vec<(f64, f64, u32)>| -> Vec<(f64, f64, u32)> {
        outs.iter().flat_map(|o| f(o).iter().copied()).collect()
    };
    let e1 = merge(|o| &o.events1);
    let e2 = merge(|o| &o.events2);
    let h1 = histogram(&e1, cfg.bins, nb, time, block_time * cfg.paths as f64);
    let h2 = histogram(&e2, cfg.bins, nb, time, block_time * cfg.paths as f64);
    Ok(EmpiricalSummary {
        laplace_grid,
        total_local_time1: h1.total(),
        total_local_time2: h2.total(),
        boundary_histogram1: h1,
        boundary_histogram2: h2,
        steps: count,
        paths: cfg.paths,
    })
}

fn stderr_of(vals: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.collect();
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryComparison {
    pub l1: f64,
    pub sup_z: f64,
    pub z: Vec<f64>,
}

/// Compares a histogram, rescaled to unit mass, with a density rescaled to
/// unit mass.
pub fn compare_empirical_boundary<F: Fn(f64) -> Result<f64>>(
    hist: &Histogram,
    density: &F,
    mass: f64,
) -> Result<BoundaryComparison> {
    let w = hist.bin_width();
    let n = hist.weights.len();
    let total = hist.total();
    let mut probs = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (i as f64 * w, (i + 1) as f64 * w);
        let f = |v: f64| if v > 0.0 { density(v) } else { Ok(0.0) };
        probs.push(integrate(&f, a, b, 1e-10)? / mass);
    }
    let p_tail = 1.0 - probs.iter().sum::<f64>();
    let mut l1 = (hist.tail / total - p_tail).abs();
    let blocks = hist.block_weights.len();
    let block_totals: Vec<f64> = (0..blocks)
        .map(|b| hist.block_weights[b].iter().sum::<f64>() + hist.block_tails[b])
        .collect();
    let mut z = Vec::with_capacity(n);
    let mut sup_z: f64 = 0.0;
    for (i, &expected) in probs.iter().enumerate() {
        let p = hist.weights[i] / total;
        l1 += (p - expected).abs();
        let se = stderr_of(
            (0..blocks)
                .filter(|&b| block_totals[b] > 0.0)
                .map(|b| hist.block_weights[b][i] / block_totals[b]),
        );
        let zi = if se > 0.0 { (p - expected) / se } else { 0.0 };
        sup_z = sup_z.max(zi.abs());
        z.push(zi);
    }
    Ok(BoundaryComparison { l1, sup_z, z })
}
