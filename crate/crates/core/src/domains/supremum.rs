//! Suprema of objectives over `∂G` and over ordered pairs of boundary points.
//!
//! Finite boundaries are enumerated exactly. Balls and half-spaces are
//! searched on a grid of the parametrizing sphere followed by Nelder–Mead
//! refinement from the best, mutually separated grid cells. Refinement finds
//! local maxima only, so continuous-boundary values are lower bounds.

use rayon::prelude::*;

use super::chart::{sample_spacing, sphere_samples, BoundaryChart, SphereLocal};
use super::nelder_mead::nelder_mead;
use super::DomainSpec;
use crate::error::{Error, Result};
use crate::extended_space::{euclidean_distance, ExtendedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    GridRefine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupremumStrategy {
    pub mode: SearchMode,
    /// Boundary samples for single-point objectives.
    pub grid_size: usize,
    /// Boundary samples per factor for pair objectives.
    pub pair_grid_size: usize,
    /// Termination tolerance of the local refinement, in sphere parameters.
    pub refine_tolerance: f64,
    pub multistart_count: usize,
    /// Interior point the boundary samples concentrate around.
    pub focus: Option<Vec<f64>>,
}

impl SupremumStrategy {
    pub fn exhaustive() -> Self {
        SupremumStrategy {
            mode: SearchMode::Exhaustive,
            grid_size: 0,
            pair_grid_size: 0,
            refine_tolerance: 0.0,
            multistart_count: 0,
            focus: None,
        }
    }

    /// Grid-refine defaults: 1024 samples on the circle, a 512² Fibonacci
    /// lattice on `S²`.
    pub fn grid_refine(n: usize) -> Self {
        let (grid_size, pair_grid_size) = match n {
            2 => (1024, 256),
            3 => (512 * 512, 512),
            _ => (20_000, 512),
        };
        SupremumStrategy {
            mode: SearchMode::GridRefine,
            grid_size,
            pair_grid_size,
            refine_tolerance: 1e-10,
            multistart_count: 8,
            focus: None,
        }
    }

    /// Exhaustive for finite boundary lists, grid refinement otherwise.
    pub fn default_for(g: &DomainSpec) -> Self {
        match g {
            DomainSpec::FiniteComplement { .. } | DomainSpec::BoundaryCloud { .. } => Self::exhaustive(),
            _ => Self::grid_refine(g.dim()),
        }
    }

    pub fn with_focus(mut self, focus: Vec<f64>) -> Self {
        self.focus = Some(focus);
        self
    }

    fn check(&self, g: &DomainSpec) -> Result<()> {
        let finite = g.boundary_points().is_some();
        match (self.mode, finite) {
            (SearchMode::Exhaustive, false) => {
                Err(Error::StrategyMismatch("exhaustive search needs a finite boundary list".into()))
            }
            (SearchMode::GridRefine, true) => {
                Err(Error::StrategyMismatch("finite boundary lists are enumerated exhaustively".into()))
            }
            (SearchMode::GridRefine, false) => {
                if self.grid_size < 4 || self.pair_grid_size < 4 || self.multistart_count == 0 {
                    return Err(Error::StrategyMismatch("grid sizes and multistart count are too small".into()));
                }
                if !(self.refine_tolerance > 0.0) {
                    return Err(Error::StrategyMismatch("refine tolerance must be positive".into()));
                }
                Ok(())
            }
            (SearchMode::Exhaustive, true) => Ok(()),
        }
    }
}

/// A supremum value with its maximizing witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Supremum<W> {
    pub value: f64,
    pub witness: W,
    /// `false` when the value came from local refinement and is only a lower bound.
    pub exact: bool,
}

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// `sup_{a ∈ ∂G} objective(a)`.
///
/// Exhaustive mode breaks ties toward the lowest boundary index.
pub fn sup_over_boundary<F>(
    g: &DomainSpec,
    objective: F,
    strategy: &SupremumStrategy,
) -> Result<Supremum<ExtendedPoint>>
where
    F: Fn(&ExtendedPoint) -> f64 + Sync,
{
    strategy.check(g)?;
    if let Some(points) = g.boundary_points() {
        let mut best: Option<(f64, usize)> = None;
        for (i, a) in points.iter().enumerate() {
            let v = score(objective(a));
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, i));
            }
        }
        let (value, i) = best.ok_or(Error::TooFewPoints { needed: 1, got: 0 })?;
        return Ok(Supremum { value, witness: points[i].clone(), exact: true });
    }

    let n = g.dim();
    let chart = BoundaryChart::new(g, strategy.focus.as_deref())?;
    let dirs = sphere_samples(n, strategy.grid_size);
    let values: Vec<f64> = dirs.par_iter().map(|u| score(objective(&chart.point(u)))).collect();
    let spacing = sample_spacing(n, strategy.grid_size);

    let mut order: Vec<usize> = (0..dirs.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let starts = pick_separated(&order, strategy.multistart_count, |i, j| {
        euclidean_distance(&dirs[i], &dirs[j]) >= 3.0 * spacing
    });

    let refined: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|&i| {
            let local = SphereLocal::new(&dirs[i]);
            let r = nelder_mead(
                |z| -score(objective(&chart.point(&local.point(z)))),
                &vec![0.0; local.params()],
                spacing,
                strategy.refine_tolerance,
                2000 * local.params(),
            );
            (-r.value, local.point(&r.x))
        })
        .collect();

    let mut best = (values[order[0]], dirs[order[0]].clone());
    for (v, u) in refined {
        if v > best.0 {
            best = (v, u);
        }
    }
    Ok(Supremum { value: best.0, witness: chart.point(&best.1), exact: false })
}

/// `sup_{a ≠ b ∈ ∂G} objective(a, b)` over ordered pairs.
///
/// Exhaustive mode breaks ties toward the lexicographically smallest index pair.
pub fn sup_over_boundary_pairs<F>(
    g: &DomainSpec,
    objective: F,
    strategy: &SupremumStrategy,
) -> Result<Supremum<(ExtendedPoint, ExtendedPoint)>>
where
    F: Fn(&ExtendedPoint, &ExtendedPoint) -> f64 + Sync,
{
    strategy.check(g)?;
    if let Some(points) = g.boundary_points() {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let v = score(objective(a, b));
                if best.is_none_or(|(bv, _, _)| v > bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (value, i, j) = best.ok_or(Error::TooFewPoints { needed: 2, got: points.len() })?;
        return Ok(Supremum { value, witness: (points[i].clone(), points[j].clone()), exact: true });
    }

    let n = g.dim();
    let chart = BoundaryChart::new(g, strategy.focus.as_deref())?;
    let dirs = sphere_samples(n, strategy.pair_grid_size);
    let pts: Vec<ExtendedPoint> = dirs.iter().map(|u| chart.point(u)).collect();
    let m = dirs.len();
    let values: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / m, k % m);
            if i == j {
                f64::NEG_INFINITY
            } else {
                score(objective(&pts[i], &pts[j]))
            }
        })
        .collect();
    let spacing = sample_spacing(n, strategy.pair_grid_size);

    let mut order: Vec<usize> = (0..m * m).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let starts = pick_separated(&order, strategy.multistart_count, |k, l| {
        let (a, b) = (k / m, k % m);
        let (c, d) = (l / m, l % m);
        euclidean_distance(&dirs[a], &dirs[c]).max(euclidean_distance(&dirs[b], &dirs[d])) >= 3.0 * spacing
    });

    let refined: Vec<(f64, Vec<f64>, Vec<f64>)> = starts
        .par_iter()
        .map(|&k| {
            let la = SphereLocal::new(&dirs[k / m]);
            let lb = SphereLocal::new(&dirs[k % m]);
            let split = la.params();
            let eval = |z: &[f64]| {
                let a = chart.point(&la.point(&z[..split]));
                let b = chart.point(&lb.point(&z[split..]));
                -score(objective(&a, &b))
            };
            let dim = split + lb.params();
            let r = nelder_mead(eval, &vec![0.0; dim], spacing, strategy.refine_tolerance, 2000 * dim);
            (-r.value, la.point(&r.x[..split]), lb.point(&r.x[split..]))
        })
        .collect();

    let k0 = order[0];
    let mut best = (values[k0], dirs[k0 / m].clone(), dirs[k0 % m].clone());
    for cand in refined {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    Ok(Supremum { value: best.0, witness: (chart.point(&best.1), chart.point(&best.2)), exact: false })
}

/// Greedily takes up to `count` indices from `order` (best first) that are
/// pairwise `separated`. Only the head of the ranking is scanned.
fn pick_separated<S>(order: &[usize], count: usize, separated: S) -> Vec<usize>
where
    S: Fn(usize, usize) -> bool,
{
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    for &k in order.iter().take(count * 512) {
        if chosen.len() == count {
            break;
        }
        if chosen.iter().all(|&c| separated(c, k)) {
            chosen.push(k);
        }
    }
    chosen
}
