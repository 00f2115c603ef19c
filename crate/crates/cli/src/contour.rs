//! Level curves `{y : d(center, y) = r}` of a metric in the plane, traced by
//! bisection along rays from the center.
//!
//! Along each ray the search steps outward, never farther than half the
//! Euclidean distance to the nearest boundary point, until the metric first
//! reaches `r`, then bisects. This finds the first crossing of the level on
//! every ray. It is the whole contour when the metric ball is star-shaped
//! about its center.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use relmetric::domains::{DomainSpec, SupremumStrategy};
use relmetric::extended_space::euclidean_distance;
use relmetric::metrics::{self, MetricRequest};
use relmetric::{ExtendedPoint, Result};

/// Rays farther out than this are reported as unbounded.
pub const T_MAX: f64 = 1e8;
pub const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ContourRow {
    pub theta: f64,
    /// `None` when the level is not reached along the ray.
    pub point: Option<[f64; 2]>,
}

/// Euclidean distance from `v` to the boundary, counting only finite
/// boundary points for finite boundaries. `∞` for an all-infinite boundary.
fn wall_distance(g: &DomainSpec, v: &[f64]) -> f64 {
    match g.boundary_points() {
        Some(pts) => {
            pts.iter().filter_map(|p| p.coords()).map(|c| euclidean_distance(c, v)).fold(f64::INFINITY, f64::min)
        }
        None => g.distance_to_boundary(&ExtendedPoint::Finite(v.to_vec())).unwrap_or(0.0),
    }
}

struct Ray<'a> {
    g: &'a DomainSpec,
    req: &'a MetricRequest,
    center: &'a ExtendedPoint,
    origin: [f64; 2],
    dir: [f64; 2],
    strategy: &'a SupremumStrategy,
}

impl Ray<'_> {
    fn at(&self, t: f64) -> [f64; 2] {
        [self.origin[0] + t * self.dir[0], self.origin[1] + t * self.dir[1]]
    }

    /// `d(center, y(t)) − r`, with points off the domain counting as beyond the level.
    fn excess(&self, t: f64, r: f64) -> Result<f64> {
        let y = ExtendedPoint::Finite(self.at(t).to_vec());
        if !self.g.contains(&y) {
            return Ok(f64::INFINITY);
        }
        Ok(metrics::compute(self.g, self.req, self.center, &y, self.strategy)?.value - r)
    }
}

/// `resolution` contour rows at angles `2πk / resolution`.
pub fn trace_contour(
    g: &DomainSpec,
    req: &MetricRequest,
    center: &ExtendedPoint,
    r: f64,
    resolution: usize,
    strategy: &SupremumStrategy,
) -> Result<Vec<ContourRow>> {
    let c = center.coords().expect("center is finite");
    let origin = [c[0], c[1]];
    let scale = 1.0 + euclidean_distance(c, &[0.0, 0.0]);
    let t0 = 1e-6 * scale.min(wall_distance(g, c).max(1e-300));
    let mut rows = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let theta = TAU * k as f64 / resolution as f64;
        let ray = Ray { g, req, center, origin, dir: [theta.cos(), theta.sin()], strategy };
        rows.push(ContourRow { theta, point: first_crossing(&ray, r, t0)?.map(|t| ray.at(t)) });
    }
    Ok(rows)
}

fn first_crossing(ray: &Ray<'_>, r: f64, t0: f64) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (0.0, t0);
    loop {
        if ray.excess(hi, r)? >= 0.0 {
            break;
        }
        if hi > T_MAX {
            return Ok(None);
        }
        lo = hi;
        let step = (0.5 * wall_distance(ray.g, &ray.at(hi))).min(0.5 * hi).max(t0 * 1e-3);
        hi += step;
    }
    while hi - lo > BISECTION_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if ray.excess(mid, r)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// CSV with header `theta,x1,x2`; unbounded rows read `theta,inf,inf`.
pub fn to_csv(rows: &[ContourRow]) -> String {
    let mut out = String::from("theta,x1,x2\n");
    for row in rows {
        match row.point {
            Some([a, b]) => writeln!(out, "{},{},{}", row.theta, a, b),
            None => writeln!(out, "{},inf,inf", row.theta),
        }
        .expect("writing to a string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use relmetric::MetricId;

    #[test]
    fn half_plane_j_circle_through_two_e2() {
        let g = DomainSpec::upper_half_space(2);
        let req = MetricRequest::new(MetricId::J);
        let c: ExtendedPoint = "0,1".parse().unwrap();
        let rows = trace_contour(&g, &req, &c, 2f64.ln(), 4, &SupremumStrategy::exhaustive()).unwrap();
        assert_eq!(rows.len(), 4);
        let up = rows[1].point.unwrap();
        assert!(up[0].abs() < 1e-12 && (up[1] - 2.0).abs() < 1e-8, "{up:?}");
        let down = rows[3].point.unwrap();
        assert!((down[1] - 0.5).abs() < 1e-8, "{down:?}");
    }

    #[test]
    fn bounded_metric_gives_unbounded_rows() {
        // With ∞ inside the domain the metric stays bounded along every ray.
        let g = DomainSpec::finite_complement(vec!["0,0".parse().unwrap(), "1,0".parse().unwrap()], false).unwrap();
        let req = MetricRequest::new(MetricId::Rho);
        let c: ExtendedPoint = "0.5,1".parse().unwrap();
        let rows = trace_contour(&g, &req, &c, 50.0, 3, &SupremumStrategy::exhaustive()).unwrap();
        assert!(rows.iter().all(|r| r.point.is_none()));
        assert!(to_csv(&rows).lines().nth(1).unwrap().ends_with(",inf,inf"));
    }
}
