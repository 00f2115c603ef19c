//! Seeded random configurations on finite-complement domains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::extended_space::{chordal_raw, ExtendedPoint};
use crate::mobius::random_box;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Boundary cardinality range, `∞` included when present.
    pub min_points: usize,
    pub max_points: usize,
    /// Finite points are drawn uniformly from `[−w, w]ⁿ`.
    pub box_half_width: f64,
    /// Minimum chordal distance between any two generated points.
    pub min_separation: f64,
    pub max_retries: usize,
    /// Chance that `∞` is one of the boundary points.
    pub infinity_probability: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            min_points: 2,
            max_points: 6,
            box_half_width: 3.0,
            min_separation: 1e-4,
            max_retries: 100,
            infinity_probability: 0.5,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.min_points >= 2
            && self.max_points >= self.min_points
            && self.box_half_width > 0.0
            && self.box_half_width.is_finite()
            && self.min_separation >= 0.0
            && self.max_retries >= 1
            && (0.0..=1.0).contains(&self.infinity_probability);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("invalid generator parameters {self:?}")))
        }
    }
}

/// Random stream for case `index` of a run seeded with `seed`. Streams are
/// independent of each other, so the result of a case does not depend on
/// which worker runs it or in what order.
pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A finite boundary set together with sample points of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub boundary: Vec<ExtendedPoint>,
    pub points: Vec<ExtendedPoint>,
}

impl Configuration {
    /// `R̄ⁿ ∖ boundary`.
    pub fn domain(&self) -> Result<DomainSpec> {
        let euclidean = self.boundary.iter().any(ExtendedPoint::is_infinite);
        DomainSpec::finite_complement(self.boundary.clone(), euclidean)
    }

    /// `Rⁿ ∖ boundary`, i.e. the same boundary with `∞` added.
    pub fn euclidean_domain(&self) -> Result<DomainSpec> {
        DomainSpec::finite_complement(self.boundary.clone(), true)
    }
}

fn separated(p: &ExtendedPoint, others: &[ExtendedPoint], sep: f64) -> bool {
    others.iter().all(|o| chordal_raw(p, o) >= sep)
}

fn random_point<R: Rng>(rng: &mut R, dim: usize, w: f64) -> ExtendedPoint {
    ExtendedPoint::Finite(random_box(rng, dim, w))
}

/// Draws a boundary set of at least `min_boundary` points and `interior`
/// finite points of the complement, all pairwise separated. Each rejected
/// draw starts over; after `max_retries` rejections the call fails.
pub fn random_configuration<R: Rng>(
    rng: &mut R,
    dim: usize,
    params: &GeneratorParams,
    interior: usize,
    min_boundary: usize,
) -> Result<Configuration> {
    let lo = params.min_points.max(min_boundary);
    let hi = params.max_points.max(lo);
    let w = params.box_half_width;
    let sep = params.min_separation;
    'attempt: for _ in 0..params.max_retries {
        let count = rng.random_range(lo..=hi);
        let with_infinity = rng.random_bool(params.infinity_probability);
        let mut boundary = Vec::with_capacity(count);
        if with_infinity {
            boundary.push(ExtendedPoint::Infinity);
        }
        while boundary.len() < count {
            let p = random_point(rng, dim, w);
            if !separated(&p, &boundary, sep) {
                continue 'attempt;
            }
            boundary.push(p);
        }
        let mut points: Vec<ExtendedPoint> = Vec::with_capacity(interior);
        while points.len() < interior {
            let p = random_point(rng, dim, w);
            if !separated(&p, &boundary, sep) || !separated(&p, &points, sep) {
                continue 'attempt;
            }
            points.push(p);
        }
        return Ok(Configuration { boundary, points });
    }
    Err(Error::GenerationFailed(params.max_retries))
}

/// `count` pairwise separated finite points.
pub fn random_separated_points<R: Rng>(
    rng: &mut R,
    dim: usize,
    params: &GeneratorParams,
    count: usize,
) -> Result<Vec<ExtendedPoint>> {
    'attempt: for _ in 0..params.max_retries {
        let mut pts: Vec<ExtendedPoint> = Vec::with_capacity(count);
        while pts.len() < count {
            let p = random_point(rng, dim, params.box_half_width);
            if !separated(&p, &pts, params.min_separation) {
                continue 'attempt;
            }
            pts.push(p);
        }
        return Ok(pts);
    }
    Err(Error::GenerationFailed(params.max_retries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let params = GeneratorParams::default();
        let a = random_configuration(&mut case_rng(5, 3), 3, &params, 2, 2).unwrap();
        let b = random_configuration(&mut case_rng(5, 3), 3, &params, 2, 2).unwrap();
        let c = random_configuration(&mut case_rng(5, 4), 3, &params, 2, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn configurations_respect_the_parameters() {
        let params = GeneratorParams::default();
        let mut saw_infinity = [false, false];
        for i in 0..300 {
            let cfg = random_configuration(&mut case_rng(11, i), 2, &params, 3, 3).unwrap();
            assert!((3..=6).contains(&cfg.boundary.len()));
            assert_eq!(cfg.points.len(), 3);
            let g = cfg.domain().unwrap();
            assert!(cfg.points.iter().all(|p| g.contains(p)));
            for (k, p) in cfg.boundary.iter().enumerate() {
                assert!(separated(p, &cfg.boundary[k + 1..], 1e-4));
            }
            let inf = cfg.boundary.iter().any(ExtendedPoint::is_infinite);
            saw_infinity[inf as usize] = true;
            assert_eq!(g.euclidean_subset(), inf);
            assert!(cfg.euclidean_domain().unwrap().euclidean_subset());
        }
        assert_eq!(saw_infinity, [true, true]);
    }

    #[test]
    fn impossible_separation_fails_after_retries() {
        let params = GeneratorParams { min_separation: 2.0, max_retries: 7, ..Default::default() };
        let err = random_configuration(&mut case_rng(1, 0), 2, &params, 2, 2).unwrap_err();
        assert_eq!(err, Error::GenerationFailed(7));
        assert!(GeneratorParams { min_points: 1, ..Default::default() }.validate().is_err());
    }
}
