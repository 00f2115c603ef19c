//! Domains `G ⊂ R̄ⁿ` described by their boundary, and the supremum engine
//! shared by every metric.

mod chart;
mod nelder_mead;
mod supremum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended_space::{
    check_dim, chordal_raw, common_dim, dot, euclidean_distance, norm, spherical_diameter, ExtendedPoint,
};

pub use nelder_mead::{nelder_mead, NelderMeadResult};
pub use supremum::{sup_over_boundary, sup_over_boundary_pairs, SearchMode, Supremum, SupremumStrategy};

/// Minimum chordal separation between declared boundary points.
pub const MIN_BOUNDARY_SEPARATION: f64 = 1e-12;

/// A domain given by its boundary.
///
/// JSON form: `{"variant":"finite_complement","points":[[1,0],[-1,0],"inf"],"euclidean_subset":true}`,
/// `{"variant":"ball","center":[0,0],"radius":1}`,
/// `{"variant":"half_space","normal":[0,1],"offset":0}` (the set `⟨x, normal⟩ > offset`),
/// `{"variant":"boundary_cloud","points":[...],"euclidean_subset":false}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DomainSpec {
    /// `G = R̄ⁿ` minus finitely many points. With `euclidean_subset` the list
    /// always contains `∞`.
    FiniteComplement {
        points: Vec<ExtendedPoint>,
        #[serde(default)]
        euclidean_subset: bool,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// Boundary samples standing in for the whole boundary. `∞` is not added
    /// automatically; include `"inf"` for unbounded domains.
    BoundaryCloud {
        points: Vec<ExtendedPoint>,
        #[serde(default)]
        euclidean_subset: bool,
    },
}

impl DomainSpec {
    /// `R̄ⁿ` minus `points`. A Euclidean-subset declaration adds `∞` to the
    /// boundary if it is missing.
    pub fn finite_complement(mut points: Vec<ExtendedPoint>, euclidean_subset: bool) -> Result<Self> {
        if euclidean_subset && !points.iter().any(ExtendedPoint::is_infinite) {
            points.push(ExtendedPoint::Infinity);
        }
        let g = DomainSpec::FiniteComplement { points, euclidean_subset };
        g.validate()?;
        Ok(g)
    }

    /// `Rⁿ` minus finitely many points (so `∞` is a boundary point).
    pub fn punctured(points: Vec<ExtendedPoint>) -> Result<Self> {
        Self::finite_complement(points, true)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let g = DomainSpec::Ball { center, radius };
        g.validate()?;
        Ok(g)
    }

    pub fn unit_ball(n: usize) -> Self {
        DomainSpec::Ball { center: vec![0.0; n], radius: 1.0 }
    }

    /// `{x : ⟨x, normal⟩ > offset}` with a unit `normal`.
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let g = DomainSpec::HalfSpace { normal, offset };
        g.validate()?;
        Ok(g)
    }

    /// `Hⁿ = {xₙ > 0}`.
    pub fn upper_half_space(n: usize) -> Self {
        let mut normal = vec![0.0; n];
        normal[n - 1] = 1.0;
        DomainSpec::HalfSpace { normal, offset: 0.0 }
    }

    pub fn boundary_cloud(points: Vec<ExtendedPoint>, euclidean_subset: bool) -> Result<Self> {
        let g = DomainSpec::BoundaryCloud { points, euclidean_subset };
        g.validate()?;
        Ok(g)
    }

    /// Parses and validates the JSON form, normalizing as the constructors do.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DomainSpec = serde_json::from_str(s)?;
        match raw {
            DomainSpec::FiniteComplement { points, euclidean_subset } => {
                Self::finite_complement(points, euclidean_subset)
            }
            other => {
                other.validate()?;
                Ok(other)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidDomain(m));
        match self {
            DomainSpec::FiniteComplement { points, euclidean_subset }
            | DomainSpec::BoundaryCloud { points, euclidean_subset } => {
                if points.len() < 2 {
                    return invalid(format!("need at least two boundary points, got {}", points.len()));
                }
                for p in points {
                    p.validate()?;
                }
                match common_dim(points)? {
                    None => return invalid("boundary needs at least one finite point".into()),
                    Some(n) => check_dim(n)?,
                }
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        if chordal_raw(a, b) < MIN_BOUNDARY_SEPARATION {
                            return invalid(format!("boundary points {a} and {b} coincide"));
                        }
                    }
                }
                let has_inf = points.iter().any(ExtendedPoint::is_infinite);
                if matches!(self, DomainSpec::FiniteComplement { .. }) && *euclidean_subset && !has_inf {
                    return invalid("a Euclidean finite complement must list inf as a boundary point".into());
                }
                Ok(())
            }
            DomainSpec::Ball { center, radius } => {
                ExtendedPoint::finite(center.clone())?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return invalid(format!("ball radius must be positive, got {radius}"));
                }
                Ok(())
            }
            DomainSpec::HalfSpace { normal, offset } => {
                ExtendedPoint::finite(normal.clone())?;
                if (norm(normal) - 1.0).abs() > 1e-12 {
                    return invalid("half-space normal must be a unit vector".into());
                }
                if !offset.is_finite() {
                    return invalid("half-space offset must be finite".into());
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => {
                points.iter().find_map(ExtendedPoint::dim).unwrap_or(0)
            }
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::HalfSpace { normal, .. } => normal.len(),
        }
    }

    /// Whether `G` is declared as a subset of `Rⁿ`; balls and half-spaces always are.
    pub fn euclidean_subset(&self) -> bool {
        match self {
            DomainSpec::FiniteComplement { euclidean_subset, .. }
            | DomainSpec::BoundaryCloud { euclidean_subset, .. } => *euclidean_subset,
            DomainSpec::Ball { .. } | DomainSpec::HalfSpace { .. } => true,
        }
    }

    /// The boundary list for finite representations.
    pub fn boundary_points(&self) -> Option<&[ExtendedPoint]> {
        match self {
            DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => Some(points),
            _ => None,
        }
    }

    /// Whether `x` lies in the open set `G`.
    pub fn contains(&self, x: &ExtendedPoint) -> bool {
        if x.dim().is_some_and(|d| d != self.dim()) {
            return false;
        }
        match self {
            DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => {
                points.iter().all(|b| chordal_raw(x, b) >= MIN_BOUNDARY_SEPARATION)
            }
            DomainSpec::Ball { center, radius } => x.coords().is_some_and(|v| euclidean_distance(v, center) < *radius),
            DomainSpec::HalfSpace { normal, offset } => x.coords().is_some_and(|v| dot(v, normal) > *offset),
        }
    }

    /// Classical `d(x)`: Euclidean distance from `x` to the finite part of `∂G`.
    pub fn distance_to_boundary(&self, x: &ExtendedPoint) -> Result<f64> {
        if !self.euclidean_subset() {
            return Err(Error::NotEuclidean);
        }
        let v = x.coords().ok_or_else(|| Error::NotInDomain("d(x) needs a finite point".into()))?;
        if !self.contains(x) {
            return Err(Error::NotInDomain(format!("{x} is not in the domain")));
        }
        Ok(match self {
            DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => points
                .iter()
                .filter_map(ExtendedPoint::coords)
                .map(|a| euclidean_distance(v, a))
                .fold(f64::INFINITY, f64::min),
            DomainSpec::Ball { center, radius } => radius - euclidean_distance(v, center),
            DomainSpec::HalfSpace { normal, offset } => dot(v, normal) - offset,
        })
    }

    /// Chordal diameter `q(∂G)`. Exact for every variant: a sphere or
    /// hyperplane projects to a round sphere on the Riemann sphere whose
    /// diameter joins the boundary points on the line through the origin.
    pub fn boundary_diameter(&self) -> Result<f64> {
        match self {
            DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => {
                spherical_diameter(points)
            }
            DomainSpec::Ball { center, radius } => {
                let len = norm(center);
                let dir: Vec<f64> = if len > 0.0 {
                    center.iter().map(|c| c / len).collect()
                } else {
                    let mut e = vec![0.0; center.len()];
                    e[0] = 1.0;
                    e
                };
                let near = center.iter().zip(&dir).map(|(c, d)| c - radius * d).collect();
                let far = center.iter().zip(&dir).map(|(c, d)| c + radius * d).collect();
                Ok(chordal_raw(&ExtendedPoint::Finite(near), &ExtendedPoint::Finite(far)))
            }
            DomainSpec::HalfSpace { offset, .. } => Ok(1.0 / (1.0 + offset * offset).sqrt()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExtendedPoint {
        s.parse().unwrap()
    }

    #[test]
    fn contains_examples() {
        assert!(DomainSpec::unit_ball(2).contains(&p("0.5,0")));
        assert!(!DomainSpec::unit_ball(2).contains(&ExtendedPoint::Infinity));
        let g = DomainSpec::finite_complement(vec![p("0,0"), ExtendedPoint::Infinity], false).unwrap();
        assert!(!g.contains(&p("0,0")));
        assert!(g.contains(&p("1,0")));
        assert!(!DomainSpec::upper_half_space(2).contains(&p("0,-1")));
        assert!(!DomainSpec::upper_half_space(2).contains(&p("0,1,0")));
        let no_inf = DomainSpec::finite_complement(vec![p("0,0"), p("1,0")], false).unwrap();
        assert!(no_inf.contains(&ExtendedPoint::Infinity));
    }

    #[test]
    fn distance_to_boundary_examples() {
        let g = DomainSpec::punctured(vec![p("0,0")]).unwrap();
        assert_eq!(g.distance_to_boundary(&p("1,0")).unwrap(), 1.0);
        let h = DomainSpec::upper_half_space(2);
        assert_eq!(h.distance_to_boundary(&p("0,3")).unwrap(), 3.0);
        let g = DomainSpec::punctured(vec![p("-1,0"), p("1,0")]).unwrap();
        let d = g.distance_to_boundary(&p("0,0.01")).unwrap();
        assert!((d - 1.000_049_998_750_062_5).abs() < 1e-15);

        assert!(matches!(g.distance_to_boundary(&p("1,0")), Err(Error::NotInDomain(_))));
        assert!(g.distance_to_boundary(&ExtendedPoint::Infinity).is_err());
        let not_euclidean = DomainSpec::finite_complement(vec![p("0,0"), p("1,0")], false).unwrap();
        assert_eq!(not_euclidean.distance_to_boundary(&p("3,3")), Err(Error::NotEuclidean));
    }

    #[test]
    fn construction_rules() {
        let g = DomainSpec::punctured(vec![p("1,0"), p("-1,0")]).unwrap();
        assert_eq!(g.boundary_points().unwrap().len(), 3);
        assert!(DomainSpec::punctured(vec![p("1,0"), ExtendedPoint::Infinity]).is_ok());
        assert!(DomainSpec::finite_complement(vec![p("1,0")], false).is_err());
        assert!(DomainSpec::finite_complement(vec![p("1,0"), p("1,0")], false).is_err());
        assert!(DomainSpec::finite_complement(vec![p("1,0"), p("1,0,0")], false).is_err());
        assert!(DomainSpec::finite_complement(vec![ExtendedPoint::Infinity, ExtendedPoint::Infinity], false).is_err());
        assert!(DomainSpec::ball(vec![0.0, 0.0], 0.0).is_err());
        assert!(DomainSpec::half_space(vec![0.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn json_forms() {
        let g = DomainSpec::from_json(
            r#"{"variant":"finite_complement","points":[[1,0],[-1,0],"inf"],"euclidean_subset":true}"#,
        )
        .unwrap();
        assert_eq!(g, DomainSpec::punctured(vec![p("1,0"), p("-1,0")]).unwrap());
        let g = DomainSpec::from_json(r#"{"variant":"finite_complement","points":[[0,0]],"euclidean_subset":true}"#)
            .unwrap();
        assert_eq!(g.boundary_points().unwrap(), &[p("0,0"), ExtendedPoint::Infinity]);
        let b = DomainSpec::from_json(r#"{"variant":"ball","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(b, DomainSpec::unit_ball(2));
        let h = DomainSpec::from_json(r#"{"variant":"half_space","normal":[0,1],"offset":0}"#).unwrap();
        assert_eq!(h, DomainSpec::upper_half_space(2));
        assert!(DomainSpec::from_json(r#"{"variant":"ball","center":[0,0],"radius":-1}"#).is_err());
        assert!(DomainSpec::from_json(r#"{"variant":"torus"}"#).is_err());
        for g in [g, b, h] {
            assert_eq!(DomainSpec::from_json(&g.to_json()).unwrap(), g);
        }
    }

    #[test]
    fn boundary_diameters() {
        let g = DomainSpec::punctured(vec![p("0,0")]).unwrap();
        assert_eq!(g.boundary_diameter().unwrap(), 1.0);
        assert_eq!(DomainSpec::upper_half_space(3).boundary_diameter().unwrap(), 1.0);
        // Unit circle: q(-e1, e1) = 2/2 = 1.
        assert!((DomainSpec::unit_ball(2).boundary_diameter().unwrap() - 1.0).abs() < 1e-15);
        // Dense sampling never beats the analytic value for an off-center ball.
        let ball = DomainSpec::ball(vec![1.5, -0.5], 0.7).unwrap();
        let exact = ball.boundary_diameter().unwrap();
        let samples: Vec<ExtendedPoint> = (0..720)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 720.0;
                ExtendedPoint::Finite(vec![1.5 + 0.7 * t.cos(), -0.5 + 0.7 * t.sin()])
            })
            .collect();
        let sampled = spherical_diameter(&samples).unwrap();
        assert!(sampled <= exact + 1e-15 && sampled > exact - 1e-5, "{sampled} vs {exact}");
    }
}
