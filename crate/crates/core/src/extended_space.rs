//! Points of the one-point compactification `R̄ⁿ = Rⁿ ∪ {∞}`, the chordal
//! metric, absolute cross-ratios and the inverse hyperbolic functions.
//!
//! Cross-ratios of finite points are evaluated with Euclidean distances. When
//! an argument is `∞` the two distance factors that contain it are dropped,
//! which is the exact limit of the chordal quotient.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;

/// Largest admissible coordinate magnitude. Squared norms of larger values
/// overflow `f64`.
pub const COORD_CAP: f64 = 1e100;

/// A point of `R̄ⁿ`: a finite coordinate vector or the single point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedPoint {
    Finite(Vec<f64>),
    Infinity,
}

impl ExtendedPoint {
    /// Validating constructor for a finite point.
    pub fn finite(coords: Vec<f64>) -> Result<Self> {
        check_dim(coords.len())?;
        if let Some(&bad) = coords.iter().find(|c| !c.is_finite() || c.abs() > COORD_CAP) {
            return Err(Error::CoordinateOutOfRange(bad));
        }
        Ok(ExtendedPoint::Finite(coords))
    }

    pub fn origin(n: usize) -> Self {
        ExtendedPoint::Finite(vec![0.0; n])
    }

    /// The standard basis point `e_{k+1}` of `Rⁿ` (zero-based `k`).
    pub fn basis(n: usize, k: usize) -> Self {
        Self::scaled_basis(n, k, 1.0)
    }

    /// `t · e_{k+1}`.
    pub fn scaled_basis(n: usize, k: usize, t: f64) -> Self {
        let mut v = vec![0.0; n];
        v[k] = t;
        ExtendedPoint::Finite(v)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            ExtendedPoint::Finite(v) => Some(v),
            ExtendedPoint::Infinity => None,
        }
    }

    /// Dimension of a finite point; `None` for `∞`, which lives in every `R̄ⁿ`.
    pub fn dim(&self) -> Option<usize> {
        self.coords().map(<[f64]>::len)
    }

    /// Re-checks the invariants of a point built through the public variants.
    pub fn validate(&self) -> Result<()> {
        match self {
            ExtendedPoint::Finite(v) => Self::finite(v.clone()).map(|_| ()),
            ExtendedPoint::Infinity => Ok(()),
        }
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Dimension shared by a set of points; `∞` is compatible with any dimension.
pub(crate) fn common_dim<'a>(points: impl IntoIterator<Item = &'a ExtendedPoint>) -> Result<Option<usize>> {
    let mut dim = None;
    for p in points {
        if let Some(d) = p.dim() {
            match dim {
                None => dim = Some(d),
                Some(e) if e != d => return Err(Error::DimensionMismatch(e, d)),
                _ => {}
            }
        }
    }
    Ok(dim)
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Infinity => f.write_str("inf"),
            ExtendedPoint::Finite(v) => {
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ExtendedPoint {
    type Err = Error;

    /// Point literal: comma-separated reals (`"0.5,0"`) or the token `"inf"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(ExtendedPoint::Infinity);
        }
        let coords = t
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidPointLiteral(s.to_string()))?;
        Self::finite(coords)
    }
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedPoint::Infinity => serializer.serialize_str("inf"),
            ExtendedPoint::Finite(v) => {
                let mut seq = serializer.serialize_seq(Some(v.len()))?;
                for c in v {
                    seq.serialize_element(c)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;

        impl<'de> Visitor<'de> for PointVisitor {
            type Value = ExtendedPoint;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of reals or the string \"inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedPoint, E> {
                if v.eq_ignore_ascii_case("inf") {
                    Ok(ExtendedPoint::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ExtendedPoint, A::Error> {
                let mut coords = Vec::with_capacity(seq.size_hint().unwrap_or(2));
                while let Some(c) = seq.next_element::<f64>()? {
                    coords.push(c);
                }
                ExtendedPoint::finite(coords).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(PointVisitor)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Euclidean distance `|a − b|`.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_pair(x: &ExtendedPoint, y: &ExtendedPoint) -> Result<()> {
    if let (Some(a), Some(b)) = (x.dim(), y.dim()) {
        if a != b {
            return Err(Error::DimensionMismatch(a, b));
        }
    }
    Ok(())
}

/// Chordal distance `q(x, y)` of the Riemann-sphere projection.
pub fn chordal_distance(x: &ExtendedPoint, y: &ExtendedPoint) -> Result<f64> {
    check_pair(x, y)?;
    Ok(chordal_raw(x, y))
}

pub(crate) fn chordal_raw(x: &ExtendedPoint, y: &ExtendedPoint) -> f64 {
    use ExtendedPoint::*;
    match (x, y) {
        (Infinity, Infinity) => 0.0,
        (Finite(a), Infinity) | (Infinity, Finite(a)) => 1.0 / (1.0 + norm_sq(a)).sqrt(),
        (Finite(a), Finite(b)) => euclidean_distance(a, b) / ((1.0 + norm_sq(a)).sqrt() * (1.0 + norm_sq(b)).sqrt()),
    }
}

/// One factor `|u − v|` of a cross-ratio. `None` means the factor contains
/// exactly one `∞` and cancels against its partner.
#[inline]
fn factor(u: &ExtendedPoint, v: &ExtendedPoint) -> Option<f64> {
    use ExtendedPoint::*;
    match (u, v) {
        (Finite(a), Finite(b)) => Some(euclidean_distance(a, b)),
        (Infinity, Infinity) => Some(0.0),
        _ => None,
    }
}

/// Absolute cross-ratio `|a,b,c,d| = q(a,c) q(b,d) / (q(a,b) q(c,d))`.
pub fn cross_ratio(a: &ExtendedPoint, b: &ExtendedPoint, c: &ExtendedPoint, d: &ExtendedPoint) -> Result<f64> {
    common_dim([a, b, c, d])?;
    if a == b {
        return Err(Error::DegenerateCrossRatio("a = b"));
    }
    if c == d {
        return Err(Error::DegenerateCrossRatio("c = d"));
    }
    Ok(cross_ratio_raw(a, b, c, d))
}

/// Unchecked cross-ratio for hot loops. Every point occurs once in the
/// numerator and once in the denominator, so the `∞` factors always pair up.
#[inline]
pub(crate) fn cross_ratio_raw(a: &ExtendedPoint, b: &ExtendedPoint, c: &ExtendedPoint, d: &ExtendedPoint) -> f64 {
    let num1 = factor(a, c);
    let num2 = factor(b, d);
    if num1 == Some(0.0) || num2 == Some(0.0) {
        return 0.0;
    }
    let num = num1.unwrap_or(1.0) * num2.unwrap_or(1.0);
    let den = factor(a, b).unwrap_or(1.0) * factor(c, d).unwrap_or(1.0);
    num / den
}

/// `arch(1 + w)` for `w ≥ 0`, accurate for small `w`.
pub fn arch_1p(w: f64) -> Result<f64> {
    if !(w >= 0.0) {
        return Err(Error::ArgumentOutOfRange { function: "arch", value: 1.0 + w });
    }
    Ok(arch_1p_raw(w))
}

#[inline]
pub(crate) fn arch_1p_raw(w: f64) -> f64 {
    if w > 1e150 {
        // w(w + 2) would overflow; arch(t) = log(2t) to double precision here.
        w.ln() + std::f64::consts::LN_2
    } else {
        (w + (w * (w + 2.0)).sqrt()).ln_1p()
    }
}

/// Inverse hyperbolic cosine, `t ≥ 1`.
pub fn arch(t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::ArgumentOutOfRange { function: "arch", value: t });
    }
    Ok(arch_1p_raw(t - 1.0))
}

/// Inverse hyperbolic sine, `t ≥ 0`.
pub fn arsh(t: f64) -> Result<f64> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::ArgumentOutOfRange { function: "arsh", value: t });
    }
    if t > 1e150 {
        return Ok(t.ln() + std::f64::consts::LN_2);
    }
    Ok((t + t * t / (1.0 + (1.0 + t * t).sqrt())).ln_1p())
}

/// Chordal diameter of a finite point set, `max q(u, v)` over pairs.
pub fn spherical_diameter(points: &[ExtendedPoint]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    common_dim(points)?;
    let mut best = 0.0f64;
    for (i, u) in points.iter().enumerate() {
        for v in &points[i + 1..] {
            best = best.max(chordal_raw(u, v));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ExtendedPoint {
        s.parse().unwrap()
    }

    #[test]
    fn chordal_examples() {
        let inf = ExtendedPoint::Infinity;
        assert_eq!(chordal_distance(&p("0,0"), &inf).unwrap(), 1.0);
        assert!((chordal_distance(&p("1,0"), &p("-1,0")).unwrap() - 1.0).abs() < 1e-15);
        let h = chordal_distance(&p("0,0"), &p("1,0")).unwrap();
        assert!((h - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(chordal_distance(&inf, &inf).unwrap(), 0.0);
    }

    #[test]
    fn chordal_rejects_mixed_dimensions() {
        assert_eq!(chordal_distance(&p("0,0"), &p("0,0,0")), Err(Error::DimensionMismatch(2, 3)));
    }

    #[test]
    fn cross_ratio_examples() {
        let inf = ExtendedPoint::Infinity;
        let v = cross_ratio(&inf, &p("1,0"), &p("0,0"), &p("2,0")).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = cross_ratio(&p("0,0"), &p("1,0"), &p("2,0"), &p("3,0")).unwrap();
        assert!((v - 4.0).abs() < 1e-15);
        let v = cross_ratio(&p("1,2"), &p("3,0"), &p("1,2"), &p("0,5")).unwrap();
        assert_eq!(v, 0.0);
        assert!(cross_ratio(&p("1,0"), &p("1,0"), &p("2,0"), &p("3,0")).is_err());
        assert!(cross_ratio(&p("1,0"), &p("0,0"), &inf, &inf).is_err());
    }

    #[test]
    fn cross_ratio_limit_form_matches_chordal_form() {
        let pts = [p("0.3,-1.2"), p("2,0.5"), p("-1,-1")];
        let inf = ExtendedPoint::Infinity;
        let chordal = |a: &ExtendedPoint, b: &ExtendedPoint, c: &ExtendedPoint, d: &ExtendedPoint| {
            chordal_raw(a, c) * chordal_raw(b, d) / (chordal_raw(a, b) * chordal_raw(c, d))
        };
        let quads = [
            [&inf, &pts[0], &pts[1], &pts[2]],
            [&pts[0], &inf, &pts[1], &pts[2]],
            [&pts[0], &pts[1], &inf, &pts[2]],
            [&pts[0], &pts[1], &pts[2], &inf],
            [&inf, &pts[0], &pts[1], &inf],
        ];
        for [a, b, c, d] in quads {
            let lhs = cross_ratio(a, b, c, d).unwrap();
            let rhs = chordal(a, b, c, d);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn arch_values() {
        assert_eq!(arch(1.0).unwrap(), 0.0);
        let expected = (3.0 + 2.0 * 2f64.sqrt()).ln();
        assert!((arch(3.0).unwrap() - expected).abs() < 1e-15);
        for x in [1.0f64, 2.0, 10.0] {
            let s = arch(x).unwrap().sinh();
            assert!((s - (x * x - 1.0).sqrt()).abs() <= 1e-14 * x);
        }
        assert!(arch(0.5).is_err());
        assert!(arch(f64::NAN).is_err());
        assert!(arsh(-1.0).is_err());
        assert_eq!(arsh(0.0).unwrap(), 0.0);
    }

    #[test]
    fn arch_near_one_keeps_relative_accuracy() {
        // arch(1 + w) = 2 arsh(sqrt(w / 2)); the right side has no cancellation.
        for k in 4..=15 {
            let w = 10f64.powi(-k);
            let reference = 2.0 * (w / 2.0).sqrt().asinh();
            let got = arch_1p(w).unwrap();
            assert!((got - reference).abs() <= 1e-12 * reference, "w={w}: {got} vs {reference}");
        }
    }

    #[test]
    fn arch_and_arsh_invert_cosh_and_sinh() {
        let mut t = 1.0f64;
        while t <= 1e8 {
            assert!((arch(t).unwrap().cosh() - t).abs() <= 1e-12 * t, "t={t}");
            assert!((arsh(t).unwrap().sinh() - t).abs() <= 1e-12 * t, "t={t}");
            t *= 1.37;
        }
    }

    #[test]
    fn diameter_examples() {
        let inf = ExtendedPoint::Infinity;
        assert_eq!(spherical_diameter(&[p("0,0"), inf.clone()]).unwrap(), 1.0);
        let d = spherical_diameter(&[p("0,0"), p("1,0")]).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let d = spherical_diameter(&[p("-1,0"), p("1,0"), inf]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(spherical_diameter(&[p("0,0")]).is_err());
    }

    #[test]
    fn literals_and_validation() {
        assert_eq!(p("inf"), ExtendedPoint::Infinity);
        assert_eq!(p(" 0.5, 0 "), ExtendedPoint::Finite(vec![0.5, 0.0]));
        assert!("1".parse::<ExtendedPoint>().is_err());
        assert!("1,x".parse::<ExtendedPoint>().is_err());
        assert!("1e101,0".parse::<ExtendedPoint>().is_err());
        assert!(ExtendedPoint::finite(vec![0.0; 17]).is_err());
        assert_eq!(p("0.25,-3").to_string(), "0.25,-3");
        let json = serde_json::to_string(&vec![p("1,0"), ExtendedPoint::Infinity]).unwrap();
        assert_eq!(json, r#"[[1.0,0.0],"inf"]"#);
        let back: Vec<ExtendedPoint> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![p("1,0"), ExtendedPoint::Infinity]);
        assert!(serde_json::from_str::<ExtendedPoint>(r#""nope""#).is_err());
    }
}
