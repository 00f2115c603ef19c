//! The relative metrics: the generalized hyperbolic metric `ρ_G`,
//! Seittenranta's metric `δ_G` and its `p`-family, the classical `j_G` and its
//! `p`-family, the pointed variant `j_{G,b}`, and closed-form hyperbolic
//! distances for balls and half-spaces.
//!
//! Every supremum is taken over the inner quantity (cross-ratio product,
//! `p`-norm of two cross-ratios, ...) and the monotone outer function
//! `arch(1 + ·/2)` or `log(1 + ·)` is applied once at the end.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::domains::{sup_over_boundary, sup_over_boundary_pairs, DomainSpec, SearchMode, SupremumStrategy};
use crate::error::{Error, Result};
use crate::extended_space::{arch_1p_raw, cross_ratio_raw, dot, euclidean_distance, norm_sq, ExtendedPoint};

/// Exponent `p ∈ (0, ∞]`. `∞` is its own variant and selects the max formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p.is_finite() {
            Ok(Exponent::Finite(p))
        } else if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::InvalidExponent(p.to_string()))
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// `p ≥ 1`, the range where the `p`-families are known to be metrics.
    pub fn at_least_one(self) -> bool {
        match self {
            Exponent::Finite(p) => p >= 1.0,
            Exponent::Infinity => true,
        }
    }

    /// `(u^p + v^p)^{1/p}` for `u, v ≥ 0`, or `max(u, v)` at `p = ∞`.
    pub fn combine(self, u: f64, v: f64) -> f64 {
        let (hi, lo) = if u >= v { (u, v) } else { (v, u) };
        match self {
            Exponent::Infinity => hi,
            Exponent::Finite(p) => {
                if hi == 0.0 {
                    0.0
                } else if hi.is_infinite() {
                    f64::INFINITY
                } else {
                    hi * (1.0 + (lo / hi).powf(p)).powf(1.0 / p)
                }
            }
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use Exponent::*;
        match (self, other) {
            (Infinity, Infinity) => Some(std::cmp::Ordering::Equal),
            (Infinity, Finite(_)) => Some(std::cmp::Ordering::Greater),
            (Finite(_), Infinity) => Some(std::cmp::Ordering::Less),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| Error::InvalidExponent(s.to_string()))?;
        if p.is_infinite() {
            return Err(Error::InvalidExponent(s.to_string()));
        }
        Exponent::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;
        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive real or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(ExponentVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    Rho,
    Delta,
    DeltaP,
    J,
    JP,
    JPointed,
}

impl MetricId {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::Rho => "rho",
            MetricId::Delta => "delta",
            MetricId::DeltaP => "delta_p",
            MetricId::J => "j",
            MetricId::JP => "j_p",
            MetricId::JPointed => "j_pointed",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rho" => MetricId::Rho,
            "delta" => MetricId::Delta,
            "delta_p" => MetricId::DeltaP,
            "j" => MetricId::J,
            "j_p" => MetricId::JP,
            "j_pointed" => MetricId::JPointed,
            _ => return Err(Error::Unknown { kind: "metric", name: s.to_string() }),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    RefinedLowerBound,
}

/// A metric value with the boundary point(s) attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub metric: MetricId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Exponent>,
    pub value: f64,
    pub witnesses: Vec<ExtendedPoint>,
    pub exactness: Exactness,
}

impl MetricValue {
    fn zero(metric: MetricId, exponent: Option<Exponent>) -> Self {
        MetricValue { metric, exponent, value: 0.0, witnesses: Vec::new(), exactness: Exactness::Exact }
    }
}

fn exactness(exact: bool) -> Exactness {
    if exact {
        Exactness::Exact
    } else {
        Exactness::RefinedLowerBound
    }
}

/// `|a,x,b,y| · |a,y,b,x|`, the quantity inside `ρ_G`.
pub fn rho_term(x: &ExtendedPoint, y: &ExtendedPoint, a: &ExtendedPoint, b: &ExtendedPoint) -> f64 {
    cross_ratio_raw(a, x, b, y) * cross_ratio_raw(a, y, b, x)
}

/// `(|x,a,y,b|^p + |x,b,y,a|^p)^{1/p}`, the quantity inside `δ_G^p`.
pub fn delta_p_term(x: &ExtendedPoint, y: &ExtendedPoint, a: &ExtendedPoint, b: &ExtendedPoint, p: Exponent) -> f64 {
    p.combine(cross_ratio_raw(x, a, y, b), cross_ratio_raw(x, b, y, a))
}

/// `(|x−y|^p/|x−a|^p + |x−y|^p/|y−a|^p)^{1/p}`, the quantity inside `j_G^p`.
/// The boundary point `∞` contributes 0.
pub fn j_p_term(x: &[f64], y: &[f64], a: &ExtendedPoint, p: Exponent) -> f64 {
    match a {
        ExtendedPoint::Infinity => 0.0,
        ExtendedPoint::Finite(av) => {
            let xy = euclidean_distance(x, y);
            p.combine(xy / euclidean_distance(x, av), xy / euclidean_distance(y, av))
        }
    }
}

/// `max(|x,a,y,b|, |x,b,y,a|)`, the quantity inside `j_{G,b}`.
pub fn j_pointed_term(x: &ExtendedPoint, y: &ExtendedPoint, a: &ExtendedPoint, b: &ExtendedPoint) -> f64 {
    delta_p_term(x, y, a, b, Exponent::Infinity)
}

fn check_point(g: &DomainSpec, x: &ExtendedPoint, name: &str) -> Result<()> {
    x.validate()?;
    if let Some(d) = x.dim() {
        if d != g.dim() {
            return Err(Error::DimensionMismatch(g.dim(), d));
        }
    }
    if g.contains(x) {
        return Ok(());
    }
    let on_boundary =
        g.boundary_points().is_some_and(|pts| pts.iter().any(|b| crate::extended_space::chordal_raw(x, b) < 1e-12));
    if on_boundary {
        Err(Error::NotInDomain(format!("{name} is a boundary point")))
    } else {
        Err(Error::NotInDomain(format!("{name} is not in the domain")))
    }
}

fn finite_coords<'a>(x: &'a ExtendedPoint, name: &str) -> Result<&'a [f64]> {
    x.coords().ok_or_else(|| Error::NotInDomain(format!("{name} must be a finite point for j-type metrics")))
}

/// Concentrates grid samples around the segment `[x, y]`.
fn focused(strategy: &SupremumStrategy, x: &ExtendedPoint, y: &ExtendedPoint) -> SupremumStrategy {
    let mut s = strategy.clone();
    if s.mode == SearchMode::GridRefine && s.focus.is_none() {
        if let (Some(u), Some(v)) = (x.coords(), y.coords()) {
            s.focus = Some(u.iter().zip(v).map(|(a, b)| 0.5 * (a + b)).collect());
        }
    }
    s
}

/// `ρ_G(x, y) = sup_{a,b ∈ ∂G} arch(1 + |a,x,b,y| |a,y,b,x| / 2)`.
pub fn rho(g: &DomainSpec, x: &ExtendedPoint, y: &ExtendedPoint, strategy: &SupremumStrategy) -> Result<MetricValue> {
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    if x == y {
        return Ok(MetricValue::zero(MetricId::Rho, None));
    }
    let s = sup_over_boundary_pairs(g, |a, b| rho_term(x, y, a, b), &focused(strategy, x, y))?;
    Ok(MetricValue {
        metric: MetricId::Rho,
        exponent: None,
        value: arch_1p_raw(0.5 * s.value),
        witnesses: vec![s.witness.0, s.witness.1],
        exactness: exactness(s.exact),
    })
}

/// `δ_G^p(x, y) = sup_{a,b ∈ ∂G} log(1 + (|x,a,y,b|^p + |x,b,y,a|^p)^{1/p})`.
pub fn delta_p(
    g: &DomainSpec,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    p: Exponent,
    strategy: &SupremumStrategy,
) -> Result<MetricValue> {
    delta_impl(g, x, y, p, strategy, MetricId::DeltaP)
}

/// Seittenranta's metric `δ_G = δ_G^∞`.
pub fn delta(g: &DomainSpec, x: &ExtendedPoint, y: &ExtendedPoint, strategy: &SupremumStrategy) -> Result<MetricValue> {
    delta_impl(g, x, y, Exponent::Infinity, strategy, MetricId::Delta)
}

fn delta_impl(
    g: &DomainSpec,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    p: Exponent,
    strategy: &SupremumStrategy,
    id: MetricId,
) -> Result<MetricValue> {
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    if x == y {
        return Ok(MetricValue::zero(id, Some(p)));
    }
    let s = sup_over_boundary_pairs(g, |a, b| delta_p_term(x, y, a, b, p), &focused(strategy, x, y))?;
    Ok(MetricValue {
        metric: id,
        exponent: Some(p),
        value: s.value.ln_1p(),
        witnesses: vec![s.witness.0, s.witness.1],
        exactness: exactness(s.exact),
    })
}

fn check_euclidean(g: &DomainSpec) -> Result<()> {
    if g.euclidean_subset() {
        Ok(())
    } else {
        Err(Error::NotEuclidean)
    }
}

/// `j_G^p(x, y) = sup_{a ∈ ∂G} log(1 + (|x−y|^p/|x−a|^p + |x−y|^p/|y−a|^p)^{1/p})`.
pub fn j_p(
    g: &DomainSpec,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    p: Exponent,
    strategy: &SupremumStrategy,
) -> Result<MetricValue> {
    check_euclidean(g)?;
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    let (xv, yv) = (finite_coords(x, "x")?, finite_coords(y, "y")?);
    if x == y {
        return Ok(MetricValue::zero(MetricId::JP, Some(p)));
    }
    let s = sup_over_boundary(g, |a| j_p_term(xv, yv, a, p), &focused(strategy, x, y))?;
    Ok(MetricValue {
        metric: MetricId::JP,
        exponent: Some(p),
        value: s.value.ln_1p(),
        witnesses: vec![s.witness],
        exactness: exactness(s.exact),
    })
}

/// Classical `j_G(x, y) = log(1 + |x−y| / min(d(x), d(y)))`.
///
/// The witness is the nearest finite boundary point for finite boundary
/// lists and the foot point on the wall for balls and half-spaces.
pub fn j_classic(g: &DomainSpec, x: &ExtendedPoint, y: &ExtendedPoint) -> Result<MetricValue> {
    check_euclidean(g)?;
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    let (xv, yv) = (finite_coords(x, "x")?, finite_coords(y, "y")?);
    if x == y {
        return Ok(MetricValue::zero(MetricId::J, None));
    }
    let (dx, dy) = (g.distance_to_boundary(x)?, g.distance_to_boundary(y)?);
    let near = if dy < dx { yv } else { xv };
    let witness = nearest_boundary_point(g, near);
    Ok(MetricValue {
        metric: MetricId::J,
        exponent: None,
        value: (euclidean_distance(xv, yv) / dx.min(dy)).ln_1p(),
        witnesses: vec![witness],
        exactness: Exactness::Exact,
    })
}

fn nearest_boundary_point(g: &DomainSpec, v: &[f64]) -> ExtendedPoint {
    match g {
        DomainSpec::FiniteComplement { points, .. } | DomainSpec::BoundaryCloud { points, .. } => points
            .iter()
            .filter(|p| !p.is_infinite())
            .min_by(|a, b| {
                let da = euclidean_distance(a.coords().unwrap_or_default(), v);
                let db = euclidean_distance(b.coords().unwrap_or_default(), v);
                da.total_cmp(&db)
            })
            .cloned()
            .unwrap_or(ExtendedPoint::Infinity),
        DomainSpec::Ball { center, radius } => {
            let d: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
            let len = norm_sq(&d).sqrt();
            let dir: Vec<f64> = if len > 0.0 {
                d.iter().map(|x| x / len).collect()
            } else {
                let mut e = vec![0.0; d.len()];
                e[0] = 1.0;
                e
            };
            ExtendedPoint::Finite(center.iter().zip(&dir).map(|(c, u)| c + radius * u).collect())
        }
        DomainSpec::HalfSpace { normal, offset } => {
            let h = dot(v, normal) - offset;
            ExtendedPoint::Finite(v.iter().zip(normal).map(|(a, u)| a - h * u).collect())
        }
    }
}

/// `j_{G,b}(x, y) = sup_{a ∈ ∂G} log(1 + max(|x,a,y,b|, |x,b,y,a|))` for `b ∉ G`.
pub fn j_pointed(
    g: &DomainSpec,
    b: &ExtendedPoint,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    strategy: &SupremumStrategy,
) -> Result<MetricValue> {
    b.validate()?;
    if b.dim().is_some_and(|d| d != g.dim()) {
        return Err(Error::DimensionMismatch(g.dim(), b.dim().unwrap_or(0)));
    }
    if g.contains(b) {
        return Err(Error::NotInDomain("b must not lie in the domain".into()));
    }
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    if x == y {
        return Ok(MetricValue::zero(MetricId::JPointed, None));
    }
    let s = sup_over_boundary(g, |a| j_pointed_term(x, y, a, b), &focused(strategy, x, y))?;
    Ok(MetricValue {
        metric: MetricId::JPointed,
        exponent: None,
        value: s.value.ln_1p(),
        witnesses: vec![s.witness, b.clone()],
        exactness: exactness(s.exact),
    })
}

/// Hyperbolic distance in a ball or half-space:
/// `arch(1 + 2r²|x−y|² / ((r²−|x−c|²)(r²−|y−c|²)))` and
/// `arch(1 + |x−y|² / (2 h(x) h(y)))` with `h` the height above the wall.
pub fn hyperbolic_closed_form(g: &DomainSpec, x: &ExtendedPoint, y: &ExtendedPoint) -> Result<f64> {
    check_point(g, x, "x")?;
    check_point(g, y, "y")?;
    let (xv, yv) = (finite_coords(x, "x")?, finite_coords(y, "y")?);
    let d2 = norm_sq(&xv.iter().zip(yv).map(|(a, b)| a - b).collect::<Vec<_>>());
    let w = match g {
        DomainSpec::Ball { center, radius } => {
            let gap = |v: &[f64]| {
                let s = euclidean_distance(v, center);
                (radius - s) * (radius + s)
            };
            2.0 * radius * radius * d2 / (gap(xv) * gap(yv))
        }
        DomainSpec::HalfSpace { normal, offset } => {
            d2 / (2.0 * (dot(xv, normal) - offset) * (dot(yv, normal) - offset))
        }
        _ => {
            return Err(Error::Unsupported(
                "closed-form hyperbolic distance exists only for balls and half-spaces".into(),
            ))
        }
    };
    Ok(arch_1p_raw(w))
}

/// Which metric to evaluate, with its optional parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRequest {
    pub metric: MetricId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ExtendedPoint>,
}

impl MetricRequest {
    pub fn new(metric: MetricId) -> Self {
        MetricRequest { metric, p: None, b: None }
    }

    pub fn with_p(mut self, p: Exponent) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_b(mut self, b: ExtendedPoint) -> Self {
        self.b = Some(b);
        self
    }
}

/// Evaluates any metric family by id.
pub fn compute(
    g: &DomainSpec,
    req: &MetricRequest,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    strategy: &SupremumStrategy,
) -> Result<MetricValue> {
    let need_p = || req.p.ok_or_else(|| Error::InvalidExponent(format!("metric {} needs an exponent p", req.metric)));
    match req.metric {
        MetricId::Rho => rho(g, x, y, strategy),
        MetricId::Delta => delta(g, x, y, strategy),
        MetricId::DeltaP => delta_p(g, x, y, need_p()?, strategy),
        MetricId::J => j_classic(g, x, y),
        MetricId::JP => j_p(g, x, y, need_p()?, strategy),
        MetricId::JPointed => {
            let b = req.b.as_ref().ok_or_else(|| Error::NotInDomain("j_pointed needs a base point b".into()))?;
            j_pointed(g, b, x, y, strategy)
        }
    }
}
