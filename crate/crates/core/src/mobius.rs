//! Möbius transformations of `R̄ⁿ`, stored as ordered lists of primitives.
//!
//! A list representation keeps `∞` exact (every primitive knows where it
//! sends `∞`) and makes inverses trivial: reverse the list and invert each
//! primitive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::extended_space::{check_dim, dot, norm, norm_sq, ExtendedPoint};

/// One generator of the Möbius group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// Inversion in the sphere `S(center, radius)`.
    Inversion {
        center: Vec<f64>,
        radius: f64,
    },
    /// Reflection in the hyperplane `{x : ⟨x, normal⟩ = offset}`; `normal` is a unit vector.
    Reflection {
        normal: Vec<f64>,
        offset: f64,
    },
    /// `x ↦ factor · x`.
    Scaling {
        factor: f64,
    },
    /// `x ↦ M x` with `M` orthogonal, stored row-major.
    Rotation {
        matrix: Vec<Vec<f64>>,
    },
    Translation {
        vector: Vec<f64>,
    },
}

impl Primitive {
    fn inverse(&self) -> Primitive {
        match self {
            Primitive::Inversion { .. } | Primitive::Reflection { .. } => self.clone(),
            Primitive::Scaling { factor } => Primitive::Scaling { factor: 1.0 / factor },
            Primitive::Rotation { matrix } => {
                let n = matrix.len();
                let t = (0..n).map(|i| (0..n).map(|j| matrix[j][i]).collect()).collect();
                Primitive::Rotation { matrix: t }
            }
            Primitive::Translation { vector } => Primitive::Translation { vector: vector.iter().map(|v| -v).collect() },
        }
    }

    fn is_similarity(&self) -> bool {
        !matches!(self, Primitive::Inversion { .. })
    }

    fn apply(&self, x: &ExtendedPoint) -> ExtendedPoint {
        let v = match x {
            ExtendedPoint::Infinity => {
                return match self {
                    Primitive::Inversion { center, .. } => ExtendedPoint::Finite(center.clone()),
                    _ => ExtendedPoint::Infinity,
                }
            }
            ExtendedPoint::Finite(v) => v,
        };
        match self {
            Primitive::Inversion { center, radius } => {
                let d: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
                let r2 = norm_sq(&d);
                if r2 == 0.0 {
                    return ExtendedPoint::Infinity;
                }
                let k = radius * radius / r2;
                ExtendedPoint::Finite(center.iter().zip(&d).map(|(c, di)| c + k * di).collect())
            }
            Primitive::Reflection { normal, offset } => ExtendedPoint::Finite(reflect(v, normal, *offset)),
            Primitive::Scaling { factor } => ExtendedPoint::Finite(v.iter().map(|a| a * factor).collect()),
            Primitive::Rotation { matrix } => ExtendedPoint::Finite(mat_vec(matrix, v)),
            Primitive::Translation { vector } => {
                ExtendedPoint::Finite(v.iter().zip(vector).map(|(a, t)| a + t).collect())
            }
        }
    }

    /// Image of a vector under the linear part of a similarity.
    fn linear(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Primitive::Reflection { normal, .. } => reflect(v, normal, 0.0),
            Primitive::Scaling { factor } => v.iter().map(|a| a * factor).collect(),
            Primitive::Rotation { matrix } => mat_vec(matrix, v),
            Primitive::Translation { .. } | Primitive::Inversion { .. } => v.to_vec(),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Primitive::Inversion { center, .. } => Some(center.len()),
            Primitive::Reflection { normal, .. } => Some(normal.len()),
            Primitive::Scaling { .. } => None,
            Primitive::Rotation { matrix } => Some(matrix.len()),
            Primitive::Translation { vector } => Some(vector.len()),
        }
    }
}

fn reflect(v: &[f64], normal: &[f64], offset: f64) -> Vec<f64> {
    let s = 2.0 * (dot(v, normal) - offset);
    v.iter().zip(normal).map(|(a, n)| a - s * n).collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// A composition of primitives, applied left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    dim: usize,
    primitives: Vec<Primitive>,
}

impl MobiusMap {
    pub fn identity(dim: usize) -> Self {
        MobiusMap { dim, primitives: Vec::new() }
    }

    /// Builds a map from primitives after checking each parameter set.
    pub fn from_primitives(dim: usize, primitives: Vec<Primitive>) -> Result<Self> {
        check_dim(dim)?;
        for p in &primitives {
            if let Some(d) = p.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch(dim, d));
                }
            }
            validate_primitive(p)?;
        }
        Ok(MobiusMap { dim, primitives })
    }

    pub fn inversion(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::from_primitives(center.len(), vec![Primitive::Inversion { center, radius }])
    }

    /// Reflection in `{⟨x, normal⟩ = offset}`; `normal` is normalized here.
    pub fn reflection(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidDomain("reflection normal must be non-zero".into()));
        }
        let normal: Vec<f64> = normal.iter().map(|v| v / len).collect();
        Self::from_primitives(normal.len(), vec![Primitive::Reflection { normal, offset }])
    }

    pub fn scaling(dim: usize, factor: f64) -> Result<Self> {
        Self::from_primitives(dim, vec![Primitive::Scaling { factor }])
    }

    pub fn rotation(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_primitives(matrix.len(), vec![Primitive::Rotation { matrix }])
    }

    pub fn translation(vector: Vec<f64>) -> Result<Self> {
        Self::from_primitives(vector.len(), vec![Primitive::Translation { vector }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// True when no primitive is an inversion, i.e. the map fixes `∞`.
    pub fn is_similarity(&self) -> bool {
        self.primitives.iter().all(Primitive::is_similarity)
    }

    pub fn apply(&self, x: &ExtendedPoint) -> Result<ExtendedPoint> {
        if let Some(d) = x.dim() {
            if d != self.dim {
                return Err(Error::DimensionMismatch(self.dim, d));
            }
        }
        Ok(self.primitives.iter().fold(x.clone(), |p, prim| prim.apply(&p)))
    }

    /// `self` first, then `next`.
    pub fn compose(&self, next: &MobiusMap) -> Result<MobiusMap> {
        if self.dim != next.dim {
            return Err(Error::DimensionMismatch(self.dim, next.dim));
        }
        let mut primitives = self.primitives.clone();
        primitives.extend(next.primitives.iter().cloned());
        Ok(MobiusMap { dim: self.dim, primitives })
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { dim: self.dim, primitives: self.primitives.iter().rev().map(Primitive::inverse).collect() }
    }

    /// Image of a domain. Finite boundary lists map pointwise; balls and
    /// half-spaces map to balls or half-spaces, and an image that is the
    /// exterior of a ball is rejected.
    pub fn apply_domain(&self, g: &DomainSpec) -> Result<DomainImage> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, g.dim()));
        }
        match g {
            DomainSpec::FiniteComplement { points, .. } => {
                let mapped = self.map_all(points)?;
                let euclidean = mapped.iter().any(ExtendedPoint::is_infinite);
                Ok(DomainImage { domain: DomainSpec::finite_complement(mapped, euclidean)?, approximate: false })
            }
            DomainSpec::BoundaryCloud { points, euclidean_subset } => {
                let mapped = self.map_all(points)?;
                let euclidean = *euclidean_subset && self.is_similarity();
                Ok(DomainImage {
                    domain: DomainSpec::boundary_cloud(mapped, euclidean)?,
                    approximate: !self.is_similarity(),
                })
            }
            DomainSpec::Ball { center, radius } => {
                let s = GenSphere::Sphere { center: center.clone(), radius: *radius, inside: true };
                Ok(DomainImage { domain: self.map_region(s)?, approximate: false })
            }
            DomainSpec::HalfSpace { normal, offset } => {
                let s = GenSphere::Plane { normal: normal.clone(), offset: *offset };
                Ok(DomainImage { domain: self.map_region(s)?, approximate: false })
            }
        }
    }

    fn map_all(&self, points: &[ExtendedPoint]) -> Result<Vec<ExtendedPoint>> {
        points.iter().map(|p| self.apply(p)).collect()
    }

    fn map_region(&self, region: GenSphere) -> Result<DomainSpec> {
        let image = self.primitives.iter().fold(region, |s, p| s.map(p));
        match image {
            GenSphere::Sphere { center, radius, inside: true } => DomainSpec::ball(center, radius),
            GenSphere::Sphere { center, radius, inside: false } => Err(Error::Unsupported(format!(
                "image is the exterior of the ball with center {:?} and radius {radius}",
                center
            ))),
            GenSphere::Plane { normal, offset } => DomainSpec::half_space(normal, offset),
        }
    }
}

fn validate_primitive(p: &Primitive) -> Result<()> {
    let bad = |msg: &str| Err(Error::InvalidDomain(msg.to_string()));
    match p {
        Primitive::Inversion { center, radius } => {
            ExtendedPoint::finite(center.clone())?;
            if !(*radius > 0.0) || !radius.is_finite() {
                return bad("inversion radius must be positive");
            }
        }
        Primitive::Reflection { normal, offset } => {
            if (norm(normal) - 1.0).abs() > 1e-12 || !offset.is_finite() {
                return bad("reflection needs a unit normal and a finite offset");
            }
        }
        Primitive::Scaling { factor } => {
            if !(*factor > 0.0) || !factor.is_finite() {
                return bad("scaling factor must be positive");
            }
        }
        Primitive::Rotation { matrix } => {
            let n = matrix.len();
            if matrix.iter().any(|r| r.len() != n) {
                return bad("rotation matrix must be square");
            }
            for i in 0..n {
                for j in 0..n {
                    let e = if i == j { 1.0 } else { 0.0 };
                    if (dot(&matrix[i], &matrix[j]) - e).abs() > 1e-9 {
                        return bad("rotation matrix must be orthogonal");
                    }
                }
            }
        }
        Primitive::Translation { vector } => {
            ExtendedPoint::finite(vector.clone())?;
        }
    }
    Ok(())
}

/// Result of mapping a domain. `approximate` is set when a sampled boundary
/// was pushed through a non-similarity, so the samples are no longer spread
/// the way they were.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainImage {
    pub domain: DomainSpec,
    pub approximate: bool,
}

/// A sphere or hyperplane together with the side that forms the domain.
#[derive(Debug, Clone)]
enum GenSphere {
    /// `|x − center| < radius` when `inside`, otherwise the exterior plus `∞`.
    Sphere { center: Vec<f64>, radius: f64, inside: bool },
    /// `⟨x, normal⟩ > offset`.
    Plane { normal: Vec<f64>, offset: f64 },
}

const THROUGH_CENTER_TOL: f64 = 1e-12;

impl GenSphere {
    fn map(self, p: &Primitive) -> GenSphere {
        match p {
            Primitive::Inversion { center, radius } => self.invert(center, *radius),
            _ => self.map_similarity(p),
        }
    }

    fn map_similarity(self, p: &Primitive) -> GenSphere {
        let image = |v: &[f64]| match p.apply(&ExtendedPoint::Finite(v.to_vec())) {
            ExtendedPoint::Finite(w) => w,
            ExtendedPoint::Infinity => unreachable!("similarities fix infinity"),
        };
        match self {
            GenSphere::Sphere { center, radius, inside } => {
                let radius = match p {
                    Primitive::Scaling { factor } => radius * factor,
                    _ => radius,
                };
                GenSphere::Sphere { center: image(&center), radius, inside }
            }
            GenSphere::Plane { normal, offset } => {
                let foot: Vec<f64> = normal.iter().map(|v| v * offset).collect();
                let foot = image(&foot);
                let n = p.linear(&normal);
                let len = norm(&n);
                let n: Vec<f64> = n.iter().map(|v| v / len).collect();
                GenSphere::Plane { offset: dot(&foot, &n), normal: n }
            }
        }
    }

    fn invert(self, c0: &[f64], r0: f64) -> GenSphere {
        let r0sq = r0 * r0;
        match self {
            GenSphere::Sphere { center, radius, inside } => {
                let d: Vec<f64> = center.iter().zip(c0).map(|(c, o)| c - o).collect();
                let dist_sq = norm_sq(&d);
                let power = dist_sq - radius * radius;
                if power.abs() <= THROUGH_CENTER_TOL * dist_sq.max(radius * radius) {
                    // Sphere through the inversion center: the image is a hyperplane
                    // with unit normal along `d`, at distance r0²/(2r) from c0.
                    let u: Vec<f64> = d.iter().map(|v| v / radius).collect();
                    let offset = dot(c0, &u) + r0sq / (2.0 * radius);
                    if inside {
                        GenSphere::Plane { normal: u, offset }
                    } else {
                        GenSphere::Plane { normal: u.iter().map(|v| -v).collect(), offset: -offset }
                    }
                } else {
                    let k = r0sq / power;
                    let center = c0.iter().zip(&d).map(|(o, v)| o + k * v).collect();
                    let radius = r0sq * radius / power.abs();
                    // The ball contains c0 exactly when the power is negative; c0 goes to ∞.
                    GenSphere::Sphere { center, radius, inside: inside == (power > 0.0) }
                }
            }
            GenSphere::Plane { normal, offset } => {
                let h = offset - dot(c0, &normal);
                if h.abs() <= THROUGH_CENTER_TOL * offset.abs().max(1.0) {
                    // Planes through c0 are preserved together with their sides.
                    GenSphere::Plane { normal, offset }
                } else {
                    let center = c0.iter().zip(&normal).map(|(o, n)| o + r0sq / (2.0 * h) * n).collect();
                    let radius = r0sq / (2.0 * h.abs());
                    // c0 lies in the half-space iff h < 0; then the image contains ∞.
                    GenSphere::Sphere { center, radius, inside: h > 0.0 }
                }
            }
        }
    }
}

/// Deterministic pseudo-random composition of 1–4 primitives with centers
/// in `[−2, 2]ⁿ`, radii in `[0.5, 2]` and scalings in `[0.5, 2]`.
pub fn random_mobius(seed: u64, dim: usize) -> Result<MobiusMap> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.random_range(1..=4);
    let mut primitives = Vec::with_capacity(count);
    for _ in 0..count {
        let prim = match rng.random_range(0..5) {
            0 => Primitive::Inversion { center: random_box(&mut rng, dim, 2.0), radius: rng.random_range(0.5..=2.0) },
            1 => Primitive::Reflection { normal: random_unit(&mut rng, dim), offset: rng.random_range(-2.0..=2.0) },
            2 => Primitive::Scaling { factor: rng.random_range(0.5..=2.0) },
            3 => Primitive::Rotation { matrix: random_orthogonal(&mut rng, dim) },
            _ => Primitive::Translation { vector: random_box(&mut rng, dim, 2.0) },
        };
        primitives.push(prim);
    }
    MobiusMap::from_primitives(dim, primitives)
}

pub(crate) fn random_box<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-half_width..=half_width)).collect()
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v = random_box(rng, dim, 1.0);
        let len = norm(&v);
        if len > 1e-3 && len <= 1.0 {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

fn random_orthogonal<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<f64>> {
    'retry: loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v = random_box(rng, dim, 1.0);
            for r in &rows {
                let c = dot(&v, r);
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= c * b);
            }
            let len = norm(&v);
            if len < 1e-3 {
                continue 'retry;
            }
            rows.push(v.iter().map(|x| x / len).collect());
        }
        return rows;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended_space::{cross_ratio, euclidean_distance};

    fn p(s: &str) -> ExtendedPoint {
        s.parse().unwrap()
    }

    fn close(a: &ExtendedPoint, b: &ExtendedPoint, tol: f64) -> bool {
        match (a, b) {
            (ExtendedPoint::Infinity, ExtendedPoint::Infinity) => true,
            (ExtendedPoint::Finite(u), ExtendedPoint::Finite(v)) => euclidean_distance(u, v) <= tol * (1.0 + norm(u)),
            _ => false,
        }
    }

    #[test]
    fn primitive_examples() {
        let inv = MobiusMap::inversion(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(inv.apply(&p("2,0")).unwrap(), p("0.5,0"));
        assert_eq!(inv.apply(&p("0,0")).unwrap(), ExtendedPoint::Infinity);
        assert_eq!(inv.apply(&ExtendedPoint::Infinity).unwrap(), p("0,0"));
        let t = MobiusMap::translation(vec![0.0, 1.0]).unwrap();
        assert_eq!(t.apply(&ExtendedPoint::Infinity).unwrap(), ExtendedPoint::Infinity);
        let r = MobiusMap::reflection(vec![0.0, 2.0], 1.0).unwrap();
        assert_eq!(r.apply(&p("3,0")).unwrap(), p("3,2"));
    }

    #[test]
    fn inversion_is_an_involution() {
        let inv = MobiusMap::inversion(vec![0.0, 0.0], 1.0).unwrap();
        let twice = inv.compose(&inv).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = ExtendedPoint::Finite(random_box(&mut rng, 2, 3.0));
            assert!(close(&twice.apply(&x).unwrap(), &x, 1e-12));
        }
    }

    #[test]
    fn inverses_of_similarities() {
        let t = MobiusMap::translation(vec![1.5, -2.0]).unwrap();
        assert_eq!(t.inverse().primitives(), &[Primitive::Translation { vector: vec![-1.5, 2.0] }]);
        let s = MobiusMap::scaling(2, 2.0).unwrap();
        let half = s.inverse().apply(&p("1,0")).unwrap();
        assert_eq!(half, p("0.5,0"));
        assert_eq!(s.apply(&half).unwrap(), p("1,0"));
    }

    #[test]
    fn invalid_primitives_are_rejected() {
        assert!(MobiusMap::inversion(vec![0.0, 0.0], 0.0).is_err());
        assert!(MobiusMap::scaling(2, -1.0).is_err());
        assert!(MobiusMap::rotation(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).is_err());
        assert!(MobiusMap::reflection(vec![0.0, 0.0], 0.0).is_err());
        let a = MobiusMap::identity(2);
        let b = MobiusMap::identity(3);
        assert!(a.compose(&b).is_err());
        assert!(a.apply(&p("1,2,3")).is_err());
    }

    #[test]
    fn random_maps_are_deterministic_and_sized() {
        assert_eq!(random_mobius(17, 3).unwrap(), random_mobius(17, 3).unwrap());
        assert_eq!(random_mobius(17, 2).unwrap().dim(), 2);
        assert_eq!(random_mobius(17, 3).unwrap().dim(), 3);
        for seed in 0..200 {
            let m = random_mobius(seed, 3).unwrap();
            assert!((1..=4).contains(&m.primitives().len()));
        }
    }

    #[test]
    fn random_maps_preserve_cross_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 1..=100 {
            let m = random_mobius(seed, 2).unwrap();
            for _ in 0..10 {
                let q: Vec<ExtendedPoint> =
                    (0..4).map(|_| ExtendedPoint::Finite(random_box(&mut rng, 2, 3.0))).collect();
                let before = cross_ratio(&q[0], &q[1], &q[2], &q[3]).unwrap();
                let img: Vec<ExtendedPoint> = q.iter().map(|x| m.apply(x).unwrap()).collect();
                let after = cross_ratio(&img[0], &img[1], &img[2], &img[3]).unwrap();
                assert!((after - before).abs() <= 1e-10 * before, "seed {seed}: {before} vs {after}");
            }
        }
    }

    #[test]
    fn domain_images() {
        let inv = MobiusMap::inversion(vec![0.0, 0.0], 1.0).unwrap();
        let g = DomainSpec::finite_complement(vec![p("0,0"), ExtendedPoint::Infinity], false).unwrap();
        let img = inv.apply_domain(&g).unwrap();
        assert_eq!(img.domain.boundary_points().unwrap(), &[ExtendedPoint::Infinity, p("0,0")]);
        assert!(!img.approximate);

        let t = MobiusMap::translation(vec![1.0, 0.0]).unwrap();
        let b = t.apply_domain(&DomainSpec::unit_ball(2)).unwrap().domain;
        assert_eq!(b, DomainSpec::ball(vec![1.0, 0.0], 1.0).unwrap());

        // The unit sphere is centered on the wall of H², which it preserves.
        let h = inv.apply_domain(&DomainSpec::upper_half_space(2)).unwrap().domain;
        assert_eq!(h, DomainSpec::upper_half_space(2));
    }

    /// Pointwise oracle: boundary samples of the source land on the boundary
    /// of the computed image, and an interior point lands inside it.
    fn check_image(m: &MobiusMap, g: &DomainSpec, samples: &[ExtendedPoint], inner: &ExtendedPoint) {
        let img = m.apply_domain(g).unwrap().domain;
        for s in samples {
            let y = m.apply(s).unwrap();
            let gap = match (&img, &y) {
                (DomainSpec::Ball { center, radius }, ExtendedPoint::Finite(v)) => {
                    (euclidean_distance(v, center) - radius).abs() / radius
                }
                (DomainSpec::HalfSpace { normal, offset }, ExtendedPoint::Finite(v)) => {
                    (dot(v, normal) - offset).abs() / (1.0 + norm(v))
                }
                (DomainSpec::HalfSpace { .. }, ExtendedPoint::Infinity) => 0.0,
                other => panic!("unexpected image {other:?}"),
            };
            assert!(gap <= 1e-10, "boundary sample off the image boundary by {gap}");
        }
        assert!(img.contains(&m.apply(inner).unwrap()));
    }

    #[test]
    fn ball_and_half_space_images_match_pointwise() {
        let circle: Vec<ExtendedPoint> = (0..100)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 100.0;
                ExtendedPoint::Finite(vec![t.cos(), t.sin()])
            })
            .collect();
        let line: Vec<ExtendedPoint> = (0..100)
            .map(|k| ExtendedPoint::Finite(vec![(k as f64 - 50.0) * 0.37, 0.0]))
            .chain(std::iter::once(ExtendedPoint::Infinity))
            .collect();
        let ball = DomainSpec::unit_ball(2);
        let h2 = DomainSpec::upper_half_space(2);

        // Inversion centered below the wall sends H² onto a ball.
        let inv = MobiusMap::inversion(vec![0.0, -1.0], 1.0).unwrap();
        assert!(matches!(inv.apply_domain(&h2).unwrap().domain, DomainSpec::Ball { .. }));
        check_image(&inv, &h2, &line, &p("0.3,2"));

        // Inversion centered on the unit circle sends B² onto a half-plane.
        let inv = MobiusMap::inversion(vec![1.0, 0.0], 1.5).unwrap();
        assert!(matches!(inv.apply_domain(&ball).unwrap().domain, DomainSpec::HalfSpace { .. }));
        check_image(&inv, &ball, &circle, &p("0.1,0.2"));

        // Inversion centered outside B² keeps it a ball.
        let inv = MobiusMap::inversion(vec![3.0, 1.0], 2.0).unwrap();
        check_image(&inv, &ball, &circle, &p("-0.4,0.1"));

        // Inversion centered inside B² produces the exterior of a ball.
        let inv = MobiusMap::inversion(vec![0.2, 0.0], 1.0).unwrap();
        assert!(matches!(inv.apply_domain(&ball), Err(Error::Unsupported(_))));

        let mut tried = 0;
        for seed in 0..60 {
            let m = random_mobius(seed, 2).unwrap();
            for (g, samples, inner) in [(&ball, &circle, p("0.1,-0.3")), (&h2, &line, p("-1,0.7"))] {
                if m.apply_domain(g).is_ok() {
                    check_image(&m, g, samples, &inner);
                    tried += 1;
                }
            }
        }
        assert!(tried > 40);
    }

    #[test]
    fn map_round_trips_through_json() {
        let m = random_mobius(3, 3).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: MobiusMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
