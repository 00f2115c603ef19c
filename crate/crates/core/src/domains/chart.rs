//! Parametrization of continuous boundaries (spheres, hyperplanes plus `∞`)
//! by the unit sphere `S^{n−1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DomainSpec;
use crate::error::{Error, Result};
use crate::extended_space::{dot, norm, norm_sq, ExtendedPoint};

/// Maps unit vectors onto `∂G`.
///
/// For a ball the unit sphere is pushed through the ball automorphism that
/// sends the center to the focus point; for a half-space it is projected
/// stereographically onto the wall, centered at the foot of the focus and
/// scaled by its height. Either way, samples that are uniform on the sphere
/// crowd near the part of the boundary closest to the focus.
#[derive(Debug, Clone)]
pub(crate) enum BoundaryChart {
    Ball { center: Vec<f64>, radius: f64, focus: Vec<f64> },
    HalfSpace { foot: Vec<f64>, scale: f64, tangents: Vec<Vec<f64>> },
}

impl BoundaryChart {
    pub(crate) fn new(g: &DomainSpec, focus: Option<&[f64]>) -> Result<Self> {
        let n = g.dim();
        match g {
            DomainSpec::Ball { center, radius } => {
                let mut a = vec![0.0; n];
                if let Some(f) = focus {
                    let rel: Vec<f64> = f.iter().zip(center).map(|(x, c)| (x - c) / radius).collect();
                    if norm(&rel) < 1.0 {
                        a = rel;
                    }
                }
                Ok(BoundaryChart::Ball { center: center.clone(), radius: *radius, focus: a })
            }
            DomainSpec::HalfSpace { normal, offset } => {
                let (foot, scale) = match focus {
                    Some(f) if dot(f, normal) > *offset => {
                        let h = dot(f, normal) - offset;
                        (f.iter().zip(normal).map(|(x, u)| x - h * u).collect(), h)
                    }
                    _ => (normal.iter().map(|u| u * offset).collect(), 1.0),
                };
                Ok(BoundaryChart::HalfSpace { foot, scale, tangents: complement_basis(normal) })
            }
            _ => Err(Error::StrategyMismatch("grid refinement needs a ball or half-space boundary".into())),
        }
    }

    /// Boundary point for the unit vector `u`.
    pub(crate) fn point(&self, u: &[f64]) -> ExtendedPoint {
        match self {
            BoundaryChart::Ball { center, radius, focus } => {
                // T_a(u) = (2(1 + ⟨a,u⟩) a + (1 − |a|²) u) / |u + a|² on |u| = 1.
                let au = dot(focus, u);
                let a2 = norm_sq(focus);
                let den = 1.0 + 2.0 * au + a2;
                ExtendedPoint::Finite(
                    center
                        .iter()
                        .zip(focus.iter().zip(u))
                        .map(|(c, (a, ui))| c + radius * (2.0 * (1.0 + au) * a + (1.0 - a2) * ui) / den)
                        .collect(),
                )
            }
            BoundaryChart::HalfSpace { foot, scale, tangents } => {
                let n = u.len();
                let denom = 1.0 - u[n - 1];
                if denom <= 0.0 {
                    return ExtendedPoint::Infinity;
                }
                let mut p = foot.clone();
                for (t, ui) in tangents.iter().zip(&u[..n - 1]) {
                    let w = scale * ui / denom;
                    p.iter_mut().zip(t).for_each(|(pi, ti)| *pi += w * ti);
                }
                ExtendedPoint::Finite(p)
            }
        }
    }
}

/// Orthonormal basis of the complement of the unit vector `v`.
pub(crate) fn complement_basis(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        if basis.len() == n - 1 {
            break;
        }
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let c = dot(&e, v);
        e.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
        for b in &basis {
            let c = dot(&e, b);
            e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let len = norm(&e);
        if len > 1e-6 {
            basis.push(e.iter().map(|x| x / len).collect());
        }
    }
    basis
}

/// Sample directions on `S^{n−1}`: equal angles on the circle, a Fibonacci
/// lattice on `S²`, seeded pseudo-random directions beyond that. For `n ≥ 3`
/// the two poles of the last axis are appended, since the half-space chart
/// sends them to `∞` and to the foot of the focus.
pub(crate) fn sphere_samples(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = match n {
        2 => (0..count)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
            (0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let len = norm(&v);
                    if len > 1e-3 && len <= 1.0 {
                        break v.iter().map(|x| x / len).collect();
                    }
                })
                .collect()
        }
    };
    if n >= 3 {
        for s in [1.0, -1.0] {
            let mut pole = vec![0.0; n];
            pole[n - 1] = s;
            out.push(pole);
        }
    }
    out
}

/// Typical angular spacing of `count` samples on `S^{n−1}`.
pub(crate) fn sample_spacing(n: usize, count: usize) -> f64 {
    match n {
        2 => std::f64::consts::TAU / count as f64,
        _ => (4.0 * std::f64::consts::PI / count as f64).powf(1.0 / (n - 1) as f64),
    }
}

/// Local chart of the sphere around `u0`: `z ↦ normalize(u0 + Σ zᵢ eᵢ)`.
pub(crate) struct SphereLocal {
    base: Vec<f64>,
    tangents: Vec<Vec<f64>>,
}

impl SphereLocal {
    pub(crate) fn new(u0: &[f64]) -> Self {
        SphereLocal { base: u0.to_vec(), tangents: complement_basis(u0) }
    }

    pub(crate) fn params(&self) -> usize {
        self.tangents.len()
    }

    pub(crate) fn point(&self, z: &[f64]) -> Vec<f64> {
        let mut v = self.base.clone();
        for (t, zi) in self.tangents.iter().zip(z) {
            v.iter_mut().zip(t).for_each(|(a, b)| *a += zi * b);
        }
        let len = norm(&v);
        v.iter().map(|x| x / len).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extended_space::euclidean_distance;

    #[test]
    fn ball_chart_stays_on_the_sphere() {
        let g = DomainSpec::ball(vec![1.0, -2.0, 0.5], 1.5).unwrap();
        let chart = BoundaryChart::new(&g, Some(&[1.3, -1.5, 0.9])).unwrap();
        for u in sphere_samples(3, 500) {
            let p = chart.point(&u);
            let d = euclidean_distance(p.coords().unwrap(), &[1.0, -2.0, 0.5]);
            assert!((d - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn half_space_chart_hits_the_wall_and_infinity() {
        let g = DomainSpec::upper_half_space(2);
        let chart = BoundaryChart::new(&g, Some(&[0.7, 0.2])).unwrap();
        let samples = sphere_samples(2, 1024);
        assert_eq!(chart.point(&samples[256]), ExtendedPoint::Infinity);
        assert_eq!(chart.point(&samples[768]).coords().unwrap()[0], 0.7);
        for u in &samples {
            if let Some(v) = chart.point(u).coords() {
                assert_eq!(v[1], 0.0);
            }
        }
    }

    #[test]
    fn samples_are_unit_and_counted() {
        for n in 2..=5 {
            let s = sphere_samples(n, 300);
            assert_eq!(s.len(), if n == 2 { 300 } else { 302 });
            assert!(s.iter().all(|u| (norm(u) - 1.0).abs() < 1e-12));
        }
        let b = complement_basis(&[0.0, 0.6, 0.8]);
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|v| dot(v, &[0.0, 0.6, 0.8]).abs() < 1e-15));
    }
}
