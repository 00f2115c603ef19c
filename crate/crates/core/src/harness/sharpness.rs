//! Ratios of metrics along the extremal sequences showing the constants
//! are sharp.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{tolerances, CheckSummary, MarginKind, SharpConstants, VerificationReport};
use crate::domains::{DomainSpec, SupremumStrategy};
use crate::error::{Error, Result};
use crate::extended_space::{check_dim, ExtendedPoint};
use crate::metrics::{self, Exponent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SharpnessCase {
    #[serde(rename = "thm13i-upper")]
    Thm13iUpper,
    #[serde(rename = "thm13ii-lower")]
    Thm13iiLower,
    #[serde(rename = "thm15-lower")]
    Thm15Lower,
    #[serde(rename = "thm15-upper")]
    Thm15Upper,
    #[serde(rename = "thm15iii")]
    Thm15iii,
}

impl SharpnessCase {
    pub const ALL: [SharpnessCase; 5] = [
        SharpnessCase::Thm13iUpper,
        SharpnessCase::Thm13iiLower,
        SharpnessCase::Thm15Lower,
        SharpnessCase::Thm15Upper,
        SharpnessCase::Thm15iii,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SharpnessCase::Thm13iUpper => "thm13i-upper",
            SharpnessCase::Thm13iiLower => "thm13ii-lower",
            SharpnessCase::Thm15Lower => "thm15-lower",
            SharpnessCase::Thm15Upper => "thm15-upper",
            SharpnessCase::Thm15iii => "thm15iii",
        }
    }

    /// Allowed distance between the last ratio of the trace and the limit.
    pub fn final_tolerance(self) -> f64 {
        match self {
            SharpnessCase::Thm13iUpper => 1e-10,
            SharpnessCase::Thm13iiLower | SharpnessCase::Thm15Lower => 1e-6,
            SharpnessCase::Thm15Upper => 1e-5,
            SharpnessCase::Thm15iii => 5e-3,
        }
    }
}

impl fmt::Display for SharpnessCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SharpnessCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SharpnessCase::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "sharpness case", name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub case: SharpnessCase,
    /// Number of trace points.
    pub resolution: usize,
    pub dimension: usize,
    pub p: Exponent,
    /// Only used by the cases comparing two exponents.
    pub q: Exponent,
}

impl SweepConfig {
    pub fn new(case: SharpnessCase) -> Self {
        let p = match case {
            SharpnessCase::Thm15iii => Exponent::Finite(1.0),
            _ => Exponent::Infinity,
        };
        SweepConfig { case, resolution: 25, dimension: 2, p, q: Exponent::Finite(1.0) }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dimension)?;
        if self.resolution < 2 {
            return Err(Error::InvalidDomain("a sweep needs at least two points".into()));
        }
        if self.q > self.p && matches!(self.case, SharpnessCase::Thm15Lower | SharpnessCase::Thm15Upper) {
            return Err(Error::InvalidExponent(format!("pair (p, q) = ({}, {}) needs q <= p", self.p, self.q)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// The sweep variable; it tends to 0 along the trace except for
    /// `thm15-lower`, where it is `|x|` and grows.
    pub parameter: f64,
    pub ratio: f64,
    /// `j^p(x, y) / log|x|` for `thm15-lower`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config: SweepConfig,
    pub parameter: String,
    pub ratio: String,
    pub claimed_limit: f64,
    pub final_ratio: f64,
    /// Linear extrapolation of the last two trace points.
    pub limit_estimate: f64,
    pub final_tolerance: f64,
    pub final_within_tolerance: bool,
    pub monotone_final_decade: bool,
}

/// `count` log-spaced values from `from` to `to`.
fn geometric(from: f64, to: f64, count: usize) -> Vec<f64> {
    let (a, b) = (from.ln(), to.ln());
    (0..count).map(|k| if k + 1 == count { to } else { (a + (b - a) * k as f64 / (count - 1) as f64).exp() }).collect()
}

fn ex() -> SupremumStrategy {
    SupremumStrategy::exhaustive()
}

/// Evaluates the ratio of two metrics along an extremal sequence. The
/// report fails if the last ratio misses the limit by more than the case
/// tolerance or if the trace moves away from the limit (by more than
/// `1e−9`) anywhere in its final decade.
pub fn sharpness_sweep(cfg: &SweepConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let (p, q) = (cfg.p, cfg.q);
    let k = SharpConstants::compute();
    let mut notes = Vec::new();

    let (parameter, ratio_name, limit, trace): (&str, String, f64, Vec<TracePoint>) = match cfg.case {
        SharpnessCase::Thm13iUpper => {
            let g = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
            let (x, y) = (ExtendedPoint::basis(n, 0), ExtendedPoint::scaled_basis(n, 0, -1.0));
            let r = metrics::rho(&g, &x, &y, &ex())?.value / metrics::delta(&g, &x, &y, &ex())?.value;
            notes.push("single extremal configuration x = e1, y = -e1 on the punctured space".into());
            ("none", "rho / delta".into(), k.c13i, vec![TracePoint { parameter: 0.0, ratio: r, aux: None }])
        }
        SharpnessCase::Thm13iiLower => {
            let g = DomainSpec::upper_half_space(n);
            let x = ExtendedPoint::basis(n, n - 1);
            let strategy = SupremumStrategy::default_for(&g);
            let mut trace = Vec::with_capacity(cfg.resolution);
            for t in geometric(1.0, 1e-6, cfg.resolution) {
                let y = ExtendedPoint::scaled_basis(n, n - 1, 1.0 + t);
                let rho = metrics::rho(&g, &x, &y, &strategy)?.value;
                let j = metrics::j_classic(&g, &x, &y)?.value;
                trace.push(TracePoint { parameter: t, ratio: rho / j, aux: None });
            }
            notes.push("x = e_n, y = (1 + t) e_n on the upper half-space; rho by grid refinement".into());
            ("t", "rho / j".into(), 1.0, trace)
        }
        SharpnessCase::Thm15Lower => {
            let g = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
            let y = ExtendedPoint::basis(n, 0);
            let mut trace = Vec::with_capacity(cfg.resolution);
            for t in geometric(10.0, 1e8, cfg.resolution) {
                let x = ExtendedPoint::scaled_basis(n, 1, t);
                let jp = metrics::j_p(&g, &x, &y, p, &ex())?.value;
                let jq = metrics::j_p(&g, &x, &y, q, &ex())?.value;
                trace.push(TracePoint { parameter: t, ratio: jq / jp, aux: Some(jp / t.ln()) });
            }
            notes.push("y = e1, x = t e2 on the punctured space, t = |x| grows".into());
            notes.push("aux is j^p / log|x|; it tends to 1".into());
            ("|x|", format!("j^{q} / j^{p}"), 1.0, trace)
        }
        SharpnessCase::Thm15Upper => {
            let g = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
            let x = ExtendedPoint::basis(n, 0);
            let mut trace = Vec::with_capacity(cfg.resolution);
            for s in geometric(1e-1, 1e-6, cfg.resolution) {
                let theta = 2.0 * (0.5 * s).asin();
                let mut v = vec![0.0; n];
                v[0] = theta.cos();
                v[1] = theta.sin();
                let y = ExtendedPoint::Finite(v);
                let dp = metrics::delta_p(&g, &x, &y, p, &ex())?.value;
                let dq = metrics::delta_p(&g, &x, &y, q, &ex())?.value;
                trace.push(TracePoint { parameter: s, ratio: dq / dp, aux: None });
            }
            notes.push("|x| = |y| = 1 on the punctured space, s = |x - y| tends to 0".into());
            ("|x - y|", format!("delta^{q} / delta^{p}"), SharpConstants::c15(p, q), trace)
        }
        SharpnessCase::Thm15iii => {
            let g = DomainSpec::punctured(vec![ExtendedPoint::scaled_basis(n, 0, -1.0), ExtendedPoint::basis(n, 0)])?;
            let mut trace = Vec::with_capacity(cfg.resolution);
            for eps in geometric(1e-1, 1e-3, cfg.resolution) {
                let x = ExtendedPoint::scaled_basis(n, 1, eps);
                let y = ExtendedPoint::scaled_basis(n, 1, -eps);
                let d = metrics::delta_p(&g, &x, &y, p, &ex())?.value;
                let j = metrics::j_p(&g, &x, &y, p, &ex())?.value;
                trace.push(TracePoint { parameter: eps, ratio: d / j, aux: None });
            }
            notes.push("x = eps e2, y = -eps e2, boundary {-e1, e1, inf}; suprema by enumeration".into());
            notes.push("the finite boundary pair gives cross-ratio terms 4 eps / (1 + eps^2) for delta^p".into());
            ("eps", format!("delta^{p} / j^{p}"), k.c15iii, trace)
        }
    };

    let last = trace[trace.len() - 1];
    let limit_estimate = if trace.len() >= 2 {
        let prev = trace[trace.len() - 2];
        let (h1, h2) = extrapolation_vars(cfg.case, prev.parameter, last.parameter);
        last.ratio - h2 * (prev.ratio - last.ratio) / (h1 - h2)
    } else {
        last.ratio
    };
    let tol = cfg.case.final_tolerance();
    let final_dev = (last.ratio - limit).abs();
    let final_within = final_dev <= tol * limit.abs().max(1.0);

    // Steps away from the limit within the last decade of the sweep variable.
    let decade_start = trace
        .iter()
        .position(|t| match cfg.case {
            SharpnessCase::Thm15Lower => t.parameter >= last.parameter / 10.0,
            _ => t.parameter <= last.parameter * 10.0,
        })
        .unwrap_or(0);
    let worst_step = trace[decade_start..]
        .windows(2)
        .map(|w| (w[0].ratio - limit).abs() - (w[1].ratio - limit).abs())
        .fold(f64::INFINITY, f64::min);
    let monotone = trace.len() < 2 || worst_step >= -tolerances::TRACE_MONOTONE;

    let checks = vec![
        CheckSummary {
            name: "final ratio near limit".into(),
            asserted: true,
            margin_kind: MarginKind::Absolute,
            evaluations: 1,
            violations: usize::from(!final_within),
            worst_margin: tol * limit.abs().max(1.0) - final_dev,
            max_ratio: None,
        },
        CheckSummary {
            name: "trace monotone toward limit in final decade".into(),
            asserted: true,
            margin_kind: MarginKind::Absolute,
            evaluations: trace.len().saturating_sub(decade_start + 1),
            violations: usize::from(!monotone),
            worst_margin: if worst_step.is_finite() { worst_step } else { 0.0 },
            max_ratio: None,
        },
    ];
    let n_violations = checks.iter().map(|c| c.violations).sum();
    let worst_margin = checks.iter().map(|c| c.worst_margin).reduce(f64::min);

    Ok(VerificationReport {
        suite: format!("sharpness:{}", cfg.case),
        seed: 0,
        dimension: n,
        n_cases: trace.len(),
        n_violations,
        worst_margin,
        sharpest_ratio: Some(last.ratio),
        witnesses: Vec::new(),
        checks,
        probes: Vec::new(),
        probe_witnesses: Vec::new(),
        sweep: Some(SweepSummary {
            config: cfg.clone(),
            parameter: parameter.into(),
            ratio: ratio_name,
            claimed_limit: limit,
            final_ratio: last.ratio,
            limit_estimate,
            final_tolerance: tol,
            final_within_tolerance: final_within,
            monotone_final_decade: monotone,
        }),
        trace,
        config: None,
        notes,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// Variables that vanish at the limit, in which the ratio is close to linear.
fn extrapolation_vars(case: SharpnessCase, a: f64, b: f64) -> (f64, f64) {
    match case {
        SharpnessCase::Thm15Lower => (1.0 / a, 1.0 / b),
        _ => (a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_converges() {
        for case in SharpnessCase::ALL {
            let r = sharpness_sweep(&SweepConfig::new(case)).unwrap();
            let s = r.sweep.as_ref().unwrap();
            assert!(r.passed(), "{case}: {s:?}");
            assert!((s.limit_estimate - s.claimed_limit).abs() <= (s.final_ratio - s.claimed_limit).abs() + 1e-9);
        }
    }

    #[test]
    fn thm15iii_value_at_the_last_point() {
        let r = sharpness_sweep(&SweepConfig::new(SharpnessCase::Thm15iii)).unwrap();
        let last = r.trace.last().unwrap();
        assert_eq!(last.parameter, 1e-3);
        assert!((last.ratio - 1.996_022_854_291_676).abs() < 1e-12, "{}", last.ratio);
    }

    #[test]
    fn thm15_upper_last_point() {
        let r = sharpness_sweep(&SweepConfig::new(SharpnessCase::Thm15Upper)).unwrap();
        let last = r.trace.last().unwrap();
        assert_eq!(last.parameter, 1e-6);
        assert!((last.ratio - 2.0).abs() < 1e-5);
        assert!((last.ratio - 1.999_999_000_2).abs() < 1e-9, "{}", last.ratio);
    }

    #[test]
    fn parsing_and_validation() {
        for c in SharpnessCase::ALL {
            assert_eq!(c.as_str().parse::<SharpnessCase>().unwrap(), c);
        }
        assert!("thm99".parse::<SharpnessCase>().is_err());
        let mut cfg = SweepConfig::new(SharpnessCase::Thm15Upper);
        cfg.q = Exponent::Infinity;
        cfg.p = Exponent::Finite(1.0);
        assert!(sharpness_sweep(&cfg).is_err());
    }
}
