//! Verification suites for the comparison inequalities between the metrics,
//! sharpness sweeps along extremal sequences, and JSON reports.
//!
//! Every suite is a pure function of its [`SuiteConfig`]: case `i` draws from
//! its own ChaCha stream, cases run in parallel, and results are folded in
//! case order, so reports are byte-identical across runs apart from
//! `runtime_ms`.

mod generate;
mod sharpness;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::extended_space::{arch_1p_raw, check_dim, ExtendedPoint};
use crate::metrics::Exponent;
use crate::mobius::MobiusMap;

pub use generate::{case_rng, random_configuration, random_separated_points, Configuration, GeneratorParams};
pub use sharpness::{sharpness_sweep, SharpnessCase, SweepConfig, SweepSummary, TracePoint};
pub use suites::{
    bound_probe, check_theorem_1_3, check_theorem_1_5, invariance_suite, metric_axiom_suite, monotonicity_suite,
    oracle_suite,
};

/// Numerical tolerances used by the suites.
pub mod tolerances {
    /// Relative slack added to every sharp constant.
    pub const SHARP_SLACK: f64 = 1e-12;
    /// Absolute slack in the triangle inequality.
    pub const TRIANGLE: f64 = 1e-10;
    /// Relative deviation allowed between a metric value and its Möbius image.
    pub const INVARIANCE_METRIC: f64 = 1e-9;
    /// Relative deviation allowed between a cross-ratio and its Möbius image.
    pub const INVARIANCE_CROSS_RATIO: f64 = 1e-10;
    /// Absolute gap allowed between optimized and closed-form hyperbolic distances.
    pub const ORACLE: f64 = 1e-6;
    /// Allowed backwards step of a sharpness trace.
    pub const TRACE_MONOTONE: f64 = 1e-9;
    /// Relative gap allowed when a witness must match a ratio computed by
    /// grid refinement instead of exact enumeration.
    pub const REFINED_WITNESS: f64 = 1e-9;
    /// Recorded witnesses per report-only probe.
    pub const PROBE_WITNESS_CAP: usize = 100;
}

/// The sharp constants, computed from `arch` and `log` on first use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstants {
    /// `arch 3 / log 3`.
    pub c13i: f64,
    /// `arch 3 / log 2`.
    pub c13ii: f64,
    pub c15iii: f64,
}

impl SharpConstants {
    pub fn compute() -> Self {
        let arch3 = arch_1p_raw(2.0);
        SharpConstants { c13i: arch3 / 3f64.ln(), c13ii: arch3 / 2f64.ln(), c15iii: 2.0 }
    }

    /// `2^{1/q − 1/p}`.
    pub fn c15(p: Exponent, q: Exponent) -> f64 {
        2f64.powf(q.recip() - p.recip())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    Thm13,
    Thm15,
    Axioms,
    Invariance,
    Monotonicity,
    BoundProbe,
    Oracle,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::Thm13,
        SuiteId::Thm15,
        SuiteId::Axioms,
        SuiteId::Invariance,
        SuiteId::Monotonicity,
        SuiteId::BoundProbe,
        SuiteId::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Thm13 => "thm13",
            SuiteId::Thm15 => "thm15",
            SuiteId::Axioms => "axioms",
            SuiteId::Invariance => "invariance",
            SuiteId::Monotonicity => "monotonicity",
            SuiteId::BoundProbe => "bound-probe",
            SuiteId::Oracle => "oracle",
        }
    }

    /// Report-only suites never count violations.
    pub fn is_probe(self) -> bool {
        self == SuiteId::BoundProbe
    }

    pub fn default_samples(self) -> usize {
        match self {
            SuiteId::Thm13 | SuiteId::Thm15 => 10_000,
            SuiteId::Axioms => 100_000,
            SuiteId::Invariance | SuiteId::Oracle => 100,
            SuiteId::Monotonicity | SuiteId::BoundProbe => 1_000,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "suite", name: s.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteId,
    pub dimension: usize,
    pub samples: usize,
    pub seed: u64,
    /// `(p, q)` pairs with `q ≤ p`.
    pub exponent_pairs: Vec<(Exponent, Exponent)>,
    /// Relative slack added to sharp constants.
    pub tolerance: f64,
    pub generator: GeneratorParams,
}

impl SuiteConfig {
    pub fn new(suite: SuiteId, dimension: usize, seed: u64) -> Self {
        use Exponent::{Finite, Infinity};
        SuiteConfig {
            suite,
            dimension,
            samples: suite.default_samples(),
            seed,
            exponent_pairs: vec![
                (Finite(2.0), Finite(1.0)),
                (Infinity, Finite(1.0)),
                (Infinity, Finite(2.0)),
                (Finite(4.0), Finite(0.5)),
            ],
            tolerance: tolerances::SHARP_SLACK,
            generator: GeneratorParams::default(),
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_pairs(mut self, pairs: Vec<(Exponent, Exponent)>) -> Self {
        self.exponent_pairs = pairs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dimension)?;
        if self.samples == 0 {
            return Err(Error::InvalidDomain("samples must be positive".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidDomain(format!("invalid tolerance {}", self.tolerance)));
        }
        for (p, q) in &self.exponent_pairs {
            if q > p {
                return Err(Error::InvalidExponent(format!("pair (p, q) = ({p}, {q}) needs q <= p")));
            }
        }
        self.generator.validate()
    }

    /// Distinct exponents appearing in the pairs, in first-seen order.
    pub fn exponents(&self) -> Vec<Exponent> {
        let mut out: Vec<Exponent> = Vec::new();
        for (p, q) in &self.exponent_pairs {
            for e in [*p, *q] {
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    /// `(rhs − lhs) / max(|lhs|, |rhs|)`.
    Relative,
    /// `rhs − lhs`.
    Absolute,
}

/// Tally for one named inequality or identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub asserted: bool,
    pub margin_kind: MarginKind,
    pub evaluations: usize,
    pub violations: usize,
    /// Smallest margin seen; negative means `lhs > rhs`.
    pub worst_margin: f64,
    /// Largest `lhs / rhs` seen, for inequalities between positive values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<f64>,
}

/// A fully replayable configuration attached to a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub case: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub domain: DomainSpec,
    pub points: Vec<ExtendedPoint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<ExtendedPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested_domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MobiusMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub dimension: usize,
    pub n_cases: usize,
    /// Violations of asserted checks. Probes are tallied separately.
    pub n_violations: usize,
    pub worst_margin: Option<f64>,
    /// Largest `lhs / rhs` over the asserted inequalities, where `1` means
    /// the sharp constant was attained. Sweeps report their final ratio.
    pub sharpest_ratio: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub checks: Vec<CheckSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<CheckSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probe_witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SuiteConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.n_violations == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().chain(&self.probes).find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// The JSON form with the wall-clock field zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.runtime_ms = 0;
        r.to_json()
    }
}

/// Everything a check needs to produce a replayable witness.
#[derive(Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub domain: &'a DomainSpec,
    pub points: &'a [ExtendedPoint],
    pub exponents: &'a [Exponent],
    pub base_point: Option<&'a ExtendedPoint>,
    pub nested_domain: Option<&'a DomainSpec>,
    pub map: Option<&'a MobiusMap>,
}

impl<'a> Ctx<'a> {
    pub fn new(domain: &'a DomainSpec, points: &'a [ExtendedPoint]) -> Self {
        Ctx { domain, points, exponents: &[], base_point: None, nested_domain: None, map: None }
    }

    pub fn exponents(mut self, e: &'a [Exponent]) -> Self {
        self.exponents = e;
        self
    }

    pub fn base_point(mut self, b: &'a ExtendedPoint) -> Self {
        self.base_point = Some(b);
        self
    }

    pub fn nested(mut self, g: &'a DomainSpec) -> Self {
        self.nested_domain = Some(g);
        self
    }

    pub fn map(mut self, m: &'a MobiusMap) -> Self {
        self.map = Some(m);
        self
    }
}

struct Entry {
    check: String,
    asserted: bool,
    kind: MarginKind,
    margin: f64,
    ratio: Option<f64>,
    witness: Option<Witness>,
}

/// Outcomes of one case, folded into the report in case order.
pub(crate) struct CaseLog {
    case: String,
    entries: Vec<Entry>,
}

impl CaseLog {
    pub fn new(case: impl Into<String>) -> Self {
        CaseLog { case: case.into(), entries: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        check: String,
        asserted: bool,
        kind: MarginKind,
        margin: f64,
        violated: bool,
        ratio: Option<f64>,
        lhs: f64,
        rhs: f64,
        ctx: &Ctx<'_>,
    ) {
        let witness = violated.then(|| Witness {
            case: self.case.clone(),
            check: check.clone(),
            lhs,
            rhs,
            domain: ctx.domain.clone(),
            points: ctx.points.to_vec(),
            exponents: ctx.exponents.to_vec(),
            base_point: ctx.base_point.cloned(),
            nested_domain: ctx.nested_domain.cloned(),
            map: ctx.map.cloned(),
        });
        self.entries.push(Entry { check, asserted, kind, margin, ratio, witness });
    }

    /// `lhs ≤ rhs` up to relative slack `tol`.
    pub fn le_rel(&mut self, check: String, lhs: f64, rhs: f64, tol: f64, asserted: bool, ctx: &Ctx<'_>) {
        let scale = lhs.abs().max(rhs.abs());
        let margin = if scale == 0.0 { 0.0 } else { (rhs - lhs) / scale };
        let violated = !(margin >= -tol);
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        self.push(check, asserted, MarginKind::Relative, margin, violated, ratio, lhs, rhs, ctx);
    }

    /// `lhs ≤ rhs + tol`.
    pub fn le_abs(&mut self, check: String, lhs: f64, rhs: f64, tol: f64, asserted: bool, ctx: &Ctx<'_>) {
        let margin = rhs - lhs;
        let violated = !(margin >= -tol);
        self.push(check, asserted, MarginKind::Absolute, margin, violated, None, lhs, rhs, ctx);
    }

    /// `|a − b| ≤ tol · max(|a|, |b|)`.
    pub fn close_rel(&mut self, check: String, a: f64, b: f64, tol: f64, ctx: &Ctx<'_>) {
        let scale = a.abs().max(b.abs());
        let dev = if scale == 0.0 { 0.0 } else { (a - b).abs() / scale };
        let violated = !(dev <= tol);
        self.push(check, true, MarginKind::Relative, -dev, violated, None, a, b, ctx);
    }
}

#[derive(Default)]
pub(crate) struct Folded {
    pub checks: Vec<CheckSummary>,
    pub probes: Vec<CheckSummary>,
    pub witnesses: Vec<Witness>,
    pub probe_witnesses: Vec<Witness>,
}

impl Folded {
    pub fn add(&mut self, log: CaseLog) {
        for e in log.entries {
            let list = if e.asserted { &mut self.checks } else { &mut self.probes };
            let idx = match list.iter().position(|c| c.name == e.check) {
                Some(i) => i,
                None => {
                    list.push(CheckSummary {
                        name: e.check.clone(),
                        asserted: e.asserted,
                        margin_kind: e.kind,
                        evaluations: 0,
                        violations: 0,
                        worst_margin: f64::INFINITY,
                        max_ratio: None,
                    });
                    list.len() - 1
                }
            };
            let c = &mut list[idx];
            c.evaluations += 1;
            if e.margin.is_nan() || e.margin < c.worst_margin {
                c.worst_margin = e.margin;
            }
            if let Some(r) = e.ratio {
                c.max_ratio = Some(c.max_ratio.map_or(r, |m| m.max(r)));
            }
            if let Some(w) = e.witness {
                c.violations += 1;
                if e.asserted {
                    self.witnesses.push(w);
                } else if self.probe_witnesses.len() < tolerances::PROBE_WITNESS_CAP {
                    self.probe_witnesses.push(w);
                }
            }
        }
    }

    pub fn into_report(self, cfg: &SuiteConfig, n_cases: usize, started: Instant) -> VerificationReport {
        let n_violations = self.checks.iter().map(|c| c.violations).sum();
        let worst_margin = self.checks.iter().map(|c| c.worst_margin).filter(|m| m.is_finite()).reduce(f64::min);
        let sharpest_ratio = self.checks.iter().filter_map(|c| c.max_ratio).reduce(f64::max);
        VerificationReport {
            suite: cfg.suite.as_str().to_string(),
            seed: cfg.seed,
            dimension: cfg.dimension,
            n_cases,
            n_violations,
            worst_margin,
            sharpest_ratio,
            witnesses: self.witnesses,
            checks: self.checks,
            probes: self.probes,
            probe_witnesses: self.probe_witnesses,
            trace: Vec::new(),
            sweep: None,
            config: Some(cfg.clone()),
            notes: Vec::new(),
            runtime_ms: started.elapsed().as_millis() as u64,
        }
    }
}

/// Runs the suite named in `cfg`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    match cfg.suite {
        SuiteId::Thm13 => check_theorem_1_3(cfg),
        SuiteId::Thm15 => check_theorem_1_5(cfg),
        SuiteId::Axioms => metric_axiom_suite(cfg),
        SuiteId::Invariance => invariance_suite(cfg),
        SuiteId::Monotonicity => monotonicity_suite(cfg),
        SuiteId::BoundProbe => bound_probe(cfg),
        SuiteId::Oracle => oracle_suite(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_constants() {
        let k = SharpConstants::compute();
        assert!((k.c13i - 1.604_521_624_4).abs() < 1e-9);
        assert!((k.c13ii - 2.543_106_606_3).abs() < 1e-9);
        assert_eq!(SharpConstants::c15(Exponent::Infinity, Exponent::Finite(1.0)), 2.0);
        assert_eq!(SharpConstants::c15(Exponent::Finite(2.0), Exponent::Finite(2.0)), 1.0);
        assert!((SharpConstants::c15(Exponent::Finite(4.0), Exponent::Finite(0.5)) - 2f64.powf(1.75)).abs() < 1e-15);
    }

    #[test]
    fn suite_ids_and_config_validation() {
        for id in SuiteId::ALL {
            assert_eq!(id.as_str().parse::<SuiteId>().unwrap(), id);
        }
        assert!("nope".parse::<SuiteId>().is_err());
        let cfg = SuiteConfig::new(SuiteId::Thm15, 2, 1);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.exponents().len(), 5);
        let bad = cfg.clone().with_pairs(vec![(Exponent::Finite(1.0), Exponent::Finite(2.0))]);
        assert!(bad.validate().is_err());
        let mut bad_dim = cfg;
        bad_dim.dimension = 1;
        assert!(bad_dim.validate().is_err());
    }

    #[test]
    fn folding_tallies_margins_and_witnesses() {
        let g = DomainSpec::punctured(vec!["0,0".parse().unwrap()]).unwrap();
        let pts = vec!["1,0".parse().unwrap()];
        let ctx = Ctx::new(&g, &pts);
        let mut folded = Folded::default();
        let mut a = CaseLog::new("a");
        a.le_rel("x".into(), 1.0, 2.0, 1e-12, true, &ctx);
        a.le_rel("p".into(), 3.0, 2.0, 0.0, false, &ctx);
        let mut b = CaseLog::new("b");
        b.le_rel("x".into(), 2.0, 1.0, 1e-12, true, &ctx);
        b.le_abs("y".into(), 1.0, 1.0, 0.0, true, &ctx);
        folded.add(a);
        folded.add(b);
        let cfg = SuiteConfig::new(SuiteId::Thm13, 2, 0);
        let r = folded.into_report(&cfg, 2, Instant::now());
        assert_eq!(r.n_violations, 1);
        assert_eq!(r.witnesses[0].case, "b");
        assert_eq!(r.probes[0].violations, 1);
        assert_eq!(r.probe_witnesses.len(), 1);
        assert_eq!(r.worst_margin, Some(-0.5));
        assert_eq!(r.check("x").unwrap().max_ratio, Some(2.0));
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
