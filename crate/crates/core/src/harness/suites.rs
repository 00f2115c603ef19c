use std::fmt;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generate::{case_rng, random_configuration, random_separated_points};
use super::{tolerances, CaseLog, Ctx, Folded, SharpConstants, SuiteConfig, VerificationReport};
use crate::domains::{DomainSpec, SupremumStrategy};
use crate::error::Result;
use crate::extended_space::{chordal_raw, cross_ratio_raw, spherical_diameter, ExtendedPoint};
use crate::metrics::{self, Exponent};
use crate::mobius::{random_box, random_mobius, random_unit};

fn exhaustive() -> SupremumStrategy {
    SupremumStrategy::exhaustive()
}

/// Runs `documented` cases first and then `cfg.samples` random cases, each
/// on its own stream, and folds the logs in order.
fn run_cases<F>(cfg: &SuiteConfig, started: Instant, documented: Vec<CaseLog>, case: F) -> Result<VerificationReport>
where
    F: Fn(&mut ChaCha8Rng) -> Result<CaseLog> + Sync,
{
    let n_documented = documented.len();
    let logs: Vec<CaseLog> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(cfg.seed, i as u64);
            case(&mut rng).map(|mut log| {
                log.case = format!("random #{i}");
                log
            })
        })
        .collect::<Result<_>>()?;
    let mut folded = Folded::default();
    for log in documented.into_iter().chain(logs) {
        folded.add(log);
    }
    Ok(folded.into_report(cfg, n_documented + cfg.samples, started))
}

fn pick<'a, R: Rng>(rng: &mut R, pts: &'a [ExtendedPoint]) -> &'a ExtendedPoint {
    &pts[rng.random_range(0..pts.len())]
}

fn e1_pair(n: usize) -> Vec<ExtendedPoint> {
    vec![ExtendedPoint::basis(n, 0), ExtendedPoint::scaled_basis(n, 0, -1.0)]
}

fn thm13_chain(
    log: &mut CaseLog,
    k: &SharpConstants,
    tol: f64,
    g: &DomainSpec,
    ge: &DomainSpec,
    pts: &[ExtendedPoint],
) -> Result<(f64, f64, f64)> {
    let (x, y) = (&pts[0], &pts[1]);
    let rho = metrics::rho(g, x, y, &exhaustive())?.value;
    let delta = metrics::delta(g, x, y, &exhaustive())?.value;
    let ctx = Ctx::new(g, pts);
    log.le_rel("delta <= rho".into(), delta, rho, tol, true, &ctx);
    log.le_rel("rho <= c13i * delta".into(), rho, k.c13i * delta, tol, true, &ctx);

    let rho_e = if ge == g { rho } else { metrics::rho(ge, x, y, &exhaustive())?.value };
    let j = metrics::j_classic(ge, x, y)?.value;
    let ctx = Ctx::new(ge, pts);
    log.le_rel("j <= rho".into(), j, rho_e, tol, true, &ctx);
    log.le_rel("rho <= c13ii * j".into(), rho_e, k.c13ii * j, tol, true, &ctx);
    Ok((rho, delta, j))
}

/// `δ ≤ ρ ≤ (arch 3 / log 3) δ` on random finite-complement domains, and
/// `j ≤ ρ ≤ (arch 3 / log 2) j` on the same boundary with `∞` added.
/// The extremal configurations are checked first.
pub fn check_theorem_1_3(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let k = SharpConstants::compute();
    let (n, tol) = (cfg.dimension, cfg.tolerance);

    let punctured = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
    let pts = e1_pair(n);
    let mut first = CaseLog::new("witness: punctured space, x = e1, y = -e1");
    let (rho, delta, _) = thm13_chain(&mut first, &k, tol, &punctured, &punctured, &pts)?;
    first.close_rel("witness rho / delta = c13i".into(), rho / delta, k.c13i, tol, &Ctx::new(&punctured, &pts));

    let h = DomainSpec::upper_half_space(n);
    let hpts = vec![ExtendedPoint::basis(n, n - 1), ExtendedPoint::scaled_basis(n, n - 1, std::f64::consts::E)];
    let mut second = CaseLog::new("witness: half-space, x = e_n, y = e * e_n");
    let rho_h = metrics::rho(&h, &hpts[0], &hpts[1], &SupremumStrategy::default_for(&h))?.value;
    let j_h = metrics::j_classic(&h, &hpts[0], &hpts[1])?.value;
    let ctx = Ctx::new(&h, &hpts);
    second.close_rel("witness j = 1 on half-space".into(), j_h, 1.0, tol, &ctx);
    second.close_rel("witness rho / j = 1 on half-space".into(), rho_h / j_h, 1.0, tolerances::REFINED_WITNESS, &ctx);

    let mut report = run_cases(cfg, started, vec![first, second], |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 2, 2)?;
        let mut log = CaseLog::new("");
        thm13_chain(&mut log, &k, tol, &c.domain()?, &c.euclidean_domain()?, &c.points)?;
        Ok(log)
    })?;
    report.notes.push("j inequalities are evaluated on the sampled boundary with the point at infinity added".into());
    report.notes.push("the half-space witness uses grid refinement for rho and is compared at relative 1e-9".into());
    Ok(report)
}

fn thm15_chain(
    log: &mut CaseLog,
    cfg: &SuiteConfig,
    g: &DomainSpec,
    ge: &DomainSpec,
    pts: &[ExtendedPoint],
) -> Result<()> {
    let (x, y) = (&pts[0], &pts[1]);
    let tol = cfg.tolerance;
    let exps = cfg.exponents();
    let mut dg = Vec::with_capacity(exps.len());
    let mut dge = Vec::with_capacity(exps.len());
    let mut jge = Vec::with_capacity(exps.len());
    for &e in &exps {
        let d = metrics::delta_p(g, x, y, e, &exhaustive())?.value;
        dge.push(if ge == g { d } else { metrics::delta_p(ge, x, y, e, &exhaustive())?.value });
        dg.push(d);
        jge.push(metrics::j_p(ge, x, y, e, &exhaustive())?.value);
    }
    let at = |e: Exponent| exps.iter().position(|v| *v == e).unwrap_or(0);
    for &(p, q) in &cfg.exponent_pairs {
        let (ip, iq) = (at(p), at(q));
        let c = SharpConstants::c15(p, q);
        let pq = [p, q];
        let ctx = Ctx::new(g, pts).exponents(&pq);
        log.le_rel(format!("(i) delta^{p} <= delta^{q}"), dg[ip], dg[iq], tol, true, &ctx);
        log.le_rel(format!("(i) delta^{q} <= 2^(1/{q}-1/{p}) delta^{p}"), dg[iq], c * dg[ip], tol, true, &ctx);
        let ctx = Ctx::new(ge, pts).exponents(&pq);
        log.le_rel(format!("(ii) j^{p} <= j^{q}"), jge[ip], jge[iq], tol, true, &ctx);
        log.le_rel(format!("(ii) j^{q} <= 2^(1/{q}-1/{p}) j^{p}"), jge[iq], c * jge[ip], tol, true, &ctx);
    }
    for (i, &e) in exps.iter().enumerate() {
        let asserted = e.at_least_one();
        let one = [e];
        let ctx = Ctx::new(ge, pts).exponents(&one);
        log.le_rel(format!("(iii) j^{e} <= delta^{e}"), jge[i], dge[i], tol, asserted, &ctx);
        log.le_rel(format!("(iii) delta^{e} <= 2 j^{e}"), dge[i], 2.0 * jge[i], tol, asserted, &ctx);
    }
    Ok(())
}

/// The three chains comparing exponents `q ≤ p` within the δ and j
/// families and across them. The cross-family chain is asserted for `p ≥ 1`
/// and only tallied for `p < 1`.
pub fn check_theorem_1_5(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let punctured = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
    let pts = e1_pair(n);
    let mut first = CaseLog::new("witness: punctured space, x = e1, y = -e1");
    thm15_chain(&mut first, cfg, &punctured, &punctured, &pts)?;

    let mut report = run_cases(cfg, started, vec![first], |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 2, 2)?;
        let mut log = CaseLog::new("");
        thm15_chain(&mut log, cfg, &c.domain()?, &c.euclidean_domain()?, &c.points)?;
        Ok(log)
    })?;
    report.notes.push("j chains are evaluated on the sampled boundary with the point at infinity added".into());
    if cfg.exponents().iter().any(|e| !e.at_least_one()) {
        report.notes.push("the (iii) chain for exponents below 1 is report-only".into());
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Rho,
    Delta,
    DeltaP(Exponent),
    J,
    JP(Exponent),
    JPointed,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Rho => f.write_str("rho"),
            Family::Delta => f.write_str("delta"),
            Family::DeltaP(e) => write!(f, "delta^{e}"),
            Family::J => f.write_str("j"),
            Family::JP(e) => write!(f, "j^{e}"),
            Family::JPointed => f.write_str("j_pointed"),
        }
    }
}

impl Family {
    fn euclidean(self) -> bool {
        matches!(self, Family::J | Family::JP(_))
    }

    fn exponent(self) -> Option<Exponent> {
        match self {
            Family::DeltaP(e) | Family::JP(e) => Some(e),
            _ => None,
        }
    }

    fn eval(self, g: &DomainSpec, b: &ExtendedPoint, x: &ExtendedPoint, y: &ExtendedPoint) -> Result<f64> {
        let s = exhaustive();
        Ok(match self {
            Family::Rho => metrics::rho(g, x, y, &s)?,
            Family::Delta => metrics::delta(g, x, y, &s)?,
            Family::DeltaP(e) => metrics::delta_p(g, x, y, e, &s)?,
            Family::J => metrics::j_classic(g, x, y)?,
            Family::JP(e) => metrics::j_p(g, x, y, e, &s)?,
            Family::JPointed => metrics::j_pointed(g, b, x, y, &s)?,
        }
        .value)
    }
}

fn families(exps: &[Exponent], include_j: bool) -> Vec<Family> {
    let mut out = vec![Family::Rho, Family::Delta];
    out.extend(exps.iter().map(|&e| Family::DeltaP(e)));
    if include_j {
        out.push(Family::J);
        out.extend(exps.iter().map(|&e| Family::JP(e)));
    }
    out.push(Family::JPointed);
    out
}

/// Symmetry (exact) and the triangle inequality (absolute slack `1e−10`) for
/// every family, with `p ≥ 1` for the exponent families. Each case draws a
/// domain, a triple and a base point `b ∈ ∂G` for `j_{G,b}`.
pub fn metric_axiom_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let exps: Vec<Exponent> = cfg.exponents().into_iter().filter(|e| e.at_least_one()).collect();
    let fams = families(&exps, true);
    let mut report = run_cases(cfg, started, Vec::new(), |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 3, 2)?;
        let b = pick(rng, &c.boundary).clone();
        let (g, ge) = (c.domain()?, c.euclidean_domain()?);
        let (x, y, z) = (&c.points[0], &c.points[1], &c.points[2]);
        let mut log = CaseLog::new("");
        for &fam in &fams {
            let dom = if fam.euclidean() { &ge } else { &g };
            let e: Vec<Exponent> = fam.exponent().into_iter().collect();
            let mut ctx = Ctx::new(dom, &c.points).exponents(&e);
            if fam == Family::JPointed {
                ctx = ctx.base_point(&b);
            }
            let dxy = fam.eval(dom, &b, x, y)?;
            let dyx = fam.eval(dom, &b, y, x)?;
            let dyz = fam.eval(dom, &b, y, z)?;
            let dxz = fam.eval(dom, &b, x, z)?;
            log.le_abs(format!("symmetry {fam}"), (dxy - dyx).abs(), 0.0, 0.0, true, &ctx);
            log.le_abs(format!("triangle {fam}"), dxz, dxy + dyz, tolerances::TRIANGLE, true, &ctx);
        }
        Ok(log)
    })?;
    report.notes.push("points are (x, y, z); the triangle check is d(x,z) <= d(x,y) + d(y,z)".into());
    report.notes.push("j families use the sampled boundary with the point at infinity added".into());
    Ok(report)
}

/// Values of `ρ`, `δ^p` and `j_{G,b}` and random cross-ratios compared with
/// their images under one seeded random Möbius map per case.
pub fn invariance_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    const QUADRUPLES_PER_CASE: usize = 100;
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let fams = families(&cfg.exponents(), false);
    let mut report = run_cases(cfg, started, Vec::new(), |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 2, 2)?;
        let b = pick(rng, &c.boundary).clone();
        let map = random_mobius(rng.random(), n)?;
        let g = c.domain()?;
        let image = map.apply_domain(&g)?.domain;
        let moved: Vec<ExtendedPoint> = c.points.iter().map(|p| map.apply(p)).collect::<Result<_>>()?;
        let b_img = map.apply(&b)?;
        let mut log = CaseLog::new("");
        for &fam in &fams {
            let e: Vec<Exponent> = fam.exponent().into_iter().collect();
            let mut ctx = Ctx::new(&g, &c.points).exponents(&e).map(&map);
            if fam == Family::JPointed {
                ctx = ctx.base_point(&b);
            }
            let before = fam.eval(&g, &b, &c.points[0], &c.points[1])?;
            let after = fam.eval(&image, &b_img, &moved[0], &moved[1])?;
            log.close_rel(format!("invariance {fam}"), after, before, tolerances::INVARIANCE_METRIC, &ctx);
        }
        for _ in 0..QUADRUPLES_PER_CASE {
            let q = random_separated_points(rng, n, &cfg.generator, 4)?;
            let m: Vec<ExtendedPoint> = q.iter().map(|p| map.apply(p)).collect::<Result<_>>()?;
            let before = cross_ratio_raw(&q[0], &q[1], &q[2], &q[3]);
            let after = cross_ratio_raw(&m[0], &m[1], &m[2], &m[3]);
            let ctx = Ctx::new(&g, &q).map(&map);
            log.close_rel("invariance cross-ratio".into(), after, before, tolerances::INVARIANCE_CROSS_RATIO, &ctx);
        }
        Ok(log)
    })?;
    report
        .notes
        .push(format!("each case checks one random map and {QUADRUPLES_PER_CASE} random cross-ratio quadruples"));
    Ok(report)
}

/// For a boundary set `F` and a subset `F' ⊆ F`, every metric on
/// `R̄ⁿ ∖ F'` is at most its value on the smaller domain `R̄ⁿ ∖ F`, exactly.
pub fn monotonicity_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let fams = families(&cfg.exponents(), true);
    let mut report = run_cases(cfg, started, Vec::new(), |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 2, 3)?;
        let size = rng.random_range(2..=c.boundary.len());
        let mut idx = sample(rng, c.boundary.len(), size).into_vec();
        idx.sort_unstable();
        let sub: Vec<ExtendedPoint> = idx.iter().map(|&i| c.boundary[i].clone()).collect();
        let b = pick(rng, &sub).clone();
        let small = c.domain()?;
        let large = DomainSpec::finite_complement(sub.clone(), sub.iter().any(ExtendedPoint::is_infinite))?;
        let small_e = c.euclidean_domain()?;
        let large_e = DomainSpec::finite_complement(sub, true)?;
        let (x, y) = (&c.points[0], &c.points[1]);
        let mut log = CaseLog::new("");
        for &fam in &fams {
            let (s, l) = if fam.euclidean() { (&small_e, &large_e) } else { (&small, &large) };
            let e: Vec<Exponent> = fam.exponent().into_iter().collect();
            let mut ctx = Ctx::new(s, &c.points).exponents(&e).nested(l);
            if fam == Family::JPointed {
                ctx = ctx.base_point(&b);
            }
            let on_large = fam.eval(l, &b, x, y)?;
            let on_small = fam.eval(s, &b, x, y)?;
            log.le_abs(format!("monotone {fam}"), on_large, on_small, 0.0, true, &ctx);
        }
        Ok(log)
    })?;
    report.notes.push("domain holds the full boundary, nested_domain the subset; checks are exact".into());
    Ok(report)
}

fn probe_case(log: &mut CaseLog, g: &DomainSpec, pts: &[ExtendedPoint]) -> Result<()> {
    let (x, y) = (&pts[0], &pts[1]);
    let bd = g.boundary_points().map(spherical_diameter).transpose()?.unwrap_or(1.0);
    let s = bd * chordal_raw(x, y);
    let rho = metrics::rho(g, x, y, &exhaustive())?.value;
    let delta = metrics::delta(g, x, y, &exhaustive())?.value;
    let ctx = Ctx::new(g, pts);
    log.le_rel("rho >= cosh((q(dG) q(x,y))^2) - 1".into(), (s * s).cosh() - 1.0, rho, 0.0, false, &ctx);
    log.le_rel("delta >= exp(q(dG) q(x,y)) - 1".into(), s.exp_m1(), delta, 0.0, false, &ctx);
    Ok(())
}

/// Report-only tallies of two lower bounds in terms of chordal distances.
/// Violations are recorded with witnesses but never fail the run.
pub fn bound_probe(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let g = DomainSpec::punctured(vec![ExtendedPoint::origin(n)])?;
    let mut first = CaseLog::new("witness: boundary {0, inf}, x = e1, y = -e1");
    probe_case(&mut first, &g, &e1_pair(n))?;
    let mut report = run_cases(cfg, started, vec![first], |rng| {
        let c = random_configuration(rng, n, &cfg.generator, 2, 2)?;
        let mut log = CaseLog::new("");
        probe_case(&mut log, &c.domain()?, &c.points)?;
        Ok(log)
    })?;
    report.notes.push(format!(
        "probe-only: nothing is asserted; at most {} witnesses are kept per report",
        tolerances::PROBE_WITNESS_CAP
    ));
    Ok(report)
}

/// `ρ` by boundary optimization against the closed-form hyperbolic distance
/// on the unit ball and the upper half-space.
pub fn oracle_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    cfg.validate()?;
    let n = cfg.dimension;
    let ball = DomainSpec::unit_ball(n);
    let half = DomainSpec::upper_half_space(n);
    let mut report = run_cases(cfg, started, Vec::new(), |rng| {
        let mut log = CaseLog::new("");
        let in_ball = |rng: &mut ChaCha8Rng| {
            let r = rng.random_range(0.0..0.9);
            ExtendedPoint::Finite(random_unit(rng, n).into_iter().map(|u| r * u).collect())
        };
        let in_half = |rng: &mut ChaCha8Rng| {
            let mut v = random_box(rng, n, 3.0);
            v[n - 1] = rng.random_range(0.1..3.0);
            ExtendedPoint::Finite(v)
        };
        for (name, g, pts) in [
            ("oracle ball rho", &ball, vec![in_ball(rng), in_ball(rng)]),
            ("oracle half-space rho", &half, vec![in_half(rng), in_half(rng)]),
        ] {
            let rho = metrics::rho(g, &pts[0], &pts[1], &SupremumStrategy::default_for(g))?.value;
            let exact = metrics::hyperbolic_closed_form(g, &pts[0], &pts[1])?;
            log.le_abs(name.into(), (rho - exact).abs(), 0.0, tolerances::ORACLE, true, &Ctx::new(g, &pts));
        }
        Ok(log)
    })?;
    report.notes.push("rho on continuous boundaries is a refined lower bound; margins are absolute".into());
    Ok(report)
}
