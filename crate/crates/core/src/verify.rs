//! Executable checks of the mean-value identities and of the ball
//! characterization.
//!
//! Every check returns a [`VerificationReport`]. Deterministic quadrature
//! paths are held to `CheckOptions::tolerance` (1e-8 by default); Monte
//! Carlo paths report three standard errors as their error bar, so noise can
//! only make a check inconclusive, never fail it.
//!
//! The topological hypotheses of the characterization (bounded domain with
//! connected complement) are not checked; reports mark them as assumed.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{
    circumradius_about, distance, estimate_volume, radius_for_volume, seeded_rng, unit_ball_volume, Domain,
    VolumeEstimate,
};
use crate::quadrature::{
    ball_mean, box_mean, field_flux, mc_box_integrals, mc_mean, MeanValueEstimate, DEFAULT_ANGULAR_RESOLUTION,
    DEFAULT_BOX_NODES, DEFAULT_MC_SAMPLES, DEFAULT_RADIAL_NODES,
};
use crate::report::{Verdict, VerificationReport};
use crate::solutions::{
    membrane_eigenfunction, modified_radial_solution, plane_wave, radial_solution, Equation, SolutionField,
};
use crate::specfun::{a_norm, b_norm, bessel_zero, BesselOrder};

/// Resolutions, seeds and tolerances shared by the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub radial_nodes: usize,
    pub angular_resolution: usize,
    pub box_nodes: usize,
    pub samples: u64,
    pub seed: u64,
    /// Identity tolerance for deterministic quadrature paths.
    pub tolerance: f64,
    /// Samples for circumradius estimates of domains without an exact one.
    pub circumradius_budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            radial_nodes: DEFAULT_RADIAL_NODES,
            angular_resolution: DEFAULT_ANGULAR_RESOLUTION,
            box_nodes: DEFAULT_BOX_NODES,
            samples: DEFAULT_MC_SAMPLES,
            seed: 1,
            tolerance: 1e-8,
            circumradius_budget: 1_000_000,
        }
    }
}

fn kernel(equation: Equation, m: usize, t: f64) -> Result<f64> {
    match equation {
        Equation::Helmholtz => a_norm(m as u32, t),
        Equation::ModifiedHelmholtz => b_norm(m as u32, t),
    }
}

fn with_estimate(report: VerificationReport, est: &MeanValueEstimate) -> VerificationReport {
    let mut r = report
        .with("method", est.method.to_string())
        .with("nodes_or_samples", est.samples_or_nodes);
    if let Some(seed) = est.seed {
        r = r.with("seed", seed);
    }
    if let Some(note) = &est.notice {
        r = r.with("notice", note.clone());
    }
    r
}

/// `M(f, D)` by the most accurate available rule: spectral for balls in
/// m = 2, 3, Gauss for boxes, Monte Carlo otherwise.
pub fn domain_mean<F>(f: F, d: &Domain, opts: &CheckOptions) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if let Some((c, r)) = d.as_ball() {
        if c.len() <= 3 {
            return ball_mean(f, &c, r, opts.radial_nodes, opts.angular_resolution);
        }
    }
    if let Some((low, high)) = d.as_box() {
        return box_mean(f, &low, &high, opts.box_nodes);
    }
    mc_mean(f, d, opts.samples, opts.seed)
}

/// A domain paired with `λ`, the centre candidate `x0`, the equivalent radius
/// `r` (`|B_r| = |D|`, always derived from the volume) and the critical radius
/// `r0 = j_{m/2,1} / λ`.
#[derive(Debug, Clone)]
pub struct CharacterizationProblem {
    pub domain: Domain,
    pub lambda: f64,
    pub x0: Vec<f64>,
    pub r: f64,
    pub r0: f64,
    pub volume: VolumeEstimate,
}

impl CharacterizationProblem {
    pub fn new(domain: Domain, lambda: f64, x0: &[f64], opts: &CheckOptions) -> Result<Self> {
        let m = domain.dimension();
        if x0.len() != m {
            return crate::error::domain("x0 dimension does not match the domain");
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return crate::error::domain(format!("lambda must be positive, got {lambda}"));
        }
        let volume = estimate_volume(&domain, opts.samples, opts.seed)?;
        let r = radius_for_volume(m, volume.value)?;
        let r0 = critical_radius(m, lambda)?;
        Ok(Self { domain, lambda, x0: x0.to_vec(), r, r0, volume })
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }
}

/// `r0` with `λ r0 = j_{m/2,1}`.
pub fn critical_radius(m: usize, lambda: f64) -> Result<f64> {
    Ok(bessel_zero(BesselOrder::half(m as u32), 1)? / lambda)
}

/// `kernel(λr) · u(x) = M(u, B_r(x))` with `a_m` for Helmholtz fields and
/// `b_m` for modified Helmholtz fields.
pub fn check_mean_value_formula(
    u: &SolutionField,
    x: &[f64],
    r: f64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let m = u.dimension();
    if x.len() != m {
        return domain("point dimension does not match the field");
    }
    let k = kernel(u.equation(), m, u.wavenumber() * r)?;
    let lhs = k * u.evaluate(x);
    let est = ball_mean(|p| u.evaluate(p), x, r, opts.radial_nodes, opts.angular_resolution)?;
    let report = VerificationReport::equality("mean_value_formula", lhs, est.value, opts.tolerance, est.abs_error_estimate)
        .with("field", u.label())
        .with("lambda_r", u.wavenumber() * r)
        .with("kernel", k)
        .with("m", m);
    Ok(with_estimate(report, &est))
}

/// `u(x0) · a_m(λr) = M(u, D)`.
pub fn check_identity(
    u: &SolutionField,
    p: &CharacterizationProblem,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if u.dimension() != p.dimension() {
        return domain("field dimension does not match the domain");
    }
    if (u.wavenumber() - p.lambda).abs() > 1e-12 * p.lambda {
        return domain(format!(
            "field wavenumber {} differs from the problem's lambda {}",
            u.wavenumber(),
            p.lambda
        ));
    }
    let k = kernel(u.equation(), p.dimension(), p.lambda * p.r)?;
    let lhs = u.evaluate(&p.x0) * k;
    let est = domain_mean(|y| u.evaluate(y), &p.domain, opts)?;
    let report = VerificationReport::equality("identity", lhs, est.value, opts.tolerance, est.abs_error_estimate)
        .with("field", u.label())
        .with("equivalent_radius", p.r)
        .with("lambda_r", p.lambda * p.r);
    Ok(with_estimate(report, &est))
}

/// `D ⊂ B_{r0}(x0)`, reported as `λ · sup|y − x0| ≤ j_{m/2,1}`.
///
/// Balls and boxes use the exact farthest distance; other domains a sampled
/// lower bound.
pub fn check_size_condition(p: &CharacterizationProblem, opts: &CheckOptions) -> Result<VerificationReport> {
    let (radius, how) = match p.domain.max_distance_from(&p.x0) {
        Some(d) => (d, "exact"),
        None => (circumradius_about(&p.domain, &p.x0, opts.circumradius_budget, opts.seed)?, "sampled_lower_bound"),
    };
    let j = p.lambda * p.r0;
    Ok(VerificationReport::at_most("size_condition", p.lambda * radius, j)
        .with("circumradius", radius)
        .with("circumradius_method", how)
        .with("r0", p.r0)
        .with("lambda", p.lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterizationVerdict {
    /// Every identity holds and the size condition holds.
    ConsistentWithBall,
    /// Some identity fails while the size condition holds.
    NotABall,
    /// The size condition fails, so the test says nothing.
    OutsideTheoremScope,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterizationOutcome {
    pub verdict: CharacterizationVerdict,
    /// Label of the first field whose identity failed.
    pub witness: Option<String>,
    pub size_condition: VerificationReport,
    pub identities: Vec<VerificationReport>,
    pub equivalent_radius: f64,
    pub critical_radius: f64,
}

impl CharacterizationOutcome {
    pub fn reports(&self) -> Vec<VerificationReport> {
        let mut out = self.identities.clone();
        out.push(self.size_condition.clone());
        out
    }
}

/// Radial `U` at `x0`, `2m` axis-aligned plane waves (cosine and sine along
/// each axis) and `random` plane waves with seeded directions and phases.
pub fn default_family(m: usize, lambda: f64, random: usize, seed: u64) -> Result<Vec<SolutionField>> {
    let mut family = Vec::with_capacity(2 * m + random);
    for axis in 0..m {
        let mut dir = vec![0.0; m];
        dir[axis] = 1.0;
        family.push(plane_wave(lambda, &dir, 0.0)?);
        family.push(plane_wave(lambda, &dir, -PI / 2.0)?);
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..random {
        let dir = loop {
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 0.1 && n <= 1.0 {
                break v.iter().map(|x| x / n).collect::<Vec<_>>();
            }
        };
        let phase = rng.gen_range(0.0..2.0 * PI);
        family.push(plane_wave(lambda, &dir, phase)?);
    }
    Ok(family)
}

/// Run the identity over `radial U at x0` followed by `family`, together with
/// the size condition.
pub fn characterize(
    p: &CharacterizationProblem,
    family: &[SolutionField],
    opts: &CheckOptions,
) -> Result<CharacterizationOutcome> {
    let m = p.dimension();
    let mut fields = vec![radial_solution(m, p.lambda, &p.x0)?];
    fields.extend(family.iter().cloned());
    let mut identities = Vec::with_capacity(fields.len());
    for (i, u) in fields.iter().enumerate() {
        let mut rep = check_identity(u, p, opts)?;
        rep.name = format!("identity[{i:02}]");
        identities.push(rep);
    }
    let size = check_size_condition(p, opts)?;

    let witness = identities
        .iter()
        .find(|r| r.verdict == Verdict::Fail)
        .and_then(|r| r.diagnostics.get("field"))
        .and_then(|v| v.as_str().map(str::to_string));
    let verdict = if !size.passed() {
        CharacterizationVerdict::OutsideTheoremScope
    } else if witness.is_some() {
        CharacterizationVerdict::NotABall
    } else if identities.iter().all(VerificationReport::passed) {
        CharacterizationVerdict::ConsistentWithBall
    } else {
        CharacterizationVerdict::Inconclusive
    };
    let size = size.with("topology", "assumed: bounded, connected complement");
    Ok(CharacterizationOutcome {
        verdict,
        witness,
        size_condition: size,
        identities,
        equivalent_radius: p.r,
        critical_radius: p.r0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyVariant {
    /// Radial Helmholtz solution `a_{m−2}(λ|y − x0|)`, decreasing near `x0`.
    Helmholtz,
    /// Radial modified solution `b_{m−2}(μ|y − x0|)`, increasing everywhere.
    Modified,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscrepancyOutcome {
    /// `∫_{G_i} U − ∫_{G_e} U` with `G_i = D \ B̄_r(x0)`, `G_e = B_r(x0) \ D̄`.
    pub discrepancy: VerificationReport,
    /// `|G_i| − |G_e|`.
    pub volume_balance: VerificationReport,
    pub domain_volume: f64,
}

/// The sign argument behind the characterization: with `U` radial about `x0`
/// and monotone in `|y − x0|` on `D ∪ B_r`, the integral of `U` over the outer
/// piece `G_i` cannot balance its integral over the inner piece `G_e` of the
/// same volume.
///
/// Both pieces are integrated in one Monte Carlo pass over a common box. The
/// discrepancy passes when its sign matches the monotone direction of `U`
/// beyond three standard errors (negative for the Helmholtz variant inside
/// the size condition, positive for the modified variant), and when both
/// pieces are empty.
pub fn proof_discrepancy(
    p: &CharacterizationProblem,
    variant: DiscrepancyVariant,
    opts: &CheckOptions,
) -> Result<DiscrepancyOutcome> {
    let m = p.dimension();
    let u = match variant {
        DiscrepancyVariant::Helmholtz => radial_solution(m, p.lambda, &p.x0)?,
        DiscrepancyVariant::Modified => modified_radial_solution(m, p.lambda, &p.x0)?,
    };
    let ball = crate::geometry::ball(&p.x0, p.r)?;
    let bbox = p.domain.bounding_box().union(ball.bounding_box());
    let (x0, r, d) = (&p.x0, p.r, &p.domain);
    let est = mc_box_integrals(
        |y, out| {
            let in_ball = distance(y, x0) < r;
            let in_d = d.contains(y);
            if in_d && !in_ball {
                let v = u.evaluate(y);
                out[0] = v;
                out[1] = 1.0;
                out[2] = v;
                out[4] = 1.0;
            } else if in_ball && !in_d {
                let v = u.evaluate(y);
                out[0] = -v;
                out[1] = -1.0;
                out[3] = v;
                out[5] = 1.0;
            }
        },
        6,
        &bbox,
        opts.samples,
        opts.seed,
    )?;
    let (diff, vol_diff) = (est[0], est[1]);

    let predicted = match variant {
        DiscrepancyVariant::Modified => Some(1.0),
        DiscrepancyVariant::Helmholtz => check_size_condition(p, opts)?.passed().then_some(-1.0),
    };
    let err = 3.0 * diff.std_error;
    let verdict = match predicted {
        _ if diff.value == 0.0 && diff.std_error == 0.0 => Verdict::Pass,
        None => Verdict::Inconclusive,
        Some(_) if diff.value.abs() <= err => Verdict::Inconclusive,
        Some(sign) if diff.value * sign > 0.0 => Verdict::Pass,
        Some(_) => Verdict::Fail,
    };
    let variant_name = match variant {
        DiscrepancyVariant::Helmholtz => "helmholtz",
        DiscrepancyVariant::Modified => "modified",
    };
    let mut discrepancy = VerificationReport::equality("proof_discrepancy", est[2].value, est[3].value, 0.0, err);
    discrepancy.residual = diff.value;
    discrepancy.verdict = verdict;
    let discrepancy = discrepancy
        .with("variant", variant_name)
        .with("predicted_sign", predicted.map_or("none (size condition fails)".to_string(), |s| format!("{s:+}")))
        .with("std_error", diff.std_error)
        .with("method", "monte_carlo")
        .with("samples", opts.samples)
        .with("seed", opts.seed)
        .with("equivalent_radius", p.r);

    // |G_i| = |G_e| since |D| = |B_r|; the balance is only as good as the volume estimate
    let mut volume_balance =
        VerificationReport::equality("proof_discrepancy.volume_balance", est[4].value, est[5].value, 0.0, 3.0 * vol_diff.std_error);
    volume_balance.residual = vol_diff.value;
    volume_balance.verdict = if vol_diff.value.abs() <= 3.0 * vol_diff.std_error + 3.0 * p.volume.std_error {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let volume_balance = volume_balance
        .with("std_error", vol_diff.std_error)
        .with("samples", opts.samples)
        .with("seed", opts.seed);

    Ok(DiscrepancyOutcome { discrepancy, volume_balance, domain_volume: p.volume.value })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembraneBundle {
    pub side: f64,
    pub lambda: f64,
    /// `λ_21 · a/√2`
    pub lambda_r0: f64,
    /// `j_{1,1}`
    pub first_zero: f64,
    /// `λ r0 − j_{1,1}`
    pub gap: f64,
    pub reports: Vec<VerificationReport>,
    pub characterization: CharacterizationVerdict,
}

/// The square membrane `(0, a)²` at `λ = λ_21`: the identity holds at the
/// centre for `u_21` and `u_12` while the square is not a ball, because the
/// size condition fails.
pub fn membrane_counterexample(a: f64, opts: &CheckOptions) -> Result<MembraneBundle> {
    let u21 = membrane_eigenfunction(2, 1, a)?;
    let u12 = membrane_eigenfunction(1, 2, a)?;
    let lambda = u21.wavenumber();
    let centre = [a / 2.0, a / 2.0];
    let square = crate::geometry::cuboid(&[0.0, 0.0], &[a, a])?;
    let p = CharacterizationProblem::new(square, lambda, &centre, opts)?;
    let exact_tol = 1e-12;

    let mut reports = Vec::new();
    for (name, u) in [("u21", &u21), ("u12", &u12)] {
        reports.push(
            VerificationReport::equality(format!("membrane.{name}_at_centre"), u.evaluate(&centre), 0.0, exact_tol, 0.0)
                .with("field", u.label()),
        );
        let est = box_mean(|x| u.evaluate(x), &[0.0, 0.0], &[a, a], opts.box_nodes)?;
        reports.push(with_estimate(
            VerificationReport::equality(format!("membrane.{name}_mean"), est.value, 0.0, exact_tol, est.abs_error_estimate),
            &est,
        ));
        let mut id = check_identity(u, &p, &CheckOptions { tolerance: exact_tol, ..opts.clone() })?;
        id.name = format!("membrane.{name}_identity");
        reports.push(id);
    }

    let mut size = check_size_condition(&p, opts)?;
    size.name = "membrane.size_condition".into();
    let (lambda_r0, first_zero) = (size.lhs, size.rhs);
    let gap = lambda_r0 - first_zero;
    reports.push(size.with("gap", gap));

    // the radial solution exposes the square as a non-ball
    let radial = radial_solution(2, lambda, &centre)?;
    let mut witness = check_identity(&radial, &p, opts)?;
    witness.name = "membrane.radial_identity".into();
    reports.push(witness);

    let outcome = characterize(&p, &[u21, u12], opts)?;
    reports.sort_by(|x, y| x.name.cmp(&y.name));
    Ok(MembraneBundle {
        side: a,
        lambda,
        lambda_r0,
        first_zero,
        gap,
        reports,
        characterization: outcome.verdict,
    })
}

/// The harmonic limit `λ → 0`.
///
/// For each `λ`: the kernel `a_m(λr)` approaches 1 at the rate of its series
/// coefficient, `(a_m(t) − 1) / (−t²/(2(m+2))) ∈ [0.999, 1.001]`; and the
/// identity residual of `sin(λ(x₁ − x0₁)) / λ` approaches the harmonic
/// mean-value residual of `x₁ − x0₁`, within `λ² R³ / 3` (`R` the extent of
/// `D` about `x0`). The bundle closes with the harmonic checks for `1` and
/// `x₁ − x0₁`.
pub fn kuran_limit_check(
    d: &Domain,
    x0: &[f64],
    lambdas: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<VerificationReport>> {
    let m = d.dimension();
    if x0.len() != m {
        return domain("x0 dimension does not match the domain");
    }
    if lambdas.is_empty() {
        return domain("need at least one lambda");
    }
    let volume = estimate_volume(d, opts.samples, opts.seed)?;
    let r = radius_for_volume(m, volume.value)?;
    let extent = match d.max_distance_from(x0) {
        Some(e) => e,
        None => circumradius_about(d, x0, opts.circumradius_budget, opts.seed)?,
    };

    let linear = |y: &[f64]| y[0] - x0[0];
    let harmonic = domain_mean(linear, d, opts)?;
    let harmonic_residual = 0.0 - harmonic.value;

    let mut reports = Vec::new();
    for (k, &lambda) in lambdas.iter().enumerate() {
        if !(lambda > 0.0) {
            return domain("lambdas must be positive");
        }
        let t = lambda * r;
        let series = -t * t / (2.0 * (m as f64 + 2.0));
        let ratio = (a_norm(m as u32, t)? - 1.0) / series;
        reports.push(
            VerificationReport::equality(format!("kuran.kernel_rate[{k:02}]"), ratio, 1.0, 1e-3, 0.0)
                .with("lambda", lambda)
                .with("t", t),
        );

        let mut dir = vec![0.0; m];
        dir[0] = 1.0;
        let u = plane_wave(lambda, &dir, -lambda * x0[0] - PI / 2.0)?.scaled(1.0 / lambda);
        let p = CharacterizationProblem { domain: d.clone(), lambda, x0: x0.to_vec(), r, r0: critical_radius(m, lambda)?, volume };
        let id = check_identity(&u, &p, opts)?;
        let bound = lambda * lambda * extent.powi(3) / 3.0;
        reports.push(
            VerificationReport::equality(
                format!("kuran.identity_limit[{k:02}]"),
                id.residual,
                harmonic_residual,
                bound + opts.tolerance,
                id.error_bar + harmonic.abs_error_estimate,
            )
            .with("lambda", lambda)
            .with("method", id.diagnostics.get("method").cloned().unwrap_or_default()),
        );
    }

    let constant = domain_mean(|_| 1.0, d, opts)?;
    reports.push(with_estimate(
        VerificationReport::equality("kuran.harmonic_constant", 1.0, constant.value, opts.tolerance, constant.abs_error_estimate),
        &constant,
    ));
    reports.push(with_estimate(
        VerificationReport::equality("kuran.harmonic_linear", 0.0, harmonic.value, opts.tolerance, harmonic.abs_error_estimate),
        &harmonic,
    ));
    Ok(reports)
}

/// `∫_{B_r} u = (s k²)⁻¹ ∫_{∂B_r} ∂u/∂n`, where `∇²u = s k² u`; for Helmholtz
/// fields `∫ u = −λ⁻² · flux`. Relative tolerance 1e-5.
pub fn flux_identity_check(
    u: &SolutionField,
    center: &[f64],
    r: f64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let m = u.dimension();
    if center.len() != m {
        return domain("centre dimension does not match the field");
    }
    if m != 2 && m != 3 {
        return Err(Error::NotImplemented(format!("flux identity for m = {m}")));
    }
    let vol = unit_ball_volume(m) * r.powi(m as i32);
    let mean = ball_mean(|p| u.evaluate(p), center, r, opts.radial_nodes, opts.angular_resolution)?;
    let flux = field_flux(u, center, r, opts.angular_resolution)?;
    let k2 = u.wavenumber() * u.wavenumber();
    let factor = 1.0 / (u.equation().laplacian_sign() * k2);
    let lhs = vol * mean.value;
    let rhs = factor * flux.value;
    let tol = 1e-5 * lhs.abs().max(rhs.abs()) + 1e-10;
    let err = vol * mean.abs_error_estimate + factor.abs() * flux.abs_error_estimate;
    Ok(with_estimate(
        VerificationReport::equality("flux_identity", lhs, rhs, tol, err)
            .with("field", u.label())
            .with("flux", flux.value),
        &mean,
    ))
}

/// Ball form of the modified-Helmholtz identity:
/// `b_m(μr) = M(Ũ, B_r(x0))` for `Ũ` radial about `x0`, plus strict
/// monotonicity of `b_m` on a 10⁴-point grid of `[0, max(10, μr)]`.
pub fn theorem1_identity_check(
    mu: f64,
    x0: &[f64],
    r: f64,
    m: usize,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    if x0.len() != m {
        return domain("x0 dimension does not match m");
    }
    let u = modified_radial_solution(m, mu, x0)?;
    let mut rep = check_mean_value_formula(&u, x0, r, opts)?;
    rep.name = "theorem1_identity".into();

    let top = (mu * r).max(10.0);
    let n = 10_000;
    let mut prev = b_norm(m as u32, 0.0)?;
    let mut monotone = true;
    for k in 1..=n {
        let v = b_norm(m as u32, top * k as f64 / n as f64)?;
        if !(v > prev) {
            monotone = false;
            break;
        }
        prev = v;
    }
    if !monotone {
        rep.verdict = Verdict::Fail;
    }
    Ok(rep.with("b_monotone_on_grid", monotone).with("grid_max", top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ball, cuboid, translate};

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    #[test]
    fn mean_value_formula_examples() {
        let o = opts();
        let u = radial_solution(3, 2.0, &[0.1, 0.2, 0.3]).unwrap();
        let rep = check_mean_value_formula(&u, &[0.1, 0.2, 0.3], 1.0, &o).unwrap();
        assert!(rep.residual.abs() <= 1e-9, "{rep:?}");
        assert!(rep.passed());

        let pw = plane_wave(1.0, &[1.0, 0.0], 0.0).unwrap();
        let rep = check_mean_value_formula(&pw, &[0.0, 0.0], 1.0, &o).unwrap();
        assert!((rep.lhs - 0.8801012).abs() < 1e-7 && (rep.rhs - 0.8801012).abs() < 1e-7);
        assert!(rep.passed());

        let rep = check_mean_value_formula(&pw, &[0.4, -0.1], 1e-3, &o).unwrap();
        assert!(rep.residual.abs() <= 1e-6);
        assert!((rep.rhs - pw.evaluate(&[0.4, -0.1])).abs() < 1e-6);
    }

    #[test]
    fn identity_on_balls_reduces_to_mean_value_formula() {
        let o = opts();
        for m in [2usize, 3] {
            for lr in [0.5, 1.0, 3.0, 5.0] {
                let x0 = vec![0.2; m];
                let d = ball(&x0, 1.0).unwrap();
                let p = CharacterizationProblem::new(d, lr, &x0, &o).unwrap();
                for u in default_family(m, lr, 3, 9).unwrap() {
                    let rep = check_identity(&u, &p, &o).unwrap();
                    assert!(rep.residual.abs() <= 1e-8, "m={m} lr={lr} {rep:?}");
                    assert!(rep.passed());
                }
            }
        }
    }

    #[test]
    fn identity_membrane_and_radial_on_square() {
        let o = opts();
        let u21 = membrane_eigenfunction(2, 1, 1.0).unwrap();
        let sq = cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let p = CharacterizationProblem::new(sq, u21.wavenumber(), &[0.5, 0.5], &o).unwrap();
        let rep = check_identity(&u21, &p, &o).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.residual.abs() <= 1e-12 && rep.passed());

        let radial = radial_solution(2, u21.wavenumber(), &[0.5, 0.5]).unwrap();
        let rep = check_identity(&radial, &p, &o).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.residual.abs() > 1e-3);

        let wrong = plane_wave(1.0, &[1.0, 0.0], 0.0).unwrap();
        assert!(check_identity(&wrong, &p, &o).is_err());
    }

    #[test]
    fn size_condition_examples() {
        let o = opts();
        let sq = cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let lambda = PI * 5f64.sqrt();
        let p = CharacterizationProblem::new(sq, lambda, &[0.5, 0.5], &o).unwrap();
        let rep = check_size_condition(&p, &o).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!((rep.lhs - 4.967294).abs() <= 1e-5);
        assert!((rep.rhs - 3.831706).abs() <= 1e-5);

        let p = CharacterizationProblem::new(ball(&[0.0, 0.0], 1.0).unwrap(), 1.0, &[0.0, 0.0], &o).unwrap();
        assert!(check_size_condition(&p, &o).unwrap().passed());

        let p = CharacterizationProblem::new(ball(&[0.0; 3], 4.4).unwrap(), 1.0, &[0.0; 3], &o).unwrap();
        let rep = check_size_condition(&p, &o).unwrap();
        assert!(rep.passed());
        assert!((rep.rhs - 4.493409).abs() <= 1e-5);

        // sampled path for a composite domain
        let d = crate::geometry::difference(&ball(&[0.0, 0.0], 1.0).unwrap(), &ball(&[0.0, 0.0], 0.2).unwrap()).unwrap();
        let p = CharacterizationProblem::new(d, 1.0, &[0.0, 0.0], &o).unwrap();
        let rep = check_size_condition(&p, &o).unwrap();
        assert_eq!(rep.diagnostics["circumradius_method"], "sampled_lower_bound");
        assert!(rep.passed());
    }

    #[test]
    fn problem_invariants() {
        let o = opts();
        for m in [2usize, 3, 4] {
            let p = CharacterizationProblem::new(cuboid(&vec![0.0; m], &vec![1.0; m]).unwrap(), 1.7, &vec![0.5; m], &o)
                .unwrap();
            let j = bessel_zero(BesselOrder::half(m as u32), 1).unwrap();
            assert!((p.r0 * 1.7 - j).abs() <= 1e-9);
            assert!((unit_ball_volume(m) * p.r.powi(m as i32) - 1.0).abs() < 1e-12);
        }
        assert!(CharacterizationProblem::new(ball(&[0.0, 0.0], 1.0).unwrap(), 0.0, &[0.0, 0.0], &o).is_err());
        assert!(CharacterizationProblem::new(ball(&[0.0, 0.0], 1.0).unwrap(), 1.0, &[0.0; 3], &o).is_err());
    }

    #[test]
    fn characterize_examples() {
        let o = opts();
        let fam = default_family(2, 1.0, 8, 3).unwrap();
        assert_eq!(fam.len(), 12);

        let only_random: Vec<_> = fam[4..].to_vec();
        let p = CharacterizationProblem::new(ball(&[0.0, 0.0], 1.0).unwrap(), 1.0, &[0.0, 0.0], &o).unwrap();
        let out = characterize(&p, &only_random, &o).unwrap();
        assert_eq!(out.verdict, CharacterizationVerdict::ConsistentWithBall);
        assert_eq!(out.identities.len(), 9);

        let shifted = translate(&ball(&[0.0, 0.0], 1.0).unwrap(), &[0.3, 0.0]).unwrap();
        let p = CharacterizationProblem::new(shifted, 1.0, &[0.0, 0.0], &o).unwrap();
        let out = characterize(&p, &fam, &o).unwrap();
        assert_eq!(out.verdict, CharacterizationVerdict::NotABall);
        assert_eq!(out.witness.as_deref(), Some("radial_U"));

        let u21 = membrane_eigenfunction(2, 1, 1.0).unwrap();
        let u12 = membrane_eigenfunction(1, 2, 1.0).unwrap();
        let sq = cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let p = CharacterizationProblem::new(sq, u21.wavenumber(), &[0.5, 0.5], &o).unwrap();
        let out = characterize(&p, &[u21, u12], &o).unwrap();
        assert!(out.identities[1..].iter().all(VerificationReport::passed));
        assert_eq!(out.verdict, CharacterizationVerdict::OutsideTheoremScope);
    }

    #[test]
    fn discrepancy_empty_for_the_ball_itself() {
        let o = CheckOptions { samples: 200_000, ..opts() };
        let p = CharacterizationProblem::new(ball(&[0.0, 0.0], 1.0).unwrap(), 1.0, &[0.0, 0.0], &o).unwrap();
        let out = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
        assert_eq!(out.discrepancy.residual, 0.0);
        assert!(out.discrepancy.passed());
        assert!(out.volume_balance.passed());
    }

    #[test]
    fn discrepancy_negative_for_square_at_lambda_one() {
        let o = CheckOptions { samples: 4_000_000, seed: 17, ..opts() };
        let sq = cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        let p = CharacterizationProblem::new(sq, 1.0, &[0.0, 0.0], &o).unwrap();
        let out = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
        let d = &out.discrepancy;
        assert!(d.residual < -d.error_bar, "{d:?}");
        assert!(d.passed());
        assert!(out.volume_balance.passed(), "{:?}", out.volume_balance);
    }

    #[test]
    fn discrepancy_matches_radial_identity_residual() {
        // |D|·(a_m(λr) − M(U, D)) = −(∫_{G_i} U − ∫_{G_e} U)
        let o = CheckOptions { samples: 2_000_000, seed: 5, ..opts() };
        let cases = [
            translate(&ball(&[0.0, 0.0], 1.0).unwrap(), &[0.3, 0.0]).unwrap(),
            cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap(),
            cuboid(&[-0.8, -0.3], &[0.8, 0.3]).unwrap(),
        ];
        for d in cases {
            let p = CharacterizationProblem::new(d, 2.0, &[0.0, 0.0], &o).unwrap();
            let u = radial_solution(2, 2.0, &[0.0, 0.0]).unwrap();
            let id = check_identity(&u, &p, &o).unwrap();
            let disc = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
            let predicted = -disc.discrepancy.residual / p.volume.value;
            assert!((id.residual - predicted).abs() <= disc.discrepancy.error_bar / p.volume.value + 1e-8);
            assert!(disc.discrepancy.residual < -disc.discrepancy.error_bar);
            assert!(id.residual > 0.0);
        }
    }

    #[test]
    fn modified_variant_is_positive() {
        let o = CheckOptions { samples: 1_000_000, ..opts() };
        let sq = cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        // large mu is fine: no size restriction for the modified equation
        let p = CharacterizationProblem::new(sq, 10.0, &[0.0, 0.0], &o).unwrap();
        let out = proof_discrepancy(&p, DiscrepancyVariant::Modified, &o).unwrap();
        assert!(out.discrepancy.residual > out.discrepancy.error_bar);
        assert!(out.discrepancy.passed());
    }

    #[test]
    fn discrepancy_outside_scope_is_inconclusive() {
        let o = CheckOptions { samples: 200_000, ..opts() };
        let sq = cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        let p = CharacterizationProblem::new(sq, 8.0, &[0.0, 0.0], &o).unwrap();
        let out = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
        assert_eq!(out.discrepancy.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn membrane_bundle() {
        for a in [1.0, 2.0] {
            let b = membrane_counterexample(a, &opts()).unwrap();
            assert!((b.lambda_r0 - 4.967294).abs() <= 1e-5);
            assert!((b.first_zero - 3.831706).abs() <= 1e-5);
            assert!((b.gap - 1.135588).abs() <= 1e-5);
            let get = |n: &str| b.reports.iter().find(|r| r.name == n).unwrap();
            assert_eq!(get("membrane.u21_at_centre").lhs, 0.0);
            assert_eq!(get("membrane.u12_at_centre").lhs, 0.0);
            assert!(get("membrane.u21_mean").lhs.abs() <= 1e-12);
            assert!(get("membrane.u21_identity").passed());
            assert!(get("membrane.u12_identity").passed());
            assert_eq!(get("membrane.size_condition").verdict, Verdict::Fail);
            assert_eq!(get("membrane.radial_identity").verdict, Verdict::Fail);
            assert_eq!(b.characterization, CharacterizationVerdict::OutsideTheoremScope);
        }
    }

    #[test]
    fn kuran_examples() {
        let o = opts();
        let d = ball(&[0.0, 0.0], 1.0).unwrap();
        let reps = kuran_limit_check(&d, &[0.0, 0.0], &[1e-2], &o).unwrap();
        assert!(reps.iter().all(VerificationReport::passed), "{reps:#?}");

        let u = plane_wave(1e-3, &[1.0, 0.0], 0.0).unwrap();
        let p = CharacterizationProblem::new(d.clone(), 1e-3, &[0.0, 0.0], &o).unwrap();
        assert!(check_identity(&u, &p, &o).unwrap().residual.abs() <= 1e-7);

        for m in 2..=5u32 {
            let t = 1e-2;
            let ratio = (a_norm(m, t).unwrap() - 1.0) / (-t * t / (2.0 * (f64::from(m) + 2.0)));
            assert!((0.999..=1.001).contains(&ratio));
        }
        assert_eq!(a_norm(3, 0.0).unwrap(), 1.0);

        // off-centre ball: the harmonic linear check fails, and the Helmholtz
        // residual tends to the harmonic one
        let d = ball(&[0.3, 0.0], 1.0).unwrap();
        let reps = kuran_limit_check(&d, &[0.0, 0.0], &[0.5, 0.1, 0.01], &o).unwrap();
        let get = |n: &str| reps.iter().find(|r| r.name == n).unwrap();
        assert_eq!(get("kuran.harmonic_linear").verdict, Verdict::Fail);
        assert!(get("kuran.identity_limit[02]").passed());
        assert!(get("kuran.kernel_rate[02]").passed());
        assert!(!get("kuran.kernel_rate[00]").passed());
    }

    #[test]
    fn flux_identity_examples() {
        let o = opts();
        let u = radial_solution(3, 1.0, &[0.0; 3]).unwrap();
        assert!(flux_identity_check(&u, &[0.0; 3], 1.0, &o).unwrap().passed());
        let pw = plane_wave(1.0, &[1.0, 0.0], 0.0).unwrap();
        let rep = flux_identity_check(&pw, &[0.0, 0.0], 1.0, &o).unwrap();
        assert!(rep.passed());
        assert!((rep.lhs - PI * 0.8801012).abs() < 1e-6);
        let zero = pw.clone().scaled(0.0);
        let rep = flux_identity_check(&zero, &[0.0, 0.0], 1.0, &o).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
        assert!(rep.passed());
        let md = modified_radial_solution(2, 1.5, &[0.0, 0.0]).unwrap();
        assert!(flux_identity_check(&md, &[0.1, 0.0], 0.8, &o).unwrap().passed());
    }

    #[test]
    fn theorem1_examples() {
        let o = opts();
        let rep = theorem1_identity_check(1.0, &[0.0; 3], 1.0, 3, &o).unwrap();
        assert!(rep.passed());
        assert!(rep.residual.abs() <= 1e-9);
        assert_eq!(rep.diagnostics["b_monotone_on_grid"], true);
        let rep = theorem1_identity_check(1e-7, &[0.0, 0.0], 1.0, 2, &o).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-12 && (rep.rhs - 1.0).abs() < 1e-12);
        assert!(b_norm(3, 2.0).unwrap() > b_norm(3, 1.0).unwrap());

        // 1-D radial oracle 3∫₀¹ b_1(s) s² ds = 3∫₀¹ s sinh s ds = 3(cosh 1 − sinh 1)
        let exact = 3.0 * (1f64.cosh() - 1f64.sinh());
        assert!((b_norm(3, 1.0).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn reports_reproduce_bit_identically() {
        let o = CheckOptions { samples: 300_000, seed: 77, ..opts() };
        let sq = cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
        let p = CharacterizationProblem::new(sq, 2.0, &[0.0, 0.0], &o).unwrap();
        let a = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
        let b = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &o).unwrap();
        assert_eq!(serde_json::to_string(&a.discrepancy).unwrap(), serde_json::to_string(&b.discrepancy).unwrap());
    }
}
