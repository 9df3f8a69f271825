//! Volume means `M(f, D) = |D|⁻¹ ∫_D f` and sphere flux integrals.
//!
//! Balls (m = 2, 3) and boxes use tensor Gauss–Legendre / trapezoid rules;
//! every other domain goes through seeded rejection Monte Carlo. Means are
//! formed as `Σ w f / Σ w`, so constants are reproduced exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{self, seeded_rng, BoundingBox, Domain};
use crate::solutions::SolutionField;

pub const DEFAULT_MC_SAMPLES: u64 = 2_000_000;
pub const DEFAULT_RADIAL_NODES: usize = 64;
pub const DEFAULT_ANGULAR_RESOLUTION: usize = 64;
pub const DEFAULT_BOX_NODES: usize = 32;
/// Seed used when `ball_mean` falls back to Monte Carlo.
pub const FALLBACK_SEED: u64 = 0x5eed;

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("Gauss-Legendre rule needs at least one node");
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pn_1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pn_1) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let mut acc = CompensatedSum::default();
        for (x, w) in self.on_interval(a, b) {
            acc.add(w * f(x));
        }
        acc.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BallSpectral,
    BoxGauss,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::BallSpectral => "ball_spectral",
            Method::BoxGauss => "box_gauss",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

/// A volume mean with an error estimate and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueEstimate {
    pub value: f64,
    /// Monte Carlo: three standard errors. Deterministic rules: difference
    /// from the same rule at half resolution.
    pub abs_error_estimate: f64,
    pub method: Method,
    pub samples_or_nodes: u64,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

/// Weighted points of a rule on the unit sphere `S^{m-1}` (m = 2, 3),
/// weights summing to its area.
fn sphere_rule(m: usize, resolution: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let n = resolution.max(1);
    match m {
        2 => Ok((0..n)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / n as f64;
                (vec![th.cos(), th.sin()], 2.0 * PI / n as f64)
            })
            .collect()),
        3 => {
            let gl = GaussLegendre::new(n)?;
            let mut pts = Vec::with_capacity(n * n);
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                let rho = (1.0 - z * z).sqrt();
                for j in 0..n {
                    let ph = 2.0 * PI * j as f64 / n as f64;
                    pts.push((vec![rho * ph.cos(), rho * ph.sin(), *z], wz * 2.0 * PI / n as f64));
                }
            }
            Ok(pts)
        }
        _ => Err(Error::NotImplemented(format!("sphere rule for m = {m}"))),
    }
}

fn ball_rule_mean<F>(f: &F, center: &[f64], r: f64, radial: usize, angular: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let m = center.len();
    let gl = GaussLegendre::new(radial)?;
    let sphere = sphere_rule(m, angular)?;
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    let mut p = vec![0.0; m];
    for (s, ws) in gl.on_interval(0.0, r) {
        let jac = ws * s.powi(m as i32 - 1);
        for (dir, wd) in &sphere {
            for i in 0..m {
                p[i] = center[i] + s * dir[i];
            }
            let w = jac * wd;
            num.add(w * f(&p));
            den.add(w);
        }
    }
    Ok(num.value() / den.value())
}

/// `M(f, B_r(center))`. Spectral tensor rule for m = 2, 3 (Gauss–Legendre in
/// radius with Jacobian `s^{m-1}`, trapezoid on the circle or Gauss in
/// `cos θ` × trapezoid in `φ` on the sphere); Monte Carlo otherwise.
pub fn ball_mean<F>(
    f: F,
    center: &[f64],
    r: f64,
    radial_nodes: usize,
    angular_resolution: usize,
) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("ball radius must be positive, got {r}"));
    }
    let m = center.len();
    if m != 2 && m != 3 {
        let b = geometry::ball(center, r)?;
        let mut est = mc_mean(f, &b, DEFAULT_MC_SAMPLES, FALLBACK_SEED)?;
        est.notice = Some(format!("no spectral ball rule for m = {m}; used monte_carlo"));
        return Ok(est);
    }
    let (radial_nodes, angular_resolution) = (radial_nodes.max(2), angular_resolution.max(2));
    let fine = ball_rule_mean(&f, center, r, radial_nodes, angular_resolution)?;
    let coarse = ball_rule_mean(&f, center, r, radial_nodes / 2, angular_resolution / 2)?;
    let angular_points = if m == 2 { angular_resolution } else { angular_resolution * angular_resolution };
    Ok(MeanValueEstimate {
        value: fine,
        abs_error_estimate: (fine - coarse).abs(),
        method: Method::BallSpectral,
        samples_or_nodes: (radial_nodes * angular_points) as u64,
        seed: None,
        notice: None,
    })
}

fn box_rule_mean<F>(f: &F, low: &[f64], high: &[f64], n: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let m = low.len();
    let gl = GaussLegendre::new(n)?;
    let axes: Vec<Vec<(f64, f64)>> =
        (0..m).map(|i| gl.on_interval(low[i], high[i]).collect()).collect();
    let mut idx = vec![0usize; m];
    let mut p = vec![0.0; m];
    let mut num = CompensatedSum::default();
    let mut den = CompensatedSum::default();
    loop {
        let mut w = 1.0;
        for i in 0..m {
            let (x, wx) = axes[i][idx[i]];
            p[i] = x;
            w *= wx;
        }
        num.add(w * f(&p));
        den.add(w);
        // odometer increment
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == m {
                return Ok(num.value() / den.value());
            }
        }
    }
}

/// `M(f, box)` by tensor Gauss–Legendre.
pub fn box_mean<F>(f: F, low: &[f64], high: &[f64], nodes_per_axis: usize) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    if low.len() != high.len() || low.iter().zip(high).any(|(l, h)| !(l < h)) {
        return domain("box_mean needs a non-degenerate box");
    }
    let n = nodes_per_axis.max(2);
    let fine = box_rule_mean(&f, low, high, n)?;
    let coarse = box_rule_mean(&f, low, high, n / 2)?;
    Ok(MeanValueEstimate {
        value: fine,
        abs_error_estimate: (fine - coarse).abs(),
        method: Method::BoxGauss,
        samples_or_nodes: (n as u64).pow(low.len() as u32),
        seed: None,
        notice: None,
    })
}

/// Running mean and variance (Welford).
#[derive(Debug, Default, Clone, Copy)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

/// `M(f, D)` by rejection sampling over the bounding box of `D`.
pub fn mc_mean<F>(f: F, d: &Domain, samples: u64, seed: u64) -> Result<MeanValueEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = seeded_rng(seed);
    let bbox = d.bounding_box();
    let mut p = vec![0.0; d.dimension()];
    let mut acc = Welford::default();
    for _ in 0..samples {
        bbox.sample_into(&mut rng, &mut p);
        if d.contains(&p) {
            acc.push(f(&p));
        }
    }
    if samples == 0 || (acc.n as f64) < 1e-4 * samples as f64 || acc.n < 2 {
        return Err(Error::Estimation(format!(
            "acceptance too low: {} of {samples} samples inside the domain",
            acc.n
        )));
    }
    Ok(MeanValueEstimate {
        value: acc.mean,
        abs_error_estimate: 3.0 * (acc.variance() / acc.n as f64).sqrt(),
        method: Method::MonteCarlo,
        samples_or_nodes: samples,
        seed: Some(seed),
        notice: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// `∫_box g` by plain Monte Carlo, for several integrands sharing one stream
/// of sample points. `g` writes one value per integrand into its output slot.
pub fn mc_box_integrals<G>(
    g: G,
    outputs: usize,
    bbox: &BoundingBox,
    samples: u64,
    seed: u64,
) -> Result<Vec<IntegralEstimate>>
where
    G: Fn(&[f64], &mut [f64]),
{
    if samples < 2 {
        return Err(Error::Estimation("Monte Carlo integration needs at least 2 samples".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut p = vec![0.0; bbox.low.len()];
    let mut vals = vec![0.0; outputs];
    let mut acc = vec![Welford::default(); outputs];
    for _ in 0..samples {
        bbox.sample_into(&mut rng, &mut p);
        vals.iter_mut().for_each(|v| *v = 0.0);
        g(&p, &mut vals);
        for (a, v) in acc.iter_mut().zip(&vals) {
            a.push(*v);
        }
    }
    let vol = bbox.volume();
    Ok(acc
        .iter()
        .map(|a| IntegralEstimate {
            value: vol * a.mean,
            std_error: vol * (a.variance() / a.n as f64).sqrt(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxEstimate {
    pub value: f64,
    /// Difference between central differences at steps `δ` and `2δ`.
    pub abs_error_estimate: f64,
}

/// `∫_{∂B_r(center)} ∂u/∂n dS` for m = 2, 3, with the normal derivative taken
/// by central differences along the outward radius, step `1e-5·r`.
pub fn surface_flux<F>(u: F, center: &[f64], r: f64, angular_resolution: usize) -> Result<FluxEstimate>
where
    F: Fn(&[f64]) -> f64,
{
    let m = center.len();
    if m != 2 && m != 3 {
        return Err(Error::NotImplemented(format!("surface_flux for m = {m}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("sphere radius must be positive, got {r}"));
    }
    let rule = sphere_rule(m, angular_resolution.max(2))?;
    let step = 1e-5 * r;
    let mut p = vec![0.0; m];
    let mut at = |dir: &[f64], s: f64| {
        for i in 0..m {
            p[i] = center[i] + s * dir[i];
        }
        u(&p)
    };
    let mut flux_h = CompensatedSum::default();
    let mut flux_2h = CompensatedSum::default();
    for (dir, w) in &rule {
        let d1 = (at(dir, r + step) - at(dir, r - step)) / (2.0 * step);
        let d2 = (at(dir, r + 2.0 * step) - at(dir, r - 2.0 * step)) / (4.0 * step);
        flux_h.add(w * d1);
        flux_2h.add(w * d2);
    }
    let area = r.powi(m as i32 - 1);
    let value = area * flux_h.value();
    Ok(FluxEstimate { value, abs_error_estimate: (value - area * flux_2h.value()).abs() })
}

/// [`surface_flux`] of a solution field.
pub fn field_flux(u: &SolutionField, center: &[f64], r: f64, angular_resolution: usize) -> Result<FluxEstimate> {
    if u.dimension() != center.len() {
        return domain("centre dimension does not match the field");
    }
    surface_flux(|x| u.evaluate(x), center, r, angular_resolution)
}
