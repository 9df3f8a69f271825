//! Exact solutions of `∇²u + λ²u = 0` and `∇²u − μ²u = 0`.
//!
//! Every field is an entire function of `R^m`; restricting it to a domain is
//! left to the quadrature layer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::distance;
use crate::quadrature::GaussLegendre;
use crate::specfun::{a_norm, b_norm, gamma_fn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `∇²u + λ²u = 0`
    Helmholtz,
    /// `∇²u − μ²u = 0`
    ModifiedHelmholtz,
}

impl Equation {
    /// Sign `s` with `∇²u = s · k² u`.
    pub fn laplacian_sign(self) -> f64 {
        match self {
            Equation::Helmholtz => -1.0,
            Equation::ModifiedHelmholtz => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    PlaneWave { direction: Vec<f64>, phase: f64 },
    Radial { center: Vec<f64> },
    Membrane { i: u32, j: u32, a: f64 },
    ModifiedRadial { center: Vec<f64> },
}

/// A scalar field with its equation and wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    dim: usize,
    wavenumber: f64,
    equation: Equation,
    kind: FieldKind,
    scale: f64,
}

/// `sin(πz)`, exact at integers and half-integers.
pub fn sin_pi(z: f64) -> f64 {
    let r = z.rem_euclid(2.0);
    let (r, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    // r ∈ [0, 1]; sin(πr) = sin(π(1 − r))
    let r = if r > 0.5 { 1.0 - r } else { r };
    let v = if r == 0.0 {
        0.0
    } else if r == 0.5 {
        1.0
    } else if r <= 0.25 {
        (PI * r).sin()
    } else {
        (PI * (0.5 - r)).cos()
    };
    sign * v
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("wavenumber must be positive and finite, got {k}"));
    }
    Ok(())
}

fn check_center(center: &[f64]) -> Result<()> {
    if center.len() < 2 {
        return domain("fields need dimension >= 2");
    }
    if center.iter().any(|c| !c.is_finite()) {
        return domain("centre must be finite");
    }
    Ok(())
}

/// `u(x) = cos(λ⟨direction, x⟩ + phase)`.
pub fn plane_wave(lambda: f64, direction: &[f64], phase: f64) -> Result<SolutionField> {
    check_wavenumber(lambda)?;
    check_center(direction)?;
    let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return domain(format!("plane-wave direction must be a unit vector, |d| = {norm}"));
    }
    if !phase.is_finite() {
        return domain("phase must be finite");
    }
    Ok(SolutionField {
        dim: direction.len(),
        wavenumber: lambda,
        equation: Equation::Helmholtz,
        kind: FieldKind::PlaneWave { direction: direction.to_vec(), phase },
        scale: 1.0,
    })
}

/// `U(x) = a_{m−2}(λ|x − center|)`, with `U(center) = 1`.
pub fn radial_solution(m: usize, lambda: f64, center: &[f64]) -> Result<SolutionField> {
    check_wavenumber(lambda)?;
    check_center(center)?;
    if center.len() != m {
        return domain("centre dimension does not match m");
    }
    Ok(SolutionField {
        dim: m,
        wavenumber: lambda,
        equation: Equation::Helmholtz,
        kind: FieldKind::Radial { center: center.to_vec() },
        scale: 1.0,
    })
}

/// `Ũ(x) = b_{m−2}(μ|x − center|)`: positive, increasing in the radius.
pub fn modified_radial_solution(m: usize, mu: f64, center: &[f64]) -> Result<SolutionField> {
    check_wavenumber(mu)?;
    check_center(center)?;
    if center.len() != m {
        return domain("centre dimension does not match m");
    }
    Ok(SolutionField {
        dim: m,
        wavenumber: mu,
        equation: Equation::ModifiedHelmholtz,
        kind: FieldKind::ModifiedRadial { center: center.to_vec() },
        scale: 1.0,
    })
}

/// Eigenfunction `sin(iπx₁/a) sin(jπx₂/a)` of the square membrane `(0, a)²`
/// with `λ_ij = (π/a)√(i² + j²)`.
pub fn membrane_eigenfunction(i: u32, j: u32, a: f64) -> Result<SolutionField> {
    if i == 0 || j == 0 {
        return domain("membrane mode indices must be >= 1");
    }
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("membrane side must be positive, got {a}"));
    }
    let lambda = PI / a * f64::from(i * i + j * j).sqrt();
    Ok(SolutionField {
        dim: 2,
        wavenumber: lambda,
        equation: Equation::Helmholtz,
        kind: FieldKind::Membrane { i, j, a },
        scale: 1.0,
    })
}

impl SolutionField {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `c · u`, still a solution of the same equation.
    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let v = match &self.kind {
            FieldKind::PlaneWave { direction, phase } => {
                let dot: f64 = direction.iter().zip(x).map(|(d, x)| d * x).sum();
                (self.wavenumber * dot + phase).cos()
            }
            FieldKind::Radial { center } => {
                a_norm(self.dim as u32 - 2, self.wavenumber * distance(x, center)).unwrap_or(f64::NAN)
            }
            FieldKind::ModifiedRadial { center } => {
                b_norm(self.dim as u32 - 2, self.wavenumber * distance(x, center)).unwrap_or(f64::NAN)
            }
            FieldKind::Membrane { i, j, a } => {
                sin_pi(f64::from(*i) * x[0] / a) * sin_pi(f64::from(*j) * x[1] / a)
            }
        };
        self.scale * v
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        let base = match &self.kind {
            FieldKind::PlaneWave { direction, phase } => format!(
                "plane_wave(dir=[{}], phase={phase})",
                direction.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(",")
            ),
            FieldKind::Radial { .. } => "radial_U".to_string(),
            FieldKind::ModifiedRadial { .. } => "modified_radial".to_string(),
            FieldKind::Membrane { i, j, .. } => format!("membrane_u{i}{j}"),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    pub fn to_spec(&self) -> SolutionSpec {
        let scale = self.scale;
        match &self.kind {
            FieldKind::PlaneWave { direction, phase } => SolutionSpec::PlaneWave {
                lambda: self.wavenumber,
                direction: direction.clone(),
                phase: *phase,
                scale,
            },
            FieldKind::Radial { center } => {
                SolutionSpec::Radial { lambda: self.wavenumber, center: center.clone(), scale }
            }
            FieldKind::Membrane { i, j, a } => SolutionSpec::Membrane { i: *i, j: *j, a: *a, scale },
            FieldKind::ModifiedRadial { center } => {
                SolutionSpec::ModifiedRadial { mu: self.wavenumber, center: center.clone(), scale }
            }
        }
    }

    pub fn from_spec(spec: &SolutionSpec) -> Result<Self> {
        let (field, scale) = match spec {
            SolutionSpec::PlaneWave { lambda, direction, phase, scale } => {
                (plane_wave(*lambda, direction, *phase)?, *scale)
            }
            SolutionSpec::Radial { lambda, center, scale } => {
                (radial_solution(center.len(), *lambda, center)?, *scale)
            }
            SolutionSpec::Membrane { i, j, a, scale } => (membrane_eigenfunction(*i, *j, *a)?, *scale),
            SolutionSpec::ModifiedRadial { mu, center, scale } => {
                (modified_radial_solution(center.len(), *mu, center)?, *scale)
            }
        };
        if !scale.is_finite() {
            return domain("scale must be finite");
        }
        Ok(field.scaled(scale))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: SolutionSpec =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("solution: {e}")))?;
        Self::from_spec(&spec)
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// JSON description of a solution field. `scale` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionSpec {
    PlaneWave {
        lambda: f64,
        direction: Vec<f64>,
        #[serde(default)]
        phase: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    Radial {
        lambda: f64,
        center: Vec<f64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    Membrane {
        i: u32,
        j: u32,
        a: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    ModifiedRadial {
        mu: f64,
        center: Vec<f64>,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
}

/// `U(ρ) = C_m ∫₀¹ (1 − s²)^{(m−3)/2} cos(λρs) ds` with
/// `C_m = 2Γ(m/2) / (√π Γ((m−1)/2))`.
///
/// After `s = sin θ` the integrand `cos^{m−2}θ · cos(λρ sin θ)` is smooth on
/// `[0, π/2]` for every `m ≥ 2`, and Gauss–Legendre in `θ` converges
/// spectrally. Node counts are doubled until two rules agree to 1e-14.
pub fn poisson_eval(m: usize, lambda: f64, rho: f64) -> Result<f64> {
    if m < 2 {
        return domain("poisson_eval needs m >= 2");
    }
    check_wavenumber(lambda)?;
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("radius must be >= 0, got {rho}"));
    }
    let mf = m as f64;
    let prefactor = 2.0 * gamma_fn(mf / 2.0)? / (PI.sqrt() * gamma_fn((mf - 1.0) / 2.0)?);
    let t = lambda * rho;
    let integrand = |th: f64| th.cos().powi(m as i32 - 2) * (t * th.sin()).cos();
    let mut n = 32 + 2 * t.ceil() as usize;
    let mut prev = GaussLegendre::new(n)?.integrate(0.0, PI / 2.0, integrand);
    for _ in 0..6 {
        n *= 2;
        let next = GaussLegendre::new(n)?.integrate(0.0, PI / 2.0, integrand);
        if (next - prev).abs() <= 1e-14 * next.abs().max(1.0) {
            return Ok(prefactor * next);
        }
        prev = next;
    }
    Err(Error::Estimation(format!("Poisson integral did not converge for m={m}, λρ={t}")))
}

/// Central second-difference Laplacian of `f` at `x`.
pub fn laplacian_fd<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> f64 {
    let centre = f(x);
    let mut p = x.to_vec();
    let mut lap = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let plus = f(&p);
        p[i] = x[i] - h;
        let minus = f(&p);
        p[i] = x[i];
        lap += (plus - 2.0 * centre + minus) / (h * h);
    }
    lap
}

/// `∇²u + λ²u` (Helmholtz) or `∇²u − μ²u` (modified), with a finite-difference
/// Laplacian of step `h`. `O(h²)` for exact solutions.
pub fn helmholtz_residual(u: &SolutionField, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return domain("finite-difference step must be positive");
    }
    if x.len() != u.dim {
        return domain("point dimension does not match the field");
    }
    let k2 = u.wavenumber * u.wavenumber;
    let lap = laplacian_fd(|p| u.evaluate(p), x, h);
    Ok(lap - u.equation.laplacian_sign() * k2 * u.evaluate(x))
}
