//! Real-order Bessel functions, the normalized mean-value kernels and
//! Bessel zeros.
//!
//! `J_ν` and `I_ν` are evaluated by their ascending series for moderate
//! arguments. Above the series threshold `J_ν` switches to Miller's downward
//! recurrence, normalized with the Neumann sum
//! `(t/2)^α = Σ_k (α + 2k) Γ(α + k) / k! · J_{α+2k}(t)`.
//!
//! The kernels
//!
//! ```text
//! a_m(t) = Γ(m/2 + 1) J_{m/2}(t) / (t/2)^{m/2}
//! b_m(t) = Γ(m/2 + 1) I_{m/2}(t) / (t/2)^{m/2}
//! ```
//!
//! are the factors relating the value of a (modified) Helmholtz solution at
//! the centre of a ball to its volume mean over the ball.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest order covered by the accuracy contract and the zero finder.
pub const MAX_ORDER: f64 = 6.0;

/// Overflow guard for the modified Bessel function and `b_m`.
pub const MAX_MODIFIED_ARG: f64 = 300.0;

/// Below this argument the kernels use their two-term even expansion.
const KERNEL_SMALL_T: f64 = 1e-6;

/// Order `ν ≥ 0` of `J_ν` or `I_ν`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return domain(format!("Bessel order must be finite and >= 0, got {nu}"));
        }
        Ok(Self(nu))
    }

    /// The order `k / 2`.
    pub fn half(k: u32) -> Self {
        Self(f64::from(k) / 2.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `a_m`, built on `J_{m/2}`.
    Oscillatory,
    /// `b_m`, built on `I_{m/2}`.
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub t: f64,
    pub value: f64,
    pub kind: KernelKind,
}

/// Evaluate either normalized kernel.
pub fn kernel(kind: KernelKind, m: u32, t: f64) -> Result<KernelValue> {
    let value = match kind {
        KernelKind::Oscillatory => a_norm(m, t)?,
        KernelKind::Monotone => b_norm(m, t)?,
    };
    Ok(KernelValue { t, value, kind })
}

/// Gamma function. Exact product recurrence on integers and half-integers,
/// `libm::tgamma` elsewhere.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return domain(format!("gamma_fn requires x > 0, got {x}"));
    }
    let twice = 2.0 * x;
    if twice == twice.round() && x <= 171.0 {
        if x.fract() == 0.0 {
            // (x - 1)!
            let n = x as u32;
            return Ok((1..n).fold(1.0, |acc, k| acc * f64::from(k)));
        }
        // Γ(n + 1/2) = √π · Π_{k<n} (k + 1/2)
        let n = x.floor() as u32;
        let prod = (0..n).fold(1.0, |acc, k| acc * (f64::from(k) + 0.5));
        return Ok(PI.sqrt() * prod);
    }
    Ok(libm::tgamma(x))
}

fn check_arg(t: f64, what: &str) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("{what} requires a finite argument t >= 0, got {t}"));
    }
    Ok(())
}

/// Argument up to which the ascending series is used for `J_ν`.
fn series_threshold(nu: f64) -> f64 {
    f64::max(12.0, 2.0 * nu)
}

/// `Σ_k s^k / (k! (ν+1)_k)`, i.e. `Γ(ν+1) (t/2)^{-ν} J_ν(t)` for `s = -t²/4`
/// and the `I_ν` analogue for `s = +t²/4`.
fn normalized_series(nu: f64, s: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let peak_index = s.abs().sqrt();
    for k in 1..2000 {
        let kf = f64::from(k);
        term *= s / (kf * (kf + nu));
        sum += term;
        if term == 0.0 || (kf > peak_index && term.abs() <= 1e-17 * sum.abs().max(1e-300)) {
            break;
        }
    }
    sum
}

fn j_series(nu: f64, t: f64) -> Result<f64> {
    let lead = (t / 2.0).powf(nu) / gamma_fn(nu + 1.0)?;
    Ok(lead * normalized_series(nu, -t * t / 4.0))
}

/// Miller's backward recurrence, normalized by the Neumann sum.
fn j_miller(nu: f64, t: f64) -> Result<f64> {
    let alpha = nu - nu.floor();
    let target = nu.floor() as usize;
    let mut top = (t.max(nu) + 40.0 + 6.0 * t.cbrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }

    // g_i = Γ(α + i) / i!; the α = 0 case uses the limiting weights 1, 2, 2, ...
    let weight = {
        let mut g = Vec::with_capacity(top / 2 + 1);
        if alpha > 0.0 {
            let mut gi = gamma_fn(alpha)?;
            g.push(alpha * gi);
            for i in 1..=top / 2 {
                let fi = i as f64;
                gi *= (alpha + fi - 1.0) / fi;
                g.push((alpha + 2.0 * fi) * gi);
            }
        } else {
            g.push(1.0);
            g.resize(top / 2 + 1, 2.0);
        }
        g
    };

    let mut above = 0.0; // f_{k+1}
    let mut current = 1e-30; // f_k
    let mut norm = 0.0;
    let mut at_target = 0.0;
    let mut k = top;
    loop {
        if k == target {
            at_target = current;
        }
        if k.is_multiple_of(2) {
            norm += weight[k / 2] * current;
        }
        if k == 0 {
            break;
        }
        let below = 2.0 * (alpha + k as f64) / t * current - above;
        above = current;
        current = below;
        k -= 1;
        if current.abs() > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            at_target *= 1e-250;
        }
    }
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Internal(format!(
            "Miller recurrence failed to normalize for nu={nu}, t={t}"
        )));
    }
    Ok(at_target * (t / 2.0).powf(alpha) / norm)
}

/// Bessel function of the first kind `J_ν(t)`, `t ≥ 0`.
pub fn bessel_j(order: BesselOrder, t: f64) -> Result<f64> {
    check_arg(t, "bessel_j")?;
    let nu = order.value();
    if t == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if t <= series_threshold(nu) {
        j_series(nu, t)
    } else {
        j_miller(nu, t)
    }
}

/// Modified Bessel function of the first kind `I_ν(t)`, `0 ≤ t ≤ 300`.
pub fn bessel_i(order: BesselOrder, t: f64) -> Result<f64> {
    check_arg(t, "bessel_i")?;
    if t > MAX_MODIFIED_ARG {
        return domain(format!("bessel_i argument {t} exceeds overflow bound {MAX_MODIFIED_ARG}"));
    }
    let nu = order.value();
    if t == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let lead = (t / 2.0).powf(nu) / gamma_fn(nu + 1.0)?;
    Ok(lead * normalized_series(nu, t * t / 4.0))
}

/// Mean-value kernel `a_m(t) = Γ(m/2+1) J_{m/2}(t) / (t/2)^{m/2}`, with
/// `a_m(0) = 1`. Defined for every `m ≥ 0`, so `a_0 = J_0` and
/// `a_1(t) = sin t / t`.
pub fn a_norm(m: u32, t: f64) -> Result<f64> {
    check_arg(t, "a_norm")?;
    let nu = f64::from(m) / 2.0;
    if t < KERNEL_SMALL_T {
        return Ok(1.0 - t * t / (2.0 * (f64::from(m) + 2.0)));
    }
    if t <= series_threshold(nu) {
        return Ok(normalized_series(nu, -t * t / 4.0));
    }
    let j = j_miller(nu, t)?;
    Ok(gamma_fn(nu + 1.0)? * j / (t / 2.0).powf(nu))
}

/// Modified kernel `b_m(t) = Γ(m/2+1) I_{m/2}(t) / (t/2)^{m/2}`; `b_m(0) = 1`
/// and `b_m` is strictly increasing.
pub fn b_norm(m: u32, t: f64) -> Result<f64> {
    check_arg(t, "b_norm")?;
    if t > MAX_MODIFIED_ARG {
        return domain(format!("b_norm argument {t} exceeds overflow bound {MAX_MODIFIED_ARG}"));
    }
    let nu = f64::from(m) / 2.0;
    if t < KERNEL_SMALL_T {
        return Ok(1.0 + t * t / (2.0 * (f64::from(m) + 2.0)));
    }
    Ok(normalized_series(nu, t * t / 4.0))
}

/// `J'_ν(t) = (ν/t) J_ν(t) − J_{ν+1}(t)`.
fn bessel_j_prime(nu: f64, t: f64) -> Result<f64> {
    let j = bessel_j(BesselOrder(nu), t)?;
    let j_next = bessel_j(BesselOrder(nu + 1.0), t)?;
    Ok(nu / t * j - j_next)
}

/// Newton iteration kept inside a sign-change bracket, falling back to
/// bisection whenever a Newton step leaves it or stalls.
fn safeguarded_newton<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (f_lo, _) = f(lo)?;
    let (f_hi, _) = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Internal(format!("no sign change on [{lo}, {hi}]")));
    }
    // orient so that f(lo) < 0
    if f_lo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut step_old = (hi - lo).abs();
    let mut step = step_old;
    let (mut fx, mut dfx) = f(x)?;
    for _ in 0..200 {
        let newton_leaves = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        let newton_slow = (2.0 * fx).abs() > (step_old * dfx).abs();
        step_old = step;
        if newton_leaves || newton_slow {
            step = 0.5 * (hi - lo);
            x = lo + step;
        } else {
            step = fx / dfx;
            x -= step;
        }
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            return Ok(x);
        }
        (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Err(Error::Internal("safeguarded Newton did not converge".into()))
}

/// Grid step for counting sign changes; far below the zero spacing of `J_ν`
/// for the orders in scope.
const ZERO_SCAN_STEP: f64 = 0.05;

/// Number of sign changes of `J_ν` on `(0, upto)`.
fn count_sign_changes(nu: f64, upto: f64) -> Result<usize> {
    let order = BesselOrder(nu);
    let mut count = 0;
    let mut t = ZERO_SCAN_STEP;
    let mut prev = bessel_j(order, t)?.signum();
    while t + ZERO_SCAN_STEP < upto {
        t += ZERO_SCAN_STEP;
        let s = bessel_j(order, t)?.signum();
        if s != prev {
            count += 1;
            prev = s;
        }
    }
    Ok(count)
}

/// Bracket the `n`-th sign change of `J_ν` by a plain scan from the origin.
fn scan_bracket(nu: f64, n: u32) -> Result<(f64, f64)> {
    let order = BesselOrder(nu);
    let mut seen = 0;
    let mut t = ZERO_SCAN_STEP;
    let mut prev = bessel_j(order, t)?;
    let limit = (f64::from(n) + nu / 2.0 + 2.0) * PI + 10.0;
    while t < limit {
        let next_t = t + ZERO_SCAN_STEP;
        let next = bessel_j(order, next_t)?;
        if next.signum() != prev.signum() {
            seen += 1;
            if seen == n {
                return Ok((t, next_t));
            }
        }
        t = next_t;
        prev = next;
    }
    Err(Error::Internal(format!("could not bracket zero {n} of J_{nu}")))
}

/// The `n`-th positive zero `j_{ν,n}` of `J_ν`, for `ν ≤ 6`.
///
/// The McMahon estimate `(n + ν/2 − 1/4)π` seeds a bracket of ±1.5 that is
/// widened until `J_ν` changes sign. The bracketed root is refined by a
/// safeguarded Newton iteration and its index is confirmed by counting sign
/// changes below it; a wrong index (the estimate is poor for large `ν` and
/// small `n`) falls back to a scan from the origin.
pub fn bessel_zero(order: BesselOrder, n: u32) -> Result<f64> {
    let nu = order.value();
    if n == 0 {
        return domain("zero index n must be >= 1");
    }
    if nu > MAX_ORDER {
        return domain(format!("bessel_zero supports orders <= {MAX_ORDER}, got {nu}"));
    }
    let f = |t: f64| -> Result<(f64, f64)> {
        Ok((bessel_j(BesselOrder(nu), t)?, bessel_j_prime(nu, t)?))
    };

    let guess = (f64::from(n) + nu / 2.0 - 0.25) * PI;
    let mut lo = (guess - 1.5).max(ZERO_SCAN_STEP);
    let mut hi = guess + 1.5;
    let mut bracketed = false;
    for _ in 0..40 {
        if bessel_j(order, lo)?.signum() != bessel_j(order, hi)?.signum() {
            bracketed = true;
            break;
        }
        lo = (lo - 0.5).max(ZERO_SCAN_STEP);
        hi += 0.5;
    }
    if bracketed {
        let root = safeguarded_newton(f, lo, hi)?;
        if count_sign_changes(nu, root - ZERO_SCAN_STEP)? + 1 == n as usize {
            return Ok(root);
        }
    }
    let (lo, hi) = scan_bracket(nu, n)?;
    safeguarded_newton(f, lo, hi)
}
