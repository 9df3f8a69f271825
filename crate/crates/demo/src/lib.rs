//! Browser bindings for `ballcheck`.
//!
//! Three operations, each returning a JSON string for the page in `www/`:
//! kernel curves, a membrane mode with its size condition, and the
//! characterization of a disc, shifted disc or square.

use serde_json::json;
use wasm_bindgen::prelude::*;

use ballcheck::geometry::{ball, cuboid, translate, Domain};
use ballcheck::solutions::membrane_eigenfunction;
use ballcheck::specfun::{a_norm, b_norm, bessel_zero, BesselOrder};
use ballcheck::verify::{characterize, critical_radius, default_family, CharacterizationProblem, CheckOptions};

const MAX_POINTS: usize = 4096;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `a_m` and `b_m` on `[0, t_max]`, with the zeros of `a_m` in range.
pub fn kernel_curves_json(m: u32, t_max: f64, points: usize) -> Result<String, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    if !(t_max > 0.0 && t_max <= 60.0) {
        return Err("t_max must be in (0, 60]".into());
    }
    let mut t = Vec::with_capacity(points);
    let mut a = Vec::with_capacity(points);
    let mut b = Vec::with_capacity(points);
    for k in 0..points {
        let x = t_max * k as f64 / (points - 1) as f64;
        t.push(x);
        a.push(a_norm(m, x).map_err(err)?);
        b.push(b_norm(m, x).map_err(err)?);
    }
    let mut zeros = Vec::new();
    if m >= 1 {
        for n in 1.. {
            let z = bessel_zero(BesselOrder::half(m), n).map_err(err)?;
            if z > t_max {
                break;
            }
            zeros.push(z);
        }
    }
    Ok(json!({ "m": m, "t": t, "a": a, "b": b, "zeros": zeros }).to_string())
}

/// `u_ij` on an `n × n` grid of the unit square plus the size-condition
/// numbers about the centre.
pub fn membrane_json(i: u32, j: u32, n: usize) -> Result<String, String> {
    if !(2..=256).contains(&n) {
        return Err("grid size must be in 2..=256".into());
    }
    let u = membrane_eigenfunction(i, j, 1.0).map_err(err)?;
    let mut values = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let x = (col as f64 + 0.5) / n as f64;
            let y = (row as f64 + 0.5) / n as f64;
            values.push(u.evaluate(&[x, y]));
        }
    }
    let lambda = u.wavenumber();
    let lambda_r0 = lambda * 0.5f64.sqrt();
    let first_zero = lambda * critical_radius(2, lambda).map_err(err)?;
    Ok(json!({
        "i": i,
        "j": j,
        "n": n,
        "values": values,
        "lambda": lambda,
        "centre_value": u.evaluate(&[0.5, 0.5]),
        "lambda_r0": lambda_r0,
        "first_zero": first_zero,
        "size_condition_holds": lambda_r0 <= first_zero,
    })
    .to_string())
}

fn demo_domain(shape: &str, shift: f64) -> Result<Domain, String> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match shape {
        "disc" => ball(&[0.0, 0.0], r).map_err(err),
        "shifted" => translate(&ball(&[0.0, 0.0], r).map_err(err)?, &[shift, 0.0]).map_err(err),
        // same area as the disc
        "square" => {
            let h = (std::f64::consts::PI / 2.0).sqrt() / 2.0;
            cuboid(&[-h + shift, -h], &[h + shift, h]).map_err(err)
        }
        other => Err(format!("unknown shape {other}")),
    }
}

/// Characterize a demo shape about the origin at wavenumber `lambda`.
pub fn characterize_json(shape: &str, shift: f64, lambda: f64, seed: u64) -> Result<String, String> {
    if !(shift.abs() <= 1.0) {
        return Err("shift must be in [-1, 1]".into());
    }
    let d = demo_domain(shape, shift)?;
    let opts = CheckOptions { samples: 200_000, seed, circumradius_budget: 100_000, ..CheckOptions::default() };
    let p = CharacterizationProblem::new(d, lambda, &[0.0, 0.0], &opts).map_err(err)?;
    let family = default_family(2, lambda, 8, seed).map_err(err)?;
    let out = characterize(&p, &family, &opts).map_err(err)?;
    serde_json::to_string(&out).map_err(err)
}

#[wasm_bindgen]
pub fn kernel_curves(m: u32, t_max: f64, points: usize) -> Result<String, JsValue> {
    kernel_curves_json(m, t_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn membrane(i: u32, j: u32, n: usize) -> Result<String, JsValue> {
    membrane_json(i, j, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = characterizeShape)]
pub fn characterize_shape(shape: &str, shift: f64, lambda: f64, seed: u32) -> Result<String, JsValue> {
    characterize_json(shape, shift, lambda, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
