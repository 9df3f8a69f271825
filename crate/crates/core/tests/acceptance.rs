//! Acceptance suite, built without the libtest harness so its per-criterion
//! lines always show. Run with
//!
//! ```text
//! cargo test -p ballcheck --test acceptance
//! ```
//!
//! Exits nonzero if any criterion fails or exceeds its time budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ballcheck::geometry::{ball, cuboid, translate, unit_ball_volume, Domain};
use ballcheck::report::Verdict;
use ballcheck::solutions::{
    membrane_eigenfunction, plane_wave, poisson_eval, radial_solution, SolutionField,
};
use ballcheck::specfun::{a_norm, b_norm, bessel_zero, BesselOrder};
use ballcheck::verify::{
    check_mean_value_formula, flux_identity_check, membrane_counterexample, proof_discrepancy,
    theorem1_identity_check, CharacterizationProblem, CheckOptions, DiscrepancyOutcome, DiscrepancyVariant,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let ok = out.ok && in_time;
    println!(
        "criterion {id:>2} {:<4} {title}: {} [{:.3}s / {:.0}s budget{}]",
        if ok { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { ", over budget" }
    );
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn c1_bessel_zeros() -> Outcome {
    let j11 = bessel_zero(BesselOrder::half(2), 1).unwrap();
    let j32 = bessel_zero(BesselOrder::half(3), 1).unwrap();
    Outcome {
        ok: (j11 - 3.831706).abs() <= 1e-5 && (j32 - 4.493409).abs() <= 1e-5,
        detail: format!("j(1,1) = {j11:.9}, j(3/2,1) = {j32:.9}"),
    }
}

/// Four unit directions per dimension with assorted phases.
fn four_plane_waves(m: usize, lambda: f64) -> Vec<SolutionField> {
    let dirs: Vec<Vec<f64>> = if m == 2 {
        let s = 0.5f64.sqrt();
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![s, s], vec![0.3f64.cos(), -(0.3f64.sin())]]
    } else {
        let s = 3f64.sqrt().recip();
        let (a, b) = (0.6, 0.8);
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![s, -s, s], vec![0.0, a, b]]
    };
    dirs.iter()
        .zip([0.0, -PI / 2.0, 0.7, 2.1])
        .map(|(d, ph)| plane_wave(lambda, d, ph).unwrap())
        .collect()
}

fn c2_mean_value_formula() -> Outcome {
    let opts = CheckOptions::default();
    let (mut cases, mut worst, mut bad, mut negative_past_zero) = (0, 0.0f64, 0, false);
    for m in [2usize, 3] {
        let centre: Vec<f64> = (0..m).map(|k| 0.1 * (k as f64 + 1.0)).collect();
        let j = bessel_zero(BesselOrder::half(m as u32), 1).unwrap();
        for lambda in [0.5, 1.0, 2.0] {
            let mut fields = vec![radial_solution(m, lambda, &centre).unwrap()];
            fields.extend(four_plane_waves(m, lambda));
            for r in [0.5, 1.0, 2.0] {
                for u in &fields {
                    let rep = check_mean_value_formula(u, &centre, r, &opts).unwrap();
                    cases += 1;
                    worst = worst.max(rep.residual.abs());
                    if rep.residual.abs() > 1e-8 || rep.verdict != Verdict::Pass {
                        bad += 1;
                    }
                    if lambda * r > j && u.label() == "radial_U" && rep.lhs < 0.0 && rep.rhs < 0.0 {
                        negative_past_zero = true;
                    }
                }
            }
        }
    }
    Outcome {
        ok: bad == 0 && negative_past_zero,
        detail: format!(
            "{cases} cases, max |lhs - rhs| = {worst:.2e}, {bad} over 1e-8, negative case past first zero: {negative_past_zero}"
        ),
    }
}

fn c3_membrane() -> Outcome {
    let b = membrane_counterexample(1.0, &CheckOptions::default()).unwrap();
    let u21 = membrane_eigenfunction(2, 1, 1.0).unwrap();
    let get = |n: &str| b.reports.iter().find(|r| r.name == n).unwrap();
    let at_centre = u21.evaluate(&[0.5, 0.5]);
    let mean = get("membrane.u21_mean").lhs;
    let identity = get("membrane.u21_identity").residual;
    let size = get("membrane.size_condition");
    let ok = at_centre == 0.0
        && mean.abs() <= 1e-12
        && identity.abs() <= 1e-12
        && size.verdict == Verdict::Fail
        && (b.lambda_r0 - 4.967294).abs() <= 1e-5
        && (b.first_zero - 3.831706).abs() <= 1e-5;
    Outcome {
        ok,
        detail: format!(
            "u21(1/2,1/2) = {at_centre}, box mean = {mean:.1e}, identity residual = {identity:.1e}, \
             size condition {} with {:.6} vs {:.6}",
            size.verdict, b.lambda_r0, b.first_zero
        ),
    }
}

fn discrepancy_case(d: Domain, lambda: f64, seed: u64) -> (DiscrepancyOutcome, bool) {
    let opts = CheckOptions { samples: 4_000_000, seed, ..CheckOptions::default() };
    let p = CharacterizationProblem::new(d, lambda, &[0.0, 0.0], &opts).unwrap();
    let out = proof_discrepancy(&p, DiscrepancyVariant::Helmholtz, &opts).unwrap();
    let d = &out.discrepancy;
    let vb = &out.volume_balance;
    let ok = d.residual < -d.error_bar
        && d.verdict == Verdict::Pass
        && vb.residual.abs() <= 3.0 * vb.diagnostics["std_error"].as_f64().unwrap();
    (out, ok)
}

fn c4_case(label: &str, d: Domain, lambda: f64) -> Outcome {
    let (out, ok) = discrepancy_case(d, lambda, 4);
    Outcome {
        ok,
        detail: format!(
            "{label}, lambda = {lambda}: discrepancy = {:.4e} (3 sigma = {:.2e}), |Gi| - |Ge| = {:.2e} (sigma = {:.2e})",
            out.discrepancy.residual,
            out.discrepancy.error_bar,
            out.volume_balance.residual,
            out.volume_balance.diagnostics["std_error"].as_f64().unwrap()
        ),
    }
}

fn c5_poisson() -> Outcome {
    let mut worst = 0.0f64;
    for m in 2..=5usize {
        for k in 0..=200 {
            let rho = 10.0 * k as f64 / 200.0;
            let diff = poisson_eval(m, 1.0, rho).unwrap() - a_norm(m as u32 - 2, rho).unwrap();
            worst = worst.max(diff.abs());
        }
    }
    Outcome { ok: worst <= 1e-8, detail: format!("max deviation {worst:.2e} over 4 x 201 points") }
}

fn c6_flux() -> Outcome {
    let opts = CheckOptions::default();
    let s = 0.5f64.sqrt();
    let cases: Vec<(SolutionField, Vec<f64>, f64)> = vec![
        (radial_solution(3, 1.0, &[0.0; 3]).unwrap(), vec![0.0; 3], 1.0),
        (plane_wave(1.0, &[1.0, 0.0], 0.0).unwrap(), vec![0.0, 0.0], 1.0),
        (plane_wave(2.0, &[s, 0.0, s], 0.4).unwrap(), vec![0.1, -0.2, 0.3], 0.7),
        (radial_solution(2, 3.0, &[0.2, 0.0]).unwrap(), vec![0.0, 0.1], 1.5),
        (membrane_eigenfunction(2, 1, 1.0).unwrap(), vec![0.3, 0.4], 0.25),
        (radial_solution(3, 2.5, &[0.0, 0.0, 0.5]).unwrap(), vec![0.2, 0.0, 0.0], 1.2),
    ];
    let mut worst = 0.0f64;
    let mut all = true;
    for (u, c, r) in &cases {
        let rep = flux_identity_check(u, c, *r, &opts).unwrap();
        let rel = rep.residual.abs() / rep.lhs.abs().max(rep.rhs.abs()).max(1e-300);
        worst = worst.max(rel);
        all &= rel <= 1e-5;
    }
    Outcome { ok: all, detail: format!("{} cases, max relative residual {worst:.2e}", cases.len()) }
}

fn c7_kuran() -> Outcome {
    let t: f64 = 1e-2;
    let ratios: Vec<f64> = (2..=5u32)
        .map(|m| (a_norm(m, t).unwrap() - 1.0) / (-t * t / (2.0 * (f64::from(m) + 2.0))))
        .collect();
    Outcome {
        ok: ratios.iter().all(|r| (0.999..=1.001).contains(r)),
        detail: format!("ratios for m = 2..5: {ratios:.6?}"),
    }
}

fn c8_theorem1() -> Outcome {
    let opts = CheckOptions::default();
    let mut worst = 0.0f64;
    let mut all = true;
    for m in [2usize, 3] {
        for mu_r in [0.5, 1.0, 3.0] {
            let rep = theorem1_identity_check(mu_r, &vec![0.0; m], 1.0, m, &opts).unwrap();
            worst = worst.max(rep.residual.abs());
            all &= rep.residual.abs() <= 1e-8 && rep.diagnostics["b_monotone_on_grid"] == true;
        }
    }
    let mut increasing = true;
    for m in [2u32, 3] {
        let mut prev = b_norm(m, 0.0).unwrap();
        for k in 1..10_000 {
            let v = b_norm(m, 10.0 * k as f64 / 9_999.0).unwrap();
            increasing &= v > prev;
            prev = v;
        }
    }
    Outcome {
        ok: all && increasing,
        detail: format!("max residual {worst:.2e}, b strictly increasing on [0,10]: {increasing}"),
    }
}

fn c9_monotonicity() -> Outcome {
    let n = 10_000;
    let mut ok = true;
    for m in 2..=5u32 {
        let end_dec = bessel_zero(BesselOrder::half(m), 1).unwrap();
        let end_pos = bessel_zero(BesselOrder::half(m - 2), 1).unwrap();
        let mut prev = a_norm(m - 2, 0.0).unwrap();
        for k in 1..n {
            let v = a_norm(m - 2, end_dec * k as f64 / n as f64).unwrap();
            ok &= v < prev;
            prev = v;
        }
        for k in 1..n {
            ok &= a_norm(m - 2, end_pos * k as f64 / n as f64).unwrap() > 0.0;
        }
    }
    Outcome { ok, detail: "U = a_(m-2) decreasing and positive on both grids for m = 2..5".into() }
}

fn c10_determinism() -> Outcome {
    let sq = || cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
    let (a, _) = discrepancy_case(sq(), 4.0, 10);
    let (b, _) = discrepancy_case(sq(), 4.0, 10);
    let same = serde_json::to_string(&a.discrepancy).unwrap() == serde_json::to_string(&b.discrepancy).unwrap()
        && serde_json::to_string(&a.volume_balance).unwrap() == serde_json::to_string(&b.volume_balance).unwrap()
        && a.discrepancy.residual.to_bits() == b.discrepancy.residual.to_bits();
    Outcome { ok: same, detail: format!("two seeded discrepancy runs identical: {same}") }
}

fn main() -> std::process::ExitCode {
    let offset_ball = || translate(&ball(&[0.0, 0.0], 1.0).unwrap(), &[0.3, 0.0]).unwrap();
    let square = || cuboid(&[-0.5, -0.5], &[0.5, 0.5]).unwrap();
    assert!((unit_ball_volume(2) - PI).abs() < 1e-15);

    let results = [
        run(1, "Bessel zeros", secs(1), c1_bessel_zeros),
        run(2, "mean-value formula on balls", secs(5), c2_mean_value_formula),
        run(3, "membrane counterexample", secs(1), c3_membrane),
        run(4, "discrepancy sign, offset ball", secs(30), || c4_case("offset ball", offset_ball(), 2.0)),
        run(4, "discrepancy sign, square", secs(30), || c4_case("square", square(), 4.0)),
        run(4, "discrepancy sign, square", secs(30), || c4_case("square", square(), 1.0)),
        run(5, "Poisson integral vs radial kernel", secs(5), c5_poisson),
        run(6, "flux identity", secs(5), c6_flux),
        run(7, "harmonic limit of the kernel", secs(1), c7_kuran),
        run(8, "modified Helmholtz ball identity", secs(5), c8_theorem1),
        run(9, "monotonicity and positivity of U", secs(2), c9_monotonicity),
        run(10, "determinism", secs(60), c10_determinism),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} checks passed", results.len() - failed, results.len());
    if failed == 0 {
        std::process::ExitCode::SUCCESS
    } else {
        std::process::ExitCode::FAILURE
    }
}
