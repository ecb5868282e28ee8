//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances and runtime budgets are fixed here.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gpdephase_core::envmodels::{markovianity_report, thermal_f_closed, thermal_f_quadrature};
use gpdephase_core::gp::{correction_thermal_perturbative, gp_evaluate};
use gpdephase_core::numerics::{gamma, integrate_interval};
use gpdephase_core::qubit::{eigensystem, reduced_density};
use gpdephase_core::sweep::{gp_vs_s, EnvParams, SweepOptions};
use gpdephase_core::{
    Axis, BlochInitial, EnvKind, Environment, GpRun, NonEqEnv, NonEqMode, QuadratureSpec,
    SpectralDensity, ThermalEnv,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn thermal(gamma0: f64, s: f64, cutoff: f64) -> ThermalEnv {
    ThermalEnv::zero_temperature(SpectralDensity::new(gamma0, s, cutoff).unwrap())
}

fn noneq(gamma0: f64, s: f64, mode: NonEqMode) -> NonEqEnv {
    NonEqEnv::new(
        SpectralDensity::new(gamma0, s, 10.0).unwrap(),
        0.3,
        2.0,
        mode,
    )
    .unwrap()
}

fn gp(env: Environment, theta: f64) -> gpdephase_core::GpResult {
    gp_evaluate(&GpRun::new(BlochInitial::new(theta).unwrap(), env)).unwrap()
}

fn criterion_1() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for s in [-0.5, 0.5, 0.999, 1.001, 2.0, 3.0, 4.0] {
        let e = thermal(0.1, s, 10.0);
        for t in [0.01, 0.1, 0.5, 1.0, 5.0, 20.0] {
            let c = thermal_f_closed(&e, t).unwrap();
            let q = thermal_f_quadrature(&e, t, &spec).unwrap();
            worst = worst.max(((c - q) / c).abs());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("closed vs quadrature: max relative deviation {worst:.2e} (tolerance 1e-6)"),
    )
}

fn criterion_2() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut mismatches = Vec::new();
    for k in 1..=80 {
        let s = 0.05 * k as f64;
        let env: Environment = thermal(0.1, s, 10.0).into();
        let r = markovianity_report(&env, (0.0, 50.0), 2000, &spec).unwrap();
        let negative = !r.is_markovian_on_window;
        if negative != (s > 2.0 + 1e-9) {
            mismatches.push(s);
        }
    }
    let env: Environment = thermal(0.1, 4.0, 10.0).into();
    let crossing = markovianity_report(&env, (0.0, 50.0), 2000, &spec)
        .unwrap()
        .negative_intervals
        .first_crossing
        .unwrap_or(f64::NAN);
    let crossing_ok = (crossing - 0.1).abs() <= 1e-6;
    outcome(
        mismatches.is_empty() && crossing_ok,
        format!(
            "negative D iff s > 2 on s = 0.05..4 ({} mismatches: {mismatches:?}); s = 4 first crossing {crossing:.9} (0.1 +- 1e-6)",
            mismatches.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut minima = Vec::new();
    let mut all_negative = true;
    for s in [1.0, 2.0, 3.0] {
        let env: Environment = noneq(0.1, s, NonEqMode::Rebased).into();
        let r = markovianity_report(&env, (0.0, 3.0), 3000, &spec).unwrap();
        all_negative &= !r.negative_intervals.intervals.is_empty();
        minima.push(r.min_diffusion);
    }
    let monotone = minima.windows(2).all(|w| w[1] < w[0]);
    outcome(
        all_negative && monotone,
        format!(
            "negative intervals for s = 1, 2, 3: {all_negative}; min D = {} (strictly decreasing: {monotone})",
            minima.iter().map(|m| format!("{m:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let r = gp(thermal(0.0, 3.0, 10.0).into(), theta);
        worst = worst.max((r.phi_g - PI * (1.0 - theta.cos())).abs());
    }
    outcome(
        worst < 1e-6,
        format!("gamma0 = 0: max |phi_g - pi(1 - cos theta)| = {worst:.2e} rad (tolerance 1e-6)"),
    )
}

fn criterion_5(gaps: &mut Vec<f64>) -> Outcome {
    let theta = PI / 3.0;
    let g = 1e-4;
    let r = gp(thermal(g, 3.0, 10.0).into(), theta);
    gaps.push(r.richardson_gap);
    let slope = r.delta_phi / g;
    let target = 4.0 * PI * theta.sin().powi(2) * theta.cos();
    let rel = (slope - target).abs() / target;
    outcome(rel <= 0.02, format!("s = 3 slope {slope:.4} vs 4 pi sin^2 cos = {target:.4}: relative deviation {rel:.3} (tolerance 0.02)"))
}

fn criterion_6(gaps: &mut Vec<f64>) -> Outcome {
    let theta = PI / 3.0;
    let g = 1e-4;
    let mut parts = Vec::new();
    let mut pass = true;
    for s in [1.0, 2.0, 3.0] {
        let target = gamma(s + 1.0).unwrap() * theta.sin().powi(2) * theta.cos();
        let rebased = gp(noneq(g, s, NonEqMode::Rebased).into(), theta);
        let raw = gp(noneq(g, s, NonEqMode::Raw).into(), theta);
        gaps.extend([rebased.richardson_gap, raw.richardson_gap]);
        let slope = rebased.delta_phi / g;
        let rel = (slope - target).abs() / target.abs();
        pass &= rel <= 0.05;
        parts.push(format!(
            "s = {s}: rebased {slope:.4}, raw {:.4}, target {target:.4} (relative {rel:.3})",
            raw.delta_phi / g
        ));
    }
    outcome(pass, format!("{} (tolerance 0.05)", parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let init = BlochInitial::new(PI / 3.0).unwrap();
    let (g, cutoff) = (0.01, 10.0);
    let value = |s: f64| {
        correction_thermal_perturbative(&SpectralDensity::new(g, s, cutoff).unwrap(), &init)
            .unwrap()
    };
    let mut worst: f64 = 0.0;
    for s0 in [1.0, 2.0, 3.0] {
        let (lo, hi) = (value(s0 - 1e-4), value(s0 + 1e-4));
        worst = worst.max((hi - lo).abs() / hi.abs().max(lo.abs()));
    }
    let theta = init.theta();
    let limit =
        4.0 * PI * g * theta.sin().powi(2) * theta.cos() * (-1.0 + (2.0 * PI * cutoff).ln());
    let at_one = value(1.0);
    let rel = (at_one - limit).abs() / limit.abs();
    outcome(
        worst <= 1e-4 && rel <= 1e-3,
        format!(
            "s0 +- 1e-4 max relative spread {worst:.2e} (tolerance 1e-4); s -> 1 value {at_one:.6e} vs stated limit {limit:.6e}, relative deviation {rel:.2e} (tolerance 1e-3)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let fixed = EnvParams {
        gamma0: 0.03,
        cutoff: 10.0,
        temperature: 0.0,
        ..EnvParams::default()
    };
    let opts = SweepOptions::default();
    let theta = PI / 3.0;
    let wide = Axis::linspace("s", -0.9, 4.0, 40).unwrap();
    let strong = gp_vs_s(EnvKind::Thermal, &fixed, &wide, &[0.03], theta, &opts).unwrap();
    let norm = strong.column("normalized_delta").unwrap();
    let max_strong = norm.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let failures = strong.metadata["failures"].as_array().map_or(0, Vec::len);

    let narrow = Axis::linspace("s", 0.5, 2.0, 31).unwrap();
    let weak = gp_vs_s(
        EnvKind::Thermal,
        &fixed,
        &narrow,
        &[0.001, 0.005],
        theta,
        &opts,
    )
    .unwrap();
    let norm_weak = weak.column("normalized_delta").unwrap();
    let (mut max_weak, mut at) = (0.0f64, (0.0, 0.0));
    for (i, v) in norm_weak.iter().enumerate() {
        if v.abs() > max_weak || v.is_nan() {
            max_weak = if v.is_nan() { f64::INFINITY } else { v.abs() };
            let c = weak.coordinates(i);
            at = (c[0], c[1]);
        }
    }
    outcome(
        max_strong > 0.20 && failures == 0 && max_weak < 0.10,
        format!(
            "gamma0 = 0.03: max_s |dphi/phi_u| = {max_strong:.4} (> 0.20), {failures} grid failures; gamma0 <= 0.005, s in [0.5, 2]: max {max_weak:.4} at gamma0 = {}, s = {} (< 0.10)",
            at.0, at.1
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_gpdephase"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read(dir.join(args[args.iter().position(|a| *a == "--out").unwrap() + 1])).unwrap()
}

fn criterion_9(gaps: &[f64]) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let (mut herm, mut trace, mut min_eig, mut residual): (f64, f64, f64, f64) =
        (0.0, 0.0, f64::INFINITY, 0.0);
    for k in 0..=12 {
        let theta = PI * k as f64 / 12.0;
        let init = BlochInitial::new(theta).unwrap();
        for f in [0.0, 1e-6, 0.01, 0.3, 1.0, 5.0] {
            for t in [0.0, 0.7, 2.0, 5.5] {
                let rho = reduced_density(&init, f, t).unwrap();
                herm = herm.max(rho.hermiticity_defect());
                trace = trace.max((rho.trace() - 1.0).norm());
                if let Ok((a, b)) = eigensystem(&rho) {
                    min_eig = min_eig.min(a.eigenvalue.min(b.eigenvalue));
                    for p in [a, b] {
                        let rv = rho.apply(&p.eigenvector);
                        let r = ((rv[0] - p.eigenvector[0] * p.eigenvalue).norm())
                            .max((rv[1] - p.eigenvector[1] * p.eigenvalue).norm());
                        residual = residual.max(r);
                    }
                }
            }
        }
    }
    let density_ok = herm <= 1e-12 && trace <= 1e-12 && min_eig >= -1e-12 && residual <= 1e-12;
    pass &= density_ok;
    notes.push(format!(
        "density: hermiticity {herm:.1e}, trace {trace:.1e}, min eigenvalue {min_eig:.1e}, residual {residual:.1e}"
    ));

    let spec = QuadratureSpec::default();
    let mut closure: f64 = 0.0;
    let envs: Vec<Environment> = [0.5, 1.0, 2.5, 4.0]
        .iter()
        .map(|&s| Environment::from(thermal(0.1, s, 10.0)))
        .chain(
            [1.0, 2.0, 3.0]
                .iter()
                .map(|&s| Environment::from(noneq(0.1, s, NonEqMode::Rebased))),
        )
        .collect();
    for env in &envs {
        for t in [0.3, 1.5, 3.0] {
            let integral = integrate_interval(|u| env.diffusion(u, &spec).unwrap(), 0.0, t, &spec)
                .unwrap()
                .value;
            let f = env.decoherence(t, &spec).unwrap();
            closure = closure.max((2.0 * integral - f).abs() / f.abs().max(1e-300));
        }
    }
    pass &= closure <= 1e-6;
    notes.push(format!("2 int D = F: max relative {closure:.1e}"));

    let worst_gap = gaps.iter().fold(0.0f64, |m, g| m.max(*g));
    pass &= worst_gap < 1e-6 && !gaps.is_empty();
    notes.push(format!("grid gap {worst_gap:.1e} over {} runs", gaps.len()));

    let dir = tempfile::tempdir().unwrap();
    let map = [
        "diffusion-map",
        "--env",
        "noneq",
        "--s-count",
        "12",
        "--t-count",
        "12",
        "--out",
        "map.csv",
    ];
    let sweep = [
        "gp-sweep",
        "--s-min",
        "0.5",
        "--s-max",
        "3",
        "--s-count",
        "4",
        "--format",
        "json",
        "--out",
        "gp.json",
    ];
    let identical = run_cli(dir.path(), &map) == run_cli(dir.path(), &map)
        && run_cli(dir.path(), &sweep) == run_cli(dir.path(), &sweep);
    pass &= identical;
    notes.push(format!("CLI reruns identical: {identical}"));

    outcome(pass, notes.join("; "))
}

type Check = Box<dyn FnOnce(&mut Vec<f64>) -> Outcome>;

fn main() {
    let mut gaps = Vec::new();
    let criteria: Vec<(&str, Duration, Check)> = vec![
        (
            "oracle equivalence",
            Duration::from_secs(10),
            Box::new(|_| criterion_1()),
        ),
        (
            "non-Markovian crossover",
            Duration::from_secs(30),
            Box::new(|_| criterion_2()),
        ),
        (
            "non-equilibrium memory",
            Duration::from_secs(10),
            Box::new(|_| criterion_3()),
        ),
        (
            "closed-system recovery",
            Duration::from_secs(5),
            Box::new(|_| criterion_4()),
        ),
        (
            "thermal perturbative slope",
            Duration::from_secs(30),
            Box::new(criterion_5),
        ),
        (
            "non-equilibrium perturbative slope",
            Duration::from_secs(60),
            Box::new(criterion_6),
        ),
        (
            "thermal correction pole continuity",
            Duration::from_secs(5),
            Box::new(|_| criterion_7()),
        ),
        (
            "fig5 anchors",
            Duration::from_secs(300),
            Box::new(|_| criterion_8()),
        ),
        (
            "invariant suites",
            Duration::from_secs(120),
            Box::new(|g: &mut Vec<f64>| criterion_9(g)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = check(&mut gaps);
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2} s, budget {} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
