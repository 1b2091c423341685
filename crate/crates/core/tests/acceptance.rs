//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and must not be loosened.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skyrmion_string::charges::{
    hopf_charge, topo_charge_axisym, topo_charge_general, verify_curl, PolarQuadrature,
};
use skyrmion_string::energy::{derrick_derivative, energy_per_length};
use skyrmion_string::field::{ansatz_sampler, AzimuthConvention, Coupling, PlanePoint};
use skyrmion_string::profile::{
    exact_sigma_profile, shoot_with, Profile, RadialGrid, ShootOptions,
};
use skyrmion_string::Error;

const T_BOUNDARY_TOL: f64 = 1e-8;
const T_GENERAL_TOL: f64 = 1e-4;
const T_GENERAL_NODES: usize = 512;
const MU_REL_TOL: f64 = 1e-4;
const MU_K_TOL: f64 = 1e-6;
const HOPF_TOL: f64 = 1e-8;
const CURL_TOL: f64 = 1e-6;
const CURL_ORDER: (f64, f64) = (1.8, 2.2);
const ORACLE_F_TOL: f64 = 1e-6;
const ORACLE_SLOPE_TOL: f64 = 1e-5;
const DERRICK_ZERO_TOL: f64 = 1e-8;
const DERRICK_LINEAR_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-4;
const PERTURBATIONS: usize = 50;
const TWIST_RES_TOL: f64 = 1e-8;
const TWIST_BC_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid() -> RadialGrid {
    RadialGrid::log(1e-4, 40.0, 4001).expect("default grid")
}

fn exact(k: f64, n: u32) -> Profile {
    exact_sigma_profile(k, n, &grid()).expect("exact profile")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn topological_charge() -> Outcome {
    let (mut worst_b, mut worst_g) = (0.0f64, 0.0f64);
    for n in 1..=3 {
        let c = Coupling::sigma(n).map_err(|e| e.to_string())?;
        for k in [0.25, 1.0, 4.0] {
            let p = exact(k, n);
            let t = topo_charge_axisym(&p, n).map_err(|e| e.to_string())?;
            worst_b = worst_b
                .max((t.t_boundary + n as f64).abs())
                .max((t.t + n as f64).abs());
            let s = ansatz_sampler(&p, &c, AzimuthConvention::FromY, 0.0);
            let g = topo_charge_general(&s, &PolarQuadrature::square(T_GENERAL_NODES))
                .map_err(|e| e.to_string())?;
            worst_g = worst_g.max((g.t + n as f64).abs());
        }
    }
    check(
        worst_b <= T_BOUNDARY_TOL && worst_g <= T_GENERAL_TOL,
        format!("max|T+n| boundary/radial {worst_b:.2e} (tol {T_BOUNDARY_TOL:.0e}), 2-D {T_GENERAL_NODES}^2 {worst_g:.2e} (tol {T_GENERAL_TOL:.0e})"),
    )
}

fn energy() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=2 {
        for lambda in [1.0, 2.0] {
            let c = Coupling::new(n, 0.0, 0.0, lambda, 0.0).map_err(|e| e.to_string())?;
            let mu = energy_per_length(&exact(1.0, n), &c).map_err(|e| e.to_string())?;
            let expect = 4.0 * PI * n as f64 / (lambda * lambda);
            worst = worst.max((mu - expect).abs() / expect);
        }
    }
    let c = Coupling::sigma(1).map_err(|e| e.to_string())?;
    let a = energy_per_length(&exact(0.25, 1), &c).map_err(|e| e.to_string())?;
    let b = energy_per_length(&exact(4.0, 1), &c).map_err(|e| e.to_string())?;
    let dk = (a - b).abs();
    check(
        worst <= MU_REL_TOL && dk <= MU_K_TOL,
        format!("max rel|mu - 4 pi n/lambda^2| {worst:.2e} (tol {MU_REL_TOL:.0e}), |mu(K=0.25)-mu(K=4)| {dk:.2e} (tol {MU_K_TOL:.0e})"),
    )
}

fn hopf() -> Outcome {
    let (mut worst, mut split) = (0.0f64, 0.0f64);
    for (n, mk, dz) in [(1, 1.0, 1.0), (2, 3.0, PI), (1, 0.0, 5.0)] {
        let c = Coupling::sigma(n)
            .and_then(|c| c.with_mk(mk))
            .map_err(|e| e.to_string())?;
        let h = hopf_charge(&exact(1.0, n), &c, dz).map_err(|e| e.to_string())?;
        worst = worst.max((h.c + 2.0 * mk * n as f64 * dz / PI).abs());
        split = split.max((h.c - h.c_boundary).abs());
    }
    check(
        worst <= HOPF_TOL && split <= HOPF_TOL,
        format!("max|C - C_expected| {worst:.2e}, max|C_quad - C_boundary| {split:.2e} (tol {HOPF_TOL:.0e})"),
    )
}

fn gauge() -> Outcome {
    let (mut worst, mut orders) = (0.0f64, Vec::new());
    for (n, mk) in [(1, 0.0), (1, 0.7), (2, 1.3)] {
        let p = exact(1.0, n);
        let c = Coupling::sigma(n)
            .and_then(|c| c.with_mk(mk))
            .map_err(|e| e.to_string())?;
        for x in [
            PlanePoint::new(0.6, -0.8, 0.3),
            PlanePoint::new(-1.7, 0.4, -1.1),
            PlanePoint::new(0.25, 0.35, 2.0),
        ] {
            let res: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&h| verify_curl(&p, &c, &x, h))
                .collect::<Result<_, Error>>()
                .map_err(|e| e.to_string())?;
            worst = worst.max(res[2]);
            orders.push((res[0] / res[1]).log10());
            orders.push((res[1] / res[2]).log10());
        }
    }
    let lo = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    check(
        worst <= CURL_TOL && lo >= CURL_ORDER.0 && hi <= CURL_ORDER.1,
        format!("max residual at h=1e-4 {worst:.2e} (tol {CURL_TOL:.0e}), observed order in [{lo:.3}, {hi:.3}] (want {:?})", CURL_ORDER),
    )
}

fn oracle() -> Outcome {
    let (mut worst_f, mut worst_a) = (0.0f64, 0.0f64);
    let c = Coupling::sigma(1).map_err(|e| e.to_string())?;
    for k in [0.25, 1.0, 4.0] {
        let p = shoot_with(&c, &ShootOptions::new(grid()).with_family_constant(k, 1))
            .map_err(|e| e.to_string())?;
        let e = exact(k, 1);
        let df = p
            .f()
            .iter()
            .zip(e.f())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_f = worst_f.max(df);
        worst_a = worst_a.max((p.series_coeffs().a + 2.0 * k.sqrt()).abs());
    }
    check(
        worst_f <= ORACLE_F_TOL && worst_a <= ORACLE_SLOPE_TOL,
        format!("max-norm |f - f_exact| {worst_f:.2e} (tol {ORACLE_F_TOL:.0e}), max|f'(0) + 2 sqrt K| {worst_a:.2e} (tol {ORACLE_SLOPE_TOL:.0e})"),
    )
}

fn derrick() -> Outcome {
    let p = exact(1.0, 1);
    let slope = |kappa: f64| {
        Coupling::sigma(1)
            .and_then(|c| c.with_kappa(kappa))
            .and_then(|c| derrick_derivative(&p, &c))
            .map_err(|e| e.to_string())
    };
    let (s0, s1, s2) = (slope(0.0)?, slope(0.05)?, slope(0.1)?);
    let lin = (s2 - 2.0 * s1).abs() / s2;
    check(
        s0.abs() <= DERRICK_ZERO_TOL && s1 > 0.0 && s2 > 0.0 && lin <= DERRICK_LINEAR_TOL,
        format!("slope(0) {s0:.2e} (tol {DERRICK_ZERO_TOL:.0e}), slope(0.05) {s1:.6}, slope(0.1) {s2:.6}, |s(0.1)/2s(0.05) - 1| {lin:.2e} (tol {DERRICK_LINEAR_TOL:.0e})"),
    )
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let base = exact(1.0, 1);
    let mut worst = 0.0f64;
    let mut perturbed = Vec::with_capacity(PERTURBATIONS);
    for _ in 0..PERTURBATIONS {
        // Gaussian bump in ln r, negligible at both grid ends
        let (amp, c, w) = (
            rng.random_range(-0.8..0.8),
            rng.random_range(-2.3..2.3),
            rng.random_range(0.2..1.0),
        );
        let (mut f, mut fp) = (base.f().to_vec(), base.fprime().to_vec());
        for (i, &r) in base.r().iter().enumerate() {
            let u = (r.ln() - c) / w;
            let b = amp * (-u * u).exp();
            f[i] += b;
            fp[i] += b * (-2.0 * u / w) / r;
        }
        let p = Profile::from_samples(base.grid().clone(), f, fp, *base.coupling())
            .map_err(|e| e.to_string())?;
        worst = worst.max((topo_charge_axisym(&p, 1).map_err(|e| e.to_string())?.t + 1.0).abs());
        perturbed.push(p);
    }
    // constant phase shifts, evaluated on the full 2-D field
    let quad = PolarQuadrature::square(128);
    for p in perturbed.iter().take(5) {
        let chi = rng.random_range(-PI..PI);
        let c = Coupling::sigma(1)
            .and_then(|c| c.with_chi(chi))
            .map_err(|e| e.to_string())?;
        let s = ansatz_sampler(p, &c, AzimuthConvention::FromY, rng.random_range(-2.0..2.0));
        let g = topo_charge_general(&s, &quad).map_err(|e| e.to_string())?;
        worst = worst.max((g.t + 1.0).abs());
    }
    check(
        worst <= INVARIANCE_TOL,
        format!("{PERTURBATIONS} bump perturbations + 5 phase shifts: max|T+1| {worst:.2e} (tol {INVARIANCE_TOL:.0e})"),
    )
}

fn twisted() -> Outcome {
    let (n, mk) = (1, 0.5);
    let c = Coupling::new(n, mk, 0.0, 1.0, 0.1).map_err(|e| e.to_string())?;
    match shoot_with(&c, &ShootOptions::new(grid())) {
        Ok(p) => {
            let res = p.residual().map_err(|e| e.to_string())?;
            let fr = p.f().last().copied().unwrap_or(f64::NAN).abs();
            let h = hopf_charge(&p, &c, 1.0).map_err(|e| e.to_string())?;
            let dh = (h.per_length + 2.0 * n as f64 * mk / PI).abs();
            check(
                res <= TWIST_RES_TOL && fr <= TWIST_BC_TOL && dh <= HOPF_TOL,
                format!("converged: residual {res:.2e} (tol {TWIST_RES_TOL:.0e}), |f(rmax)| {fr:.2e} (tol {TWIST_BC_TOL:.0e}), |C/dz + 2 n mk/pi| {dh:.2e} (tol {HOPF_TOL:.0e})"),
            )
        }
        Err(e @ Error::Bracket { .. }) => Ok(format!("typed bracket failure: {e}")),
        Err(e) => Err(format!("untyped failure: {e}")),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 topological charge", topological_charge),
        ("2 energy per unit length", energy),
        ("3 Hopf charge", hopf),
        ("4 gauge consistency", gauge),
        ("5 solver oracle", oracle),
        ("6 Derrick diagnostic", derrick),
        ("7 charge invariance", invariance),
        ("8 twisted self-consistency", twisted),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} [{name}] {detail} ({:.2}s)",
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
