// Shooting the profile equation: the untwisted oracle and a twisted string.

use std::error::Error;

use skyrmion_string::field::Coupling;
use skyrmion_string::profile::{
    asymptotic_check, exact_sigma_profile, shoot_with, RadialGrid, ShootOptions,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = RadialGrid::log(1e-4, 40.0, 4001)?;

    // kappa = mk = 0: the scale anchor picks the member K = 4 of the exact family
    let c = Coupling::sigma(1)?;
    let p = shoot_with(
        &c,
        &ShootOptions::new(grid.clone()).with_family_constant(4.0, 1),
    )?;
    let exact = exact_sigma_profile(4.0, 1, &grid)?;
    let err = p
        .f()
        .iter()
        .zip(exact.f())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "untwisted: a = {:.10} (expect -4), max |f - f_exact| = {err:.2e}",
        p.series_coeffs().a
    );
    assert!(err <= 1e-6);

    // twisted string, kappa = 0.1, mk = 0.5
    let c = Coupling::new(1, 0.5, 0.0, 1.0, 0.1)?;
    match shoot_with(&c, &ShootOptions::new(grid)) {
        Ok(p) => {
            let info = p.solve_info().expect("shot profiles carry solve info");
            println!(
                "twisted: a = {:.10}, residual = {:.1e}, f(rmax) = {:.1e}, spliced at r = {:?}",
                info.a, info.residual, info.f_rmax, info.splice_radius
            );
            println!("tail fit: {:?}", asymptotic_check(&p, &c));
        }
        Err(e) => println!("twisted: no solution in the bracket ({e})"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
