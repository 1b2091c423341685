// Derrick scaling of the exact vortex: flat at kappa = 0, rising with kappa.

use std::error::Error;

use skyrmion_string::energy::{derrick_derivative, derrick_scan};
use skyrmion_string::field::Coupling;
use skyrmion_string::profile::{exact_sigma_profile, RadialGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = exact_sigma_profile(1.0, 1, &RadialGrid::log(1e-4, 40.0, 4001)?)?;
    let qs = [0.5, 0.9, 1.0, 1.1, 2.0];
    for kappa in [0.0, 0.05, 0.1] {
        let c = Coupling::sigma(1)?.with_kappa(kappa)?;
        let scan = derrick_scan(&p, &c, &qs)?;
        let row: Vec<String> = scan.iter().map(|(q, mu)| format!("{q}:{mu:.6}")).collect();
        println!(
            "kappa={kappa:<4} slope={:.10} scan [{}]",
            derrick_derivative(&p, &c)?,
            row.join(" ")
        );
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
