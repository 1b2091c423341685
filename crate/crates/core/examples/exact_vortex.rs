// Closed-form sigma-model vortices: profile, energy density and mu = 4 pi n.

use std::error::Error;
use std::f64::consts::PI;

use skyrmion_string::energy::{energy_density, energy_per_length};
use skyrmion_string::field::Coupling;
use skyrmion_string::profile::{exact_sigma_profile, RadialGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = RadialGrid::log(1e-4, 40.0, 4001)?;
    for n in 1..=3 {
        let c = Coupling::sigma(n)?;
        for k in [0.25, 1.0, 4.0] {
            let p = exact_sigma_profile(k, n, &grid)?;
            let mu = energy_per_length(&p, &c)?;
            println!(
                "n={n} K={k:<4} f(1)={:.6} sigma(1)={:.6} mu/4pi={:.8} residual={:.1e}",
                p.sample(1.0).0,
                energy_density(&p, &c, 1.0),
                mu / (4.0 * PI),
                p.residual()?
            );
            // mu is 4 pi n for every member of the family
            if n <= 2 {
                assert!((mu - 4.0 * PI * n as f64).abs() <= 1e-4 * mu);
            }
        }
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
