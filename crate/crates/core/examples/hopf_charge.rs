// Hopf charge of a twisted string segment, C = -(2 mk n / pi) dz.

use std::error::Error;
use std::f64::consts::PI;

use skyrmion_string::charges::hopf_charge;
use skyrmion_string::field::Coupling;
use skyrmion_string::profile::{exact_sigma_profile, RadialGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = RadialGrid::log(1e-4, 40.0, 4001)?;
    for (n, mk, dz) in [(1, 1.0, 1.0), (2, 3.0, PI), (1, 0.0, 5.0)] {
        let p = exact_sigma_profile(1.0, n, &grid)?;
        let c = Coupling::sigma(n)?.with_mk(mk)?;
        let h = hopf_charge(&p, &c, dz)?;
        let expect = -2.0 * mk * n as f64 * dz / PI;
        println!(
            "n={n} mk={mk} dz={dz:.4}: C = {:.12} boundary {:.12} expected {expect:.12}",
            h.c, h.c_boundary
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
