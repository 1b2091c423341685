// Winding number T = -n: boundary form, radial quadrature and 2-D quadrature.

use std::error::Error;

use skyrmion_string::charges::{topo_charge_axisym, topo_charge_general, PolarQuadrature};
use skyrmion_string::field::{ansatz_sampler, AzimuthConvention, Coupling};
use skyrmion_string::profile::{exact_sigma_profile, RadialGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = RadialGrid::log(1e-4, 40.0, 4001)?;
    for n in 1..=3 {
        let p = exact_sigma_profile(1.0, n, &grid)?;
        let c = Coupling::sigma(n)?;
        let t = topo_charge_axisym(&p, n)?;
        let field = ansatz_sampler(&p, &c, AzimuthConvention::FromY, 0.0);
        let g = topo_charge_general(&field, &PolarQuadrature::square(256))?;
        println!(
            "n={n}: T = {:.12} (boundary {:.1}), 2-D quadrature {:.8}",
            t.t, t.t_boundary, g.t
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
