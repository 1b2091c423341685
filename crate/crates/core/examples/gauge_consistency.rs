// F = dA: the finite-difference curl of the gauge potential against the
// field strength, with its O(h^2) convergence.

use std::error::Error;

use skyrmion_string::charges::{
    field_strength, gauge_potential, pullback_field_strength, verify_curl,
};
use skyrmion_string::field::{Coupling, PlanePoint};
use skyrmion_string::profile::{exact_sigma_profile, RadialGrid};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = RadialGrid::log(1e-4, 40.0, 4001)?;
    let p = exact_sigma_profile(1.0, 1, &grid)?;
    let c = Coupling::sigma(1)?.with_mk(0.7)?;
    let x = PlanePoint::new(0.6, -0.8, 0.3);

    let a = gauge_potential(&p, &c, &x);
    let f = field_strength(&p, &c, &x)?;
    let pb = pullback_field_strength(&p, &c, &x)?;
    println!("A = {:?}", a.as_array());
    println!("F_xy = {:.10}, pullback {:.10}", f.xy(), pb.xy());

    let mut last = None;
    for h in [1e-2, 1e-3, 1e-4] {
        let res = verify_curl(&p, &c, &x, h)?;
        let order = last.map(|prev: f64| (prev / res).log10());
        println!("h = {h:.0e}: residual {res:.3e}, observed order {order:?}");
        last = Some(res);
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
