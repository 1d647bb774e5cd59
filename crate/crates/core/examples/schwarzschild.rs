//! Mass vector of half AdS-Schwarzschild for a few mass parameters.

use hypmass::engine::{default_radii, mass_vector};
use hypmass::zoo::ads_schwarzschild_half;

fn main() -> hypmass::Result<()> {
    let radii = default_radii(10.0, 5);
    for mbar in [0.5, 1.0, 2.0] {
        let m = ads_schwarzschild_half(3, mbar)?;
        let mv = mass_vector(&m, 32, &radii)?;
        let fit = &mv.fits[0];
        println!(
            "mbar {:>4}: P = {:?}, class {}, error {:.1e}, exponent {:.2}",
            mbar,
            mv.vector.z.iter().map(|v| format!("{:.6}", v)).collect::<Vec<_>>(),
            mv.class,
            fit.error,
            fit.exponent
        );
    }
    Ok(())
}
