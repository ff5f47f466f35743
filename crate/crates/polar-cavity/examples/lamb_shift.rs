//! Second-order line shifts from the off-resonant part of the continuum:
//! principal-value kernels for each response shape and the resulting common
//! shift of the emission comb.

use polar_cavity::emission::{lamb_shift, shift_kernel, transition_channels, FormFactor};
use polar_cavity::model::{Branch, ModelParams, StateLabel};
use polar_cavity::Error;

fn main() -> polar_cavity::Result<()> {
    let params = ModelParams::resonant(0.01, 0.01);
    let initial = StateLabel::new(10, Branch::Plus);
    let base_rate = 1e-3;
    let omega0 = 1.0016;

    println!("principal-value kernel at a line frequency omega0 = {omega0}\n");
    let flat = FormFactor::Constant;
    println!(
        "flat response, cutoff 5:      {:+.6e}",
        shift_kernel(&flat, omega0, 1.0, Some(5.0))?
    );
    match shift_kernel(&flat, omega0, 1.0, None) {
        Err(Error::DivergentShift) => {
            println!("flat response, no cutoff:     divergent (as it must be)")
        }
        other => println!("unexpected: {other:?}"),
    }
    let quad = FormFactor::PowerLaw { exponent: 2.0 };
    println!(
        "omega^2 response, cutoff 5:   {:+.6e}",
        shift_kernel(&quad, omega0, 1.0, Some(5.0))?
    );
    let lor = FormFactor::Lorentzian {
        center: 1.0,
        fwhm: 0.1,
    };
    println!(
        "lorentzian response, no cutoff: {:+.6e} (integrable tail, closed form)",
        shift_kernel(&lor, omega0, 1.0, None)?
    );

    println!("\ncommon shift of the emission comb out of {initial}:");
    for (name, ff, cutoff) in [
        ("flat, cutoff 5", FormFactor::Constant, Some(5.0)),
        ("omega^2, cutoff 5", FormFactor::PowerLaw { exponent: 2.0 }, Some(5.0)),
        (
            "lorentzian fwhm 0.1",
            FormFactor::Lorentzian {
                center: 1.0,
                fwhm: 0.1,
            },
            None,
        ),
    ] {
        let channels = transition_channels(initial, &params, &ff, base_rate)?;
        let shift = lamb_shift(&channels, &ff, base_rate, cutoff, &params)?;
        println!("  {name:<22} delta = {shift:+.6e}");
    }
    println!("\nshifts scale with the total rate; at base_rate = {base_rate:.0e}");
    println!("they displace the comb by a fraction of a linewidth.");
    Ok(())
}
