//! Shape the output spectrum with the external response: a flat continuum,
//! a quadratic one, and a narrow Lorentzian parked on the intramanifold
//! line that turns the weak permanent-dipole satellite into the dominant
//! emission channel.

use polar_cavity::cli::intramanifold_frequency;
use polar_cavity::emission::{transition_channels, FormFactor};
use polar_cavity::model::{Branch, ModelParams, StateLabel};

fn main() -> polar_cavity::Result<()> {
    let initial = StateLabel::new(10, Branch::Plus);
    for (name, params) in [
        ("resonant", ModelParams::resonant(0.01, 0.01)),
        ("detuned omega_a = 0.8", ModelParams::detuned(0.8, 0.01, 0.01)),
    ] {
        let intra = intramanifold_frequency(initial.n, &params)?;
        println!("{name}: intramanifold line at omega = {intra:.6}");
        let responses = [
            ("flat", FormFactor::Constant),
            ("omega^2", FormFactor::PowerLaw { exponent: 2.0 }),
            (
                "lorentzian on the satellite",
                FormFactor::Lorentzian {
                    center: intra,
                    fwhm: 1e-4,
                },
            ),
        ];
        for (label, ff) in responses {
            let channels = transition_channels(initial, &params, &ff, 1.0)?;
            let mut ranked: Vec<_> = channels.iter().collect();
            ranked.sort_by(|a, b| b.rate.total_cmp(&a.rate));
            println!("  {label}:");
            for c in ranked.iter().take(3) {
                println!(
                    "    -> {:>4} {:>3} rate {:.6e}",
                    c.to.to_string(),
                    c.group,
                    c.rate
                );
            }
        }
        println!();
    }
    println!("a response much narrower than the doublet splitting suppresses");
    println!("every line except the one it is centered on.");
    Ok(())
}
