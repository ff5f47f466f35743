//! How each channel group scales with the coupling: rotating-wave rates are
//! nearly flat, permanent-dipole satellites grow like g^2, counter-rotating
//! leaps like g^6.

use polar_cavity::cli::logspace;
use polar_cavity::emission::{group_rate, transition_channels, ChannelGroup, FormFactor};
use polar_cavity::model::{Branch, ModelParams, StateLabel};
use polar_cavity::oracle::log_log_slope;
use polar_cavity::perturbation::energy_shift2;

fn main() -> polar_cavity::Result<()> {
    let initial = StateLabel::new(10, Branch::Plus);
    let ff = FormFactor::Constant;
    let grid = logspace(1e-3, 1e-2, 12);

    println!("equal couplings g_s = g_r, resonant cavity, flat response\n");
    println!(
        "{:>12} {:>14} {:>14} {:>14}",
        "g_r", "JC", "AS", "CR"
    );
    let mut jc = Vec::new();
    let mut asat = Vec::new();
    let mut cr = Vec::new();
    let mut e2 = Vec::new();
    for &g in &grid {
        let params = ModelParams::resonant(g, g);
        let channels = transition_channels(initial, &params, &ff, 1.0)?;
        let j = group_rate(&channels, ChannelGroup::Jc);
        let a = group_rate(&channels, ChannelGroup::As);
        let c = group_rate(&channels, ChannelGroup::Cr);
        println!("{g:>12.4e} {j:>14.6e} {a:>14.6e} {c:>14.6e}");
        jc.push(j);
        asat.push(a);
        cr.push(c);
        e2.push(energy_shift2(initial, &params)?.abs());
    }

    println!("\nlog-log slopes over the sweep:");
    println!("  AS group rate: {:+.3}", log_log_slope(&grid, &asat));
    println!("  CR group rate: {:+.3}", log_log_slope(&grid, &cr));
    println!("  |second-order energy shift|: {:+.3}", log_log_slope(&grid, &e2));
    println!("\nthe ordering JC > AS > CR holds everywhere in the weak-coupling");
    println!("window; only an engineered response can invert it.");
    Ok(())
}
