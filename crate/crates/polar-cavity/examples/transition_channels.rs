//! Enumerate every photon-loss channel out of the n = 10 doublet and group
//! them by mechanism: rotating-wave ladder steps, population satellites from
//! the permanent dipole, and counter-rotating leaps.

use polar_cavity::emission::{
    group_rate, total_rate, transition_channels, ChannelGroup, FormFactor,
};
use polar_cavity::model::{Branch, ModelParams, StateLabel};

fn main() -> polar_cavity::Result<()> {
    let params = ModelParams::resonant(0.01, 0.01);
    let ff = FormFactor::Constant;
    let base_rate = 1.0;

    let mut census = 0;
    for branch in [Branch::Plus, Branch::Minus] {
        let initial = StateLabel::new(10, branch);
        let channels = transition_channels(initial, &params, &ff, base_rate)?;
        census += channels.len();
        let tot = total_rate(&channels);
        println!("decay of {initial}: {} channels, total rate {tot:.6e}", channels.len());
        println!(
            "{:>6} {:>5} {:>14} {:>14} {:>12}",
            "to", "group", "frequency", "|<f|a|i>|^2", "branching"
        );
        for c in &channels {
            println!(
                "{:>6} {:>5} {:>14.6e} {:>14.6e} {:>12.6e}",
                c.to.to_string(),
                c.group,
                c.frequency,
                c.a_sq,
                c.rate / tot
            );
        }
        for g in [ChannelGroup::Jc, ChannelGroup::As, ChannelGroup::Cr] {
            println!("  {g} subtotal: {:.6e}", group_rate(&channels, g));
        }
        println!();
    }
    println!("census across both branches: {census} channels");
    println!("with g_s = 0 the population satellites disappear:");
    let no_dipole = ModelParams::resonant(0.01, 0.0);
    let mut census = 0;
    for branch in [Branch::Plus, Branch::Minus] {
        let channels =
            transition_channels(StateLabel::new(10, branch), &no_dipole, &ff, base_rate)?;
        census += channels.len();
    }
    println!("census at g_s = 0: {census} channels, all rotating or counter-rotating");
    Ok(())
}
