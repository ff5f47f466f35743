//! From laboratory quantities to model couplings: dipole moments and a mode
//! volume in SI units mapped onto the dimensionless g parameters.

use polar_cavity::cli::{coupling_from_dipole, DipoleCavity};
use polar_cavity::model::ModelParams;

fn main() -> polar_cavity::Result<()> {
    // A molecule-sized emitter in a plasmonic-scale optical cavity. One
    // debye is 3.33564e-30 C m.
    let debye = 3.33564e-30;
    let input = DipoleCavity {
        omega_c: 2.4e15,
        mode_volume: 1e-21,
        d_transition: 8.0 * debye,
        d_excited: 12.0 * debye,
        d_ground: 0.0,
    };
    let c = coupling_from_dipole(&input)?;
    println!("cavity at {:.2e} rad/s, mode volume {:.1e} m^3", input.omega_c, input.mode_volume);
    println!("transition dipole {:.1} D, excited-state dipole {:.1} D\n", 8.0, 12.0);
    println!("g_r       = {:.6e}", c.g_r);
    println!("g_s       = {:.6e}", c.g_s);
    println!("g_s_prime = {:.6e}", c.g_s_prime);

    let params = ModelParams {
        g_r: c.g_r,
        g_s: c.g_s,
        g_s_prime: c.g_s_prime,
        ..ModelParams::default()
    };
    params.validate()?;
    println!("\nboth couplings sit far inside the perturbative window (g < 0.1),");
    println!("so the second-order pipeline applies directly.");

    // A polar ground state would need the extended model.
    let polar_ground = DipoleCavity {
        d_ground: 3.0 * debye,
        ..input
    };
    let c = coupling_from_dipole(&polar_ground)?;
    let params = ModelParams {
        g_r: c.g_r,
        g_s: c.g_s,
        g_s_prime: c.g_s_prime,
        ..ModelParams::default()
    };
    match params.validate() {
        Err(e) => println!("\nwith a polar ground state: {e}"),
        Ok(()) => unreachable!("nonzero ground dipole must be rejected"),
    }
    Ok(())
}
