//! Acceptance gate: one integration test per pinned behavioral criterion.
//!
//! Every test prints exactly one `criterion NN PASS/FAIL` line before
//! asserting, so the suite output doubles as a scoreboard. Criteria that the
//! second-order pipeline cannot meet fail here honestly rather than being
//! weakened.

use polar_cavity::cli::{intramanifold_frequency, linspace, logspace};
use polar_cavity::emission::{
    emission_spectrum, group_rate, total_rate, transition_channels, ChannelGroup, FormFactor,
};
use polar_cavity::model::{jc_crossing_scan, Branch, ModelParams, StateLabel};
use polar_cavity::oracle::{diagonalize, exact_a_sq, log_log_slope, match_and_compare};
use polar_cavity::perturbation::{energy_shift2, state_norm};
use polar_cavity::quad::integrate;
use std::process::Command;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    let word = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} {word}: {detail}");
    assert!(ok, "criterion {criterion:02} {word}: {detail}");
}

fn plus(n: u32) -> StateLabel {
    StateLabel::new(n, Branch::Plus)
}

fn minus(n: u32) -> StateLabel {
    StateLabel::new(n, Branch::Minus)
}

#[test]
fn criterion_01_lowest_peak_sits_at_the_doublet_splitting() {
    let params = ModelParams::resonant(0.01, 0.01);
    let grid = linspace(0.0, 3.5, 7001);
    let spec = emission_spectrum(
        plus(10),
        &params,
        &FormFactor::Constant,
        1e-3,
        None,
        &grid,
    )
    .expect("spectrum builds");
    let mut peak = None;
    for i in 1..grid.len() - 1 {
        if spec.density[i] > spec.density[i - 1] && spec.density[i] > spec.density[i + 1] {
            peak = Some(spec.omega[i]);
            break;
        }
    }
    let peak = peak.expect("a lowest-frequency peak exists");
    let dev = (peak - 0.063).abs();
    verdict(
        1,
        dev <= 1e-3,
        &format!("lowest spectral peak at {peak:.6}, |peak - 0.063| = {dev:.2e}"),
    );
}

#[test]
fn criterion_02_channel_census_is_thirteen() {
    let params = ModelParams::resonant(0.01, 0.01);
    let ff = FormFactor::Constant;
    let mut count = [0usize; 3];
    let mut census = 0;
    for initial in [plus(10), minus(10)] {
        let channels = transition_channels(initial, &params, &ff, 1.0).expect("channels");
        census += channels.len();
        for c in &channels {
            count[match c.group {
                ChannelGroup::Jc => 0,
                ChannelGroup::As => 1,
                ChannelGroup::Cr => 2,
            }] += 1;
        }
    }
    let ok = census == 13 && count == [4, 5, 4];
    verdict(
        2,
        ok,
        &format!(
            "census {census} channels, JC/AS/CR = {}/{}/{}",
            count[0], count[1], count[2]
        ),
    );
}

#[test]
fn criterion_03_first_crossings_match_the_reference_couplings() {
    let res = jc_crossing_scan(&ModelParams::resonant(0.0, 0.0), 10, 1e-4, 0.3, 2000, 1e-4)
        .expect("resonant crossing");
    let det = jc_crossing_scan(&ModelParams::detuned(0.8, 0.0, 0.0), 7, 1e-4, 0.3, 2000, 1e-4)
        .expect("detuned crossing");
    let ok = (res.g - 0.16).abs() <= 0.01 && (det.g - 0.19).abs() <= 0.01;
    verdict(
        3,
        ok,
        &format!(
            "resonant n<=10 crossing at {:.4} (target 0.16 +- 0.01), detuned n<=7 at {:.4} \
             (target 0.19 +- 0.01)",
            res.g, det.g
        ),
    );
}

#[test]
fn criterion_04_oracle_energy_residual_scales_like_fourth_order() {
    let grid = [0.0025, 0.005, 0.01, 0.02];
    let mut errs = Vec::new();
    for &g in &grid {
        let params = ModelParams::resonant(g, g);
        let cmp = match_and_compare(&params, plus(10), 40).expect("oracle comparison");
        errs.push(cmp.energy_error);
    }
    let slope = log_log_slope(&grid, &errs);
    let ok = (3.5..=4.5).contains(&slope);
    verdict(
        4,
        ok,
        &format!(
            "|E_exact - E_2nd| log-log slope {slope:.3} (required within [3.5, 4.5]; the \
             permanent dipole contributes an odd third-order term, so the residual scales \
             like g^3, not g^4)"
        ),
    );
}

#[test]
fn criterion_05_matrix_elements_agree_with_the_oracle() {
    // Representative channels: ladder step, intramanifold satellite,
    // counter-rotating leap.
    let finals = [plus(9), minus(10), minus(7)];
    let grid = [0.02, 0.01, 0.005, 0.0025];
    let mut rels = vec![Vec::new(); finals.len()];
    for &g in &grid {
        let params = ModelParams::resonant(g, g);
        let spectrum = diagonalize(&params, 40).expect("oracle spectrum");
        for (k, &f) in finals.iter().enumerate() {
            let pert = polar_cavity::emission::a_sq(f, plus(10), &params).expect("a_sq");
            let exact = exact_a_sq(&spectrum, f, plus(10), &params).expect("exact a_sq");
            rels[k].push((pert - exact).abs() / exact);
        }
    }
    // Grid runs g descending, so the relative error must descend too.
    let monotone = rels
        .iter()
        .all(|r| r.windows(2).all(|w| w[1] < w[0]));
    let at_001: Vec<f64> = rels.iter().map(|r| r[1]).collect();
    let within = at_001.iter().all(|&r| r <= 0.10);
    verdict(
        5,
        within && monotone,
        &format!(
            "relative deviations at g = 0.01: ladder {:.2e}, satellite {:.2e}, \
             counter-rotating {:.2e} (10% required for all three; monotone shrink {}; the \
             counter-rotating amplitude is third-order, so a second-order state misses it \
             by a factor of several)",
            at_001[0], at_001[1], at_001[2], monotone
        ),
    );
}

#[test]
fn criterion_06_group_dominance_ordering_holds_for_flat_and_quadratic() {
    let grid = logspace(1e-3, 5e-2, 30);
    let mut ok = true;
    let mut detail = String::new();
    for (name, ff) in [
        ("flat", FormFactor::Constant),
        ("quadratic", FormFactor::PowerLaw { exponent: 2.0 }),
    ] {
        let mut holds = true;
        for &g in &grid {
            let params = ModelParams::resonant(g, g);
            let channels = transition_channels(plus(10), &params, &ff, 1.0).expect("channels");
            let jc = group_rate(&channels, ChannelGroup::Jc);
            let asat = group_rate(&channels, ChannelGroup::As);
            let cr = group_rate(&channels, ChannelGroup::Cr);
            if !(jc > asat && asat > cr) {
                holds = false;
            }
        }
        ok &= holds;
        detail.push_str(&format!("{name} response JC > AS > CR: {holds}; "));
    }
    verdict(6, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_07_engineered_continuum_promotes_the_satellite() {
    let mut ok = true;
    let mut detail = String::new();
    for (name, params) in [
        ("resonant", ModelParams::resonant(0.01, 0.01)),
        ("detuned", ModelParams::detuned(0.8, 0.01, 0.01)),
    ] {
        let center = intramanifold_frequency(10, &params).expect("splitting");
        let ff = FormFactor::Lorentzian {
            center,
            fwhm: 1e-4,
        };
        let channels = transition_channels(plus(10), &params, &ff, 1.0).expect("channels");
        let top = channels
            .iter()
            .max_by(|a, b| a.rate.total_cmp(&b.rate))
            .expect("channels nonempty");
        let hit = top.to == minus(10);
        ok &= hit;
        detail.push_str(&format!("{name}: top channel -> {} (rate {:.3e}); ", top.to, top.rate));
    }
    verdict(7, ok, detail.trim_end_matches("; "));
}

#[test]
fn criterion_08_bare_cavity_limit_is_exact() {
    // Detuning keeps the labels unambiguous at zero coupling.
    let params = ModelParams::detuned(0.8, 0.0, 0.0);
    let base_rate = 0.37;
    let channels =
        transition_channels(plus(10), &params, &FormFactor::Constant, base_rate).expect("channels");
    let total = total_rate(&channels);
    let expected = 10.0 * base_rate;
    let rel = (total - expected).abs() / expected;
    let ok = channels.len() == 1 && rel <= 1e-12;
    verdict(
        8,
        ok,
        &format!(
            "{} channel(s), total rate {total:.12e} vs n * rate = {expected:.12e}, rel {rel:.2e}",
            channels.len()
        ),
    );
}

#[test]
fn criterion_09_peak_areas_reproduce_branching_ratios() {
    let params = ModelParams::resonant(0.01, 0.01);
    let base_rate = 1e-12;
    let grid = [0.0, 3.5];
    let spec = emission_spectrum(
        plus(10),
        &params,
        &FormFactor::Constant,
        base_rate,
        None,
        &grid,
    )
    .expect("spectrum");
    let gtot = spec.gamma_total;
    // Integrate each line's window, splitting at the spike scale so the
    // quadrature resolves the narrow core separately from the tails.
    let split = 1e4 * gtot;
    let mut areas = Vec::new();
    for c in &spec.channels {
        let center = c.frequency;
        let mut area = 0.0;
        for (a, b) in [
            (center - 0.02, center - split),
            (center - split, center + split),
            (center + split, center + 0.02),
        ] {
            area += integrate(&|w| spec.density_at(w), a, b, 0.0, 1e-6).expect("window integral");
        }
        areas.push(area);
    }
    let total_area: f64 = areas.iter().sum();
    let mut worst = 0.0f64;
    for (c, &area) in spec.channels.iter().zip(&areas) {
        let p_true = c.rate / gtot;
        let p_meas = area / total_area;
        worst = worst.max((p_meas - p_true).abs() / p_true);
    }
    verdict(
        9,
        worst <= 0.02,
        &format!(
            "worst relative deviation of integrated weight vs branching ratio over {} \
             well-separated peaks: {worst:.2e} (2% allowed)",
            spec.channels.len()
        ),
    );
}

#[test]
fn criterion_10_norm_diagnostic_marks_the_validity_edge() {
    let norm = |g: f64| state_norm(plus(10), &ModelParams::resonant(g, g)).expect("norm");
    let weak_dev = (norm(0.01) - 1.0).abs();
    let edge_dev = (norm(0.11) - 1.0).abs();
    let deep = [0.12, 0.13, 0.14].map(norm);
    let diverges = deep[0] < deep[1] && deep[1] < deep[2] && deep[2] > 10.0;
    let ok = weak_dev < 1e-3 && edge_dev > 0.01 && diverges;
    verdict(
        10,
        ok,
        &format!(
            "norm deviation {weak_dev:.2e} at g = 0.01, {edge_dev:.2e} at 0.11, norms \
             {:.2} -> {:.2} -> {:.2} toward 0.14",
            deep[0], deep[1], deep[2]
        ),
    );
}

#[test]
fn criterion_11_quadratic_scaling_of_shift_and_satellites() {
    let grid = [2.5e-4, 5e-4, 1e-3, 2e-3];
    let mut e2 = Vec::new();
    let mut asat = Vec::new();
    for &g in &grid {
        let params = ModelParams::resonant(g, g);
        e2.push(energy_shift2(plus(10), &params).expect("shift").abs());
        let channels =
            transition_channels(plus(10), &params, &FormFactor::Constant, 1.0).expect("channels");
        let sum: f64 = channels
            .iter()
            .filter(|c| c.group == ChannelGroup::As)
            .map(|c| c.a_sq)
            .sum();
        asat.push(sum);
    }
    let s_e2 = log_log_slope(&grid, &e2);
    let s_as = log_log_slope(&grid, &asat);
    let ok = (1.9..=2.1).contains(&s_e2) && (1.9..=2.1).contains(&s_as);
    verdict(
        11,
        ok,
        &format!("log-log slopes: second-order shift {s_e2:.3}, AS-group a_sq {s_as:.3}"),
    );
}

#[test]
fn criterion_12_preset_reruns_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_polar-cavity");
    let mut ok = true;
    let mut detail = String::new();
    for (verb, name, format) in [
        ("crossings", "fig2a", "table"),
        ("sweep", "fig4a", "table"),
        ("crossings", "fig2a", "json"),
    ] {
        let run = || {
            let out = Command::new(bin)
                .args([verb, "--preset", name, "--format", format])
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "{verb} --preset {name} failed");
            out.stdout
        };
        let first = run();
        let second = run();
        let same = !first.is_empty() && first == second;
        ok &= same;
        detail.push_str(&format!("{name}/{format}: {} bytes, identical {same}; ", first.len()));
    }
    verdict(12, ok, detail.trim_end_matches("; "));
}
