//! Decay channels, golden-rule rates, Lamb shifts, and emission spectra.
//!
//! Photon loss is treated as weak coupling of the cavity mode to an external
//! continuum with spectral response `P(omega)`, normalized to 1 at the bare
//! cavity frequency. A dressed state `i` decays to `f` at the golden-rule
//! rate `base_rate * |<f|a|i>|^2 * P(omega_if)`; the same continuum produces
//! a principal-value Lamb shift that displaces every emission line.

use crate::model::{jc_eigenpair, labels_of_manifold, ModelParams, StateLabel};
use crate::perturbation::{energy_through_second_order, perturbed_state, PerturbedState};
use crate::quad;
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Spectral response of the external continuum, normalized so the value at
/// the bare cavity frequency is 1. Evaluates to 0 at non-positive
/// frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormFactor {
    /// Flat response.
    Constant,
    /// `(omega / omega_c)^exponent` with `exponent >= 0`.
    PowerLaw { exponent: f64 },
    /// Lorentzian of full width `fwhm` centered at `center`, scaled to 1 at
    /// the cavity frequency.
    Lorentzian { center: f64, fwhm: f64 },
}

impl FormFactor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FormFactor::Constant => Ok(()),
            FormFactor::PowerLaw { exponent } => {
                if !(exponent.is_finite() && exponent >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "power-law exponent must be finite and non-negative, got {exponent}"
                    )));
                }
                Ok(())
            }
            FormFactor::Lorentzian { center, fwhm } => {
                if !(center.is_finite() && center > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "lorentzian center must be finite and positive, got {center}"
                    )));
                }
                if !(fwhm.is_finite() && fwhm > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "lorentzian fwhm must be finite and positive, got {fwhm}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `P(omega)`, with `P(omega_c) = 1` for every variant.
    ///
    /// The Lorentzian is evaluated as a ratio of quadratic forms rather than
    /// a quotient of two tiny peak values, which stays stable for widths
    /// many orders of magnitude below the line frequencies.
    pub fn evaluate(&self, omega: f64, omega_c: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match *self {
            FormFactor::Constant => 1.0,
            FormFactor::PowerLaw { exponent } => (omega / omega_c).powf(exponent),
            FormFactor::Lorentzian { center, fwhm } => {
                let b = 0.5 * fwhm;
                let dc = omega_c - center;
                let dw = omega - center;
                (dc * dc + b * b) / (dw * dw + b * b)
            }
        }
    }

    /// Short name used in output metadata.
    pub fn kind_name(&self) -> &'static str {
        match self {
            FormFactor::Constant => "constant",
            FormFactor::PowerLaw { .. } => "power_law",
            FormFactor::Lorentzian { .. } => "lorentzian",
        }
    }
}

/// Which part of the interaction opens a decay channel, classified by the
/// manifold offset of the final state: one below (`Jc`), zero or two below
/// (`As`, the population-coupling satellites), three below (`Cr`, opened by
/// the counter-rotating admixtures).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChannelGroup {
    Jc,
    As,
    Cr,
}

impl std::fmt::Display for ChannelGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelGroup::Jc => write!(f, "JC"),
            ChannelGroup::As => write!(f, "AS"),
            ChannelGroup::Cr => write!(f, "CR"),
        }
    }
}

fn classify(initial_n: u32, final_n: u32) -> ChannelGroup {
    if final_n + 1 == initial_n {
        ChannelGroup::Jc
    } else if final_n == initial_n || final_n + 2 == initial_n {
        ChannelGroup::As
    } else {
        ChannelGroup::Cr
    }
}

/// One radiative decay channel between dressed states.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransitionChannel {
    /// Decaying state.
    #[serde(rename = "initial")]
    pub from: StateLabel,
    /// State left behind after the photon escapes.
    #[serde(rename = "final")]
    pub to: StateLabel,
    pub group: ChannelGroup,
    /// Emission frequency including both second-order energy shifts.
    pub frequency: f64,
    /// Squared photon matrix element `|<to|a|from>|^2` through second order.
    pub a_sq: f64,
    /// Spectral response at the emission frequency.
    pub form_factor: f64,
    /// Golden-rule rate `base_rate * a_sq * form_factor`.
    pub rate: f64,
}

/// Zeroth-order ladder matrix element `<(k-1, ap)|a|(k, a)>`, `k >= 1`.
fn bare_step(k: StateLabel, ap: StateLabel, params: &ModelParams) -> f64 {
    let (a_i, b_i) = jc_eigenpair(k, params);
    let (a_f, b_f) = jc_eigenpair(ap, params);
    let n = k.n as f64;
    n.sqrt() * a_i * a_f + (n - 1.0).sqrt() * b_i * b_f
}

/// Contract `a` between one fixed-order slice of the final state and one of
/// the initial state.
fn contract_a(
    fmap: &BTreeMap<StateLabel, f64>,
    imap: &BTreeMap<StateLabel, f64>,
    params: &ModelParams,
) -> f64 {
    let mut tot = 0.0;
    for (&ki, &vi) in imap {
        if ki.n == 0 {
            continue;
        }
        for kf in labels_of_manifold(ki.n - 1, params) {
            let vf = fmap.get(&kf).copied().unwrap_or(0.0);
            if vf == 0.0 {
                continue;
            }
            tot += vf * bare_step(ki, kf, params) * vi;
        }
    }
    tot
}

/// Squared photon matrix element `|<f|a|i>|^2` between two second-order
/// perturbed states, keeping only pairings whose total perturbative order is
/// at most two. The discarded third- and fourth-order pairings would be
/// incomplete at this order of the state expansion and are dropped rather
/// than summed half-formed.
pub fn a_sq(f: StateLabel, i: StateLabel, params: &ModelParams) -> Result<f64> {
    let fi = perturbed_state(f, params)?;
    let ii = perturbed_state(i, params)?;
    Ok(a_sq_of_states(&fi, &ii, params))
}

/// Same as [`a_sq`], reusing already-expanded states.
pub fn a_sq_of_states(f: &PerturbedState, i: &PerturbedState, params: &ModelParams) -> f64 {
    let mut amp = 0.0;
    for jf in 0..3 {
        for ji in 0..(3 - jf) {
            amp += contract_a(f.order(jf), i.order(ji), params);
        }
    }
    amp * amp
}

/// All radiative channels out of `initial`: positive emission frequency and
/// nonvanishing photon matrix element, final manifolds down to three below.
///
/// Channels are listed by ascending final manifold, lower branch first.
pub fn transition_channels(
    initial: StateLabel,
    params: &ModelParams,
    form_factor: &FormFactor,
    base_rate: f64,
) -> Result<Vec<TransitionChannel>> {
    params.validate()?;
    form_factor.validate()?;
    if !(base_rate.is_finite() && base_rate >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "base_rate must be finite and non-negative, got {base_rate}"
        )));
    }
    let ei = energy_through_second_order(initial, params)?;
    let istate = perturbed_state(initial, params)?;
    let mut out = Vec::new();
    for nf in initial.n.saturating_sub(3)..=initial.n {
        for to in labels_of_manifold(nf, params) {
            if to == initial {
                continue;
            }
            let ef = energy_through_second_order(to, params)?;
            let w = ei - ef;
            if w <= 0.0 {
                continue;
            }
            let fstate = perturbed_state(to, params)?;
            let asq = a_sq_of_states(&fstate, &istate, params);
            if asq <= 0.0 {
                continue;
            }
            let p = form_factor.evaluate(w, params.omega_c);
            out.push(TransitionChannel {
                from: initial,
                to,
                group: classify(initial.n, nf),
                frequency: w,
                a_sq: asq,
                form_factor: p,
                rate: base_rate * asq * p,
            });
        }
    }
    Ok(out)
}

/// Sum of channel rates.
pub fn total_rate(channels: &[TransitionChannel]) -> f64 {
    channels.iter().map(|c| c.rate).sum()
}

/// Sum of rates within one channel group.
pub fn group_rate(channels: &[TransitionChannel], group: ChannelGroup) -> f64 {
    channels
        .iter()
        .filter(|c| c.group == group)
        .map(|c| c.rate)
        .sum()
}

/// Ratio of two channel rates, e.g. a branching contrast.
pub fn weight_ratio(num: &TransitionChannel, den: &TransitionChannel) -> Result<f64> {
    if den.rate == 0.0 {
        return Err(Error::DivisionByZeroChannel(den.to));
    }
    Ok(num.rate / den.rate)
}

/// Pairs of channels closer in frequency than the total linewidth; such
/// lines overlap and their individual weights are not separately resolvable.
pub fn degenerate_channel_pairs(channels: &[TransitionChannel]) -> Vec<(usize, usize)> {
    let gamma_tot = total_rate(channels);
    let mut out = Vec::new();
    for i in 0..channels.len() {
        for j in (i + 1)..channels.len() {
            if (channels[i].frequency - channels[j].frequency).abs() < gamma_tot {
                out.push((i, j));
            }
        }
    }
    out
}

/// Principal-value kernel `PV int P(omega) / (omega - omega0) domega` over
/// `[0, cutoff]`, or `[0, inf)` where the response itself decays fast enough
/// (Lorentzian only). Constant and power-law responses diverge without a
/// cutoff.
pub fn shift_kernel(
    form_factor: &FormFactor,
    omega0: f64,
    omega_c: f64,
    cutoff: Option<f64>,
) -> Result<f64> {
    form_factor.validate()?;
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "shift kernel needs a positive pole frequency, got {omega0}"
        )));
    }
    if let Some(l) = cutoff {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "frequency cutoff must be finite and positive, got {l}"
            )));
        }
        if l == omega0 {
            return Err(Error::DivergentShift);
        }
    }
    match *form_factor {
        FormFactor::Constant => {
            let l = cutoff.ok_or(Error::DivergentShift)?;
            Ok(((l - omega0) / omega0).abs().ln())
        }
        FormFactor::PowerLaw { exponent } => {
            let l = cutoff.ok_or(Error::DivergentShift)?;
            let p = |w: f64| (w / omega_c).powf(exponent);
            if omega0 < l {
                quad::principal_value(&p, 0.0, l, omega0, 1e-13, 1e-11)
            } else {
                quad::integrate(&|w: f64| p(w) / (w - omega0), 0.0, l, 1e-13, 1e-11)
            }
        }
        FormFactor::Lorentzian { center, fwhm } => {
            let b = 0.5 * fwhm;
            let dc = omega_c - center;
            let scale = dc * dc + b * b; // response numerator, P = scale / ((w-center)^2 + b^2)
            let d = omega0 - center;
            let pref = scale / (d * d + b * b);
            // Antiderivative of P/(w - omega0) after partial fractions; the
            // log pair cancels at infinity and the PV across the pole is the
            // plain log difference.
            let anti = |w: f64| {
                let u = w - center;
                (w - omega0).abs().ln() - 0.5 * (u * u + b * b).ln() - (d / b) * (u / b).atan()
            };
            let upper = match cutoff {
                Some(l) => anti(l),
                None => -(d / b) * (PI / 2.0),
            };
            Ok(pref * (upper - anti(0.0)))
        }
    }
}

/// Second-order Lamb shift of the emission lines: the principal-value
/// counterpart of the total decay rate,
/// `base_rate / (2 pi) * sum_ch a_sq_ch * kernel(omega_ch)`.
pub fn lamb_shift(
    channels: &[TransitionChannel],
    form_factor: &FormFactor,
    base_rate: f64,
    cutoff: Option<f64>,
    params: &ModelParams,
) -> Result<f64> {
    let mut tot = 0.0;
    for ch in channels {
        tot += ch.a_sq * shift_kernel(form_factor, ch.frequency, params.omega_c, cutoff)?;
    }
    Ok(base_rate / (2.0 * PI) * tot)
}

/// Emission spectrum of one initial dressed state: a sum of Lorentzian lines
/// of common width `gamma_total`, one per channel, each carrying integrated
/// weight `rate / gamma_total` and displaced by the common Lamb shift.
#[derive(Clone, Debug)]
pub struct EmissionSpectrum {
    pub initial: StateLabel,
    pub channels: Vec<TransitionChannel>,
    pub gamma_total: f64,
    /// Common displacement of all lines; zero (with a warning) when the
    /// shift integral diverges for the configured response.
    pub lamb_shift: f64,
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub warnings: Vec<String>,
}

impl EmissionSpectrum {
    /// Spectral density at one frequency, evaluated from the line data
    /// rather than the sampled grid.
    pub fn density_at(&self, omega: f64) -> f64 {
        (0..self.channels.len())
            .map(|j| self.channel_density_at(j, omega))
            .sum()
    }

    /// Contribution of a single channel to the density.
    pub fn channel_density_at(&self, j: usize, omega: f64) -> f64 {
        let ch = &self.channels[j];
        let d = omega - ch.frequency - self.lamb_shift;
        let hw = 0.5 * self.gamma_total;
        (ch.rate / (2.0 * PI)) / (d * d + hw * hw)
    }
}

/// Compute the emission spectrum on a strictly increasing frequency grid.
pub fn emission_spectrum(
    initial: StateLabel,
    params: &ModelParams,
    form_factor: &FormFactor,
    base_rate: f64,
    cutoff: Option<f64>,
    grid: &[f64],
) -> Result<EmissionSpectrum> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "spectrum grid must be strictly increasing with at least 2 points".into(),
        ));
    }
    let channels = transition_channels(initial, params, form_factor, base_rate)?;
    let gamma_total = total_rate(&channels);
    let mut warnings = Vec::new();
    if channels.is_empty() {
        warnings.push("no radiative channels out of this state".into());
    }
    let shift = match lamb_shift(&channels, form_factor, base_rate, cutoff, params) {
        Ok(d) => d,
        Err(Error::DivergentShift) => {
            warnings.push(
                "lamb shift diverges without a frequency cutoff; lines are drawn unshifted".into(),
            );
            0.0
        }
        Err(e) => return Err(e),
    };
    for (i, j) in degenerate_channel_pairs(&channels) {
        warnings.push(format!(
            "channels {} -> {} and {} -> {} overlap within the total linewidth",
            channels[i].from, channels[i].to, channels[j].from, channels[j].to
        ));
    }
    let mut spec = EmissionSpectrum {
        initial,
        channels,
        gamma_total,
        lamb_shift: shift,
        omega: grid.to_vec(),
        density: Vec::with_capacity(grid.len()),
        warnings,
    };
    for &w in grid {
        let v = spec.density_at(w);
        spec.density.push(v);
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Branch;
    use approx::assert_relative_eq;

    fn lab(n: u32, plus: bool) -> StateLabel {
        StateLabel::new(n, if plus { Branch::Plus } else { Branch::Minus })
    }

    fn res(g: f64) -> ModelParams {
        ModelParams::resonant(g, g)
    }

    #[test]
    fn photon_weights_match_pinned_values() {
        let p = res(0.01);
        let i = lab(10, true);
        assert_relative_eq!(
            a_sq(lab(9, true), i, &p).unwrap(),
            9.489210712732401,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            a_sq(lab(9, false), i, &p).unwrap(),
            0.006304050848316719,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            a_sq(lab(10, false), i, &p).unwrap(),
            0.00011457280621746501,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            a_sq(lab(7, false), i, &p).unwrap(),
            2.2952070089467437e-11,
            max_relative = 1e-10
        );
    }

    #[test]
    fn channel_census_both_branches() {
        let p = res(0.01);
        let mut all = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1.0).unwrap();
        all.extend(transition_channels(lab(10, false), &p, &FormFactor::Constant, 1.0).unwrap());
        assert_eq!(all.len(), 13);
        let count = |g| all.iter().filter(|c| c.group == g).count();
        assert_eq!(count(ChannelGroup::Jc), 4);
        assert_eq!(count(ChannelGroup::As), 5);
        assert_eq!(count(ChannelGroup::Cr), 4);
        // All emission frequencies positive, rates non-negative.
        for c in &all {
            assert!(c.frequency > 0.0);
            assert!(c.rate >= 0.0);
        }
    }

    #[test]
    fn population_satellites_vanish_without_population_coupling() {
        let p = ModelParams::resonant(0.01, 0.0);
        let mut all = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1.0).unwrap();
        all.extend(transition_channels(lab(10, false), &p, &FormFactor::Constant, 1.0).unwrap());
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|c| c.group != ChannelGroup::As));
    }

    #[test]
    fn intramanifold_line_includes_second_order_shifts() {
        let p = res(0.01);
        let ch = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1.0).unwrap();
        let intra = ch.iter().find(|c| c.to == lab(10, false)).unwrap();
        assert_relative_eq!(intra.frequency, 0.06298842362240364, max_relative = 1e-10);
        assert_eq!(intra.group, ChannelGroup::As);
    }

    #[test]
    fn group_ordering_flat_response() {
        let p = res(0.01);
        let ch = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1e-3).unwrap();
        let jc = group_rate(&ch, ChannelGroup::Jc);
        let as_ = group_rate(&ch, ChannelGroup::As);
        let cr = group_rate(&ch, ChannelGroup::Cr);
        assert!(jc > as_ && as_ > cr, "jc={jc} as={as_} cr={cr}");
        assert_relative_eq!(jc + as_ + cr, total_rate(&ch), max_relative = 1e-14);
    }

    #[test]
    fn form_factor_values() {
        let ff = FormFactor::PowerLaw { exponent: 2.0 };
        assert_eq!(ff.evaluate(1.0, 1.0), 1.0);
        assert_relative_eq!(ff.evaluate(0.5, 1.0), 0.25, max_relative = 1e-14);
        assert_eq!(ff.evaluate(-1.0, 1.0), 0.0);
        assert_eq!(ff.evaluate(0.0, 1.0), 0.0);
        let lz = FormFactor::Lorentzian {
            center: 0.063,
            fwhm: 1e-4,
        };
        // Normalized at the cavity frequency, hugely peaked at the center.
        assert_eq!(lz.evaluate(1.0, 1.0), 1.0);
        assert!(lz.evaluate(0.063, 1.0) > 1e7);
        // Tiny-width evaluation stays finite and monotone off-peak.
        let narrow = FormFactor::Lorentzian {
            center: 1.0,
            fwhm: 1e-12,
        };
        assert!(narrow.evaluate(2.0, 1.0) < narrow.evaluate(1.5, 1.0));
        assert!(FormFactor::PowerLaw { exponent: -1.0 }.validate().is_err());
        assert!(FormFactor::Lorentzian { center: 1.0, fwhm: 0.0 }.validate().is_err());
    }

    #[test]
    fn shift_kernel_constant_closed_form() {
        // PV int_0^3 dw/(w - 0.5) = ln|(3 - 0.5)/0.5| = ln 5.
        let k = shift_kernel(&FormFactor::Constant, 0.5, 1.0, Some(3.0)).unwrap();
        assert_relative_eq!(k, 5.0f64.ln(), max_relative = 1e-14);
        match shift_kernel(&FormFactor::Constant, 0.5, 1.0, None) {
            Err(Error::DivergentShift) => {}
            other => panic!("expected DivergentShift, got {other:?}"),
        }
    }

    #[test]
    fn shift_kernel_power_law_matches_quadrature_identity() {
        // p = 0 reduces to the constant kernel.
        let k0 = shift_kernel(&FormFactor::PowerLaw { exponent: 0.0 }, 0.5, 1.0, Some(3.0)).unwrap();
        assert_relative_eq!(k0, 5.0f64.ln(), max_relative = 1e-9);
        // p = 1: PV int_0^L w/(w - w0) dw = L + w0 ln|(L - w0)/w0|.
        let k1 = shift_kernel(&FormFactor::PowerLaw { exponent: 1.0 }, 0.5, 1.0, Some(3.0)).unwrap();
        assert_relative_eq!(k1, 3.0 + 0.5 * 5.0f64.ln(), max_relative = 1e-9);
        // Pole above the cutoff: a regular integral.
        let k2 = shift_kernel(&FormFactor::PowerLaw { exponent: 0.0 }, 4.0, 1.0, Some(3.0)).unwrap();
        assert_relative_eq!(k2, (1.0f64 / 4.0).ln(), max_relative = 1e-9);
    }

    #[test]
    fn shift_kernel_lorentzian_matches_quadrature() {
        let ff = FormFactor::Lorentzian {
            center: 1.0,
            fwhm: 0.1,
        };
        for &(w0, cutoff) in &[(0.8, Some(5.0)), (1.2, Some(8.0)), (0.5, None)] {
            let closed = shift_kernel(&ff, w0, 1.0, cutoff).unwrap();
            let l = cutoff.unwrap_or(4000.0);
            let p = |w: f64| ff.evaluate(w, 1.0);
            let numeric = quad::principal_value(&p, 0.0, l, w0, 1e-13, 1e-11).unwrap();
            // The open-ended closed form is compared against a far-cutoff
            // numeric integral, whose truncation error is O(b^2 d / L^2).
            let tol = if cutoff.is_some() { 1e-8 } else { 1e-6 };
            assert_relative_eq!(closed, numeric, max_relative = tol, epsilon = tol);
        }
    }

    #[test]
    fn spectrum_lines_integrate_to_branching_weights() {
        let p = res(0.01);
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.02).collect();
        let base = 1e-9;
        let spec = emission_spectrum(
            lab(10, true),
            &p,
            &FormFactor::Constant,
            base,
            Some(3.5),
            &grid,
        )
        .unwrap();
        assert_relative_eq!(spec.gamma_total, base * 9.49563, max_relative = 1e-4);
        // The dominant line carries almost the whole weight; integrate it
        // over a window many linewidths wide.
        let j = spec
            .channels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.rate.total_cmp(&b.1.rate))
            .map(|(i, _)| i)
            .unwrap();
        let w0 = spec.channels[j].frequency + spec.lamb_shift;
        let f = |w: f64| spec.channel_density_at(j, w);
        let half = 1e4 * spec.gamma_total;
        let area = quad::integrate(&f, w0 - half, w0 + half, 1e-16, 1e-10).unwrap();
        let weight = spec.channels[j].rate / spec.gamma_total;
        // A symmetric window of half-width H captures 1 - gamma/(pi H).
        assert_relative_eq!(area, weight, max_relative = 1e-3);
    }

    #[test]
    fn spectrum_downgrades_divergent_shift() {
        let p = res(0.01);
        let grid = [0.0, 0.5, 1.0, 1.5];
        let spec = emission_spectrum(
            lab(10, true),
            &p,
            &FormFactor::Constant,
            1e-3,
            None,
            &grid,
        )
        .unwrap();
        assert_eq!(spec.lamb_shift, 0.0);
        assert!(spec.warnings.iter().any(|w| w.contains("diverges")));
    }

    #[test]
    fn spectrum_rejects_bad_grid() {
        let p = res(0.01);
        let bad = [0.0, 0.5, 0.5];
        assert!(matches!(
            emission_spectrum(lab(10, true), &p, &FormFactor::Constant, 1e-3, None, &bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn weight_ratio_guards_zero_denominator() {
        let p = res(0.01);
        let ch = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1e-3).unwrap();
        let zero = TransitionChannel { rate: 0.0, ..ch[0] };
        match weight_ratio(&ch[0], &zero) {
            Err(Error::DivisionByZeroChannel(_)) => {}
            other => panic!("expected DivisionByZeroChannel, got {other:?}"),
        }
        assert_relative_eq!(weight_ratio(&ch[0], &ch[0]).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_channels_flagged_when_linewidth_swallows_spacing() {
        let p = res(0.01);
        // Enormous base rate: total linewidth far exceeds every spacing.
        let ch = transition_channels(lab(10, true), &p, &FormFactor::Constant, 10.0).unwrap();
        assert!(!degenerate_channel_pairs(&ch).is_empty());
        // Tiny base rate: all lines resolved.
        let ch = transition_channels(lab(10, true), &p, &FormFactor::Constant, 1e-9).unwrap();
        assert!(degenerate_channel_pairs(&ch).is_empty());
    }

    #[test]
    fn bare_cavity_limit_single_ladder_channel() {
        // Decoupled detuned emitter: the photon-like state loses exactly one
        // photon, |<n-1|a|n>|^2 = n, at the bare cavity frequency.
        let p = ModelParams::detuned(0.8, 0.0, 0.0);
        let i = lab(10, true);
        let ch = transition_channels(i, &p, &FormFactor::Constant, 1.0).unwrap();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch[0].to, lab(9, true));
        assert_relative_eq!(ch[0].frequency, 1.0, max_relative = 1e-12);
        assert_relative_eq!(ch[0].a_sq, 10.0, max_relative = 1e-12);
        assert_relative_eq!(total_rate(&ch), 10.0, max_relative = 1e-12);
    }
}
