//! Second-order perturbation theory on top of the rotating-wave ladder.
//!
//! The perturbation consists of the counter-rotating exchange term
//! (strength `g_r`, connecting manifolds two apart) and the excited-state
//! population coupling (strength `2 g_s`, connecting neighbors). Energies
//! pick up a second-order shift; states pick up first- and second-order
//! admixtures tracked per order so downstream matrix elements can be
//! truncated consistently.

use crate::model::{jc_eigenpair, jc_energy, labels_of_manifold, ModelParams, StateLabel};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Energy denominators smaller than this (times `omega_c`) abort the
/// perturbative expansion.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Matrix element `<m|V|n>` of the perturbation between two rotating-wave
/// dressed states. Nonzero only for manifolds one apart (population
/// coupling) or two apart (counter-rotating coupling); real and symmetric.
pub fn v_matrix_element(m: StateLabel, n: StateLabel, params: &ModelParams) -> f64 {
    let (a_n, b_n) = jc_eigenpair(n, params);
    let nn = n.n as f64;
    let mut out = 0.0;
    let offset = m.n as i64 - n.n as i64;
    match offset {
        -2 => {
            let (a_m, _) = jc_eigenpair(m, params);
            out += params.g_r * (nn - 1.0).sqrt() * b_n * a_m;
        }
        2 => {
            let (_, b_m) = jc_eigenpair(m, params);
            out += params.g_r * (nn + 1.0).sqrt() * a_n * b_m;
        }
        -1 => {
            let (_, b_m) = jc_eigenpair(m, params);
            out += 2.0 * params.g_s * b_m * b_n * (nn - 1.0).sqrt();
        }
        1 => {
            let (_, b_m) = jc_eigenpair(m, params);
            out += 2.0 * params.g_s * b_m * b_n * nn.sqrt();
        }
        _ => {}
    }
    out
}

fn degeneracy_gap(
    en: f64,
    n: StateLabel,
    k: StateLabel,
    params: &ModelParams,
) -> Result<f64> {
    let gap = en - jc_energy(k, params);
    let tol = DEGENERACY_TOL * params.omega_c;
    if gap.abs() <= tol {
        return Err(Error::NearDegeneracy {
            a: n,
            b: k,
            gap: gap.abs(),
            tol,
        });
    }
    Ok(gap)
}

/// Second-order energy shift of the dressed state `n`. Only manifolds within
/// two of `n` connect through the perturbation.
pub fn energy_shift2(n: StateLabel, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let en = jc_energy(n, params);
    let mut tot = 0.0;
    for k in n.n.saturating_sub(2)..=n.n + 2 {
        if k == n.n {
            continue;
        }
        for kk in labels_of_manifold(k, params) {
            let v = v_matrix_element(kk, n, params);
            if v == 0.0 {
                continue;
            }
            let gap = degeneracy_gap(en, n, kk, params)?;
            tot += v * v / gap;
        }
    }
    Ok(tot)
}

/// Rotating-wave energy plus the second-order shift.
pub fn energy_through_second_order(n: StateLabel, params: &ModelParams) -> Result<f64> {
    Ok(jc_energy(n, params) + energy_shift2(n, params)?)
}

/// A dressed state corrected through second order, with admixture amplitudes
/// resolved by perturbative order so matrix elements can be truncated at a
/// consistent total order.
#[derive(Clone, Debug)]
pub struct PerturbedState {
    pub label: StateLabel,
    /// `orders[j]` maps basis labels to the order-`j` amplitude. Order 0 is
    /// the state itself; order 2 includes the normalization counterterm on
    /// the central label.
    orders: [BTreeMap<StateLabel, f64>; 3],
}

impl PerturbedState {
    /// Amplitudes at a fixed perturbative order (`j <= 2`).
    pub fn order(&self, j: usize) -> &BTreeMap<StateLabel, f64> {
        &self.orders[j]
    }

    /// Total amplitude on one basis label, all orders summed.
    pub fn amplitude(&self, l: StateLabel) -> f64 {
        self.orders
            .iter()
            .map(|o| o.get(&l).copied().unwrap_or(0.0))
            .sum()
    }

    /// All summed amplitudes.
    pub fn amplitudes(&self) -> BTreeMap<StateLabel, f64> {
        let mut out: BTreeMap<StateLabel, f64> = BTreeMap::new();
        for o in &self.orders {
            for (&l, &v) in o {
                *out.entry(l).or_insert(0.0) += v;
            }
        }
        out
    }

    /// Euclidean norm of the summed amplitudes. Stays within `O(g^3)` of 1
    /// inside the perturbative regime; its growth is the validity monitor.
    pub fn norm(&self) -> f64 {
        self.amplitudes()
            .values()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Expand the dressed state `n` through second order.
///
/// The candidate range spans manifolds `n +- 4`: first-order admixtures stop
/// at `n +- 2` by the selection rules, while second-order two-step paths
/// (two hops of up to two manifolds each) reach `n +- 4`. Every candidate
/// denominator in that range is checked against the degeneracy tolerance,
/// including the same-manifold partner, which enters second-order paths.
pub fn perturbed_state(n: StateLabel, params: &ModelParams) -> Result<PerturbedState> {
    params.validate()?;
    let en = jc_energy(n, params);
    let mut o0 = BTreeMap::new();
    o0.insert(n, 1.0);
    let mut o1 = BTreeMap::new();
    let mut o2 = BTreeMap::new();
    let mut sum_sq = 0.0;
    for k in n.n.saturating_sub(4)..=n.n + 4 {
        for kk in labels_of_manifold(k, params) {
            if kk == n {
                continue;
            }
            let gap_k = degeneracy_gap(en, n, kk, params)?;
            let first = v_matrix_element(kk, n, params) / gap_k;
            let mut second = 0.0;
            for l in n.n.saturating_sub(2)..=n.n + 2 {
                for ll in labels_of_manifold(l, params) {
                    if ll == n {
                        continue;
                    }
                    let v_ln = v_matrix_element(ll, n, params);
                    if v_ln == 0.0 {
                        continue;
                    }
                    let v_kl = v_matrix_element(kk, ll, params);
                    if v_kl == 0.0 {
                        continue;
                    }
                    let gap_l = en - jc_energy(ll, params);
                    second += v_kl * v_ln / (gap_k * gap_l);
                }
            }
            if first != 0.0 {
                o1.insert(kk, first);
                sum_sq += first * first;
            }
            if second != 0.0 {
                o2.insert(kk, second);
            }
        }
    }
    // Normalization counterterm: keeps <n|corrected n> = 1 through second
    // order in the intermediate-normalization-free convention.
    o2.insert(n, -0.5 * sum_sq);
    Ok(PerturbedState {
        label: n,
        orders: [o0, o1, o2],
    })
}

/// Norm of the second-order state, the scalar validity monitor.
pub fn state_norm(n: StateLabel, params: &ModelParams) -> Result<f64> {
    Ok(perturbed_state(n, params)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Branch;
    use approx::assert_relative_eq;

    fn lab(n: u32, plus: bool) -> StateLabel {
        StateLabel::new(n, if plus { Branch::Plus } else { Branch::Minus })
    }

    #[test]
    fn v_is_symmetric_and_selection_limited() {
        for &wa in &[1.0, 0.8] {
            let p = ModelParams::detuned(wa, 0.01, 0.007);
            let mut labels = Vec::new();
            for n in 0..10 {
                labels.extend(labels_of_manifold(n, &p));
            }
            for &m in &labels {
                for &n in &labels {
                    let vmn = v_matrix_element(m, n, &p);
                    let vnm = v_matrix_element(n, m, &p);
                    assert_relative_eq!(vmn, vnm, max_relative = 1e-13, epsilon = 1e-18);
                    let dn = (m.n as i64 - n.n as i64).abs();
                    if dn == 0 || dn > 2 {
                        assert_eq!(vmn, 0.0, "selection rule broken for {m} {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn v_population_element_at_zero_exchange_coupling() {
        // With g_r = 0 on resonance both doublet members are equal mixtures,
        // so <1,+|V|2,+> = 2 g_s * (1/2) * sqrt(1) = g_s.
        let p = ModelParams::resonant(0.0, 0.01);
        let v = v_matrix_element(lab(1, true), lab(2, true), &p);
        assert_relative_eq!(v, 0.01, max_relative = 1e-14);
    }

    #[test]
    fn second_order_shift_matches_pinned_values() {
        let p = ModelParams::resonant(0.01, 0.01);
        assert_relative_eq!(
            energy_shift2(lab(10, true), &p).unwrap(),
            -0.0003793995325102776,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            energy_shift2(lab(10, false), &p).unwrap(),
            -0.00012226995154865773,
            max_relative = 1e-10
        );
        let pd = ModelParams::detuned(1.2, 0.01, 0.0);
        assert_relative_eq!(
            energy_shift2(lab(1, true), &pd).unwrap(),
            -2.4822308189249727e-07,
            max_relative = 1e-10
        );
    }

    #[test]
    fn shift_scales_exactly_quadratically_in_pure_population_coupling() {
        // With g_r = 0 the denominators are independent of g_s, so the shift
        // is exactly quadratic in g_s.
        let lo = ModelParams::resonant(0.0, 0.003);
        let hi = ModelParams::resonant(0.0, 0.006);
        let s_lo = energy_shift2(lab(10, true), &lo).unwrap();
        let s_hi = energy_shift2(lab(10, true), &hi).unwrap();
        assert_relative_eq!(s_hi / s_lo, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn perturbed_state_norm_matches_pinned_values() {
        for (g, want) in [
            (0.01, 0.9999520703827612),
            (0.1, 1.056335590843424),
            (0.14, 11.673395389479664),
        ] {
            let p = ModelParams::resonant(g, g);
            assert_relative_eq!(
                state_norm(lab(10, true), &p).unwrap(),
                want,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn perturbed_state_orders_are_consistent() {
        let p = ModelParams::resonant(0.01, 0.01);
        let st = perturbed_state(lab(10, true), &p).unwrap();
        // Order 0 is the bare state.
        assert_eq!(st.order(0).len(), 1);
        assert_eq!(st.order(0)[&lab(10, true)], 1.0);
        // First order only reaches manifolds within two, partner excluded.
        for l in st.order(1).keys() {
            let dn = (l.n as i64 - 10).abs();
            assert!(dn >= 1 && dn <= 2, "unexpected first-order label {l}");
            assert_ne!(*l, lab(10, false));
        }
        // Central second-order amplitude is the normalization counterterm.
        let sum_sq: f64 = st.order(1).values().map(|v| v * v).sum();
        assert_relative_eq!(
            st.order(2)[&lab(10, true)],
            -0.5 * sum_sq,
            max_relative = 1e-14
        );
        // Summed amplitude on the central label.
        assert_relative_eq!(
            st.amplitude(lab(10, true)),
            1.0 - 0.5 * sum_sq,
            max_relative = 1e-14
        );
        // Eight first-order and eighteen second-order amplitudes survive the
        // selection rules here; the central weight loss is their square sum.
        assert_eq!(st.order(1).len(), 8);
        assert_eq!(st.order(2).len(), 18);
        assert_relative_eq!(
            st.amplitude(lab(10, true)),
            0.9979564578260344,
            max_relative = 1e-10
        );
    }

    #[test]
    fn near_degeneracy_is_reported() {
        // Exactly at the first ladder crossing the (10,-) denominator
        // against (9,+) vanishes.
        let g = 1.0 / (3.0 + 10f64.sqrt());
        let p = ModelParams::resonant(g, 0.01);
        match energy_shift2(lab(10, false), &p) {
            Err(Error::NearDegeneracy { .. }) => {}
            other => panic!("expected NearDegeneracy, got {other:?}"),
        }
        // The same-manifold partner triggers it for tiny resonant coupling.
        let tiny = ModelParams::resonant(1e-8, 0.0);
        match perturbed_state(lab(10, true), &tiny) {
            Err(Error::NearDegeneracy { .. }) => {}
            other => panic!("expected NearDegeneracy, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_ground_dipole_is_rejected() {
        let p = ModelParams {
            g_s_prime: 0.01,
            ..ModelParams::resonant(0.01, 0.01)
        };
        match energy_shift2(lab(10, true), &p) {
            Err(Error::UnsupportedParameter(_)) => {}
            other => panic!("expected UnsupportedParameter, got {other:?}"),
        }
    }
}
