use std::f64::consts::PI;

use hops_core::classical::{
    classical_hidden, classical_stokes, hidden_polarization_index, sample_hops, AmplitudeDistribution,
    HopsEnsembleSpec, PolarizationBasis,
};
use hops_core::dpa::{heisenberg_moments, propagate, HeisenbergSolution, Oracle};
use hops_core::fock::{expectation, variance, FockCutoff, QuantumState, C64};
use hops_core::polarization::{build_hidden, fit_hops_criterion, uncertainty_products, PhaseConvention};
use hops_core::squeezing::{
    onset_time, onset_time_bisection, squeezing_function, thermal_distribution,
};
use ndarray::Array1;
use proptest::prelude::*;

const D: usize = 7;
const MAX_PHOTONS: usize = 3;

/// Amplitudes on `n_x + n_y <= MAX_PHOTONS` in a `D x D` space.
fn low_excitation_state() -> impl Strategy<Value = QuantumState> {
    let slots = (MAX_PHOTONS + 1) * (MAX_PHOTONS + 2) / 2;
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), slots)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            let c = FockCutoff::square(D).unwrap();
            let mut amps = Array1::zeros(c.dim());
            let mut k = 0;
            for n_x in 0..=MAX_PHOTONS {
                for n_y in 0..=(MAX_PHOTONS - n_x) {
                    amps[c.index(n_x, n_y)] = C64::new(v[k].0, v[k].1);
                    k += 1;
                }
            }
            QuantumState::normalized(c, amps).unwrap()
        })
}

fn rephase(state: &QuantumState, phase: f64) -> QuantumState {
    let hops_core::fock::StateRepr::Pure(psi) = state.repr() else {
        unreachable!()
    };
    QuantumState::pure(state.cutoff(), psi.mapv(|z| z * C64::from_polar(1.0, phase))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncertainty_relations_hold_on_random_states(state in low_excitation_state()) {
        let set = build_hidden(state.cutoff(), PhaseConvention::InteractionPicture);
        for p in uncertainty_products(&set, &state).unwrap() {
            prop_assert!(p.holds(), "{}: {} < {}", p.label, p.lhs, p.rhs);
        }
    }

    #[test]
    fn moments_ignore_global_phase(state in low_excitation_state(), phase in 0.0..2.0 * PI) {
        let set = build_hidden(state.cutoff(), PhaseConvention::InteractionPicture);
        let other = rephase(&state, phase);
        for op in set.components() {
            let (a, b) = (expectation(op, &state).unwrap(), expectation(op, &other).unwrap());
            prop_assert!((a - b).norm() < 1e-12);
            let (va, vb) = (variance(op, &state).unwrap(), variance(op, &other).unwrap());
            prop_assert!((va - vb).abs() < 1e-12);
        }
        if let (Ok(f1), Ok(f2)) = (fit_hops_criterion(&state), fit_hops_criterion(&other)) {
            prop_assert!((f1.p_h - f2.p_h).norm() < 1e-12);
            prop_assert!((f1.residual - f2.residual).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_identity(kt in 0.0..3.0f64) {
        let sol = HeisenbergSolution::at(kt);
        // relative to C^2, which reaches ~1e5 at kt = 3
        prop_assert!(sol.identity_defect().abs() <= 1e-12 * sol.c * sol.c);
        if kt <= 1.0 {
            prop_assert!(sol.identity_defect().abs() < 1e-12);
        }
    }

    #[test]
    fn squeezing_function_decreases_in_kt(
        n_x in 0.0..5.0f64, n_y in 0.0..5.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64
    ) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(squeezing_function(lo, n_x, n_y) > squeezing_function(hi, n_x, n_y));
    }

    #[test]
    fn thermal_weights_are_complete(n_bar in 0.0..30.0f64) {
        let total: f64 = thermal_distribution(n_bar, 1e-13).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "{}", total);
    }

    #[test]
    fn hops_samples_are_exact_and_reproducible(
        chi in 0.0..PI, delta in -PI + 1e-9..PI, seed in any::<u64>(), scale in 0.1..3.0f64
    ) {
        let spec = HopsEnsembleSpec::new(chi, delta, AmplitudeDistribution::Rayleigh { scale }).unwrap();
        let a = sample_hops(&spec, 64, seed).unwrap();
        let b = sample_hops(&spec, 64, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let target = spec.hidden_index();
        for s in a.iter().filter(|s| s.amp_x.norm() > 1e-6) {
            let p = hidden_polarization_index(s, &PolarizationBasis::linear_xy()).unwrap();
            prop_assert!((p - target).norm() <= 1e-9 * target.norm().max(1.0));
        }
        let (st, hd) = (classical_stokes(&a).unwrap(), classical_hidden(&a).unwrap());
        prop_assert_eq!(st.values[0], hd.values[0]);
        prop_assert_eq!(st.values[1], hd.values[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn onset_closed_form_matches_bisection(n_x in 0.0..1.0f64, n_y in 0.0..1.0f64) {
        let closed = onset_time(n_x, n_y).unwrap();
        let root = onset_time_bisection(n_x, n_y, 1e-13).unwrap();
        prop_assert!((closed - root).abs() < 1e-10);
        prop_assert!(closed >= 1f64.asinh() / 4.0 - 1e-15);
        prop_assert!(closed <= 2f64.asinh() / 4.0 + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_matches_closed_form(n_x in 0usize..4, n_y in 0usize..4, kt in 0.0..0.3f64) {
        let cutoff = FockCutoff::square(40).unwrap();
        let evolved = propagate(&QuantumState::fock(cutoff, n_x, n_y).unwrap(), kt).unwrap();
        let brute = Oracle::new(cutoff).moments_of(&evolved.state, kt, evolved.leakage).unwrap();
        let diff = brute.max_abs_diff(&heisenberg_moments(n_x, n_y, kt));
        prop_assert!(diff <= 1e-8f64.max(10.0 * evolved.leakage), "diff {}", diff);
    }
}
