use fluxsw::circuit_model::{build_capacitance_network, epsilon_closed_form, CircuitElement, FluxQubitSpec};
use fluxsw::couplings::{fix_gauge, pauli_decompose};
use fluxsw::linalg::{frobenius, kron, Eigen};
use fluxsw::operators::{local_model, BasisSpec};
use fluxsw::scalar::CMat;
use fluxsw::swt::{exact_sw_from, integrity, perturbative_sw, Selection};
use num_complex::Complex;
use proptest::prelude::*;

fn hermitian(n: usize, re: &[f64], im: &[f64]) -> CMat<f64> {
    let a = CMat::<f64>::from_fn(n, n, |i, j| Complex::new(re[i * n + j], im[i * n + j]));
    (&a + a.adjoint()) * Complex::new(0.5, 0.0)
}

fn qubit_pair() -> (CMat<f64>, CMat<f64>) {
    let q = FluxQubitSpec::<f64>::symmetric(50.0, 0.65, 0.0).unwrap();
    let m = local_model(&CircuitElement::Qubit(q), BasisSpec::ChargeGrid(8), q.ec_eff()).unwrap();
    let e = Eigen::of(&m.h0).unwrap();
    (e.lowest(2), m.phi)
}

proptest! {
    #[test]
    fn capacitance_round_trip(c1 in 0.05f64..20.0, c2 in 0.05f64..20.0, cg in 0.0f64..20.0) {
        let n = build_capacitance_network(c1, c2, cg).unwrap();
        prop_assert!(n.round_trip_error() < 1e-12);
        let det = (c1 + cg) * (c2 + cg) - cg * cg;
        prop_assert!((n.inv11 - (c2 + cg) / det).abs() <= 1e-12 * n.inv11);
        prop_assert!((n.inv_od - cg / det).abs() <= 1e-12 * n.inv11);
        prop_assert!(n.inv_od <= n.inv11.min(n.inv22));
    }

    #[test]
    fn epsilon_closed_form_agrees(alpha in 0.51f64..1.0, beta in 0.0f64..0.3, gamma in 0.0f64..10.0) {
        let q = FluxQubitSpec::<f64>::symmetric(50.0, alpha, beta).unwrap();
        let c = q.capacitance();
        let n = build_capacitance_network(c, c, gamma / q.ec).unwrap();
        let closed = epsilon_closed_form(gamma, alpha, beta);
        prop_assert!((n.epsilon - closed).abs() <= 1e-12 * closed.max(1e-300));
    }

    #[test]
    fn pauli_round_trip(re in prop::collection::vec(-5.0f64..5.0, 16), im in prop::collection::vec(-5.0f64..5.0, 16)) {
        let h = hermitian(4, &re, &im);
        let r = pauli_decompose(&h).unwrap();
        prop_assert!(frobenius(&(r.reassemble() - &h)) < 1e-12);
        prop_assert!(r.imag_defect < 1e-12);
    }

    #[test]
    fn gauge_fixing_ignores_input_phases(t0 in 0.0f64..std::f64::consts::TAU, t1 in 0.0f64..std::f64::consts::TAU) {
        let (pair, phi) = qubit_pair();
        let base = fix_gauge(&pair, &phi, None).unwrap();
        let mut rotated = pair.clone();
        for (k, t) in [(0, t0), (1, t1)] {
            let z = Complex::from_polar(1.0, t);
            for v in rotated.column_mut(k).iter_mut() {
                *v *= z;
            }
        }
        let fixed = fix_gauge(&rotated, &phi, None).unwrap();
        prop_assert!(frobenius(&(&fixed.states - &base.states)) < 1e-12);
        prop_assert!(fixed.phi01 > 0.0);

        // a two-qubit operator decomposes identically in either gauge
        let p2 = kron(&base.states, &base.states);
        let f2 = kron(&fixed.states, &fixed.states);
        let op = kron(&phi, &phi);
        let a = pauli_decompose(&(p2.adjoint() * &op * &p2)).unwrap();
        let b = pauli_decompose(&(f2.adjoint() * &op * &f2)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((a.coeffs[i][j] - b.coeffs[i][j]).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_sw_preserves_low_spectrum(
        levels in prop::collection::vec(0.0f64..1.0, 12),
        re in prop::collection::vec(-1.0f64..1.0, 144),
        im in prop::collection::vec(-1.0f64..1.0, 144),
        eps in 1e-3f64..0.05,
    ) {
        let d = 4;
        let diag: Vec<f64> = levels.iter().enumerate().map(|(i, x)| if i < d { *x } else { 3.0 + *x }).collect();
        let h0 = CMat::<f64>::from_fn(12, 12, |i, j| if i == j { Complex::new(diag[i], 0.0) } else { Complex::new(0.0, 0.0) });
        let v = hermitian(12, &re, &im);
        let h = &h0 + &v * Complex::new(eps, 0.0);
        let bare = Eigen::of(&h0).unwrap();
        let exact = Eigen::of(&h).unwrap();
        let eff = exact_sw_from(&exact, &bare.lowest(d), Selection::Lowest).unwrap();
        let ev = Eigen::of(&eff.matrix).unwrap();
        for k in 0..d {
            prop_assert!((ev.values[k] - exact.values[k]).abs() < 1e-11);
        }
        let it = integrity(&eff, &exact).unwrap();
        prop_assert!(it.unitarity < 1e-12 && it.intertwining < 1e-10);

        let terms = perturbative_sw(&bare, &v, d, eps, None).unwrap();
        let base = bare.lowest(d);
        let exact_bare = {
            // express H_eff in the eigenbasis of H0 used by the series
            let w = base.adjoint() * &eff.bare_basis;
            &w * &eff.matrix * w.adjoint()
        };
        let err2 = frobenius(&(&exact_bare - terms.partial_sum(2, eps)));
        prop_assert!(err2 < 200.0 * eps.powi(3), "second-order error {err2} at eps {eps}");
    }
}

#[test]
fn single_precision_network() {
    let n = build_capacitance_network(2.3f32, 2.3, 0.4).unwrap();
    assert!(n.round_trip_error() < 1e-6);
    let q = fluxsw::FluxQubitSpecF32::symmetric(50.0, 0.65, 0.0).unwrap();
    let c = q.capacitance();
    let n = build_capacitance_network(c, c, 0.2 / q.ec).unwrap();
    assert!((n.epsilon - epsilon_closed_form(0.2f32, 0.65, 0.0)).abs() < 1e-6);
}
