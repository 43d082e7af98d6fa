use proptest::prelude::*;

use bergerkit_core::algebra::{convolve_terms, polynomial_square_direct, sqrt_atomic, square_atomic, square_measure, SqrtOutcome};
use bergerkit_core::measure::{Atom, DensityTerm, Measure};
use bergerkit_core::shift::{moments_from_weights, schur_product, weights_from_moments, WeightSequence};
use bergerkit_core::subnormality::{hankel_sweep, is_n_contractive, DEFAULT_TOL};
use bergerkit_core::Scalar;

fn rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Scalar> {
    (0..=max_num, 1..=max_den).prop_map(|(p, q)| Scalar::ratio(p, q))
}

fn positive_rational() -> impl Strategy<Value = Scalar> {
    (1..=12i64, 1..=12i64).prop_map(|(p, q)| Scalar::ratio(p, q))
}

/// Squared weight in (0, 1].
fn weight_sq() -> impl Strategy<Value = Scalar> {
    (1..=12i64, 0..=12i64).prop_map(|(p, extra)| Scalar::ratio(p, p + extra))
}

/// Nonnegative coefficients `c_i` of `Σ c_i t^i`, scaled to integrate to 1.
fn polynomial() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(rational(5, 3), 1..5)
        .prop_filter("nonzero", |c| c.iter().any(|x| !x.is_zero()))
        .prop_map(|c| {
            let mass: Scalar = c.iter().enumerate().map(|(i, x)| x / Scalar::int(i as i64 + 1)).sum();
            c.iter().map(|x| x / &mass).collect()
        })
}

/// Terms `c t^α (-ln t)^k dt` on (0, 1) with rational α ≥ 0 and integer k,
/// so that every moment is rational.
fn exact_term() -> impl Strategy<Value = DensityTerm> {
    (positive_rational(), rational(8, 5), 0..3i64)
        .prop_map(|(c, a, k)| DensityTerm::unit(c, a, Scalar::int(k)))
}

fn exact_measure() -> impl Strategy<Value = Measure> {
    (rational(3, 4), prop::collection::vec(exact_term(), 1..4)).prop_map(|(z, terms)| {
        let m = Measure::new(z, vec![], terms).unwrap();
        let total = m.total_mass();
        m.scaled(&total.recip()).unwrap()
    })
}

/// Probability measure with an atom at 1 and atoms on a rational log grid.
fn atomic_measure() -> impl Strategy<Value = Measure> {
    prop::collection::btree_set((1..=40i64, 1..=4i64), 0..4).prop_flat_map(|pos| {
        let pos: Vec<(i64, i64)> = pos.into_iter().collect();
        let n = pos.len() + 1;
        prop::collection::vec(1..=9i64, n).prop_map(move |w| {
            let total: i64 = w.iter().sum();
            let mut atoms = vec![Atom::new(Scalar::zero(), Scalar::ratio(w[0], total))];
            for (i, (p, q)) in pos.iter().enumerate() {
                atoms.push(Atom::new(Scalar::ratio(*p, *q), Scalar::ratio(w[i + 1], total)));
            }
            Measure::atomic(atoms).unwrap()
        })
    })
}

fn rel_close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    let (a, b) = (a.to_f64(), b.to_f64());
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn square_moments_are_squared(nu in exact_measure()) {
        let mu = square_measure(&nu).unwrap();
        for n in 0..8u32 {
            let g = nu.moment(n);
            prop_assert_eq!(mu.moment(n), &g * &g, "n = {}", n);
        }
    }

    #[test]
    fn atomic_square_moments(nu in atomic_measure()) {
        let mu = square_atomic(&nu).unwrap();
        prop_assert!(mu.is_atomic());
        for n in 0..8u32 {
            let g = nu.moment(n);
            prop_assert!(rel_close(&mu.moment(n), &(&g * &g), 1e-40), "n = {}", n);
        }
    }

    #[test]
    fn atomic_round_trip(nu in atomic_measure()) {
        let mu = square_atomic(&nu).unwrap();
        match sqrt_atomic(&mu, &Scalar::real(1e-10)).unwrap() {
            SqrtOutcome::Root(r) => {
                prop_assert_eq!(r.measure().atoms().len(), nu.atoms().len());
                for (a, b) in r.measure().atoms().iter().zip(nu.atoms()) {
                    prop_assert!(a.log_pos.agrees_to_rounding(&b.log_pos));
                    prop_assert!((&a.mass - &b.mass).abs().to_f64() < 1e-10);
                }
            }
            SqrtOutcome::NoRoot(f) => prop_assert!(false, "no root: {}", f),
        }
    }

    #[test]
    fn convolution_is_symmetric(a in exact_term(), b in exact_term()) {
        let ab = Measure::from_terms(convolve_terms(&a, &b).unwrap()).unwrap();
        let ba = Measure::from_terms(convolve_terms(&b, &a).unwrap()).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn direct_polynomial_square(coeffs in polynomial()) {
        let p = Measure::polynomial(&coeffs).unwrap();
        prop_assert_eq!(polynomial_square_direct(&coeffs).unwrap(), square_measure(&p).unwrap());
    }

    #[test]
    fn json_round_trip(nu in exact_measure(), at in atomic_measure()) {
        for m in [nu, at] {
            let back = Measure::from_json(&m.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn addition_commutes(a in exact_measure(), b in atomic_measure()) {
        let ab = a.plus(&b).unwrap();
        prop_assert_eq!(&ab, &b.plus(&a).unwrap());
        prop_assert_eq!(ab.total_mass(), Scalar::int(2));
        // adding a measure to itself doubles every mass
        prop_assert_eq!(b.plus(&b).unwrap(), b.scaled(&Scalar::int(2)).unwrap());
    }

    #[test]
    fn weights_and_moments_invert(w in prop::collection::vec(weight_sq(), 1..12)) {
        let seq = WeightSequence::new(w.clone(), None).unwrap();
        let g = moments_from_weights(&seq, w.len() + 1).unwrap();
        let plain = bergerkit_core::shift::MomentSequence::new(g.values().to_vec()).unwrap();
        let back = weights_from_moments(&plain).unwrap();
        prop_assert_eq!(back.prefix_sq(), &w[..]);
    }

    #[test]
    fn schur_multiplies_moments(
        a in prop::collection::vec(weight_sq(), 8),
        b in prop::collection::vec(weight_sq(), 8),
    ) {
        let (wa, wb) = (WeightSequence::new(a, None).unwrap(), WeightSequence::new(b, None).unwrap());
        let ga = moments_from_weights(&wa, 9).unwrap();
        let gb = moments_from_weights(&wb, 9).unwrap();
        let gab = moments_from_weights(&schur_product(&wa, &wb).unwrap(), 9).unwrap();
        for n in 0..9 {
            prop_assert_eq!(gab.get(n).unwrap(), ga.get(n).unwrap() * gb.get(n).unwrap());
        }
    }

    #[test]
    fn measures_on_unit_interval_pass_all_tests(nu in exact_measure()) {
        let g = bergerkit_core::shift::MomentSequence::new((0..20u32).map(|n| nu.moment(n)).collect()).unwrap();
        for k in 1..=3 {
            let r = hankel_sweep(&g, k, 6, &Scalar::real(DEFAULT_TOL)).unwrap();
            prop_assert!(r.passed, "k = {}", k);
        }
        for n in 1..=6 {
            prop_assert!(is_n_contractive(&g, n, 8).unwrap().passed, "n = {}", n);
        }
    }
}
