use approx::assert_abs_diff_eq;
use clcgan::diracgan::{dirac_vector_field, make_objective, Controller, DiracState, ObjectiveKind, Realization};
use clcgan::polyrat::{routh_hurwitz_stable, Polynomial, StabilityClass, TransferFunction};
use clcgan::simulate::{simulate_dirac, Method, SimConfig};
use clcgan::traingan::{Mlp, ReplayBuffer};
use clcgan::Rational64;
use ndarray::Array1;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Real polynomial of the given degree range, ascending coefficients in
/// [-10, 10], leading coefficient at least 0.1 in magnitude.
fn polynomial(degrees: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    degrees.prop_flat_map(|deg| {
        (prop::collection::vec(-10.0..10.0f64, deg), 0.1..10.0f64, any::<bool>()).prop_map(|(mut c, lead, neg)| {
            c.push(if neg { -lead } else { lead });
            c
        })
    })
}

fn kind() -> impl Strategy<Value = ObjectiveKind> {
    prop::sample::select(ObjectiveKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn roots_have_small_residuals(c in polynomial(1..=6)) {
        let p = Polynomial::new(c).unwrap();
        let roots = p.roots().unwrap();
        prop_assert_eq!(roots.len(), p.degree());
        for r in roots {
            let res = p.eval_complex(r).norm();
            prop_assert!(res <= 1e-8 * p.residual_scale(r), "root {} residual {:e}", r, res);
        }
    }

    #[test]
    fn roots_come_in_conjugate_pairs(c in polynomial(1..=6)) {
        let roots = Polynomial::new(c).unwrap().roots().unwrap();
        let mut conj: Vec<_> = roots.iter().map(|z| z.conj()).collect();
        conj.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        for (a, b) in roots.iter().zip(&conj) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-9);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-9);
        }
    }

    #[test]
    fn feedback_adds_scaled_numerator_exactly(
        num in prop::collection::vec(-20i64..20, 1..=3),
        mut den in prop::collection::vec(-20i64..20, 2..=3),
        lead in 1i64..20,
        gain in (0i64..40, 1i64..8),
    ) {
        den.push(lead);
        let q = |v: &[i64]| Polynomial::new(v.iter().map(|&x| Rational64::from_integer(x)).collect()).unwrap();
        let plant = TransferFunction::new(q(&num), q(&den)).unwrap();
        let lambda = Rational64::new(gain.0, gain.1);
        let closed = plant.feedback_close(lambda).unwrap();
        let expected = plant.den() + &plant.num().scale(lambda);
        let expected = if *expected.leading() < Rational64::from_integer(0) { -&expected } else { expected };
        prop_assert_eq!(closed.den(), &expected);
        prop_assert!(closed.den().leading() > &Rational64::from_integer(0));
    }

    #[test]
    fn equilibrium_is_a_fixed_point(k in kind(), c in -3.0..3.0f64, lambda in 0.0..5.0f64, output in any::<bool>()) {
        let spec = make_objective::<f64>(k);
        let r = if output { Realization::OutputDamping } else { Realization::InputFeedback };
        let ctrl = Controller::from_lambda(lambda, r).unwrap();
        prop_assert_eq!(dirac_vector_field(&spec, &DiracState::equilibrium(c), &ctrl), (0.0, 0.0));
        let cfg = SimConfig::continuous(Method::Rk4, 1e-2, 1.0);
        let traj = simulate_dirac(&spec, &ctrl, &DiracState::equilibrium(c), &cfg).unwrap();
        prop_assert_eq!(traj.last_state(), &[0.0, c][..]);
    }

    #[test]
    fn mlp_parameter_round_trip(dims in prop::collection::vec(1usize..6, 2..5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = Mlp::<f64>::new(&dims, &mut rng).unwrap();
        let mut other = Mlp::<f64>::zeros(&dims).unwrap();
        other.set_params_flat(&net.params_flat()).unwrap();
        let x = Array1::from_elem(dims[0], 0.3);
        prop_assert_eq!(other.forward(x.view()).unwrap(), net.forward(x.view()).unwrap());
        prop_assert_eq!(net.param_count(), net.params_flat().len());
    }

    #[test]
    fn replay_buffer_stays_within_capacity(cap in 1usize..40, pushes in 0usize..120, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = ReplayBuffer::<f64>::new(cap, 2).unwrap();
        for i in 0..pushes {
            buf.push(&[i as f64, -(i as f64)], i as u64, &mut rng).unwrap();
            prop_assert_eq!(buf.fill(), (i + 1).min(cap));
        }
        // Every stored row is a pushed sample under its own tag.
        for (k, &tag) in buf.tags().iter().enumerate() {
            prop_assert!(tag < pushes as u64);
            prop_assert_eq!(buf.slot(k).to_vec(), vec![tag as f64, -(tag as f64)]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stability_class_agrees_with_routh_hurwitz(c in polynomial(2..=3)) {
        let mut c = c;
        if *c.last().unwrap() < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        let p = Polynomial::new(c).unwrap();
        let roots = p.roots().unwrap();
        prop_assume!(roots.iter().all(|z| z.re.abs() > 1e-6));
        let tf = TransferFunction::new(Polynomial::one(), p.clone()).unwrap();
        let stable = tf.classify(1e-9).unwrap() == StabilityClass::AsymptoticallyStable;
        prop_assert_eq!(stable, routh_hurwitz_stable(&p).unwrap());
    }
}
