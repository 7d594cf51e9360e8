mod common;

use proptest::prelude::*;
use rand::Rng;
use unipred::{
    act_from, check_entropy_inequality, error_excess_bound, expected_losses, joint, log_joint,
    loss_bound, predict_from, sample, step_kl, step_sq, Evaluation, LossMatrix, MixtureState,
    Scheme, Sequence, Source, StepMask, DEFAULT_BUDGET,
};

fn dist_pair(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..1.0, n),
            prop::collection::vec(1e-9f64..1.0, n),
        )
            .prop_filter("nonzero mass", |(y, _)| y.iter().sum::<f64>() > 1e-6)
            .prop_map(|(mut y, mut z)| {
                let sy: f64 = y.iter().sum();
                let sz: f64 = z.iter().sum();
                y.iter_mut().for_each(|v| *v /= sy);
                z.iter_mut().for_each(|v| *v /= sz);
                (y, z)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn model_conditionals_are_normalized(seed in any::<u64>(), alphabet in 2usize..=4, len in 0usize..12) {
        let mut rng = common::rng(seed);
        let model = common::random_model(&mut rng, alphabet);
        let x = sample(&model, len, &mut rng);
        let d = model.next_distribution(x.symbols());
        prop_assert!(d.iter().all(|&p| p >= 0.0));
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_is_consistent_over_extensions(seed in any::<u64>(), alphabet in 2usize..=4, len in 0usize..8) {
        let mut rng = common::rng(seed);
        let model = common::random_model(&mut rng, alphabet);
        let x = sample(&model, len, &mut rng);
        let px = joint(&model, &x).unwrap();
        prop_assert!(px > 0.0);
        let mut total = 0.0;
        for a in 0..alphabet {
            let mut xa = x.clone();
            xa.push(a).unwrap();
            total += joint(&model, &xa).unwrap();
        }
        prop_assert!((total - px).abs() <= 1e-12 * px.max(1e-300) + 1e-300);
    }

    #[test]
    fn mixture_dominates_every_member(seed in any::<u64>(), alphabet in 2usize..=3, size in 1usize..=5, len in 0usize..15) {
        let mut rng = common::rng(seed);
        let class = common::random_class(&mut rng, alphabet, size);
        let truth = rng.random_range(0..size);
        let x = sample(class.model(truth), len, &mut rng);
        let mut state = MixtureState::init(&class);
        for &s in x.symbols() {
            state.observe(s).unwrap();
        }
        for gap in state.dominance_gaps() {
            prop_assert!(gap >= -1e-12 || gap.is_nan());
        }
        prop_assert!(state.log_xi() >= class.log_weights()[truth] + log_joint(class.model(truth), &x).unwrap() - 1e-12);
    }

    #[test]
    fn incremental_matches_direct(seed in any::<u64>(), alphabet in 2usize..=3, size in 1usize..=5, len in 0usize..15) {
        let mut rng = common::rng(seed);
        let class = common::random_class(&mut rng, alphabet, size);
        let truth = rng.random_range(0..size);
        let x = sample(class.model(truth), len, &mut rng);
        let mut state = MixtureState::init(&class);
        for &s in x.symbols() {
            state.observe(s).unwrap();
        }
        let direct: f64 = (0..size)
            .map(|i| class.weights()[i] * joint(class.model(i), &x).unwrap())
            .sum();
        prop_assert!((state.log_xi().exp() - direct).abs() <= 1e-10 * direct);
        let incremental = state.next_distribution().unwrap();
        let scratch = class.next_distribution(x.symbols());
        for (a, b) in incremental.iter().zip(&scratch) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!((incremental.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_a_distribution(seed in any::<u64>(), alphabet in 2usize..=3, size in 1usize..=6, len in 0usize..30) {
        let mut rng = common::rng(seed);
        let class = common::random_class(&mut rng, alphabet, size);
        let truth = rng.random_range(0..size);
        let x = sample(class.model(truth), len, &mut rng);
        let mut state = MixtureState::init(&class);
        for &s in x.symbols() {
            state.observe(s).unwrap();
        }
        let post = state.posterior_weights().unwrap();
        prop_assert!(post.iter().all(|&w| (0.0..=1.0).contains(&w)));
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(post[truth] > 0.0);
    }

    #[test]
    fn entropy_inequality_holds((y, z) in dist_pair(8)) {
        let c = check_entropy_inequality(&y, &z).unwrap();
        prop_assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
        prop_assert!(step_kl(&y, &z) >= -1e-15);
        prop_assert!(step_sq(&y, &z) >= 0.0);
        prop_assert!(step_kl(&y, &y).abs() < 1e-15);
    }

    #[test]
    fn argmax_ignores_positive_scaling(p in prop::collection::vec(0.0f64..1.0, 2..8), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = p.iter().map(|v| v * c).collect();
        let a = predict_from(&p);
        let b = predict_from(&scaled);
        prop_assert!(a == b || (scaled[a] == scaled[b]));
        prop_assert!(p.iter().all(|&v| v <= p[a]));
        prop_assert!(p[..a].iter().all(|&v| v < p[a]));
    }

    #[test]
    fn error_loss_scheme_is_the_argmax(p in prop::collection::vec(0.0f64..1.0, 2..6)) {
        let alphabet = unipred::Alphabet::new(p.len()).unwrap();
        let loss = LossMatrix::error_loss(alphabet);
        let y = act_from(&p, &loss);
        prop_assert_eq!(p[y], p[predict_from(&p)]);
    }

    #[test]
    fn error_bound_forms_are_ordered(e in 0.0f64..100.0, h in 0.0f64..50.0) {
        let b = error_excess_bound(e, h);
        prop_assert!(b.tight >= h);
        prop_assert!(b.tight <= b.loose + 1e-9 * b.loose.max(1.0));
    }

    #[test]
    fn loss_bound_grows_with_entropy(seed in any::<u64>(), h1 in 0.0f64..5.0, dh in 0.0f64..5.0, n in 1usize..50) {
        let mut rng = common::rng(seed);
        let loss = common::random_loss(&mut rng, 3);
        let l_mu = n as f64 * (loss.l_min() + rng.random::<f64>() * loss.l_delta());
        let a = loss_bound(l_mu, n, h1, &loss).unwrap();
        let b = loss_bound(l_mu, n, h1 + dh, &loss).unwrap();
        prop_assert!(a >= 0.0 && a <= b);
    }

    #[test]
    fn samples_have_positive_probability(seed in any::<u64>(), alphabet in 2usize..=4, len in 0usize..20) {
        let mut rng = common::rng(seed);
        let model = common::random_model(&mut rng, alphabet);
        let x: Sequence = sample(&model, len, &mut rng);
        prop_assert_eq!(x.len(), len);
        prop_assert!(log_joint(&model, &x).unwrap() > f64::NEG_INFINITY);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn masked_steps_are_charged_nothing(seed in any::<u64>(), every in 1usize..4) {
        let mut rng = common::rng(seed);
        let class = common::random_class(&mut rng, 2, 3);
        let loss = common::random_loss(&mut rng, 2);
        let eval = Evaluation::Exact { budget: DEFAULT_BUDGET };
        let schemes = [Scheme::Informed, Scheme::Universal];
        let full = expected_losses(&class, 0, &schemes, std::slice::from_ref(&loss), &StepMask::All, 6, eval).unwrap();
        let mask = StepMask::Every(every);
        let part = expected_losses(&class, 0, &schemes, std::slice::from_ref(&loss), &mask, 6, eval).unwrap();
        for (f, p) in full[0].iter().zip(&part[0]) {
            for k in 1..=6 {
                let expect = if mask.active(k) { f.per_step[k - 1] } else { 0.0 };
                prop_assert_eq!(p.per_step[k - 1], expect);
            }
        }
    }

    #[test]
    fn exact_level_mass_is_one(seed in any::<u64>(), size in 1usize..=4) {
        let mut rng = common::rng(seed);
        let class = common::random_class(&mut rng, 3, size);
        let truth = rng.random_range(0..size);
        let mut mass = vec![0.0; 6];
        unipred::engine::walk_exact(&class, truth, 6, DEFAULT_BUDGET, |node| {
            mass[node.k - 1] += node.weight;
        }).unwrap();
        for m in mass {
            prop_assert!((m - 1.0).abs() < 1e-12);
        }
    }
}
