//! Property tests for the model, spectral, exponent and detector invariants.

use dbmatch_core::assignment::{assignment_value, brute_force_assignment, max_weight_assignment};
use dbmatch_core::detectors::{
    discrete_path_value, glrt, glrt_brute_force, llr_matrix, sum_test, VerdictAux,
};
use dbmatch_core::experiments::exact_tv_small;
use dbmatch_core::exponents::{chernoff_e, kl_divergences, psi_p, psi_q};
use dbmatch_core::models::{sample_alt, sample_null};
use dbmatch_core::numeric::exact_sum;
use dbmatch_core::spectral::{
    eigenvalues, poisson_surrogate_limit, poisson_surrogate_moment, risk_lower_bound_from_moment,
    second_moment_exact,
};
use dbmatch_core::{
    Capacity, DatabasePair, DiscreteJointModel, GaussianModel, JointModel, Matrix, Side,
};
use proptest::prelude::*;

/// Strictly positive symmetric joint on `m` symbols.
fn discrete_model(max_m: usize) -> impl Strategy<Value = DiscreteJointModel> {
    (2..=max_m).prop_flat_map(|m| {
        prop::collection::vec(0.05f64..1.0, m * (m + 1) / 2).prop_map(move |w| {
            let mut joint = vec![0.0; m * m];
            let mut k = 0;
            for a in 0..m {
                for b in a..m {
                    joint[a * m + b] = w[k];
                    joint[b * m + a] = w[k];
                    k += 1;
                }
            }
            let total: f64 = joint.iter().sum();
            joint.iter_mut().for_each(|v| *v /= total);
            DiscreteJointModel::new(m, joint).expect("positive symmetric joint is valid")
        })
    })
}

fn rho() -> impl Strategy<Value = f64> {
    prop_oneof![-0.9f64..-0.05, 0.05f64..0.9]
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn discrete_models_satisfy_their_invariants(model in discrete_model(5)) {
        let m = model.alphabet_size();
        let q = model.marginal();
        for (a, &qa) in q.iter().enumerate() {
            let row: f64 = (0..m).map(|b| model.joint(a, b)).sum();
            prop_assert!((row - qa).abs() < 1e-12);
            for b in 0..m {
                prop_assert_eq!(model.joint(a, b), model.joint(b, a));
            }
        }
        prop_assert!(model.is_mutually_continuous());
        let mut norm = 0.0;
        for a in 0..m {
            for b in 0..m {
                norm += q[a] * q[b] * model.llr(a, b).unwrap().exp();
            }
        }
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn top_eigenvalue_is_one_and_trace_identity_holds(model in discrete_model(5)) {
        let profile = eigenvalues(&model).unwrap();
        let ev = profile.eigenvalues();
        prop_assert!((ev[0] - 1.0).abs() < 1e-10);
        prop_assert!(ev.iter().all(|l| l.abs() <= 1.0 + 1e-10));
        let sum_sq: f64 = ev.iter().map(|l| l * l).sum();
        let jm = JointModel::from(model);
        prop_assert!((psi_q(&jm, 2.0).unwrap().exp() - sum_sq).abs() < 1e-8);
    }

    #[test]
    fn second_moment_is_at_least_one(model in discrete_model(4), n in 1usize..=8, d in 1usize..=4) {
        let profile = eigenvalues(&model).unwrap();
        prop_assert!(second_moment_exact(&profile, n, d).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn poisson_surrogate_is_monotone_and_bounded(model in discrete_model(4)) {
        let profile = eigenvalues(&model).unwrap();
        let limit = poisson_surrogate_limit(&profile).unwrap();
        let mut prev = 1.0;
        for m in 1..=40 {
            let v = poisson_surrogate_moment(&profile, m, 1).unwrap();
            prop_assert!(v >= prev - 1e-12);
            prop_assert!(v <= limit * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn psi_identities_discrete(model in discrete_model(4), lam in -2.0f64..1.0) {
        let jm = JointModel::from(model);
        prop_assert!(psi_q(&jm, 0.0).unwrap().abs() < 1e-9);
        prop_assert!(psi_q(&jm, 1.0).unwrap().abs() < 1e-9);
        prop_assert!((psi_p(&jm, lam).unwrap() - psi_q(&jm, lam + 1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn psi_identities_gaussian(r in rho(), u in 0.0f64..1.0) {
        let jm = JointModel::from(GaussianModel::new(r).unwrap());
        prop_assert!(psi_q(&jm, 0.0).unwrap().abs() < 1e-9);
        prop_assert!(psi_q(&jm, 1.0).unwrap().abs() < 1e-9);
        // λ + 1 must stay inside |1 − (λ+1)|·|ρ| < 1.
        let half = (1.0 / r.abs()).min(2.0) * 0.999;
        let lam = -half + u * (half + 1.0f64.min(half));
        prop_assert!((psi_p(&jm, lam).unwrap() - psi_q(&jm, lam + 1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn chernoff_identities_and_convexity(model in discrete_model(3), u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let jm = JointModel::from(model);
        let kl = kl_divergences(&jm).unwrap();
        prop_assume!(kl.kl_pq > 1e-6);
        let at = |s: f64| -kl.kl_qp + s * (kl.kl_qp + kl.kl_pq);
        let (t1, t2) = (at(u), at(v));
        let eq = |t: f64| chernoff_e(&jm, t, Side::Q).unwrap().value;
        let ep = |t: f64| chernoff_e(&jm, t, Side::P).unwrap().value;
        prop_assert!((ep(t1) - (eq(t1) - t1)).abs() < 1e-6);
        prop_assert!(eq(t1) >= 0.0 && ep(t1) >= 0.0);
        let mid = 0.5 * (t1 + t2);
        prop_assert!(eq(mid) <= 0.5 * (eq(t1) + eq(t2)) + 1e-7);
    }

    #[test]
    fn chernoff_identities_gaussian(r in rho(), u in 0.01f64..0.99) {
        let jm = JointModel::from(GaussianModel::new(r).unwrap());
        let kl = kl_divergences(&jm).unwrap();
        let t = -kl.kl_qp + u * (kl.kl_qp + kl.kl_pq);
        let eq = chernoff_e(&jm, t, Side::Q).unwrap().value;
        let ep = chernoff_e(&jm, t, Side::P).unwrap().value;
        prop_assert!((ep - (eq - t)).abs() < 1e-6);
    }

    #[test]
    fn assignment_matches_enumeration(n in 1usize..=6, entries in prop::collection::vec(-5.0f64..5.0, 36)) {
        let c = Matrix::from_row_major(n, n, entries[..n * n].to_vec()).unwrap();
        let fast = max_weight_assignment(&c);
        let slow = brute_force_assignment(&c);
        prop_assert_eq!(fast.value, slow.value);
        prop_assert_eq!(assignment_value(&c, &fast.perm), slow.value);
    }

    #[test]
    fn assignment_with_ties_matches_enumeration(n in 1usize..=6, entries in prop::collection::vec(0i32..3, 36)) {
        let data: Vec<f64> = entries[..n * n].iter().map(|&v| f64::from(v)).collect();
        let c = Matrix::from_row_major(n, n, data).unwrap();
        let fast = max_weight_assignment(&c);
        prop_assert_eq!(fast.value, brute_force_assignment(&c).value);
        prop_assert_eq!(assignment_value(&c, &fast.perm), fast.value);
    }

    #[test]
    fn verdicts_follow_the_threshold(seed in 0u64..1000, tau in -2.0f64..2.0, r in rho()) {
        let model = JointModel::from(GaussianModel::new(r).unwrap());
        let pair = sample_alt(&model, 5, 3, seed, None).unwrap();
        let g = glrt(&model, &pair, tau).unwrap();
        prop_assert_eq!(g.decision, g.statistic >= g.threshold);
        let s = sum_test(&model, &pair, Some(tau)).unwrap();
        prop_assert_eq!(s.decision, s.statistic >= s.threshold);
    }

    #[test]
    fn sum_statistic_is_invariant_to_row_order(
        model in discrete_model(3),
        seed in 0u64..1000,
        order in permutation(8),
    ) {
        let jm = JointModel::from(model);
        let pair = sample_alt(&jm, 8, 4, seed, None).unwrap();
        let shuffled = DatabasePair::new(pair.x.clone(), pair.y.permute_rows(&order), None).unwrap();
        prop_assert_eq!(
            sum_test(&jm, &pair, None).unwrap().statistic,
            sum_test(&jm, &shuffled, None).unwrap().statistic
        );
    }

    #[test]
    fn gaussian_sum_statistic_is_invariant_to_row_order(r in rho(), seed in 0u64..1000, order in permutation(8)) {
        let jm = JointModel::from(GaussianModel::new(r).unwrap());
        let pair = sample_null(&jm, 8, 3, seed).unwrap();
        let shuffled = DatabasePair::new(pair.x.clone(), pair.y.permute_rows(&order), None).unwrap();
        prop_assert_eq!(
            sum_test(&jm, &pair, None).unwrap().statistic,
            sum_test(&jm, &shuffled, None).unwrap().statistic
        );
    }

    #[test]
    fn glrt_value_is_invariant_to_row_order(r in rho(), seed in 0u64..1000, order in permutation(7)) {
        let jm = JointModel::from(GaussianModel::new(r).unwrap());
        let pair = sample_alt(&jm, 7, 3, seed, None).unwrap();
        let shuffled = DatabasePair::new(pair.x.clone(), pair.y.permute_rows(&order), None).unwrap();
        let a = glrt(&jm, &pair, 0.0).unwrap();
        let b = glrt(&jm, &shuffled, 0.0).unwrap();
        prop_assert_eq!(a.statistic, b.statistic);
        if let (VerdictAux::Glrt { assignment: pa, .. }, VerdictAux::Glrt { assignment: pb, .. }) = (&a.aux, &b.aux) {
            // Shuffled row j is original row order[j].
            let mapped: Vec<usize> = pb.iter().map(|&j| order[j]).collect();
            prop_assert_eq!(pa, &mapped);
        }
    }

    #[test]
    fn glrt_reports_a_maximizing_permutation(model in discrete_model(3), seed in 0u64..1000, n in 1usize..=6) {
        let jm = JointModel::from(model);
        let pair = sample_alt(&jm, n, 2, seed, None).unwrap();
        let c = llr_matrix(&jm, &pair).unwrap();
        let fast = glrt(&jm, &pair, 0.0).unwrap();
        let slow = glrt_brute_force(&jm, &pair, 0.0, &Capacity::default()).unwrap();
        prop_assert_eq!(fast.statistic, slow.statistic);
        let (VerdictAux::Glrt { assignment, value }, VerdictAux::Glrt { assignment: best, .. }) = (&fast.aux, &slow.aux)
        else {
            return Err(TestCaseError::fail("GLRT verdict without assignment"));
        };
        // The reported permutation is in the argmax set of the raw matrix too.
        let raw_best = assignment_value(&c, best);
        prop_assert!((assignment_value(&c, assignment) - raw_best).abs() <= 1e-12 * (1.0 + raw_best.abs()));
        prop_assert_eq!(*value, discrete_path_value(&jm, &pair, best).unwrap());
    }

    #[test]
    fn samplers_are_pure_functions_of_their_inputs(r in rho(), seed in any::<u64>(), n in 1usize..6, d in 1usize..4) {
        let jm = JointModel::from(GaussianModel::new(r).unwrap());
        prop_assert_eq!(sample_null(&jm, n, d, seed).unwrap(), sample_null(&jm, n, d, seed).unwrap());
        prop_assert_eq!(sample_alt(&jm, n, d, seed, None).unwrap(), sample_alt(&jm, n, d, seed, None).unwrap());
    }

    #[test]
    fn exact_sum_ignores_order(values in prop::collection::vec(-1e6f64..1e6, 1..40), order_seed in any::<u64>()) {
        let mut shuffled = values.clone();
        let len = shuffled.len();
        let mut s = order_seed;
        for i in (1..len).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(exact_sum(values.iter().copied()), exact_sum(shuffled.iter().copied()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bayes_risk_dominates_second_moment_bound(model in discrete_model(2), n in 1usize..=4, d in 1usize..=2) {
        let tv = exact_tv_small(&model, n, d, &Capacity::default()).unwrap();
        let profile = eigenvalues(&model).unwrap();
        let lb = risk_lower_bound_from_moment(second_moment_exact(&profile, n, d).unwrap()).unwrap();
        prop_assert!(tv.bayes_risk >= lb - 1e-9, "{} < {}", tv.bayes_risk, lb);
    }
}
