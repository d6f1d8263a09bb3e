//! Property tests. Strategies draw a seed and a dimension; instances are
//! built from the seeded generator so shrinking lands on a small seed.

use std::f64::consts::PI;

use maslov::job::{parse_report, run_job, to_json, IndexKind, JobSpec, Overrides, PlaneSpec};
use maslov::lagrangian::direct_sum_frames;
use maslov::linalg::{cmax_abs, max_abs};
use maslov::random as rnd;
use maslov::signature::tau;
use maslov::{
    apply_symplectic, coboundary, deck_apply, direct_sum_lift, direct_sum_symplectic, embed_unitary, frame_from_graph,
    frame_from_w, graph_path, intersection_dim, is_symplectic, lift_of, mu_bar, mu_lagrangian, omega, souriau_w,
    spectral_flow, Cochain, DeckAction, LagrangianFrame, SymplecticVector, Tolerances,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    rnd::seeded(seed)
}

/// Planes sharing one unitary frame, so that coincidences and partial
/// intersections come up often.
fn planes(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<LagrangianFrame> {
    let u = embed_unitary(&rnd::unitary_embedding(rng, n));
    let b = rnd::symmetric(rng, n, 1.0);
    (0..count)
        .map(|_| {
            let base = if rng.random_bool(0.2) {
                LagrangianFrame::coordinate_x(n)
            } else {
                let k = rng.random_range(0..=n);
                frame_from_graph(&(&b + rnd::symmetric_with_kernel(rng, n, k)), &tol()).unwrap()
            };
            apply_symplectic(&u, &base, &tol()).unwrap()
        })
        .collect()
}

/// Fixed runner seed: the instance generators are already random, and a
/// fixed sequence keeps rare ill-conditioned draws from making runs flaky.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x6d61_736c),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn seed_and_n(max_n: usize) -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1..=max_n)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn omega_is_antisymmetric(x in prop::collection::vec(-10.0..10.0f64, 6), y in prop::collection::vec(-10.0..10.0f64, 6)) {
        let z = SymplecticVector::from_slices(&x[..3], &x[3..]).unwrap();
        let w = SymplecticVector::from_slices(&y[..3], &y[3..]).unwrap();
        prop_assert!((omega(&z, &w).unwrap() + omega(&w, &z).unwrap()).abs() <= 1e-12 * (1.0 + omega(&z, &w).unwrap().abs()));
    }

    #[test]
    fn unitary_embeddings_are_symplectic((seed, n) in seed_and_n(5)) {
        let s = embed_unitary(&rnd::unitary_embedding(&mut rng(seed), n));
        prop_assert!(is_symplectic(s.entries(), 1e-10).unwrap());
    }

    #[test]
    fn direct_sums_compose((seed, n) in seed_and_n(3), m in 1usize..=3) {
        let mut r = rng(seed);
        let (a1, a2) = (rnd::symplectic(&mut r, n), rnd::symplectic(&mut r, n));
        let (b1, b2) = (rnd::symplectic(&mut r, m), rnd::symplectic(&mut r, m));
        let loose = Tolerances { tol_sym: 1e-8, ..tol() };
        let lhs = &direct_sum_symplectic(&a1, &b1, &loose).unwrap() * &direct_sum_symplectic(&a2, &b2, &loose).unwrap();
        let rhs = direct_sum_symplectic(&(&a1 * &a2), &(&b1 * &b2), &loose).unwrap();
        let scale = 1.0 + max_abs(rhs.entries());
        prop_assert!(max_abs(&(lhs.entries() - rhs.entries())) <= 1e-12 * scale);
    }

    #[test]
    fn frame_from_w_inverts_souriau_w((seed, n) in seed_and_n(5)) {
        let w = souriau_w(&rnd::lagrangian(&mut rng(seed), n));
        let back = souriau_w(&frame_from_w(&w, &tol()).unwrap());
        prop_assert!(cmax_abs(&(back.matrix() - w.matrix())) <= 1e-10);
    }

    #[test]
    fn intersection_dim_is_symmetric_and_invariant((seed, n) in seed_and_n(5)) {
        let mut r = rng(seed);
        let k = r.random_range(0..=n);
        let (a, b) = rnd::pair_with_intersection(&mut r, n, k);
        let s = rnd::symplectic(&mut r, n);
        let d = intersection_dim(&a, &b, &tol()).unwrap();
        prop_assert_eq!(d.k(), k);
        prop_assert_eq!(intersection_dim(&b, &a, &tol()).unwrap(), d);
        let (sa, sb) = (apply_symplectic(&s, &a, &tol()).unwrap(), apply_symplectic(&s, &b, &tol()).unwrap());
        prop_assert_eq!(intersection_dim(&sa, &sb, &tol()).unwrap(), d);
    }

    #[test]
    fn tau_is_an_antisymmetric_invariant_cocycle((seed, n) in seed_and_n(4)) {
        let mut r = rng(seed);
        let p = planes(&mut r, n, 4);
        let t = |a: usize, b: usize, c: usize| tau(&p[a], &p[b], &p[c], &tol()).unwrap();
        let base = t(0, 1, 2);
        prop_assert_eq!(t(1, 0, 2), -base);
        prop_assert_eq!(t(0, 2, 1), -base);
        prop_assert_eq!(t(1, 2, 0), base);
        let cochain = Cochain::new(2, |q: &[&LagrangianFrame]| tau(q[0], q[1], q[2], &tol()));
        prop_assert_eq!(coboundary(&cochain, &[&p[0], &p[1], &p[2], &p[3]]).unwrap(), 0);
        let s = rnd::symplectic(&mut r, n);
        let q: Vec<_> = p.iter().map(|l| apply_symplectic(&s, l, &tol()).unwrap()).collect();
        prop_assert_eq!(tau(&q[0], &q[1], &q[2], &tol()).unwrap(), base);
    }

    #[test]
    fn tau_is_additive((seed, n) in seed_and_n(2), m in 1usize..=2) {
        let mut r = rng(seed);
        let (p, q) = (planes(&mut r, n, 3), planes(&mut r, m, 3));
        let s: Vec<_> = (0..3).map(|i| direct_sum_frames(&p[i], &q[i])).collect();
        let whole = tau(&s[0], &s[1], &s[2], &tol()).unwrap();
        let parts = tau(&p[0], &p[1], &p[2], &tol()).unwrap() + tau(&q[0], &q[1], &q[2], &tol()).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn leray_index_identities((seed, n) in seed_and_n(4), k1 in -3i64..=3, k2 in -3i64..=3) {
        let mut r = rng(seed);
        let p = planes(&mut r, n, 3);
        let l: Vec<_> = p.iter().map(|x| lift_of(x, r.random_range(-2..=2))).collect();
        let mb = |a: usize, b: usize| mu_bar(&l[a], &l[b], &tol()).unwrap();
        prop_assert_eq!(mb(0, 1), -mb(1, 0));
        prop_assert_eq!(mb(0, 1) - mb(0, 2) + mb(1, 2), tau(&p[0], &p[1], &p[2], &tol()).unwrap());
        let moved = mu_bar(&deck_apply(DeckAction { k: k1 }, &l[0]), &deck_apply(DeckAction { k: k2 }, &l[1]), &tol()).unwrap();
        prop_assert_eq!(moved - mb(0, 1), 2 * (k1 - k2));
    }

    #[test]
    fn leray_index_is_additive((seed, n) in seed_and_n(2), m in 1usize..=2) {
        let mut r = rng(seed);
        let (p, q) = (planes(&mut r, n, 2), planes(&mut r, m, 2));
        let lp: Vec<_> = p.iter().map(|x| lift_of(x, r.random_range(-2..=2))).collect();
        let lq: Vec<_> = q.iter().map(|x| lift_of(x, r.random_range(-2..=2))).collect();
        let whole = mu_bar(&direct_sum_lift(&lp[0], &lq[0]), &direct_sum_lift(&lp[1], &lq[1]), &tol()).unwrap();
        let parts = mu_bar(&lp[0], &lp[1], &tol()).unwrap() + mu_bar(&lq[0], &lq[1], &tol()).unwrap();
        prop_assert_eq!(whole, parts);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn path_index_identities((seed, n) in seed_and_n(3)) {
        let mut r = rng(seed);
        let p = planes(&mut r, n, 5);
        let extra = r.random_range(-1..=1);
        let a = rnd::connecting_path(&p[0], &p[1], extra, 48).unwrap();
        let b = rnd::connecting_path(&p[1], &p[2], 0, 48).unwrap();
        let mu = |path, l: &LagrangianFrame| mu_lagrangian(path, l, &tol()).unwrap();

        // concatenation
        let joined = a.concat(&b, 1e-9).unwrap();
        prop_assert_eq!(mu(&joined, &p[3]), mu(&a, &p[3]) + mu(&b, &p[3]));

        // change of reference
        let lhs = mu(&a, &p[3]) - mu(&a, &p[4]);
        let rhs = tau(&p[1], &p[3], &p[4], &tol()).unwrap() - tau(&p[0], &p[3], &p[4], &tol()).unwrap();
        prop_assert_eq!(lhs, rhs);

        // monotone time warp
        let warped = a.reparametrize(|t| t * t * (3.0 - 2.0 * t), 64).unwrap();
        prop_assert_eq!(mu(&warped, &p[3]), mu(&a, &p[3]));
    }

    #[test]
    fn spectral_flow_matches_graph_index((seed, n) in seed_and_n(4)) {
        let family = rnd::symmetric_family(&mut rng(seed), n, 1e-2).unwrap();
        let sf = spectral_flow(&family, &tol()).unwrap();
        let graph = graph_path(&family, &tol()).unwrap();
        prop_assert_eq!(mu_lagrangian(&graph, &LagrangianFrame::coordinate_x(n), &tol()).unwrap(), sf);
        prop_assert_eq!(mu_lagrangian(&graph, &LagrangianFrame::coordinate_xstar(n), &tol()).unwrap(), 0);
    }

    #[test]
    fn reports_round_trip_byte_for_byte((seed, n) in seed_and_n(3)) {
        let mut r = rng(seed);
        let graph = |r: &mut ChaCha8Rng| {
            let a = rnd::symmetric(r, n, 1.0) * PI;
            PlaneSpec::Graph((0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect())
        };
        let spec = JobSpec {
            n,
            index: Some(IndexKind::Kashiwara),
            path: None,
            planes: vec![graph(&mut r), PlaneSpec::CoordinateX, graph(&mut r)],
            lifts: Vec::new(),
            tolerances: None,
            seed: Some(seed),
        };
        let report = run_job(&spec, &Overrides::default());
        let text = to_json(&report);
        prop_assert_eq!(&text, &to_json(&run_job(&spec, &Overrides::default())));
        let back = parse_report(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
    }
}
