use proptest::prelude::*;

use mermin::abelian::{
    character_eval, smith_normal_form, EquationSystem, FiniteAbelianGroup, GroupElement, IntMatrix, RationalPhase,
};
use mermin::fixtures::cyclic;
use mermin::io::report_to_json;
use mermin::protocol::{run_protocol, DeviceBackend, InputMode, ProtocolConfig};
use mermin::quantum::phase_gate;
use mermin::scenario::{check_no_signalling, expected_model};

/// Fraction-free Gaussian elimination; exact for small integer matrices.
fn det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

fn group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::sample::select(vec![
        vec![2],
        vec![3],
        vec![4],
        vec![5],
        vec![6],
        vec![8],
        vec![9],
        vec![2, 2],
        vec![2, 3],
        vec![2, 4],
        vec![3, 3],
    ])
    .prop_map(|f| FiniteAbelianGroup::new(f).unwrap())
}

fn element(group: FiniteAbelianGroup) -> impl Strategy<Value = GroupElement> {
    (0..group.order()).prop_map(move |i| group.element_at(i))
}

fn system() -> impl Strategy<Value = EquationSystem> {
    (group(), 1usize..=3, 1usize..=3)
        .prop_filter("search space", |(g, _, m)| (g.order() as u64).pow(*m as u32) <= 100_000)
        .prop_flat_map(|(g, s, m)| {
            let rows = prop::collection::vec(prop::collection::vec(-6i64..=6, m), s);
            let rhs = prop::collection::vec(element(g.clone()), s);
            (Just(g), rows, rhs)
        })
        .prop_map(|(g, rows, rhs)| EquationSystem::new(g, rows, rhs).unwrap())
}

fn phases(len: usize) -> impl Strategy<Value = Vec<RationalPhase>> {
    prop::collection::vec((0i64..240).prop_map(|n| RationalPhase::new(n, 240)), len)
}

proptest! {
    #[test]
    fn smith_decomposition(rows in matrix()) {
        let a = IntMatrix::from_rows(&rows);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
        prop_assert_eq!(det(&snf.u.to_rows()).abs(), 1);
        prop_assert_eq!(det(&snf.v.to_rows()).abs(), 1);
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    prop_assert_eq!(snf.d.get(i, j), 0);
                }
            }
        }
        let diag = snf.diagonal();
        prop_assert!(diag.iter().all(|&x| x >= 0));
        for w in diag.windows(2) {
            match (w[0], w[1]) {
                (_, 0) => {}
                (0, _) => prop_assert!(false, "zero before a nonzero invariant factor"),
                (a, b) => prop_assert_eq!(b % a, 0),
            }
        }
        prop_assert_eq!(snf.rank(), diag.iter().filter(|&&x| x != 0).count());
    }

    #[test]
    fn group_solver_matches_brute_force(sys in system()) {
        let fast = sys.solve_in_group();
        let brute = sys.solve_in_group_exhaustive(100_000).unwrap();
        prop_assert_eq!(fast.is_some(), brute.is_some());
        if let Some(y) = fast {
            prop_assert!(sys.is_solution(&y));
        }
    }

    #[test]
    fn torus_solutions_solve(sys in system()) {
        match sys.solve_in_torus() {
            Ok(beta) => prop_assert!(beta.satisfies(&sys)),
            Err(_) => {
                prop_assert!(!sys.is_consistent());
                prop_assert!(sys.solve_in_group_exhaustive(100_000).unwrap().is_none());
            }
        }
    }

    #[test]
    fn characters_are_bilinear(
        (g, k, l, x, y) in group().prop_flat_map(|g| {
            (Just(g.clone()), element(g.clone()), element(g.clone()), element(g.clone()), element(g))
        })
    ) {
        let chi = |k: &GroupElement, x: &GroupElement| character_eval(&g, k, x).unwrap();
        let xy = g.add(&x, &y).unwrap();
        let kl = g.add(&k, &l).unwrap();
        prop_assert_eq!(chi(&k, &xy), chi(&k, &x) + chi(&k, &y));
        prop_assert_eq!(chi(&kl, &x), chi(&k, &x) + chi(&l, &x));
        prop_assert_eq!(chi(&k, &x), chi(&x, &k));
    }

    #[test]
    fn phase_gates_compose(
        (g, a, b) in group().prop_flat_map(|g| {
            let n = g.order();
            (Just(g), phases(n), phases(n))
        })
    ) {
        let ga = phase_gate(&g, &a).unwrap();
        let gb = phase_gate(&g, &b).unwrap();
        let sum: Vec<RationalPhase> = a.iter().zip(&b).map(|(x, y)| *x + *y).collect();
        let gs = phase_gate(&g, &sum).unwrap();
        prop_assert!(ga.mul(&gb).max_abs_diff(&gs) <= 1e-10);
        prop_assert!(ga.mul(&gb).max_abs_diff(&gb.mul(&ga)) <= 1e-10);
    }

    #[test]
    fn expected_models_are_no_signalling((d, t, n) in prop::sample::select(vec![
        (2u64, 2i64, 3usize), (3, 2, 2), (3, 2, 4), (4, 2, 3), (5, 2, 3), (5, 3, 4), (7, 3, 4), (9, 3, 4), (4, 3, 5),
    ])) {
        prop_assert!(check_no_signalling(&expected_model(&cyclic(d, t, n))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn protocol_is_deterministic(seed in any::<u64>(), direct in any::<bool>(), delta in 0.0f64..1.0) {
        let arg = cyclic(3, 2, 4);
        let mut config = ProtocolConfig::new(arg.clone(), 2, 0.4, 300, DeviceBackend::MixedNoise { delta }, seed);
        if direct {
            config.input_mode = InputMode::ContextDirect;
        }
        let plaintext: Vec<GroupElement> = (0..100).map(|i| arg.group().element_at(i % 3)).collect();
        let a = run_protocol(&config, &plaintext).unwrap();
        let b = run_protocol(&config, &plaintext).unwrap();
        prop_assert_eq!(report_to_json(&a), report_to_json(&b));
        let r = a.rounds;
        prop_assert_eq!(r.test + r.secret, r.valid);
        prop_assert_eq!(r.valid, 300);
        prop_assert_eq!(a.decoded.len() as u64, r.secret);
    }
}
