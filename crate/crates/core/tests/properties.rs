use decaylab::field::{lattice_envelopes, stepanov_norm, v_norm, Domain, GridFn};
use decaylab::funcalg::{apply_tg, stieltjes_integral, BVFunction, PiecewisePoly, Poly};
use decaylab::lattice::Lattice;
use decaylab::model::{check_gn_condition, check_nd_condition, FSet, ModelSpec};
use decaylab::solver::{compare, evolve, SolverConfig};
use proptest::prelude::*;

fn cubic() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-1.0..1.0f64, 4).prop_map(Poly::new)
}

fn cubic_on_unit() -> impl Strategy<Value = PiecewisePoly> {
    cubic().prop_map(|p| PiecewisePoly::from_poly(p, -1.0, 1.0).unwrap())
}

fn components() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, 0.0..0.6f64), 0..5)
        .prop_map(|v| v.into_iter().map(|(a, l)| (a, a + l)).collect())
}

fn grid_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nd_implies_gn(c in components(), m in -1.2..1.2f64, pick in any::<prop::sample::Index>()) {
        let f = FSet::new(c).unwrap();
        prop_assert!(!check_nd_condition(&f, m) || check_gn_condition(&f, m));
        if !f.is_empty() {
            let e = f.components()[pick.index(f.components().len())].1;
            prop_assert!(!check_nd_condition(&f, e) || check_gn_condition(&f, e));
        }
    }

    #[test]
    fn tg_is_linear(f in cubic_on_unit(), h in cubic_on_unit(), k in -0.9..0.9f64,
                    a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = BVFunction::sign_shift(k, -1.0, 1.0).unwrap();
        let combo = f.scale(a).add(&h.scale(b)).unwrap();
        let lhs = apply_tg(&g, &combo).unwrap();
        let tf = apply_tg(&g, &f).unwrap();
        let th = apply_tg(&g, &h).unwrap();
        for i in 0..=40 {
            let u = -1.0 + i as f64 * 0.05;
            let rhs = a * tf.eval(u).unwrap() + b * th.eval(u).unwrap();
            prop_assert!((lhs.eval(u).unwrap() - rhs).abs() <= 1e-11);
        }
    }

    #[test]
    fn stieltjes_is_additive_in_the_integrand(f in cubic_on_unit(), h in cubic_on_unit(),
                                              k in -0.9..0.9f64, u in -1.0..1.0f64) {
        let g = BVFunction::new(
            PiecewisePoly::from_poly(Poly::new(vec![0.0, 0.5, -0.3]), -1.0, 1.0).unwrap(),
            vec![(k, 0.7)],
        ).unwrap();
        let sum = f.add(&h).unwrap();
        let lhs = stieltjes_integral(&sum, &g, u).unwrap();
        let rhs = stieltjes_integral(&f, &g, u).unwrap() + stieltjes_integral(&h, &g, u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn norms_are_shift_invariant_and_subadditive(a in grid_values(128), b in grid_values(128),
                                                  shift in -64isize..64) {
        let d = Domain::periodic(0.0, 4.0);
        let u = GridFn::new(d, a).unwrap();
        let w = GridFn::new(d, b).unwrap();
        let s0 = stepanov_norm(&u, 1.0).unwrap();
        let s1 = stepanov_norm(&u.shift_cells(shift).unwrap(), 1.0).unwrap();
        prop_assert!((s0 - s1).abs() <= 1e-12);
        prop_assert_eq!(s0, v_norm(&u, 2.0).unwrap());
        let sum = stepanov_norm(&u.add(&w).unwrap(), 1.0).unwrap();
        prop_assert!(sum <= s0 + stepanov_norm(&w, 1.0).unwrap() + 1e-12);
    }

    #[test]
    fn burgers_contracts_in_l1(a in grid_values(64), b in grid_values(64)) {
        let model = ModelSpec::preset("burgers", (-1.0, 1.0)).unwrap();
        let d = Domain::periodic(0.0, 1.0);
        let cfg = SolverConfig::new(64, 0.5).with_uniform_outputs(5);
        let ua = GridFn::new(d, a).unwrap();
        let ub = GridFn::new(d, b).unwrap();
        let c = compare(&evolve(&ua, &model, &cfg).unwrap(), &evolve(&ub, &model, &cfg).unwrap()).unwrap();
        prop_assert!(c.l1_nonincreasing);
    }

    #[test]
    fn double_dual_is_the_lattice(entries in prop::collection::vec(-2.0..2.0f64, 9), d in 1usize..=3) {
        let vectors: Vec<Vec<f64>> = (0..d)
            .map(|j| (0..d).map(|i| entries[3 * j + i] + if i == j { 3.0 } else { 0.0 }).collect())
            .collect();
        let l = Lattice::from_vectors(&vectors).unwrap();
        let dd = l.dual().unwrap().dual().unwrap();
        for v in l.vectors() {
            prop_assert!(dd.contains(&v, 1e-9));
        }
        for v in dd.vectors() {
            prop_assert!(l.contains(&v, 1e-9));
        }
    }

    #[test]
    fn envelopes_bracket_v(vals in grid_values(60), offset in 1usize..100, r in 1usize..4) {
        // v supported in a few cells inside a box of 8 periods of length 1
        let n = 400;
        let mut values = vec![0.0; n];
        for (i, v) in vals.into_iter().enumerate() {
            values[offset + i] = v;
        }
        let v = GridFn::new(Domain::boxed(-4.0, 4.0), values).unwrap();
        let env = lattice_envelopes(&v, 1.0, 2 * r).unwrap();
        let plus = env.tile_onto(&env.plus, &v).unwrap();
        let minus = env.tile_onto(&env.minus, &v).unwrap();
        for i in 0..n {
            prop_assert!(minus.values()[i] <= v.values()[i] && v.values()[i] <= plus.values()[i]);
        }
    }
}
