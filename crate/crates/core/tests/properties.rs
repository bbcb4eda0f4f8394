use cone_cf::contfrac::{
    cf_general_convergents, f_closed, f_direct, h_vector, q_apply, q_operator, to_ordinary,
    CfSequence, UnitFraction,
};
use cone_cf::division::{cholesky, PiMode};
use cone_cf::jordan::{
    cone_less, frob_norm, inner, jordan_product, min_eigenvalue, quad_rep_apply,
    spectral_decomposition, ConeElement, SymMatrix,
};
use proptest::prelude::*;

fn sym(r: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0..2.0f64, r * r).prop_map(move |v| {
        let mut data = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                data[i * r + j] = 0.5 * (v[i * r + j] + v[j * r + i]);
            }
        }
        SymMatrix::new(r, data).unwrap()
    })
}

/// `AAᵀ + c·e` with `A` entries in `[−1, 1]`, `c ∈ [0.2, 2]`.
fn cone(r: usize) -> impl Strategy<Value = ConeElement> {
    (prop::collection::vec(-1.0..1.0f64, r * r), 0.2..2.0f64).prop_map(move |(a, c)| {
        let mut data = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                data[i * r + j] = (0..r).map(|k| a[i * r + k] * a[j * r + k]).sum::<f64>();
            }
            data[i * r + i] += c;
        }
        ConeElement::certify(SymMatrix::new(r, data).unwrap()).unwrap()
    })
}

fn cones(r: usize, n: usize) -> impl Strategy<Value = Vec<ConeElement>> {
    prop::collection::vec(cone(r), n)
}

fn rank() -> impl Strategy<Value = usize> {
    1..=3usize
}

fn rel(a: &SymMatrix, b: &SymMatrix) -> f64 {
    frob_norm(&(a - b)) / frob_norm(b).max(1e-300)
}

/// `λ_min ≥ −tol·(1 + ‖m‖)`.
fn closed_cone(m: &SymMatrix, tol: f64) -> bool {
    min_eigenvalue(m).unwrap() >= -tol * (1.0 + frob_norm(m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_axioms((x, y, z) in (1..=4usize).prop_flat_map(|r| (sym(r), sym(r), sym(r)))) {
        let xy = jordan_product(&x, &y).unwrap();
        prop_assert!(rel(&xy, &jordan_product(&y, &x).unwrap()) < 1e-14 || frob_norm(&xy) < 1e-14);
        // x.(x².y) = x².(x.y)
        let x2 = jordan_product(&x, &x).unwrap();
        let lhs = jordan_product(&x, &jordan_product(&x2, &y).unwrap()).unwrap();
        let rhs = jordan_product(&x2, &xy).unwrap();
        prop_assert!(frob_norm(&(&lhs - &rhs)) <= 1e-12 * (1.0 + frob_norm(&rhs)));
        // ⟨x.y, z⟩ = ⟨y, x.z⟩
        let a = inner(&xy, &z).unwrap();
        let b = inner(&y, &jordan_product(&x, &z).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        // P(x)y = 2x.(x.y) − x².y
        let p = quad_rep_apply(&x, &y).unwrap();
        let alt = &(2.0 * &jordan_product(&x, &xy).unwrap()) - &jordan_product(&x2, &y).unwrap();
        prop_assert!(frob_norm(&(&p - &alt)) <= 1e-12 * (1.0 + frob_norm(&p)));
    }

    #[test]
    fn spectrum_reconstructs(x in (1..=4usize).prop_flat_map(sym)) {
        let s = spectral_decomposition(&x).unwrap();
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(frob_norm(&(&s.reconstruct() - &x)) <= 1e-11 * (1.0 + frob_norm(&x)));
        let sum: f64 = s.eigenvalues.iter().sum();
        prop_assert!((sum - x.trace()).abs() <= 1e-11 * (1.0 + x.trace().abs()));
    }

    #[test]
    fn pi_modes_factor_and_pair((y, x, z) in (1..=4usize).prop_flat_map(|r| (cone(r), sym(r), sym(r)))) {
        let l = cholesky(&y).unwrap();
        prop_assert!(rel(&l.apply_to_identity(), &y) < 1e-12);
        let pp = l.apply(&l.apply(&x, PiMode::Star).unwrap(), PiMode::Plain).unwrap();
        let yxy = quad_rep_apply(&y, &x).unwrap();
        prop_assert!(frob_norm(&(&pp - &yxy)) <= 1e-10 * (1.0 + frob_norm(&yxy)));
        for mode in PiMode::ALL {
            // ⟨g x, z⟩ = ⟨x, g* z⟩
            let a = inner(&l.apply(&x, mode).unwrap(), &z).unwrap();
            let b = inner(&x, &l.apply(&z, mode.adjoint()).unwrap()).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{mode:?}");
        }
    }

    #[test]
    fn pi_preserves_cone_and_transports_inverses((y, v) in rank().prop_flat_map(|r| (cone(r), cone(r)))) {
        let l = cholesky(&y).unwrap();
        let v_inv = v.inverse().unwrap();
        for mode in PiMode::ALL {
            let image = l.apply_cone(&v, mode).unwrap();
            // g(v)⁻¹ = (g⁻¹)*(v⁻¹)
            let moved = l.apply(&v_inv, mode.inverse_adjoint()).unwrap();
            prop_assert!(rel(&moved, image.inverse().unwrap().as_sym()) < 1e-9, "{mode:?}");
        }
        prop_assert!(rel(&l.apply(&y, PiMode::Inv).unwrap(), &SymMatrix::identity(y.r())) < 1e-10);
        let back = l.apply(&y.inverse().unwrap(), PiMode::Star).unwrap();
        prop_assert!(rel(&back, &SymMatrix::identity(y.r())) < 1e-10);
    }

    #[test]
    fn inverse_is_order_reversing((x, d) in rank().prop_flat_map(|r| (cone(r), cone(r)))) {
        let y = x.as_sym() + d.as_sym();
        prop_assert!(cone_less(&x, &y).unwrap());
        let diff = x.inverse().unwrap().as_sym() - &ConeElement::certify(y).unwrap().inverse().unwrap();
        prop_assert!(closed_cone(&diff, 1e-8));
    }

    #[test]
    fn scalar_dominance((z, v) in (cone(1), cone(1))) {
        let e_z = z.add_identity();
        let l = cholesky(&e_z).unwrap();
        for image in [
            l.apply(&v, PiMode::Plain).unwrap(),
            l.apply(&v, PiMode::Star).unwrap(),
            quad_rep_apply(&e_z, &v).unwrap(),
        ] {
            prop_assert!(image.get(0, 0) > v.get(0, 0));
        }
    }

    #[test]
    fn general_fraction_matches_ordinary_form(
        (xs, ys, head, n) in rank().prop_flat_map(|r| (
            cones(r, 12),
            prop::option::of(cones(r, 12)),
            prop::option::of(cone(r)),
            1..=12usize,
        ))
    ) {
        let seq = CfSequence::new(head, xs, ys).unwrap();
        let direct = cf_general_convergents(&seq, n).unwrap();
        let ordinary = to_ordinary(&seq).unwrap();
        for (k, d) in direct.iter().enumerate() {
            prop_assert!(rel(&ordinary.convergent(k + 1).unwrap(), d) < 1e-9);
        }
    }

    #[test]
    fn shift_identity(xs in rank().prop_flat_map(|r| cones(r, 8))) {
        let seq = UnitFraction::new(xs).unwrap();
        let shifted = seq.with_leading_identity();
        for k in 1..=8 {
            let lhs = shifted.bracket(k + 1).unwrap().inverse().unwrap();
            prop_assert!(rel(&lhs, &seq.bracket(k).unwrap().add_identity()) < 1e-10);
        }
    }

    #[test]
    fn w_alternates_and_decreases(xs in rank().prop_flat_map(|r| cones(r, 10))) {
        let seq = UnitFraction::new(xs).unwrap();
        let ws = seq.w_raw(&seq.brackets(10).unwrap());
        for w in &ws {
            prop_assert!(closed_cone(w, 1e-8));
        }
        for pair in ws.windows(2) {
            prop_assert!(closed_cone(&(&pair[0] - &pair[1]), 1e-8));
        }
    }

    #[test]
    fn closed_forms_match_definitions(xs in rank().prop_flat_map(|r| cones(r, 10))) {
        for k in 1..=8 {
            let direct = f_direct(&xs, k).unwrap();
            prop_assert!(rel(&f_closed(&xs, k).unwrap(), &direct) < 1e-8, "k={k}");
        }
        for k in 3..=8 {
            prop_assert!(h_vector(&xs, k).is_ok());
        }
        let seq = UnitFraction::new(xs.clone()).unwrap();
        let ws = seq.w_seq(10).unwrap();
        for k in 2..=8 {
            let lhs = ws[k].inverse().unwrap().as_sym() - ws[k - 1].inverse().unwrap().as_sym();
            let rhs = q_apply(&xs, k, &xs[k + 1].inverse().unwrap(), false).unwrap();
            prop_assert!(rel(&rhs, &lhs) < 1e-8, "k={k}");
        }
    }

    #[test]
    fn q_adjoint_pairing(
        (xs, v, y) in rank().prop_flat_map(|r| (cones(r, 6), sym(r), sym(r)))
    ) {
        let q = q_operator(&UnitFraction::new(xs).unwrap(), 4).unwrap();
        let a = inner(&q.apply(&v).unwrap(), &y).unwrap();
        let b = inner(&v, &q.adjoint().apply(&y).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn q_adjoint_norm_bound((xs, y) in rank().prop_flat_map(|r| (cones(r, 9), cone(r)))) {
        let c = frob_norm(&cholesky(&xs[0]).unwrap().apply(&y, PiMode::Inv).unwrap());
        for k in 2..8 {
            let image = q_apply(&xs[..=k], k, &y, true).unwrap();
            prop_assert!(frob_norm(&image) > c, "k={k}");
        }
    }

    #[test]
    fn scalar_q_adjoint_lower_bound(xs in cones(1, 9)) {
        let y = ConeElement::identity(1);
        let base = cholesky(&xs[0]).unwrap().apply(&y, PiMode::Inv).unwrap();
        for k in 2..8 {
            let image = q_apply(&xs[..=k], k, &y, true).unwrap();
            prop_assert!(image.get(0, 0) >= base.get(0, 0) * (1.0 - 1e-12));
        }
    }
}
