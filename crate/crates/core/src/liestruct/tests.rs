use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::che;
use crate::symcore::{int, rat};

fn che_algebra() -> LieAlgebra {
    structure_constants(&che::generators()).expect("generators close")
}

fn ints(v: &[i64]) -> RVec {
    v.iter().map(|&x| int(x)).collect()
}

#[test]
fn commutator_of_translations_vanishes() {
    let g = che::generators();
    assert!(commutator(&g[0], &g[1]).is_zero());
    assert!(commutator(&g[3], &g[4]).is_zero());
}

#[test]
fn commutator_rotation_translation() {
    let g = che::generators();
    // [X1, X4] = -X5
    let br = commutator(&g[0], &g[3]);
    assert_eq!(decompose(&br, &g), Some(ints(&[0, 0, 0, 0, -1, 0, 0])));
}

#[test]
fn computed_table_matches_printed() {
    let a = che_algebra();
    for i in 0..7 {
        for j in 0..7 {
            let mut want = vec![Rational::zero(); 7];
            let t = che::TABLE1[i][j];
            if t != 0 {
                want[t.unsigned_abs() as usize - 1] = int(t.signum() as i64);
            }
            assert_eq!(a.c[i][j], want, "[X{}, X{}]", i + 1, j + 1);
        }
    }
}

#[test]
fn antisymmetry_and_jacobi() {
    let a = che_algebra();
    for i in 0..7 {
        for j in 0..7 {
            let neg: RVec = a.c[j][i].iter().map(|x| -x).collect();
            assert_eq!(a.c[i][j], neg);
        }
    }
    assert_eq!(a.jacobi_violation(), None);
}

#[test]
fn jacobi_detects_bad_constants() {
    // [e1,e2] = e3, [e1,e3] = e1 and [e2,e3] = e2 cannot satisfy Jacobi
    // together with [e1,e2] = e3 because ad(e3) has trace on span(e1,e2)
    let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
    let mut set = |i: usize, j: usize, v: RVec| {
        c[j][i] = v.iter().map(|x| -x).collect();
        c[i][j] = v;
    };
    set(0, 1, ints(&[0, 0, 1]));
    set(0, 2, ints(&[1, 0, 0]));
    set(1, 2, ints(&[0, 1, 0]));
    assert!(LieAlgebra::from_constants(c).jacobi_violation().is_some());
}

#[test]
fn not_closed_reports_pair() {
    let g = che::generators();
    let err = structure_constants(&[g[0].clone(), g[3].clone()]).unwrap_err();
    match err {
        LieError::NotClosed { left, right, .. } => {
            assert_eq!((left.as_str(), right.as_str()), ("X1", "X2"));
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn radial_scaling_not_in_algebra() {
    let mut g = che::generators();
    g.push(che::radial_scaling());
    assert!(structure_constants(&g).is_err());
}

#[test]
fn killing_gram_of_che_algebra() {
    let a = che_algebra();
    let gram = a.killing_gram();
    for i in 0..7 {
        for j in 0..7 {
            let want = if i == j { int(che::KILLING_DIAGONAL[i]) } else { int(0) };
            assert_eq!(gram[i][j], want, "K(X{}, X{})", i + 1, j + 1);
        }
    }
    assert!(!a.is_semisimple());
}

#[test]
fn derived_series_dimensions() {
    let a = che_algebra();
    let dims: Vec<usize> = a.derived_series().iter().map(Vec::len).collect();
    // g' = e(3), and e(3) is perfect
    assert_eq!(dims, vec![7, 6]);
    assert!(!a.is_solvable());
}

#[test]
fn so3_is_semisimple_and_matches_pattern() {
    let a = che_algebra();
    let s = a
        .subalgebra(&[
            unit(7, 0),
            unit(7, 5),
            unit(7, 6),
        ])
        .unwrap();
    assert!(s.is_semisimple());
    assert!(so3_pattern(&s).is_some());
    let t = a.subalgebra(&[unit(7, 1), unit(7, 3), unit(7, 4)]).unwrap();
    assert!(!t.is_semisimple());
    assert!(t.is_solvable());
    assert!(so3_pattern(&t).is_none());
}

#[test]
fn so3_pattern_with_rescaling() {
    // [b1,b2] = 2 b3, [b2,b3] = 2 b1, [b3,b1] = 2 b2
    let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[i][j][k] = int(2);
        c[j][i][k] = int(-2);
    }
    let s = LieAlgebra::from_constants(c);
    assert!(so3_pattern(&s).is_some());
}

#[test]
fn subalgebra_rejects_non_closed_span() {
    let a = che_algebra();
    assert!(matches!(
        a.subalgebra(&[unit(7, 0), unit(7, 3)]),
        Err(LieError::NotSubalgebra(_))
    ));
}

#[test]
fn levi_decomposition_of_che_algebra() {
    let a = che_algebra();
    let radical: Vec<RVec> = [1, 2, 3, 4].iter().map(|&i| unit(7, i)).collect();
    let levi: Vec<RVec> = [0, 5, 6].iter().map(|&i| unit(7, i)).collect();
    let rep = verify_levi(&a, &radical, &levi);
    assert!(rep.all_passed(), "{rep:?}");
    let w = verify_levi(&a, &levi, &radical);
    assert!(!w.get("radical is an ideal").unwrap().passed);
    assert!(w.get("radical is an ideal").unwrap().witness.is_some());
}

#[test]
fn levi_check_detects_wrong_split() {
    let a = che_algebra();
    // X4 is not an ideal on its own and X1 alone is not semisimple
    let rep = verify_levi(&a, &[unit(7, 3)], &[unit(7, 0)]);
    assert!(!rep.get("radical is an ideal").unwrap().passed);
    assert!(!rep.get("levi factor is semisimple").unwrap().passed);
    assert!(!rep
        .get("radical + levi factor = whole algebra (direct sum)")
        .unwrap()
        .passed);
}

#[test]
fn describe_combinations() {
    let a = che_algebra();
    let v = vec![
        int(1),
        int(0),
        int(-2),
        rat(1, 2),
        int(0),
        int(0),
        int(0),
    ];
    assert_eq!(a.describe(&v), "X1 - 2*X3 + 1/2*X4");
    assert_eq!(a.describe(&vec![Rational::zero(); 7]), "0");
    assert_eq!(a.describe(&{
        let mut u = unit(7, 6);
        u[6] = -Rational::one();
        u
    }), "-X7");
}

fn small_vec() -> impl Strategy<Value = RVec> {
    proptest::collection::vec(-3i64..=3, 7).prop_map(|v| ints(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn killing_form_is_ad_invariant(x in small_vec(), y in small_vec(), z in small_vec()) {
        let a = che_algebra();
        let lhs = a.killing_form(&a.bracket(&x, &y).unwrap(), &z).unwrap();
        let rhs = a.killing_form(&x, &a.bracket(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_bilinear_and_antisymmetric(x in small_vec(), y in small_vec(), z in small_vec()) {
        let a = che_algebra();
        let xy = a.bracket(&x, &y).unwrap();
        let yx = a.bracket(&y, &x).unwrap();
        for k in 0..7 {
            prop_assert_eq!(&xy[k], &-&yx[k]);
        }
        let sum: RVec = x.iter().zip(&z).map(|(p, q)| p + q).collect();
        let lhs = a.bracket(&sum, &y).unwrap();
        let zy = a.bracket(&z, &y).unwrap();
        for k in 0..7 {
            prop_assert_eq!(&lhs[k], &(&xy[k] + &zy[k]));
        }
    }

    #[test]
    fn bracket_matches_field_commutator(x in small_vec(), y in small_vec()) {
        let a = che_algebra();
        let g = che::generators();
        let vx = VectorField::combination(&x, &g);
        let vy = VectorField::combination(&y, &g);
        let want = a.bracket(&x, &y).unwrap();
        prop_assert_eq!(decompose(&commutator(&vx, &vy), &g), Some(want));
    }
}

#[test]
fn printed_bracket_examples() {
    let a = che_algebra();
    let g = che::generators();
    assert!(commutator(&g[2], &g[6]).is_zero());
    assert_eq!(
        decompose(&commutator(&g[5], &g[6]), &g),
        Some(unit(7, 0))
    );
    assert_eq!(a.bracket(&unit(7, 0), &unit(7, 3)).unwrap(), ints(&[0, 0, 0, 0, -1, 0, 0]));
}

#[test]
fn abelian_pair_has_zero_tensor() {
    let g = che::generators();
    let a = structure_constants(&[g[1].clone(), g[2].clone()]).unwrap();
    assert!(a.c.iter().flatten().flatten().all(Zero::is_zero));
    let dims: Vec<usize> = a.derived_series().iter().map(Vec::len).collect();
    assert_eq!(dims, vec![2, 0]);
    assert!(a.is_solvable());
    assert!(!a.is_semisimple());
}

#[test]
fn first_derived_algebra_drops_x3() {
    let a = che_algebra();
    let series = a.derived_series();
    let d1 = &series[1];
    for i in [0, 1, 3, 4, 5, 6] {
        assert!(crate::linalg::in_span(d1, &unit(7, i)), "X{}", i + 1);
    }
    assert!(!crate::linalg::in_span(d1, &unit(7, 2)));
}

#[test]
fn ideal_witness_names_the_bracket() {
    let a = che_algebra();
    let rep = verify_levi(
        &a,
        &[unit(7, 0), unit(7, 1)],
        &[unit(7, 2), unit(7, 3), unit(7, 4), unit(7, 5), unit(7, 6)],
    );
    let c = rep.get("radical is an ideal").unwrap();
    assert!(!c.passed);
    assert_eq!(
        c.witness.as_deref(),
        Some("[X1, X4] = -X5 is outside the subspace")
    );
}

#[test]
fn killing_form_examples() {
    let a = che_algebra();
    assert_eq!(a.killing_form(&unit(7, 0), &unit(7, 0)).unwrap(), int(-4));
    assert_eq!(a.killing_form(&unit(7, 1), &unit(7, 1)).unwrap(), int(0));
    assert_eq!(a.killing_form(&unit(7, 0), &unit(7, 5)).unwrap(), int(0));
    assert!(matches!(
        a.killing_form(&unit(6, 0), &unit(7, 0)),
        Err(LieError::Dimension { expected: 7, got: 6 })
    ));
    assert_eq!(
        a.ad_matrix(0).unwrap().iter().map(|r| r.iter().filter(|x| !x.is_zero()).count()).sum::<usize>(),
        4
    );
    assert!(a.ad_matrix(2).unwrap().iter().flatten().all(Zero::is_zero));
    assert!(matches!(a.ad_matrix(7), Err(LieError::Index(7))));
}

fn small_rational_vec() -> impl Strategy<Value = RVec> {
    proptest::collection::vec((-9i64..=9, 1i64..=5), 7)
        .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn killing_form_closed_form(v in small_rational_vec(), w in small_rational_vec()) {
        let a = che_algebra();
        let k = a.killing_form(&v, &w).unwrap();
        let want = int(-4) * (&v[0] * &w[0] + &v[5] * &w[5] + &v[6] * &w[6]);
        prop_assert_eq!(&k, &want);
        prop_assert_eq!(k, a.killing_form(&w, &v).unwrap());
    }
}
