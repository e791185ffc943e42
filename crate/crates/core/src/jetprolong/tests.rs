use proptest::prelude::*;

use super::files::{parse_field, parse_pde};
use super::*;
use crate::che;
use crate::symcore::{
    int, parse, rat, Coord, Expr, JetIndex, SymbolTable, UnknownFn, UnknownName,
};

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn j(s: &str) -> JetIndex {
    JetIndex::from_letters(s).unwrap()
}

#[test]
fn total_derivative_examples() {
    assert_eq!(total_derivative(&p("u"), Coord::R).unwrap(), p("u_r"));
    assert_eq!(total_derivative(&p("r*u"), Coord::R).unwrap(), p("u + r*u_r"));
    assert_eq!(total_derivative(&p("u_q"), Coord::Z).unwrap(), p("u_qz"));
    assert_eq!(
        total_derivative(&p("xi1"), Coord::Theta).unwrap(),
        p("xi1_q + xi1_u*u_q")
    );
    assert!(matches!(
        total_derivative(&p("u_rr"), Coord::R),
        Err(JetError::OrderOverflow { .. })
    ));
}

#[test]
fn characteristic_examples() {
    let x = che::generators();
    assert_eq!(characteristic(&x[0]), p("-u_q"));
    assert_eq!(characteristic(&x[2]), p("u"));
    assert_eq!(characteristic(&x[3]), p("-sin(q)*u_r - (cos(q)/r)*u_q"));
}

#[test]
fn prolongation_examples() {
    let x = che::generators();
    let pr2 = prolong2(&x[1]).unwrap();
    assert_eq!(pr2.coeffs.len(), 9);
    assert!(pr2.coeffs.values().all(Expr::is_zero));
    let pr3 = prolong2(&x[2]).unwrap();
    for (k, c) in &pr3.coeffs {
        assert_eq!(*c, Expr::jet(*k));
    }
}

/// Recursive form of the prolongation: `eta_{J,i} = D_i eta_J - sum_k (D_i xi^k) u_{J,k}`.
fn recursive_prolongation(v: &VectorField) -> std::collections::BTreeMap<JetIndex, Expr> {
    let mut out = std::collections::BTreeMap::new();
    let mut base = vec![(JetIndex::U, v.eta.clone())];
    for _ in 0..2 {
        let mut next = Vec::new();
        for (jj, eta_j) in &base {
            for i in Coord::ALL {
                let target = jj.bump(i);
                if out.contains_key(&target) {
                    continue;
                }
                let mut e = total_derivative(eta_j, i).unwrap();
                for k in Coord::ALL {
                    let dxi = total_derivative(&v.xi[k.index()], i).unwrap();
                    e = e - dxi * Expr::jet(jj.bump(k));
                }
                out.insert(target, e.clone());
                next.push((target, e));
            }
        }
        base = next;
    }
    out
}

#[test]
fn prolongation_matches_recursive_formula() {
    let mut fields = che::generators();
    fields.push(che::radial_scaling());
    fields.push(che::field(["r*z*u", "sin(q)*z", "exp(r)*u^2", "r*q + u*z"]));
    fields.push(super::generic_field());
    for v in &fields {
        let direct = prolong2(v).unwrap();
        let rec = recursive_prolongation(v);
        for (k, e) in &rec {
            assert_eq!(direct.coeff(*k), e, "field {v}, jet {}", k.letters());
        }
    }
}

#[test]
fn x4_first_prolongation() {
    let pr = prolong2(&che::generators()[3]).unwrap();
    // X4 = d_y: eta_r = (cos q / r^2) u_q, eta_q = -cos q u_r + (sin q / r) u_q
    assert_eq!(*pr.coeff(j("r")), p("(cos(q)/r^2)*u_q"));
    assert_eq!(*pr.coeff(j("q")), p("-cos(q)*u_r + (sin(q)/r)*u_q"));
    assert!(pr.coeff(j("z")).is_zero());
}

#[test]
fn generators_are_symmetries() {
    let pde = che::pde();
    for (i, v) in che::generators().iter().enumerate() {
        let res = invariance_residual(v, &pde).unwrap();
        assert!(res.is_zero(), "X{}: {res}", i + 1);
    }
    let res = invariance_residual(&che::radial_scaling(), &pde).unwrap();
    assert!(!res.is_zero());
    assert_eq!(res, p("2*u_zz + 2*k^2*u"));
}

#[test]
fn pde_solving() {
    let pde = che::pde();
    assert_eq!(pde.solved_rhs, p("-u_r/r - u_qq/r^2 - u_zz - k^2*u"));
    assert!(pde.on_shell(&pde.lhs).is_zero());
    assert!(matches!(
        Pde::new(p("u_rr^2 + u"), j("rr")),
        Err(JetError::NotAffine(_))
    ));
    assert!(matches!(
        Pde::new(p("u_r*u_rr + u"), j("rr")),
        Err(JetError::NotAffine(_))
    ));
    assert!(matches!(Pde::new(p("u_z + u"), j("rr")), Err(JetError::BadLeading(_))));
    let scaled = Pde::new(p("r^2*u_rr + u"), j("rr")).unwrap();
    assert_eq!(scaled.solved_rhs, p("-u/r^2"));
}

fn xi(n: UnknownName, letters: &str) -> Expr {
    Expr::unknown(UnknownFn::from_letters(n, letters).unwrap())
}

#[test]
fn determining_system_contents() {
    let sys = determining_system(&che::pde()).unwrap();
    let eqs: Vec<Expr> = sys.iter().map(|d| d.equation.clone()).collect();
    assert!(eqs.contains(&xi(UnknownName::Xi2, "u")));
    assert!(eqs.contains(&(xi(UnknownName::Xi1, "z") + xi(UnknownName::Xi3, "r"))));
    for d in &sys {
        for (i, v) in che::generators().iter().enumerate() {
            let e = instantiate(&d.equation, v);
            assert!(e.is_zero(), "X{} fails {}: {e}", i + 1, d.equation);
        }
    }
    let scaling = che::radial_scaling();
    assert!(sys.iter().any(|d| !instantiate(&d.equation, &scaling).is_zero()));
}

#[test]
fn instantiate_takes_derivatives() {
    let v = che::field(["r^2*z", "0", "0", "u*q"]);
    assert_eq!(instantiate(&p("xi1_rz"), &v), p("2*r"));
    assert_eq!(instantiate(&p("eta_qu + xi1"), &v), p("1 + r^2*z"));
}

#[test]
fn implication_check() {
    let sys = vec![p("xi1_u"), p("xi1_z + xi3_r")];
    assert_eq!(implied_by(&sys, &p("xi1_uu"), 3, 1), Implication::Implied);
    assert_eq!(implied_by(&sys, &p("r*xi1_u"), 3, 1), Implication::Implied);
    assert_eq!(
        implied_by(&sys, &p("xi1_zu + xi3_ru + xi1_u"), 3, 1),
        Implication::Implied
    );
    assert_eq!(implied_by(&sys, &p("xi2_u"), 3, 1), Implication::NotImplied);
    assert_eq!(implied_by(&sys, &p("xi1_z - xi3_r"), 3, 1), Implication::NotImplied);
}

#[test]
fn normalization() {
    assert_eq!(normalize_equation(&p("-2*xi1/r + 4*xi2_u")), p("xi1 - 2*r*xi2_u"));
    assert_eq!(normalize_equation(&p("3*r^2*xi1_u")), p("xi1_u"));
}

#[test]
fn toy_pde_system() {
    let pde = Pde::new(p("u_rr + u"), j("rr")).unwrap();
    let sys = determining_system(&pde).unwrap();
    assert!(!sys.is_empty());
    // z-translations and rotations in q are symmetries of any r-only equation
    for v in [che::field(["0", "0", "1", "0"]), che::field(["0", "1", "0", "0"])] {
        assert!(invariance_residual(&v, &pde).unwrap().is_zero());
        assert!(sys.iter().all(|d| instantiate(&d.equation, &v).is_zero()));
    }
}

#[test]
fn field_and_pde_files() {
    let t = SymbolTable::default();
    let v = parse_field("# X4\nxi1 = sin(q)\nxi2 = cos(q)/r\n\n", &t).unwrap();
    assert_eq!(v, che::generators()[3]);
    let err = parse_field("xi1 = sin(q\n", &t).unwrap_err();
    assert_eq!(err.offset(), Some(5));
    assert!(err.to_string().contains("column 12"));
    assert!(err.to_string().contains("line 1"));
    assert!(parse_field("xi1 = u_r\n", &t).is_err());
    assert!(parse_field("foo = 1\n", &t).is_err());
    let pde = parse_pde(&format!("lhs = {}\nsolve_for = u_rr\n", che::LHS), &t).unwrap();
    assert_eq!(pde, che::pde());
    assert!(parse_pde("lhs = u_rr\n", &t).is_err());
    assert!(parse_pde("lhs = u_rr\nsolve_for = u_x\n", &t).is_err());
}

fn jet1_expr() -> impl Strategy<Value = Expr> {
    let atoms = prop::sample::select(vec![
        "u", "u^2", "exp(u)", "r", "z", "sin(q)", "cos(q)", "1/r", "2", "-1", "xi1", "eta",
    ]);
    prop::collection::vec((atoms.clone(), atoms, -3i64..4), 1..5).prop_map(|ts| {
        Expr::add(
            ts.into_iter()
                .map(|(a, b, c)| Expr::int(c) * parse(a).unwrap() * parse(b).unwrap()),
        )
    })
}

fn small_field() -> impl Strategy<Value = VectorField> {
    let coeff = prop::sample::select(vec!["0", "1", "r", "z*u", "sin(q)", "cos(q)/r", "u", "r*z"]);
    prop::array::uniform4(coeff).prop_map(che::field)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_derivatives_commute(e in jet1_expr()) {
        let rz = total_derivative(&total_derivative(&e, Coord::R).unwrap(), Coord::Z).unwrap();
        let zr = total_derivative(&total_derivative(&e, Coord::Z).unwrap(), Coord::R).unwrap();
        prop_assert_eq!(rz, zr);
        let rq = total_derivative(&total_derivative(&e, Coord::R).unwrap(), Coord::Theta).unwrap();
        let qr = total_derivative(&total_derivative(&e, Coord::Theta).unwrap(), Coord::R).unwrap();
        prop_assert_eq!(rq, qr);
    }

    #[test]
    fn prolongation_is_linear(v in small_field(), w in small_field(), a in -3i64..4, b in 1i64..4) {
        let (ca, cb) = (int(a), rat(1, b));
        let combo = v.scale(&ca).plus(&w.scale(&cb));
        let (pc, pv, pw) = (prolong2(&combo).unwrap(), prolong2(&v).unwrap(), prolong2(&w).unwrap());
        for k in JetIndex::all_up_to(2) {
            let rhs = Expr::rational(ca.clone()) * pv.coeff(k).clone()
                + Expr::rational(cb.clone()) * pw.coeff(k).clone();
            prop_assert_eq!(pc.coeff(k).clone(), rhs);
        }
    }

    #[test]
    fn vertical_identity_prolongs_to_jets(c in 1i64..5) {
        let v = che::field(["0", "0", "0", "u"]).scale(&int(c));
        let pr = prolong2(&v).unwrap();
        for (k, e) in &pr.coeffs {
            prop_assert_eq!(e.clone(), Expr::int(c) * Expr::jet(*k));
        }
    }
}

#[test]
fn combinations_of_generators_are_symmetries() {
    let pde = che::pde();
    let x = che::generators();
    let sys = determining_system(&pde).unwrap();
    let combos: [[i64; 7]; 5] = [
        [1, 2, 0, -1, 3, 0, 1],
        [0, 1, 1, 1, 1, 1, 1],
        [2, 0, -3, 0, 0, 5, 0],
        [-1, -1, 2, 4, 0, 0, -2],
        [3, 1, 1, 1, -1, 2, -1],
    ];
    for c in combos {
        let coeffs: Vec<_> = c.iter().map(|&n| int(n)).collect();
        let v = VectorField::combination(&coeffs, &x);
        assert!(invariance_residual(&v, &pde).unwrap().is_zero());
        assert!(sys.iter().all(|d| instantiate(&d.equation, &v).is_zero()));
    }
}
