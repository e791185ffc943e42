use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use proptest::prelude::*;

use super::*;

fn p(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn r() -> Var {
    Var::Sym("r".into())
}

/// Plain f64 evaluation of a canonical tree at (r, q, z, u, u_r, k).
fn eval(e: &Expr, env: &[f64; 6]) -> f64 {
    match e.node() {
        Node::Num(c) => c.to_f64().unwrap(),
        Node::Sym(s) => match s.as_str() {
            "r" => env[0],
            "q" => env[1],
            "z" => env[2],
            "k" => env[5],
            other => panic!("unbound {other}"),
        },
        Node::Jet(j) if *j == JetIndex::U => env[3],
        Node::Jet(j) if *j == JetIndex::of(&[Coord::R]) => env[4],
        Node::Jet(j) => panic!("unbound jet {j:?}"),
        Node::Unknown(_) | Node::Bessel(..) => panic!("not evaluable"),
        Node::Func(k, a) => {
            let x = eval(a, env);
            match k {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Arctan => x.atan(),
            }
        }
        Node::Pow(b, n) => eval(b, env).powf(n.to_f64().unwrap()),
        Node::Mul(fs) => fs.iter().map(|f| eval(f, env)).product(),
        Node::Add(ts) => ts.iter().map(|t| eval(t, env)).sum(),
    }
}

#[test]
fn parses_che_lhs() {
    let e = p("u_rr + (1/r)*u_r + (1/r^2)*u_qq + u_zz + k^2*u");
    let jets: Vec<String> = e.jets().iter().map(|j| j.letters()).collect();
    assert_eq!(jets, ["", "r", "rr", "qq", "zz"]);
    assert_eq!(e.terms().len(), 5);
    assert_eq!(e, p("u_zz + u_qq/r^2 + k^2*u + u_rr + u_r*r^-1"));
}

#[test]
fn pythagorean_identity() {
    assert!(simplify(&p("sin(q)^2 + cos(q)^2")).is_one());
    assert!(p("cos(theta)^2 + sin(theta)^2 - 1").is_zero());
}

#[test]
fn syntax_error_offsets() {
    let err = parse("u_rr +").unwrap_err();
    assert!(matches!(err, ParseError::Syntax { .. }));
    assert_eq!(err.offset(), 6);
    assert_eq!(parse("(r + 1").unwrap_err().offset(), 6);
    assert_eq!(parse("r $ 2").unwrap_err().offset(), 2);
    assert_eq!(parse("r^z").unwrap_err().offset(), 2);
}

#[test]
fn unknown_identifier_lists_symbols() {
    match parse("r + w").unwrap_err() {
        ParseError::UnknownIdentifier {
            name,
            offset,
            declared,
        } => {
            assert_eq!(name, "w");
            assert_eq!(offset, 4);
            assert!(declared.iter().any(|d| d == "k"));
            assert!(declared.iter().any(|d| d == "c13"));
        }
        other => panic!("{other:?}"),
    }
    assert!(parse_with("k", &SymbolTable::empty()).is_err());
    assert!(parse_with("a*r", &SymbolTable::empty().with(&["a"])).is_ok());
}

#[test]
fn parser_forms() {
    assert_eq!(p("0.25"), Expr::rational(rat(1, 4)));
    assert_eq!(p("-2^2"), Expr::int(-4));
    assert_eq!(p("2^-1"), Expr::rational(rat(1, 2)));
    assert_eq!(p("4^(1/2)"), Expr::int(2));
    assert_eq!(p("r^(3/2)*r^(1/2)"), p("r^2"));
    assert_eq!(p("sqrt(c2)"), p("c2^(1/2)"));
    assert_eq!(p("tan(q)"), p("sin(q)/cos(q)"));
    assert_eq!(p("atan(r)"), p("arctan(r)"));
    assert_eq!(p("u_qr"), p("u_rq"));
    assert_eq!(p("xi1_ur"), p("xi1_ru"));
    assert_eq!(p("xi1(r, q, z, u)"), p("xi1"));
    assert_eq!(p("BJ(0, k*r)"), p("BesselJ(0, r*k)"));
    assert_eq!(p("exp(ln(r))"), p("r"));
    assert_eq!(p("exp(r)*exp(-r)"), Expr::one());
    assert_eq!(p("ln(exp(z))"), p("z"));
    assert!(parse("sin(r, z)").is_err());
    assert!(parse("u_x").is_err());
}

#[test]
fn canonical_products_and_sums() {
    assert_eq!(simplify(&p("r^2*(1/r^2)*cos(q)")), p("cos(q)"));
    assert!(p("sin(q)*cos(q)/r - cos(q)*sin(q)/r").is_zero());
    assert_eq!(p("(r + 1)^2"), p("r^2 + 2*r + 1"));
    assert_eq!(p("sin(-q)"), p("-sin(q)"));
    assert_eq!(p("cos(-q)"), p("cos(q)"));
    assert_eq!(p("(r*z)^(1/2)*(r*z)^(1/2)"), p("r*z"));
    assert_eq!(p("(1 + r)^(1/2)*(1 + r)^(1/2)"), p("1 + r"));
}

#[test]
fn printer_output() {
    assert_eq!(p("-u_r/r").to_string(), "-u_r*r^-1");
    assert_eq!(p("r - z").to_string(), "r - z");
    assert_eq!(p("c2^(1/2)").to_string(), "c2^(1/2)");
    assert_eq!(p("BesselJ(1/3, 2*r)").to_string(), "BesselJ(1/3, 2*r)");
}

#[test]
fn differentiate_examples() {
    assert_eq!(differentiate(&p("1/r"), &r()).unwrap(), p("-1/r^2"));
    assert!(differentiate(&p("u_q"), &r()).unwrap().is_zero());
    let d = differentiate(&p("xi1"), &Var::u()).unwrap();
    match d.node() {
        Node::Unknown(f) => {
            assert_eq!(f.name, UnknownName::Xi1);
            assert_eq!(f.index, [0, 0, 0, 1]);
        }
        _ => panic!("{d}"),
    }
    assert!(differentiate(&p("xi1"), &Var::Jet(JetIndex::of(&[Coord::R])))
        .unwrap()
        .is_zero());
    assert_eq!(
        differentiate(&p("sin(k*r)"), &r()).unwrap(),
        p("k*cos(k*r)")
    );
    assert_eq!(
        differentiate(&p("BesselJ(0, k*r)"), &r()).unwrap(),
        p("k/2*BesselJ(-1, k*r) - k/2*BesselJ(1, k*r)")
    );
    assert!(differentiate(&p("BesselJ(r, z)"), &r()).is_err());
    let table = SymbolTable::default();
    assert!(Var::resolve("w", &table).is_err());
    assert_eq!(Var::resolve("theta", &table).unwrap(), Var::Sym("q".into()));
    assert_eq!(
        Var::resolve("u_qr", &table).unwrap(),
        Var::Jet(JetIndex::of(&[Coord::Theta, Coord::R]))
    );
}

#[test]
fn substitute_examples() {
    let urr = Var::Jet(JetIndex::of(&[Coord::R, Coord::R]));
    assert!(substitute_one(&p("u_rr + k^2*u"), urr.clone(), p("-k^2*u")).is_zero());
    let b = BTreeMap::from([
        (r(), Expr::int(2)),
        (Var::Jet(JetIndex::of(&[Coord::R])), Expr::int(3)),
    ]);
    assert_eq!(substitute(&p("r*u_r"), &b), Expr::int(6));
    let lhs = p("u_rr + (1/r)*u_r + (1/r^2)*u_qq + u_zz + k^2*u");
    let rhs = p("-(1/r)*u_r - (1/r^2)*u_qq - u_zz - k^2*u");
    assert!(substitute_one(&lhs, urr, rhs).is_zero());
    // simultaneous, not sequential
    let swap = BTreeMap::from([(r(), p("z")), (Var::Sym("z".into()), p("r"))]);
    assert_eq!(substitute(&p("r - 2*z"), &swap), p("z - 2*r"));
}

#[derive(Debug, Clone)]
enum Raw {
    Int(i64),
    Leaf(&'static str),
    Add(Box<Raw>, Box<Raw>),
    Sub(Box<Raw>, Box<Raw>),
    Mul(Box<Raw>, Box<Raw>),
    DivR(Box<Raw>, u32),
    Pow(Box<Raw>, u32),
    Sin(Box<Raw>),
    Cos(Box<Raw>),
    Exp(Box<Raw>),
    SqrtR,
}

impl Raw {
    fn build(&self) -> Expr {
        match self {
            Raw::Int(n) => Expr::int(*n),
            Raw::Leaf(s) => p(s),
            Raw::Add(a, b) => a.build() + b.build(),
            Raw::Sub(a, b) => a.build() - b.build(),
            Raw::Mul(a, b) => a.build() * b.build(),
            Raw::DivR(a, n) => a.build() / p("r").powi(*n as i64),
            Raw::Pow(a, n) => a.build().powi(*n as i64),
            Raw::Sin(a) => a.build().sin(),
            Raw::Cos(a) => a.build().cos(),
            Raw::Exp(a) => a.build().exp(),
            Raw::SqrtR => p("r").sqrt(),
        }
    }

    fn eval(&self, env: &[f64; 6]) -> f64 {
        match self {
            Raw::Int(n) => *n as f64,
            Raw::Leaf(s) => eval(&p(s), env),
            Raw::Add(a, b) => a.eval(env) + b.eval(env),
            Raw::Sub(a, b) => a.eval(env) - b.eval(env),
            Raw::Mul(a, b) => a.eval(env) * b.eval(env),
            Raw::DivR(a, n) => a.eval(env) / env[0].powi(*n as i32),
            Raw::Pow(a, n) => a.eval(env).powi(*n as i32),
            Raw::Sin(a) => a.eval(env).sin(),
            Raw::Cos(a) => a.eval(env).cos(),
            Raw::Exp(a) => a.eval(env).exp(),
            Raw::SqrtR => env[0].sqrt(),
        }
    }
}

fn raw() -> impl Strategy<Value = Raw> {
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(Raw::Int),
        prop::sample::select(vec!["r", "q", "z", "u", "u_r", "k"]).prop_map(Raw::Leaf),
        Just(Raw::SqrtR),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Raw::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Raw::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Raw::Mul(a.into(), b.into())),
            (inner.clone(), 1u32..3).prop_map(|(a, n)| Raw::DivR(a.into(), n)),
            (inner.clone(), 2u32..4).prop_map(|(a, n)| Raw::Pow(a.into(), n)),
            inner.clone().prop_map(|a| Raw::Sin(a.into())),
            inner.clone().prop_map(|a| Raw::Cos(a.into())),
            inner.prop_map(|a| Raw::Exp(a.into())),
        ]
    })
}

fn env() -> impl Strategy<Value = [f64; 6]> {
    (
        0.5f64..3.0,
        -3.0f64..3.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.5f64..2.0,
    )
        .prop_map(|(a, b, c, d, e, f)| [a, b, c, d, e, f])
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn simplify_is_idempotent(x in raw()) {
        let e = x.build();
        let once = simplify(&e);
        prop_assert_eq!(simplify(&once), once.clone());
        prop_assert_eq!(once, e);
    }

    #[test]
    fn print_parse_round_trip(x in raw()) {
        let e = x.build();
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn differentiate_is_linear(x in raw(), y in raw(), a in -4i64..4, b in 1i64..4) {
        let (e1, e2) = (x.build(), y.build());
        let ca = Expr::int(a);
        let cb = Expr::rational(rat(1, b));
        for v in [r(), Var::Sym("q".into()), Var::u()] {
            let lhs = differentiate(&(&ca * &e1 + &cb * &e2), &v).unwrap();
            let rhs = &ca * &differentiate(&e1, &v).unwrap() + &cb * &differentiate(&e2, &v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn product_rule(x in raw(), y in raw()) {
        let (e1, e2) = (x.build(), y.build());
        for v in [r(), Var::Sym("z".into()), Var::Jet(JetIndex::of(&[Coord::R]))] {
            let lhs = differentiate(&(&e1 * &e2), &v).unwrap();
            let rhs = &differentiate(&e1, &v).unwrap() * &e2 + &e1 * &differentiate(&e2, &v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn canonical_form_preserves_value(x in raw(), pt in env()) {
        let exact = x.eval(&pt);
        prop_assume!(exact.is_finite() && exact.abs() < 1e8);
        let got = eval(&simplify(&x.build()), &pt);
        prop_assert!(close(exact, got, 1e-10), "{} vs {}", exact, got);
    }

    #[test]
    fn derivative_matches_difference_quotient(x in raw(), pt in env()) {
        let e = x.build();
        let d = differentiate(&e, &r()).unwrap();
        let h = 1e-5;
        let mut hi = pt;
        let mut lo = pt;
        hi[0] += h;
        lo[0] -= h;
        let fd = (x.eval(&hi) - x.eval(&lo)) / (2.0 * h);
        let an = eval(&d, &pt);
        prop_assume!(fd.is_finite() && an.is_finite() && an.abs() < 1e4);
        prop_assert!(close(fd, an, 1e-5), "{} vs {}", fd, an);
    }
}
