//! Built-in reference problem: the homogeneous cylindrical Helmholtz
//! equation `u_rr + u_r/r + u_qq/r^2 + u_zz + k^2 u = 0` and the published
//! data about its symmetry algebra (generators, commutator table, adjoint
//! matrices, flows, invariants).
//!
//! Everything printed is kept verbatim as text in the crate's expression
//! grammar so the verification layers can compare against it.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::jetprolong::{implied_by, Implication, Pde, VectorField};
use crate::liestruct::{structure_constants, LieAlgebra};
use crate::symcore::{
    parse_with, substitute, Coord, Expr, JetIndex, Rational, SymbolTable, Var,
};

pub const LHS: &str = "u_rr + (1/r)*u_r + (1/r^2)*u_qq + u_zz + k^2*u";

pub fn pde() -> Pde {
    Pde::new(expr(LHS), JetIndex::of(&[Coord::R, Coord::R])).expect("reference equation")
}

pub fn table() -> SymbolTable {
    SymbolTable::default().with(&[
        "s", "s6", "t", "A", "B", "C", "alpha", "C1", "cc2", "cc3", "d1", "d2",
    ])
}

/// Parses built-in text; panics only on a malformed constant in this file.
pub fn expr(text: &str) -> Expr {
    parse_with(text, &table()).unwrap_or_else(|e| panic!("built-in expression `{text}`: {e}"))
}

/// Coefficients `(xi1, xi2, xi3, eta)` of the basis generators X1..X7.
pub const GENERATORS: [[&str; 4]; 7] = [
    ["0", "1", "0", "0"],
    ["0", "0", "1", "0"],
    ["0", "0", "0", "u"],
    ["sin(q)", "cos(q)/r", "0", "0"],
    ["-cos(q)", "sin(q)/r", "0", "0"],
    ["-z*cos(q)", "z*sin(q)/r", "r*cos(q)", "0"],
    ["z*sin(q)", "z*cos(q)/r", "-r*sin(q)", "0"],
];

pub fn field(c: [&str; 4]) -> VectorField {
    VectorField::new(expr(c[0]), expr(c[1]), expr(c[2]), expr(c[3])).expect("built-in field")
}

pub fn generators() -> Vec<VectorField> {
    GENERATORS.iter().map(|c| field(*c)).collect()
}

/// The scaling field `r d_r`; not a symmetry since `k^2 u` breaks scaling.
pub fn radial_scaling() -> VectorField {
    field(["r", "0", "0", "0"])
}

/// General solution of the determining system in terms of c1..c13.
pub const SOLVED_FIELD: [&str; 4] = [
    "(c1*z + c3)*sin(q) + (c2*z + c4)*cos(q)",
    "-(1/r)*(c2*z + c4)*sin(q) + (1/r)*(c1*z + c3)*cos(q) + c5",
    "-r*(c1*sin(q) + c2*cos(q)) + c6",
    "exp(-sqrt(c3)*z - sqrt(c2)*q)*(c7*exp(2*sqrt(c2)*q) + c8)*(c9*exp(2*sqrt(c3)*z) + c10)\
     *(c11*BesselY(sqrt(-c2), sqrt(c3 + k^2)*r) + c12*BesselJ(sqrt(-c2), sqrt(c3 + k^2)*r)) + c13*u",
];

pub fn solved_field() -> VectorField {
    field(SOLVED_FIELD)
}

/// Binds named constants in every coefficient of a field.
pub fn bind_field(v: &VectorField, constants: &BTreeMap<String, Rational>) -> VectorField {
    let b = bindings(constants);
    VectorField::from_coeffs(v.coeffs().map(|c| substitute(c, &b)))
}

pub fn bindings(constants: &BTreeMap<String, Rational>) -> BTreeMap<Var, Expr> {
    constants
        .iter()
        .map(|(k, v)| (Var::Sym(k.clone()), Expr::rational(v.clone())))
        .collect()
}

/// The printed determining equations after removing exact repeats, with the
/// `eta_{z,z}` subscript read as `eta_zz`.
pub const PRINTED_DETERMINING: [&str; 21] = [
    "xi1_uu",
    "xi2_uu",
    "xi2_u",
    "xi3_uu",
    "xi1_u",
    "xi3_u",
    "r^2*xi2_z + xi3_q",
    "xi1_z + xi3_r",
    "2*xi1_u + r*eta_uu - 2*r*xi1_ru",
    "r*xi1_r - r*xi2_q - xi1",
    "xi1_r - xi3_z",
    "2*xi3_zu - eta_uu",
    "r^2*xi2_r + xi1_q",
    "xi3_ru + xi1_zu",
    "xi3_qu + r^2*xi2_zu",
    "eta_uu - 2*xi2_qu",
    "r^2*xi2_ru + xi1_qu",
    "r^2*k^2*u*xi2_u + 2*eta_qu - r*xi2_r - xi2_qq - r^2*xi2_rr - r^2*xi2_zz",
    "3*r^2*k^2*u*xi1_u + r*xi1_r + 2*r^2*eta_ru - r^2*xi1_zz - xi1 - xi1_qq - r^2*xi1_rr",
    "r^2*k^2*u*xi3_u + 2*r^2*eta_zu - r*xi3_r - r^2*xi3_zz - xi3_qq - r^2*xi3_rr",
    "r^2*eta_zz + 2*r^2*k^2*u*(xi1_r - eta_u) + r^2*eta_rr + r*eta_r + eta_qq + r^2*eta*k^2",
];

/// Number of equations in the printed list before removing repeats.
pub const PRINTED_DETERMINING_RAW_COUNT: usize = 31;

/// Printed commutator table: entry `[i][j]` is `+-k` for `[X_i, X_j] = +-X_k`
/// (1-based), or 0.
pub const TABLE1: [[i8; 7]; 7] = [
    [0, 0, 0, -5, 4, 7, -6],
    [0, 0, 0, 0, 0, 5, 4],
    [0, 0, 0, 0, 0, 0, 0],
    [5, 0, 0, 0, 0, 0, -2],
    [-4, 0, 0, 0, 0, -2, 0],
    [-7, -5, 0, 0, 2, 0, 1],
    [6, -4, 0, 2, 0, -1, 0],
];

/// Renders a commutator table in the layout of the printed one.
pub fn render_table(t: &[[i8; 7]; 7]) -> String {
    let cell = |v: i8| match v {
        0 => "0".to_string(),
        v if v > 0 => format!("X{v}"),
        v => format!("-X{}", -v),
    };
    let mut out = String::from("      ");
    for j in 1..=7 {
        out.push_str(&format!("{:>6}", format!("X{j}")));
    }
    out.push('\n');
    for (i, row) in t.iter().enumerate() {
        out.push_str(&format!("{:<6}", format!("X{}", i + 1)));
        for v in row {
            out.push_str(&format!("{:>6}", cell(*v)));
        }
        out.push('\n');
    }
    out
}

/// Killing form `-4 (v1 w1 + v6 w6 + v7 w7)` as a Gram diagonal.
pub const KILLING_DIAGONAL: [i64; 7] = [-4, 0, 0, 0, 0, -4, -4];

/// The printed adjoint matrices, row `j` holding the image of `X_j`. `M3` is
/// the identity. `M6` carries the printed `sin(s6)` entry.
pub const PRINTED_ADJOINT: [[[&str; 7]; 7]; 7] = [
    [
        ["1", "0", "0", "0", "0", "0", "0"],
        ["0", "1", "0", "0", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "cos(s)", "sin(s)", "0", "0"],
        ["0", "0", "0", "-sin(s)", "cos(s)", "0", "0"],
        ["0", "0", "0", "0", "0", "cos(s)", "-sin(s)"],
        ["0", "0", "0", "0", "0", "sin(s)", "cos(s)"],
    ],
    [
        ["1", "0", "0", "0", "0", "0", "0"],
        ["0", "1", "0", "0", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "1", "0", "0", "0"],
        ["0", "0", "0", "0", "1", "0", "0"],
        ["0", "0", "0", "0", "-s", "1", "0"],
        ["0", "0", "0", "-s", "0", "0", "1"],
    ],
    [
        ["1", "0", "0", "0", "0", "0", "0"],
        ["0", "1", "0", "0", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "1", "0", "0", "0"],
        ["0", "0", "0", "0", "1", "0", "0"],
        ["0", "0", "0", "0", "0", "1", "0"],
        ["0", "0", "0", "0", "0", "0", "1"],
    ],
    [
        ["1", "0", "0", "0", "-s", "0", "0"],
        ["0", "1", "0", "0", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "1", "0", "0", "0"],
        ["0", "0", "0", "0", "1", "0", "0"],
        ["0", "0", "0", "0", "0", "1", "0"],
        ["0", "s", "0", "0", "0", "0", "1"],
    ],
    [
        ["1", "0", "0", "s", "0", "0", "0"],
        ["0", "1", "0", "0", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "1", "0", "0", "0"],
        ["0", "0", "0", "0", "1", "0", "0"],
        ["0", "s", "0", "0", "0", "1", "0"],
        ["0", "0", "0", "0", "0", "0", "1"],
    ],
    [
        ["cos(s)", "0", "0", "0", "0", "0", "sin(s6)"],
        ["0", "cos(s)", "0", "0", "sin(s)", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "0", "0", "1", "0", "0", "0"],
        ["0", "-sin(s)", "0", "0", "cos(s)", "0", "0"],
        ["0", "0", "0", "0", "0", "1", "0"],
        ["-sin(s)", "0", "0", "0", "0", "0", "cos(s)"],
    ],
    [
        ["cos(s)", "0", "0", "0", "0", "-sin(s)", "0"],
        ["0", "cos(s)", "0", "sin(s)", "0", "0", "0"],
        ["0", "0", "1", "0", "0", "0", "0"],
        ["0", "-sin(s)", "0", "cos(s)", "0", "0", "0"],
        ["0", "0", "0", "0", "1", "0", "0"],
        ["sin(s)", "0", "0", "0", "0", "cos(s)", "0"],
        ["0", "0", "0", "0", "0", "0", "1"],
    ],
];

/// A printed closed-form flow: images of `(r, q, z, u)` in terms of the
/// starting point and the group parameter `s`.
#[derive(Clone, Debug)]
pub struct PrintedFlow {
    pub index: usize,
    pub components: [Expr; 4],
    /// Whether the print uses the symbol `t`, read here as the starting angle.
    pub uses_t: bool,
}

const G4: [&str; 2] = [
    "r*(cos(q)^2 + (1/(4*r^2))*(2*s - r*sin(2*q))^2)^(1/2)",
    "arctan((s/r)*(1 + tan(q)^2)^(1/2) - tan(q))",
];

const G5: [&str; 2] = [
    "(s - r/(1 + tan(q)^2)^(1/2))*(1 + (r*tan(q)/(s*(1 + tan(q)^2)^(1/2) - r))^2)^(1/2)",
    "arctan(r*tan(q)/(s*(1 + tan(q)^2)^(1/2) + r))",
];

/// `artanh(x)` written through the logarithm.
fn artanh(x: &str) -> String {
    format!("((1/2)*ln((1 + ({x}))/(1 - ({x}))))")
}

fn g6_text() -> [String; 3] {
    let a = |arg: &str| artanh(&format!("((d1^2 - C1)/d1)*cos({arg})"));
    [
        "(C1*cos(s + cc2)^2 + d1^2*sin(s + cc2)^2)^(1/2)".into(),
        format!(
            "q - ((C1 - d1^2)*cos(s + cc2)^2)^(1/2)*{}/((d1^2 - C1)^(1/2)*cos(s + cc2)) \
             + ((C1 - d1^2)*cos(cc2)^2)^(1/2)*{}/((d1^2 - C1)^(1/2)*cos(cc2))",
            a("s + cc2"),
            a("cc2")
        ),
        "(2^(1/2)/2)*((C1 - d1^2)*sin(2*s + 2*cc2))^(1/2)".into(),
    ]
}

fn g7_text() -> [String; 3] {
    let a = |arg: &str| artanh(&format!("((d2^2 - C1)/d1)*cos({arg})"));
    [
        "(C1*cos(s + cc3)^2 + d2^2*sin(s + cc3)^2)^(1/2)".into(),
        format!(
            "q + ((C1 - d2^2)*cos(s + cc3)^2)^(1/2)*{}/((d2^2 - C1)^(1/2)*cos(s + cc3)) \
             - ((C1 - d2^2)*cos(cc3)^2)^(1/2)*{}/((d2^2 - C1)^(1/2)*cos(cc3))",
            a("s + cc3"),
            a("cc3")
        ),
        "(2^(1/2)/2)*((C1 - d2^2)*sin(2*s + 2*cc3))^(1/2)".into(),
    ]
}

/// Auxiliary quantities of the g6/g7 prints, with `t` read as `q`.
fn flow_aux() -> BTreeMap<Var, Expr> {
    let t = "q";
    [
        ("C1", "r^2 + z^2".to_string()),
        ("cc2", format!("arctan(z*(r^2*cos({t})^2)^(-1/2))")),
        ("cc3", format!("-s - arctan(z*(r^2*sin({t})^2)^(-1/2))")),
        ("d1", format!("r*sin({t})")),
        ("d2", format!("r*cos({t})")),
    ]
    .into_iter()
    .map(|(k, v)| (Var::Sym(k.into()), expr(&v)))
    .collect()
}

pub fn printed_flows() -> Vec<PrintedFlow> {
    let id = ["r", "q", "z", "u"];
    let mut out = Vec::new();
    let simple: [[&str; 4]; 3] = [
        ["r", "q + s", "z", "u"],
        ["r", "q", "z + s", "u"],
        ["r", "q", "z", "u + s"],
    ];
    for (i, c) in simple.iter().enumerate() {
        out.push(PrintedFlow {
            index: i + 1,
            components: c.map(expr),
            uses_t: false,
        });
    }
    for (i, g) in [(4, G4), (5, G5)] {
        out.push(PrintedFlow {
            index: i,
            components: [expr(g[0]), expr(g[1]), expr(id[2]), expr(id[3])],
            uses_t: false,
        });
    }
    let aux = flow_aux();
    for (i, g) in [(6, g6_text()), (7, g7_text())] {
        let c = |s: &str| substitute(&expr(s), &aux);
        out.push(PrintedFlow {
            index: i,
            components: [c(&g[0]), c(&g[1]), c(&g[2]), expr("u")],
            uses_t: true,
        });
    }
    out
}

/// The printed transported solution for the `u`-scaling direction: the
/// print gives `f - s`.
pub const PRINTED_G3_TRANSPORT: &str = "f - s";

pub const I1: &str = "2*z + ((c1*sin(q) + c2*cos(q))*r^2 + c6*r)/((c1*z + c3)*sin(q) + (c2*z + c4)*cos(q))";

fn i2_text(with_r: bool) -> String {
    let rr = if with_r { "*r" } else { "" };
    format!(
        "z - (1/c13)*(c1*sin(q) + c2*cos(q))*ln((c11*BesselY(sqrt(-c2), sqrt(c3 + k^2){rr}) \
         + c12*BesselJ(sqrt(-c2), sqrt(c3 + k^2){rr}))*(c7*c9*exp(sqrt(c2)*q + sqrt(c3)*z) \
         + c7*c10*exp(sqrt(c2)*q - sqrt(c3)*z) + c8*c9*exp(-sqrt(c2)*q + sqrt(c3)*z) \
         + c8*c10*exp(-sqrt(c2)*q - sqrt(c3)*z)) + c13*u)"
    )
}

/// I2 as printed (Bessel argument without `r`).
pub fn i2_printed() -> Expr {
    expr(&i2_text(false))
}

/// I2 with the Bessel argument `sqrt(c3 + k^2)*r` as in the solved field.
pub fn i2_with_r() -> Expr {
    expr(&i2_text(true))
}

pub fn i1() -> Expr {
    expr(I1)
}

pub fn i3() -> Expr {
    let body = expr(
        "-(1/B)*arctan(alpha)*(2*c5*A^-1*(c2*c3 - c1*c4)*r^3 + 2*c6*r) \
         + r^2*A^-1*(ln(C) - ln(1/(cos(q) + 1)))*(c2^2*z + c1*c3 + c2*c4 + c1^2*z) \
         + 2*r^2*A^-1*arctan((cos(q) - 1)/sin(q))*(c2*c3 - c1*c4)",
    );
    let a = expr("c2^2*z^2 + 2*c2*c4*z + c4^2 + c1^2*z^2 + 2*c1*c3*z + c3^2");
    let b = expr(
        "(-2*c1*c3*z - c3^2 - c1^2*z^2 + c5^2*r^2 - c2^2*z^2 - 2*c2*c4*z - c4^2)^(1/2)",
    );
    let c = expr(
        "(1/(cos(q) + 1))*(c1*z*cos(q) + c3*cos(q) - c4*sin(q) - c2*z*sin(q) + c5*r)",
    );
    let alpha = substitute(
        &expr(
            "(1/(B*sin(q)))*(c1*z - c1*z*cos(q) + c3 - c3*cos(q) - c5*r + c5*r*cos(q) \
             + c2*z*sin(q) + c4*sin(q))",
        ),
        &BTreeMap::from([(Var::Sym("B".into()), b.clone())]),
    );
    substitute(
        &body,
        &BTreeMap::from([
            (Var::Sym("A".into()), a),
            (Var::Sym("B".into()), b),
            (Var::Sym("C".into()), c),
            (Var::Sym("alpha".into()), alpha),
        ]),
    )
}

/// Constant choices used by the invariant checks (unlisted constants are 0).
pub fn i1_constants() -> BTreeMap<String, f64> {
    consts(&[("c1", 1.0), ("c3", 1.0), ("c6", 1.0)])
}

pub fn i2_constants() -> BTreeMap<String, f64> {
    consts(&[
        ("c2", -1.0),
        ("c3", 1.0),
        ("c7", 1.0),
        ("c8", 1.0),
        ("c9", 1.0),
        ("c10", 1.0),
        ("c12", 1.0),
        ("c13", 1.0),
    ])
}

pub fn i3_constants() -> BTreeMap<String, f64> {
    consts(&[("c3", 0.2), ("c4", 0.1), ("c5", 1.0), ("c6", 1.0)])
}

fn consts(set: &[(&str, f64)]) -> BTreeMap<String, f64> {
    let mut m: BTreeMap<String, f64> = (1..=13).map(|i| (format!("c{i}"), 0.0)).collect();
    m.insert("k".into(), 1.0);
    for (k, v) in set {
        m.insert(k.to_string(), *v);
    }
    m
}

/// Structure constants of the seven generators, computed once.
pub fn algebra() -> &'static LieAlgebra {
    static ALGEBRA: OnceLock<LieAlgebra> = OnceLock::new();
    ALGEBRA.get_or_init(|| structure_constants(&generators()).expect("generators close"))
}

/// Checks each printed determining equation for implication by `system`.
pub fn check_printed_determining(system: &[Expr], seed: u64) -> Vec<(&'static str, Implication)> {
    PRINTED_DETERMINING
        .iter()
        .map(|text| (*text, implied_by(system, &expr(text), 3, seed)))
        .collect()
}
