use std::fmt;

use num_traits::{One, Signed};

use super::expr::{Expr, Node, Rational};

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Rational) -> fmt::Result {
    if e.denom().is_one() {
        write!(f, "^{}", e.numer())
    } else {
        write!(f, "^({}/{})", e.numer(), e.denom())
    }
}

fn needs_parens_as_base(e: &Expr) -> bool {
    match e.node() {
        Node::Add(_) | Node::Mul(_) | Node::Pow(_, _) => true,
        Node::Num(r) => r.is_negative() || !r.denom().is_one(),
        _ => false,
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Add(_) => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(r) => write_rational(f, r),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Jet(j) => {
                if j.order() == 0 {
                    write!(f, "u")
                } else {
                    write!(f, "u_{}", j.letters())
                }
            }
            Node::Unknown(u) => {
                if u.index.iter().all(|&c| c == 0) {
                    write!(f, "{}", u.name.name())
                } else {
                    write!(f, "{}_{}", u.name.name(), u.letters())
                }
            }
            Node::Func(k, a) => write!(f, "{}({a})", k.name()),
            Node::Bessel(k, o, a) => write!(f, "{}({o}, {a})", k.name()),
            Node::Pow(b, e) => {
                if needs_parens_as_base(b) {
                    write!(f, "({b})")?;
                } else {
                    write!(f, "{b}")?;
                }
                write_exponent(f, e)
            }
            Node::Mul(fs) => {
                let mut rest = &fs[..];
                if let Node::Num(c) = fs[0].node() {
                    rest = &fs[1..];
                    if (-c).is_one() {
                        write!(f, "-")?;
                    } else {
                        write_rational(f, c)?;
                        write!(f, "*")?;
                    }
                }
                for (i, x) in rest.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write_factor(f, x)?;
                }
                Ok(())
            }
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if t.is_negative_term() {
                        write!(f, " - {}", -t)?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
