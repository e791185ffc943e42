//! Canonical expression trees.
//!
//! Every [`Expr`] is built through the smart constructors in this module, so
//! any value in hand is already in canonical form:
//!
//! * sums and products are flattened, like terms / like bases are merged and
//!   children are sorted by the derived node order
//!   (`Num < Sym < Jet < Unknown < Func < Bessel < Pow < Mul < Add`);
//! * products are fully expanded over sums (positive integer powers of sums
//!   are expanded too);
//! * `cos(x)^n` with `n >= 2` is rewritten through `1 - sin(x)^2`, and
//!   `tan(x)` is stored as `sin(x) * cos(x)^-1`;
//! * `exp` factors are merged into a single `exp` of the summed arguments.
//!
//! Structural equality on canonical trees is the equality notion used by
//! the rest of the crate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Independent variables of the jet space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    R,
    Theta,
    Z,
}

impl Coord {
    pub const ALL: [Coord; 3] = [Coord::R, Coord::Theta, Coord::Z];

    pub fn index(self) -> usize {
        match self {
            Coord::R => 0,
            Coord::Theta => 1,
            Coord::Z => 2,
        }
    }

    /// ASCII spelling used in the text grammar (`q` stands for theta).
    pub fn name(self) -> &'static str {
        match self {
            Coord::R => "r",
            Coord::Theta => "q",
            Coord::Z => "z",
        }
    }

    pub fn from_letter(c: char) -> Option<Coord> {
        match c {
            'r' => Some(Coord::R),
            'q' => Some(Coord::Theta),
            'z' => Some(Coord::Z),
            _ => None,
        }
    }

    pub fn var(self) -> Var {
        Var::Sym(self.name().to_string())
    }

    pub fn expr(self) -> Expr {
        Expr::sym(self.name())
    }
}

/// Derivative multi-index of a jet coordinate `u_J`: counts of r, theta, z.
///
/// Stored as counts, so `u_rq` and `u_qr` are the same coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JetIndex([u8; 3]);

impl JetIndex {
    /// The dependent variable `u` itself.
    pub const U: JetIndex = JetIndex([0, 0, 0]);

    pub fn new(counts: [u8; 3]) -> Self {
        JetIndex(counts)
    }

    pub fn of(coords: &[Coord]) -> Self {
        coords.iter().fold(JetIndex::U, |j, &c| j.bump(c))
    }

    pub fn counts(self) -> [u8; 3] {
        self.0
    }

    pub fn order(self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn bump(self, c: Coord) -> Self {
        let mut k = self.0;
        k[c.index()] += 1;
        JetIndex(k)
    }

    /// Parses the subscript letters of `u_<letters>`.
    pub fn from_letters(s: &str) -> Option<Self> {
        let mut idx = JetIndex::U;
        for ch in s.chars() {
            idx = idx.bump(Coord::from_letter(ch)?);
        }
        Some(idx)
    }

    pub fn letters(self) -> String {
        let mut s = String::new();
        for c in Coord::ALL {
            for _ in 0..self.0[c.index()] {
                s.push_str(c.name());
            }
        }
        s
    }

    /// All multi-indices with `1 <= order <= max_order`, ordered by order.
    pub fn all_up_to(max_order: u32) -> Vec<JetIndex> {
        let mut out = Vec::new();
        for a in 0..=max_order as u8 {
            for b in 0..=max_order as u8 {
                for c in 0..=max_order as u8 {
                    let j = JetIndex([a, b, c]);
                    if j.order() >= 1 && j.order() <= max_order {
                        out.push(j);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl Ord for JetIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        // by order first, then r-heavy before theta-heavy before z-heavy
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for JetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The four coefficient functions of the generator ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnknownName {
    Xi1,
    Xi2,
    Xi3,
    Eta,
}

impl UnknownName {
    pub const ALL: [UnknownName; 4] = [
        UnknownName::Xi1,
        UnknownName::Xi2,
        UnknownName::Xi3,
        UnknownName::Eta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnknownName::Xi1 => "xi1",
            UnknownName::Xi2 => "xi2",
            UnknownName::Xi3 => "xi3",
            UnknownName::Eta => "eta",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        UnknownName::ALL.into_iter().find(|n| n.name() == s)
    }
}

/// An unknown coefficient function of `(r, theta, z, u)` together with a
/// derivative multi-index over those four arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnknownFn {
    pub name: UnknownName,
    pub index: [u8; 4],
}

impl UnknownFn {
    pub fn new(name: UnknownName) -> Self {
        UnknownFn {
            name,
            index: [0; 4],
        }
    }

    pub fn with_index(name: UnknownName, index: [u8; 4]) -> Self {
        UnknownFn { name, index }
    }

    /// Argument slot 0..=3 is r, theta, z, u.
    pub fn bump(self, slot: usize) -> Self {
        let mut index = self.index;
        index[slot] += 1;
        UnknownFn {
            name: self.name,
            index,
        }
    }

    pub fn from_letters(name: UnknownName, s: &str) -> Option<Self> {
        let mut f = UnknownFn::new(name);
        for ch in s.chars() {
            let slot = match ch {
                'r' => 0,
                'q' => 1,
                'z' => 2,
                'u' => 3,
                _ => return None,
            };
            f = f.bump(slot);
        }
        Some(f)
    }

    pub fn letters(self) -> String {
        let mut s = String::new();
        for (slot, ch) in ['r', 'q', 'z', 'u'].into_iter().enumerate() {
            for _ in 0..self.index[slot] {
                s.push(ch);
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Arctan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Arctan => "arctan",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BesselKind {
    J,
    Y,
}

impl BesselKind {
    pub fn name(self) -> &'static str {
        match self {
            BesselKind::J => "BesselJ",
            BesselKind::Y => "BesselY",
        }
    }
}

/// Something an expression can be differentiated by or substituted for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Sym(String),
    Jet(JetIndex),
}

impl Var {
    pub fn u() -> Var {
        Var::Jet(JetIndex::U)
    }

    pub fn expr(&self) -> Expr {
        match self {
            Var::Sym(s) => Expr::sym(s),
            Var::Jet(j) => Expr::jet(*j),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.expr(), f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Sym(String),
    Jet(JetIndex),
    Unknown(UnknownFn),
    Func(Func, Expr),
    Bessel(BesselKind, Expr, Expr),
    Pow(Expr, Rational),
    Mul(Vec<Expr>),
    Add(Vec<Expr>),
}

/// Immutable, cheaply clonable canonical expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::wrap(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(int(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::wrap(Node::Sym(name.to_string()))
    }

    pub fn jet(j: JetIndex) -> Expr {
        Expr::wrap(Node::Jet(j))
    }

    pub fn u() -> Expr {
        Expr::jet(JetIndex::U)
    }

    pub fn unknown(f: UnknownFn) -> Expr {
        Expr::wrap(Node::Unknown(f))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    /// Terms of a sum (a non-sum is a single term; zero has none).
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(ts) => ts.clone(),
            _ if self.is_zero() => Vec::new(),
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product, numeric coefficient included.
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Splits a term into its rational coefficient and the remaining product.
    pub fn split_coeff(&self) -> (Rational, Option<Expr>) {
        match self.node() {
            Node::Num(c) => (c.clone(), None),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(c) => {
                    let rest = if fs.len() == 2 {
                        fs[1].clone()
                    } else {
                        Expr::wrap(Node::Mul(fs[1..].to_vec()))
                    };
                    (c.clone(), Some(rest))
                }
                _ => (Rational::one(), Some(self.clone())),
            },
            _ => (Rational::one(), Some(self.clone())),
        }
    }

    /// `c * rest` for a canonical non-numeric `rest` that is not a sum.
    fn scaled(c: Rational, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        match rest.node() {
            Node::Mul(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::rational(c));
                v.extend(fs.iter().cloned());
                Expr::wrap(Node::Mul(v))
            }
            _ => Expr::wrap(Node::Mul(vec![Expr::rational(c), rest])),
        }
    }

    /// Whether the canonical representative carries a leading minus sign.
    pub fn is_negative_term(&self) -> bool {
        match self.node() {
            Node::Num(c) => c.is_negative(),
            Node::Mul(fs) => matches!(fs[0].node(), Node::Num(c) if c.is_negative()),
            Node::Add(ts) => ts[0].is_negative_term(),
            _ => false,
        }
    }

    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut like: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut push = |t: &Expr| {
            let (c, rest) = t.split_coeff();
            match rest {
                None => constant += c,
                Some(rest) => {
                    let slot = like.entry(rest).or_insert_with(Rational::zero);
                    *slot += c;
                }
            }
        };
        for t in terms {
            match t.node() {
                Node::Add(ts) => ts.iter().for_each(&mut push),
                _ => push(&t),
            }
        }
        let mut out = Vec::with_capacity(like.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::rational(constant));
        }
        for (rest, c) in like {
            if !c.is_zero() {
                out.push(Expr::scaled(c, rest));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::wrap(Node::Add(out)),
        }
    }

    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut powers: Vec<(Expr, Rational)> = Vec::new();
        for f in factors {
            collect_factor(&f, &mut coeff, &mut powers);
        }
        mul_powers(coeff, powers)
    }

    pub fn pow(base: Expr, e: Rational) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base;
        }
        match base.node() {
            Node::Pow(b, e1) if e.is_integer() => Expr::pow(b.clone(), e1 * &e),
            Node::Mul(fs) if e.is_integer() => {
                Expr::mul(fs.iter().map(|f| Expr::pow(f.clone(), e.clone())))
            }
            _ => mul_powers(Rational::one(), vec![(base, e)]),
        }
    }

    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self.clone(), int(n))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self.clone(), rat(1, 2))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn func(kind: Func, arg: Expr) -> Expr {
        match kind {
            Func::Sin => {
                if arg.is_zero() {
                    Expr::zero()
                } else if arg.is_negative_term() {
                    -Expr::func(Func::Sin, -arg)
                } else {
                    Expr::wrap(Node::Func(Func::Sin, arg))
                }
            }
            Func::Cos => {
                if arg.is_zero() {
                    Expr::one()
                } else if arg.is_negative_term() {
                    Expr::func(Func::Cos, -arg)
                } else {
                    Expr::wrap(Node::Func(Func::Cos, arg))
                }
            }
            Func::Arctan => {
                if arg.is_zero() {
                    Expr::zero()
                } else if arg.is_negative_term() {
                    -Expr::func(Func::Arctan, -arg)
                } else {
                    Expr::wrap(Node::Func(Func::Arctan, arg))
                }
            }
            Func::Exp => match arg.node() {
                _ if arg.is_zero() => Expr::one(),
                Node::Func(Func::Ln, x) => x.clone(),
                _ => Expr::wrap(Node::Func(Func::Exp, arg)),
            },
            Func::Ln => match arg.node() {
                _ if arg.is_one() => Expr::zero(),
                Node::Func(Func::Exp, x) => x.clone(),
                _ => Expr::wrap(Node::Func(Func::Ln, arg)),
            },
        }
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self.clone())
    }

    pub fn tan(&self) -> Expr {
        self.sin() * self.cos().recip()
    }

    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::func(Func::Ln, self.clone())
    }

    pub fn arctan(&self) -> Expr {
        Expr::func(Func::Arctan, self.clone())
    }

    pub fn bessel(kind: BesselKind, order: Expr, arg: Expr) -> Expr {
        Expr::wrap(Node::Bessel(kind, order, arg))
    }

    /// Rebuilds the tree bottom-up through the smart constructors, replacing
    /// leaves for which `leaf` returns a value.
    pub fn rebuild(&self, leaf: &dyn Fn(&Expr) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) | Node::Jet(_) | Node::Unknown(_) => {
                leaf(self).unwrap_or_else(|| self.clone())
            }
            Node::Func(k, a) => Expr::func(*k, a.rebuild(leaf)),
            Node::Bessel(k, o, a) => Expr::bessel(*k, o.rebuild(leaf), a.rebuild(leaf)),
            Node::Pow(b, e) => Expr::pow(b.rebuild(leaf), e.clone()),
            Node::Mul(fs) => Expr::mul(fs.iter().map(|f| f.rebuild(leaf))),
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.rebuild(leaf))),
        }
    }

    /// Visits every node in pre-order.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Func(_, a) => a.visit(f),
            Node::Bessel(_, o, a) => {
                o.visit(f);
                a.visit(f);
            }
            Node::Pow(b, _) => b.visit(f),
            Node::Mul(xs) | Node::Add(xs) => xs.iter().for_each(|x| x.visit(f)),
            _ => {}
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self.node() {
            Node::Func(_, a) => a.any(pred),
            Node::Bessel(_, o, a) => o.any(pred) || a.any(pred),
            Node::Pow(b, _) => b.any(pred),
            Node::Mul(xs) | Node::Add(xs) => xs.iter().any(|x| x.any(pred)),
            _ => false,
        }
    }

    /// Jet coordinates occurring anywhere in the tree, `u` included.
    pub fn jets(&self) -> Vec<JetIndex> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Node::Jet(j) = e.node() {
                out.push(*j);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Node::Sym(s) = e.node() {
                out.push(s.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }

    pub fn unknowns(&self) -> Vec<UnknownFn> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Node::Unknown(u) = e.node() {
                out.push(*u);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    pub fn has_unknowns(&self) -> bool {
        self.any(&|e| matches!(e.node(), Node::Unknown(_)))
    }

    /// Number of nodes, a rough size measure.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn collect_factor(f: &Expr, coeff: &mut Rational, powers: &mut Vec<(Expr, Rational)>) {
    match f.node() {
        Node::Num(c) => *coeff *= c,
        Node::Mul(fs) => fs.iter().for_each(|g| collect_factor(g, coeff, powers)),
        Node::Pow(b, e) => powers.push((b.clone(), e.clone())),
        _ => powers.push((f.clone(), Rational::one())),
    }
}

/// Core of product construction: merges bases, folds numeric powers, applies
/// the cosine reduction and expands over sums.
fn mul_powers(mut coeff: Rational, raw: Vec<(Expr, Rational)>) -> Expr {
    let mut merged: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();
    let mut queue = raw;
    loop {
        while let Some((b, e)) = queue.pop() {
            match b.node() {
                Node::Func(Func::Exp, a) => {
                    exp_args.push(Expr::mul([Expr::rational(e), a.clone()]))
                }
                _ => *merged.entry(b).or_insert_with(Rational::zero) += e,
            }
        }
        // compound bases whose merged exponent became an integer are split up
        let compound: Vec<Expr> = merged
            .iter()
            .filter(|(b, e)| {
                e.is_integer() && matches!(b.node(), Node::Mul(_) | Node::Pow(_, _))
            })
            .map(|(b, _)| b.clone())
            .collect();
        if compound.is_empty() {
            break;
        }
        for b in compound {
            let e = merged.remove(&b).unwrap();
            match b.node() {
                Node::Mul(fs) => {
                    for f in fs {
                        let mut c = Rational::one();
                        let mut sub = Vec::new();
                        collect_factor(f, &mut c, &mut sub);
                        coeff *= pow_rational_integer(&c, &e);
                        queue.extend(sub.into_iter().map(|(b2, e2)| (b2, e2 * &e)));
                    }
                }
                Node::Pow(b2, e2) => queue.push((b2.clone(), e2 * &e)),
                _ => unreachable!(),
            }
        }
    }
    if !exp_args.is_empty() {
        let ex = Expr::func(Func::Exp, Expr::add(exp_args));
        match ex.node() {
            Node::Func(Func::Exp, _) => {
                *merged.entry(ex).or_insert_with(Rational::zero) += Rational::one();
            }
            _ => {
                // exp(ln x) collapsed; fold the result back in
                let mut c = Rational::one();
                let mut sub = Vec::new();
                collect_factor(&ex, &mut c, &mut sub);
                let mut rest: Vec<(Expr, Rational)> = merged.into_iter().collect();
                rest.extend(sub);
                return mul_powers(coeff * c, rest);
            }
        }
    }

    let mut plain: Vec<(Expr, Rational)> = Vec::new();
    let mut sums: Vec<Expr> = Vec::new();
    for (b, e) in merged {
        if e.is_zero() {
            continue;
        }
        match b.node() {
            Node::Num(n) => {
                if n.is_zero() {
                    if e.is_positive() {
                        return Expr::zero();
                    }
                    plain.push((b, e));
                } else {
                    let (c, residual) = pow_rational(n, &e);
                    coeff *= c;
                    if let Some(res) = residual {
                        plain.push((b.clone(), res));
                    }
                }
            }
            Node::Func(Func::Cos, a) if e.is_integer() && e >= int(2) => {
                let n = e.to_integer().to_i64().unwrap();
                if n % 2 == 1 {
                    plain.push((b.clone(), Rational::one()));
                }
                let s2 = Expr::pow(a.sin(), int(2));
                let one_minus = Expr::add([Expr::one(), -s2]);
                for _ in 0..n / 2 {
                    sums.push(one_minus.clone());
                }
            }
            Node::Add(_) if e.is_integer() && e.is_positive() => {
                let n = e.to_integer().to_i64().unwrap();
                for _ in 0..n {
                    sums.push(b.clone());
                }
            }
            _ => plain.push((b, e)),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }

    let mut factors: Vec<Expr> = Vec::with_capacity(plain.len() + 1);
    for (b, e) in plain {
        if e.is_one() {
            factors.push(b);
        } else {
            factors.push(Expr::wrap(Node::Pow(b, e)));
        }
    }
    factors.sort();

    if sums.is_empty() {
        if factors.is_empty() {
            return Expr::rational(coeff);
        }
        if factors.len() == 1 && coeff.is_one() {
            return factors.pop().unwrap();
        }
        let mut v = Vec::with_capacity(factors.len() + 1);
        if !coeff.is_one() {
            v.push(Expr::rational(coeff));
        }
        v.extend(factors);
        if v.len() == 1 {
            return v.pop().unwrap();
        }
        return Expr::wrap(Node::Mul(v));
    }

    // distribute over every sum factor
    let mut head = factors;
    head.push(Expr::rational(coeff));
    let mut acc: Vec<Expr> = vec![Expr::mul(head)];
    for s in sums {
        let ts = s.terms();
        let mut next = Vec::with_capacity(acc.len() * ts.len());
        for a in &acc {
            for t in &ts {
                next.push(Expr::mul([a.clone(), t.clone()]));
            }
        }
        acc = vec![Expr::add(next)];
        // keep the partially expanded sum flat
        acc = acc[0].terms();
        if acc.is_empty() {
            return Expr::zero();
        }
    }
    Expr::add(acc)
}

fn pow_rational_integer(base: &Rational, e: &Rational) -> Rational {
    let n = e.to_integer().to_i32().expect("exponent too large");
    num_traits::pow::Pow::pow(base, n)
}

/// `base^e` as `(exact part, residual fractional exponent of base)`.
fn pow_rational(base: &Rational, e: &Rational) -> (Rational, Option<Rational>) {
    if e.is_integer() {
        return (pow_rational_integer(base, e), None);
    }
    if base.is_negative() {
        return (Rational::one(), Some(e.clone()));
    }
    let floor = e.floor();
    let frac = e - &floor;
    let whole = pow_rational_integer(base, &floor);
    // frac = p/q with 0 < p < q
    let p = frac.numer().to_u32().unwrap();
    let q = frac.denom().to_u32().unwrap();
    let num = num_traits::pow::Pow::pow(base.numer(), p);
    let den = num_traits::pow::Pow::pow(base.denom(), p);
    match (exact_root(&num, q), exact_root(&den, q)) {
        (Some(a), Some(b)) => (whole * Rational::new(a, b), None),
        _ => (whole, Some(frac)),
    }
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.nth_root(q);
    if num_traits::pow::Pow::pow(&root, q) == *n {
        Some(root)
    } else {
        None
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add([self, -rhs])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs.recip()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self])
    }
}

impl<'a> std::ops::Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add([self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::add([self.clone(), -rhs.clone()])
    }
}

impl<'a> std::ops::Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul([self.clone(), rhs.clone()])
    }
}

impl<'a> std::ops::Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        Expr::mul([self.clone(), rhs.recip()])
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::rational(r)
    }
}
