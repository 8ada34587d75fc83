//! Exact Laurent series in z with polynomial coefficients in the symbols t and v.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};
use crate::text::Cursor;

/// A polynomial in t and v with rational coefficients, keyed by (deg_t, deg_v).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::monomial(c, 0, 0)
    }

    pub fn monomial(c: Q, t: u32, v: u32) -> Self {
        let mut p = Poly::zero();
        p.add_term((t, v), c);
        p
    }

    pub fn t() -> Self {
        Poly::monomial(Q::one(), 1, 0)
    }

    pub fn v() -> Self {
        Poly::monomial(Q::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Q)> {
        self.terms.iter()
    }

    /// The rational value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn coeff(&self, t: u32, v: u32) -> Q {
        self.terms.get(&(t, v)).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, k: (u32, u32), c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in o.terms() {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in o.terms() {
            out.add_term(*k, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a, b), x) in self.terms() {
            for ((c, d), y) in o.terms() {
                out.add_term((a + c, b + d), x * y);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn t_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    /// Drops every monomial whose t-degree exceeds `order`.
    pub fn truncate_t(&self, order: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.0 <= order)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Coefficient of t^k, a polynomial in v.
    pub fn coeff_t(&self, k: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0 == k)
                .map(|(m, c)| ((0, m.1), c.clone()))
                .collect(),
        }
    }

    /// Substitutes t := c.
    pub fn eval_t(&self, c: &Q) -> Poly {
        let mut out = Poly::zero();
        for ((a, b), x) in self.terms() {
            out.add_term((0, *b), x * pow_q(c, *a));
        }
        out
    }

    /// Renames t to v; the input must not already involve v.
    pub fn rename_t_to_v(&self) -> Poly {
        debug_assert!(self.terms.keys().all(|k| k.1 == 0));
        Poly {
            terms: self.terms.iter().map(|((a, _), c)| ((0, *a), c.clone())).collect(),
        }
    }

    /// Substitutes t := t + v; the input must not already involve v.
    pub fn shift_t_by_v(&self) -> Poly {
        let mut out = Poly::zero();
        for ((a, b), x) in self.terms() {
            debug_assert_eq!(*b, 0);
            for i in 0..=*a {
                let binom = Q::from_integer(crate::rational::binomial(*a, i));
                out.add_term((i, a - i), x * binom);
            }
        }
        out
    }

    /// Formal derivative in t.
    pub fn diff_t(&self) -> Poly {
        let mut out = Poly::zero();
        for ((a, b), x) in self.terms() {
            if *a > 0 {
                out.add_term((a - 1, *b), x * Q::from_integer(BigInt::from(*a)));
            }
        }
        out
    }
}

fn pow_q(c: &Q, n: u32) -> Q {
    (0..n).fold(Q::one(), |acc, _| acc * c)
}

impl From<Q> for Poly {
    fn from(c: Q) -> Self {
        Poly::constant(c)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || (*a == 0 && *b == 0) {
                factors.push(fmt_q(&abs));
            }
            for (sym, e) in [("t", *a), ("v", *b)] {
                match e {
                    0 => {}
                    1 => factors.push(sym.to_string()),
                    _ => factors.push(format!("{sym}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// Bounds on the z-powers a series may carry.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Window {
    /// Most negative power allowed; a lower power is a pole overflow.
    pub min_pow: i32,
    /// Highest power retained; higher powers are truncated.
    pub max_pow: i32,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            min_pow: -16,
            max_pow: 16,
        }
    }
}

impl Window {
    fn meet(self, o: Window) -> Window {
        Window {
            min_pow: self.min_pow.max(o.min_pow),
            max_pow: self.max_pow.min(o.max_pow),
        }
    }
}

/// A Laurent series Σ a_k z^k with finitely many poles. When `precision` is `Some(p)`,
/// coefficients above z^p are unknown; otherwise the series is an exact Laurent polynomial.
#[derive(Clone, Debug)]
pub struct LaurentSeries {
    terms: BTreeMap<i32, Poly>,
    precision: Option<i32>,
    window: Window,
}

impl PartialEq for LaurentSeries {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms && self.precision == o.precision
    }
}

impl Eq for LaurentSeries {}

impl Default for LaurentSeries {
    fn default() -> Self {
        LaurentSeries::zero()
    }
}

impl LaurentSeries {
    pub fn zero() -> Self {
        LaurentSeries {
            terms: BTreeMap::new(),
            precision: None,
            window: Window::default(),
        }
    }

    pub fn one() -> Self {
        LaurentSeries::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        LaurentSeries::monomial(Poly::constant(c), 0)
    }

    /// c·z^k in the default window.
    pub fn monomial(c: Poly, k: i32) -> Self {
        let mut s = LaurentSeries::zero();
        if !c.is_zero() {
            s.terms.insert(k, c);
        }
        s
    }

    /// Σ c_k z^k from (k, c_k) pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Q)>) -> Self {
        let mut s = LaurentSeries::zero();
        for (k, c) in terms {
            s.add_coeff(k, Poly::constant(c));
        }
        s
    }

    pub fn z() -> Self {
        LaurentSeries::monomial(Poly::one(), 1)
    }

    pub fn with_window(mut self, window: Window) -> Result<Self> {
        self.window = window;
        self.normalize()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_none()
    }

    /// True when the series has no nonzero known coefficients.
    pub fn is_known_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.precision.is_some()
    }

    pub fn precision(&self) -> Option<i32> {
        self.precision
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &Poly)> {
        self.terms.iter()
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    /// Lowest power that may be nonzero; `None` for the exact zero series.
    fn effective_valuation(&self) -> Option<i32> {
        match (self.valuation(), self.precision) {
            (Some(v), Some(p)) => Some(v.min(p + 1)),
            (Some(v), None) => Some(v),
            (None, Some(p)) => Some(p + 1),
            (None, None) => None,
        }
    }

    /// Order of the pole at z = 0 (zero if none).
    pub fn pole_order(&self) -> i32 {
        self.valuation().map_or(0, |v| (-v).max(0))
    }

    pub fn coeff(&self, k: i32) -> Result<Poly> {
        if let Some(p) = self.precision {
            if k > p {
                return Err(Error::InsufficientPrecision { needed: k, known: p });
            }
        }
        Ok(self.terms.get(&k).cloned().unwrap_or_default())
    }

    fn add_coeff(&mut self, k: i32, c: Poly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// Applies the window: drops powers above the retained range, rejects poles below it.
    fn normalize(mut self) -> Result<Self> {
        if let Some(p) = self.precision {
            self.terms.retain(|k, _| *k <= p);
        }
        if let Some(v) = self.valuation() {
            if v < self.window.min_pow {
                return Err(Error::PoleOverflow {
                    order: -v,
                    bound: -self.window.min_pow,
                });
            }
        }
        let max = self.window.max_pow;
        if self.terms.keys().next_back().is_some_and(|k| *k > max) {
            self.terms.retain(|k, _| *k <= max);
            self.precision = Some(self.precision.map_or(max, |p| p.min(max)));
        }
        Ok(self)
    }

    fn min_precision(a: Option<i32>, b: Option<i32>) -> Option<i32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, o: &LaurentSeries) -> LaurentSeries {
        let mut out = self.clone();
        out.window = self.window.meet(o.window);
        out.precision = Self::min_precision(self.precision, o.precision);
        for (k, c) in o.terms() {
            out.add_coeff(*k, c.clone());
        }
        // Sums never deepen poles beyond the inputs, which both sat inside their windows.
        match out.clone().normalize() {
            Ok(s) => s,
            Err(_) => out,
        }
    }

    pub fn sub(&self, o: &LaurentSeries) -> LaurentSeries {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LaurentSeries {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> LaurentSeries {
        self.scale_poly(&Poly::constant(c.clone()))
    }

    pub fn scale_poly(&self, c: &Poly) -> LaurentSeries {
        let mut out = LaurentSeries {
            terms: BTreeMap::new(),
            precision: self.precision,
            window: self.window,
        };
        for (k, x) in self.terms() {
            out.add_coeff(*k, x.mul(c));
        }
        out
    }

    /// Multiplies by z^k.
    pub fn shift(&self, k: i32) -> Result<LaurentSeries> {
        LaurentSeries {
            terms: self.terms.iter().map(|(p, c)| (p + k, c.clone())).collect(),
            precision: self.precision.map(|p| p + k),
            window: self.window,
        }
        .normalize()
    }

    pub fn mul(&self, o: &LaurentSeries) -> Result<LaurentSeries> {
        let window = self.window.meet(o.window);
        // A truncated factor limits the product to its precision plus the other factor's
        // lowest possibly-nonzero power.
        let (va, vb) = (self.effective_valuation(), o.effective_valuation());
        if va.is_none() || vb.is_none() {
            return Ok(LaurentSeries {
                terms: BTreeMap::new(),
                precision: None,
                window,
            });
        }
        let mut precision = None;
        if let Some(p) = self.precision {
            precision = Some(p + vb.unwrap());
        }
        if let Some(p) = o.precision {
            precision = Self::min_precision(precision, Some(p + va.unwrap()));
        }
        let mut out = LaurentSeries {
            terms: BTreeMap::new(),
            precision,
            window,
        };
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                if precision.is_some_and(|p| a + b > p) || a + b > window.max_pow {
                    if a + b > window.max_pow {
                        out.precision = Self::min_precision(out.precision, Some(window.max_pow));
                    }
                    continue;
                }
                out.add_coeff(a + b, x.mul(y));
            }
        }
        out.normalize()
    }

    pub fn pow(&self, n: u32) -> Result<LaurentSeries> {
        let mut out = LaurentSeries::one().with_window(self.window)?;
        for _ in 0..n {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Minimal subtraction: the strictly negative powers.
    pub fn pole_part(&self) -> LaurentSeries {
        LaurentSeries {
            terms: self
                .terms
                .range(..0)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            precision: None,
            window: self.window,
        }
    }

    /// The complement id − R_ms: the non-negative powers.
    pub fn regular_part(&self) -> LaurentSeries {
        LaurentSeries {
            terms: self
                .terms
                .range(0..)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            precision: self.precision,
            window: self.window,
        }
    }

    /// The value at z = 0 of a pole-free series.
    pub fn limit_at_zero(&self) -> Result<Poly> {
        let order = self.pole_order();
        if order > 0 {
            return Err(Error::LimitDoesNotExist { pole_order: order });
        }
        self.coeff(0)
    }

    /// Applies a map to every coefficient polynomial.
    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> LaurentSeries {
        let mut out = LaurentSeries {
            terms: BTreeMap::new(),
            precision: self.precision,
            window: self.window,
        };
        for (k, c) in self.terms() {
            out.add_coeff(*k, f(c));
        }
        out
    }

    /// Maximal t-degree over all coefficients.
    pub fn t_degree(&self) -> u32 {
        self.terms.values().map(|p| p.t_degree()).max().unwrap_or(0)
    }

    pub fn parse(src: &str) -> Result<LaurentSeries> {
        let mut cur = Cursor::new(src);
        let s = parse_expr(&mut cur)?;
        cur.finish()?;
        Ok(s)
    }

}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            let (neg, body) = render_term(*k, c);
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            f.write_str(&body)?;
        }
        if let Some(p) = self.precision {
            let o = format!("O({})", zpow(p + 1));
            if first {
                f.write_str(&o)?;
            } else {
                write!(f, " + {o}")?;
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn zpow(k: i32) -> String {
    match k {
        0 => "1".into(),
        1 => "z".into(),
        k if k > 1 => format!("z^{k}"),
        -1 => "1/z".into(),
        k => format!("1/z^{}", -k),
    }
}

fn render_term(k: i32, c: &Poly) -> (bool, String) {
    let zpart = match k.abs() {
        0 => String::new(),
        1 => "z".into(),
        a => format!("z^{a}"),
    };
    let op = if k < 0 { "/" } else { "*" };
    if let Some(r) = c.as_constant() {
        let neg = r.is_negative();
        let abs = r.abs();
        let body = if k == 0 {
            fmt_q(&abs)
        } else if abs.is_one() {
            if k < 0 {
                format!("1/{zpart}")
            } else {
                zpart
            }
        } else if abs.denom().is_one() {
            format!("{}{op}{zpart}", fmt_q(&abs))
        } else {
            format!("({}){op}{zpart}", fmt_q(&abs))
        };
        return (neg, body);
    }
    if k == 0 {
        let text = c.to_string();
        // A flat sum: the sign of its first monomial becomes the joining sign.
        return match text.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, text),
        };
    }
    (false, format!("({c}){op}{zpart}"))
}

// Expression grammar:
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | power
//   power  := atom ("^" ["-"] integer)?
//   atom   := rational | "z" | "t" | "v" | "(" expr ")" | "O(" z-power ")"
// Division is allowed only by a nonzero rational multiple of a power of z.

fn parse_expr(cur: &mut Cursor<'_>) -> Result<LaurentSeries> {
    cur.skip_blank();
    let mut acc = parse_term(cur)?;
    loop {
        cur.skip_blank();
        if cur.eat('+') {
            let rhs = parse_term(cur)?;
            acc = acc.add(&rhs);
        } else if cur.peek() == Some('-') {
            cur.bump();
            let rhs = parse_term(cur)?;
            acc = acc.sub(&rhs);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>) -> Result<LaurentSeries> {
    cur.skip_blank();
    let mut acc = parse_unary(cur)?;
    loop {
        cur.skip_blank();
        if cur.eat('*') {
            let rhs = parse_unary(cur)?;
            acc = acc.mul(&rhs)?;
        } else if cur.peek() == Some('/') {
            cur.bump();
            let (line, col) = cur.position();
            let rhs = parse_unary(cur)?;
            let inv = invert_monomial(&rhs)
                .ok_or_else(|| Error::parse(line, col, "can only divide by c*z^k with c ≠ 0"))?;
            acc = acc.mul(&inv)?;
        } else {
            return Ok(acc);
        }
    }
}

fn invert_monomial(s: &LaurentSeries) -> Option<LaurentSeries> {
    if s.truncated() || s.terms.len() != 1 {
        return None;
    }
    let (k, c) = s.terms.iter().next()?;
    let r = c.as_constant()?;
    Some(LaurentSeries::monomial(Poly::constant(r.recip()), -k))
}

fn parse_unary(cur: &mut Cursor<'_>) -> Result<LaurentSeries> {
    cur.skip_blank();
    if cur.eat('-') {
        return Ok(parse_unary(cur)?.neg());
    }
    parse_power(cur)
}

fn parse_power(cur: &mut Cursor<'_>) -> Result<LaurentSeries> {
    let base = parse_atom(cur)?;
    cur.skip_blank();
    if !cur.eat('^') {
        return Ok(base);
    }
    cur.skip_blank();
    let negative = cur.eat('-');
    let n = cur.small_unsigned()?;
    if n > 64 {
        return Err(cur.error("exponent too large"));
    }
    let base = if negative {
        invert_monomial(&base).ok_or_else(|| cur.error("negative exponents need a monomial base"))?
    } else {
        base
    };
    base.pow(n)
}

fn parse_atom(cur: &mut Cursor<'_>) -> Result<LaurentSeries> {
    cur.skip_blank();
    if let Some(n) = cur.unsigned() {
        return Ok(LaurentSeries::constant(Q::from_integer(n)));
    }
    if cur.eat('(') {
        let e = parse_expr(cur)?;
        cur.skip_blank();
        cur.expect(')')?;
        return Ok(e);
    }
    if cur.rest().starts_with("O(") {
        cur.bump();
        cur.bump();
        cur.skip_blank();
        let k = if cur.eat('1') {
            0
        } else {
            if !cur.eat('z') {
                return Err(cur.error("expected z inside O(...)"));
            }
            if cur.eat('^') {
                let neg = cur.eat('-');
                let n = cur.small_unsigned()? as i32;
                if neg {
                    -n
                } else {
                    n
                }
            } else {
                1
            }
        };
        cur.skip_blank();
        cur.expect(')')?;
        let mut s = LaurentSeries::zero();
        s.precision = Some(k - 1);
        return Ok(s);
    }
    let start = cur.position();
    match cur.ident() {
        Some("z") => Ok(LaurentSeries::z()),
        Some("t") => Ok(LaurentSeries::monomial(Poly::t(), 0)),
        Some("v") => Ok(LaurentSeries::monomial(Poly::v(), 0)),
        Some(other) => Err(Error::parse(
            start.0,
            start.1,
            format!("unknown symbol `{other}`"),
        )),
        None => Err(cur.error("expected a number, symbol or `(`")),
    }
}

/// Choice of operator for the Rota-Baxter check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RbOperator {
    MinimalSubtraction,
    Complement,
    Identity,
    Zero,
    /// Keeps only the z⁰ coefficient.
    ConstantTerm,
}

impl RbOperator {
    pub fn apply(self, x: &LaurentSeries) -> LaurentSeries {
        match self {
            RbOperator::MinimalSubtraction => x.pole_part(),
            RbOperator::Complement => x.regular_part(),
            RbOperator::Identity => x.clone(),
            RbOperator::Zero => LaurentSeries::zero(),
            RbOperator::ConstantTerm => {
                LaurentSeries::monomial(x.terms.get(&0).cloned().unwrap_or_default(), 0)
            }
        }
    }
}

/// Outcome of a Rota-Baxter check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RbReport {
    pub holds: bool,
    pub counterexample: Option<(LaurentSeries, LaurentSeries)>,
}

/// Checks R(x)R(y) + R(xy) = R(R(x)y + xR(y)) on every sample pair.
pub fn rota_baxter_check(
    r: &dyn Fn(&LaurentSeries) -> LaurentSeries,
    samples: &[(LaurentSeries, LaurentSeries)],
) -> Result<RbReport> {
    for (x, y) in samples {
        let rx = r(x);
        let ry = r(y);
        let lhs = rx.mul(&ry)?.add(&r(&x.mul(y)?));
        let rhs = r(&rx.mul(y)?.add(&x.mul(&ry)?));
        if lhs != rhs {
            return Ok(RbReport {
                holds: false,
                counterexample: Some((x.clone(), y.clone())),
            });
        }
    }
    Ok(RbReport {
        holds: true,
        counterexample: None,
    })
}

/// All pairs of small series c·z^j + d·z^k with j, k ∈ [−2, 2] and c, d ∈ {0, 1}.
pub fn small_sample_pairs() -> Vec<(LaurentSeries, LaurentSeries)> {
    let mut singles = Vec::new();
    for j in -2..=2 {
        singles.push(LaurentSeries::monomial(Poly::one(), j));
        for k in j + 1..=2 {
            singles.push(LaurentSeries::from_terms([(j, Q::one()), (k, Q::one())]));
        }
    }
    let mut out = Vec::new();
    for x in &singles {
        for y in &singles {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// Searches the small sample pairs for a violation of the weight-one identity.
pub fn rota_baxter_search(op: RbOperator) -> Result<RbReport> {
    rota_baxter_check(&|x| op.apply(x), &small_sample_pairs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn s(src: &str) -> LaurentSeries {
        LaurentSeries::parse(src).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(s("1/z").mul(&s("z")).unwrap(), LaurentSeries::one());
        assert_eq!(s("(1/z + 1)^2"), s("1/z^2 + 2/z + 1"));
        let tight = s("1/z")
            .with_window(Window {
                min_pow: -1,
                max_pow: 4,
            })
            .unwrap();
        assert_eq!(
            tight.mul(&tight),
            Err(Error::PoleOverflow { order: 2, bound: 1 })
        );
    }

    #[test]
    fn minimal_subtraction() {
        assert_eq!(s("1/z + 2 + 3*z").pole_part(), s("1/z"));
        assert!(s("5").pole_part().is_zero());
        assert!(s("1/z^2 - 1/z^2").pole_part().is_zero());
        let x = s("1/z^3 + t/z + 4 + z");
        assert_eq!(x.pole_part().pole_part(), x.pole_part());
        assert_eq!(x.pole_part().add(&x.regular_part()), x);
    }

    #[test]
    fn rota_baxter_operators() {
        let pair = vec![(s("1/z + 1"), s("1/z"))];
        let ms = |x: &LaurentSeries| x.pole_part();
        assert!(rota_baxter_check(&ms, &pair).unwrap().holds);
        assert!(rota_baxter_search(RbOperator::MinimalSubtraction).unwrap().holds);
        assert!(rota_baxter_search(RbOperator::Complement).unwrap().holds);
        assert!(rota_baxter_search(RbOperator::Identity).unwrap().holds);
        assert!(rota_baxter_search(RbOperator::Zero).unwrap().holds);
        let bad = rota_baxter_search(RbOperator::ConstantTerm).unwrap();
        assert!(!bad.holds);
        let (x, y) = bad.counterexample.unwrap();
        let p = RbOperator::ConstantTerm;
        let lhs = p.apply(&x).mul(&p.apply(&y)).unwrap().add(&p.apply(&x.mul(&y).unwrap()));
        let rhs = p.apply(&p.apply(&x).mul(&y).unwrap().add(&x.mul(&p.apply(&y)).unwrap()));
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn limits() {
        assert_eq!(s("3 + z").limit_at_zero().unwrap(), Poly::constant(qi(3)));
        assert_eq!(s("t + t^2*z").limit_at_zero().unwrap(), Poly::t());
        assert_eq!(
            s("1/z + 1").limit_at_zero(),
            Err(Error::LimitDoesNotExist { pole_order: 1 })
        );
    }

    #[test]
    fn printing() {
        let x = s("1/z^2 + 3/2 + 2*t*z");
        assert_eq!(x.to_string(), "1/z^2 + 3/2 + (2*t)*z");
        assert_eq!(s("-1/2/z - 3*z^2").to_string(), "-(1/2)/z - 3*z^2");
        assert_eq!(s("1 - t").to_string(), "1 - t");
        assert_eq!(s("-1 + t").to_string(), "-1 + t");
        assert_eq!(s("0").to_string(), "0");
        assert_eq!(s("1 + z + O(z^3)").to_string(), "1 + z + O(z^3)");
        for text in ["1/z^2 + 3/2 + (2*t)*z", "-(1/2)/z - 3*z^2", "-1 + t - v^2", "(t - 1/3*v)/z + O(z^2)"] {
            assert_eq!(s(&s(text).to_string()), s(text), "{text}");
        }
    }

    #[test]
    fn truncation_tracking() {
        let x = s("1/z + 1 + O(z^2)");
        assert_eq!(x.precision(), Some(1));
        let y = x.mul(&x).unwrap();
        assert_eq!(y.precision(), Some(0));
        assert_eq!(y.coeff(-2).unwrap(), Poly::one());
        assert!(y.coeff(1).is_err());
    }

    #[test]
    fn polynomial_substitutions() {
        let p = Poly::t().pow(2).add(&Poly::t().scale(&q(1, 2)));
        let shifted = p.shift_t_by_v();
        // (t+v)^2 + (t+v)/2
        assert_eq!(shifted.coeff(1, 1), qi(2));
        assert_eq!(shifted.coeff(0, 1), q(1, 2));
        assert_eq!(p.rename_t_to_v().coeff(0, 2), qi(1));
        assert_eq!(p.diff_t(), Poly::t().scale(&qi(2)).add(&Poly::constant(q(1, 2))));
        assert_eq!(p.eval_t(&qi(2)), Poly::constant(qi(5)));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(LaurentSeries::parse("1/(1+z)"), Err(Error::Parse { .. })));
        assert!(matches!(LaurentSeries::parse("x"), Err(Error::Parse { line: 1, column: 1, .. })));
        assert!(matches!(LaurentSeries::parse("1 +"), Err(Error::Parse { .. })));
    }
}
