//! Combinatorial Dyson-Schwinger equations X = I + Σ_n α^n ω_n B⁺_{γ_n}(X^{n+1}):
//! the recursive solution, the closed tree formula, the Hopf-subalgebra property,
//! the word-level equation with its Euler product, and the ζ character.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hopf::{coproduct, TensorPoly};
use crate::rational::{factorial, fmt_q, parse_q, to_f64, Q};
use crate::text::Cursor;
use crate::trees::{enumerate_trees, Alphabet, Decoration, Forest, TreePoly};
use crate::words::{shuffle, Word, WordPoly};

/// One term ω_n B⁺_{γ_n}(X^{n+1}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DseTerm {
    pub n: u32,
    pub omega: Q,
    pub label: Decoration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DseSpec {
    alphabet: Alphabet,
    terms: Vec<DseTerm>,
}

impl DseSpec {
    /// Terms given as (n, ω_n, label); label γ_n gets weight n.
    pub fn new(terms: &[(u32, Q, &str)]) -> Result<DseSpec> {
        let mut sorted: Vec<&(u32, Q, &str)> = terms.iter().collect();
        sorted.sort_by_key(|t| t.0);
        let mut letters: Vec<(&str, u32)> = Vec::new();
        for (i, (n, _, label)) in sorted.iter().enumerate() {
            if *n == 0 {
                return Err(Error::invalid("term index n must be positive"));
            }
            if i > 0 && sorted[i - 1].0 == *n {
                return Err(Error::invalid(format!("term n = {n} given twice")));
            }
            if letters.iter().any(|(l, _)| l == label) {
                return Err(Error::invalid(format!("label `{label}` used by two terms")));
            }
            letters.push((label, *n));
        }
        let alphabet = Alphabet::new(&letters)?;
        let terms = sorted
            .iter()
            .map(|(n, omega, label)| {
                Ok(DseTerm {
                    n: *n,
                    omega: omega.clone(),
                    label: alphabet.get(label)?.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DseSpec { alphabet, terms })
    }

    /// Parses lines `n omega label`; `#` starts a comment.
    pub fn parse(src: &str) -> Result<DseSpec> {
        let mut raw: Vec<(u32, Q, String)> = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let mut cur = Cursor::new(content);
            let relocate = |e: Error| match e {
                Error::Parse { column, message, .. } => Error::Parse {
                    line: lineno + 1,
                    column,
                    message,
                },
                other => other,
            };
            let parsed = (|| {
                cur.skip_blank();
                let n = cur.small_unsigned()?;
                cur.skip_blank();
                let (_, col) = cur.position();
                let start = content.len() - cur.rest().len();
                while cur.peek().is_some_and(|c| !c.is_whitespace()) {
                    cur.bump();
                }
                let token = &content[start..content.len() - cur.rest().len()];
                let omega = parse_q(token).map_err(|_| {
                    Error::parse(1, col, format!("expected a rational weight, found `{token}`"))
                })?;
                cur.skip_blank();
                let label = cur
                    .ident()
                    .ok_or_else(|| cur.error("expected a label"))?
                    .to_string();
                cur.finish()?;
                Ok((n, omega, label))
            })()
            .map_err(relocate)?;
            raw.push(parsed);
        }
        if raw.is_empty() {
            return Err(Error::parse(1, 1, "empty equation: at least one term `n omega label` is required"));
        }
        let borrowed: Vec<(u32, Q, &str)> = raw.iter().map(|(n, o, l)| (*n, o.clone(), l.as_str())).collect();
        DseSpec::new(&borrowed)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn terms(&self) -> &[DseTerm] {
        &self.terms
    }

    fn omega(&self, n: u32) -> Option<&Q> {
        self.terms.iter().find(|t| t.n == n).map(|t| &t.omega)
    }
}

impl fmt::Display for DseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} {} {}", t.n, fmt_q(&t.omega), t.label)?;
        }
        Ok(())
    }
}

/// c_0, …, c_N of X = Σ α^n c_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DseSolution {
    pub coefficients: Vec<TreePoly>,
}

impl DseSolution {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn c(&self, n: usize) -> &TreePoly {
        &self.coefficients[n]
    }

    /// Degree-s part of X^j, i.e. Σ_{k_1+…+k_j = s} c_{k_1}⋯c_{k_j}; needs s ≤ N.
    pub fn power_part(&self, j: usize, s: usize) -> TreePoly {
        power_parts(&self.coefficients, j)[s].clone()
    }
}

/// (X^j)_s for s = 0..=N from the truncated series X.
fn power_parts(c: &[TreePoly], j: usize) -> Vec<TreePoly> {
    let n = c.len();
    let mut acc: Vec<TreePoly> = (0..n)
        .map(|s| if s == 0 { TreePoly::one() } else { TreePoly::zero() })
        .collect();
    for _ in 0..j {
        let mut next = vec![TreePoly::zero(); n];
        for (a, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in c.iter().enumerate().take(n - a) {
                next[a + b] = next[a + b].add(&x.mul(y));
            }
        }
        acc = next;
    }
    acc
}

/// c_n = Σ_{m ≤ n} ω_m B⁺_{γ_m}((X^{m+1})_{n−m}).
pub fn solve_dse(spec: &DseSpec, order: usize) -> DseSolution {
    let mut c = vec![TreePoly::one()];
    for n in 1..=order {
        let mut cn = TreePoly::zero();
        for term in &spec.terms {
            let m = term.n as usize;
            if m > n {
                continue;
            }
            let inner = power_parts(&c, m + 1)[n - m].clone();
            cn = cn.add(&inner.graft(&term.label).scale(&term.omega));
        }
        c.push(cn);
    }
    DseSolution { coefficients: c }
}

/// c_n = Σ_{|t| = n} t/sym(t) Π_v ρ_v with ρ_v = ω_{|v|}(|v|+1)!/(|v|+1−fert(v))!.
pub fn tree_formula_solution(spec: &DseSpec, order: usize) -> Result<DseSolution> {
    let mut c = vec![TreePoly::one()];
    c.extend((1..=order).map(|_| TreePoly::zero()));
    if order == 0 {
        return Ok(DseSolution { coefficients: c });
    }
    for t in enumerate_trees(&spec.alphabet, order as u32)? {
        let mut weight = Q::one() / Q::from_integer(t.symmetry_factor());
        for (d, fert) in t.labels().iter().zip(t.fertilities()) {
            let w = d.weight();
            let omega = spec.omega(w).cloned().unwrap_or_else(Q::zero);
            if fert as u32 > w + 1 {
                weight = Q::zero();
                break;
            }
            weight *= omega * Q::from_integer(factorial(w + 1) / factorial(w + 1 - fert as u32));
        }
        let n = t.degree() as usize;
        c[n].add_term(Forest::single(t), weight);
    }
    Ok(DseSolution { coefficients: c })
}

/// The first tensor term where Δ(c_n) and Σ_k P^n_k ⊗ c_k disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraWitness {
    pub n: usize,
    pub left: Forest,
    pub right: Forest,
    pub actual: Q,
    pub expected: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubalgebraReport {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<SubalgebraWitness>,
}

/// Δ(c_n) = Σ_k P^n_k ⊗ c_k with P^n_k = (X^{k+1})_{n−k}, for n = 1..=N.
pub fn subalgebra_check(sol: &DseSolution) -> SubalgebraReport {
    let c = &sol.coefficients;
    let powers: Vec<Vec<TreePoly>> = (0..=c.len()).map(|j| power_parts(c, j)).collect();
    for n in 1..c.len() {
        let actual = coproduct(&c[n]);
        let mut expected = TensorPoly::zero();
        for k in 0..=n {
            expected = expected.add(&TensorPoly::tensor(&powers[k + 1][n - k], &c[k]));
        }
        if actual != expected {
            let mut keys: Vec<&(Forest, Forest)> = actual.terms().map(|(k, _)| k).collect();
            keys.extend(expected.terms().map(|(k, _)| k));
            keys.sort();
            let key = keys
                .into_iter()
                .find(|(l, r)| actual.coeff(l, r) != expected.coeff(l, r))
                .expect("tensors differ");
            return SubalgebraReport {
                holds: false,
                checked: n,
                witness: Some(SubalgebraWitness {
                    n,
                    left: key.0.clone(),
                    right: key.1.clone(),
                    actual: actual.coeff(&key.0, &key.1),
                    expected: expected.coeff(&key.0, &key.1),
                }),
            };
        }
    }
    SubalgebraReport {
        holds: true,
        checked: c.len() - 1,
        witness: None,
    }
}

/// (1 − αβh) P′(h) = α P(h) coefficientwise through h^{order−1}, with P(0) = 1.
pub fn foissy_criterion(p: &[Q], alpha: &Q, beta: &Q, order: usize) -> Result<bool> {
    if p.first().is_none_or(|c| !c.is_one()) {
        return Err(Error::invalid("P must have constant term 1"));
    }
    if p.len() < order + 1 {
        return Err(Error::InsufficientTruncation {
            needed: order as u32,
            available: p.len() as u32 - 1,
        });
    }
    let ab = alpha * beta;
    for k in 0..order {
        let kq = Q::from_integer(BigInt::from(k));
        let lhs = Q::from_integer(BigInt::from(k + 1)) * &p[k + 1] - &ab * kq * &p[k];
        if lhs != alpha * &p[k] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A word series whose coefficients carry a power of the formal coupling α.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlphaSeries {
    terms: BTreeMap<(u32, Word), Q>,
}

impl AlphaSeries {
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Word, &Q)> {
        self.terms.iter().map(|((k, w), c)| (*k, w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha_power: u32, w: &Word) -> Q {
        self.terms.get(&(alpha_power, w.clone())).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, k: u32, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (k, w);
        let e = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// The α = 1 specialization.
    pub fn at_one(&self) -> WordPoly {
        let mut out = WordPoly::zero();
        for ((_, w), c) in &self.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for AlphaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((k, w), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let abs = c.abs();
            let mut factors = Vec::new();
            if !abs.is_one() || (*k == 0 && w.is_empty()) {
                factors.push(fmt_q(&abs));
            }
            match k {
                0 => {}
                1 => factors.push("α".to_string()),
                _ => factors.push(format!("α^{k}")),
            }
            if !w.is_empty() {
                factors.push(w.to_string());
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

/// X = 1 + Σ_p α B⁺_{f_p}(X) on words, where B⁺_a appends a; truncated at `max_weight`.
pub fn dse_word_solve(letters: &[Decoration], max_weight: u32) -> AlphaSeries {
    let mut x = AlphaSeries::default();
    x.add_term(0, Word::empty(), Q::one());
    loop {
        let mut next = AlphaSeries::default();
        next.add_term(0, Word::empty(), Q::one());
        for a in letters {
            for ((k, w), c) in &x.terms {
                let grown = w.concat(&Word::letter(a.clone()));
                if grown.weight() <= max_weight {
                    next.add_term(k + 1, grown, c.clone());
                }
            }
        }
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Shuffle product over the letters of the geometric factors Σ_k α^k a^k, truncated at
/// `max_weight`.
pub fn euler_expand(letters: &[Decoration], max_weight: u32) -> AlphaSeries {
    // (α-power, word) pairs multiply with the shuffle; α-power equals length throughout.
    let mut acc = WordPoly::one();
    for a in letters {
        let mut factor = WordPoly::one();
        let mut power = Word::empty();
        loop {
            power = power.concat(&Word::letter(a.clone()));
            if power.weight() > max_weight {
                break;
            }
            factor.add_term(power.clone(), Q::one());
        }
        let product = shuffle(&acc, &factor);
        acc = WordPoly::zero();
        for (w, c) in product.terms() {
            if w.weight() <= max_weight {
                acc.add_term(w.clone(), c.clone());
            }
        }
    }
    let mut out = AlphaSeries::default();
    for (w, c) in acc.terms() {
        out.add_term(w.len() as u32, w.clone(), c.clone());
    }
    out
}

/// Normalizations of the ζ character on words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZetaNormalization {
    /// φ_s(w) = pr(w)^{−s}/|w|!.
    Factorial,
    /// φ′_s(w) = pr(w)^{−s} Π_a mult_a(w)!/|w|!.
    Multiset,
}

impl ZetaNormalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "factorial" => Ok(ZetaNormalization::Factorial),
            "multiset" => Ok(ZetaNormalization::Multiset),
            _ => Err(Error::invalid(format!("unknown normalization `{s}` (factorial | multiset)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ZetaNormalization::Factorial => "factorial",
            ZetaNormalization::Multiset => "multiset",
        }
    }
}

/// φ_s on one word whose letters stand for the given primes.
pub fn zeta_phi(
    w: &Word,
    prime_of: &dyn Fn(&Decoration) -> u64,
    s: u32,
    normalization: ZetaNormalization,
) -> Q {
    let pr: BigInt = w.letters().iter().map(|a| BigInt::from(prime_of(a))).product();
    let mut value = Q::new(BigInt::one(), pr.pow(s)) / Q::from_integer(factorial(w.len() as u32));
    if normalization == ZetaNormalization::Multiset {
        let mut mult: BTreeMap<&Decoration, u32> = BTreeMap::new();
        for a in w.letters() {
            *mult.entry(a).or_insert(0) += 1;
        }
        for m in mult.values() {
            value *= Q::from_integer(factorial(*m));
        }
    }
    value
}

/// Σ_w coeff(w) φ_s(w) over a word polynomial.
pub fn zeta_on_words(
    x: &WordPoly,
    prime_of: &dyn Fn(&Decoration) -> u64,
    s: u32,
    normalization: ZetaNormalization,
) -> Q {
    x.terms()
        .map(|(w, c)| c * zeta_phi(w, prime_of, s, normalization))
        .fold(Q::zero(), |a, b| a + b)
}

/// The ζ character evaluated on the all-words solution over letters f_p, truncated at word
/// length `max_len`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaValue {
    pub s: u32,
    pub primes: usize,
    pub normalization: ZetaNormalization,
    pub max_len: u32,
    /// Truncated value as a float.
    pub approx: f64,
    /// Truncated value as an exact rational, for small prime sets.
    pub exact: Option<Q>,
    /// The untruncated closed form when it is rational: Π (1 − p^{−s})^{−1}.
    pub closed_form: Option<Q>,
    /// Untruncated closed form as a float: Π (1 − p^{−s})^{−1} or Π exp(p^{−s}).
    pub closed_form_approx: f64,
}

/// Prime sets above this size skip the exact rational sum.
pub const ZETA_EXACT_PRIMES: usize = 12;

/// Sums φ_s over all words of length ≤ `max_len` by grouping words with equal letter
/// multiplicities: a multiset with multiplicities m_p stands for |w|!/Π m_p! words.
pub fn zeta_character(
    s: u32,
    primes: &[u64],
    normalization: ZetaNormalization,
    max_len: u32,
) -> Result<ZetaValue> {
    if s < 2 {
        return Err(Error::invalid("s must be at least 2"));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Error::invalid("primes must be distinct"));
    }
    let l = max_len as usize;
    // Per-prime series in the length variable x: Σ_m c_m p^{−sm} x^m with c_m = 1 or 1/m!.
    let mut approx = vec![0.0f64; l + 1];
    approx[0] = 1.0;
    for &p in primes {
        let base = (p as f64).powi(-(s as i32));
        let mut next = vec![0.0f64; l + 1];
        for (a, &x) in approx.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let mut term = 1.0;
            for m in 0..=l - a {
                if m > 0 {
                    term *= base;
                    if normalization == ZetaNormalization::Factorial {
                        term /= m as f64;
                    }
                }
                if term == 0.0 {
                    break;
                }
                next[a + m] += x * term;
            }
        }
        approx = next;
    }
    let exact = (primes.len() <= ZETA_EXACT_PRIMES).then(|| {
        let mut acc = vec![Q::zero(); l + 1];
        acc[0] = Q::one();
        for &p in primes {
            let base = Q::new(BigInt::one(), BigInt::from(p).pow(s));
            let mut next = vec![Q::zero(); l + 1];
            for (a, x) in acc.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let mut term = Q::one();
                for m in 0..=l - a {
                    if m > 0 {
                        term *= &base;
                        if normalization == ZetaNormalization::Factorial {
                            term /= Q::from_integer(BigInt::from(m));
                        }
                    }
                    next[a + m] += x * &term;
                }
            }
            acc = next;
        }
        acc.into_iter().fold(Q::zero(), |a, b| a + b)
    });
    let closed_form = match normalization {
        ZetaNormalization::Multiset => Some(primes.iter().fold(Q::one(), |acc, &p| {
            let ps = BigInt::from(p).pow(s);
            acc * Q::new(ps.clone(), ps - 1)
        })),
        ZetaNormalization::Factorial => None,
    };
    let closed_form_approx = match &closed_form {
        Some(q) => to_f64(q),
        None => primes
            .iter()
            .map(|&p| (p as f64).powi(-(s as i32)))
            .sum::<f64>()
            .exp(),
    };
    Ok(ZetaValue {
        s,
        primes: primes.len(),
        normalization,
        max_len,
        approx: approx.iter().sum(),
        exact,
        closed_form,
        closed_form_approx,
    })
}

/// Primes ≤ n by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            for j in (i * i..=n as usize).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Letters `f{p}` of weight 1, one per prime, in increasing prime order.
pub fn prime_letters(primes: &[u64]) -> Result<(Alphabet, BTreeMap<Decoration, u64>)> {
    let names: Vec<String> = primes.iter().map(|p| format!("f{p}")).collect();
    let pairs: Vec<(&str, u32)> = names.iter().map(|n| (n.as_str(), 1)).collect();
    let alphabet = Alphabet::new(&pairs)?;
    let map = alphabet
        .letters()
        .iter()
        .zip(primes)
        .map(|(d, &p)| (d.clone(), p))
        .collect();
    Ok((alphabet, map))
}
