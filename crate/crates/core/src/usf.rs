//! The universal singular frame: iterated-integral coefficients over letter chains, the
//! forest functional α^U built from them, its logarithm β^U, and the Hall-polynomial form
//! of the frame.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hall::HallSet;
use crate::laurent::{LaurentSeries, Poly};
use crate::rational::{fmt_q, Q};
use crate::trees::{enumerate_forests, Alphabet, Forest, RootedTree};
use crate::words::{pi_forest, Pairing, Word, WordPoly};

/// 1/(k_1(k_1+k_2)⋯(k_1+…+k_n)).
pub fn frame_coefficient(chain: &[u32]) -> Q {
    let mut partial = 0u64;
    let mut denom = BigInt::one();
    for &k in chain {
        partial += u64::from(k);
        denom *= partial;
    }
    Q::new(BigInt::one(), denom)
}

type UniPoly = BTreeMap<u32, Q>;

fn simplex_cache() -> &'static RwLock<HashMap<Vec<u32>, Q>> {
    static CACHE: OnceLock<RwLock<HashMap<Vec<u32>, Q>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// ∫_{0≤s_1≤…≤s_n≤1} s_1^{k_1−1}⋯s_n^{k_n−1} ds, integrating s_1 first as a polynomial in
/// its upper limit.
pub fn simplex_integral(chain: &[u32]) -> Result<Q> {
    if chain.contains(&0) {
        return Err(Error::invalid("chain entries must be at least 1"));
    }
    if let Some(hit) = simplex_cache().read().expect("cache lock").get(chain) {
        return Ok(hit.clone());
    }
    let mut inner: UniPoly = BTreeMap::from([(0, Q::one())]);
    for &k in chain {
        // ∫_0^s x^{k−1}·inner(x) dx
        let mut next = UniPoly::new();
        for (e, c) in &inner {
            let power = e + k;
            next.insert(power, c / Q::from_integer(BigInt::from(power)));
        }
        inner = next;
    }
    let value = inner.values().fold(Q::zero(), |a, b| a + b);
    simplex_cache()
        .write()
        .expect("cache lock")
        .insert(chain.to_vec(), value.clone());
    Ok(value)
}

/// One frame term: chain, coefficient, and the coefficient carried on v^{Σk} z^{−n}.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameTerm {
    pub chain: Vec<u32>,
    pub coefficient: Q,
    pub marker: LaurentSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameExpansion {
    pub order: u32,
    pub max_weight: u32,
    pub terms: Vec<FrameTerm>,
}

impl FrameExpansion {
    pub fn coefficient(&self, chain: &[u32]) -> Option<&Q> {
        self.terms.iter().find(|t| t.chain == chain).map(|t| &t.coefficient)
    }
}

impl fmt::Display for FrameExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            let parts: Vec<String> = t.chain.iter().map(|k| k.to_string()).collect();
            writeln!(f, "({})  {}  {}", parts.join(","), fmt_q(&t.coefficient), t.marker)?;
        }
        Ok(())
    }
}

/// All chains (k_1,…,k_n), n ≤ `order`, Σk ≤ `max_weight`, ordered by length then
/// lexicographically.
pub fn chains(order: u32, max_weight: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for c in &level {
            let used: u32 = c.iter().sum();
            for k in 1..=max_weight.saturating_sub(used) {
                let mut d = c.clone();
                d.push(k);
                next.push(d);
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

pub fn usf_expand(order: u32, max_weight: u32) -> Result<FrameExpansion> {
    if order == 0 || max_weight == 0 {
        return Err(Error::invalid("order and maximal weight must be positive"));
    }
    let terms = chains(order, max_weight)
        .into_iter()
        .map(|chain| {
            let coefficient = frame_coefficient(&chain);
            let weight: u32 = chain.iter().sum();
            let marker = LaurentSeries::monomial(
                Poly::monomial(coefficient.clone(), 0, weight),
                -(chain.len() as i32),
            );
            FrameTerm {
                chain,
                coefficient,
                marker,
            }
        })
        .collect();
    Ok(FrameExpansion {
        order,
        max_weight,
        terms,
    })
}

/// α^U_w for a word over letters f_k of weight k.
pub fn alpha_word(w: &Word) -> Q {
    let chain: Vec<u32> = w.letters().iter().map(|d| d.weight()).collect();
    frame_coefficient(&chain)
}

/// Words of all linear extensions of the forest poset (descendants before ancestors),
/// enumerated vertex by vertex.
pub fn linear_extension_words(f: &Forest) -> WordPoly {
    // Flatten to vertices with parent links.
    let mut labels = Vec::new();
    let mut parent: Vec<Option<usize>> = Vec::new();
    fn flatten(
        t: &RootedTree,
        up: Option<usize>,
        labels: &mut Vec<crate::trees::Decoration>,
        parent: &mut Vec<Option<usize>>,
    ) {
        let me = labels.len();
        labels.push(t.root().clone());
        parent.push(up);
        for c in t.children() {
            flatten(c, Some(me), labels, parent);
        }
    }
    for t in f.trees() {
        flatten(t, None, &mut labels, &mut parent);
    }
    let n = labels.len();
    let mut pending_children = vec![0usize; n];
    for p in parent.iter().flatten() {
        pending_children[*p] += 1;
    }
    let mut out = WordPoly::zero();
    let mut placed = vec![false; n];
    let mut word = Vec::with_capacity(n);
    fn walk(
        labels: &[crate::trees::Decoration],
        parent: &[Option<usize>],
        pending: &mut [usize],
        placed: &mut [bool],
        word: &mut Vec<crate::trees::Decoration>,
        out: &mut WordPoly,
    ) {
        if word.len() == labels.len() {
            out.add_term(Word::new(word.clone()), Q::one());
            return;
        }
        for v in 0..labels.len() {
            if placed[v] || pending[v] > 0 {
                continue;
            }
            placed[v] = true;
            if let Some(p) = parent[v] {
                pending[p] -= 1;
            }
            word.push(labels[v].clone());
            walk(labels, parent, pending, placed, word, out);
            word.pop();
            if let Some(p) = parent[v] {
                pending[p] += 1;
            }
            placed[v] = false;
        }
    }
    walk(&labels, &parent, &mut pending_children, &mut placed, &mut word, &mut out);
    out
}

/// α^U(u) = Σ over linear extensions of α^U_w.
pub fn alpha_u(f: &Forest) -> Q {
    let words = pi_forest(f, &Pairing::Zero).expect("zero pairing is valid");
    words.terms().map(|(w, c)| c * alpha_word(w)).fold(Q::zero(), |a, b| a + b)
}

/// α^U via A(B⁺_{f_k}(u))(s) = ∫_0^s x^{k−1} A(u)(x) dx and A(uv) = A(u)A(v), at s = 1.
pub fn alpha_u_integral(f: &Forest) -> Q {
    fn tree_poly(t: &RootedTree) -> UniPoly {
        let mut prod: UniPoly = BTreeMap::from([(0, Q::one())]);
        for c in t.children() {
            prod = uni_mul(&prod, &tree_poly(c));
        }
        let k = t.root().weight();
        prod.into_iter()
            .map(|(e, c)| (e + k, c / Q::from_integer(BigInt::from(e + k))))
            .collect()
    }
    let mut prod: UniPoly = BTreeMap::from([(0, Q::one())]);
    for t in f.trees() {
        prod = uni_mul(&prod, &tree_poly(t));
    }
    prod.values().fold(Q::zero(), |a, b| a + b)
}

fn uni_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut out = UniPoly::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_insert_with(Q::zero) += x * y;
        }
    }
    out
}

/// All splittings of a forest into (upper part, lower part) where the lower part contains,
/// with each vertex, all its ancestors; listed with multiplicity.
pub fn splittings(f: &Forest) -> Vec<(Forest, Forest)> {
    fn tree_splits(t: &RootedTree) -> Vec<(Forest, Forest)> {
        let mut out = vec![(Forest::single(t.clone()), Forest::unit())];
        let mut partial: Vec<(Forest, Vec<RootedTree>)> = vec![(Forest::unit(), Vec::new())];
        for c in t.children() {
            let mut next = Vec::new();
            for (upper, kept) in &partial {
                for (cu, cl) in tree_splits(c) {
                    let mut k = kept.clone();
                    k.extend(cl.trees().iter().cloned());
                    next.push((upper.mul(&cu), k));
                }
            }
            partial = next;
        }
        for (upper, kept) in partial {
            out.push((upper, Forest::single(RootedTree::from_children(t.root().clone(), kept))));
        }
        out
    }
    let mut acc = vec![(Forest::unit(), Forest::unit())];
    for t in f.trees() {
        let mut next = Vec::new();
        for (u, l) in &acc {
            for (tu, tl) in tree_splits(t) {
                next.push((u.mul(&tu), l.mul(&tl)));
            }
        }
        acc = next;
    }
    acc
}

/// A rational functional on the forests of weight ≤ `max_weight` over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestFunctional {
    max_weight: u32,
    values: BTreeMap<Forest, Q>,
}

impl ForestFunctional {
    pub fn from_fn(alphabet: &Alphabet, max_weight: u32, f: impl Fn(&Forest) -> Q) -> Result<Self> {
        let values = enumerate_forests(alphabet, max_weight)?
            .into_iter()
            .map(|u| {
                let v = f(&u);
                (u, v)
            })
            .collect();
        Ok(ForestFunctional { max_weight, values })
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn value(&self, f: &Forest) -> Result<Q> {
        self.values.get(f).cloned().ok_or(Error::InsufficientTruncation {
            needed: f.degree(),
            available: self.max_weight,
        })
    }

    pub fn values(&self) -> impl Iterator<Item = (&Forest, &Q)> {
        self.values.iter()
    }

    fn map(&self, g: impl Fn(&Forest, &Q) -> Q) -> Self {
        ForestFunctional {
            max_weight: self.max_weight,
            values: self.values.iter().map(|(f, v)| (f.clone(), g(f, v))).collect(),
        }
    }

    fn counit_like(&self, c: Q) -> Self {
        self.map(|f, _| if f.is_unit() { c.clone() } else { Q::zero() })
    }

    /// (αβ)(u) = Σ α(upper) β(lower) over the splittings of u.
    pub fn product(&self, o: &ForestFunctional) -> Result<ForestFunctional> {
        let mut values = BTreeMap::new();
        for u in self.values.keys() {
            let mut acc = Q::zero();
            for (up, low) in splittings(u) {
                acc += self.value(&up)? * o.value(&low)?;
            }
            values.insert(u.clone(), acc);
        }
        Ok(ForestFunctional {
            max_weight: self.max_weight.min(o.max_weight),
            values,
        })
    }

    fn add_scaled(&self, o: &ForestFunctional, c: &Q) -> ForestFunctional {
        self.map(|f, v| v + c * o.values.get(f).cloned().unwrap_or_else(Q::zero))
    }

    /// exp α = Σ_k α^k/k!; requires α(I) = 0.
    pub fn exp(&self) -> Result<ForestFunctional> {
        if !self.value(&Forest::unit())?.is_zero() {
            return Err(Error::invalid("exp needs a functional vanishing on I"));
        }
        let mut out = self.counit_like(Q::one());
        let mut power = out.clone();
        for k in 1..=self.max_weight {
            power = power.product(self)?;
            out = out.add_scaled(&power, &Q::new(BigInt::one(), crate::rational::factorial(k)));
        }
        Ok(out)
    }

    /// log α = Σ_k (−1)^{k+1}/k (α − ε)^k; requires α(I) = 1.
    pub fn log(&self) -> Result<ForestFunctional> {
        if !self.value(&Forest::unit())?.is_one() {
            return Err(Error::invalid("log needs a functional equal to 1 on I"));
        }
        let shifted = self.add_scaled(&self.counit_like(Q::one()), &-Q::one());
        let mut out = self.counit_like(Q::zero());
        let mut power = self.counit_like(Q::one());
        for k in 1..=self.max_weight {
            power = power.product(&shifted)?;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add_scaled(&power, &Q::new(BigInt::from(sign), BigInt::from(k)));
        }
        Ok(out)
    }
}

/// α^U on every forest of weight ≤ W over f_1, …, f_W.
pub fn alpha_u_functional(max_weight: u32) -> Result<ForestFunctional> {
    ForestFunctional::from_fn(&Alphabet::universal(max_weight), max_weight, alpha_u)
}

/// β^U = log α^U.
pub fn beta_u_functional(max_weight: u32) -> Result<ForestFunctional> {
    alpha_u_functional(max_weight)?.log()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallRepresentationReport {
    pub holds: bool,
    pub words_checked: usize,
    /// First word where exp(Σ β^U(t) E(t)) and Σ α^U_w w differ, with both coefficients.
    pub mismatch: Option<(Word, Q, Q)>,
}

/// Compares exp(Σ_{t Hall} β^U(t) E(t)) with Σ_w α^U_w w in the concatenation algebra up to
/// weight W, with E(t) = [E(t²), E(t¹)] and E = f_k on a single vertex.
pub fn hall_representation_check(max_weight: u32) -> Result<HallRepresentationReport> {
    let alphabet = Alphabet::universal(max_weight);
    let hall = HallSet::build(&alphabet, max_weight)?;
    let beta = beta_u_functional(max_weight)?;
    let mut x = WordPoly::zero();
    for t in hall.members() {
        let b = beta.value(&Forest::single(t.clone()))?;
        x = x.add(&hall.hall_polynomial_reversed(t)?.scale(&b));
    }
    let truncate = |p: WordPoly| {
        let mut out = WordPoly::zero();
        for (w, c) in p.terms() {
            if w.weight() <= max_weight {
                out.add_term(w.clone(), c.clone());
            }
        }
        out
    };
    let mut lhs = WordPoly::one();
    let mut power = WordPoly::one();
    for k in 1..=max_weight {
        power = truncate(power.concat(&x));
        lhs = lhs.add(&power.scale(&Q::new(BigInt::one(), crate::rational::factorial(k))));
    }
    let mut rhs = WordPoly::one();
    let mut level = vec![Word::empty()];
    let mut words_checked = 1;
    while !level.is_empty() {
        let mut next = Vec::new();
        for w in &level {
            for a in alphabet.letters() {
                let grown = w.concat(&Word::letter(a.clone()));
                if grown.weight() <= max_weight {
                    rhs.add_term(grown.clone(), alpha_word(&grown));
                    next.push(grown);
                }
            }
        }
        words_checked += next.len();
        level = next;
    }
    let diff = lhs.sub(&rhs);
    let mismatch = diff
        .terms()
        .next()
        .map(|(w, _)| (w.clone(), lhs.coeff(w), rhs.coeff(w)));
    Ok(HallRepresentationReport {
        holds: mismatch.is_none(),
        words_checked,
        mismatch,
    })
}
