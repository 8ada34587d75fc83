//! Words over a graded alphabet: shuffle and quasi-shuffle products, deconcatenation,
//! Hoffman's exponential and logarithm, Lyndon words, quasi-symmetric functions,
//! Zhao's map and the map π from forests to words.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::nijenhuis::Algebra;
use crate::rational::{factorial, Q};
use crate::text::Cursor;
use crate::trees::{write_combination, Alphabet, Decoration, Forest, RootedTree, TreePoly};

/// A word; the empty word is the unit 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Decoration>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Decoration>) -> Self {
        Word(letters)
    }

    pub fn letter(a: Decoration) -> Self {
        Word(vec![a])
    }

    pub fn letters(&self) -> &[Decoration] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|d| d.weight()).sum()
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }

    /// Alphabetical order: a proper prefix is smaller, otherwise the first differing letter decides.
    pub fn alpha_cmp(&self, o: &Word) -> Ordering {
        self.0.cmp(&o.0)
    }

    /// Parses `a.b.a`, `1` for the empty word, or a composition `(1,2)` over the letters of
    /// weight 1, 2, ….
    pub fn parse(src: &str, alphabet: &Alphabet) -> Result<Word> {
        let mut cur = Cursor::new(src);
        cur.skip_ws();
        let w = parse_word(&mut cur, alphabet)?;
        cur.finish()?;
        Ok(w)
    }

    /// The parts of a word read as a composition.
    pub fn composition(&self) -> Vec<u32> {
        self.0.iter().map(|d| d.weight()).collect()
    }

    /// Renders `(i_1,...,i_l)`.
    pub fn composition_string(&self) -> String {
        let parts: Vec<String> = self.composition().iter().map(|p| p.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.weight()
            .cmp(&o.weight())
            .then_with(|| self.len().cmp(&o.len()))
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<&str> = self.0.iter().map(|d| d.name()).collect();
        f.write_str(&parts.join("."))
    }
}

fn parse_word(cur: &mut Cursor<'_>, alphabet: &Alphabet) -> Result<Word> {
    if cur.eat('(') {
        let mut letters = Vec::new();
        loop {
            cur.skip_blank();
            let (line, col) = cur.position();
            let part = cur.small_unsigned()?;
            let d = alphabet.of_weight(part).next().ok_or_else(|| {
                Error::parse(line, col, format!("no letter of weight {part} in the alphabet"))
            })?;
            letters.push(d.clone());
            cur.skip_blank();
            if cur.eat(')') {
                break;
            }
            cur.expect(',')?;
        }
        return Ok(Word(letters));
    }
    if cur.peek() == Some('1') && !cur.peek2().is_some_and(|c| c.is_ascii_digit() || c == '/') {
        cur.bump();
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    loop {
        let (line, col) = cur.position();
        let name = cur
            .ident()
            .ok_or_else(|| cur.error("expected a letter name"))?;
        letters.push(alphabet.get(name).map_err(|e| match e {
            Error::UnknownDecoration(n) => Error::parse(line, col, format!("unknown letter `{n}`")),
            other => other,
        })?.clone());
        if !cur.eat('.') {
            break;
        }
    }
    Ok(Word(letters))
}

/// A finite rational combination of words.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WordPoly {
    terms: BTreeMap<Word, Q>,
}

impl WordPoly {
    pub fn zero() -> Self {
        WordPoly::default()
    }

    pub fn one() -> Self {
        WordPoly::from(Word::empty())
    }

    pub fn term(w: Word, c: Q) -> Self {
        let mut p = WordPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &WordPoly) -> WordPoly {
        let mut out = self.clone();
        for (w, c) in o.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &WordPoly) -> WordPoly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> WordPoly {
        if c.is_zero() {
            return WordPoly::zero();
        }
        WordPoly {
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// Concatenation product.
    pub fn concat(&self, o: &WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (u, a) in self.terms() {
            for (v, b) in o.terms() {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Appends a letter to every word.
    pub fn append(&self, a: &Decoration) -> WordPoly {
        let tail = Word::letter(a.clone());
        WordPoly {
            terms: self.terms.iter().map(|(w, c)| (w.concat(&tail), c.clone())).collect(),
        }
    }

    pub fn map_linear(&self, f: impl Fn(&Word) -> WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (w, c) in self.terms() {
            out = out.add(&f(w).scale(c));
        }
        out
    }

    pub fn parse(src: &str, alphabet: &Alphabet) -> Result<WordPoly> {
        let mut cur = Cursor::new(src);
        let mut out = WordPoly::zero();
        cur.skip_blank();
        let mut sign = Q::one();
        if cur.eat('-') {
            sign = -sign;
        } else {
            cur.eat('+');
        }
        loop {
            cur.skip_blank();
            let coeff = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                let c = cur.unsigned_rational()?.expect("digit");
                cur.skip_blank();
                if cur.eat('*') {
                    cur.skip_blank();
                    Some(c)
                } else {
                    // a bare number multiplies the empty word
                    out.add_term(Word::empty(), sign.clone() * c);
                    None
                }
            } else {
                Some(Q::one())
            };
            if let Some(c) = coeff {
                let w = parse_word(&mut cur, alphabet)?;
                out.add_term(w, sign.clone() * c);
            }
            cur.skip_blank();
            if cur.eat('+') {
                sign = Q::one();
            } else if cur.eat('-') {
                sign = -Q::one();
            } else {
                break;
            }
        }
        cur.finish()?;
        Ok(out)
    }
}

impl From<Word> for WordPoly {
    fn from(w: Word) -> Self {
        WordPoly::term(w, Q::one())
    }
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(
            f,
            self.terms.iter().map(|(w, c)| (w.to_string(), w.is_empty(), c)),
        )
    }
}

/// A Hoffman pairing on letters: commutative, associative, weight-additive, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// ⟨a, b⟩ = 0: the shuffle product.
    Zero,
    /// ⟨a, b⟩ = the letter of weight |a| + |b| in the alphabet, or 0 if there is none.
    /// Requires at most one letter per weight.
    Additive(Alphabet),
    /// An explicit table; missing pairs are 0.
    Table(BTreeMap<(Decoration, Decoration), Decoration>),
}

impl Pairing {
    pub fn additive(alphabet: &Alphabet) -> Result<Pairing> {
        let mut seen = std::collections::BTreeSet::new();
        for d in alphabet.letters() {
            if !seen.insert(d.weight()) {
                return Err(Error::InvalidPairing(format!(
                    "two letters of weight {} make the additive pairing ambiguous",
                    d.weight()
                )));
            }
        }
        Ok(Pairing::Additive(alphabet.clone()))
    }

    pub fn pair(&self, a: &Decoration, b: &Decoration) -> Result<Option<Decoration>> {
        match self {
            Pairing::Zero => Ok(None),
            Pairing::Additive(alpha) => Ok(alpha.of_weight(a.weight() + b.weight()).next().cloned()),
            Pairing::Table(t) => {
                let ab = t.get(&(a.clone(), b.clone()));
                let ba = t.get(&(b.clone(), a.clone()));
                if ab != ba {
                    return Err(Error::InvalidPairing(format!("⟨{a},{b}⟩ ≠ ⟨{b},{a}⟩")));
                }
                if let Some(c) = ab {
                    if c.weight() != a.weight() + b.weight() {
                        return Err(Error::InvalidPairing(format!(
                            "|⟨{a},{b}⟩| = {} but |{a}| + |{b}| = {}",
                            c.weight(),
                            a.weight() + b.weight()
                        )));
                    }
                }
                Ok(ab.cloned())
            }
        }
    }

    /// Checks commutativity, weight additivity and associativity on the given letters.
    pub fn validate(&self, letters: &[Decoration]) -> Result<()> {
        for a in letters {
            for b in letters {
                let ab = self.pair(a, b)?;
                for c in letters {
                    let left = match &ab {
                        Some(x) => self.pair(x, c)?,
                        None => None,
                    };
                    let right = match self.pair(b, c)? {
                        Some(y) => self.pair(a, &y)?,
                        None => None,
                    };
                    if left != right {
                        return Err(Error::InvalidPairing(format!(
                            "⟨⟨{a},{b}⟩,{c}⟩ ≠ ⟨{a},⟨{b},{c}⟩⟩"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// ⟨a_1, …, a_k⟩ folded from the right.
    pub fn contract(&self, letters: &[Decoration]) -> Result<Option<Decoration>> {
        let mut iter = letters.iter().rev();
        let Some(last) = iter.next() else {
            return Ok(None);
        };
        let mut acc = last.clone();
        for a in iter {
            match self.pair(a, &acc)? {
                Some(x) => acc = x,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}

/// The quasi-shuffle (a u) ⋆ (b v) = a(u ⋆ bv) + b(au ⋆ v) + ⟨a,b⟩(u ⋆ v) of two words.
pub fn qsh_words(u: &Word, v: &Word, pairing: &Pairing) -> Result<WordPoly> {
    if let Pairing::Table(_) = pairing {
        let mut letters: Vec<Decoration> = u.0.iter().chain(v.0.iter()).cloned().collect();
        letters.sort();
        letters.dedup();
        pairing.validate(&letters)?;
    }
    let (n, m) = (u.len(), v.len());
    // table[i][j] = u[i..] ⋆ v[j..], filled from the ends.
    let mut table: Vec<Vec<WordPoly>> = vec![vec![WordPoly::zero(); m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            let entry = if i == n {
                WordPoly::from(Word(v.0[j..].to_vec()))
            } else if j == m {
                WordPoly::from(Word(u.0[i..].to_vec()))
            } else {
                let a = &u.0[i];
                let b = &v.0[j];
                let mut acc = prepend(a, &table[i + 1][j]).add(&prepend(b, &table[i][j + 1]));
                if let Some(c) = pairing.pair(a, b)? {
                    acc = acc.add(&prepend(&c, &table[i + 1][j + 1]));
                }
                acc
            };
            table[i][j] = entry;
        }
    }
    Ok(std::mem::take(&mut table[0][0]))
}

fn prepend(a: &Decoration, p: &WordPoly) -> WordPoly {
    let head = Word::letter(a.clone());
    WordPoly {
        terms: p.terms.iter().map(|(w, c)| (head.concat(w), c.clone())).collect(),
    }
}

/// Bilinear quasi-shuffle of word polynomials.
pub fn qsh_product(x: &WordPoly, y: &WordPoly, pairing: &Pairing) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for (u, a) in x.terms() {
        for (v, b) in y.terms() {
            out = out.add(&qsh_words(u, v, pairing)?.scale(&(a * b)));
        }
    }
    Ok(out)
}

/// The shuffle product.
pub fn shuffle(x: &WordPoly, y: &WordPoly) -> WordPoly {
    qsh_product(x, y, &Pairing::Zero).expect("zero pairing is valid")
}

/// Δ(w) = Σ_{uv=w} u ⊗ v.
pub fn deconcat(w: &Word) -> Vec<(Word, Word)> {
    (0..=w.len())
        .map(|k| (Word(w.0[..k].to_vec()), Word(w.0[k..].to_vec())))
        .collect()
}

/// Deconcatenation extended linearly, as a map from pairs of words to coefficients.
pub fn deconcat_poly(x: &WordPoly) -> BTreeMap<(Word, Word), Q> {
    let mut out: BTreeMap<(Word, Word), Q> = BTreeMap::new();
    for (w, c) in x.terms() {
        for pair in deconcat(w) {
            *out.entry(pair).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The unshuffle coproduct Σ w|_S ⊗ w|_{S^c} over subsets S of positions, dual to the shuffle.
pub fn unshuffle(x: &WordPoly) -> BTreeMap<(Word, Word), Q> {
    let mut out: BTreeMap<(Word, Word), Q> = BTreeMap::new();
    for (w, c) in x.terms() {
        let n = w.len();
        for mask in 0u64..(1u64 << n) {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, a) in w.0.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    l.push(a.clone());
                } else {
                    r.push(a.clone());
                }
            }
            *out.entry((Word(l), Word(r))).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// All compositions of n.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// I⟨w⟩: contract consecutive blocks of sizes i_1, …, i_l; `None` when a contraction vanishes.
pub fn act(composition: &[usize], w: &Word, pairing: &Pairing) -> Result<Option<Word>> {
    let mut out = Vec::with_capacity(composition.len());
    let mut pos = 0;
    for &i in composition {
        match pairing.contract(&w.0[pos..pos + i])? {
            Some(c) => out.push(c),
            None => return Ok(None),
        }
        pos += i;
    }
    Ok(Some(Word(out)))
}

fn composition_sum(
    w: &Word,
    pairing: &Pairing,
    coeff: impl Fn(&[usize]) -> Q,
) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for c in compositions(w.len()) {
        if let Some(x) = act(&c, w, pairing)? {
            out.add_term(x, coeff(&c));
        }
    }
    Ok(out)
}

/// S(w) = (−1)^n Σ_{I ∈ C(n)} I⟨a_n … a_1⟩.
pub fn word_antipode(w: &Word, pairing: &Pairing) -> Result<WordPoly> {
    let sign = if w.len().is_multiple_of(2) { Q::one() } else { -Q::one() };
    composition_sum(&w.reversed(), pairing, |_| sign.clone())
}

/// The antipode from S(w) = −Σ_{k<n} S(a_1…a_k) ⋆ a_{k+1}…a_n, kept as an oracle.
pub fn word_antipode_recursive(w: &Word, pairing: &Pairing) -> Result<WordPoly> {
    let mut memo: HashMap<usize, WordPoly> = HashMap::new();
    memo.insert(0, WordPoly::one());
    for n in 1..=w.len() {
        let mut acc = WordPoly::zero();
        for k in 0..n {
            let tail = WordPoly::from(Word(w.0[k..n].to_vec()));
            acc = acc.sub(&qsh_product(&memo[&k], &tail, pairing)?);
        }
        memo.insert(n, acc);
    }
    Ok(memo.remove(&w.len()).expect("filled"))
}

/// τ(w) = Σ_I 1/(i_1!…i_l!) I⟨w⟩, linearly extended.
pub fn hoffman_exp(x: &WordPoly, pairing: &Pairing) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for (w, c) in x.terms() {
        let t = composition_sum(w, pairing, |comp| {
            let d: BigInt = comp.iter().map(|&i| factorial(i as u32)).product();
            Q::new(BigInt::one(), d)
        })?;
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

/// ψ(w) = Σ_I (−1)^{n−l}/(i_1⋯i_l) I⟨w⟩, linearly extended.
pub fn hoffman_log(x: &WordPoly, pairing: &Pairing) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for (w, c) in x.terms() {
        let n = w.len();
        let t = composition_sum(w, pairing, |comp| {
            let d: BigInt = comp.iter().map(|&i| BigInt::from(i)).product();
            let sign = if (n - comp.len()) % 2 == 0 { 1 } else { -1 };
            Q::new(BigInt::from(sign), d)
        })?;
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

/// True when w is strictly smaller than each of its proper nonempty suffixes.
pub fn is_lyndon(w: &Word) -> bool {
    !w.is_empty() && (1..w.len()).all(|k| w.0[..] < w.0[k..])
}

/// Lyndon words of length ≤ `max_len`, in alphabetical order (Duval's generation).
pub fn lyndon_words(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let letters = alphabet.letters();
    let k = letters.len();
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    while !w.is_empty() {
        out.push(Word(w.iter().map(|&i| letters[i].clone()).collect()));
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(k - 1)) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Lyndon words of weight ≤ `max_weight`, in alphabetical order.
pub fn lyndon_words_by_weight(alphabet: &Alphabet, max_weight: u32) -> Vec<Word> {
    lyndon_words(alphabet, max_weight as usize)
        .into_iter()
        .filter(|w| w.weight() <= max_weight)
        .collect()
}

/// The factorization of w into a nonincreasing sequence of Lyndon words (Duval).
pub fn lyndon_factorize(w: &Word) -> Vec<Word> {
    let s = &w.0;
    let n = s.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        while i <= k {
            out.push(Word(s[i..i + j - k].to_vec()));
            i += j - k;
        }
    }
    out
}

/// Zhao's map from undecorated trees to quasi-symmetric functions: Z(I) = 1,
/// Z(B⁺(u)) = Z(u)·(1), Z(uv) = Z(u) ⋆ Z(v) with the additive pairing on parts.
/// `parts` must contain one letter of each weight 1..=deg(x).
pub fn zhao_dual(x: &TreePoly, parts: &Alphabet) -> Result<WordPoly> {
    let pairing = Pairing::additive(parts)?;
    let one = parts
        .of_weight(1)
        .next()
        .ok_or_else(|| Error::invalid("the parts alphabet needs a letter of weight 1"))?
        .clone();
    let mut memo: HashMap<RootedTree, WordPoly> = HashMap::new();
    fn tree_image(
        t: &RootedTree,
        one: &Decoration,
        pairing: &Pairing,
        memo: &mut HashMap<RootedTree, WordPoly>,
    ) -> Result<WordPoly> {
        if let Some(hit) = memo.get(t) {
            return Ok(hit.clone());
        }
        if t.root().weight() != 1 {
            return Err(Error::invalid("Zhao's map is defined on undecorated trees"));
        }
        let mut acc = WordPoly::one();
        for c in t.children() {
            acc = qsh_product(&acc, &tree_image(c, one, pairing, memo)?, pairing)?;
        }
        let out = acc.append(one);
        memo.insert(t.clone(), out.clone());
        Ok(out)
    }
    let mut out = WordPoly::zero();
    for (f, c) in x.terms() {
        let mut acc = WordPoly::one();
        for t in f.trees() {
            acc = qsh_product(&acc, &tree_image(t, &one, &pairing, &mut memo)?, &pairing)?;
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out)
}

/// π(B⁺_a(u)) = π(u)·a and π(uv) = π(u) ⋆ π(v).
pub fn pi_map(x: &TreePoly, pairing: &Pairing) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for (f, c) in x.terms() {
        out = out.add(&pi_forest(f, pairing)?.scale(c));
    }
    Ok(out)
}

pub fn pi_forest(f: &Forest, pairing: &Pairing) -> Result<WordPoly> {
    let mut acc = WordPoly::one();
    for t in f.trees() {
        acc = qsh_product(&acc, &pi_tree(t, pairing)?, pairing)?;
    }
    Ok(acc)
}

pub fn pi_tree(t: &RootedTree, pairing: &Pairing) -> Result<WordPoly> {
    Ok(pi_forest(&t.branches(), pairing)?.append(t.root()))
}

/// The universal Nijenhuis algebra on words over the monomials x^k (letter k, unit letter e = 0):
/// aU ⊘ bV = (a·b)(U ⊖ V), with ⊖ the modified quasi-shuffle
/// aU ⊖ bV = a(U ⊖ bV) + b(aU ⊖ V) − e·(a·b)(U ⊖ V), and N = prepend e.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniversalNijenhuis;

/// A combination of nonempty words over the exponents of x.
pub type NWordPoly = BTreeMap<Vec<u32>, Q>;

fn npoly_add_term(p: &mut NWordPoly, w: Vec<u32>, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(w.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

impl UniversalNijenhuis {
    /// U ⊖ V on single words.
    pub fn ominus_words(&self, u: &[u32], v: &[u32]) -> NWordPoly {
        let (n, m) = (u.len(), v.len());
        let mut table: Vec<Vec<NWordPoly>> = vec![vec![NWordPoly::new(); m + 1]; n + 1];
        for i in (0..=n).rev() {
            for j in (0..=m).rev() {
                let mut entry = NWordPoly::new();
                if i == n {
                    npoly_add_term(&mut entry, v[j..].to_vec(), Q::one());
                } else if j == m {
                    npoly_add_term(&mut entry, u[i..].to_vec(), Q::one());
                } else {
                    for (w, c) in &table[i + 1][j] {
                        npoly_add_term(&mut entry, [&[u[i]], &w[..]].concat(), c.clone());
                    }
                    for (w, c) in &table[i][j + 1] {
                        npoly_add_term(&mut entry, [&[v[j]], &w[..]].concat(), c.clone());
                    }
                    for (w, c) in &table[i + 1][j + 1] {
                        npoly_add_term(&mut entry, [&[0, u[i] + v[j]], &w[..]].concat(), -c.clone());
                    }
                }
                table[i][j] = entry;
            }
        }
        std::mem::take(&mut table[0][0])
    }

    /// Bilinear ⊖.
    pub fn ominus(&self, x: &NWordPoly, y: &NWordPoly) -> NWordPoly {
        let mut out = NWordPoly::new();
        for (u, a) in x {
            for (v, b) in y {
                for (w, c) in self.ominus_words(u, v) {
                    npoly_add_term(&mut out, w, c * a * b);
                }
            }
        }
        out
    }

    /// N = B⁺_e: prepend the unit letter.
    pub fn n(&self, x: &NWordPoly) -> NWordPoly {
        x.iter().map(|(w, c)| ([&[0], &w[..]].concat(), c.clone())).collect()
    }
}

impl Algebra for UniversalNijenhuis {
    type Elem = NWordPoly;

    fn mul(&self, x: &NWordPoly, y: &NWordPoly) -> Result<NWordPoly> {
        let mut out = NWordPoly::new();
        for (u, a) in x {
            for (v, b) in y {
                if u.is_empty() || v.is_empty() {
                    return Err(Error::invalid("the Nijenhuis word algebra has no empty word"));
                }
                let head = u[0] + v[0];
                for (w, c) in self.ominus_words(&u[1..], &v[1..]) {
                    npoly_add_term(&mut out, [&[head], &w[..]].concat(), c * a * b);
                }
            }
        }
        Ok(out)
    }

    fn add(&self, x: &NWordPoly, y: &NWordPoly) -> Result<NWordPoly> {
        let mut out = x.clone();
        for (w, c) in y {
            npoly_add_term(&mut out, w.clone(), c.clone());
        }
        Ok(out)
    }

    fn sub(&self, x: &NWordPoly, y: &NWordPoly) -> Result<NWordPoly> {
        let mut out = x.clone();
        for (w, c) in y {
            npoly_add_term(&mut out, w.clone(), -c.clone());
        }
        Ok(out)
    }

    fn equal(&self, x: &NWordPoly, y: &NWordPoly) -> bool {
        x == y
    }
}
