//! Functionals on the tree Hopf algebra with Laurent-series values: convolution,
//! exponential and logarithm, Birkhoff factorization, grading flows and the
//! renormalization group.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::hopf::{coproduct_forest, cut_terms};
use crate::laurent::{LaurentSeries, Poly};
use crate::rational::{factorial, Q};
use crate::trees::{enumerate_forests, Alphabet, Forest, RootedTree, TreePoly};

/// The forests of degree ≤ D over an alphabet with their coproducts in index form.
#[derive(Debug)]
pub struct Basis {
    alphabet: Alphabet,
    degree: u32,
    forests: Vec<Forest>,
    index: HashMap<Forest, usize>,
    /// Forest indices of the single-tree forests, in forest order.
    trees: Vec<usize>,
    /// For each forest, its position in `trees` when it is a single tree.
    tree_pos: Vec<Option<usize>>,
    /// For each forest, the tree positions of its factors.
    factors: Vec<Vec<usize>>,
    /// Δ of each forest as (left index, right index, coefficient).
    coproduct: Vec<Vec<(usize, usize, Q)>>,
    /// Reduced coproduct of each tree as (crown forest index, trunk tree position, multiplicity).
    cuts: Vec<Vec<(usize, usize, Q)>>,
}

type BasisCache = Mutex<HashMap<(String, u32), Arc<Basis>>>;

static BASES: OnceLock<BasisCache> = OnceLock::new();

impl Basis {
    /// The shared basis for an alphabet and truncation degree.
    pub fn new(alphabet: &Alphabet, degree: u32) -> Result<Arc<Basis>> {
        let key = (alphabet.to_string(), degree);
        let cache = BASES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().expect("basis cache").get(&key) {
            if &b.alphabet == alphabet {
                return Ok(b.clone());
            }
        }
        let b = Arc::new(Self::build(alphabet, degree)?);
        cache.lock().expect("basis cache").insert(key, b.clone());
        Ok(b)
    }

    fn build(alphabet: &Alphabet, degree: u32) -> Result<Basis> {
        let forests = if degree == 0 {
            vec![Forest::unit()]
        } else {
            enumerate_forests(alphabet, degree)?
        };
        let index: HashMap<Forest, usize> =
            forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let trees: Vec<usize> = (0..forests.len()).filter(|&i| forests[i].len() == 1).collect();
        let mut tree_pos = vec![None; forests.len()];
        for (p, &i) in trees.iter().enumerate() {
            tree_pos[i] = Some(p);
        }
        let tree_of = |t: &RootedTree| tree_pos[index[&Forest::single(t.clone())]].expect("tree");
        let factors = forests
            .iter()
            .map(|f| f.trees().iter().map(tree_of).collect())
            .collect();
        let coproduct = forests
            .iter()
            .map(|f| {
                coproduct_forest(f)
                    .terms()
                    .map(|((l, r), c)| (index[l], index[r], c.clone()))
                    .collect()
            })
            .collect();
        let cuts = trees
            .iter()
            .map(|&i| {
                let t = forests[i].as_tree().expect("tree");
                cut_terms(t)
                    .iter()
                    .map(|c| {
                        (
                            index[&c.crown],
                            tree_of(&c.trunk),
                            Q::from_integer(BigInt::from(c.multiplicity)),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Basis {
            alphabet: alphabet.clone(),
            degree,
            forests,
            index,
            trees,
            tree_pos,
            factors,
            coproduct,
            cuts,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    /// The trees of the basis in canonical order.
    pub fn trees(&self) -> impl Iterator<Item = &RootedTree> {
        self.trees
            .iter()
            .map(|&i| self.forests[i].as_tree().expect("tree"))
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    fn forest_index(&self, f: &Forest) -> Result<usize> {
        if f.degree() > self.degree {
            return Err(Error::InsufficientTruncation {
                needed: f.degree(),
                available: self.degree,
            });
        }
        self.index
            .get(f)
            .copied()
            .ok_or_else(|| Error::invalid(format!("{f} is not over the functional's alphabet")))
    }

    fn tree_position(&self, t: &RootedTree) -> Result<usize> {
        let i = self.forest_index(&Forest::single(t.clone()))?;
        Ok(self.tree_pos[i].expect("tree"))
    }
}

/// What a functional's values on products are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Multiplicative, value 1 on I.
    Character,
    /// Vanishes on I and on every product of two or more trees.
    Infinitesimal,
    /// Arbitrary values on every forest.
    General,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Character => "character",
            Kind::Infinitesimal => "infinitesimal",
            Kind::General => "general",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "character" => Some(Kind::Character),
            "infinitesimal" => Some(Kind::Infinitesimal),
            "general" => Some(Kind::General),
            _ => None,
        }
    }
}

/// A linear functional on forests of degree ≤ D with Laurent-series values.
#[derive(Clone)]
pub struct Functional {
    kind: Kind,
    basis: Arc<Basis>,
    /// Tree values for characters and infinitesimal characters, forest values otherwise.
    stored: Arc<Vec<LaurentSeries>>,
    full: Arc<OnceLock<std::result::Result<Arc<Vec<LaurentSeries>>, Error>>>,
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functional({}, D={}) {{ ", self.kind.name(), self.degree())?;
        for (t, v) in self.stored_entries() {
            write!(f, "{t} = {v}; ")?;
        }
        f.write_str("}")
    }
}

impl PartialEq for Functional {
    fn eq(&self, o: &Self) -> bool {
        if self.basis.alphabet != o.basis.alphabet || self.basis.degree != o.basis.degree {
            return false;
        }
        match (self.full_values(), o.full_values()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl Functional {
    fn from_stored(kind: Kind, basis: Arc<Basis>, stored: Vec<LaurentSeries>) -> Self {
        Functional {
            kind,
            basis,
            stored: Arc::new(stored),
            full: Arc::new(OnceLock::new()),
        }
    }

    /// A character from its tree values; trees not listed map to zero.
    pub fn character(
        basis: &Arc<Basis>,
        values: impl IntoIterator<Item = (RootedTree, LaurentSeries)>,
    ) -> Result<Self> {
        Self::on_trees(Kind::Character, basis, values)
    }

    /// An infinitesimal character from its tree values.
    pub fn infinitesimal(
        basis: &Arc<Basis>,
        values: impl IntoIterator<Item = (RootedTree, LaurentSeries)>,
    ) -> Result<Self> {
        Self::on_trees(Kind::Infinitesimal, basis, values)
    }

    fn on_trees(
        kind: Kind,
        basis: &Arc<Basis>,
        values: impl IntoIterator<Item = (RootedTree, LaurentSeries)>,
    ) -> Result<Self> {
        let mut stored = vec![LaurentSeries::zero(); basis.tree_count()];
        for (t, v) in values {
            stored[basis.tree_position(&t)?] = v;
        }
        Ok(Self::from_stored(kind, basis.clone(), stored))
    }

    /// A general functional from forest values; forests not listed map to zero.
    pub fn general(
        basis: &Arc<Basis>,
        values: impl IntoIterator<Item = (Forest, LaurentSeries)>,
    ) -> Result<Self> {
        let mut stored = vec![LaurentSeries::zero(); basis.forests.len()];
        for (f, v) in values {
            stored[basis.forest_index(&f)?] = v;
        }
        Ok(Self::from_stored(Kind::General, basis.clone(), stored))
    }

    /// A character or infinitesimal character given by a function of the tree.
    pub fn from_tree_fn(
        kind: Kind,
        basis: &Arc<Basis>,
        f: impl Fn(&RootedTree) -> Result<LaurentSeries>,
    ) -> Result<Self> {
        assert!(kind != Kind::General);
        let stored = basis.trees().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_stored(kind, basis.clone(), stored))
    }

    /// The convolution unit e = I·ε, a character vanishing on every tree.
    pub fn unit(basis: &Arc<Basis>) -> Self {
        Self::from_stored(
            Kind::Character,
            basis.clone(),
            vec![LaurentSeries::zero(); basis.tree_count()],
        )
    }

    pub fn zero(basis: &Arc<Basis>) -> Self {
        Self::from_stored(
            Kind::Infinitesimal,
            basis.clone(),
            vec![LaurentSeries::zero(); basis.tree_count()],
        )
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.basis.alphabet
    }

    /// The stored values: tree values for characters, forest values for general functionals.
    pub fn stored_entries(&self) -> Vec<(Forest, &LaurentSeries)> {
        match self.kind {
            Kind::General => self
                .basis
                .forests
                .iter()
                .cloned()
                .zip(self.stored.iter())
                .collect(),
            _ => self
                .basis
                .trees()
                .map(|t| Forest::single(t.clone()))
                .zip(self.stored.iter())
                .collect(),
        }
    }

    pub fn tree_value(&self, t: &RootedTree) -> Result<LaurentSeries> {
        match self.kind {
            Kind::General => {
                let i = self.basis.forest_index(&Forest::single(t.clone()))?;
                Ok(self.stored[i].clone())
            }
            _ => Ok(self.stored[self.basis.tree_position(t)?].clone()),
        }
    }

    /// Values on every basis forest, materialized once.
    pub fn full_values(&self) -> Result<Arc<Vec<LaurentSeries>>> {
        self.full
            .get_or_init(|| self.materialize().map(Arc::new))
            .clone()
    }

    fn materialize(&self) -> Result<Vec<LaurentSeries>> {
        let b = &self.basis;
        match self.kind {
            Kind::General => Ok(self.stored.to_vec()),
            Kind::Infinitesimal => Ok((0..b.forests.len())
                .map(|i| match b.tree_pos[i] {
                    Some(p) => self.stored[p].clone(),
                    None => LaurentSeries::zero(),
                })
                .collect()),
            Kind::Character => {
                let mut out = Vec::with_capacity(b.forests.len());
                for fs in &b.factors {
                    let mut v = LaurentSeries::one();
                    for &p in fs {
                        v = v.mul(&self.stored[p])?;
                    }
                    out.push(v);
                }
                Ok(out)
            }
        }
    }

    pub fn value(&self, f: &Forest) -> Result<LaurentSeries> {
        let i = self.basis.forest_index(f)?;
        Ok(self.full_values()?[i].clone())
    }

    /// Linear extension to tree polynomials.
    pub fn eval(&self, x: &TreePoly) -> Result<LaurentSeries> {
        let mut out = LaurentSeries::zero();
        for (f, c) in x.terms() {
            out = out.add(&self.value(f)?.scale(c));
        }
        Ok(out)
    }

    fn check_compatible(&self, o: &Functional) -> Result<()> {
        if self.basis.alphabet != o.basis.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    /// Restricts to a smaller truncation degree.
    pub fn restrict(&self, degree: u32) -> Result<Functional> {
        if degree == self.degree() {
            return Ok(self.clone());
        }
        if degree > self.degree() {
            return Err(Error::InsufficientTruncation {
                needed: degree,
                available: self.degree(),
            });
        }
        let basis = Basis::new(&self.basis.alphabet, degree)?;
        match self.kind {
            Kind::General => {
                let full = self.full_values()?;
                let stored = basis
                    .forests
                    .iter()
                    .map(|f| full[self.basis.index[f]].clone())
                    .collect();
                Ok(Self::from_stored(Kind::General, basis, stored))
            }
            kind => {
                let stored = basis
                    .trees()
                    .map(|t| self.stored[self.basis.tree_position(t).expect("subset")].clone())
                    .collect();
                Ok(Self::from_stored(kind, basis, stored))
            }
        }
    }

    /// Brings two functionals to a common basis (the smaller degree).
    fn align(&self, o: &Functional) -> Result<(Functional, Functional)> {
        self.check_compatible(o)?;
        let d = self.degree().min(o.degree());
        Ok((self.restrict(d)?, o.restrict(d)?))
    }

    fn combine(
        &self,
        o: &Functional,
        op: impl Fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries,
    ) -> Result<Functional> {
        let (a, b) = self.align(o)?;
        if a.kind == Kind::Infinitesimal && b.kind == Kind::Infinitesimal {
            let stored = a.stored.iter().zip(b.stored.iter()).map(|(x, y)| op(x, y)).collect();
            return Ok(Self::from_stored(Kind::Infinitesimal, a.basis.clone(), stored));
        }
        let (x, y) = (a.full_values()?, b.full_values()?);
        let stored = x.iter().zip(y.iter()).map(|(p, q)| op(p, q)).collect();
        Ok(Self::from_stored(Kind::General, a.basis.clone(), stored))
    }

    pub fn add(&self, o: &Functional) -> Result<Functional> {
        self.combine(o, |x, y| x.add(y))
    }

    pub fn sub(&self, o: &Functional) -> Result<Functional> {
        self.combine(o, |x, y| x.sub(y))
    }

    pub fn scale(&self, c: &Q) -> Result<Functional> {
        self.map_values(|x| Ok(x.scale(c)))
    }

    /// Applies a map to every value. Characters become general functionals unless the
    /// map is applied tree-wise through [`Functional::map_tree_values`].
    pub fn map_values(&self, f: impl Fn(&LaurentSeries) -> Result<LaurentSeries>) -> Result<Functional> {
        match self.kind {
            Kind::Infinitesimal => self.map_tree_values(|_, x| f(x)),
            _ => {
                let stored = self
                    .full_values()?
                    .iter()
                    .map(&f)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::from_stored(Kind::General, self.basis.clone(), stored))
            }
        }
    }

    /// Applies a map to the stored tree values, keeping the kind. For a character this is
    /// the composition of a multiplicative map with the character only when `f` is multiplicative.
    pub fn map_tree_values(
        &self,
        f: impl Fn(&RootedTree, &LaurentSeries) -> Result<LaurentSeries>,
    ) -> Result<Functional> {
        match self.kind {
            Kind::General => {
                let stored = self
                    .basis
                    .forests
                    .iter()
                    .zip(self.stored.iter())
                    .map(|(fo, x)| match fo.as_tree() {
                        Some(t) => f(t, x),
                        None => Ok(x.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::from_stored(Kind::General, self.basis.clone(), stored))
            }
            kind => {
                let stored = self
                    .basis
                    .trees()
                    .zip(self.stored.iter())
                    .map(|(t, x)| f(t, x))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::from_stored(kind, self.basis.clone(), stored))
            }
        }
    }

    /// Composes every forest value with a linear operator on series (R ∘ f).
    pub fn compose_linear(&self, r: impl Fn(&LaurentSeries) -> LaurentSeries) -> Result<Functional> {
        match self.kind {
            Kind::Infinitesimal => self.map_tree_values(|_, x| Ok(r(x))),
            _ => self.map_values(|x| Ok(r(x))),
        }
    }

    /// The convolution (f*g)(x) = Σ f(x') g(x'') over Δ(x).
    pub fn convolve(&self, o: &Functional) -> Result<Functional> {
        let (a, b) = self.align(o)?;
        let basis = a.basis.clone();
        let (x, y) = (a.full_values()?, b.full_values()?);
        let eval = |i: usize| -> Result<LaurentSeries> {
            let mut acc = LaurentSeries::zero();
            for (l, r, c) in &basis.coproduct[i] {
                if x[*l].is_known_zero() && !x[*l].truncated() {
                    continue;
                }
                if y[*r].is_known_zero() && !y[*r].truncated() {
                    continue;
                }
                acc = acc.add(&x[*l].mul(&y[*r])?.scale(c));
            }
            Ok(acc)
        };
        if a.kind == Kind::Character && b.kind == Kind::Character {
            let stored = basis.trees.iter().map(|&i| eval(i)).collect::<Result<Vec<_>>>()?;
            return Ok(Self::from_stored(Kind::Character, basis, stored));
        }
        let stored = (0..basis.forests.len()).map(eval).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_stored(Kind::General, basis, stored))
    }

    /// f^{*n}.
    pub fn convolution_power(&self, n: u32) -> Result<Functional> {
        let mut out = Functional::unit(&self.basis);
        for _ in 0..n {
            out = out.convolve(self)?;
        }
        Ok(out)
    }

    /// The convolution inverse; for characters φ ∘ S through the antipode recursion.
    pub fn inverse(&self) -> Result<Functional> {
        if self.kind != Kind::Character {
            return self.inverse_geometric();
        }
        // φ⁻¹(t) = −φ(t) − Σ_c φ⁻¹(P_c) φ(R_c), the antipode recursion pushed through φ.
        let b = &self.basis;
        let mut inv: Vec<LaurentSeries> = Vec::with_capacity(b.tree_count());
        for p in 0..b.tree_count() {
            let mut v = self.stored[p].neg();
            for (crown, trunk, m) in &b.cuts[p] {
                let mut c = LaurentSeries::one();
                for &q in &b.factors[*crown] {
                    c = c.mul(&inv[q])?;
                }
                v = v.sub(&c.mul(&self.stored[*trunk])?.scale(m));
            }
            inv.push(v);
        }
        Ok(Self::from_stored(Kind::Character, b.clone(), inv))
    }

    /// The inverse as the geometric series Σ_k (e − f)^{*k}; requires f(I) = 1.
    pub fn inverse_geometric(&self) -> Result<Functional> {
        if self.value(&Forest::unit())? != LaurentSeries::one() {
            return Err(Error::invalid("geometric inverse needs value 1 on I"));
        }
        let e = Functional::unit(&self.basis);
        let d = e.sub(self)?;
        let mut term = e.clone();
        let mut sum = e.clone();
        for _ in 0..self.degree() {
            term = term.convolve(&d)?;
            sum = sum.add(&term)?;
        }
        if self.kind == Kind::Character {
            sum.as_character()
        } else {
            Ok(sum)
        }
    }

    /// Reinterprets a general functional as a character from its tree values.
    pub fn as_character(&self) -> Result<Functional> {
        self.as_kind(Kind::Character)
    }

    /// Reinterprets a general functional as an infinitesimal character from its tree values.
    pub fn as_infinitesimal(&self) -> Result<Functional> {
        self.as_kind(Kind::Infinitesimal)
    }

    fn as_kind(&self, kind: Kind) -> Result<Functional> {
        if self.kind == kind {
            return Ok(self.clone());
        }
        if kind == Kind::General {
            return Ok(Self::from_stored(
                Kind::General,
                self.basis.clone(),
                self.full_values()?.to_vec(),
            ));
        }
        let full = self.full_values()?;
        let stored = self.basis.trees.iter().map(|&i| full[i].clone()).collect();
        Ok(Self::from_stored(kind, self.basis.clone(), stored))
    }

    /// Keeps only the tree values of degree `d` (for infinitesimal characters).
    pub fn homogeneous(&self, d: u32) -> Result<Functional> {
        self.expect_kind(Kind::Infinitesimal)?;
        self.map_tree_values(|t, x| {
            Ok(if t.degree() == d {
                x.clone()
            } else {
                LaurentSeries::zero()
            })
        })
    }

    fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            })
        }
    }

    /// exp*(Z) = Σ Z^{*k}/k!, a character.
    pub fn exp_star(&self) -> Result<Functional> {
        self.expect_kind(Kind::Infinitesimal)?;
        let mut term = Functional::unit(&self.basis);
        let mut sum = term.clone();
        for k in 1..=self.degree() {
            term = term.convolve(self)?;
            sum = sum.add(&term.scale(&Q::new(BigInt::one(), factorial(k)))?)?;
        }
        sum.as_character()
    }

    /// log*(φ) = Σ (−1)^{k+1}/k (φ − e)^{*k}, an infinitesimal character.
    pub fn log_star(&self) -> Result<Functional> {
        self.expect_kind(Kind::Character)?;
        let d = self.sub(&Functional::unit(&self.basis))?;
        let mut term = Functional::unit(&self.basis);
        let mut sum = Functional::zero(&self.basis).as_kind(Kind::General)?;
        for k in 1..=self.degree() {
            term = term.convolve(&d)?;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            sum = sum.add(&term.scale(&Q::new(BigInt::from(sign), BigInt::from(k)))?)?;
        }
        sum.as_infinitesimal()
    }

    /// Parses a character definition file.
    pub fn parse_file(src: &str, alphabet: Option<&Alphabet>) -> Result<Functional> {
        crate::characters::parse_functional(src, alphabet)
    }

    /// Renders the definition-file form.
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "kind: {}\ndegree: {}\nalphabet: {}\n",
            self.kind.name(),
            self.degree(),
            self.alphabet()
        );
        for (f, v) in self.stored_entries() {
            if !v.is_zero() {
                out.push_str(&format!("{f} = {v}\n"));
            }
        }
        out
    }
}

/// A Birkhoff factorization φ = φ−⁻¹ * φ+.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffPair {
    pub minus: Functional,
    pub plus: Functional,
}

/// Bogoliubov recursion with minimal subtraction. Also returns R̄ on every tree.
pub fn birkhoff_with_bar(phi: &Functional) -> Result<(BirkhoffPair, Vec<LaurentSeries>)> {
    phi.expect_kind(Kind::Character)?;
    let b = phi.basis();
    let mut minus: Vec<LaurentSeries> = Vec::with_capacity(b.tree_count());
    let mut plus = Vec::with_capacity(b.tree_count());
    let mut bars = Vec::with_capacity(b.tree_count());
    for p in 0..b.tree_count() {
        let mut bar = phi.stored[p].clone();
        for (crown, trunk, m) in &b.cuts[p] {
            let mut c = LaurentSeries::one();
            for &q in &b.factors[*crown] {
                c = c.mul(&minus[q])?;
            }
            bar = bar.add(&c.mul(&phi.stored[*trunk])?.scale(m));
        }
        minus.push(bar.pole_part().neg());
        plus.push(bar.regular_part());
        bars.push(bar);
    }
    Ok((
        BirkhoffPair {
            minus: Functional::from_stored(Kind::Character, b.clone(), minus),
            plus: Functional::from_stored(Kind::Character, b.clone(), plus),
        },
        bars,
    ))
}

/// Birkhoff factorization by the Bogoliubov recursion.
pub fn birkhoff_bogoliubov(phi: &Functional) -> Result<BirkhoffPair> {
    Ok(birkhoff_with_bar(phi)?.0)
}

/// The Bogoliubov preparation R̄(Γ) = φ(Γ) + Σ φ−(P_c) φ(R_c).
pub fn bogoliubov_bar(phi: &Functional, gamma: &RootedTree) -> Result<LaurentSeries> {
    let p = phi.basis().tree_position(gamma)?;
    Ok(birkhoff_with_bar(phi)?.1[p].clone())
}

/// Birkhoff factorization through the infinitesimal character χ with
/// exp*(Rχ) * exp*(R̃χ) = φ, solved one degree at a time.
pub fn birkhoff_bch(phi: &Functional) -> Result<BirkhoffPair> {
    phi.expect_kind(Kind::Character)?;
    let z = phi.log_star()?;
    let basis = phi.basis().clone();
    let mut chi = z.homogeneous(1)?;
    for d in 2..=phi.degree() {
        let r = chi.compose_linear(|x| x.pole_part())?;
        let rt = chi.compose_linear(|x| x.regular_part())?;
        let psi = r.exp_star()?.convolve(&rt.exp_star()?)?;
        let correction = psi.log_star()?.homogeneous(d)?;
        chi = chi.add(&z.homogeneous(d)?.sub(&correction)?)?;
    }
    let minus = chi.compose_linear(|x| x.pole_part().neg())?.exp_star()?;
    let plus = chi.compose_linear(|x| x.regular_part())?.exp_star()?;
    debug_assert_eq!(minus.basis().degree(), basis.degree());
    Ok(BirkhoffPair { minus, plus })
}

/// The grading flows acting on values by the degree n of the argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    /// Multiplication by e^{nt}, truncated in t.
    Theta,
    /// Multiplication by e^{ntz}, truncated in t.
    ThetaZ,
    /// Multiplication by n.
    Y,
}

fn exp_factor(n: u32, order: u32, with_z: bool) -> LaurentSeries {
    let mut out = LaurentSeries::zero();
    for k in 0..=order {
        let c = Q::new(BigInt::from(n).pow(k), factorial(k));
        let term = LaurentSeries::monomial(Poly::monomial(c, k, 0), if with_z { k as i32 } else { 0 });
        out = out.add(&term);
    }
    out
}

/// Applies a grading flow; `order` bounds the retained t-degree.
pub fn grading_flow(f: &Functional, flow: Flow, order: u32) -> Result<Functional> {
    let apply = |n: u32, x: &LaurentSeries| -> Result<LaurentSeries> {
        match flow {
            Flow::Y => Ok(x.scale(&Q::from_integer(n.into()))),
            Flow::Theta | Flow::ThetaZ => {
                if x.t_degree() > order {
                    return Err(Error::TruncationOverflow {
                        degree: x.t_degree(),
                        order,
                    });
                }
                let e = exp_factor(n, order, flow == Flow::ThetaZ);
                Ok(x.mul(&e)?.map_coeffs(|p| p.truncate_t(order)))
            }
        }
    };
    match f.kind() {
        Kind::General => {
            let basis = f.basis().clone();
            let stored = basis
                .forests
                .iter()
                .zip(f.stored.iter())
                .map(|(fo, x)| apply(fo.degree(), x))
                .collect::<Result<Vec<_>>>()?;
            Ok(Functional::from_stored(Kind::General, basis, stored))
        }
        _ => f.map_tree_values(|t, x| apply(t.degree(), x)),
    }
}

/// The renormalization group of a local character.
#[derive(Clone, Debug)]
pub struct RgFlow {
    /// F_t: a character whose values are polynomials in t.
    pub f: Functional,
    /// β = t¹-coefficient of F_t.
    pub beta: Functional,
}

/// F_t = lim_{z→0} φ− * θ_{tz}(φ−⁻¹) and β = dF_t/dt at t = 0.
pub fn rg_flow(phi: &Functional) -> Result<RgFlow> {
    let minus = birkhoff_bogoliubov(phi)?.minus;
    rg_flow_from_counterterm(&minus)
}

/// The renormalization group read off a counterterm character φ−.
pub fn rg_flow_from_counterterm(minus: &Functional) -> Result<RgFlow> {
    let order = minus.degree();
    let g = minus.convolve(&grading_flow(&minus.inverse()?, Flow::ThetaZ, order)?)?;
    let f = limit_character(&g)?;
    let beta = f
        .map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.coeff_t(1))))?
        .as_kind(Kind::Infinitesimal)?;
    Ok(RgFlow { f, beta })
}

/// Takes z → 0 on every tree value, failing with the first tree that keeps a pole.
fn limit_character(g: &Functional) -> Result<Functional> {
    g.map_tree_values(|t, x| {
        let order = x.pole_order();
        if order > 0 {
            return Err(Error::NonLocal {
                tree: t.to_string(),
                pole_order: order,
            });
        }
        Ok(LaurentSeries::monomial(x.limit_at_zero()?, 0))
    })
}

/// β from the minus side: lim_{z→0} z·(φ− * Y(φ−⁻¹)).
pub fn beta_minus_side(phi: &Functional) -> Result<Functional> {
    let minus = birkhoff_bogoliubov(phi)?.minus;
    let s = minus.convolve(&grading_flow(&minus.inverse()?, Flow::Y, 0)?)?;
    let s = s.as_infinitesimal()?.map_tree_values(|_, x| x.shift(1))?;
    limit_character(&s)?.as_kind(Kind::Infinitesimal)
}

/// β from the plus side: the t¹-coefficient of (θ_{tz}φ)_+(0) * φ_+(0)⁻¹.
pub fn beta_plus_side(phi: &Functional) -> Result<Functional> {
    let order = phi.degree();
    let plus = birkhoff_bogoliubov(phi)?.plus;
    let moved = birkhoff_bogoliubov(&grading_flow(phi, Flow::ThetaZ, order)?)?.plus;
    let at_zero = |f: &Functional| limit_character(f);
    let ft = at_zero(&moved)?.convolve(&at_zero(&plus)?.inverse()?)?;
    ft.map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.truncate_t(order).coeff_t(1))))?
        .as_kind(Kind::Infinitesimal)
}

/// ∫_{0≤s_1≤…≤s_n<∞} Π e^{−k_i s_i} ds, integrating the innermost variable s_n first.
pub fn exponential_simplex_integral(ks: &[u32]) -> Q {
    // After integrating s_n, …, s_{j+1} the integrand is c·e^{−a s_j}·(outer factors):
    // ∫_{s_{j−1}}^∞ c e^{−(a + k_j) s} ds = c/(a + k_j) · e^{−(a + k_j) s_{j−1}}, with s_0 = 0.
    let mut rate = 0u64;
    let mut coeff = Q::one();
    for &k in ks.iter().rev() {
        rate += u64::from(k);
        coeff /= Q::from_integer(BigInt::from(rate));
    }
    coeff
}

/// γ− = Σ_n Σ_{(k_1..k_n)} (−1)^n z^{−n} ∫_simplex Π e^{−k_i s_i} · β_{k_1} * … * β_{k_n}.
pub fn time_ordered_counterterm(beta: &Functional, max_order: u32) -> Result<Functional> {
    beta.expect_kind(Kind::Infinitesimal)?;
    let basis = beta.basis().clone();
    let d = basis.degree();
    let components: BTreeMap<u32, Functional> = (1..=d)
        .map(|k| Ok((k, beta.homogeneous(k)?)))
        .collect::<Result<_>>()?;
    let mut total = Functional::unit(&basis).as_kind(Kind::General)?;
    // Walk chains (k_1, …, k_n) with Σ k_i ≤ D, carrying β_{k_1} * … * β_{k_n}.
    let mut stack: Vec<(Vec<u32>, Functional)> = vec![(Vec::new(), Functional::unit(&basis))];
    while let Some((chain, prod)) = stack.pop() {
        let used: u32 = chain.iter().sum();
        if chain.len() as u32 >= max_order {
            continue;
        }
        for k in 1..=d - used {
            let next_prod = prod.convolve(&components[&k])?;
            let mut next = chain.clone();
            next.push(k);
            let n = next.len() as i32;
            let sign = if n % 2 == 0 { Q::one() } else { -Q::one() };
            let c = exponential_simplex_integral(&next) * sign;
            let term = next_prod.map_values(|x| x.scale(&c).shift(-n))?;
            total = total.add(&term)?;
            stack.push((next, next_prod));
        }
    }
    total.as_character()
}

fn parse_functional(src: &str, alphabet: Option<&Alphabet>) -> Result<Functional> {
    use crate::text::Cursor;
    use crate::trees::{parse_raw_forest, resolve_forest, RawTree};

    let mut kind = None;
    let mut degree = None;
    let mut declared: Option<Alphabet> = None;
    let mut entries: Vec<(usize, Vec<RawTree>, LaurentSeries)> = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let line_no = ln + 1;
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let relocate = |e: Error, offset: usize| match e {
            Error::Parse { column, message, .. } => Error::Parse {
                line: line_no,
                column: column + offset,
                message,
            },
            other => other,
        };
        if let Some((key, value)) = content.split_once(':') {
            let key = key.trim();
            if !key.contains('=') {
                let value = value.trim();
                let col = content.find(':').unwrap() + 2;
                match key {
                    "kind" => {
                        kind = Some(Kind::parse(value).ok_or_else(|| {
                            Error::parse(line_no, col, format!("unknown kind `{value}`"))
                        })?)
                    }
                    "degree" => {
                        degree = Some(value.parse::<u32>().map_err(|_| {
                            Error::parse(line_no, col, format!("invalid degree `{value}`"))
                        })?)
                    }
                    "alphabet" => {
                        declared = Some(Alphabet::parse(value).map_err(|e| relocate(e, col - 1))?)
                    }
                    other => {
                        return Err(Error::parse(line_no, 1, format!("unknown header `{other}`")))
                    }
                }
                continue;
            }
        }
        let Some(eq) = content.find('=') else {
            return Err(Error::parse(line_no, 1, "expected `forest = series`"));
        };
        let mut cur = Cursor::new(&content[..eq]);
        cur.skip_ws();
        let forest = parse_raw_forest(&mut cur).map_err(|e| relocate(e, 0))?;
        cur.finish().map_err(|e| relocate(e, 0))?;
        let value =
            LaurentSeries::parse(&content[eq + 1..]).map_err(|e| relocate(e, eq + 1))?;
        entries.push((line_no, forest, value));
    }
    let kind = kind.unwrap_or(Kind::Character);
    let alphabet = match (alphabet, declared) {
        (Some(a), _) => a.clone(),
        (None, Some(a)) => a,
        (None, None) => {
            let mut labels = Vec::new();
            for (_, f, _) in &entries {
                for t in f {
                    t.collect_labels(&mut labels);
                }
            }
            if labels.is_empty() {
                return Err(Error::invalid("no alphabet declared and no entries to infer one from"));
            }
            Alphabet::infer(labels)?
        }
    };
    let mut resolved = Vec::with_capacity(entries.len());
    for (line_no, f, v) in entries {
        let forest = resolve_forest(&f, &alphabet)?;
        if kind != Kind::General && forest.len() != 1 {
            return Err(Error::parse(
                line_no,
                1,
                format!("a {} is given by values on single trees", kind.name()),
            ));
        }
        resolved.push((forest, v));
    }
    let degree = match degree {
        Some(d) => d,
        None => resolved.iter().map(|(f, _)| f.degree()).max().unwrap_or(1),
    };
    let basis = Basis::new(&alphabet, degree)?;
    match kind {
        Kind::General => Functional::general(&basis, resolved),
        kind => Functional::on_trees(
            kind,
            &basis,
            resolved
                .into_iter()
                .map(|(f, v)| (f.as_tree().expect("checked").clone(), v)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn s(x: &str) -> LaurentSeries {
        LaurentSeries::parse(x).unwrap()
    }

    fn setup(d: u32) -> (Arc<Basis>, RootedTree, RootedTree, RootedTree) {
        let a = Alphabet::single("f1");
        let b = Basis::new(&a, d).unwrap();
        let dot = RootedTree::parse("f1", &a).unwrap();
        let l2 = RootedTree::parse("f1[f1]", &a).unwrap();
        let l3 = RootedTree::parse("f1[f1[f1]]", &a).unwrap();
        (b, dot, l2, l3)
    }

    fn forest(t: &[&RootedTree]) -> Forest {
        Forest::new(t.iter().map(|x| (*x).clone()).collect())
    }

    #[test]
    fn convolution_examples() {
        let (b, dot, l2, _) = setup(3);
        let f = Functional::character(&b, [(dot.clone(), s("1/z")), (l2.clone(), s("1/z^2"))]).unwrap();
        let e = Functional::unit(&b);
        assert_eq!(f.convolve(&e).unwrap(), f);
        assert_eq!(f.convolve(&f).unwrap().tree_value(&l2).unwrap(), s("3/z^2"));
        assert_eq!(f.inverse().unwrap().tree_value(&dot).unwrap(), s("-1/z"));
        assert_eq!(f.inverse().unwrap(), f.inverse_geometric().unwrap());
        assert_eq!(f.convolve(&f.inverse().unwrap()).unwrap(), e);
    }

    #[test]
    fn exp_log_examples() {
        let (b, dot, l2, _) = setup(3);
        let z = Functional::infinitesimal(&b, [(dot.clone(), s("1"))]).unwrap();
        let ez = z.exp_star().unwrap();
        assert_eq!(ez.tree_value(&dot).unwrap(), s("1"));
        assert_eq!(ez.tree_value(&l2).unwrap(), s("1/2"));
        assert_eq!(ez.value(&forest(&[&dot, &dot])).unwrap(), s("1"));
        assert_eq!(ez.log_star().unwrap(), z);
        assert_eq!(Functional::zero(&b).exp_star().unwrap(), Functional::unit(&b));
        assert!(matches!(ez.exp_star(), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn birkhoff_examples() {
        let (b, dot, l2, _) = setup(2);
        let phi = Functional::character(&b, [(dot.clone(), s("1/z"))]).unwrap();
        let pair = birkhoff_bogoliubov(&phi).unwrap();
        assert_eq!(pair.minus.tree_value(&dot).unwrap(), s("-1/z"));
        assert!(pair.plus.tree_value(&dot).unwrap().is_zero());

        let phi = Functional::character(&b, [(dot.clone(), s("1/z")), (l2.clone(), s("1/z^2"))]).unwrap();
        let pair = birkhoff_bogoliubov(&phi).unwrap();
        assert!(pair.minus.tree_value(&l2).unwrap().is_zero());
        assert!(pair.plus.tree_value(&l2).unwrap().is_zero());
        assert!(bogoliubov_bar(&phi, &l2).unwrap().is_zero());
        assert_eq!(bogoliubov_bar(&phi, &dot).unwrap(), s("1/z"));
        assert_eq!(birkhoff_bch(&phi).unwrap(), pair);

        let phi = Functional::character(&b, [(dot.clone(), s("1/z + 1"))]).unwrap();
        let pair = birkhoff_bogoliubov(&phi).unwrap();
        assert_eq!(pair.minus.tree_value(&dot).unwrap(), s("-1/z"));
        assert_eq!(pair.plus.tree_value(&dot).unwrap(), s("1"));
        let back = pair.minus.inverse().unwrap().convolve(&pair.plus).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn flows() {
        let (b, dot, l2, _) = setup(2);
        let f = Functional::character(&b, [(dot.clone(), s("3")), (l2.clone(), s("1"))]).unwrap();
        let y = grading_flow(&f, Flow::Y, 0).unwrap();
        assert_eq!(y.tree_value(&dot).unwrap(), s("3"));
        assert_eq!(y.tree_value(&l2).unwrap(), s("2"));
        let th = grading_flow(&f, Flow::ThetaZ, 2).unwrap();
        assert_eq!(th.tree_value(&l2).unwrap(), s("1 + 2*t*z + 2*t^2*z^2"));
        let theta0 = grading_flow(&f, Flow::Theta, 2)
            .unwrap()
            .map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.eval_t(&qi(0)))))
            .unwrap();
        assert_eq!(theta0, f);
        let deep = Functional::character(&b, [(dot.clone(), s("t^3"))]).unwrap();
        assert!(matches!(
            grading_flow(&deep, Flow::ThetaZ, 2),
            Err(Error::TruncationOverflow { degree: 3, order: 2 })
        ));
    }

    #[test]
    fn rg_for_primitive_beta() {
        let (b, dot, l2, _) = setup(3);
        // φ− = exp*(−β̂/z) with β̂(•) = 1.
        let bhat = Functional::infinitesimal(&b, [(dot.clone(), s("-1/z"))]).unwrap();
        let minus = bhat.exp_star().unwrap();
        let rg = rg_flow_from_counterterm(&minus).unwrap();
        assert_eq!(rg.f.tree_value(&dot).unwrap(), s("t"));
        assert_eq!(rg.beta.tree_value(&dot).unwrap(), s("1"));
        assert_eq!(rg.f.tree_value(&l2).unwrap(), s("1/2*t^2"));

        let bad = Functional::character(&b, [(dot.clone(), s("1/z")), (l2.clone(), s("7/z^2"))]).unwrap();
        match rg_flow(&bad) {
            Err(Error::NonLocal { tree, pole_order }) => {
                assert_eq!(tree, "f1[f1]");
                assert!(pole_order >= 1);
            }
            other => panic!("expected non-locality, got {other:?}"),
        }
    }

    #[test]
    fn simplex_integrals() {
        assert_eq!(exponential_simplex_integral(&[2]), q(1, 2));
        assert_eq!(exponential_simplex_integral(&[1, 1, 1]), q(1, 6));
        assert_eq!(exponential_simplex_integral(&[]), qi(1));
        // 1/(k_2 (k_2 + k_1)) for (k_1, k_2) = (1, 2)
        assert_eq!(exponential_simplex_integral(&[1, 2]), q(1, 6));
    }

    #[test]
    fn counterterm_for_degree_one_beta() {
        let (b, dot, _, _) = setup(3);
        let beta = Functional::infinitesimal(&b, [(dot.clone(), s("1"))]).unwrap();
        let gamma = time_ordered_counterterm(&beta, 3).unwrap();
        let expected = beta.scale(&qi(-1)).unwrap().as_infinitesimal().unwrap();
        let expected = expected.map_tree_values(|_, x| x.shift(-1)).unwrap().exp_star().unwrap();
        assert_eq!(gamma, expected);
        let none = time_ordered_counterterm(&beta, 0).unwrap();
        assert_eq!(none, Functional::unit(&b));
    }

    #[test]
    fn file_format() {
        let text = "kind: character\ndegree: 2\n# comment\nf1 = 1/z\nf1[f1] = 1/z^2 + 1\n";
        let f = Functional::parse_file(text, None).unwrap();
        assert_eq!(f.degree(), 2);
        let again = Functional::parse_file(&f.to_file_string(), None).unwrap();
        assert_eq!(again, f);
        let err = Functional::parse_file("f1 = 1/(z+1)\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = Functional::parse_file("kind: character\nf1 f1 = 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
