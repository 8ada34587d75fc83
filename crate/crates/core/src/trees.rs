//! Decorated non-planar rooted trees, forests and their rational linear combinations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{factorial, fmt_q, Q};
use crate::text::Cursor;

/// Largest degree the enumerators accept unless a caller raises it explicitly.
pub const SAFETY_BOUND: u32 = 12;

/// A vertex label. `index` is the position in the owning alphabet's total order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Decoration {
    name: Arc<str>,
    weight: u32,
    index: u32,
}

impl Decoration {
    pub fn new(name: &str, weight: u32, index: u32) -> Self {
        assert!(weight >= 1, "decoration weight must be positive");
        Decoration {
            name: name.into(),
            weight,
            index,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

impl Ord for Decoration {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index
            .cmp(&other.index)
            .then_with(|| self.name.cmp(&other.name))
            .then_with(|| self.weight.cmp(&other.weight))
    }
}

impl PartialOrd for Decoration {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Decoration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite, strictly ordered set of decorations, smallest first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    letters: Vec<Decoration>,
}

impl Alphabet {
    /// Letters listed in increasing order with their weights.
    pub fn new(letters: &[(&str, u32)]) -> Result<Self> {
        let mut out = Vec::with_capacity(letters.len());
        for (i, (name, weight)) in letters.iter().enumerate() {
            if *weight == 0 {
                return Err(Error::invalid(format!("letter `{name}` has weight 0")));
            }
            if !is_identifier(name) || *name == "I" {
                return Err(Error::invalid(format!("`{name}` is not a valid letter name")));
            }
            if out.iter().any(|d: &Decoration| d.name() == *name) {
                return Err(Error::invalid(format!("letter `{name}` declared twice")));
            }
            out.push(Decoration::new(name, *weight, i as u32));
        }
        if out.is_empty() {
            return Err(Error::invalid("empty alphabet"));
        }
        Ok(Alphabet { letters: out })
    }

    /// A single weight-one letter `name`: the undecorated case.
    pub fn single(name: &str) -> Self {
        Alphabet::new(&[(name, 1)]).expect("valid single letter")
    }

    /// The letters f_1..f_n with |f_k| = k, ordered f_n < ... < f_1.
    pub fn universal(n: u32) -> Self {
        let names: Vec<String> = (1..=n).rev().map(|k| format!("f{k}")).collect();
        let letters: Vec<(&str, u32)> = names
            .iter()
            .zip((1..=n).rev())
            .map(|(s, k)| (s.as_str(), k))
            .collect();
        Alphabet::new(&letters).expect("valid universal alphabet")
    }

    /// Parses `a,b,c` (weights 1), `a:1,b:2`, or `universal:N`.
    pub fn parse(src: &str) -> Result<Self> {
        let src = src.trim();
        if let Some(n) = src.strip_prefix("universal:") {
            let n: u32 = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(1, 11, "expected the number of letters"))?;
            if n == 0 {
                return Err(Error::parse(1, 11, "universal alphabet needs at least one letter"));
            }
            return Ok(Alphabet::universal(n));
        }
        let mut letters = Vec::new();
        let mut column = 1;
        for part in src.split(',') {
            let (name, weight) = match part.split_once(':') {
                Some((n, w)) => {
                    let w: u32 = w.trim().parse().map_err(|_| {
                        Error::parse(1, column + n.len() + 1, format!("invalid weight `{}`", w.trim()))
                    })?;
                    (n.trim(), w)
                }
                None => (part.trim(), 1),
            };
            if !is_identifier(name) {
                return Err(Error::parse(1, column, format!("invalid letter name `{name}`")));
            }
            letters.push((name.to_string(), weight));
            column += part.chars().count() + 1;
        }
        let refs: Vec<(&str, u32)> = letters.iter().map(|(n, w)| (n.as_str(), *w)).collect();
        Alphabet::new(&refs)
    }

    /// Builds a weight-one alphabet from the labels used in some text, sorted by name.
    pub fn infer<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut names: Vec<&str> = names.into_iter().collect();
        names.sort_unstable();
        names.dedup();
        let letters: Vec<(&str, u32)> = names.into_iter().map(|n| (n, 1)).collect();
        Alphabet::new(&letters)
    }

    pub fn letters(&self) -> &[Decoration] {
        &self.letters
    }

    pub fn get(&self, name: &str) -> Result<&Decoration> {
        self.letters
            .iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::UnknownDecoration(name.to_string()))
    }

    pub fn contains(&self, d: &Decoration) -> bool {
        self.letters.iter().any(|x| x == d)
    }

    /// Letters whose weight equals `w`.
    pub fn of_weight(&self, w: u32) -> impl Iterator<Item = &Decoration> {
        self.letters.iter().filter(move |d| d.weight() == w)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|d| format!("{}:{}", d.name(), d.weight()))
            .collect();
        f.write_str(&parts.join(","))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

#[derive(PartialEq, Eq, Hash, Debug)]
struct Node {
    root: Decoration,
    children: Vec<RootedTree>,
    degree: u32,
    vertices: u32,
}

/// A decorated rooted tree in canonical form: children sorted increasingly.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RootedTree(Arc<Node>);

impl RootedTree {
    /// The B⁺_a operator: a new root labelled `root` above the trees of `forest`.
    pub fn graft(root: Decoration, forest: &Forest) -> Self {
        Self::from_children(root, forest.trees().to_vec())
    }

    pub fn from_children(root: Decoration, mut children: Vec<RootedTree>) -> Self {
        children.sort();
        let degree = root.weight() + children.iter().map(|c| c.degree()).sum::<u32>();
        let vertices = 1 + children.iter().map(|c| c.vertices()).sum::<u32>();
        RootedTree(Arc::new(Node {
            root,
            children,
            degree,
            vertices,
        }))
    }

    pub fn leaf(root: Decoration) -> Self {
        Self::from_children(root, Vec::new())
    }

    /// The ladder with `n` vertices all labelled `d`.
    pub fn ladder(d: &Decoration, n: u32) -> Self {
        assert!(n >= 1);
        let mut t = RootedTree::leaf(d.clone());
        for _ in 1..n {
            t = RootedTree::from_children(d.clone(), vec![t]);
        }
        t
    }

    /// The corolla: a root with `n` leaf children, all labelled `d`.
    pub fn corolla(d: &Decoration, n: u32) -> Self {
        let leaves = (0..n).map(|_| RootedTree::leaf(d.clone())).collect();
        RootedTree::from_children(d.clone(), leaves)
    }

    pub fn root(&self) -> &Decoration {
        &self.0.root
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.0.children
    }

    /// The children as a forest.
    pub fn branches(&self) -> Forest {
        Forest::from_sorted(self.0.children.clone())
    }

    /// Total decoration weight.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn vertices(&self) -> u32 {
        self.0.vertices
    }

    /// Order of the automorphism group of the decorated tree.
    pub fn symmetry_factor(&self) -> BigInt {
        let mut out = BigInt::one();
        let children = self.children();
        let mut i = 0;
        while i < children.len() {
            let mut j = i;
            while j < children.len() && children[j] == children[i] {
                j += 1;
            }
            let m = (j - i) as u32;
            out *= factorial(m) * children[i].symmetry_factor().pow(m);
            i = j;
        }
        out
    }

    /// Fertility of every vertex in depth-first order.
    pub fn fertilities(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.vertices() as usize);
        fn walk(t: &RootedTree, out: &mut Vec<usize>) {
            out.push(t.children().len());
            for c in t.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// Decorations of every vertex in depth-first order.
    pub fn labels(&self) -> Vec<Decoration> {
        let mut out = Vec::with_capacity(self.vertices() as usize);
        fn walk(t: &RootedTree, out: &mut Vec<Decoration>) {
            out.push(t.root().clone());
            for c in t.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    /// All non-trivial admissible cuts.
    pub fn admissible_cuts(&self) -> Vec<AdmissibleCut> {
        all_cuts(self)
            .into_iter()
            .filter(|c| !c.edges.is_empty())
            .map(|c| AdmissibleCut {
                edges: c.edges,
                trunk: c.trunk,
                crown: Forest::new(c.crown),
            })
            .collect()
    }

    pub fn parse(src: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut cur = Cursor::new(src);
        cur.skip_ws();
        let raw = RawTree::parse(&mut cur)?;
        cur.finish()?;
        raw.resolve(alphabet)
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.root().cmp(other.root()))
            .then_with(|| self.children().cmp(other.children()))
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root())?;
        if !self.children().is_empty() {
            f.write_str("[")?;
            for (i, c) in self.children().iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

struct RawCut {
    edges: Vec<Vec<usize>>,
    trunk: RootedTree,
    crown: Vec<RootedTree>,
}

/// Every admissible cut of `t`, including the empty one. Each child edge is either cut
/// (the whole branch joins the crown) or kept, in which case the branch is cut recursively.
fn all_cuts(t: &RootedTree) -> Vec<RawCut> {
    let mut partial = vec![RawCut {
        edges: Vec::new(),
        trunk: t.clone(),
        crown: Vec::new(),
    }];
    // `partial` trunks hold only the processed children; rebuilt at the end.
    let mut kept: Vec<Vec<RootedTree>> = vec![Vec::new()];
    for (i, child) in t.children().iter().enumerate() {
        let sub = all_cuts(child);
        let mut next = Vec::with_capacity(partial.len() * (sub.len() + 1));
        let mut next_kept = Vec::with_capacity(next.capacity());
        for (p, k) in partial.iter().zip(&kept) {
            let mut edges = p.edges.clone();
            edges.push(vec![i]);
            let mut crown = p.crown.clone();
            crown.push(child.clone());
            next.push(RawCut {
                edges,
                trunk: t.clone(),
                crown,
            });
            next_kept.push(k.clone());
            for s in &sub {
                let mut edges = p.edges.clone();
                edges.extend(s.edges.iter().map(|e| {
                    let mut path = vec![i];
                    path.extend_from_slice(e);
                    path
                }));
                let mut crown = p.crown.clone();
                crown.extend(s.crown.iter().cloned());
                let mut k2 = k.clone();
                k2.push(s.trunk.clone());
                next.push(RawCut {
                    edges,
                    trunk: t.clone(),
                    crown,
                });
                next_kept.push(k2);
            }
        }
        partial = next;
        kept = next_kept;
    }
    for (p, k) in partial.iter_mut().zip(kept) {
        p.trunk = RootedTree::from_children(t.root().clone(), k);
    }
    partial
}

/// A nonempty set of removed edges with the resulting trunk (containing the root) and crown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleCut {
    /// Each removed edge, addressed by the child-index path from the root to its lower vertex.
    pub edges: Vec<Vec<usize>>,
    pub trunk: RootedTree,
    pub crown: Forest,
}

/// A commutative monomial in trees; the empty forest is the unit I.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Forest {
    trees: Vec<RootedTree>,
    degree: u32,
}

impl Forest {
    pub fn new(mut trees: Vec<RootedTree>) -> Self {
        trees.sort();
        Self::from_sorted(trees)
    }

    fn from_sorted(trees: Vec<RootedTree>) -> Self {
        let degree = trees.iter().map(|t| t.degree()).sum();
        Forest { trees, degree }
    }

    pub fn unit() -> Self {
        Forest::default()
    }

    pub fn single(t: RootedTree) -> Self {
        Forest {
            degree: t.degree(),
            trees: vec![t],
        }
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.trees
    }

    pub fn is_unit(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn as_tree(&self) -> Option<&RootedTree> {
        match self.trees.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    pub fn mul(&self, other: &Forest) -> Forest {
        let mut trees = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.trees.len() && j < other.trees.len() {
            if self.trees[i] <= other.trees[j] {
                trees.push(self.trees[i].clone());
                i += 1;
            } else {
                trees.push(other.trees[j].clone());
                j += 1;
            }
        }
        trees.extend_from_slice(&self.trees[i..]);
        trees.extend_from_slice(&other.trees[j..]);
        Forest {
            trees,
            degree: self.degree + other.degree,
        }
    }

    /// Symmetry factor of a forest: product over trees times multiplicities factorial.
    pub fn symmetry_factor(&self) -> BigInt {
        RootedTree::from_children(Decoration::new("_", 1, u32::MAX), self.trees.clone())
            .symmetry_factor()
    }

    pub fn parse(src: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut cur = Cursor::new(src);
        cur.skip_ws();
        let raw = parse_raw_forest(&mut cur)?;
        cur.finish()?;
        resolve_forest(&raw, alphabet)
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.trees.len().cmp(&self.trees.len()))
            .then_with(|| self.trees.cmp(&other.trees))
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trees.is_empty() {
            return f.write_str("I");
        }
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl From<RootedTree> for Forest {
    fn from(t: RootedTree) -> Self {
        Forest::single(t)
    }
}

/// A finite rational combination of forests.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TreePoly {
    terms: BTreeMap<Forest, Q>,
}

impl TreePoly {
    pub fn zero() -> Self {
        TreePoly::default()
    }

    pub fn one() -> Self {
        TreePoly::from(Forest::unit())
    }

    pub fn term(f: Forest, c: Q) -> Self {
        let mut p = TreePoly::zero();
        p.add_term(f, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, f: &Forest) -> Q {
        self.terms.get(f).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, f: Forest, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(f) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TreePoly) -> TreePoly {
        let mut out = self.clone();
        for (f, c) in other.terms() {
            out.add_term(f.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TreePoly) -> TreePoly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> TreePoly {
        if c.is_zero() {
            return TreePoly::zero();
        }
        TreePoly {
            terms: self.terms.iter().map(|(f, x)| (f.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &TreePoly) -> TreePoly {
        let mut out = TreePoly::zero();
        for (f, a) in self.terms() {
            for (g, b) in other.terms() {
                out.add_term(f.mul(g), a * b);
            }
        }
        out
    }

    /// Applies a linear map given on forests.
    pub fn map_linear(&self, l: impl Fn(&Forest) -> TreePoly) -> TreePoly {
        let mut out = TreePoly::zero();
        for (f, c) in self.terms() {
            for (g, d) in l(f).terms() {
                out.add_term(g.clone(), c * d);
            }
        }
        out
    }

    /// Applies B⁺_a linearly.
    pub fn graft(&self, a: &Decoration) -> TreePoly {
        self.map_linear(|f| TreePoly::from(Forest::single(RootedTree::graft(a.clone(), f))))
    }

    /// Component of the given degree.
    pub fn homogeneous(&self, degree: u32) -> TreePoly {
        TreePoly {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| f.degree() == degree)
                .map(|(f, c)| (f.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|f| f.degree()).max()
    }

    pub fn parse(src: &str, alphabet: &Alphabet) -> Result<Self> {
        let raw = RawPoly::parse(src)?;
        raw.resolve(alphabet)
    }
}

impl From<Forest> for TreePoly {
    fn from(f: Forest) -> Self {
        TreePoly::term(f, Q::one())
    }
}

impl From<RootedTree> for TreePoly {
    fn from(t: RootedTree) -> Self {
        TreePoly::from(Forest::single(t))
    }
}

impl fmt::Display for TreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(f, self.terms.iter().map(|(k, c)| (k.to_string(), k.is_unit(), c)))
    }
}

/// Shared printer for `c*X + ...` with the unit basis element printed as the bare coefficient.
pub(crate) fn write_combination<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, bool, &'a Q)>,
) -> fmt::Result {
    let mut first = true;
    for (basis, is_unit, c) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if is_unit {
            f.write_str(&fmt_q(&abs))?;
        } else if abs.is_one() {
            f.write_str(&basis)?;
        } else {
            write!(f, "{}*{}", fmt_q(&abs), basis)?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// A parsed but unresolved tree: labels are still strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTree {
    pub label: String,
    pub children: Vec<RawTree>,
}

impl RawTree {
    pub(crate) fn parse(cur: &mut Cursor<'_>) -> Result<Self> {
        let label = cur
            .ident()
            .ok_or_else(|| cur.error("expected a letter name"))?
            .to_string();
        let mut children = Vec::new();
        if cur.eat('[') {
            cur.skip_blank();
            loop {
                children.push(RawTree::parse(cur)?);
                cur.skip_blank();
                if cur.eat(']') {
                    break;
                }
                if cur.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
                    continue;
                }
                return Err(cur.error("expected a tree or `]`"));
            }
        }
        Ok(RawTree { label, children })
    }

    pub fn resolve(&self, alphabet: &Alphabet) -> Result<RootedTree> {
        if self.label == "I" {
            return Err(Error::UnknownDecoration("I".into()));
        }
        let root = alphabet.get(&self.label)?.clone();
        let children = self
            .children
            .iter()
            .map(|c| c.resolve(alphabet))
            .collect::<Result<Vec<_>>>()?;
        Ok(RootedTree::from_children(root, children))
    }

    pub fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        out.push(&self.label);
        for c in &self.children {
            c.collect_labels(out);
        }
    }
}

pub(crate) fn parse_raw_forest(cur: &mut Cursor<'_>) -> Result<Vec<RawTree>> {
    let mut trees = Vec::new();
    loop {
        if cur.rest().starts_with('I')
            && !cur
                .peek2()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
        {
            cur.bump();
        } else {
            trees.push(RawTree::parse(cur)?);
        }
        let save_ws = cur.rest().starts_with([' ', '\t']);
        cur.skip_blank();
        if save_ws && cur.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
            continue;
        }
        break;
    }
    Ok(trees)
}

pub(crate) fn resolve_forest(raw: &[RawTree], alphabet: &Alphabet) -> Result<Forest> {
    Ok(Forest::new(
        raw.iter()
            .map(|t| t.resolve(alphabet))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// A parsed but unresolved tree polynomial.
#[derive(Clone, Debug)]
pub struct RawPoly {
    pub terms: Vec<(Q, Vec<RawTree>)>,
}

impl RawPoly {
    pub fn parse(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src);
        let p = Self::parse_cursor(&mut cur)?;
        cur.finish()?;
        Ok(p)
    }

    pub(crate) fn parse_cursor(cur: &mut Cursor<'_>) -> Result<Self> {
        let mut terms = Vec::new();
        cur.skip_blank();
        let mut sign = Q::one();
        if cur.eat('-') {
            sign = -sign;
            cur.skip_blank();
        } else if cur.eat('+') {
            cur.skip_blank();
        }
        loop {
            let coeff = cur.unsigned_rational()?;
            cur.skip_blank();
            let forest = match coeff {
                Some(c) => {
                    if cur.eat('*') {
                        cur.skip_blank();
                        let f = parse_raw_forest(cur)?;
                        terms.push((sign.clone() * c, f));
                    } else {
                        terms.push((sign.clone() * c, Vec::new()));
                    }
                    None
                }
                None => Some(parse_raw_forest(cur)?),
            };
            if let Some(f) = forest {
                terms.push((sign.clone(), f));
            }
            cur.skip_blank();
            if cur.eat('+') {
                sign = Q::one();
            } else if cur.eat('-') {
                sign = -Q::one();
            } else {
                break;
            }
            cur.skip_blank();
        }
        Ok(RawPoly { terms })
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (_, f) in &self.terms {
            for t in f {
                t.collect_labels(&mut out);
            }
        }
        out
    }

    pub fn resolve(&self, alphabet: &Alphabet) -> Result<TreePoly> {
        let mut out = TreePoly::zero();
        for (c, f) in &self.terms {
            out.add_term(resolve_forest(f, alphabet)?, c.clone());
        }
        Ok(out)
    }
}

/// All trees of each degree 1..=max_degree, in canonical increasing order per degree.
pub fn trees_by_degree(alphabet: &Alphabet, max_degree: u32) -> Result<Vec<Vec<RootedTree>>> {
    trees_by_degree_bounded(alphabet, max_degree, SAFETY_BOUND)
}

pub fn trees_by_degree_bounded(
    alphabet: &Alphabet,
    max_degree: u32,
    bound: u32,
) -> Result<Vec<Vec<RootedTree>>> {
    if max_degree > bound {
        return Err(Error::SafetyBound {
            requested: max_degree,
            bound,
        });
    }
    // by_degree[n] = trees of degree n; forests[n] = forests of degree n.
    let mut by_degree: Vec<Vec<RootedTree>> = vec![Vec::new(); max_degree as usize + 1];
    let mut forests: Vec<Vec<Forest>> = vec![vec![Forest::unit()]];
    for n in 1..=max_degree {
        let mut level = Vec::new();
        for a in alphabet.letters() {
            if a.weight() <= n {
                for f in &forests[(n - a.weight()) as usize] {
                    level.push(RootedTree::graft(a.clone(), f));
                }
            }
        }
        level.sort();
        by_degree[n as usize] = level;
        forests.push(forests_of_degree(&by_degree, n));
    }
    Ok(by_degree)
}

/// Multisets of trees with total degree `n`, drawn from `by_degree[1..=n]`.
fn forests_of_degree(by_degree: &[Vec<RootedTree>], n: u32) -> Vec<Forest> {
    let pool: Vec<&RootedTree> = by_degree[1..=n as usize].iter().flatten().collect();
    let mut out = Vec::new();
    fn rec(
        pool: &[&RootedTree],
        start: usize,
        remaining: u32,
        acc: &mut Vec<RootedTree>,
        out: &mut Vec<Forest>,
    ) {
        if remaining == 0 {
            out.push(Forest::new(acc.clone()));
            return;
        }
        for i in start..pool.len() {
            let d = pool[i].degree();
            if d <= remaining {
                acc.push(pool[i].clone());
                rec(pool, i, remaining - d, acc, out);
                acc.pop();
            }
        }
    }
    rec(&pool, 0, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// All trees of degree ≤ `max_degree`, ordered by degree then canonically.
pub fn enumerate_trees(alphabet: &Alphabet, max_degree: u32) -> Result<Vec<RootedTree>> {
    if max_degree == 0 {
        return Err(Error::invalid("maximal degree must be at least 1"));
    }
    Ok(trees_by_degree(alphabet, max_degree)?.into_iter().flatten().collect())
}

/// All forests of degree ≤ `max_degree`, starting with I.
pub fn enumerate_forests(alphabet: &Alphabet, max_degree: u32) -> Result<Vec<Forest>> {
    let by_degree = trees_by_degree(alphabet, max_degree)?;
    let mut out = vec![Forest::unit()];
    for n in 1..=max_degree {
        out.extend(forests_of_degree(&by_degree, n));
    }
    Ok(out)
}
