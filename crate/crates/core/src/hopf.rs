//! The Connes-Kreimer Hopf algebra structure on tree polynomials.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};
use crate::trees::{enumerate_forests, write_combination, Alphabet, Forest, RootedTree, TreePoly};

/// An element of H ⊗ H.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TensorPoly {
    terms: BTreeMap<(Forest, Forest), Q>,
}

impl TensorPoly {
    pub fn zero() -> Self {
        TensorPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Forest, Forest), &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, left: &Forest, right: &Forest) -> Q {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, left: Forest, right: Forest, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((left, right)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        for ((l, r), c) in other.terms() {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for ((a, b), x) in self.terms() {
            for ((c, d), y) in other.terms() {
                out.add_term(a.mul(c), b.mul(d), x * y);
            }
        }
        out
    }

    /// x ⊗ y for tree polynomials.
    pub fn tensor(x: &TreePoly, y: &TreePoly) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for (f, a) in x.terms() {
            for (g, b) in y.terms() {
                out.add_term(f.clone(), g.clone(), a * b);
            }
        }
        out
    }

    /// Applies linear maps on each side.
    pub fn map(
        &self,
        left: impl Fn(&Forest) -> TreePoly,
        right: impl Fn(&Forest) -> TreePoly,
    ) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for ((l, r), c) in self.terms() {
            let t = TensorPoly::tensor(&left(l), &right(r));
            for ((a, b), d) in t.terms() {
                out.add_term(a.clone(), b.clone(), c * d);
            }
        }
        out
    }

    /// The multiplication map m: H ⊗ H → H.
    pub fn multiply(&self) -> TreePoly {
        let mut out = TreePoly::zero();
        for ((l, r), c) in self.terms() {
            out.add_term(l.mul(r), c.clone());
        }
        out
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_combination(
            f,
            self.terms
                .iter()
                .map(|((l, r), c)| (format!("{l} ⊗ {r}"), false, c)),
        )
    }
}

/// One summand P_c ⊗ R_c of the reduced coproduct of a tree, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutTerm {
    pub crown: Forest,
    pub trunk: RootedTree,
    pub multiplicity: u64,
}

thread_local! {
    static CUTS: RefCell<HashMap<RootedTree, Arc<Vec<CutTerm>>>> = RefCell::new(HashMap::new());
    static ANTIPODE: RefCell<HashMap<RootedTree, Arc<TreePoly>>> = RefCell::new(HashMap::new());
}

/// Reduced coproduct of a tree: admissible cuts grouped by (crown, trunk).
pub fn cut_terms(t: &RootedTree) -> Arc<Vec<CutTerm>> {
    if let Some(hit) = CUTS.with(|c| c.borrow().get(t).cloned()) {
        return hit;
    }
    let mut grouped: BTreeMap<(Forest, RootedTree), u64> = BTreeMap::new();
    for cut in t.admissible_cuts() {
        *grouped.entry((cut.crown, cut.trunk)).or_insert(0) += 1;
    }
    let terms: Arc<Vec<CutTerm>> = Arc::new(
        grouped
            .into_iter()
            .map(|((crown, trunk), multiplicity)| CutTerm {
                crown,
                trunk,
                multiplicity,
            })
            .collect(),
    );
    CUTS.with(|c| c.borrow_mut().insert(t.clone(), terms.clone()));
    terms
}

/// Δ(t) = t ⊗ I + I ⊗ t + Σ_c P_c ⊗ R_c.
pub fn coproduct_tree(t: &RootedTree) -> TensorPoly {
    let mut out = TensorPoly::zero();
    let tf = Forest::single(t.clone());
    out.add_term(tf.clone(), Forest::unit(), Q::one());
    out.add_term(Forest::unit(), tf, Q::one());
    for c in cut_terms(t).iter() {
        out.add_term(
            c.crown.clone(),
            Forest::single(c.trunk.clone()),
            Q::from_integer(c.multiplicity.into()),
        );
    }
    out
}

pub fn coproduct_forest(f: &Forest) -> TensorPoly {
    let mut out = TensorPoly::zero();
    out.add_term(Forest::unit(), Forest::unit(), Q::one());
    for t in f.trees() {
        out = out.mul(&coproduct_tree(t));
    }
    out
}

pub fn coproduct(x: &TreePoly) -> TensorPoly {
    let mut out = TensorPoly::zero();
    for (f, c) in x.terms() {
        for ((l, r), d) in coproduct_forest(f).terms() {
            out.add_term(l.clone(), r.clone(), c * d);
        }
    }
    out
}

pub fn counit(x: &TreePoly) -> Q {
    x.coeff(&Forest::unit())
}

/// S(t) = −t − Σ_c S(P_c) R_c.
pub fn antipode_tree(t: &RootedTree) -> Arc<TreePoly> {
    if let Some(hit) = ANTIPODE.with(|c| c.borrow().get(t).cloned()) {
        return hit;
    }
    let mut out = TreePoly::term(Forest::single(t.clone()), -Q::one());
    for c in cut_terms(t).iter() {
        let s = antipode_forest(&c.crown);
        let r = TreePoly::from(c.trunk.clone());
        out = out.sub(&s.mul(&r).scale(&Q::from_integer(c.multiplicity.into())));
    }
    let out = Arc::new(out);
    ANTIPODE.with(|c| c.borrow_mut().insert(t.clone(), out.clone()));
    out
}

pub fn antipode_forest(f: &Forest) -> TreePoly {
    let mut out = TreePoly::one();
    for t in f.trees() {
        out = out.mul(&antipode_tree(t));
    }
    out
}

pub fn antipode(x: &TreePoly) -> TreePoly {
    x.map_linear(antipode_forest)
}

/// The antipode as the geometric series Σ_k (ε − id)^{*k}; kept as an independent oracle.
pub fn antipode_geometric(x: &TreePoly) -> TreePoly {
    let mut out = TreePoly::zero();
    let top = x.max_degree().unwrap_or(0);
    out = out.add(&TreePoly::one().scale(&counit(x)));
    for k in 1..=top as usize {
        let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
        let aug = aug_power(x, k);
        for (fs, c) in aug.terms() {
            let prod = fs.iter().fold(Forest::unit(), |acc, f| acc.mul(f));
            out.add_term(prod, c * &sign);
        }
    }
    out
}

/// An element of H^{⊗m}.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MultiTensor {
    terms: BTreeMap<Vec<Forest>, Q>,
}

impl MultiTensor {
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Forest>, &Q)> {
        self.terms.iter()
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

    fn add_term(&mut self, k: Vec<Forest>, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }
}

impl fmt::Display for MultiTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            write!(f, "({})*{}", fmt_q(c), parts.join(" ⊗ "))?;
        }
        Ok(())
    }
}

/// Δ^{m−1} iterated on the left: (Δ ⊗ id^{⊗k}) applied to Δ^{k}.
pub fn iterated_coproduct(x: &TreePoly, m: usize) -> MultiTensor {
    assert!(m >= 1);
    let mut cur = MultiTensor::default();
    for (f, c) in x.terms() {
        cur.add_term(vec![f.clone()], c.clone());
    }
    for _ in 1..m {
        let mut next = MultiTensor::default();
        for (k, c) in cur.terms() {
            for ((l, r), d) in coproduct_forest(&k[0]).terms() {
                let mut v = Vec::with_capacity(k.len() + 1);
                v.push(l.clone());
                v.push(r.clone());
                v.extend_from_slice(&k[1..]);
                next.add_term(v, c * d);
            }
        }
        cur = next;
    }
    cur
}

/// Aug^(m) = P^{⊗m} Δ^{m−1} with P = id − I·ε.
pub fn aug_power(x: &TreePoly, m: usize) -> MultiTensor {
    let full = iterated_coproduct(x, m);
    MultiTensor {
        terms: full
            .terms
            .into_iter()
            .filter(|(k, _)| k.iter().all(|f| !f.is_unit()))
            .collect(),
    }
}

/// Largest m with Aug^(m)(x) ≠ 0; zero for x = 0.
pub fn bidegree(x: &TreePoly) -> Result<usize> {
    if !counit(x).is_zero() {
        return Err(Error::BidegreeUndefined);
    }
    let mut m = 0;
    while !aug_power(x, m + 1).is_zero() {
        m += 1;
    }
    Ok(m)
}

/// Result of a one-cocycle check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub holds: bool,
    pub checked: usize,
    /// First basis forest (in enumeration order) violating the identity, with both sides.
    pub counterexample: Option<(Forest, TensorPoly, TensorPoly)>,
}

/// Checks Δ L(x) = L(x) ⊗ I + (id ⊗ L) Δ(x) on every forest of degree ≤ `max_degree`.
pub fn cocycle_check(
    l: &dyn Fn(&Forest) -> TreePoly,
    alphabet: &Alphabet,
    max_degree: u32,
) -> Result<CocycleReport> {
    let forests = enumerate_forests(alphabet, max_degree)?;
    let mut checked = 0;
    for f in forests {
        checked += 1;
        let lf = l(&f);
        let lhs = coproduct(&lf);
        let rhs = TensorPoly::tensor(&lf, &TreePoly::one())
            .add(&coproduct_forest(&f).map(|x| TreePoly::from(x.clone()), l));
        if lhs != rhs {
            return Ok(CocycleReport {
                holds: false,
                checked,
                counterexample: Some((f, lhs, rhs)),
            });
        }
    }
    Ok(CocycleReport {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// The operator B⁺_a on forests.
pub fn graft_operator(a: crate::trees::Decoration) -> impl Fn(&Forest) -> TreePoly {
    move |f| TreePoly::from(RootedTree::graft(a.clone(), f))
}

/// The augmentation projector P = id − I·ε on forests.
pub fn augmentation_projector(f: &Forest) -> TreePoly {
    if f.is_unit() {
        TreePoly::zero()
    } else {
        TreePoly::from(f.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;
    use crate::trees::Decoration;

    fn dot() -> Decoration {
        Alphabet::single("f1").letters()[0].clone()
    }

    fn tree(n: u32) -> Forest {
        Forest::single(RootedTree::ladder(&dot(), n))
    }

    #[test]
    fn small_coproducts() {
        let d = coproduct(&TreePoly::from(tree(1)));
        assert_eq!(d.len(), 2);
        let d2 = coproduct(&TreePoly::from(tree(2)));
        assert_eq!(d2.len(), 3);
        assert_eq!(d2.coeff(&tree(1), &tree(1)), qi(1));
        assert_eq!(
            coproduct(&TreePoly::one()),
            TensorPoly::tensor(&TreePoly::one(), &TreePoly::one())
        );
    }

    #[test]
    fn five_vertex_expansion() {
        // A three-vertex ladder whose top vertex carries two leaves.
        let a = Alphabet::single("f1");
        let t = TreePoly::parse("f1[f1[f1[f1 f1]]]", &a).unwrap();
        let d = coproduct(&t);
        let f = |s: &str| Forest::parse(s, &a).unwrap();
        assert_eq!(d.len(), 6);
        assert_eq!(d.coeff(&f("f1"), &f("f1[f1[f1[f1]]]")), qi(2));
        assert_eq!(d.coeff(&f("f1[f1 f1]"), &f("f1[f1]")), qi(1));
        assert_eq!(d.coeff(&f("f1[f1[f1 f1]]"), &f("f1")), qi(1));
        assert_eq!(d.coeff(&f("f1 f1"), &f("f1[f1[f1]]")), qi(1));
    }

    #[test]
    fn small_antipodes() {
        let s1 = antipode(&TreePoly::from(tree(1)));
        assert_eq!(s1, TreePoly::from(tree(1)).scale(&-Q::one()));
        let s2 = antipode(&TreePoly::from(tree(2)));
        let expected = TreePoly::from(tree(2))
            .scale(&-Q::one())
            .add(&TreePoly::from(tree(1).mul(&tree(1))));
        assert_eq!(s2, expected);
        let l3 = TreePoly::from(tree(3));
        let axiom = coproduct(&l3)
            .map(|f| antipode(&TreePoly::from(f.clone())), |f| TreePoly::from(f.clone()))
            .multiply();
        assert!(axiom.is_zero());
    }

    #[test]
    fn counits() {
        assert_eq!(counit(&TreePoly::one()), qi(1));
        let x = TreePoly::from(tree(1)).add(&TreePoly::one().scale(&qi(2)));
        assert_eq!(counit(&x), qi(2));
        assert_eq!(counit(&TreePoly::from(tree(2).mul(&tree(1)))), qi(0));
    }

    #[test]
    fn bidegrees() {
        assert_eq!(bidegree(&TreePoly::from(tree(1))).unwrap(), 1);
        assert_eq!(bidegree(&TreePoly::from(tree(1).mul(&tree(1)))).unwrap(), 2);
        assert_eq!(bidegree(&TreePoly::from(tree(2))).unwrap(), 2);
        assert_eq!(bidegree(&TreePoly::from(tree(3))).unwrap(), 3);
        assert_eq!(bidegree(&TreePoly::one()), Err(Error::BidegreeUndefined));
        let aug2 = aug_power(&TreePoly::from(tree(1).mul(&tree(1))), 2);
        assert_eq!(aug2.terms().next().unwrap().1, &qi(2));
    }

    #[test]
    fn geometric_antipode_agrees() {
        for f in enumerate_forests(&Alphabet::parse("a,b").unwrap(), 4).unwrap() {
            let x = TreePoly::from(f);
            assert_eq!(antipode(&x), antipode_geometric(&x), "{x}");
        }
    }

    #[test]
    fn graft_is_cocycle() {
        let a = Alphabet::single("f1");
        let r = cocycle_check(&graft_operator(dot()), &a, 5).unwrap();
        assert!(r.holds);
        let zero = |_: &Forest| TreePoly::zero();
        assert!(cocycle_check(&zero, &a, 4).unwrap().holds);
    }

    #[test]
    fn augmentation_projector_is_a_coboundary() {
        // P = bε: ΔP(x) = Δx − ε(x) I⊗I = P(x)⊗I + (id⊗P)Δx, so the check passes.
        let a = Alphabet::single("f1");
        assert!(cocycle_check(&augmentation_projector, &a, 4).unwrap().holds);
    }

    #[test]
    fn non_cocycle_is_caught() {
        let a = Alphabet::single("f1");
        let twice_graft = |f: &Forest| {
            let g = RootedTree::graft(dot(), f);
            TreePoly::from(RootedTree::graft(dot(), &Forest::single(g)))
        };
        let r = cocycle_check(&twice_graft, &a, 3).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample.unwrap().0, Forest::unit());
    }
}
