//! Products and brackets deformed by the renormalization map, and the Nijenhuis identity.

use crate::characters::Functional;
use crate::error::Result;
use crate::laurent::LaurentSeries;
use crate::rational::Q;
use crate::trees::RootedTree;

/// An associative algebra whose elements can be compared exactly.
pub trait Algebra {
    type Elem: Clone;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
}

/// Functionals under convolution.
pub struct Convolution;

impl Algebra for Convolution {
    type Elem = Functional;
    fn mul(&self, a: &Functional, b: &Functional) -> Result<Functional> {
        a.convolve(b)
    }
    fn add(&self, a: &Functional, b: &Functional) -> Result<Functional> {
        a.add(b)
    }
    fn sub(&self, a: &Functional, b: &Functional) -> Result<Functional> {
        a.sub(b)
    }
    fn equal(&self, a: &Functional, b: &Functional) -> bool {
        a == b
    }
}

/// x ∘_N y = N(x)y + xN(y) − N(xy).
pub fn induced_product<A: Algebra>(
    alg: &A,
    n: &dyn Fn(&A::Elem) -> Result<A::Elem>,
    x: &A::Elem,
    y: &A::Elem,
) -> Result<A::Elem> {
    let a = alg.mul(&n(x)?, y)?;
    let b = alg.mul(x, &n(y)?)?;
    let c = n(&alg.mul(x, y)?)?;
    alg.sub(&alg.add(&a, &b)?, &c)
}

/// Outcome of a Nijenhuis identity check: the index of the first failing sample pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NijenhuisReport {
    pub holds: bool,
    pub checked: usize,
    pub first_failure: Option<usize>,
}

/// Verifies N(x ∘_N y) = N(x) N(y) on every sample pair.
pub fn nijenhuis_check<A: Algebra>(
    alg: &A,
    n: &dyn Fn(&A::Elem) -> Result<A::Elem>,
    samples: &[(A::Elem, A::Elem)],
) -> Result<NijenhuisReport> {
    for (i, (x, y)) in samples.iter().enumerate() {
        let lhs = n(&induced_product(alg, n, x, y)?)?;
        let rhs = alg.mul(&n(x)?, &n(y)?)?;
        if !alg.equal(&lhs, &rhs) {
            return Ok(NijenhuisReport {
                holds: false,
                checked: i + 1,
                first_failure: Some(i),
            });
        }
    }
    Ok(NijenhuisReport {
        holds: true,
        checked: samples.len(),
        first_failure: None,
    })
}

/// Υ(f) = R_ms ∘ f.
pub fn upsilon(f: &Functional) -> Result<Functional> {
    f.compose_linear(|x| x.pole_part())
}

/// Υ_λ = Υ − λ(id − Υ), acting on values as R − λR̃.
pub fn upsilon_lambda(f: &Functional, lambda: &Q) -> Result<Functional> {
    let lambda = lambda.clone();
    f.compose_linear(move |x| x.pole_part().sub(&x.regular_part().scale(&lambda)))
}

/// f ∘_λ g = Υ_λ(f) * g + f * Υ_λ(g) − Υ_λ(f * g).
pub fn circ_lambda(f: &Functional, g: &Functional, lambda: &Q) -> Result<Functional> {
    induced_product(&Convolution, &|x| upsilon_lambda(x, lambda), f, g)
}

/// [f, g]_λ = f ∘_λ g − g ∘_λ f.
pub fn bracket_lambda(f: &Functional, g: &Functional, lambda: &Q) -> Result<Functional> {
    circ_lambda(f, g, lambda)?.sub(&circ_lambda(g, f, lambda)?)
}

/// The commutator [f, g] = f*g − g*f.
pub fn commutator(f: &Functional, g: &Functional) -> Result<Functional> {
    f.convolve(g)?.sub(&g.convolve(f)?)
}

/// [Υ_λ f, g] + [f, Υ_λ g] − Υ_λ([f, g]), the bracket written through commutators.
pub fn bracket_lambda_commutators(f: &Functional, g: &Functional, lambda: &Q) -> Result<Functional> {
    let a = commutator(&upsilon_lambda(f, lambda)?, g)?;
    let b = commutator(f, &upsilon_lambda(g, lambda)?)?;
    let c = upsilon_lambda(&commutator(f, g)?, lambda)?;
    a.add(&b)?.sub(&c)
}

/// f *_R g = f * R(g) + R(f) * g − f * g.
pub fn star_r(f: &Functional, g: &Functional) -> Result<Functional> {
    let a = f.convolve(&upsilon(g)?)?;
    let b = upsilon(f)?.convolve(g)?;
    a.add(&b)?.sub(&f.convolve(g)?)
}

/// Result of evaluating the motion-integral condition.
#[derive(Clone, Debug)]
pub struct MotionReport {
    pub residual: Functional,
    pub holds: bool,
    /// The first tree (canonical order) with a nonzero residual.
    pub witness: Option<(RootedTree, LaurentSeries)>,
}

/// Evaluates [f, F]_λ on every basis tree; at λ = 0 this is
/// R(f)*F − F*R(f) + f*R(F) − R(F)*f − R(f*F) + R(F*f).
pub fn motion_integral_check(f: &Functional, big_f: &Functional, lambda: &Q) -> Result<MotionReport> {
    let residual = bracket_lambda(f, big_f, lambda)?;
    let mut witness = None;
    for t in residual.basis().trees() {
        let v = residual.tree_value(t)?;
        if !v.is_zero() {
            witness = Some((t.clone(), v));
            break;
        }
    }
    Ok(MotionReport {
        holds: witness.is_none(),
        residual,
        witness,
    })
}

/// The two sums Σ_c R(f(P_c))R(φ(R_c)) and Σ_c R(φ(P_c))R(f(R_c)) over the proper cuts of Γ,
/// exposed for inspection.
pub fn relation_sums(
    f: &Functional,
    phi: &Functional,
    gamma: &RootedTree,
) -> Result<(LaurentSeries, LaurentSeries)> {
    let mut left = LaurentSeries::zero();
    let mut right = LaurentSeries::zero();
    for c in crate::hopf::cut_terms(gamma).iter() {
        let m = Q::from_integer(c.multiplicity.into());
        let trunk = crate::trees::Forest::single(c.trunk.clone());
        let a = f.value(&c.crown)?.pole_part().mul(&phi.value(&trunk)?.pole_part())?;
        let b = phi.value(&c.crown)?.pole_part().mul(&f.value(&trunk)?.pole_part())?;
        left = left.add(&a.scale(&m));
        right = right.add(&b.scale(&m));
    }
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::Basis;
    use crate::rational::qi;
    use crate::trees::{Alphabet, Forest};

    fn s(x: &str) -> LaurentSeries {
        LaurentSeries::parse(x).unwrap()
    }

    #[test]
    fn circ_examples() {
        let a = Alphabet::single("f1");
        let b = Basis::new(&a, 3).unwrap();
        let dot = RootedTree::parse("f1", &a).unwrap();
        let f = Functional::infinitesimal(&b, [(dot.clone(), s("1/z"))]).unwrap();
        let c = circ_lambda(&f, &f, &qi(0)).unwrap();
        assert!(c.tree_value(&dot).unwrap().is_zero());
        let dd = Forest::parse("f1 f1", &a).unwrap();
        assert_eq!(c.value(&dd).unwrap(), s("2/z^2"));
        assert_eq!(star_r(&f, &f).unwrap().value(&dd).unwrap(), s("2/z^2"));
        let zero = Functional::zero(&b);
        assert_eq!(star_r(&f, &zero).unwrap(), zero);
        assert!(bracket_lambda(&f, &f, &qi(3)).unwrap().full_values().unwrap().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn unit_circ_matches_direct_formula() {
        // f ∘_0 e = Υ(f) + f*Υ(e) − Υ(f) = f*Υ(e), and Υ(e) = 0 because R_ms(1) = 0.
        let a = Alphabet::single("f1");
        let b = Basis::new(&a, 3).unwrap();
        let dot = RootedTree::parse("f1", &a).unwrap();
        let f = Functional::character(&b, [(dot, s("1/z + 2"))]).unwrap();
        let e = Functional::unit(&b);
        let direct = upsilon(&f).unwrap().convolve(&e).unwrap()
            .add(&f.convolve(&upsilon(&e).unwrap()).unwrap()).unwrap()
            .sub(&upsilon(&f.convolve(&e).unwrap()).unwrap()).unwrap();
        assert_eq!(circ_lambda(&f, &e, &qi(0)).unwrap(), direct);
        assert_eq!(circ_lambda(&f, &e, &qi(0)).unwrap(), Functional::zero(&b));
    }

    #[test]
    fn identity_is_nijenhuis() {
        let a = Alphabet::single("f1");
        let b = Basis::new(&a, 3).unwrap();
        let dot = RootedTree::parse("f1", &a).unwrap();
        let f = Functional::character(&b, [(dot, s("1/z + 2"))]).unwrap();
        let id = |x: &Functional| Ok(x.clone());
        assert!(nijenhuis_check(&Convolution, &id, &[(f.clone(), f)]).unwrap().holds);
    }
}
