//! The acceptance suite: one PASS/FAIL line per criterion, each checked against an oracle
//! written here rather than taken from the library. Run with `--nocapture` to see the lines.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use hopfren::characters::{
    birkhoff_bch, birkhoff_bogoliubov, rg_flow, rg_flow_from_counterterm, time_ordered_counterterm, Basis,
    Functional,
};
use hopfren::dse::{self, DseSpec, ZetaNormalization};
use hopfren::hall::{is_primitive, HallSet};
use hopfren::hopf::{
    antipode, augmentation_projector, cocycle_check, coproduct, coproduct_forest, coproduct_tree, counit,
    graft_operator, TensorPoly,
};
use hopfren::laurent::{LaurentSeries, Poly};
use hopfren::nijenhuis::{bracket_lambda, motion_integral_check};
use hopfren::rational::{q, qi, to_f64};
use hopfren::trees::enumerate_forests;
use hopfren::usf;
use hopfren::words::{self, Pairing, Word, WordPoly};
use hopfren::{Alphabet, Decoration, Forest, RootedTree, TreePoly, Q};
use hopfren_cli::run;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

/// Collects sub-check failures; the criterion passes when none were recorded.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    fn finish(self, summary: String) -> Verdict {
        if self.failures.is_empty() {
            verdict(true, summary)
        } else {
            verdict(false, format!("{summary}; failures: {}", self.failures.join("; ")))
        }
    }
}

// ---------------------------------------------------------------- 1. Hopf axioms

/// A tree flattened to vertex labels and parent indices, vertex 0 the root.
struct Flat {
    labels: Vec<Decoration>,
    parent: Vec<Option<usize>>,
}

fn flatten(t: &RootedTree) -> Flat {
    fn go(t: &RootedTree, parent: Option<usize>, out: &mut Flat) {
        let me = out.labels.len();
        out.labels.push(t.root().clone());
        out.parent.push(parent);
        for c in t.children() {
            go(c, Some(me), out);
        }
    }
    let mut flat = Flat { labels: Vec::new(), parent: Vec::new() };
    go(t, None, &mut flat);
    flat
}

fn rebuild(flat: &Flat, v: usize, cut: &[bool]) -> RootedTree {
    let children = (0..flat.labels.len())
        .filter(|&w| flat.parent[w] == Some(v) && !cut[w])
        .map(|w| rebuild(flat, w, cut))
        .collect();
    RootedTree::from_children(flat.labels[v].clone(), children)
}

fn is_ancestor(flat: &Flat, a: usize, mut v: usize) -> bool {
    while let Some(p) = flat.parent[v] {
        if p == a {
            return true;
        }
        v = p;
    }
    false
}

/// Δ(t) = t ⊗ I + Σ over admissible edge subsets (crowns ⊗ trunk), by brute force over
/// subsets of non-root vertices (each standing for the edge to its parent).
fn coproduct_oracle(t: &RootedTree) -> TensorPoly {
    let flat = flatten(t);
    let n = flat.labels.len();
    let mut out = TensorPoly::zero();
    out.add_term(Forest::single(t.clone()), Forest::unit(), Q::one());
    for mask in 0u32..(1 << (n - 1)) {
        let cut: Vec<bool> = (0..n).map(|v| v > 0 && mask & (1 << (v - 1)) != 0).collect();
        let cuts: Vec<usize> = (0..n).filter(|&v| cut[v]).collect();
        let admissible = cuts.iter().all(|&a| cuts.iter().all(|&b| !is_ancestor(&flat, a, b)));
        if !admissible {
            continue;
        }
        let none = vec![false; n];
        let crown = Forest::new(cuts.iter().map(|&c| rebuild(&flat, c, &none)).collect());
        let trunk = Forest::single(rebuild(&flat, 0, &cut));
        out.add_term(crown, trunk, Q::one());
    }
    out
}

type Triple = BTreeMap<(Forest, Forest, Forest), Q>;

fn criterion_hopf_axioms() -> Verdict {
    let start = Instant::now();
    let a = Alphabet::parse("a,b").unwrap();
    let forests = enumerate_forests(&a, 6).unwrap();
    let mut checks = Checks::default();
    let mut trees = 0;
    for f in &forests {
        let x = TreePoly::from(f.clone());
        let d = coproduct(&x);
        if let Some(t) = f.as_tree() {
            trees += 1;
            checks.check(coproduct_tree(t) == coproduct_oracle(t), || format!("Δ({t}) differs from the cut oracle"));
        }
        let mut left = Triple::new();
        let mut right = Triple::new();
        for ((l, r), c) in d.terms() {
            for ((ll, lr), e) in coproduct_forest(l).terms() {
                *left.entry((ll.clone(), lr.clone(), r.clone())).or_default() += c * e;
            }
            for ((rl, rr), e) in coproduct_forest(r).terms() {
                *right.entry((l.clone(), rl.clone(), rr.clone())).or_default() += c * e;
            }
        }
        left.retain(|_, c| !c.is_zero());
        right.retain(|_, c| !c.is_zero());
        checks.check(left == right, || format!("coassociativity fails on {f}"));
        let eps = |g: &Forest| TreePoly::one().scale(&counit(&TreePoly::from(g.clone())));
        checks.check(d.map(eps, |g| g.clone().into()).multiply() == x, || format!("left counit fails on {f}"));
        checks.check(d.map(|g| g.clone().into(), eps).multiply() == x, || format!("right counit fails on {f}"));
        let unit = TreePoly::one().scale(&counit(&x));
        let sl = d.map(|g| antipode(&g.clone().into()), |g| g.clone().into()).multiply();
        let sr = d.map(|g| g.clone().into(), |g| antipode(&g.clone().into())).multiply();
        checks.check(sl == unit && sr == unit, || format!("antipode axiom fails on {f}"));
        checks.check(antipode(&antipode(&x)) == x, || format!("S² ≠ id on {f}"));
    }
    let secs = start.elapsed().as_secs_f64();
    checks.check(secs < 60.0, || format!("took {secs:.1} s"));
    checks.finish(format!(
        "{} forests of degree ≤ 6 over a,b ({trees} trees matched the cut oracle), {secs:.1} s",
        forests.len()
    ))
}

// ---------------------------------------------------------------- 2. cocycles

fn criterion_cocycle() -> Verdict {
    let a = Alphabet::parse("a,b").unwrap();
    let mut checks = Checks::default();
    let mut checked = 0;
    for d in a.letters() {
        let r = cocycle_check(&graft_operator(d.clone()), &a, 5).unwrap();
        checked += r.checked;
        checks.check(r.holds, || format!("B⁺_{d} fails on {:?}", r.counterexample.map(|c| c.0.to_string())));
    }
    checks.finish(format!("B⁺_a and B⁺_b satisfy the 1-cocycle identity on {checked} forests of degree ≤ 5"))
}

fn f_of(x: &TreePoly) -> Forest {
    x.terms().next().map(|(f, _)| f.clone()).unwrap_or_else(Forest::unit)
}

fn criterion_projector_control() -> Verdict {
    let a = Alphabet::parse("a,b").unwrap();
    let r = cocycle_check(&augmentation_projector, &a, 5).unwrap();
    // The checker does reject operators that are not cocycles.
    let b = graft_operator(a.letters()[0].clone());
    let twice = |f: &Forest| b(&f_of(&b(f)));
    let caught = cocycle_check(&twice, &a, 3).unwrap().counterexample.is_some();
    if !caught {
        return verdict(false, "checker accepts B⁺∘B⁺");
    }
    match r.counterexample {
        Some((f, _, _)) if f.degree() == 2 => verdict(true, format!("projector fails with degree-2 witness {f}")),
        Some((f, _, _)) => verdict(false, format!("projector fails, but the first witness {f} has degree {}", f.degree())),
        None => verdict(
            false,
            format!(
                "B⁺∘B⁺ is rejected, but the projector has no witness on {} forests: P = id − I·ε equals bε, a Hochschild coboundary, so \
                 ΔP(x) = Δx − ε(x) I⊗I = P(x)⊗I + (id⊗P)Δx holds for every x; the expected \
                 degree-2 witness cannot exist",
                r.checked
            ),
        ),
    }
}

// ---------------------------------------------------------------- 3. Birkhoff

fn random_character(rng: &mut ChaCha8Rng, basis: &std::sync::Arc<Basis>) -> Functional {
    let values: Vec<_> = basis
        .trees()
        .map(|t| (t.clone(), common::scalar_laurent(rng, t.degree() as i32)))
        .collect();
    Functional::character(basis, values).unwrap()
}

/// φ−(F) = −R(φ(F) + Σ' φ−(F′)φ(F″)) over the reduced coproduct of the forest F itself,
/// so products of trees get no help from multiplicativity.
fn bogoliubov_on_forests(
    phi: &Functional,
) -> (BTreeMap<Forest, LaurentSeries>, BTreeMap<Forest, LaurentSeries>) {
    let mut forests: Vec<Forest> = phi.basis().forests().to_vec();
    forests.sort_by_key(|f| f.degree());
    let mut minus: BTreeMap<Forest, LaurentSeries> = BTreeMap::new();
    let mut plus = BTreeMap::new();
    minus.insert(Forest::unit(), LaurentSeries::one());
    plus.insert(Forest::unit(), LaurentSeries::one());
    for f in forests.into_iter().filter(|f| !f.is_unit()) {
        let mut bar = phi.value(&f).unwrap();
        for ((l, r), c) in coproduct_forest(&f).terms() {
            if l.is_unit() || r.is_unit() {
                continue;
            }
            let term = minus[l].mul(&phi.value(r).unwrap()).unwrap();
            bar = bar.add(&term.scale(c));
        }
        minus.insert(f.clone(), bar.pole_part().neg());
        plus.insert(f, bar.regular_part());
    }
    (minus, plus)
}

fn criterion_birkhoff() -> Verdict {
    let basis = Basis::new(&Alphabet::single("f1"), 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checks = Checks::default();
    let mut products = 0;
    for i in 0..50 {
        let phi = random_character(&mut rng, &basis);
        let pair = birkhoff_bogoliubov(&phi).unwrap();
        let low = phi.restrict(4).unwrap();
        let bch = birkhoff_bch(&low).unwrap();
        for t in low.basis().trees() {
            checks.check(
                bch.minus.tree_value(t).unwrap() == pair.minus.tree_value(t).unwrap()
                    && bch.plus.tree_value(t).unwrap() == pair.plus.tree_value(t).unwrap(),
                || format!("character {i}: routes differ on {t}"),
            );
        }
        checks.check(pair.minus.inverse().unwrap().convolve(&pair.plus).unwrap() == phi, || {
            format!("character {i}: φ−⁻¹ * φ+ ≠ φ")
        });
        let (minus, plus) = bogoliubov_on_forests(&phi);
        for f in phi.basis().forests().iter().filter(|f| f.len() >= 2) {
            products += 1;
            checks.check(
                pair.minus.value(f).unwrap() == minus[f] && pair.plus.value(f).unwrap() == plus[f],
                || format!("character {i}: φ± not multiplicative on {f}"),
            );
        }
    }
    checks.finish(format!(
        "50 characters: Bogoliubov ≡ BCH on trees of degree ≤ 4, φ−⁻¹*φ+ = φ, \
         φ± multiplicative on {products} product-forest evaluations of degree ≤ 5"
    ))
}

// ---------------------------------------------------------------- 4. RG flow

fn random_beta(rng: &mut ChaCha8Rng, basis: &std::sync::Arc<Basis>, max_degree: u32) -> Functional {
    let values: Vec<_> = basis
        .trees()
        .map(|t| {
            let r = if t.degree() <= max_degree { common::small_q(rng) } else { qi(0) };
            (t.clone(), LaurentSeries::constant(r))
        })
        .collect();
    Functional::infinitesimal(basis, values).unwrap()
}

fn rename(f: &Functional, g: impl Fn(&Poly) -> Poly) -> Functional {
    f.map_tree_values(|_, x| Ok(x.map_coeffs(&g))).unwrap()
}

fn criterion_rg() -> Verdict {
    let basis = Basis::new(&Alphabet::parse("a,b").unwrap(), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checks = Checks::default();
    let runs = 6;
    for i in 0..runs {
        let beta = random_beta(&mut rng, &basis, 3);
        let minus = time_ordered_counterterm(&beta, 4).unwrap();
        let rg = rg_flow_from_counterterm(&minus).unwrap();
        for t in basis.trees() {
            let v = rg.f.tree_value(t).unwrap();
            checks.check(v.terms().all(|(k, _)| *k == 0) && v.precision().is_none(), || {
                format!("β {i}: F_t({t}) = {v} is not a polynomial in t")
            });
        }
        let fs = rename(&rg.f, |p| p.rename_t_to_v());
        let sum = rename(&rg.f, |p| p.shift_t_by_v());
        checks.check(fs.convolve(&rg.f).unwrap() == sum, || format!("β {i}: F_s * F_t ≠ F_(s+t)"));
        checks.check(rg.beta == beta, || format!("β {i}: t¹ coefficient differs from β"));
        // F_t = exp*(tβ) for a one-parameter subgroup with generator β.
        let t_beta = beta.map_tree_values(|_, x| Ok(x.scale_poly(&Poly::t()))).unwrap();
        checks.check(t_beta.exp_star().unwrap() == rg.f, || format!("β {i}: F_t ≠ exp*(tβ)"));
        // The same β comes back through a full Birkhoff factorization of φ = φ−⁻¹ * φ+.
        let plus = Functional::from_tree_fn(hopfren::characters::Kind::Character, &basis, |t| {
            Ok(LaurentSeries::from_terms([(0, qi(t.vertices() as i64)), (1, q(1, 2))]))
        })
        .unwrap();
        let phi = minus.inverse().unwrap().convolve(&plus).unwrap();
        checks.check(rg_flow(&phi).unwrap().beta == beta, || format!("β {i}: Birkhoff route loses β"));
    }
    checks.finish(format!(
        "{runs} random β on degrees 1–3 (alphabet a,b, trees of degree ≤ 4): F_t pole-free polynomial, \
         F_s*F_t = F_(s+t), t¹ coefficient = β, F_t = exp*(tβ)"
    ))
}

// ---------------------------------------------------------------- 5. integrability

fn criterion_integrability() -> Verdict {
    let basis = Basis::new(&Alphabet::parse("a,b").unwrap(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = Checks::default();
    for i in 0..4 {
        let beta = random_beta(&mut rng, &basis, 3);
        let rg = rg_flow_from_counterterm(&time_ordered_counterterm(&beta, 3).unwrap()).unwrap();
        let fs = rename(&rg.f, |p| p.rename_t_to_v());
        let bracket = bracket_lambda(&rg.f, &fs, &qi(0)).unwrap();
        checks.check(bracket.full_values().unwrap().iter().all(|v| v.is_zero()), || {
            format!("β {i}: {{F_t, F_s}}_0 ≠ 0")
        });
        checks.check(motion_integral_check(&rg.f, &fs, &qi(0)).unwrap().holds, || {
            format!("β {i}: motion integral check rejects F_s")
        });
    }
    let f = random_character(&mut rng, &basis);
    let g = random_character(&mut rng, &basis);
    let control = motion_integral_check(&f, &g, &qi(0)).unwrap();
    let witness = control.witness.as_ref().map(|(t, _)| t.to_string()).unwrap_or_default();
    checks.check(!control.holds, || "random pair has zero residual".to_string());
    checks.finish(format!(
        "{{F_t, F_s}}_0 = 0 for 4 flows at degree ≤ 3; random pair residual nonzero on {witness}"
    ))
}

// ---------------------------------------------------------------- 6. DSE

fn criterion_dse() -> Verdict {
    let spec = DseSpec::parse("1 1 g\n").unwrap();
    let a = spec.alphabet().clone();
    let g = a.letters()[0].clone();
    let sol = dse::solve_dse(&spec, 6);
    let formula = dse::tree_formula_solution(&spec, 5).unwrap();
    let mut checks = Checks::default();
    checks.check(formula.coefficients[..] == sol.coefficients[..6], || "recursion ≠ tree formula".into());
    let ladder = |n| TreePoly::from(RootedTree::ladder(&g, n));
    let cherry = TreePoly::parse("g[g g]", &a).unwrap();
    checks.check(*sol.c(2) == ladder(2).scale(&qi(2)), || format!("c_2 = {}", sol.c(2)));
    checks.check(*sol.c(3) == ladder(3).scale(&qi(4)).add(&cherry), || format!("c_3 = {}", sol.c(3)));
    let report = dse::subalgebra_check(&sol);
    checks.check(report.holds, || format!("subalgebra witness {:?}", report.witness));
    checks.finish(format!(
        "X = 1 + αB⁺(X²): recursion ≡ tree formula to n = 5, c_2 = {}, c_3 = {}, subalgebra holds to n = 6",
        sol.c(2),
        sol.c(3)
    ))
}

// ---------------------------------------------------------------- 7. Hall / Lyndon

/// Lyndon counts by length: words strictly smaller than each proper suffix.
fn lyndon_counts_brute_force(letters: usize, max_len: usize) -> Vec<usize> {
    let mut counts = vec![0; max_len];
    for len in 1..=max_len {
        let total = letters.pow(len as u32);
        for code in 0..total {
            let mut w = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                w.push(c % letters);
                c /= letters;
            }
            w.reverse();
            if (1..len).all(|i| w[..] < w[i..]) {
                counts[len - 1] += 1;
            }
        }
    }
    counts
}

/// Left-normed bracketing θ(a_1…a_n) = [[a_1, a_2], …, a_n]; P of length n is Lie iff θ(P) = nP.
fn dynkin(p: &WordPoly) -> WordPoly {
    p.map_linear(|w| {
        let letters = w.letters();
        let mut acc = WordPoly::from(Word::letter(letters[0].clone()));
        for a in &letters[1..] {
            let b = WordPoly::from(Word::letter(a.clone()));
            acc = acc.concat(&b).sub(&b.concat(&acc));
        }
        acc
    })
}

fn rank_oracle(polys: &[WordPoly]) -> usize {
    let mut rows: Vec<BTreeMap<Word, Q>> = polys
        .iter()
        .map(|p| p.terms().map(|(w, c)| (w.clone(), c.clone())).collect())
        .collect();
    let mut rank = 0;
    while let Some(i) = rows.iter().position(|r| !r.is_empty()) {
        let pivot_row = rows.swap_remove(i);
        let (pivot, pc) = pivot_row.iter().next().map(|(w, c)| (w.clone(), c.clone())).unwrap();
        for r in rows.iter_mut() {
            if let Some(c) = r.get(&pivot).cloned() {
                let factor = c / &pc;
                for (w, x) in &pivot_row {
                    let e = r.entry(w.clone()).or_insert_with(Q::zero);
                    *e -= &factor * x;
                }
                r.retain(|_, x| !x.is_zero());
            }
        }
        rank += 1;
    }
    rank
}

fn criterion_hall() -> Verdict {
    let mut checks = Checks::default();
    let two = HallSet::build(&Alphabet::parse("a,b").unwrap(), 7).unwrap();
    let three = HallSet::build(&Alphabet::parse("a,b,c").unwrap(), 7).unwrap();
    let brute2 = lyndon_counts_brute_force(2, 7);
    let brute3 = lyndon_counts_brute_force(3, 7);
    checks.check(brute2 == vec![2, 1, 2, 3, 6, 9, 18], || format!("brute-force Lyndon counts {brute2:?}"));
    checks.check(two.counts() == brute2, || format!("2 letters: Hall {:?} vs {brute2:?}", two.counts()));
    checks.check(three.counts() == brute3, || format!("3 letters: Hall {:?} vs {brute3:?}", three.counts()));
    let h5 = HallSet::build(&Alphabet::parse("a,b").unwrap(), 5).unwrap();
    let polys: Vec<WordPoly> = h5.members().map(|t| h5.hall_polynomial(t).unwrap()).collect();
    for (t, p) in h5.members().zip(&polys) {
        let n = t.vertices() as i64;
        checks.check(dynkin(p) == p.scale(&qi(n)), || format!("p_{t} fails the Dynkin test"));
        checks.check(is_primitive(p), || format!("p_{t} is not primitive"));
    }
    let r = rank_oracle(&polys);
    checks.check(r == polys.len(), || format!("rank {r} of {}", polys.len()));
    checks.finish(format!(
        "Hall counts = brute-force Lyndon counts {brute2:?} (2 letters) and {brute3:?} (3 letters); \
         {} Hall polynomials of degree ≤ 5 primitive (Dynkin test) with rank {r}",
        polys.len()
    ))
}

// ---------------------------------------------------------------- 8. Hoffman

fn compositions_of(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions_of(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Σ_I weight(I) · I⟨w⟩ with the additive contraction of consecutive blocks.
fn composition_sum(w: &Word, alphabet: &Alphabet, weight: impl Fn(&[usize]) -> Q) -> WordPoly {
    let mut out = WordPoly::zero();
    for comp in compositions_of(w.len()) {
        let mut letters = Vec::new();
        let mut at = 0;
        for &size in &comp {
            let total: u32 = w.letters()[at..at + size].iter().map(|d| d.weight()).sum();
            letters.push(alphabet.of_weight(total).next().unwrap().clone());
            at += size;
        }
        out.add_term(Word::new(letters), weight(&comp));
    }
    out
}

fn shuffle_oracle(u: &[Decoration], v: &[Decoration]) -> WordPoly {
    if u.is_empty() || v.is_empty() {
        return WordPoly::from(Word::new(u.iter().chain(v).cloned().collect()));
    }
    let left = shuffle_oracle(&u[1..], v);
    let right = shuffle_oracle(u, &v[1..]);
    let prepend = |p: &WordPoly, a: &Decoration| WordPoly::from(Word::letter(a.clone())).concat(p);
    prepend(&left, &u[0]).add(&prepend(&right, &v[0]))
}

fn words_up_to(alphabet: &Alphabet, max_weight: u32) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut i = 0;
    while i < out.len() {
        let w = out[i].clone();
        for a in alphabet.letters() {
            if w.weight() + a.weight() <= max_weight {
                out.push(w.concat(&Word::letter(a.clone())));
            }
        }
        i += 1;
    }
    out
}

fn criterion_hoffman() -> Verdict {
    let u = Alphabet::universal(8);
    let p = Pairing::additive(&u).unwrap();
    let ws = words_up_to(&u, 4);
    let fact = |c: &[usize]| c.iter().map(|&i| Q::from_integer(hopfren::rational::factorial(i as u32))).product::<Q>();
    let mut checks = Checks::default();
    for w in &ws {
        let x = WordPoly::from(w.clone());
        let tau = words::hoffman_exp(&x, &p).unwrap();
        let psi = words::hoffman_log(&x, &p).unwrap();
        let tau_oracle = composition_sum(w, &u, |c| Q::one() / fact(c));
        let psi_oracle = composition_sum(w, &u, |c| {
            let sign = if (w.len() - c.len()) % 2 == 0 { qi(1) } else { qi(-1) };
            sign / c.iter().map(|&i| qi(i as i64)).product::<Q>()
        });
        checks.check(tau == tau_oracle, || format!("τ({w}) differs from the composition formula"));
        checks.check(psi == psi_oracle, || format!("ψ({w}) differs from the composition formula"));
        checks.check(words::hoffman_exp(&psi, &p).unwrap() == x, || format!("τψ({w}) ≠ {w}"));
    }
    let mut pairs = 0;
    for a in &ws {
        for b in &ws {
            pairs += 1;
            let sh = shuffle_oracle(a.letters(), b.letters());
            let lhs = words::hoffman_exp(&sh, &p).unwrap();
            let ta = words::hoffman_exp(&WordPoly::from(a.clone()), &p).unwrap();
            let tb = words::hoffman_exp(&WordPoly::from(b.clone()), &p).unwrap();
            let rhs = words::qsh_product(&ta, &tb, &p).unwrap();
            checks.check(lhs == rhs, || format!("τ({a} ш {b}) ≠ τ({a}) ⋆ τ({b})"));
        }
    }
    let m1 = WordPoly::parse("(1)", &u).unwrap();
    let square = words::qsh_product(&m1, &m1, &p).unwrap();
    let expected = WordPoly::parse("2*(1,1) + (2)", &u).unwrap();
    checks.check(square == expected, || format!("M_(1)² = {square}"));
    checks.finish(format!(
        "τ, ψ match the composition formulas and τψ = id on {} words of weight ≤ 4; \
         τ(u ш v) = τ(u) ⋆ τ(v) on {pairs} pairs; M_(1)² = 2M_(1,1) + M_(2)",
        ws.len()
    ))
}

// ---------------------------------------------------------------- 9. USF

fn criterion_usf() -> Verdict {
    let mut checks = Checks::default();
    let e = usf::usf_expand(8, 8).unwrap();
    for t in &e.terms {
        let mut partial = 0u32;
        let mut oracle = Q::one();
        for &k in &t.chain {
            partial += k;
            oracle /= qi(partial as i64);
        }
        checks.check(t.coefficient == oracle, || format!("{:?}: {} vs {oracle}", t.chain, t.coefficient));
        let integral = usf::simplex_integral(&t.chain).unwrap();
        checks.check(integral == t.coefficient, || format!("{:?}: simplex integral {integral}", t.chain));
    }
    for (chain, value) in [(vec![1, 1], q(1, 2)), (vec![1, 2], q(1, 3)), (vec![2, 1], q(1, 6))] {
        checks.check(e.coefficient(&chain) == Some(&value), || format!("{chain:?} ≠ {value}"));
    }
    let beta = usf::beta_u_functional(5).unwrap();
    let mut multi = 0;
    for (f, v) in beta.values() {
        if f.len() >= 2 {
            multi += 1;
            checks.check(v.is_zero(), || format!("β^U({f}) = {v}"));
        }
    }
    for f in enumerate_forests(&Alphabet::universal(5), 5).unwrap() {
        checks.check(usf::alpha_u(&f) == usf::alpha_u_integral(&f), || format!("α^U routes differ on {f}"));
    }
    let hall = usf::hall_representation_check(4).unwrap();
    checks.check(hall.holds, || format!("Hall representation mismatch {:?}", hall.mismatch));
    checks.finish(format!(
        "{} chains of weight ≤ 8 match 1/(k_1(k_1+k_2)…) and the simplex integral; β^U = 0 on {multi} \
         multi-tree forests of weight ≤ 5; Hall representation holds on {} words of weight ≤ 4",
        e.terms.len(),
        hall.words_checked
    ))
}

// ---------------------------------------------------------------- 10. ζ

/// Σ 1/n^s over n ≤ limit whose prime factors are all ≤ bound.
fn smooth_sum(s: i32, bound: usize, limit: usize) -> f64 {
    let mut largest = vec![0usize; limit + 1];
    for p in 2..=limit {
        if largest[p] == 0 {
            let mut m = p;
            while m <= limit {
                largest[m] = p;
                m += p;
            }
        }
    }
    (1..=limit)
        .filter(|&n| n == 1 || largest[n] <= bound)
        .map(|n| (n as f64).powi(-s))
        .sum()
}

fn criterion_zeta() -> Verdict {
    let mut checks = Checks::default();
    let target = std::f64::consts::PI.powi(2) / 6.0;
    let primes = dse::primes_up_to(10_000);
    let multiset = dse::zeta_character(2, &primes, ZetaNormalization::Multiset, 30).unwrap();
    // Smooth numbers beyond the limit contribute less than Σ_{n > N} n^{-2} < 1/N.
    let limit = 2_000_000;
    let oracle = smooth_sum(2, 10_000, limit);
    checks.check((multiset.approx - target).abs() < 1e-3, || format!("value {} vs π²/6", multiset.approx));
    checks.check((multiset.approx - oracle).abs() < 1e-6, || format!("value {} vs oracle {oracle}", multiset.approx));
    let small = dse::zeta_character(2, &[2, 3], ZetaNormalization::Multiset, 30).unwrap();
    checks.check(small.closed_form == Some(q(3, 2)), || format!("{{2,3}} product {:?}", small.closed_form));
    let gap = (to_f64(small.exact.as_ref().unwrap()) - 1.5).abs();
    checks.check(gap < 1e-9, || format!("length-30 truncation is {gap:e} from 3/2"));
    let factorial = dse::zeta_character(2, &primes, ZetaNormalization::Factorial, 30).unwrap();
    let expected_factorial: f64 = primes.iter().map(|&p| (p as f64).powi(-2)).sum::<f64>().exp();
    checks.check((factorial.approx - expected_factorial).abs() < 1e-9, || format!("factorial value {}", factorial.approx));
    checks.check((factorial.approx - target).abs() > 1e-3, || "factorial normalization unexpectedly matches ζ(2)".into());
    checks.finish(format!(
        "multiset: {:.9} (π²/6 = {target:.9}, smooth-sum oracle {oracle:.9}); {{2,3}}: 3/2 exact, \
         truncation gap {gap:.1e}; factorial normalization: {:.9} = Π exp(p⁻²), diverging from ζ(2) by {:.3}",
        multiset.approx,
        factorial.approx,
        target - factorial.approx
    ))
}

// ---------------------------------------------------------------- 11. CLI

fn criterion_cli() -> Verdict {
    let mut checks = Checks::default();
    let dir = common::golden_dir();
    for (name, args) in common::CASES {
        let first = common::render(&run(common::argv(args)));
        let second = common::render(&run(common::argv(args)));
        checks.check(first == second, || format!("{name} differs between runs"));
        let golden = std::fs::read_to_string(dir.join(format!("{name}.txt"))).unwrap_or_default();
        checks.check(first == golden, || format!("{name} differs from its golden file"));
    }
    let a = Alphabet::parse("a,b").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut round_trips = 0;
    for i in 0..200 {
        let x = if i % 2 == 0 {
            common::tree_poly(&mut rng, &a)
        } else {
            let letters = ["a", "b"];
            let s = format!("{}[{}]", letters[rng.gen_range(0..2)], letters[rng.gen_range(0..2)]);
            TreePoly::parse(&s, &a).unwrap().scale(&common::small_q(&mut rng))
        };
        let out = run(["hopfren", "antipode", "--alphabet", "a,b", &x.to_string()]);
        let printed = out.stdout.trim_end();
        let parsed = TreePoly::parse(printed, &a);
        let ok = out.code == 0 && parsed.as_ref().ok() == Some(&antipode(&x)) && parsed.unwrap().to_string() == printed;
        checks.check(ok, || format!("round trip fails on {x}"));
        round_trips += ok as usize;
    }
    checks.finish(format!(
        "{} golden cases byte-stable across runs and equal to tests/golden; {round_trips}/200 printed \
         expressions re-parse to equal values",
        common::CASES.len()
    ))
}

type Criterion = (&'static str, &'static str, fn() -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("1", "Hopf axioms", criterion_hopf_axioms),
        ("2a", "B⁺ cocycle", criterion_cocycle),
        ("2b", "augmentation projector is not a cocycle", criterion_projector_control),
        ("3", "Birkhoff oracle equivalence", criterion_birkhoff),
        ("4", "RG flow", criterion_rg),
        ("5", "integrability witness", criterion_integrability),
        ("6", "Dyson-Schwinger", criterion_dse),
        ("7", "Hall / Lyndon", criterion_hall),
        ("8", "Hoffman isomorphism", criterion_hoffman),
        ("9", "universal singular frame", criterion_usf),
        ("10", "ζ character", criterion_zeta),
        ("11", "CLI golden files and round trip", criterion_cli),
    ];
    let mut failed = Vec::new();
    println!();
    for (id, name, run_criterion) in criteria {
        let v = run_criterion();
        println!("{} [{id}] {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        if !v.passed {
            failed.push(id);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
