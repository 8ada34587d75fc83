//! Invariants that must hold on every build, at sizes that finish in a few seconds.

use std::collections::BTreeMap;

use hopfren::characters::{
    birkhoff_bch, birkhoff_bogoliubov, rg_flow_from_counterterm, time_ordered_counterterm, Basis, Functional,
};
use hopfren::dse;
use hopfren::hall::{is_primitive, rank, HallSet};
use hopfren::hopf::{antipode, coproduct, coproduct_forest, counit, graft_operator, cocycle_check};
use hopfren::laurent::{rota_baxter_check, small_sample_pairs, LaurentSeries, RbOperator};
use hopfren::nijenhuis::{motion_integral_check, nijenhuis_check, upsilon_lambda, Convolution};
use hopfren::rational::{q, qi};
use hopfren::trees::enumerate_forests;
use hopfren::usf;
use hopfren::words::{self, Pairing, Word, WordPoly};
use hopfren::{Alphabet, Forest, Result, TreePoly, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{Report, EXIT_OK, EXIT_SELFTEST_FAILED};

type Check = (&'static str, fn() -> Result<bool>);

const CHECKS: &[Check] = &[
    ("hopf: coassociativity, counit, antipode, S^2 = id (2 letters, degree 4)", hopf_axioms),
    ("hopf: B+ is a 1-cocycle (degree 4)", b_plus_cocycle),
    ("laurent: minimal subtraction is Rota-Baxter of weight 1", minimal_subtraction),
    ("characters: Bogoliubov and BCH factorizations agree", birkhoff_routes),
    ("characters: RG flow is a one-parameter group with generator beta", rg_group),
    ("nijenhuis: Upsilon_lambda satisfies the Nijenhuis identity", nijenhuis_identity),
    ("nijenhuis: F_s is a motion integral for F_t", motion_integral),
    ("words: quasi-shuffle is commutative and associative", quasi_shuffle),
    ("words: Hoffman exp intertwines shuffle and quasi-shuffle", hoffman),
    ("words: antipode formula matches the recursion", word_antipode),
    ("hall: member counts equal Lyndon counts (2 letters, degree 6)", hall_counts),
    ("hall: Hall polynomials are primitive and independent (degree 5)", hall_polynomials),
    ("dse: recursion matches the tree formula and spans a subalgebra", dse_routes),
    ("dse: zeta Euler product over {2,3} tends to 3/2", zeta_small),
    ("usf: frame coefficients equal simplex integrals (weight 6)", usf_coefficients),
    ("usf: beta^U vanishes off trees (weight 4)", beta_u_trees),
    ("usf: Hall representation of the frame (weight 4)", usf_hall),
];

pub fn run() -> Report {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failed = 0;
    for (name, check) in CHECKS {
        let (passed, detail) = match check() {
            Ok(ok) => (ok, None),
            Err(e) => (false, Some(e.to_string())),
        };
        if !passed {
            failed += 1;
        }
        text.push_str(&format!("{} {name}", if passed { "PASS" } else { "FAIL" }));
        if let Some(d) = &detail {
            text.push_str(&format!(": {d}"));
        }
        text.push('\n');
        rows.push(json!({ "name": name, "passed": passed, "error": detail }));
    }
    let passed = CHECKS.len() - failed;
    text.push_str(&format!("{passed} passed, {failed} failed\n"));
    Report {
        text,
        json: json!({ "command": "selftest", "passed": passed, "failed": failed, "checks": rows }),
        code: if failed == 0 { EXIT_OK } else { EXIT_SELFTEST_FAILED },
    }
}

fn hopf_axioms() -> Result<bool> {
    let a = Alphabet::parse("a,b")?;
    for f in enumerate_forests(&a, 4)? {
        let x = TreePoly::from(f.clone());
        let d = coproduct(&x);
        let mut left: BTreeMap<(Forest, Forest, Forest), Q> = BTreeMap::new();
        let mut right = left.clone();
        for ((l, r), c) in d.terms() {
            for ((ll, lr), e) in coproduct_forest(l).terms() {
                *left.entry((ll.clone(), lr.clone(), r.clone())).or_default() += c * e;
            }
            for ((rl, rr), e) in coproduct_forest(r).terms() {
                *right.entry((l.clone(), rl.clone(), rr.clone())).or_default() += c * e;
            }
        }
        left.retain(|_, c| *c != qi(0));
        right.retain(|_, c| *c != qi(0));
        let eps = |g: &Forest| counit(&TreePoly::from(g.clone()));
        let counit_left = d.map(|g| TreePoly::one().scale(&eps(g)), |g| g.clone().into()).multiply();
        let unit = TreePoly::one().scale(&counit(&x));
        let s_left = d.map(|g| antipode(&g.clone().into()), |g| g.clone().into()).multiply();
        let s_right = d.map(|g| g.clone().into(), |g| antipode(&g.clone().into())).multiply();
        if left != right || counit_left != x || s_left != unit || s_right != unit || antipode(&antipode(&x)) != x {
            return Ok(false);
        }
    }
    Ok(true)
}

fn b_plus_cocycle() -> Result<bool> {
    let a = Alphabet::parse("a,b")?;
    let l = graft_operator(a.letters()[0].clone());
    Ok(cocycle_check(&l, &a, 4)?.holds)
}

fn minimal_subtraction() -> Result<bool> {
    let r = |s: &LaurentSeries| RbOperator::MinimalSubtraction.apply(s);
    Ok(rota_baxter_check(&r, &small_sample_pairs())?.holds)
}

fn random_character(rng: &mut ChaCha8Rng, degree: u32) -> Result<Functional> {
    let basis = Basis::new(&Alphabet::single("f1"), degree)?;
    let trees: Vec<_> = basis.trees().cloned().collect();
    let values = trees.iter().map(|t| {
        let pole = t.degree() as i32;
        let series = LaurentSeries::from_terms((-pole..=1).map(|k| (k, q(rng.gen_range(-3..=3), rng.gen_range(1..=3)))));
        (t.clone(), series)
    });
    let values: Vec<_> = values.collect();
    Functional::character(&basis, values)
}

fn birkhoff_routes() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let phi = random_character(&mut rng, 4)?;
        let pair = birkhoff_bogoliubov(&phi)?;
        if birkhoff_bch(&phi)? != pair || pair.minus.inverse()?.convolve(&pair.plus)? != phi {
            return Ok(false);
        }
    }
    Ok(true)
}

fn local_beta(rng: &mut ChaCha8Rng) -> Result<Functional> {
    let basis = Basis::new(&Alphabet::single("f1"), 4)?;
    let values: Vec<_> = basis
        .trees()
        .map(|t| {
            let r = if t.degree() <= 3 { qi(rng.gen_range(-3..=3)) } else { qi(0) };
            (t.clone(), LaurentSeries::constant(r))
        })
        .collect();
    Functional::infinitesimal(&basis, values)
}

fn rg_group() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let beta = local_beta(&mut rng)?;
    let rg = rg_flow_from_counterterm(&time_ordered_counterterm(&beta, 4)?)?;
    let fs = rg.f.map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.rename_t_to_v())))?;
    let sum = rg.f.map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.shift_t_by_v())))?;
    Ok(rg.beta == beta && fs.convolve(&rg.f)? == sum)
}

fn nijenhuis_identity() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = random_character(&mut rng, 3)?;
    let g = random_character(&mut rng, 3)?;
    for lambda in [qi(0), qi(2), q(-1, 2)] {
        let n = |x: &Functional| upsilon_lambda(x, &lambda);
        if !nijenhuis_check(&Convolution, &n, &[(f.clone(), g.clone())])?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

fn motion_integral() -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let beta = local_beta(&mut rng)?.restrict(3)?;
    let rg = rg_flow_from_counterterm(&time_ordered_counterterm(&beta, 3)?)?;
    let fs = rg.f.map_tree_values(|_, x| Ok(x.map_coeffs(|p| p.rename_t_to_v())))?;
    Ok(motion_integral_check(&rg.f, &fs, &qi(0))?.holds)
}

fn small_words() -> Result<Vec<Word>> {
    let a = Alphabet::universal(3);
    let mut out = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    while !level.is_empty() {
        let mut next = Vec::new();
        for w in &level {
            for l in a.letters() {
                let g = w.concat(&Word::letter(l.clone()));
                if g.weight() <= 3 {
                    next.push(g);
                }
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    Ok(out)
}

fn quasi_shuffle() -> Result<bool> {
    let p = Pairing::additive(&Alphabet::universal(9))?;
    let ws = small_words()?;
    for u in &ws {
        for v in &ws {
            let (x, y) = (WordPoly::from(u.clone()), WordPoly::from(v.clone()));
            let xy = words::qsh_product(&x, &y, &p)?;
            if xy != words::qsh_product(&y, &x, &p)? {
                return Ok(false);
            }
            let w = WordPoly::from(ws[1].clone());
            if words::qsh_product(&xy, &w, &p)? != words::qsh_product(&x, &words::qsh_product(&y, &w, &p)?, &p)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn hoffman() -> Result<bool> {
    let p = Pairing::additive(&Alphabet::universal(8))?;
    let ws = small_words()?;
    for u in &ws {
        for v in &ws {
            let (x, y) = (WordPoly::from(u.clone()), WordPoly::from(v.clone()));
            let lhs = words::hoffman_exp(&words::shuffle(&x, &y), &p)?;
            let rhs = words::qsh_product(&words::hoffman_exp(&x, &p)?, &words::hoffman_exp(&y, &p)?, &p)?;
            if lhs != rhs || words::hoffman_log(&words::hoffman_exp(&x, &p)?, &p)? != x {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn word_antipode() -> Result<bool> {
    let p = Pairing::additive(&Alphabet::universal(4))?;
    for w in small_words()? {
        if words::word_antipode(&w, &p)? != words::word_antipode_recursive(&w, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn hall_counts() -> Result<bool> {
    let a = Alphabet::parse("a,b")?;
    let h = HallSet::build(&a, 6)?;
    let mut lyndon = vec![0usize; 6];
    for w in words::lyndon_words(&a, 6) {
        lyndon[w.len() - 1] += 1;
    }
    Ok(h.counts() == lyndon && h.audit().is_ok())
}

fn hall_polynomials() -> Result<bool> {
    let h = HallSet::build(&Alphabet::parse("a,b")?, 5)?;
    let polys = h.members().map(|t| h.hall_polynomial(t)).collect::<Result<Vec<_>>>()?;
    Ok(polys.iter().all(is_primitive) && rank(&polys) == polys.len())
}

fn dse_routes() -> Result<bool> {
    let spec = dse::DseSpec::parse("1 1 g\n")?;
    let sol = dse::solve_dse(&spec, 5);
    Ok(dse::tree_formula_solution(&spec, 5)? == sol && dse::subalgebra_check(&sol).holds)
}

fn zeta_small() -> Result<bool> {
    let v = dse::zeta_character(2, &[2, 3], dse::ZetaNormalization::Multiset, 30)?;
    Ok(v.closed_form == Some(q(3, 2)) && (v.approx - 1.5).abs() < 1e-9)
}

fn usf_coefficients() -> Result<bool> {
    for chain in usf::chains(6, 6) {
        if usf::frame_coefficient(&chain) != usf::simplex_integral(&chain)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn beta_u_trees() -> Result<bool> {
    let beta = usf::beta_u_functional(4)?;
    let vanishes = beta.values().all(|(f, v)| f.len() == 1 || *v == qi(0));
    Ok(vanishes)
}

fn usf_hall() -> Result<bool> {
    Ok(usf::hall_representation_check(4)?.holds)
}
