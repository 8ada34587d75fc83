//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use hopfren_cli::Outcome;
use hopfren::laurent::{LaurentSeries, Poly};
use hopfren::rational::q;
use hopfren::words::{Word, WordPoly};
use hopfren::{Alphabet, Forest, RootedTree, TreePoly, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_q(rng: &mut ChaCha8Rng) -> Q {
    let mut n = rng.gen_range(-9..=9);
    if n == 0 {
        n = 1;
    }
    q(n, rng.gen_range(1..=5))
}

pub fn tree(rng: &mut ChaCha8Rng, alphabet: &Alphabet, vertices: u32) -> RootedTree {
    let letters = alphabet.letters();
    let root = letters[rng.gen_range(0..letters.len())].clone();
    let mut left = vertices - 1;
    let mut children = Vec::new();
    while left > 0 {
        let size = rng.gen_range(1..=left);
        children.push(tree(rng, alphabet, size));
        left -= size;
    }
    RootedTree::from_children(root, children)
}

pub fn forest(rng: &mut ChaCha8Rng, alphabet: &Alphabet, max_vertices: u32) -> Forest {
    let n = rng.gen_range(0..=3);
    let mut trees = Vec::new();
    for _ in 0..n {
        let size = rng.gen_range(1..=max_vertices);
        trees.push(tree(rng, alphabet, size));
    }
    Forest::new(trees)
}

pub fn tree_poly(rng: &mut ChaCha8Rng, alphabet: &Alphabet) -> TreePoly {
    let mut p = TreePoly::zero();
    for _ in 0..rng.gen_range(1..=4) {
        p.add_term(forest(rng, alphabet, 4), small_q(rng));
    }
    p
}

pub fn word_poly(rng: &mut ChaCha8Rng, alphabet: &Alphabet) -> WordPoly {
    let letters = alphabet.letters();
    let mut p = WordPoly::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let len = rng.gen_range(0..=4);
        let w = Word::new((0..len).map(|_| letters[rng.gen_range(0..letters.len())].clone()).collect());
        p.add_term(w, small_q(rng));
    }
    p
}

pub fn poly(rng: &mut ChaCha8Rng) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        p = p.add(&Poly::monomial(small_q(rng), rng.gen_range(0..=2), rng.gen_range(0..=2)));
    }
    p
}

pub fn laurent(rng: &mut ChaCha8Rng, max_pole: i32) -> LaurentSeries {
    let mut s = LaurentSeries::zero();
    for k in -max_pole..=2 {
        if rng.gen_bool(0.6) {
            s = s.add(&LaurentSeries::monomial(poly(rng), k));
        }
    }
    s
}

/// A Laurent series with rational coefficients and pole order at most `max_pole`.
pub fn scalar_laurent(rng: &mut ChaCha8Rng, max_pole: i32) -> LaurentSeries {
    LaurentSeries::from_terms((-max_pole..=1).map(|k| (k, small_q(rng))))
}

/// Every subcommand on the fixed corpus in `tests/corpus`; outputs live in `tests/golden`.
pub const CASES: &[(&str, &[&str])] = &[
    ("coprod_ladder", &["coprod", "f1[f1]"]),
    ("coprod_two_letters", &["coprod", "a[b a] + 1/2*a"]),
    ("coprod_json", &["--json", "coprod", "f1[f1]"]),
    ("antipode_cherry", &["antipode", "f1[f1 f1]"]),
    ("antipode_json", &["antipode", "--json", "a[b]-a b"]),
    ("birkhoff_bogoliubov", &["birkhoff", "--char", "{corpus}/phi.txt", "--degree", "3"]),
    ("birkhoff_bch", &["birkhoff", "--char", "{corpus}/local.txt", "--method", "bch"]),
    ("birkhoff_json", &["--json", "birkhoff", "--char", "{corpus}/phi.txt", "-d", "2"]),
    ("birkhoff_parse_error", &["birkhoff", "--char", "{corpus}/bad_series.txt"]),
    ("birkhoff_parse_error_json", &["--json", "birkhoff", "--char", "{corpus}/bad_series.txt"]),
    ("birkhoff_truncation", &["birkhoff", "--char", "{corpus}/phi.txt", "--degree", "5"]),
    ("rg_local", &["rg", "--char", "{corpus}/local.txt"]),
    ("rg_json", &["--json", "rg", "--char", "{corpus}/local.txt", "-d", "2"]),
    ("rg_non_local", &["rg", "--char", "{corpus}/phi.txt"]),
    ("rg_non_local_json", &["--json", "rg", "--char", "{corpus}/phi.txt"]),
    ("nijenhuis_flow", &["nijenhuis-check", "--char", "{corpus}/flow_t.txt", "--char", "{corpus}/flow_s.txt"]),
    ("nijenhuis_random", &["nijenhuis-check", "--char", "{corpus}/phi.txt", "--char", "{corpus}/local.txt", "--lambda", "-1/2"]),
    ("nijenhuis_json", &["--json", "nijenhuis-check", "--char", "{corpus}/phi.txt", "--char", "{corpus}/local.txt", "-d", "2"]),
    ("dse_solve", &["dse", "solve", "--spec", "{corpus}/ladder.dse", "--order", "4"]),
    ("dse_solve_json", &["--json", "dse", "solve", "--spec", "{corpus}/two_cocycles.dse", "--order", "3"]),
    ("dse_check", &["dse", "check", "--spec", "{corpus}/two_cocycles.dse", "--order", "5"]),
    ("dse_check_json", &["--json", "dse", "check", "--spec", "{corpus}/ladder.dse", "--order", "4"]),
    ("dse_bad_spec", &["dse", "solve", "--spec", "{corpus}/bad.dse", "--order", "2"]),
    ("dse_zeta_small", &["dse", "zeta", "--s", "2", "--primes-upto", "3"]),
    ("dse_zeta_factorial", &["dse", "zeta", "--s", "2", "--primes-upto", "100", "--normalization", "factorial"]),
    ("dse_zeta_json", &["--json", "dse", "zeta", "--s", "3", "--primes-upto", "7", "--max-len", "12"]),
    ("hall_two_letters", &["hall", "--alphabet", "a,b", "--max-degree", "5"]),
    ("hall_json", &["--json", "hall", "--alphabet", "a,b,c", "--max-degree", "3"]),
    ("lyndon_ab", &["lyndon", "--alphabet", "a,b", "--max-len", "3"]),
    ("lyndon_factor", &["lyndon", "--alphabet", "a,b", "--factor", "b.a.b.a.a.b"]),
    ("lyndon_json", &["--json", "lyndon", "--alphabet", "x,y,z", "--max-len", "3"]),
    ("words_qsh", &["words", "qsh", "f1.f2", "f1"]),
    ("words_shuffle", &["words", "shuffle", "f1.f2", "f3"]),
    ("words_qsh_zero", &["words", "--pairing", "zero", "qsh", "f1", "f1"]),
    ("words_antipode", &["words", "antipode", "f1.f2.f1"]),
    ("words_exp", &["words", "exp", "f1.f1.f2"]),
    ("words_log", &["words", "log", "2*f1.f1-f2"]),
    ("words_deconcat", &["words", "deconcat", "f1.f2.f3"]),
    ("words_pi", &["words", "pi", "f1[f2] + f1 f1"]),
    ("words_zhao", &["words", "zhao", "f1[f1] f1"]),
    ("words_json", &["--json", "words", "qsh", "(1,1)", "(2)"]),
    ("words_bad_pairing", &["words", "--alphabet", "a,b", "qsh", "a", "b"]),
    ("usf_frame", &["usf", "--order", "3", "--max-weight", "4"]),
    ("usf_json", &["--json", "usf", "--order", "2", "--max-weight", "2"]),
    ("usf_check_hall", &["usf", "check-hall", "--max-weight", "4"]),
    ("usf_check_hall_json", &["--json", "usf", "check-hall", "--max-weight", "3"]),
    ("selftest", &["selftest"]),
    ("selftest_json", &["--json", "selftest"]),
    ("usage_error", &["frobnicate"]),
];

pub fn corpus() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/corpus").to_string()
}

pub fn argv(args: &[&str]) -> Vec<String> {
    std::iter::once("hopfren".to_string())
        .chain(args.iter().map(|a| a.replace("{corpus}", &corpus())))
        .collect()
}

pub fn render(o: &Outcome) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", o.code, o.stdout, o.stderr)
}

pub fn golden_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}
