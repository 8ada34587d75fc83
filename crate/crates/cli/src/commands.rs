use std::fmt::Write as _;

use hopfren::characters::{birkhoff_bch, birkhoff_bogoliubov, rg_flow, Functional};
use hopfren::dse::{self, DseSpec, ZetaNormalization};
use hopfren::hall::HallSet;
use hopfren::hopf;
use hopfren::nijenhuis::{motion_integral_check, nijenhuis_check, upsilon_lambda, Convolution};
use hopfren::rational::{fmt_q, to_decimal};
use hopfren::trees::RawPoly;
use hopfren::usf;
use hopfren::words::{self, Pairing, Word, WordPoly};
use hopfren::{Alphabet, TreePoly, Q};
use serde_json::{json, Value};

use crate::render;
use crate::{Failure, Report, WordsOp};

fn parse_tree_poly(expr: &str, alphabet: Option<&str>) -> Result<(TreePoly, Alphabet), Failure> {
    let raw = RawPoly::parse(expr)?;
    let alphabet = match alphabet {
        Some(a) => Alphabet::parse(a)?,
        None => Alphabet::infer(raw.labels())?,
    };
    Ok((raw.resolve(&alphabet)?, alphabet))
}

pub fn coprod(expr: &str, alphabet: Option<&str>) -> Result<Report, Failure> {
    let (x, _) = parse_tree_poly(expr, alphabet)?;
    let d = hopf::coproduct(&x);
    let mut text = String::new();
    for ((l, r), c) in d.terms() {
        let coeff = if *c == hopfren::rational::qi(1) { String::new() } else { format!("{}*", fmt_q(c)) };
        writeln!(text, "{coeff}{l} ⊗ {r}").unwrap();
    }
    writeln!(text, "({} terms)", d.len()).unwrap();
    Ok(Report::ok(
        text,
        json!({ "command": "coprod", "input": x.to_string(), "coproduct": render::tensor_poly(&d) }),
    ))
}

pub fn antipode(expr: &str, alphabet: Option<&str>) -> Result<Report, Failure> {
    let (x, _) = parse_tree_poly(expr, alphabet)?;
    let s = hopf::antipode(&x);
    Ok(Report::ok(
        format!("{s}\n"),
        json!({ "command": "antipode", "input": x.to_string(), "antipode": render::tree_poly(&s) }),
    ))
}

fn header(f: &Functional) -> String {
    format!("degree: {}\nalphabet: {}\n", f.degree(), f.alphabet())
}

pub fn birkhoff(phi: &Functional, bch: bool) -> Result<Report, Failure> {
    let pair = if bch { birkhoff_bch(phi)? } else { birkhoff_bogoliubov(phi)? };
    let method = if bch { "bch" } else { "bogoliubov" };
    let (minus_text, minus_json) = render::tree_table(&pair.minus)?;
    let (plus_text, plus_json) = render::tree_table(&pair.plus)?;
    let text = format!("method: {method}\n{}minus:\n{minus_text}plus:\n{plus_text}", header(phi));
    Ok(Report::ok(
        text,
        json!({
            "command": "birkhoff",
            "method": method,
            "degree": phi.degree(),
            "alphabet": phi.alphabet().to_string(),
            "minus": minus_json,
            "plus": plus_json,
        }),
    ))
}

pub fn rg(phi: &Functional) -> Result<Report, Failure> {
    let flow = rg_flow(phi)?;
    let (f_text, f_json) = render::tree_table(&flow.f)?;
    let (b_text, b_json) = render::tree_table(&flow.beta)?;
    let text = format!("{}F_t:\n{f_text}beta:\n{b_text}", header(phi));
    Ok(Report::ok(
        text,
        json!({
            "command": "rg",
            "degree": phi.degree(),
            "alphabet": phi.alphabet().to_string(),
            "flow": f_json,
            "beta": b_json,
        }),
    ))
}

pub fn nijenhuis(f: &Functional, big_f: &Functional, lambda: &Q) -> Result<Report, Failure> {
    let motion = motion_integral_check(f, big_f, lambda)?;
    let identity = nijenhuis_check(
        &Convolution,
        &|x: &Functional| upsilon_lambda(x, lambda),
        &[(f.clone(), big_f.clone())],
    )?;
    let (res_text, res_json) = render::tree_table(&motion.residual)?;
    let mut text = format!("lambda: {}\n{}residual:\n{res_text}", fmt_q(lambda), header(f));
    let witness = match &motion.witness {
        Some((t, v)) => {
            writeln!(text, "motion integral: fails (first nonzero residual on {t})").unwrap();
            json!({ "tree": t.to_string(), "value": render::laurent(v) })
        }
        None => {
            text.push_str("motion integral: holds\n");
            Value::Null
        }
    };
    writeln!(text, "nijenhuis identity: {}", if identity.holds { "holds" } else { "fails" }).unwrap();
    Ok(Report::ok(
        text,
        json!({
            "command": "nijenhuis-check",
            "lambda": render::q(lambda),
            "degree": f.degree(),
            "alphabet": f.alphabet().to_string(),
            "residual": res_json,
            "motion_integral": { "holds": motion.holds, "witness": witness },
            "nijenhuis_identity": { "holds": identity.holds },
        }),
    ))
}

pub fn dse_solve(spec: &DseSpec, order: usize) -> Result<Report, Failure> {
    let sol = dse::solve_dse(spec, order);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (n, c) in sol.coefficients.iter().enumerate() {
        writeln!(text, "c_{n} = {c}").unwrap();
        rows.push(json!({ "n": n, "value": render::tree_poly(c) }));
    }
    Ok(Report::ok(
        text,
        json!({ "command": "dse solve", "order": order, "coefficients": rows }),
    ))
}

pub fn dse_check(spec: &DseSpec, order: usize) -> Result<Report, Failure> {
    let sol = dse::solve_dse(spec, order);
    let report = dse::subalgebra_check(&sol);
    let formula = dse::tree_formula_solution(spec, order)?;
    let agrees = formula == sol;
    let mut text = String::new();
    let witness = match &report.witness {
        Some(w) => {
            writeln!(
                text,
                "subalgebra: fails at n = {}: coefficient of {} ⊗ {} is {}, expected {}",
                w.n,
                w.left,
                w.right,
                fmt_q(&w.actual),
                fmt_q(&w.expected)
            )
            .unwrap();
            json!({
                "n": w.n,
                "left": w.left.to_string(),
                "right": w.right.to_string(),
                "actual": render::q(&w.actual),
                "expected": render::q(&w.expected),
            })
        }
        None => {
            writeln!(text, "subalgebra: holds for n = 1..{order}").unwrap();
            Value::Null
        }
    };
    writeln!(text, "tree formula: {}", if agrees { "agrees" } else { "differs" }).unwrap();
    Ok(Report::ok(
        text,
        json!({
            "command": "dse check",
            "order": order,
            "subalgebra": { "holds": report.holds, "checked": report.checked, "witness": witness },
            "tree_formula_agrees": agrees,
        }),
    ))
}

/// ζ(s) by Euler-Maclaurin from n = 1000; accurate to double precision for s ≥ 2.
fn riemann_zeta(s: u32) -> f64 {
    let s = s as f64;
    let n = 1000.0f64;
    let head: f64 = (1..1000).map(|k| (k as f64).powf(-s)).sum();
    head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
}

pub fn dse_zeta(s: u32, primes_upto: u64, normalization: &str, max_len: u32) -> Result<Report, Failure> {
    let norm = ZetaNormalization::parse(normalization)?;
    let primes = dse::primes_up_to(primes_upto);
    let v = dse::zeta_character(s, &primes, norm, max_len)?;
    let zeta = riemann_zeta(s);
    let mut text = format!(
        "s: {s}\nprimes: {} (up to {primes_upto})\nnormalization: {}\nmax length: {max_len}\n",
        v.primes,
        norm.name()
    );
    writeln!(text, "value: {:.12}", v.approx).unwrap();
    if let Some(e) = &v.exact {
        writeln!(text, "exact: {}", fmt_q(e)).unwrap();
    }
    match &v.closed_form {
        Some(c) if v.primes <= dse::ZETA_EXACT_PRIMES => {
            writeln!(text, "closed form: {} = {}", fmt_q(c), to_decimal(c, 12)).unwrap()
        }
        _ => writeln!(text, "closed form: {:.12}", v.closed_form_approx).unwrap(),
    }
    writeln!(text, "zeta({s}): {zeta:.12}").unwrap();
    writeln!(text, "difference: {:.12}", v.approx - zeta).unwrap();
    let closed_exact = v
        .closed_form
        .as_ref()
        .filter(|_| v.primes <= dse::ZETA_EXACT_PRIMES)
        .map(render::q);
    Ok(Report::ok(
        text,
        json!({
            "command": "dse zeta",
            "s": s,
            "primes_upto": primes_upto,
            "primes": v.primes,
            "normalization": norm.name(),
            "max_len": max_len,
            "value": format!("{:.12}", v.approx),
            "exact": v.exact.as_ref().map(render::q),
            "closed_form": closed_exact,
            "closed_form_decimal": format!("{:.12}", v.closed_form_approx),
            "zeta": format!("{zeta:.12}"),
        }),
    ))
}

pub fn hall(alphabet: &str, max_degree: u32) -> Result<Report, Failure> {
    let alphabet = Alphabet::parse(alphabet)?;
    let set = HallSet::build(&alphabet, max_degree)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for t in set.members() {
        let foliage = set.foliage(t)?;
        let (t1, t2) = set.standard_decomposition(t)?;
        let decomposition = match &t2 {
            Some(t2) => format!("({t1}, {t2})"),
            None => "-".to_string(),
        };
        writeln!(text, "{}  {t}  {foliage}  {decomposition}", t.degree()).unwrap();
        rows.push(json!({
            "tree": t.to_string(),
            "degree": t.degree(),
            "foliage": foliage.to_string(),
            "decomposition": t2.map(|t2| json!([t1.to_string(), t2.to_string()])),
        }));
    }
    let counts = set.counts();
    let shown: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    writeln!(text, "counts: {}", shown.join(" ")).unwrap();
    Ok(Report::ok(
        text,
        json!({
            "command": "hall",
            "alphabet": alphabet.to_string(),
            "max_degree": max_degree,
            "members": rows,
            "counts": counts,
        }),
    ))
}

pub fn lyndon(alphabet: &str, max_len: usize, factor: Option<&str>) -> Result<Report, Failure> {
    let alphabet = Alphabet::parse(alphabet)?;
    if let Some(w) = factor {
        let w = Word::parse(w, &alphabet)?;
        let parts = words::lyndon_factorize(&w);
        let shown: Vec<String> = parts.iter().map(|p| format!("({p})")).collect();
        return Ok(Report::ok(
            format!("{}\n", shown.join(" ")),
            json!({
                "command": "lyndon",
                "word": w.to_string(),
                "factors": parts.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            }),
        ));
    }
    let list = words::lyndon_words(&alphabet, max_len);
    let mut text = String::new();
    for w in &list {
        writeln!(text, "{w}").unwrap();
    }
    writeln!(text, "({} words)", list.len()).unwrap();
    Ok(Report::ok(
        text,
        json!({
            "command": "lyndon",
            "alphabet": alphabet.to_string(),
            "max_len": max_len,
            "words": list.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        }),
    ))
}

fn word_result(op: &str, result: &WordPoly) -> Report {
    Report::ok(
        format!("{result}\n"),
        json!({ "command": format!("words {op}"), "result": render::word_poly(result) }),
    )
}

pub fn words(alphabet: &str, additive: bool, op: &WordsOp) -> Result<Report, Failure> {
    let alphabet = Alphabet::parse(alphabet)?;
    let pairing = if additive { Pairing::additive(&alphabet)? } else { Pairing::Zero };
    let parse = |s: &str| WordPoly::parse(s, &alphabet);
    Ok(match op {
        WordsOp::Qsh { u, v } => word_result("qsh", &words::qsh_product(&parse(u)?, &parse(v)?, &pairing)?),
        WordsOp::Shuffle { u, v } => word_result("shuffle", &words::shuffle(&parse(u)?, &parse(v)?)),
        WordsOp::Antipode { x } => {
            let x = parse(x)?;
            let mut out = WordPoly::zero();
            for (w, c) in x.terms() {
                out = out.add(&words::word_antipode(w, &pairing)?.scale(c));
            }
            word_result("antipode", &out)
        }
        WordsOp::Exp { x } => word_result("exp", &words::hoffman_exp(&parse(x)?, &pairing)?),
        WordsOp::Log { x } => word_result("log", &words::hoffman_log(&parse(x)?, &pairing)?),
        WordsOp::Deconcat { x } => {
            let d = words::deconcat_poly(&parse(x)?);
            let mut text = String::new();
            let mut rows = Vec::new();
            for ((l, r), c) in &d {
                writeln!(text, "{}  {l} ⊗ {r}", fmt_q(c)).unwrap();
                rows.push(json!({ "coeff": fmt_q(c), "left": l.to_string(), "right": r.to_string() }));
            }
            Report::ok(text, json!({ "command": "words deconcat", "terms": rows }))
        }
        WordsOp::Pi { expr } => {
            let x = RawPoly::parse(expr)?.resolve(&alphabet)?;
            word_result("pi", &words::pi_map(&x, &pairing)?)
        }
        WordsOp::Zhao { expr } => {
            let (x, _) = parse_tree_poly(expr, None)?;
            let parts = Alphabet::universal(x.max_degree().unwrap_or(0).max(1));
            let z = words::zhao_dual(&x, &parts)?;
            let mut text = String::new();
            for (w, c) in z.terms() {
                writeln!(text, "{}  M{}", fmt_q(c), w.composition_string()).unwrap();
            }
            let rows: Vec<Value> = z
                .terms()
                .map(|(w, c)| json!({ "coeff": fmt_q(c), "composition": w.composition() }))
                .collect();
            Report::ok(text, json!({ "command": "words zhao", "input": x.to_string(), "terms": rows }))
        }
    })
}

pub fn usf(order: u32, max_weight: u32) -> Result<Report, Failure> {
    let e = usf::usf_expand(order, max_weight)?;
    let rows: Vec<Value> = e
        .terms
        .iter()
        .map(|t| {
            json!({
                "chain": t.chain,
                "coefficient": render::q(&t.coefficient),
                "marker": render::laurent(&t.marker),
            })
        })
        .collect();
    Ok(Report::ok(
        e.to_string(),
        json!({ "command": "usf", "order": order, "max_weight": max_weight, "terms": rows }),
    ))
}

pub fn usf_check_hall(max_weight: u32) -> Result<Report, Failure> {
    let r = usf::hall_representation_check(max_weight)?;
    let mut text = format!("words checked: {}\n", r.words_checked);
    let mismatch = match &r.mismatch {
        Some((w, lhs, rhs)) => {
            writeln!(text, "representation: fails on {w}: {} versus {}", fmt_q(lhs), fmt_q(rhs)).unwrap();
            json!({ "word": w.to_string(), "hall_side": render::q(lhs), "alpha": render::q(rhs) })
        }
        None => {
            text.push_str("representation: holds\n");
            Value::Null
        }
    };
    Ok(Report::ok(
        text,
        json!({
            "command": "usf check-hall",
            "max_weight": max_weight,
            "holds": r.holds,
            "words_checked": r.words_checked,
            "mismatch": mismatch,
        }),
    ))
}
