//! One function per subcommand. Each returns an [`Output`] carrying both
//! renderings; the caller picks one and maps `ok` to the exit status.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crjoin_core::bounds::{BoundCalc, BoundValue};
use crjoin_core::join::{
    join_all, join_improved, join_main, join_peak_left_star, join_peak_source_star,
    join_reduction_peak, join_refined, peak_chain, JoinCertificate,
};
use crjoin_core::patterns::{enumerate_patterns, DEFAULT_PATTERN_CAP};
use crjoin_core::reduction::{gross_knuth_path, leftmost_redex, star_iter, Limits, ReductionPath};
use crjoin_core::{print_term, Direction, EqualityChain, Error, Term};

use crate::error::{CliError, CliResult};
use crate::example2;
use crate::harness::{self, chain_bound_checks, CheckReport, HarnessConfig, Suite};
use crate::io::{emit_chain, BoundCheck, CertificateDoc};

pub struct Output {
    pub text: String,
    pub json: Value,
    /// False when a replay, bound check or harness property failed.
    pub ok: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            ok: true,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn parse_term_cmd(t: &Term) -> Output {
    let text = print_term(t);
    let redexes: Vec<String> = t.redexes().iter().map(|p| p.to_string()).collect();
    let mut out = format!("{text}\nsize {}\nredexes {}\n", t.size(), redexes.len());
    for r in &redexes {
        let _ = writeln!(out, "  {r}");
    }
    Output::ok(
        out,
        json!({ "term": text, "size": t.size(), "redexes": redexes }),
    )
}

pub fn parse_chain_cmd(c: &EqualityChain) -> Output {
    let links: Vec<Value> = c
        .links()
        .iter()
        .map(|l| json!({ "arrow": l.direction.token(), "witness": l.witness.to_string() }))
        .collect();
    let mut text = emit_chain(c);
    let _ = writeln!(
        text,
        "length {} (right {}, left {})",
        c.len(),
        c.right_count(),
        c.left_count()
    );
    for (i, l) in c.links().iter().enumerate() {
        let _ = writeln!(text, "  link {i} {} at {}", l.direction.token(), l.witness);
    }
    let terms: Vec<String> = c.terms().iter().map(print_term).collect();
    Output::ok(text, json!({ "terms": terms, "links": links }))
}

/// Replays every certificate. Replay errors abort; failed recorded bound
/// checks only clear `ok`.
pub fn parse_certificate_cmd(docs: &[CertificateDoc], limits: &Limits) -> CliResult<Output> {
    let mut text = String::new();
    let mut results = Vec::new();
    let mut ok = true;
    for doc in docs {
        let (left, right) = doc.replay(limits)?;
        let pass = doc.checks_pass();
        ok &= pass;
        let _ = writeln!(
            text,
            "certificate at {} replays: {} + {} steps{}",
            doc.descriptor,
            left.len(),
            right.len(),
            if pass {
                ""
            } else {
                ", but a recorded bound check failed"
            }
        );
        results.push(
            json!({ "descriptor": doc.descriptor, "replays": true, "bound_checks_pass": pass }),
        );
    }
    Ok(Output {
        text,
        json: json!({ "certificates": results, "ok": ok }),
        ok,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Strategy {
    Leftmost,
    GrossKnuth,
    Random,
}

#[derive(Serialize)]
struct ReduceStep {
    position: String,
    term: String,
}

pub fn reduce_cmd(
    t: &Term,
    strategy: Strategy,
    fuel: usize,
    seed: u64,
    limits: &Limits,
) -> CliResult<Output> {
    let mut text = format!("{}\n", print_term(t));
    let mut steps = Vec::new();
    let mut cur = t.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0;
    let normal = loop {
        if cur.redex_count() == 0 {
            break true;
        }
        if used == fuel {
            break false;
        }
        used += 1;
        match strategy {
            Strategy::GrossKnuth => {
                let dev = gross_knuth_path(&cur, limits)?;
                cur = dev.end().clone();
                let _ = writeln!(text, "=[{} steps]=> {}", dev.len(), print_term(&cur));
                steps.push(json!({ "macro_steps": dev.len(), "term": print_term(&cur) }));
            }
            Strategy::Leftmost | Strategy::Random => {
                let pos = if strategy == Strategy::Leftmost {
                    leftmost_redex(&cur).expect("term has a redex")
                } else {
                    let all: Vec<_> = cur.redexes().into_iter().collect();
                    all.choose(&mut rng).expect("term has a redex").clone()
                };
                let mut path = ReductionPath::empty(cur);
                path.contract_at(&pos, limits)?;
                cur = path.end().clone();
                let _ = writeln!(text, "-[{pos}]-> {}", print_term(&cur));
                steps.push(to_json(&ReduceStep {
                    position: pos.to_string(),
                    term: print_term(&cur),
                }));
            }
        }
    };
    let status = if normal {
        "normal-form"
    } else {
        "fuel-exhausted"
    };
    let _ = writeln!(text, "{status} after {used} steps");
    Ok(Output::ok(
        text,
        json!({ "start": print_term(t), "steps": steps, "result": print_term(&cur), "status": status }),
    ))
}

pub fn star_cmd(t: &Term, n: usize, limits: &Limits) -> CliResult<Output> {
    let s = star_iter(t, n, limits)?;
    let printed = print_term(&s);
    Ok(Output::ok(
        format!("{printed}\nsize {}\n", s.size()),
        json!({ "iterations": n, "term": printed, "size": s.size() }),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum JoinMode {
    Main,
    Refined,
    All,
    Improved,
}

fn checks_for(rows: &[(&'static str, usize, BoundValue)], pick: &[usize]) -> Vec<BoundCheck> {
    pick.iter()
        .map(|&i| {
            let (name, actual, ref v) = rows[i];
            let (what, side) = name.rsplit_once(", ").unwrap_or((name, ""));
            BoundCheck::new(format!("cr-eq {what}"), side, actual, v)
        })
        .collect()
}

fn certificates_output(certs: Vec<(JoinCertificate, Vec<BoundCheck>)>, limits: &Limits) -> Output {
    let mut text = String::new();
    let mut docs = Vec::new();
    let mut ok = true;
    for (cert, checks) in certs {
        let doc = CertificateDoc::new(&cert, checks);
        let replays = doc.replay(limits).is_ok();
        ok &= replays && doc.checks_pass();
        text.push_str(&doc.to_text());
        if !replays {
            text.push_str("REPLAY FAILED\n");
        }
        text.push('\n');
        docs.push(doc);
    }
    text.push_str(if ok {
        "all certificates replay and all bound checks pass\n"
    } else {
        "CHECKS FAILED\n"
    });
    Output {
        text,
        json: json!({ "certificates": to_json(&docs), "ok": ok }),
        ok,
    }
}

pub fn join_chain_cmd(
    c: &EqualityChain,
    mode: JoinMode,
    calc: &BoundCalc,
    limits: &Limits,
) -> CliResult<Output> {
    let certs = match mode {
        JoinMode::Main | JoinMode::Refined => {
            let main = join_main(c, limits)?;
            let refined = join_refined(c, limits)?;
            let rows = chain_bound_checks(calc, c, &main, &refined)?;
            if mode == JoinMode::Main {
                vec![
                    (main.0, checks_for(&rows, &[0, 1])),
                    (main.1, checks_for(&rows, &[2, 3])),
                ]
            } else {
                vec![(refined, checks_for(&rows, &[4, 5]))]
            }
        }
        JoinMode::All => {
            let all = join_all(c, limits)?;
            all.before
                .into_iter()
                .chain(all.after)
                .map(|cert| (cert, Vec::new()))
                .collect()
        }
        JoinMode::Improved => {
            return Err(CliError::Usage(
                "the improved join needs --peak LEFT RIGHT".into(),
            ));
        }
    };
    Ok(certificates_output(certs, limits))
}

pub fn join_peak_cmd(
    left: &ReductionPath,
    right: &ReductionPath,
    mode: JoinMode,
    calc: &BoundCalc,
    limits: &Limits,
) -> CliResult<Output> {
    let c = peak_chain(left, right)?;
    let (n, m) = (left.len() as u64, right.len() as u64);
    let s = left.start().size();
    let certs = match mode {
        JoinMode::Main | JoinMode::Refined => {
            let (at_q, crossed) = join_reduction_peak(left, right, limits)?;
            let main = join_main(&c, limits)?;
            let refined = join_refined(&c, limits)?;
            let rows = chain_bound_checks(calc, &c, &main, &refined)?;
            let mut certs = vec![
                (at_q, checks_for(&rows, &[2, 3])),
                (crossed, checks_for(&rows, &[4, 5])),
            ];
            if mode == JoinMode::Main && m >= 1 {
                let j = join_peak_left_star(left, right, limits)?;
                let b = calc.cr_red_bound(n, s, m)?;
                let checks = vec![
                    BoundCheck::new("cr-red", "left", j.left.len(), &b.left),
                    BoundCheck::new("cr-red", "right", j.right.len(), &b.right),
                ];
                certs.push((j, checks));
                if n >= 1 {
                    let j = join_peak_source_star(left, right, limits)?;
                    let b = calc.v_size_bound(n, s, m)?;
                    let checks = vec![
                        BoundCheck::new("v-size", "left", j.left.len(), &b.left),
                        BoundCheck::new("v-size", "right", j.right.len(), &b.right),
                    ];
                    certs.push((j, checks));
                }
            }
            certs
        }
        JoinMode::All => {
            let all = join_all(&c, limits)?;
            all.before
                .into_iter()
                .chain(all.after)
                .map(|cert| (cert, Vec::new()))
                .collect()
        }
        JoinMode::Improved => {
            let j = join_improved(left, right, limits)?;
            let mut out = certificates_output(
                vec![(j.at_right, Vec::new()), (j.at_left, Vec::new())],
                limits,
            );
            out.text = format!(
                "new-redex contractions: left {}, right {}\n\n{}",
                j.a, j.b, out.text
            );
            out.json["a"] = json!(j.a);
            out.json["b"] = json!(j.b);
            return Ok(out);
        }
    };
    Ok(certificates_output(certs, limits))
}

fn render_value(v: &BoundValue, bit_cap: u64) -> String {
    match v {
        BoundValue::Overflow => format!("overflow(>2^{bit_cap} bits)"),
        v => v.to_string(),
    }
}

/// Bound functions by name, with the least value each argument may take.
const FUNCTIONS: &[(&str, &[u64])] = &[
    ("len", &[1, 0]),
    ("f", &[0, 0]),
    ("iter-exp", &[0, 0]),
    ("size-after", &[1, 0]),
    ("star-size", &[1]),
    ("mon", &[1, 0, 0]),
    ("rev", &[1, 1]),
    ("cr-red", &[0, 1, 1]),
    ("v-size", &[1, 1, 1]),
    ("bl", &[0, 1, 1]),
];

fn eval_bound(calc: &BoundCalc, name: &str, a: &[u64]) -> CliResult<Vec<(String, BoundValue)>> {
    let one = |v: BoundValue| vec![(String::from("value"), v)];
    let triple = |t: crjoin_core::bounds::BoundTriple| {
        vec![
            (String::from("left"), t.left),
            (format!("right ({})", t.reduct), t.right),
        ]
    };
    Ok(match name {
        "len" => one(calc.len_bound(a[0], a[1])),
        "f" => one(calc.f_iter(a[0], a[1])),
        "iter-exp" => one(calc.iter_exp(a[0], a[1])),
        "size-after" => one(calc.size_after_steps(a[0], a[1])),
        "star-size" => one(calc.star_size_bound(a[0])),
        "mon" => one(calc.mon_bound(a[0], a[1], a[2])),
        "rev" => one(calc.rev_bound(a[0], a[1])?),
        "cr-red" => {
            let mut v = triple(calc.cr_red_bound(a[0], a[1], a[2])?);
            v.push(("bl".into(), calc.bl_bound(a[0], a[1], a[2])?));
            v
        }
        "v-size" => triple(calc.v_size_bound(a[0], a[1], a[2])?),
        "bl" => one(calc.bl_bound(a[0], a[1], a[2])?),
        _ => unreachable!("names are checked against FUNCTIONS"),
    })
}

fn parse_arrows(s: &str) -> CliResult<Vec<Direction>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let (d, len) = if rest.starts_with("->") {
            (Direction::Right, 2)
        } else if rest.starts_with("<-") {
            (Direction::Left, 2)
        } else if rest.starts_with('→') {
            (Direction::Right, '→'.len_utf8())
        } else if rest.starts_with('←') {
            (Direction::Left, '←'.len_utf8())
        } else if rest.starts_with([',', ' ']) {
            rest = &rest[1..];
            continue;
        } else {
            return Err(CliError::Usage(format!("cannot read arrows from {s:?}")));
        };
        out.push(d);
        rest = &rest[len..];
    }
    Ok(out)
}

fn parse_nat(s: &str) -> CliResult<u64> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("expected a natural number, found {s:?}")))
}

pub fn bounds_cmd(calc: &BoundCalc, name: &str, args: &[String], grid: bool) -> CliResult<Output> {
    if name == "cr-eq" {
        let [arrows, s0, big_m] = args else {
            return Err(CliError::Usage("cr-eq takes ARROWS S0 TERMSIZE".into()));
        };
        let arrows = parse_arrows(arrows)?;
        let t = calc.cr_eq_bound(&arrows, parse_nat(s0)?, &BoundValue::nat(parse_nat(big_m)?));
        let (l, r) = (
            render_value(&t.left, calc.bit_cap),
            render_value(&t.right, calc.bit_cap),
        );
        return Ok(Output::ok(
            format!("<{l}, {}, {r}>\n", t.reduct),
            json!({ "left": l, "reduct": t.reduct, "right": r }),
        ));
    }
    let Some((_, mins)) = FUNCTIONS.iter().find(|(n, _)| *n == name) else {
        let known: Vec<&str> = FUNCTIONS.iter().map(|(n, _)| *n).chain(["cr-eq"]).collect();
        return Err(CliError::Usage(format!(
            "unknown bound function {name:?}; known: {}",
            known.join(", ")
        )));
    };
    if args.len() != mins.len() {
        return Err(CliError::Usage(format!(
            "{name} takes {} arguments",
            mins.len()
        )));
    }
    let args: Vec<u64> = args
        .iter()
        .map(|a| parse_nat(a))
        .collect::<CliResult<_>>()?;

    let mut tuples = vec![args.clone()];
    if grid {
        tuples = vec![Vec::new()];
        for (i, &hi) in args.iter().enumerate() {
            let lo = mins[i].min(hi);
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (lo..=hi).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
    }

    let mut text = String::new();
    let mut rows = Vec::new();
    for t in tuples {
        let call = format!(
            "{name}({})",
            t.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
        );
        match eval_bound(calc, name, &t) {
            Ok(values) => {
                let cells: Vec<(String, String)> = values
                    .iter()
                    .map(|(k, v)| (k.clone(), render_value(v, calc.bit_cap)))
                    .collect();
                if cells.len() == 1 && !grid {
                    let _ = writeln!(text, "{}", cells[0].1);
                } else {
                    let row: Vec<String> = cells.iter().map(|(k, v)| format!("{k} {v}")).collect();
                    let _ = writeln!(text, "{call}: {}", row.join("  "));
                }
                let obj: serde_json::Map<String, Value> = cells
                    .into_iter()
                    .map(|(k, v)| (k, Value::String(v)))
                    .collect();
                rows.push(json!({ "args": t, "values": obj }));
            }
            Err(CliError::Core(Error::BoundDomain(msg))) if grid => {
                let _ = writeln!(text, "{call}: undefined ({msg})");
                rows.push(json!({ "args": t, "undefined": msg }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Output::ok(text, json!({ "function": name, "rows": rows })))
}

pub fn patterns_cmd(k: usize) -> CliResult<Output> {
    let classes = enumerate_patterns(k, DEFAULT_PATTERN_CAP)?;
    let mut text = String::new();
    let mut json_classes = Vec::new();
    for class in &classes {
        let _ = writeln!(text, "r = {} ({} patterns)", class.r, class.patterns.len());
        let mut pats = Vec::new();
        for p in &class.patterns {
            let arrows: String = p.arrows.iter().map(|d| d.arrow()).collect();
            let _ = writeln!(
                text,
                "  {arrows:<w$}  <{}, {}>  crossed {} (m_l = {})",
                p.at_first,
                p.at_last,
                p.crossed,
                p.m_l,
                w = k.max(1)
            );
            pats.push(json!({
                "arrows": arrows,
                "r": p.r,
                "l": p.l,
                "m_l": p.m_l,
                "at_first": p.at_first.to_string(),
                "at_last": p.at_last.to_string(),
                "crossed": p.crossed.to_string(),
            }));
        }
        json_classes.push(json!({ "r": class.r, "patterns": pats }));
    }
    let total: usize = classes.iter().map(|c| c.patterns.len()).sum();
    let _ = writeln!(text, "{total} patterns in {} classes", classes.len());
    Ok(Output::ok(text, json!({ "k": k, "classes": json_classes })))
}

pub fn check_cmd(config: &HarnessConfig, suite: Suite) -> Output {
    let report: CheckReport = harness::run(config, suite);
    Output {
        text: report.to_text(),
        json: to_json(&report),
        ok: report.ok(),
    }
}

pub fn example2_cmd(n: u64, limits: &Limits) -> CliResult<(Output, EqualityChain)> {
    let e = example2::build(n, limits)?;
    let report = e.report();
    Ok((
        Output {
            text: report.to_text(),
            json: to_json(&report),
            ok: report.ok(),
        },
        e.chain,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_chain, parse_path, parse_term_doc};

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn reduce_examples() {
        let t = parse_term_doc("(\\x. x) y").unwrap();
        let out = reduce_cmd(&t, Strategy::Leftmost, 1, 0, &lim()).unwrap();
        assert_eq!(out.json["result"], "y");

        let omega = parse_term_doc("(\\x. x x) (\\x. x x)").unwrap();
        let out = reduce_cmd(&omega, Strategy::Random, 10, 0, &lim()).unwrap();
        assert_eq!(out.json["steps"].as_array().unwrap().len(), 10);
        assert_eq!(out.json["status"], "fuel-exhausted");

        let t = parse_term_doc("(\\x. x)((\\y. y) z)").unwrap();
        let out = reduce_cmd(&t, Strategy::GrossKnuth, 1, 0, &lim()).unwrap();
        assert_eq!(out.json["result"], "z");
        assert_eq!(out.json["steps"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn bounds_examples() {
        let calc = BoundCalc::default();
        let run = |name: &str, args: &[&str]| {
            let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            bounds_cmd(&calc, name, &args, false).unwrap().text
        };
        assert_eq!(run("len", &["4", "1"]), "1\n");
        assert_eq!(run("rev", &["4", "1"]), "8\n");
        assert_eq!(run("iter-exp", &["1", "4"]), "65536\n");
        assert_eq!(run("iter-exp", &["1", "5"]).len(), 19729 + 1);
        assert!(run("iter-exp", &["1", "6"]).starts_with("overflow(>2^"));
        assert_eq!(run("cr-eq", &["<-", "4", "4"]), "<0, M_0^{0*}, 1>\n");
        assert!(bounds_cmd(&calc, "nope", &[], false).is_err());
        let v = bounds_cmd(
            &calc,
            "v-size",
            &["2".into(), "2".into(), "1".into()],
            false,
        );
        assert!(matches!(
            v,
            Err(CliError::Core(Error::OrderViolation { .. }))
        ));
        let grid =
            bounds_cmd(&calc, "cr-red", &["1".into(), "3".into(), "1".into()], true).unwrap();
        assert_eq!(grid.json["rows"].as_array().unwrap().len(), 2 * 3);
        assert!(grid.text.contains("bl "));
    }

    #[test]
    fn join_examples() {
        let calc = BoundCalc::default();
        let c = parse_chain("y\n<-\n(\\x. x) y").unwrap();
        let out = join_chain_cmd(&c, JoinMode::Refined, &calc, &lim()).unwrap();
        assert!(out.ok);
        let cert = &out.json["certificates"][0];
        assert_eq!(cert["lengths"]["left"], 0);
        assert_eq!(cert["lengths"]["right"], 1);
        assert_eq!(cert["reduct"], "y");

        let valley = "(\\a. a) ((\\b. b) w)\n->\n(\\b. b) w\n->\nw\n<-\n(\\c. c) w\n<-\n(\\d. d) ((\\c. c) w)";
        let c = parse_chain(valley).unwrap();
        let out = join_chain_cmd(&c, JoinMode::Refined, &calc, &lim()).unwrap();
        assert_eq!(out.json["certificates"][0]["descriptor"], "M_2^{0*}");
        assert_eq!(out.json["certificates"][0]["reduct"], "w");
        assert!(join_chain_cmd(&c, JoinMode::Improved, &calc, &lim()).is_err());

        let left = parse_path(
            "(\\x. x x) ((\\y. y) z)\n->\n(\\y. y) z ((\\y. y) z)",
            &lim(),
        )
        .unwrap();
        let right =
            parse_path("(\\x. x x) ((\\y. y) z)\n->\n(\\x. x x) z\n->\nz z", &lim()).unwrap();
        let out = join_peak_cmd(&left, &right, JoinMode::Main, &calc, &lim()).unwrap();
        assert!(out.ok, "{}", out.text);
        let names: Vec<&str> = out.json["certificates"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["descriptor"].as_str().unwrap())
            .collect();
        assert_eq!(names[..2], ["Q_2^{1*}", "Q_1^{1*}"]);
        let out = join_peak_cmd(&left, &right, JoinMode::Improved, &calc, &lim()).unwrap();
        assert!(out.ok);
    }

    #[test]
    fn patterns_output() {
        let out = patterns_cmd(4).unwrap();
        assert!(out.text.ends_with("16 patterns in 5 classes\n"));
        assert!(patterns_cmd(13).is_err());
    }
}
