//! Text formats: term files, line-based chain documents and join
//! certificates in text or JSON form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crjoin_core::bounds::BoundValue;
use crjoin_core::reduction::{Limits, ReductionPath};
use crjoin_core::{
    parse_term, print_term, Direction, EqualityChain, Error, JoinCertificate, Position, Term,
};

use crate::error::{CliError, CliResult};

/// A whole document holding one term. Surrounding blank space is ignored.
pub fn parse_term_doc(text: &str) -> CliResult<Term> {
    parse_term(text).map_err(|e| CliError::syntax(0, e))
}

fn doc_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    lines
}

/// Odd lines are terms, even lines are `->` or `<-`. Each link's witness is
/// the least redex of its arrow source that contracts to the arrow target.
pub fn parse_chain(text: &str) -> CliResult<EqualityChain> {
    let lines = doc_lines(text);
    if lines.is_empty() {
        return Err(CliError::Syntax {
            line: 1,
            column: 1,
            message: "empty chain document".into(),
        });
    }
    if lines.len().is_multiple_of(2) {
        return Err(CliError::Syntax {
            line: lines.len(),
            column: 1,
            message: "a chain document must end with a term".into(),
        });
    }
    let mut terms = Vec::with_capacity(lines.len() / 2 + 1);
    let mut arrows = Vec::with_capacity(lines.len() / 2);
    for (i, line) in lines.iter().enumerate() {
        if i % 2 == 0 {
            terms.push(parse_term(line).map_err(|e| CliError::syntax(i, e))?);
        } else {
            let dir = Direction::from_token(line).ok_or_else(|| CliError::Syntax {
                line: i + 1,
                column: 1,
                message: format!("expected \"->\" or \"<-\", found {line:?}"),
            })?;
            arrows.push(dir);
        }
    }
    EqualityChain::infer(terms, &arrows).map_err(|e| match e {
        Error::LinkInvalid { index } => CliError::Link {
            line: 2 * index + 2,
            source: e,
        },
        e => e.into(),
    })
}

/// A forward path written as a chain document with only `->` arrows.
pub fn parse_path(text: &str, limits: &Limits) -> CliResult<ReductionPath> {
    let chain = parse_chain(text)?;
    if let Some(i) = chain.arrows().position(|d| d == Direction::Left) {
        return Err(CliError::Syntax {
            line: 2 * i + 2,
            column: 1,
            message: "a path document may only contain \"->\"".into(),
        });
    }
    let witnesses: Vec<Position> = chain.links().iter().map(|l| l.witness.clone()).collect();
    Ok(ReductionPath::from_positions(
        chain.first().clone(),
        &witnesses,
        limits,
    )?)
}

pub fn emit_chain(c: &EqualityChain) -> String {
    let mut out = String::new();
    for (i, t) in c.terms().iter().enumerate() {
        if i > 0 {
            out.push_str(c.links()[i - 1].direction.token());
            out.push('\n');
        }
        out.push_str(&print_term(t));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub source: String,
    pub position: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lengths {
    pub left: usize,
    pub right: usize,
}

/// One comparison of a path length against a bound function's value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: String,
    pub side: String,
    pub actual: u64,
    pub value: String,
    pub ok: bool,
}

impl BoundCheck {
    pub fn new(bound: impl Into<String>, side: &str, actual: usize, value: &BoundValue) -> Self {
        BoundCheck {
            bound: bound.into(),
            side: side.into(),
            actual: actual as u64,
            value: render_bound(value),
            ok: value.admits(actual as u64),
        }
    }
}

pub fn render_bound(v: &BoundValue) -> String {
    match v {
        BoundValue::Overflow => "overflow".into(),
        v => v.to_string(),
    }
}

/// The serialized form of a [`JoinCertificate`]. An empty path starts at the
/// reduct, so no separate start terms are stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub descriptor: String,
    pub reduct: String,
    pub left_steps: Vec<StepDoc>,
    pub right_steps: Vec<StepDoc>,
    pub lengths: Lengths,
    pub bound_checks: Vec<BoundCheck>,
}

fn step_docs(p: &ReductionPath) -> Vec<StepDoc> {
    p.steps()
        .iter()
        .map(|s| StepDoc {
            source: print_term(&s.source),
            position: s.redex.to_string(),
            target: print_term(&s.target),
        })
        .collect()
}

impl CertificateDoc {
    pub fn new(cert: &JoinCertificate, bound_checks: Vec<BoundCheck>) -> Self {
        CertificateDoc {
            descriptor: cert.descriptor.to_string(),
            reduct: print_term(&cert.reduct),
            left_steps: step_docs(&cert.left),
            right_steps: step_docs(&cert.right),
            lengths: Lengths {
                left: cert.left.len(),
                right: cert.right.len(),
            },
            bound_checks,
        }
    }

    pub fn checks_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.ok)
    }

    /// Re-executes every contraction and checks that both paths end at the
    /// stated reduct. Returns the two replayed paths.
    pub fn replay(&self, limits: &Limits) -> CliResult<(ReductionPath, ReductionPath)> {
        let reduct =
            parse_term(&self.reduct).map_err(|e| CliError::Certificate(format!("reduct: {e}")))?;
        let left = replay_steps("left", &self.left_steps, &reduct, limits)?;
        let right = replay_steps("right", &self.right_steps, &reduct, limits)?;
        if left.len() != self.lengths.left || right.len() != self.lengths.right {
            return Err(CliError::Certificate(
                "lengths disagree with the step lists".into(),
            ));
        }
        Ok((left, right))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "join at {}", self.descriptor);
        let _ = writeln!(out, "reduct: {}", self.reduct);
        for (name, steps) in [("left", &self.left_steps), ("right", &self.right_steps)] {
            if steps.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{name} path ({} steps):", steps.len());
            for s in steps {
                let _ = writeln!(out, "  {} -[{}]-> {}", s.source, s.position, s.target);
            }
        }
        for c in &self.bound_checks {
            let verdict = if c.ok { "ok" } else { "FAIL" };
            let _ = writeln!(
                out,
                "bound {} ({}): {} <= {} {verdict}",
                c.bound, c.side, c.actual, c.value
            );
        }
        out
    }
}

/// One certificate, or the `{"certificates": [...]}` document `join` emits.
pub fn parse_certificates(text: &str) -> CliResult<Vec<CertificateDoc>> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Certificate(e.to_string()))?;
    let parsed = match v.get("certificates") {
        Some(list) => serde_json::from_value(list.clone()),
        None => serde_json::from_value(v).map(|d| vec![d]),
    };
    parsed.map_err(|e| CliError::Certificate(e.to_string()))
}

fn replay_steps(
    side: &str,
    steps: &[StepDoc],
    reduct: &Term,
    limits: &Limits,
) -> CliResult<ReductionPath> {
    let bad = |i: usize, what: String| CliError::Certificate(format!("{side} step {i}: {what}"));
    let start = match steps.first() {
        Some(s) => parse_term(&s.source).map_err(|e| bad(0, e.to_string()))?,
        None => reduct.clone(),
    };
    let mut path = ReductionPath::empty(start);
    for (i, s) in steps.iter().enumerate() {
        let source = parse_term(&s.source).map_err(|e| bad(i, e.to_string()))?;
        if source != *path.end() {
            return Err(bad(i, "source does not continue the path".into()));
        }
        let pos: Position = s
            .position
            .parse()
            .map_err(|_| bad(i, format!("bad position {:?}", s.position)))?;
        path.contract_at(&pos, limits)?;
        let target = parse_term(&s.target).map_err(|e| bad(i, e.to_string()))?;
        if target != *path.end() {
            return Err(bad(i, "contraction does not give the stated target".into()));
        }
    }
    if path.end() != reduct {
        return Err(CliError::Certificate(format!(
            "{side} path misses the reduct"
        )));
    }
    Ok(path)
}
