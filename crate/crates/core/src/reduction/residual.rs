//! Residual tracing and developments.

use alloc::vec::Vec;

use super::{contract, Limits, ReductionPath, Step};
use crate::error::{Error, Result};
use crate::position::{Dir, Position};
use crate::term::{RedexSet, Term};

/// A term together with a set of marked redexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedTerm {
    term: Term,
    marks: RedexSet,
}

impl MarkedTerm {
    /// Fails with `NotARedex` on the first mark that is not a redex of `term`.
    pub fn new(term: Term, marks: RedexSet) -> Result<Self> {
        if let Some(bad) = marks
            .iter()
            .find(|p| !term.subterm(p).is_some_and(Term::is_redex))
        {
            return Err(Error::NotARedex(bad.clone()));
        }
        Ok(MarkedTerm { term, marks })
    }

    pub fn all_redexes(term: Term) -> Self {
        let marks = term.redexes();
        MarkedTerm { term, marks }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn marks(&self) -> &RedexSet {
        &self.marks
    }

    /// Contracts `r` and carries the marks over to the contractum.
    pub fn contract(&self, r: &Position) -> Result<(Step, MarkedTerm)> {
        let step = contract(&self.term, r)?;
        let marks = residuals(self, r)?;
        let next = MarkedTerm {
            term: step.target.clone(),
            marks,
        };
        Ok((step, next))
    }
}

/// The residuals of the marks of `marked` after contracting the redex at `r`.
///
/// `r` itself need not be marked.
pub fn residuals(marked: &MarkedTerm, r: &Position) -> Result<RedexSet> {
    let redex = marked
        .term
        .subterm(r)
        .ok_or_else(|| Error::InvalidPosition(r.clone()))?;
    let Some((fun, _)) = redex.as_app().filter(|_| redex.is_redex()) else {
        return Err(Error::NotARedex(r.clone()));
    };
    let body = fun
        .as_lam()
        .map(|(_, b)| b)
        .expect("redex head is an abstraction");
    let depth = r.depth();
    // computed lazily: only marks inside the argument need them
    let mut copies: Option<Vec<Position>> = None;
    let mut out = RedexSet::new();
    for s in marked.marks.iter() {
        if !r.is_prefix_of(s) {
            // disjoint from r, or enclosing it
            out.insert(s.clone());
            continue;
        }
        let rest = &s.dirs()[depth..];
        match rest {
            [] => {}
            [Dir::Fun, Dir::Body, t @ ..] => {
                let mut dirs = r.dirs().to_vec();
                dirs.extend_from_slice(t);
                out.insert(Position::from(dirs));
            }
            [Dir::Arg, t @ ..] => {
                let occ = copies.get_or_insert_with(|| body.binder_positions());
                for o in occ.iter() {
                    let mut dirs = r.dirs().to_vec();
                    dirs.extend_from_slice(o.dirs());
                    dirs.extend_from_slice(t);
                    out.insert(Position::from(dirs));
                }
            }
            // r·Fun is the abstraction itself, never a redex
            _ => return Err(Error::NotARedex(s.clone())),
        }
    }
    Ok(out)
}

/// Contracts the least minimal mark until no marks remain.
pub fn minimal_complete_development(marked: &MarkedTerm, limits: &Limits) -> Result<ReductionPath> {
    let mut path = ReductionPath::empty(marked.term.clone());
    let mut cur = marked.clone();
    while let Some(r) = cur.marks.least_minimal().cloned() {
        let (step, next) = cur.contract(&r)?;
        limits.check_len(path.len() + 1)?;
        limits.check_term(&step.target)?;
        path.push(step)?;
        cur = next;
    }
    Ok(path)
}

/// Redexes of the target of `s` that are not residuals of redexes of its source.
pub fn new_redexes(s: &Step) -> Result<RedexSet> {
    let old = residuals(&MarkedTerm::all_redexes(s.source.clone()), &s.redex)?;
    Ok(s.target
        .redexes()
        .into_iter()
        .filter(|p| !old.contains(p))
        .collect())
}

/// `OLD₀ … OLDₙ`: the residuals in each term of the path of the redexes of its
/// first term.
pub fn old_redex_trace(p: &ReductionPath) -> Result<Vec<RedexSet>> {
    let mut cur = MarkedTerm::all_redexes(p.start().clone());
    let mut out = Vec::with_capacity(p.len() + 1);
    for step in p.steps() {
        let next = residuals(&cur, &step.redex)?;
        out.push(core::mem::replace(&mut cur.marks, next));
        cur.term = step.target.clone();
    }
    out.push(cur.marks);
    Ok(out)
}

/// Number of steps of `p` contracting a redex that is not a residual of a
/// redex of the first term.
pub fn count_new_redex_contractions(p: &ReductionPath) -> Result<usize> {
    let old = old_redex_trace(p)?;
    Ok(p.steps()
        .iter()
        .zip(&old)
        .filter(|(step, set)| !set.contains(&step.redex))
        .count())
}
