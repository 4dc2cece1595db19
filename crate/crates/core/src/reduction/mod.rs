//! Single β-steps, witnessed reduction paths and the Takahashi translation.

mod lift;
mod residual;

pub use lift::{cofinal_step, mono_lift, mono_lift_path, star_subst_path, substitution_path};
pub use residual::{
    count_new_redex_contractions, minimal_complete_development, new_redexes, old_redex_trace,
    residuals, MarkedTerm,
};

use alloc::vec::Vec;

use crate::error::{Cap, Error, Result};
use crate::position::Position;
use crate::term::{Term, TermKind};

/// Guards against divergence: the untyped calculus happily builds terms and
/// paths of tower size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_term_size: u64,
    pub max_path_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_term_size: 1 << 22,
            max_path_len: 1 << 20,
        }
    }
}

impl Limits {
    pub fn check_size(&self, size: u64) -> Result<()> {
        if size > self.max_term_size {
            Err(Error::ResourceCap(Cap::TermSize {
                size,
                cap: self.max_term_size,
            }))
        } else {
            Ok(())
        }
    }

    pub fn check_term(&self, t: &Term) -> Result<()> {
        self.check_size(t.size())
    }

    pub fn check_len(&self, length: usize) -> Result<()> {
        if length > self.max_path_len {
            Err(Error::ResourceCap(Cap::PathLength {
                length,
                cap: self.max_path_len,
            }))
        } else {
            Ok(())
        }
    }
}

/// One contraction `source → target` of the redex at `redex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub source: Term,
    pub redex: Position,
    pub target: Term,
}

/// Contracts the redex of `t` at `p`.
pub fn contract(t: &Term, p: &Position) -> Result<Step> {
    let sub = t
        .subterm(p)
        .ok_or_else(|| Error::InvalidPosition(p.clone()))?;
    let contractum = match sub.kind() {
        TermKind::App(f, a) => match f.kind() {
            TermKind::Lam(_, body) => body.instantiate(a),
            _ => return Err(Error::NotARedex(p.clone())),
        },
        _ => return Err(Error::NotARedex(p.clone())),
    };
    let target = t
        .replace_at(p, contractum)
        .ok_or_else(|| Error::InvalidPosition(p.clone()))?;
    Ok(Step {
        source: t.clone(),
        redex: p.clone(),
        target,
    })
}

/// `M ↠ⁿ N` as the list of its steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPath {
    start: Term,
    steps: Vec<Step>,
}

impl ReductionPath {
    pub fn empty(start: Term) -> Self {
        ReductionPath {
            start,
            steps: Vec::new(),
        }
    }

    /// Replays `positions` from `start`, checking every intermediate term
    /// against `limits`.
    pub fn from_positions<'a>(
        start: Term,
        positions: impl IntoIterator<Item = &'a Position>,
        limits: &Limits,
    ) -> Result<Self> {
        let mut path = ReductionPath::empty(start);
        for p in positions {
            path.contract_at(p, limits)?;
        }
        Ok(path)
    }

    pub fn start(&self) -> &Term {
        &self.start
    }

    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.target)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.steps.iter().map(|s| &s.redex)
    }

    /// `[M₀, M₁, …, Mₙ]`.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        core::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.target))
    }

    /// Extends the path by contracting the redex at `p` in its last term.
    pub fn contract_at(&mut self, p: &Position, limits: &Limits) -> Result<()> {
        limits.check_len(self.steps.len() + 1)?;
        let step = contract(self.end(), p)?;
        limits.check_term(&step.target)?;
        self.steps.push(step);
        Ok(())
    }

    pub fn push(&mut self, step: Step) -> Result<()> {
        if step.source != *self.end() {
            return Err(Error::BrokenPath {
                index: self.steps.len(),
            });
        }
        self.steps.push(step);
        Ok(())
    }

    /// Concatenates `other`, which must start where `self` ends.
    pub fn append(&mut self, other: ReductionPath, limits: &Limits) -> Result<()> {
        if other.start != *self.end() {
            return Err(Error::BrokenPath {
                index: self.steps.len(),
            });
        }
        limits.check_len(self.steps.len() + other.steps.len())?;
        self.steps.extend(other.steps);
        Ok(())
    }

    /// Re-executes every contraction and checks that the steps are chained.
    pub fn validate(&self) -> Result<()> {
        let mut cur = &self.start;
        for (index, step) in self.steps.iter().enumerate() {
            if step.source != *cur {
                return Err(Error::BrokenPath { index });
            }
            let replayed = contract(&step.source, &step.redex)?;
            if replayed.target != step.target {
                return Err(Error::BrokenPath { index });
            }
            cur = &step.target;
        }
        Ok(())
    }
}

/// `M*`: contracts every redex of `M` simultaneously, inside out.
///
/// Unbounded; see [`star_checked`] for the capped variant.
pub fn takahashi_star(t: &Term) -> Term {
    let unlimited = Limits {
        max_term_size: u64::MAX,
        max_path_len: usize::MAX,
    };
    star_checked(t, &unlimited).expect("unbounded star cannot hit a cap")
}

/// `M*`, failing with a resource cap instead of building an oversized term.
pub fn star_checked(t: &Term, limits: &Limits) -> Result<Term> {
    limits.check_term(t)?;
    star_rec(t, limits)
}

fn star_rec(t: &Term, limits: &Limits) -> Result<Term> {
    let out = match t.kind() {
        TermKind::Free(_) | TermKind::Bound(_) => return Ok(t.clone()),
        TermKind::Lam(hint, body) => Term::abs(hint.clone(), star_rec(body, limits)?),
        TermKind::App(f, a) => match f.kind() {
            TermKind::Lam(_, body) => {
                let body = star_rec(body, limits)?;
                let arg = star_rec(a, limits)?;
                let copies = body.binder_occurrences();
                let predicted = body
                    .size()
                    .saturating_add(copies.saturating_mul(arg.size() - 1));
                limits.check_size(predicted)?;
                body.instantiate(&arg)
            }
            _ => Term::app(star_rec(f, limits)?, star_rec(a, limits)?),
        },
    };
    limits.check_term(&out)?;
    Ok(out)
}

/// `M^{n*}`.
pub fn star_iter(t: &Term, n: usize, limits: &Limits) -> Result<Term> {
    let mut cur = t.clone();
    for _ in 0..n {
        cur = star_checked(&cur, limits)?;
    }
    Ok(cur)
}

/// `M ↠ M*` as the minimal complete development of all redexes of `M`.
pub fn gross_knuth_path(t: &Term, limits: &Limits) -> Result<ReductionPath> {
    minimal_complete_development(&MarkedTerm::all_redexes(t.clone()), limits)
}

/// `M ↠ M^{n*}` by chaining `n` Gross-Knuth macro-steps.
pub fn gross_knuth_iter(t: &Term, n: usize, limits: &Limits) -> Result<ReductionPath> {
    let mut path = ReductionPath::empty(t.clone());
    for _ in 0..n {
        let next = gross_knuth_path(path.end(), limits)?;
        path.append(next, limits)?;
    }
    Ok(path)
}

/// The leftmost-outermost redex, if any.
pub fn leftmost_redex(t: &Term) -> Option<Position> {
    // Preorder is lexicographic order, so the least redex is leftmost-outermost.
    t.redexes().into_iter().next()
}

/// The least redex containing no other redex.
pub fn leftmost_innermost_redex(t: &Term) -> Option<Position> {
    t.redexes().least_minimal().cloned()
}
