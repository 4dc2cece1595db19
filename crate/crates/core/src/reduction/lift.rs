//! Path builders around the Takahashi translation: the cofinal step, the
//! substitution lemma paths and monotone lifting `M → N ⇒ M* ↠ N*`.
//!
//! Builders first compute a list of redex positions and then replay it from
//! the expected source, so every returned path is checked step by step and
//! its endpoint is compared with the expected target.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    minimal_complete_development, residuals, star_checked, Limits, MarkedTerm, ReductionPath, Step,
};
use crate::error::{Error, Result};
use crate::position::{Dir, Position};
use crate::term::{Term, TermKind};

/// `N ↠ M*` for a step `M → N`, as the minimal complete development of the
/// residuals of all redexes of `M`.
pub fn cofinal_step(s: &Step, limits: &Limits) -> Result<ReductionPath> {
    let res = residuals(&MarkedTerm::all_redexes(s.source.clone()), &s.redex)?;
    let marked = MarkedTerm::new(s.target.clone(), res)?;
    let path = minimal_complete_development(&marked, limits)?;
    let star = star_checked(&s.source, limits)?;
    expect_end(&path, &star, "cofinal step")?;
    Ok(path)
}

/// `M₁[x:=M₂] ↠ N₁[x:=N₂]` from `p1: M₁ ↠ N₁` and `p2: M₂ ↠ N₂`.
///
/// The copies of `M₂` are reduced first, left to right, and then `p1` is
/// replayed, so the length is exactly `|p1| + occ(x, M₁)·|p2|`.
pub fn substitution_path(
    p1: &ReductionPath,
    x: &str,
    p2: &ReductionPath,
    limits: &Limits,
) -> Result<ReductionPath> {
    let mut positions = Vec::new();
    for o in p1.start().free_positions(x) {
        positions.extend(p2.positions().map(|q| q.under(&o)));
        limits.check_len(positions.len())?;
    }
    positions.extend(p1.positions().cloned());
    limits.check_len(positions.len())?;
    let start = p1.start().substitute(x, p2.start());
    let path = ReductionPath::from_positions(start, &positions, limits)?;
    expect_end(
        &path,
        &p1.end().substitute(x, p2.end()),
        "substitution path",
    )?;
    Ok(path)
}

/// `M*[x:=N*] ↠ (M[x:=N])*`.
pub fn star_subst_path(m: &Term, x: &str, n: &Term, limits: &Limits) -> Result<ReductionPath> {
    let mut b = Builder::new(limits);
    let positions = b.star_subst(m, x, n)?;
    let m_star = b.star(m)?;
    let n_star = b.star(n)?;
    let start = m_star.substitute(x, &n_star);
    let path = ReductionPath::from_positions(start, &positions, limits)?;
    let target = b.star(&m.substitute(x, n))?;
    expect_end(&path, &target, "star substitution path")?;
    Ok(path)
}

/// `M* ↠ N*` for a step `M → N`.
pub fn mono_lift(s: &Step, limits: &Limits) -> Result<ReductionPath> {
    let mut b = Builder::new(limits);
    let positions = b.lift(&s.source, s.redex.dirs())?;
    let start = b.star(&s.source)?;
    let path = ReductionPath::from_positions(start, &positions, limits)?;
    let target = b.star(&s.target)?;
    expect_end(&path, &target, "monotone lift")?;
    Ok(path)
}

/// `M^{n*} ↠ N^{n*}` for a path `M ↠ N`, lifting one level at a time.
pub fn mono_lift_path(p: &ReductionPath, n: usize, limits: &Limits) -> Result<ReductionPath> {
    let mut cur = p.clone();
    for _ in 0..n {
        let start = star_checked(cur.start(), limits)?;
        let mut next = ReductionPath::empty(start);
        for step in cur.steps() {
            next.append(mono_lift(step, limits)?, limits)?;
        }
        cur = next;
    }
    Ok(cur)
}

fn expect_end(path: &ReductionPath, expected: &Term, what: &str) -> Result<()> {
    if path.end() == expected {
        Ok(())
    } else {
        Err(Error::Replay(format!(
            "{what} ends at {} instead of {expected}",
            path.end()
        )))
    }
}

fn prefixed(dir: Dir, positions: Vec<Position>) -> Vec<Position> {
    let prefix = Position::from_dirs([dir]);
    positions.into_iter().map(|p| p.under(&prefix)).collect()
}

/// Replays `positions` once inside every occurrence, in `host`, of the
/// variable bound by the abstraction whose body is `host`.
fn at_binder_copies(host: &Term, positions: &[Position]) -> Vec<Position> {
    let mut out = Vec::new();
    if positions.is_empty() {
        return out;
    }
    for o in host.binder_positions() {
        out.extend(positions.iter().map(|q| q.under(&o)));
    }
    out
}

struct Builder<'a> {
    limits: &'a Limits,
    fresh: usize,
}

impl<'a> Builder<'a> {
    fn new(limits: &'a Limits) -> Self {
        Builder { limits, fresh: 0 }
    }

    fn star(&self, t: &Term) -> Result<Term> {
        star_checked(t, self.limits)
    }

    fn check(&self, positions: &[Position]) -> Result<()> {
        self.limits.check_len(positions.len())
    }

    /// A name that cannot come from the parser and is not free in `t`.
    fn fresh_name(&mut self, t: &Term) -> String {
        let free = t.free_vars();
        loop {
            let name = format!("%{}", self.fresh);
            self.fresh += 1;
            if !free.iter().any(|f| **f == *name) {
                return name;
            }
        }
    }

    /// Positions of `M*[x:=N*] ↠ (M[x:=N])*`, following the structure of `M`.
    fn star_subst(&mut self, m: &Term, x: &str, n: &Term) -> Result<Vec<Position>> {
        let out = match m.kind() {
            TermKind::Free(_) | TermKind::Bound(_) => Vec::new(),
            TermKind::Lam(_, body) => {
                prefixed(Dir::Body, self.star_subst(body, x, &n.shift(0, 1))?)
            }
            TermKind::App(f, a) => match f.kind() {
                TermKind::Lam(_, p) => {
                    // (λ.P*[x:=N*]) applied to A*[x:=N*]: first bring every
                    // copy of A to (A[x:=N])*, then the body.
                    let n_up = n.shift(0, 1);
                    let host = self.star(p)?.substitute(x, &self.star(&n_up)?);
                    let arg_path = self.star_subst(a, x, n)?;
                    let mut out = at_binder_copies(&host, &arg_path);
                    self.check(&out)?;
                    out.extend(self.star_subst(p, x, &n_up)?);
                    out
                }
                _ => {
                    let mut out = prefixed(Dir::Fun, self.star_subst(f, x, n)?);
                    out.extend(prefixed(Dir::Arg, self.star_subst(a, x, n)?));
                    // x N' becomes a redex once N is an abstraction
                    if matches!(f.kind(), TermKind::Free(y) if &**y == x) && n.is_lam() {
                        out.push(Position::root());
                    }
                    out
                }
            },
        };
        self.check(&out)?;
        Ok(out)
    }

    /// Positions of `M* ↠ N*` where `N` is `M` contracted at `p`.
    fn lift(&mut self, m: &Term, p: &[Dir]) -> Result<Vec<Position>> {
        let out = match (p.split_first(), m.kind()) {
            (None, TermKind::App(f, q)) => {
                let Some((_, body)) = f.as_lam() else {
                    return Err(Error::NotARedex(Position::root()));
                };
                let z = self.fresh_name(m);
                self.star_subst(&body.open(&z), &z, q)?
            }
            (Some((Dir::Body, rest)), TermKind::Lam(_, body)) => {
                prefixed(Dir::Body, self.lift(body, rest)?)
            }
            (Some((Dir::Arg, rest)), TermKind::App(f, a)) => match f.as_lam() {
                Some((_, body)) => {
                    let inner = self.lift(a, rest)?;
                    at_binder_copies(&self.star(body)?, &inner)
                }
                None => prefixed(Dir::Arg, self.lift(a, rest)?),
            },
            (Some((Dir::Fun, rest)), TermKind::App(f, _)) => match (f.as_lam(), rest) {
                (Some((_, body)), [Dir::Body, inner @ ..]) => self.lift(body, inner)?,
                (Some(_), _) => {
                    return Err(Error::NotARedex(Position::from_dirs(p.iter().copied())))
                }
                (None, _) => {
                    let mut out = prefixed(Dir::Fun, self.lift(f, rest)?);
                    let reduced = super::contract(f, &Position::from_dirs(rest.iter().copied()))?;
                    if reduced.target.is_lam() {
                        out.push(Position::root());
                    }
                    out
                }
            },
            _ => {
                return Err(Error::InvalidPosition(Position::from_dirs(
                    p.iter().copied(),
                )))
            }
        };
        self.check(&out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{contract, takahashi_star};
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn step(s: &str, dirs: &[Dir]) -> Step {
        contract(&t(s), &Position::from_dirs(dirs.iter().copied())).unwrap()
    }

    const OMEGA: &str = "(\\x. x x) (\\x. x x)";

    #[test]
    fn cofinal_examples() {
        let lim = Limits::default();
        let p = cofinal_step(&step("(\\x. x) y", &[]), &lim).unwrap();
        assert!(p.is_empty());
        let p = cofinal_step(&step("(\\x. x x) ((\\y. y) z)", &[Dir::Arg]), &lim).unwrap();
        assert!(p.len() <= 2);
        assert_eq!(*p.end(), t("z z"));
        let p = cofinal_step(&step(OMEGA, &[]), &lim).unwrap();
        assert_eq!((p.len(), p.end().clone()), (0, t(OMEGA)));
    }

    #[test]
    fn star_subst_examples() {
        let lim = Limits::default();
        assert!(star_subst_path(&t("x"), "x", &t("(\\a. a) b"), &lim)
            .unwrap()
            .is_empty());
        assert!(star_subst_path(&t("\\y. y"), "x", &t("(\\a. a) b"), &lim)
            .unwrap()
            .is_empty());
        let p = star_subst_path(&t("(\\y. y) x"), "x", &t("(\\z. z) w"), &lim).unwrap();
        assert!(p.is_empty());
        assert_eq!(*p.end(), t("w"));
        // the substituted head creates a redex that * of the source misses
        let p = star_subst_path(&t("x a"), "x", &t("\\y. y y"), &lim).unwrap();
        assert_eq!((p.len(), p.end().clone()), (1, t("a a")));
    }

    #[test]
    fn mono_examples() {
        let lim = Limits::default();
        assert!(mono_lift(&step("(\\x. x) y", &[]), &lim)
            .unwrap()
            .is_empty());
        let p = mono_lift(&step(OMEGA, &[]), &lim).unwrap();
        assert_eq!(*p.end(), t(OMEGA));
        let p = mono_lift(&step("(\\x. x x) ((\\y. y) z)", &[]), &lim).unwrap();
        assert!(p.is_empty());
        assert_eq!(*p.end(), t("z z"));
    }

    #[test]
    fn mono_lift_creates_head_redex() {
        let lim = Limits::default();
        // (λx.λy.x) b reduces to an abstraction in head position
        let s = step("(\\f. f c) ((\\x. \\y. x) b) d", &[Dir::Fun, Dir::Arg]);
        let p = mono_lift(&s, &lim).unwrap();
        assert_eq!(*p.start(), takahashi_star(&s.source));
        assert_eq!(*p.end(), takahashi_star(&s.target));
        let s = step("((\\x. \\y. x) b) d e", &[Dir::Fun, Dir::Fun]);
        let p = mono_lift(&s, &lim).unwrap();
        assert_eq!(*p.end(), takahashi_star(&s.target));
    }

    #[test]
    fn lifting_paths() {
        let lim = Limits::default();
        let empty = ReductionPath::empty(t("(\\x. x) y"));
        assert!(mono_lift_path(&empty, 3, &lim).unwrap().is_empty());
        let m = t("(\\x. x) ((\\y. y) z)");
        let p =
            ReductionPath::from_positions(m.clone(), &[Position::root(), Position::root()], &lim)
                .unwrap();
        let lifted = mono_lift_path(&p, 1, &lim).unwrap();
        assert_eq!(*lifted.start(), takahashi_star(&m));
        assert_eq!(*lifted.end(), t("z"));
        assert!(lifted.len() as u64 <= 2 * (takahashi_star(&m).size() - 1));
    }

    #[test]
    fn substitution_schedule_length() {
        let lim = Limits::default();
        let p1 =
            ReductionPath::from_positions(t("(\\a. a) (x x)"), &[Position::root()], &lim).unwrap();
        let p2 = ReductionPath::from_positions(t("(\\b. b) c"), &[Position::root()], &lim).unwrap();
        let p = substitution_path(&p1, "x", &p2, &lim).unwrap();
        assert_eq!(p.len(), 1 + 2);
        assert_eq!(*p.end(), t("c c"));
    }
}
