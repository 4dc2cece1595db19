//! λ-terms in locally nameless form.
//!
//! Free variables carry names; bound variables are de Bruijn indices. Binder
//! names survive only as printing hints and are ignored by equality, so `==`
//! on [`Term`] is α-equivalence. Nodes are reference counted and immutable,
//! and each caches its size, its loose-index range, and a structural hash.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::position::{Dir, Position};

pub type Name = Arc<str>;

#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: TermKind,
    size: u64,
    /// One more than the largest index pointing outside this subterm; 0 if none.
    loose: u32,
    hash: u64,
}

#[derive(Clone)]
pub enum TermKind {
    Free(Name),
    Bound(u32),
    /// Binder name hint and body; index 0 in the body refers to this binder.
    Lam(Name, Term),
    App(Term, Term),
}

const fn mix(a: u64, b: u64) -> u64 {
    // splitmix64 finaliser over a combined word
    let mut z = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn str_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl Term {
    fn make(kind: TermKind) -> Term {
        let (size, loose, hash) = match &kind {
            TermKind::Free(name) => (1, 0, mix(1, str_hash(name))),
            TermKind::Bound(i) => (1, i + 1, mix(2, u64::from(*i))),
            TermKind::Lam(_, body) => (
                body.size().saturating_add(1),
                body.0.loose.saturating_sub(1),
                mix(3, body.0.hash),
            ),
            TermKind::App(f, a) => (
                f.size().saturating_add(a.size()).saturating_add(1),
                f.0.loose.max(a.0.loose),
                mix(4, mix(f.0.hash, a.0.hash)),
            ),
        };
        Term(Arc::new(Node {
            kind,
            size,
            loose,
            hash,
        }))
    }

    /// A free variable.
    pub fn var(name: &str) -> Term {
        Term::free(Name::from(name))
    }

    pub fn free(name: Name) -> Term {
        Term::make(TermKind::Free(name))
    }

    pub fn bound(index: u32) -> Term {
        Term::make(TermKind::Bound(index))
    }

    /// `λbinder. body`, binding the free occurrences of `binder` in `body`.
    pub fn lam(binder: &str, body: Term) -> Term {
        let name = Name::from(binder);
        let closed = body.close(&name, 0);
        Term::abs(name, closed)
    }

    /// An abstraction over a body already in de Bruijn form.
    pub fn abs(hint: Name, body: Term) -> Term {
        Term::make(TermKind::Lam(hint, body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::make(TermKind::App(fun, arg))
    }

    /// Left-nested application `f a₁ … aₙ`.
    pub fn apps(fun: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(fun, Term::app)
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Number of nodes: variables count 1, abstractions and applications add 1.
    /// Saturates at `u64::MAX` for heavily shared terms.
    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// True when no de Bruijn index escapes this term.
    pub fn is_locally_closed(&self) -> bool {
        self.0.loose == 0
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn as_lam(&self) -> Option<(&Name, &Term)> {
        match self.kind() {
            TermKind::Lam(name, body) => Some((name, body)),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<(&Term, &Term)> {
        match self.kind() {
            TermKind::App(f, a) => Some((f, a)),
            _ => None,
        }
    }

    pub fn is_lam(&self) -> bool {
        self.as_lam().is_some()
    }

    /// Whether this node has the shape `(λx.P) Q`.
    pub fn is_redex(&self) -> bool {
        matches!(self.as_app(), Some((f, _)) if f.is_lam())
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self == other
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for dir in pos.dirs() {
            cur = match (dir, cur.kind()) {
                (Dir::Fun, TermKind::App(f, _)) => f,
                (Dir::Arg, TermKind::App(_, a)) => a,
                (Dir::Body, TermKind::Lam(_, b)) => b,
                _ => return None,
            };
        }
        Some(cur)
    }

    pub fn is_valid_position(&self, pos: &Position) -> bool {
        self.subterm(pos).is_some()
    }

    /// A copy of `self` with the subterm at `pos` replaced by `new`.
    ///
    /// `new` lives in the binder context of `pos`; no shifting happens.
    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<Term> {
        self.replace_rec(pos.dirs(), new)
    }

    fn replace_rec(&self, dirs: &[Dir], new: Term) -> Option<Term> {
        let Some((first, rest)) = dirs.split_first() else {
            return Some(new);
        };
        match (first, self.kind()) {
            (Dir::Fun, TermKind::App(f, a)) => {
                Some(Term::app(f.replace_rec(rest, new)?, a.clone()))
            }
            (Dir::Arg, TermKind::App(f, a)) => {
                Some(Term::app(f.clone(), a.replace_rec(rest, new)?))
            }
            (Dir::Body, TermKind::Lam(n, b)) => {
                Some(Term::abs(n.clone(), b.replace_rec(rest, new)?))
            }
            _ => None,
        }
    }

    /// Adds `by` to every index at or above `cutoff`.
    pub(crate) fn shift(&self, cutoff: u32, by: u32) -> Term {
        if by == 0 || self.0.loose <= cutoff {
            return self.clone();
        }
        match self.kind() {
            TermKind::Free(_) => self.clone(),
            TermKind::Bound(i) => Term::bound(i + by),
            TermKind::Lam(n, b) => Term::abs(n.clone(), b.shift(cutoff + 1, by)),
            TermKind::App(f, a) => Term::app(f.shift(cutoff, by), a.shift(cutoff, by)),
        }
    }

    /// Replaces index `depth` (counted from this node) by `arg`, which lives
    /// `depth` binders further out, and lowers the indices above it.
    fn subst_bound(&self, depth: u32, arg: &Term) -> Term {
        if self.0.loose <= depth {
            return self.clone();
        }
        match self.kind() {
            TermKind::Free(_) => self.clone(),
            TermKind::Bound(i) => {
                if *i == depth {
                    arg.shift(0, depth)
                } else {
                    Term::bound(i - 1)
                }
            }
            TermKind::Lam(n, b) => Term::abs(n.clone(), b.subst_bound(depth + 1, arg)),
            TermKind::App(f, a) => Term::app(f.subst_bound(depth, arg), a.subst_bound(depth, arg)),
        }
    }

    /// `body[0 := arg]` for the body of an abstraction: the contractum of
    /// `(λ. body) arg`.
    pub fn instantiate(&self, arg: &Term) -> Term {
        self.subst_bound(0, arg)
    }

    /// Turns index 0 of an abstraction body into the free variable `name`.
    pub fn open(&self, name: &str) -> Term {
        self.instantiate(&Term::var(name))
    }

    fn close(&self, name: &Name, depth: u32) -> Term {
        match self.kind() {
            TermKind::Free(x) if x == name => Term::bound(depth),
            TermKind::Free(_) => self.clone(),
            TermKind::Bound(i) => {
                if *i >= depth {
                    Term::bound(i + 1)
                } else {
                    self.clone()
                }
            }
            TermKind::Lam(n, b) => Term::abs(n.clone(), b.close(name, depth + 1)),
            TermKind::App(f, a) => Term::app(f.close(name, depth), a.close(name, depth)),
        }
    }

    /// Capture-avoiding `self[x := n]` for a free variable `x`.
    pub fn substitute(&self, x: &str, n: &Term) -> Term {
        self.subst_free(x, n, 0).unwrap_or_else(|| self.clone())
    }

    /// `None` when nothing changed, so untouched subterms stay shared.
    fn subst_free(&self, x: &str, n: &Term, depth: u32) -> Option<Term> {
        match self.kind() {
            TermKind::Free(y) if &**y == x => Some(n.shift(0, depth)),
            TermKind::Free(_) | TermKind::Bound(_) => None,
            TermKind::Lam(name, b) => b
                .subst_free(x, n, depth + 1)
                .map(|b| Term::abs(name.clone(), b)),
            TermKind::App(f, a) => {
                let f2 = f.subst_free(x, n, depth);
                let a2 = a.subst_free(x, n, depth);
                if f2.is_none() && a2.is_none() {
                    None
                } else {
                    Some(Term::app(
                        f2.unwrap_or_else(|| f.clone()),
                        a2.unwrap_or_else(|| a.clone()),
                    ))
                }
            }
        }
    }

    /// Number of free occurrences of the variable `x`.
    pub fn free_occurrences(&self, x: &str) -> u64 {
        match self.kind() {
            TermKind::Free(y) => u64::from(&**y == x),
            TermKind::Bound(_) => 0,
            TermKind::Lam(_, b) => b.free_occurrences(x),
            TermKind::App(f, a) => f.free_occurrences(x).saturating_add(a.free_occurrences(x)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self.kind() {
            TermKind::Free(x) => {
                out.insert(x.clone());
            }
            TermKind::Bound(_) => {}
            TermKind::Lam(_, b) => b.collect_free(out),
            TermKind::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    /// Occurrences, within an abstraction body, of the variable bound by
    /// that abstraction.
    pub fn binder_occurrences(&self) -> u64 {
        self.count_bound(0)
    }

    fn count_bound(&self, depth: u32) -> u64 {
        if self.0.loose <= depth {
            return 0;
        }
        match self.kind() {
            TermKind::Free(_) => 0,
            TermKind::Bound(i) => u64::from(*i == depth),
            TermKind::Lam(_, b) => b.count_bound(depth + 1),
            TermKind::App(f, a) => f.count_bound(depth).saturating_add(a.count_bound(depth)),
        }
    }

    /// Positions of the free occurrences of `x`, left to right.
    pub fn free_positions(&self, x: &str) -> Vec<Position> {
        let mut out = Vec::new();
        self.leaf_positions(
            &mut out,
            &|t, _| matches!(t.kind(), TermKind::Free(y) if &**y == x),
        );
        out
    }

    /// Positions, within an abstraction body, of the variable bound by that
    /// abstraction, left to right.
    pub fn binder_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.leaf_positions(
            &mut out,
            &|t, depth| matches!(t.kind(), TermKind::Bound(i) if *i == depth),
        );
        out
    }

    fn leaf_positions(&self, out: &mut Vec<Position>, hit: &dyn Fn(&Term, u32) -> bool) {
        self.leaf_positions_rec(&mut Vec::new(), 0, out, hit);
    }

    fn leaf_positions_rec(
        &self,
        at: &mut Vec<Dir>,
        depth: u32,
        out: &mut Vec<Position>,
        hit: &dyn Fn(&Term, u32) -> bool,
    ) {
        match self.kind() {
            TermKind::Free(_) | TermKind::Bound(_) => {
                if hit(self, depth) {
                    out.push(Position::from(at.clone()));
                }
            }
            TermKind::Lam(_, b) => {
                at.push(Dir::Body);
                b.leaf_positions_rec(at, depth + 1, out, hit);
                at.pop();
            }
            TermKind::App(f, a) => {
                at.push(Dir::Fun);
                f.leaf_positions_rec(at, depth, out, hit);
                at.pop();
                at.push(Dir::Arg);
                a.leaf_positions_rec(at, depth, out, hit);
                at.pop();
            }
        }
    }

    /// All redex occurrences, in position order.
    pub fn redexes(&self) -> RedexSet {
        let mut out = BTreeSet::new();
        self.collect_redexes(&mut Vec::new(), &mut out);
        RedexSet(out)
    }

    fn collect_redexes(&self, at: &mut Vec<Dir>, out: &mut BTreeSet<Position>) {
        match self.kind() {
            TermKind::Free(_) | TermKind::Bound(_) => {}
            TermKind::Lam(_, b) => {
                at.push(Dir::Body);
                b.collect_redexes(at, out);
                at.pop();
            }
            TermKind::App(f, a) => {
                if f.is_lam() {
                    out.insert(Position::from(at.clone()));
                }
                at.push(Dir::Fun);
                f.collect_redexes(at, out);
                at.pop();
                at.push(Dir::Arg);
                a.collect_redexes(at, out);
                at.pop();
            }
        }
    }

    /// Counts redexes without materialising positions.
    pub fn redex_count(&self) -> u64 {
        match self.kind() {
            TermKind::Free(_) | TermKind::Bound(_) => 0,
            TermKind::Lam(_, b) => b.redex_count(),
            TermKind::App(f, a) => u64::from(f.is_lam()) + f.redex_count() + a.redex_count(),
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack: Vec<(&Term, &Term)> = alloc::vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if a.ptr_eq(b) {
                continue;
            }
            if a.0.hash != b.0.hash || a.0.size != b.0.size {
                return false;
            }
            match (a.kind(), b.kind()) {
                (TermKind::Free(x), TermKind::Free(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (TermKind::Bound(i), TermKind::Bound(j)) => {
                    if i != j {
                        return false;
                    }
                }
                (TermKind::Lam(_, x), TermKind::Lam(_, y)) => stack.push((x, y)),
                (TermKind::App(f, x), TermKind::App(g, y)) => {
                    stack.push((x, y));
                    stack.push((f, g));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Drop for Node {
    // Iterative teardown so long spines such as f (f (… x)) do not recurse.
    fn drop(&mut self) {
        let mut stack: Vec<Term> = Vec::new();
        take_children(&mut self.kind, &mut stack);
        while let Some(mut t) = stack.pop() {
            if let Some(node) = Arc::get_mut(&mut t.0) {
                take_children(&mut node.kind, &mut stack);
            }
        }
    }
}

fn take_children(kind: &mut TermKind, stack: &mut Vec<Term>) {
    match core::mem::replace(kind, TermKind::Bound(0)) {
        TermKind::Lam(_, b) => stack.push(b),
        TermKind::App(f, a) => {
            stack.push(f);
            stack.push(a);
        }
        other => *kind = other,
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self))
    }
}

/// A set of redex positions, ordered lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RedexSet(BTreeSet<Position>);

impl RedexSet {
    pub fn new() -> Self {
        RedexSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &Position) -> bool {
        self.0.contains(p)
    }

    pub fn insert(&mut self, p: Position) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: &Position) -> bool {
        self.0.remove(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Position> {
        self.0.iter()
    }

    /// True if every member addresses a redex of `t`.
    pub fn valid_for(&self, t: &Term) -> bool {
        self.0
            .iter()
            .all(|p| t.subterm(p).is_some_and(Term::is_redex))
    }

    /// The least member that properly contains no other member.
    pub fn least_minimal(&self) -> Option<&Position> {
        // Extensions of p form a contiguous run right after p in
        // lexicographic order, so p is minimal iff its successor is not one.
        let mut iter = self.0.iter().peekable();
        while let Some(p) = iter.next() {
            match iter.peek() {
                Some(next) if p.is_prefix_of(next) => continue,
                _ => return Some(p),
            }
        }
        None
    }
}

impl FromIterator<Position> for RedexSet {
    fn from_iter<I: IntoIterator<Item = Position>>(iter: I) -> Self {
        RedexSet(iter.into_iter().collect())
    }
}

impl IntoIterator for RedexSet {
    type Item = Position;
    type IntoIter = alloc::collections::btree_set::IntoIter<Position>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a RedexSet {
    type Item = &'a Position;
    type IntoIter = alloc::collections::btree_set::Iter<'a, Position>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use alloc::vec;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(t("x").size(), 1);
        assert_eq!(t("\\x. x").size(), 2);
        assert_eq!(t("(\\x. x) y").size(), 4);
    }

    #[test]
    fn free_occurrence_counts() {
        assert_eq!(t("x x").free_occurrences("x"), 2);
        assert_eq!(t("\\x. x").free_occurrences("x"), 0);
        assert_eq!(t("x (\\x. x x) x").free_occurrences("x"), 2);
    }

    #[test]
    fn substitution_examples() {
        let id = t("\\y. y");
        assert_eq!(t("x").substitute("x", &id), id);
        let s = t("x x").substitute("x", &id);
        assert_eq!(s, t("(\\y. y) (\\y. y)"));
        assert_eq!(s.size(), 5);

        let captured = t("\\y. x y").substitute("x", &t("y"));
        assert_eq!(captured, t("\\z. y z"));
        assert_ne!(captured, t("\\y. y y"));
        assert_eq!(crate::syntax::print_term(&captured), "\\y'. y y'");
    }

    #[test]
    fn substitution_under_binders_shifts() {
        // (λa. λb. a b)[… ] with open arguments stays well scoped
        let body = t("\\b. z b");
        let s = body.substitute("z", &t("\\c. c b"));
        assert_eq!(s, t("\\d. (\\c. c b) d"));
    }

    #[test]
    fn redex_sets() {
        assert!(t("x").redexes().is_empty());
        assert_eq!(
            t("(\\x. x) y").redexes().into_iter().collect::<Vec<_>>(),
            vec![Position::root()]
        );
        let r = t("(\\x. (\\y. y) x) z").redexes();
        assert_eq!(
            r.into_iter().collect::<Vec<_>>(),
            vec![Position::root(), Position::from_dirs([Dir::Fun, Dir::Body])]
        );
    }

    #[test]
    fn alpha_examples() {
        assert!(t("\\x. x").alpha_eq(&t("\\y. y")));
        assert!(!t("\\x. \\y. x").alpha_eq(&t("\\x. \\y. y")));
        assert!(t("\\x. x (\\x. x)").alpha_eq(&t("\\a. a (\\b. b)")));
    }

    #[test]
    fn instantiate_contracts() {
        let (f, a) = t("(\\x. x x) z")
            .as_app()
            .map(|(f, a)| (f.clone(), a.clone()))
            .unwrap();
        let body = f.as_lam().unwrap().1.clone();
        assert_eq!(body.instantiate(&a), t("z z"));
    }

    #[test]
    fn binder_positions_skip_shadowed() {
        let lam = t("\\x. x (\\x. x) x");
        let body = lam.as_lam().unwrap().1;
        assert_eq!(body.binder_positions().len(), 2);
    }

    #[test]
    fn least_minimal_redex() {
        let term = t("(\\x. x) ((\\y. y) z)");
        assert_eq!(
            term.redexes().least_minimal(),
            Some(&Position::from_dirs([Dir::Arg]))
        );
    }

    #[test]
    fn deep_spine_drops() {
        let mut acc = Term::var("q");
        for _ in 0..200_000 {
            acc = Term::app(Term::var("p"), acc);
        }
        assert_eq!(acc.size(), 400_001);
        drop(acc);
    }
}
