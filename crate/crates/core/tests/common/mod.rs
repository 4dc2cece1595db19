#![allow(dead_code)]

use crjoin_core::chain::{Direction, EqualityChain};
use crjoin_core::reduction::{contract, Limits, ReductionPath};
use crjoin_core::Term;
use proptest::prelude::*;

pub const FREE: [&str; 3] = ["x", "y", "z"];
pub const BINDERS: [&str; 5] = ["x", "y", "z", "u", "v"];

pub fn limits() -> Limits {
    Limits {
        max_term_size: 50_000,
        max_path_len: 50_000,
    }
}

fn name(pool: &'static [&'static str]) -> impl Strategy<Value = &'static str> {
    (0..pool.len()).prop_map(move |i| pool[i])
}

/// Named terms where binders may capture the free pool, with an explicit
/// redex former so that reductions have something to do.
pub fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = name(&FREE).prop_map(Term::var);
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            3 => (name(&BINDERS), inner.clone()).prop_map(|(x, b)| Term::lam(x, b)),
            3 => (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            3 => (name(&BINDERS), inner.clone(), inner)
                .prop_map(|(x, b, a)| Term::app(Term::lam(x, b), a)),
        ]
    })
}

/// Like [`term`] but a third of the draws are a redex at the root.
pub fn sized_term(depth: u32, max: u64) -> impl Strategy<Value = Term> {
    let sub = depth.saturating_sub(1).max(1);
    let root_redex =
        (name(&BINDERS), term(sub), term(sub)).prop_map(|(x, b, a)| Term::app(Term::lam(x, b), a));
    prop_oneof![2 => term(depth), 1 => root_redex]
        .prop_filter("too large", move |t| t.size() <= max)
}

/// Contracts the redex picked by each choice in turn, stopping early at a
/// normal form or when a term outgrows `max`.
pub fn walk(start: &Term, choices: &[usize], max: u64) -> ReductionPath {
    let mut path = ReductionPath::empty(start.clone());
    for &c in choices {
        let rs: Vec<_> = path.end().redexes().into_iter().collect();
        if rs.is_empty() {
            break;
        }
        let step = contract(path.end(), &rs[c % rs.len()]).unwrap();
        if step.target.size() > max {
            break;
        }
        path.push(step).unwrap();
    }
    path
}

/// A chain walked over the reduction graph: a right arrow contracts some
/// redex, a left arrow returns to the term it came from. The walk starts at
/// the end of a warm-up path so that left arrows are available early.
pub fn chain_walk(
    start: &Term,
    warmup: &[usize],
    moves: &[(bool, usize)],
    max: u64,
) -> EqualityChain {
    let pre = walk(start, warmup, max);
    let mut stack: Vec<Term> = pre.terms().cloned().collect();
    let mut chain = EqualityChain::single(stack.last().unwrap().clone());
    for &(left, c) in moves {
        if left && stack.len() > 1 {
            let cur = stack.pop().unwrap();
            let parent = stack.last().unwrap().clone();
            let w = witness(&parent, &cur);
            chain.push(Direction::Left, w, parent).unwrap();
        } else {
            let cur = stack.last().unwrap().clone();
            let rs: Vec<_> = cur.redexes().into_iter().collect();
            if rs.is_empty() {
                continue;
            }
            let step = contract(&cur, &rs[c % rs.len()]).unwrap();
            if step.target.size() > max {
                continue;
            }
            chain
                .push(Direction::Right, step.redex, step.target.clone())
                .unwrap();
            stack.push(step.target);
        }
    }
    chain
}

fn witness(src: &Term, dst: &Term) -> crjoin_core::Position {
    src.redexes()
        .into_iter()
        .find(|p| contract(src, p).is_ok_and(|s| s.target == *dst))
        .unwrap()
}

pub fn choices(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 0..=max_len)
}

pub fn moves(max_len: usize) -> impl Strategy<Value = Vec<(bool, usize)>> {
    prop::collection::vec((any::<bool>(), 0usize..64), 1..=max_len)
}
