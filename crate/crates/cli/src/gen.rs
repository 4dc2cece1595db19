//! Seeded random terms, reduction paths, equality chains and peaks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crjoin_core::reduction::{contract, ReductionPath};
use crjoin_core::{Direction, EqualityChain, Term};

/// Relative weights of abstraction, application and variable nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weights {
    pub abs: u32,
    pub app: u32,
    pub var: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            abs: 3,
            app: 4,
            var: 3,
        }
    }
}

pub const FREE_POOL: [&str; 3] = ["x", "y", "z"];
const BINDER_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

pub struct TermGen {
    pub rng: ChaCha8Rng,
    pub weights: Weights,
    /// Ceiling on every term a generated path or chain passes through.
    pub growth_cap: u64,
}

impl TermGen {
    pub fn new(rng: ChaCha8Rng) -> Self {
        TermGen {
            rng,
            weights: Weights::default(),
            growth_cap: 4096,
        }
    }

    /// A term of size at most `max_size`: the target size is drawn first and
    /// then spent top-down. Half of the terms are closed off by abstracting
    /// their free variables, which can add up to three nodes.
    pub fn term(&mut self, max_size: u64) -> Term {
        let max_size = max_size.max(1);
        let close = max_size > 4 && self.rng.gen_bool(0.5);
        let budget = if close { max_size - 3 } else { max_size };
        let target = self.rng.gen_range(1..=budget);
        let mut scope = Vec::new();
        let mut t = self.node(target, &mut scope);
        if close {
            for x in t.free_vars() {
                t = Term::lam(&x, t);
            }
        }
        t
    }

    /// A term with at least one redex, when one turns up within a few draws.
    pub fn reducible_term(&mut self, max_size: u64) -> Term {
        let mut t = self.term(max_size);
        for _ in 0..64 {
            if t.redex_count() > 0 {
                break;
            }
            t = self.term(max_size);
        }
        t
    }

    fn node(&mut self, budget: u64, scope: &mut Vec<&'static str>) -> Term {
        let w = self.weights;
        let abs = if budget >= 2 { w.abs } else { 0 };
        let app = if budget >= 3 { w.app } else { 0 };
        let roll = self.rng.gen_range(0..abs + app + w.var);
        if roll < abs {
            let x = *BINDER_POOL.choose(&mut self.rng).unwrap();
            scope.push(x);
            let body = self.node(budget - 1, scope);
            scope.pop();
            Term::lam(x, body)
        } else if roll < abs + app {
            let left = self.rng.gen_range(1..=budget - 2);
            let f = self.node(left, scope);
            let a = self.node(budget - 1 - left, scope);
            Term::app(f, a)
        } else if !scope.is_empty() && self.rng.gen_bool(0.6) {
            Term::var(scope.choose(&mut self.rng).unwrap())
        } else {
            Term::var(FREE_POOL.choose(&mut self.rng).unwrap())
        }
    }

    /// Contracts a uniformly chosen redex, unless the term is normal or the
    /// result would pass the growth cap.
    pub fn random_step(&mut self, t: &Term) -> Option<crjoin_core::Step> {
        let redexes: Vec<_> = t.redexes().into_iter().collect();
        let p = redexes.choose(&mut self.rng)?;
        let step = contract(t, p).expect("listed redexes contract");
        (step.target.size() <= self.growth_cap).then_some(step)
    }

    /// Up to `len` random steps from `start`.
    pub fn path(&mut self, start: &Term, len: usize) -> ReductionPath {
        let mut path = ReductionPath::empty(start.clone());
        for _ in 0..len {
            match self.random_step(path.end()) {
                Some(step) => path.push(step).expect("steps chain"),
                None => break,
            }
        }
        path
    }

    /// A chain of at most `k` links, walked over the reduction graph of a
    /// random term. A right arrow contracts a random redex of the current
    /// term; a left arrow steps back to the term the walk came from. The walk
    /// begins after a random warm-up path so that left arrows are available
    /// from the start.
    pub fn chain(&mut self, max_size: u64, k: usize) -> EqualityChain {
        let source = self.reducible_term(max_size);
        let warmup = self.rng.gen_range(0..=k);
        let mut stack: Vec<(Term, Option<crjoin_core::Position>)> = vec![(source, None)];
        for _ in 0..warmup {
            match self.random_step(&stack.last().unwrap().0) {
                Some(s) => stack.push((s.target, Some(s.redex))),
                None => break,
            }
        }
        let mut chain = EqualityChain::single(stack.last().unwrap().0.clone());
        for _ in 0..k {
            let go_left = stack.len() > 1 && self.rng.gen_bool(0.5);
            if go_left {
                let (_, witness) = stack.pop().unwrap();
                let parent = stack.last().unwrap().0.clone();
                chain
                    .push(Direction::Left, witness.unwrap(), parent)
                    .expect("walked links are valid");
            } else if let Some(s) = self.random_step(&stack.last().unwrap().0) {
                chain
                    .push(Direction::Right, s.redex.clone(), s.target.clone())
                    .expect("walked links are valid");
                stack.push((s.target, Some(s.redex)));
            }
        }
        chain
    }

    /// `(λf. f (f A)) (λz. B)`, whose root contraction creates two redexes.
    /// Sized at most `max_size` once `max_size ≥ 9`.
    pub fn creating_term(&mut self, max_size: u64) -> Term {
        let budget = max_size.saturating_sub(7).max(2);
        let left = self.rng.gen_range(1..budget);
        let a = self.term(left);
        let b = self.term(budget - left);
        let f = Term::var("f");
        Term::app(
            Term::lam("f", Term::app(f.clone(), Term::app(f, a))),
            Term::lam("z", b),
        )
    }

    /// Two paths from one reducible source with lengths at most `n ≤ m`.
    /// The shorter path is returned first.
    pub fn peak(&mut self, max_size: u64, n: usize, m: usize) -> (ReductionPath, ReductionPath) {
        let source = self.reducible_term(max_size);
        self.peak_from(&source, n, m)
    }

    pub fn peak_from(
        &mut self,
        source: &Term,
        n: usize,
        m: usize,
    ) -> (ReductionPath, ReductionPath) {
        let a = self.path(source, n);
        let b = self.path(source, m);
        if a.len() <= b.len() {
            (a, b)
        } else {
            (b, a)
        }
    }
}
