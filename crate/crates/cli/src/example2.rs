//! The Church-numeral valley `M₁ = 𝐜₁ p (Nₙ p q)`, `M₂ = Nₙ p (𝐜₁ p q)`
//! with `N₁ = 𝐜₂` and `Nₖ₊₁ = Nₖ 𝐜₂`.
//!
//! Both sides are reduced along the same route: normalize `Nₙ` in place,
//! feed it `p` and the other argument, then clear the `𝐜₁` redexes. Both end
//! in `p^{K+1}(q)` with `K = 𝟐ₙ¹`, so the chain is a valley and the refined
//! join takes its crossed point at the bottom.

use serde::Serialize;

use crjoin_core::join::{join_refined, JoinCertificate};
use crjoin_core::reduction::{leftmost_innermost_redex, Limits, ReductionPath};
use crjoin_core::{Dir, EqualityChain, Error, Position, Term};

/// `λf x. fᵏ(x)`.
pub fn church(k: u64) -> Term {
    let mut body = Term::var("x");
    for _ in 0..k {
        body = Term::app(Term::var("f"), body);
    }
    Term::lam("f", Term::lam("x", body))
}

pub fn n_term(n: u64) -> Term {
    let c2 = church(2);
    let mut t = c2.clone();
    for _ in 1..n {
        t = Term::app(t, c2.clone());
    }
    t
}

pub fn m1(n: u64) -> Term {
    let (p, q) = (Term::var("p"), Term::var("q"));
    Term::apps(church(1), [p.clone(), Term::apps(n_term(n), [p, q])])
}

pub fn m2(n: u64) -> Term {
    let (p, q) = (Term::var("p"), Term::var("q"));
    Term::apps(n_term(n), [p.clone(), Term::apps(church(1), [p, q])])
}

/// `p^k(q)`, built directly.
pub fn p_power(k: u64) -> Term {
    let mut t = Term::var("q");
    for _ in 0..k {
        t = Term::app(Term::var("p"), t);
    }
    t
}

/// `𝟐ₙ¹`, when it fits a `u64`.
pub fn tower(n: u64) -> Option<u64> {
    let mut v: u64 = 1;
    for _ in 0..n {
        v = 1u64.checked_shl(u32::try_from(v).ok()?)?;
    }
    Some(v)
}

#[derive(Clone, Debug)]
pub struct Example2 {
    pub n: u64,
    /// `𝟐ₙ¹`.
    pub k: u64,
    pub m1: Term,
    pub m2: Term,
    pub left: ReductionPath,
    pub right: ReductionPath,
    /// Steps spent normalizing `Nₙ` on each side.
    pub normalize_steps: (usize, usize),
    pub chain: EqualityChain,
    pub join: JoinCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Example2Report {
    pub n: u64,
    pub tower: u64,
    pub size_m1: u64,
    pub size_m2: u64,
    /// The closed form `8n + 1` usually quoted for these sizes, printed for
    /// comparison only.
    pub quoted_size: u64,
    pub normalize_steps: [usize; 2],
    pub chain_length: usize,
    /// `2·(4 + 𝟐ₙ¹)`.
    pub chain_length_bound: u64,
    pub reduct_descriptor: String,
    pub reduct_size: u64,
    /// `1 + 2·(𝟐ₙ¹ + 1)`.
    pub expected_reduct_size: u64,
    pub reduct_matches: bool,
    pub replays: bool,
    /// Chain length within `2·(4 + 𝟐ₙ¹)` and both normalizations within `𝟐ₙ¹`
    /// steps. Guaranteed only from `n = 4`; `n = 2` already exceeds them.
    pub within_bound: bool,
}

impl Example2 {
    pub fn report(&self) -> Example2Report {
        let expected = p_power(self.k + 1);
        Example2Report {
            n: self.n,
            tower: self.k,
            size_m1: self.m1.size(),
            size_m2: self.m2.size(),
            quoted_size: 8 * self.n + 1,
            normalize_steps: [self.normalize_steps.0, self.normalize_steps.1],
            chain_length: self.chain.len(),
            chain_length_bound: 2 * (4 + self.k),
            reduct_descriptor: self.join.descriptor.to_string(),
            reduct_size: self.join.reduct.size(),
            expected_reduct_size: 1 + 2 * (self.k + 1),
            reduct_matches: self.join.reduct == expected,
            replays: self.join.verify_between(&self.m1, &self.m2).is_ok(),
            within_bound: (self.chain.len() as u64) <= 2 * (4 + self.k)
                && [self.normalize_steps.0, self.normalize_steps.1]
                    .iter()
                    .all(|&a| a as u64 <= self.k),
        }
    }
}

impl Example2Report {
    pub fn ok(&self) -> bool {
        self.reduct_matches && self.replays && (self.n < 4 || self.within_bound)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(&format!("{k:<24}{v}\n"));
        };
        line("n", self.n.to_string());
        line("2_n^1", self.tower.to_string());
        line("|M1|", self.size_m1.to_string());
        line("|M2|", self.size_m2.to_string());
        line(
            "quoted |M1| = |M2|",
            format!("{} (8n+1, not asserted)", self.quoted_size),
        );
        line(
            "N_n normalization",
            format!(
                "{} and {} steps",
                self.normalize_steps[0], self.normalize_steps[1]
            ),
        );
        line(
            "chain length",
            format!("{} (bound {})", self.chain_length, self.chain_length_bound),
        );
        line(
            "common reduct",
            format!("{} = p^{}(q)", self.reduct_descriptor, self.tower + 1),
        );
        line(
            "reduct size",
            format!(
                "{} (expected {})",
                self.reduct_size, self.expected_reduct_size
            ),
        );
        line("within length bound", self.within_bound.to_string());
        line("reduct as expected", self.reduct_matches.to_string());
        line("certificate replays", self.replays.to_string());
        out
    }
}

fn cap(size: u64, limits: &Limits) -> Error {
    Error::ResourceCap(crjoin_core::error::Cap::TermSize {
        size,
        cap: limits.max_term_size,
    })
}

/// Contracts leftmost-innermost redexes inside the subterm at `at` until it
/// is normal, returning the number of steps.
fn normalize_at(
    path: &mut ReductionPath,
    at: &Position,
    limits: &Limits,
) -> crjoin_core::Result<usize> {
    let mut steps = 0;
    loop {
        let sub = path
            .end()
            .subterm(at)
            .ok_or_else(|| Error::InvalidPosition(at.clone()))?;
        let Some(p) = leftmost_innermost_redex(sub) else {
            return Ok(steps);
        };
        path.contract_at(&p.under(at), limits)?;
        steps += 1;
    }
}

fn pos(dirs: &[Dir]) -> Position {
    Position::from_dirs(dirs.iter().copied())
}

/// `M₁ ↠ 𝐜₁ p (C p q) ↠² 𝐜₁ p (p^K q) ↠² p (p^K q)` with `C` the normal
/// form of `Nₙ`.
fn left_path(n: u64, limits: &Limits) -> crjoin_core::Result<(ReductionPath, usize)> {
    use Dir::*;
    let mut path = ReductionPath::empty(m1(n));
    let a = normalize_at(&mut path, &pos(&[Arg, Fun, Fun]), limits)?;
    for p in [pos(&[Arg, Fun]), pos(&[Arg]), pos(&[Fun]), Position::root()] {
        path.contract_at(&p, limits)?;
    }
    Ok((path, a))
}

/// `M₂ ↠ C p (𝐜₁ p q) ↠² p^K (𝐜₁ p q) ↠² p^K (p q)`.
fn right_path(n: u64, k: u64, limits: &Limits) -> crjoin_core::Result<(ReductionPath, usize)> {
    use Dir::*;
    let mut path = ReductionPath::empty(m2(n));
    let a = normalize_at(&mut path, &pos(&[Fun, Fun]), limits)?;
    path.contract_at(&pos(&[Fun]), limits)?;
    path.contract_at(&Position::root(), limits)?;
    let inner = Position::from_dirs(std::iter::repeat_n(Arg, k as usize));
    path.contract_at(&inner.child(Fun), limits)?;
    path.contract_at(&inner, limits)?;
    Ok((path, a))
}

/// Builds both sides, the valley chain and its refined join. Terms nest
/// `𝟐ₙ¹` deep, so callers need a generous stack for `n = 4`.
pub fn build(n: u64, limits: &Limits) -> crjoin_core::Result<Example2> {
    if n == 0 {
        return Err(Error::BoundDomain("the valley needs n >= 1".into()));
    }
    let k = tower(n).ok_or_else(|| cap(u64::MAX, limits))?;
    let reduct_size = 2 * k + 3;
    limits.check_size(reduct_size)?;
    let (left, a1) = left_path(n, limits)?;
    let (right, a2) = right_path(n, k, limits)?;
    let chain =
        EqualityChain::from_path(&left).append(&EqualityChain::from_path(&right).reverse())?;
    let join = join_refined(&chain, limits)?;
    Ok(Example2 {
        n,
        k,
        m1: left.start().clone(),
        m2: right.start().clone(),
        left,
        right,
        normalize_steps: (a1, a2),
        chain,
        join,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn towers() {
        assert_eq!(tower(0), Some(1));
        assert_eq!(tower(3), Some(16));
        assert_eq!(tower(4), Some(65536));
        assert_eq!(tower(5), None);
    }

    #[test]
    fn sizes() {
        assert_eq!(church(1).size(), 5);
        assert_eq!(church(2).size(), 7);
        for n in 1..6 {
            assert_eq!(n_term(n).size(), 8 * n - 1);
            assert_eq!(m1(n).size(), 8 * n + 11);
            assert_eq!(m2(n).size(), 8 * n + 11);
        }
    }

    #[test]
    fn small_cases() {
        let lim = Limits::default();
        for n in 1..=3 {
            let e = build(n, &lim).unwrap();
            let r = e.report();
            assert!(r.ok(), "{}", r.to_text());
            // c2 c2 needs five steps to reach c4
            assert_eq!(r.within_bound, n != 2);
            assert_eq!(e.join.reduct, p_power(tower(n).unwrap() + 1));
            assert_eq!(e.chain.left_count(), e.right.len());
        }
    }

    #[test]
    fn n_five_hits_the_cap() {
        assert!(build(5, &Limits::default()).unwrap_err().is_resource_cap());
        assert!(build(0, &Limits::default()).is_err());
    }
}
