//! Constructive joins of β-equality chains and reduction peaks.
//!
//! Every join is assembled from three primitives: single steps, cofinal
//! steps `N ↠ M*` and monotone lifts `M^{n*} ↠ N^{n*}`. The result is a
//! [`JoinCertificate`] whose two paths are replayable.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{Direction, EqualityChain};
use crate::error::{Error, Result};
use crate::reduction::{
    cofinal_step, gross_knuth_iter, minimal_complete_development, mono_lift_path, old_redex_trace,
    residuals, star_checked, star_iter, Limits, MarkedTerm, ReductionPath,
};
use crate::term::Term;

/// Symbolic name of a common reduct, such as `M_2^{1*}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Descriptor {
    /// Name of the base term, e.g. `M_2`, `Q_3`.
    pub base: String,
    /// Number of Takahashi iterations applied to the base.
    pub stars: usize,
}

impl Descriptor {
    pub fn new(base: impl Into<String>, stars: usize) -> Self {
        Descriptor {
            base: base.into(),
            stars,
        }
    }

    /// `M_i^{stars*}`.
    pub fn chain(i: usize, stars: usize) -> Self {
        Descriptor::new(format!("M_{i}"), stars)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{{{}*}}", self.base, self.stars)
    }
}

/// Two reduction paths meeting at a common reduct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinCertificate {
    pub descriptor: Descriptor,
    pub reduct: Term,
    /// From the left endpoint (`M₀` of a chain, `Pₙ` of a peak).
    pub left: ReductionPath,
    /// From the right endpoint (`Mₖ` of a chain, `Qₘ` of a peak).
    pub right: ReductionPath,
}

impl JoinCertificate {
    /// Builds a certificate from two paths that must end at the same term.
    pub fn new(descriptor: Descriptor, left: ReductionPath, right: ReductionPath) -> Result<Self> {
        if left.end() != right.end() {
            return Err(Error::Replay(format!(
                "paths for {descriptor} end at {} and {}",
                left.end(),
                right.end()
            )));
        }
        Ok(JoinCertificate {
            descriptor,
            reduct: left.end().clone(),
            left,
            right,
        })
    }

    /// Replays every step of both paths and compares both endpoints with the
    /// reduct.
    pub fn verify(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        if self.left.end() != &self.reduct || self.right.end() != &self.reduct {
            return Err(Error::Replay(format!(
                "certificate {} does not end at its reduct",
                self.descriptor
            )));
        }
        Ok(())
    }

    /// [`verify`](Self::verify), and also check the two start terms.
    pub fn verify_between(&self, left: &Term, right: &Term) -> Result<()> {
        self.verify()?;
        if self.left.start() != left || self.right.start() != right {
            return Err(Error::Replay(format!(
                "certificate {} starts at the wrong terms",
                self.descriptor
            )));
        }
        Ok(())
    }
}

/// `Mₖ ↠ M₀^{r*}` where `r` counts the right arrows.
///
/// Walks the chain left to right keeping `Mᵢ ↠ M₀^{♯r[0,i]*}`. A left link
/// prepends its step; a right link `Mᵢ → Mᵢ₊₁` runs the cofinal step
/// `Mᵢ₊₁ ↠ Mᵢ*` and lifts the accumulated path one level.
pub fn reach_backward(c: &EqualityChain, limits: &Limits) -> Result<ReductionPath> {
    let mut acc = ReductionPath::empty(c.first().clone());
    for (i, link) in c.links().iter().enumerate() {
        let step = c.link_step(i)?;
        acc = match link.direction {
            Direction::Left => {
                let mut next = ReductionPath::empty(step.source.clone());
                next.push(step)?;
                next.append(acc, limits)?;
                next
            }
            Direction::Right => {
                let mut next = cofinal_step(&step, limits)?;
                next.append(mono_lift_path(&acc, 1, limits)?, limits)?;
                next
            }
        };
    }
    Ok(acc)
}

/// `M₀ ↠ Mₖ^{l*}` where `l` counts the left arrows; the mirror image of
/// [`reach_backward`].
pub fn reach_forward(c: &EqualityChain, limits: &Limits) -> Result<ReductionPath> {
    reach_backward(&c.reverse(), limits)
}

/// The two joins of the main lemma: at `M₀^{r*}` and at `Mₖ^{l*}`.
pub fn join_main(c: &EqualityChain, limits: &Limits) -> Result<(JoinCertificate, JoinCertificate)> {
    let (r, l, k) = (c.right_count(), c.left_count(), c.len());
    let at_first = JoinCertificate::new(
        Descriptor::chain(0, r),
        gross_knuth_iter(c.first(), r, limits)?,
        reach_backward(c, limits)?,
    )?;
    let at_last = JoinCertificate::new(
        Descriptor::chain(k, l),
        reach_forward(c, limits)?,
        gross_knuth_iter(c.last(), l, limits)?,
    )?;
    Ok((at_first, at_last))
}

/// `(r, m_l)` for the crossed point `M_r^{m_l*}`.
pub fn crossed_point(c: &EqualityChain) -> (usize, usize) {
    let r = c.right_count();
    let (m_l, _) = c.counts(0, r).expect("r never exceeds the chain length");
    (r, m_l)
}

/// The join at the crossed point `M_r^{m_l*}` with `m_l = ♯l[0,r]`.
pub fn join_refined(c: &EqualityChain, limits: &Limits) -> Result<JoinCertificate> {
    let (r, m_l) = crossed_point(c);
    debug_assert!(m_l <= r.min(c.left_count()));
    JoinCertificate::new(
        Descriptor::chain(r, m_l),
        reach_forward(&c.slice(0, r)?, limits)?,
        reach_backward(&c.slice(r, c.len())?, limits)?,
    )
}

/// Every join named by the main theorem.
#[derive(Clone, Debug)]
pub struct TheoremJoins {
    /// `i = 0..=r`: the reduct `M_{r−i}^{♯r[r−i,k]*}`.
    pub before: Vec<JoinCertificate>,
    /// `j = 0..=l`: the reduct `M_{r+j}^{♯l[0,r+j]*}`.
    pub after: Vec<JoinCertificate>,
    /// For each chain term `Mᵢ`, a path `Mᵢ ↠ M_r^{m_l*}`.
    pub to_crossed: Vec<ReductionPath>,
    pub crossed: Descriptor,
}

pub fn join_all(c: &EqualityChain, limits: &Limits) -> Result<TheoremJoins> {
    let k = c.len();
    let (r, m_l) = crossed_point(c);
    let l = k - r;

    let mut before = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let p = r - i;
        let (_, right_after) = c.counts(p, k)?;
        let mut left = reach_forward(&c.slice(0, p)?, limits)?;
        left.append(gross_knuth_iter(left.end(), i, limits)?, limits)?;
        let right = reach_backward(&c.slice(p, k)?, limits)?;
        before.push(JoinCertificate::new(
            Descriptor::chain(p, right_after),
            left,
            right,
        )?);
    }

    let mut after = Vec::with_capacity(l + 1);
    for j in 0..=l {
        let q = r + j;
        let (left_before, _) = c.counts(0, q)?;
        let left = reach_forward(&c.slice(0, q)?, limits)?;
        let mut right = reach_backward(&c.slice(q, k)?, limits)?;
        right.append(gross_knuth_iter(right.end(), j, limits)?, limits)?;
        after.push(JoinCertificate::new(
            Descriptor::chain(q, left_before),
            left,
            right,
        )?);
    }

    let target = star_iter(&c.terms()[r], m_l, limits)?;
    let mut to_crossed = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut path = if i <= r {
            reach_forward(&c.slice(i, r)?, limits)?
        } else {
            reach_backward(&c.slice(r, i)?, limits)?
        };
        let have = if i <= r {
            c.counts(i, r)?.0
        } else {
            c.counts(r, i)?.1
        };
        path.append(gross_knuth_iter(path.end(), m_l - have, limits)?, limits)?;
        if *path.end() != target {
            return Err(Error::Replay(format!(
                "path from M_{i} misses the crossed point"
            )));
        }
        to_crossed.push(path);
    }

    Ok(TheoremJoins {
        before,
        after,
        to_crossed,
        crossed: Descriptor::chain(r, m_l),
    })
}

/// The chain `Pₙ ← … ← P₁ ← M → Q₁ → … → Qₘ` of a peak.
pub fn peak_chain(left: &ReductionPath, right: &ReductionPath) -> Result<EqualityChain> {
    if left.start() != right.start() {
        return Err(Error::PeakMismatch);
    }
    Ok(EqualityChain::from_path(left)
        .reverse()
        .append(&EqualityChain::from_path(right))
        .expect("both halves meet at the peak source"))
}

/// Joins of a peak `Pₙ ↞ M ↠ Qₘ` with `1 ≤ n ≤ m`: at `Qₘ^{n*}` and at the
/// crossed point `Q_{m−n}^{n*}`.
pub fn join_reduction_peak(
    left: &ReductionPath,
    right: &ReductionPath,
    limits: &Limits,
) -> Result<(JoinCertificate, JoinCertificate)> {
    let c = peak_chain(left, right)?;
    let (n, m) = (left.len(), right.len());
    if n > m {
        return Err(Error::OrderViolation {
            left: n as u64,
            right: m as u64,
        });
    }
    let (_, mut at_last) = join_main(&c, limits)?;
    at_last.descriptor = Descriptor::new(format!("Q_{m}"), n);
    let mut crossed = join_refined(&c, limits)?;
    crossed.descriptor = Descriptor::new(format!("Q_{}", m - n), n);
    Ok((at_last, crossed))
}

/// The join of a peak `N₁ ↞ˡ M ↠ʳ N₂` at `N₁^{r*}`, following the main lemma.
pub fn join_peak_left_star(
    left: &ReductionPath,
    right: &ReductionPath,
    limits: &Limits,
) -> Result<JoinCertificate> {
    let c = peak_chain(left, right)?;
    let (mut at_first, _) = join_main(&c, limits)?;
    at_first.descriptor = Descriptor::new("N_1", right.len());
    Ok(at_first)
}

/// The join of a peak `N₁ ↞ˡ M ↠ʳ N₂` with `1 ≤ l ≤ r` at `M^{r*}`.
pub fn join_peak_source_star(
    left: &ReductionPath,
    right: &ReductionPath,
    limits: &Limits,
) -> Result<JoinCertificate> {
    if left.start() != right.start() {
        return Err(Error::PeakMismatch);
    }
    let (l, r) = (left.len(), right.len());
    if l > r {
        return Err(Error::OrderViolation {
            left: l as u64,
            right: r as u64,
        });
    }
    let mut from_left = reach_backward(&EqualityChain::from_path(left), limits)?;
    from_left.append(gross_knuth_iter(from_left.end(), r - l, limits)?, limits)?;
    let from_right = reach_backward(&EqualityChain::from_path(right), limits)?;
    JoinCertificate::new(Descriptor::new("M", r), from_left, from_right)
}

/// `Mₙ ↠ M^{(a+1)*}` for a path `M ↠ Mₙ` contracting `a` new redexes.
///
/// The path is cut before every new-redex contraction. Each piece is a
/// development of its first term `E`, completed to `E*`; the path built so
/// far is lifted one level and appended.
pub fn reach_star_by_new_redexes(
    p: &ReductionPath,
    limits: &Limits,
) -> Result<(ReductionPath, usize)> {
    let old = old_redex_trace(p)?;
    let steps = p.steps();
    let mut cuts: Vec<usize> = (0..steps.len())
        .filter(|&i| !old[i].contains(&steps[i].redex))
        .collect();
    let a = cuts.len();
    cuts.insert(0, 0);
    cuts.dedup();
    let terms: Vec<&Term> = p.terms().collect();

    let mut acc = ReductionPath::empty(p.start().clone());
    for (j, &s) in cuts.iter().enumerate() {
        let e = cuts.get(j + 1).copied().unwrap_or(steps.len());
        let mut marked = MarkedTerm::all_redexes(terms[s].clone());
        for step in &steps[s..e] {
            let next = residuals(&marked, &step.redex)?;
            marked = MarkedTerm::new(step.target.clone(), next)?;
        }
        let mut next = minimal_complete_development(&marked, limits)?;
        if *next.end() != star_checked(terms[s], limits)? {
            return Err(Error::Replay(format!(
                "development from step {s} misses the star"
            )));
        }
        next.append(mono_lift_path(&acc, 1, limits)?, limits)?;
        acc = next;
    }
    Ok((acc, a))
}

/// Result of the improved peak join.
#[derive(Clone, Debug)]
pub struct ImprovedJoin {
    /// New-redex contractions on the left path.
    pub a: usize,
    /// New-redex contractions on the right path.
    pub b: usize,
    /// `Pₙ ↠ Qₘ^{(a+1)*} ↞ Qₘ`.
    pub at_right: JoinCertificate,
    /// `Pₙ ↠ Pₙ^{(b+1)*} ↞ Qₘ`.
    pub at_left: JoinCertificate,
}

pub fn join_improved(
    left: &ReductionPath,
    right: &ReductionPath,
    limits: &Limits,
) -> Result<ImprovedJoin> {
    if left.start() != right.start() {
        return Err(Error::PeakMismatch);
    }
    let (n, m) = (left.len(), right.len());

    let (mut from_p, a) = reach_star_by_new_redexes(left, limits)?;
    from_p.append(mono_lift_path(right, a + 1, limits)?, limits)?;
    let at_right = JoinCertificate::new(
        Descriptor::new(format!("Q_{m}"), a + 1),
        from_p,
        gross_knuth_iter(right.end(), a + 1, limits)?,
    )?;

    let (mut from_q, b) = reach_star_by_new_redexes(right, limits)?;
    from_q.append(mono_lift_path(left, b + 1, limits)?, limits)?;
    let at_left = JoinCertificate::new(
        Descriptor::new(format!("P_{n}"), b + 1),
        gross_knuth_iter(left.end(), b + 1, limits)?,
        from_q,
    )?;

    Ok(ImprovedJoin {
        a,
        b,
        at_right,
        at_left,
    })
}
