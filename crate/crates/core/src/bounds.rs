//! Exact evaluation of the length and size bounds.
//!
//! Values are non-negative rationals of unbounded precision. Anything whose
//! numerator or denominator would need more than the configured number of
//! bits becomes [`BoundValue::Overflow`], which absorbs further arithmetic
//! and compares above every exact value. Subtraction is truncated at zero
//! and non-integral exponents are rounded up.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain::{Direction, EqualityChain};
use crate::error::{Error, Result};

pub type Rational = Ratio<BigUint>;

pub const DEFAULT_BIT_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Exact(Rational),
    Overflow,
}

impl BoundValue {
    pub fn nat(n: u64) -> Self {
        BoundValue::Exact(Rational::from_integer(BigUint::from(n)))
    }

    pub fn zero() -> Self {
        BoundValue::nat(0)
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, BoundValue::Overflow)
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            BoundValue::Exact(v) => Some(v),
            BoundValue::Overflow => None,
        }
    }

    /// The value as a `u64`, when it is an integer that fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.as_exact()
            .filter(|v| v.is_integer())
            .and_then(|v| v.numer().to_u64())
    }

    /// `n ≤ self`, with overflow read as infinity.
    pub fn admits(&self, n: u64) -> bool {
        *self >= BoundValue::nat(n)
    }

    /// `n < self`, with overflow read as infinity.
    pub fn exceeds(&self, n: u64) -> bool {
        *self > BoundValue::nat(n)
    }
}

impl PartialOrd for BoundValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoundValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BoundValue::Exact(a), BoundValue::Exact(b)) => a.cmp(b),
            (BoundValue::Exact(_), BoundValue::Overflow) => Ordering::Less,
            (BoundValue::Overflow, BoundValue::Exact(_)) => Ordering::Greater,
            (BoundValue::Overflow, BoundValue::Overflow) => Ordering::Equal,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(v) if v.is_integer() => write!(f, "{}", v.numer()),
            BoundValue::Exact(v) => write!(f, "{}/{}", v.numer(), v.denom()),
            BoundValue::Overflow => f.write_str("overflow"),
        }
    }
}

/// A bound on a valley `N₁ ↠ᵃ P ↞ᵇ N₂`: `a ≤ left`, `b ≤ right`, with `P`
/// named by `reduct`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTriple {
    pub left: BoundValue,
    pub reduct: String,
    pub right: BoundValue,
}

impl fmt::Display for BoundTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.left, self.reduct, self.right)
    }
}

/// Arithmetic under a bit cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundCalc {
    pub bit_cap: u64,
}

impl Default for BoundCalc {
    fn default() -> Self {
        BoundCalc {
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

type V = BoundValue;

impl BoundCalc {
    pub fn new(bit_cap: u64) -> Self {
        BoundCalc { bit_cap }
    }

    fn fit(&self, v: Rational) -> V {
        if v.numer().bits() > self.bit_cap || v.denom().bits() > self.bit_cap {
            V::Overflow
        } else {
            V::Exact(v)
        }
    }

    pub fn add(&self, a: &V, b: &V) -> V {
        match (a, b) {
            (V::Exact(a), V::Exact(b)) => self.fit(a + b),
            _ => V::Overflow,
        }
    }

    /// `max(a − b, 0)`. Any overflow operand gives overflow.
    pub fn monus(&self, a: &V, b: &V) -> V {
        match (a, b) {
            (V::Exact(a), V::Exact(b)) => {
                if a > b {
                    V::Exact(a - b)
                } else {
                    V::zero()
                }
            }
            _ => V::Overflow,
        }
    }

    pub fn mul(&self, a: &V, b: &V) -> V {
        match (a, b) {
            (V::Exact(a), V::Exact(b)) => {
                if a.is_zero() || b.is_zero() {
                    return V::zero();
                }
                self.fit(a * b)
            }
            _ => V::Overflow,
        }
    }

    pub fn half(&self, a: &V) -> V {
        match a {
            V::Exact(a) => self.fit(a / Rational::from_integer(BigUint::from(2u32))),
            V::Overflow => V::Overflow,
        }
    }

    /// An exponent as a machine integer, rounding up; `None` when it is so
    /// large that the power certainly overflows.
    fn exponent(&self, e: &V) -> Option<u64> {
        let e = e.as_exact()?;
        let up = e.ceil().to_integer();
        up.to_u64().filter(|&n| n <= self.bit_cap.saturating_mul(2))
    }

    /// `2^e`.
    pub fn pow2(&self, e: &V) -> V {
        match self.exponent(e) {
            Some(n) if n < self.bit_cap => {
                V::Exact(Rational::from_integer(BigUint::one() << n as usize))
            }
            _ => V::Overflow,
        }
    }

    /// `b^e`.
    pub fn pow(&self, b: &V, e: &V) -> V {
        let V::Exact(base) = b else {
            return match self.exponent(e) {
                Some(0) => V::nat(1),
                _ => V::Overflow,
            };
        };
        if base.is_zero() {
            return match e.as_exact() {
                Some(x) if x.is_zero() => V::nat(1),
                _ => V::zero(),
            };
        }
        if base.is_one() {
            return V::nat(1);
        }
        let Some(n) = self.exponent(e) else {
            return V::Overflow;
        };
        // a lower bound on the bits of the larger of numerator and denominator
        let widest = base.numer().bits().max(base.denom().bits());
        if n.saturating_mul(widest - 1) + 1 > self.bit_cap {
            return V::Overflow;
        }
        let Ok(n) = u32::try_from(n) else {
            return V::Overflow;
        };
        let numer = num_traits::pow::Pow::pow(base.numer(), n);
        let denom = num_traits::pow::Pow::pow(base.denom(), n);
        // powers of coprime numbers stay coprime
        self.fit(Rational::new_raw(numer, denom))
    }

    /// `𝟐ₙ^m`: `𝟐₀^m = m`, `𝟐ₙ₊₁^m = 2^{𝟐ₙ^m}`.
    pub fn iter_exp_value(&self, m: &V, n: u64) -> V {
        let mut v = m.clone();
        for _ in 0..n {
            if v.is_overflow() {
                break;
            }
            v = self.pow2(&v);
        }
        v
    }

    pub fn iter_exp(&self, m: u64, n: u64) -> V {
        self.iter_exp_value(&V::nat(m), n)
    }

    /// `F(m, 0) = m`, `F(m, n+1) = 2^{F(m,n) − 1}`.
    pub fn f_iter(&self, m: u64, n: u64) -> V {
        let one = V::nat(1);
        let mut v = V::nat(m);
        for _ in 0..n {
            if v.is_overflow() {
                break;
            }
            v = self.pow2(&self.monus(&v, &one));
        }
        v
    }

    /// `Len(s, n)`: `0` for `n = 0`, else `½·Σ_{k<n} F(s, k) − n`.
    pub fn len_bound(&self, s: u64, n: u64) -> V {
        if n == 0 {
            return V::zero();
        }
        let mut sum = V::zero();
        for k in 0..n {
            sum = self.add(&sum, &self.f_iter(s, k));
            if sum.is_overflow() {
                return V::Overflow;
            }
        }
        self.monus(&self.half(&sum), &V::nat(n))
    }

    /// `8·(s/8)^{2ⁿ} = s^{2ⁿ} / 8^{2ⁿ−1}`.
    pub fn size_after_steps(&self, s: u64, n: u64) -> V {
        let e = self.pow2(&V::nat(n));
        let ratio = V::Exact(Rational::new(BigUint::from(s), BigUint::from(8u32)));
        self.mul(&V::nat(8), &self.pow(&ratio, &e))
    }

    /// `2^{s−1}`.
    pub fn star_size_bound(&self, s: u64) -> V {
        self.pow2(&V::nat(s.saturating_sub(1)))
    }

    /// `s^{2^m}` for an exponent given as a value.
    fn pow_tower(&self, s: u64, m: &V) -> V {
        self.pow(&V::nat(s), &self.pow2(m))
    }

    /// `Mon(s, m, n)`: `2^{s^{2^m}}` for `n = 1`, and
    /// `2^{2^{2^{Mon(s,m,n−1)} · 𝟐_{n−2}^s}}` for `n > 1`. For `n = 0` the
    /// lifted path is the path itself, of length `m`.
    pub fn mon_bound(&self, s: u64, m: u64, n: u64) -> V {
        if n == 0 {
            return V::nat(m);
        }
        let mut v = self.pow2(&self.pow_tower(s, &V::nat(m)));
        for level in 2..=n {
            if v.is_overflow() {
                return V::Overflow;
            }
            let factor = self.iter_exp(s, level - 2);
            v = self.pow2(&self.pow2(&self.mul(&self.pow2(&v), &factor)));
        }
        v
    }

    /// `Rev(s, n)`: `½s²` for `n = 1`, and
    /// `½s^{2ⁿ} + 2^{s^{2^{n−1+Rev(s,n−1)}}}` for `n > 1`.
    pub fn rev_bound(&self, s: u64, n: u64) -> Result<V> {
        if n == 0 {
            return Err(Error::BoundDomain(String::from("Rev needs n >= 1")));
        }
        let mut v = self.half(&self.pow(&V::nat(s), &V::nat(2)));
        for level in 2..=n {
            let head = self.half(&self.pow_tower(s, &V::nat(level)));
            let exp = self.add(&V::nat(level - 1), &v);
            v = self.add(&head, &self.pow2(&self.pow_tower(s, &exp)));
        }
        Ok(v)
    }

    /// `CR-red(l, s, r)` for a peak `N₁ ↞ˡ M ↠ʳ N₂`, reduct `N₁^{r*}`.
    pub fn cr_red_bound(&self, l: u64, s: u64, r: u64) -> Result<BoundTriple> {
        if r == 0 {
            return Err(Error::BoundDomain(String::from("CR-red needs r >= 1")));
        }
        let s_l = self.pow_tower(s, &V::nat(l));
        let mut left = self.half(&s_l);
        let mut right = self.add(
            &self.half(&self.pow(&V::nat(s), &V::nat(2))),
            &self.pow2(&s_l),
        );
        for level in 2..=r {
            left = self.iter_exp_value(&s_l, level - 1);
            let exp = self.add(&V::nat(level - 1), &right);
            right = self.add(
                &self.half(&self.pow_tower(s, &V::nat(level))),
                &self.pow2(&self.pow_tower(s, &exp)),
            );
        }
        Ok(BoundTriple {
            left,
            reduct: format!("N_1^{{{r}*}}"),
            right,
        })
    }

    /// `V-size(l, s, r)` for a peak with `1 ≤ l ≤ r`, reduct `M^{r*}`.
    pub fn v_size_bound(&self, l: u64, s: u64, r: u64) -> Result<BoundTriple> {
        if l > r {
            return Err(Error::OrderViolation { left: l, right: r });
        }
        if l == 0 {
            return Err(Error::BoundDomain(String::from("V-size needs l >= 1")));
        }
        Ok(BoundTriple {
            left: self.add(&self.rev_bound(s, l)?, &self.iter_exp(s, r - 1)),
            reduct: format!("M^{{{r}*}}"),
            right: self.rev_bound(s, r)?,
        })
    }

    /// `TermSize` over maximal one-directional runs given as
    /// `(size of the run's source, run length)`, maxed with `sizes`.
    pub fn term_size_runs(&self, runs: &[(u64, u64)], sizes: &[u64]) -> V {
        let mut best = sizes.iter().copied().max().map_or(V::zero(), V::nat);
        for &(s, r) in runs {
            best = best.max(self.size_after_steps(s, r));
        }
        best
    }

    pub fn term_size_chain(&self, c: &EqualityChain) -> V {
        let sizes: Vec<u64> = c.terms().iter().map(|t| t.size()).collect();
        self.term_size_runs(&chain_runs(c), &sizes)
    }

    /// `CR-eq` of a chain with the given arrows, first term size `s0` and
    /// `TermSize` constant `big_m`; the reduct is `M₀^{r*}`.
    pub fn cr_eq_bound(&self, arrows: &[Direction], s0: u64, big_m: &V) -> BoundTriple {
        let mut r = 0u64;
        let (mut a, mut b) = (V::zero(), V::zero());
        for (i, d) in arrows.iter().enumerate() {
            match (i, d) {
                (0, Direction::Left) => b = V::nat(1),
                (0, Direction::Right) => {
                    a = self.half(&V::nat(s0));
                    b = self.half(&self.pow(&V::nat(s0), &V::nat(2)));
                    r = 1;
                }
                (_, Direction::Left) => b = self.add(&b, &V::nat(1)),
                (_, Direction::Right) => {
                    a = self.add(&a, &self.half(&self.iter_exp(s0, r)));
                    let pow = self.pow(big_m, &self.pow2(&b));
                    b = self.add(&self.half(big_m), &self.pow2(&pow));
                    r += 1;
                }
            }
        }
        BoundTriple {
            left: a,
            reduct: format!("M_0^{{{r}*}}"),
            right: b,
        }
    }

    /// The Ketema–Simonsen bound `bl(l, s, r)`.
    pub fn bl_bound(&self, l: u64, s: u64, r: u64) -> Result<V> {
        if r == 0 {
            return Err(Error::BoundDomain(String::from("bl needs r >= 1")));
        }
        let first = self.add(&self.pow2(&V::nat(l)), &V::nat(l + 2));
        let mut v = self.pow_tower(s, &first);
        for level in 2..=r {
            let exp = self.add(&self.add(&self.pow2(&v), &v), &V::nat(level + 1));
            v = self.pow_tower(s, &exp);
        }
        Ok(v)
    }
}

/// Maximal one-directional runs of a chain as `(size of the arrow source,
/// run length)`. A run of left arrows has its source at its right end.
pub fn chain_runs(c: &EqualityChain) -> Vec<(u64, u64)> {
    let arrows: Vec<Direction> = c.arrows().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < arrows.len() {
        let mut j = i;
        while j < arrows.len() && arrows[j] == arrows[i] {
            j += 1;
        }
        let src = match arrows[i] {
            Direction::Right => i,
            Direction::Left => j,
        };
        out.push((c.terms()[src].size(), (j - i) as u64));
        i = j;
    }
    out
}

/// Integer ceiling helper used by tests and reports.
pub fn ceil_u64(v: &Rational) -> Option<u64> {
    let (q, r) = v.numer().div_rem(v.denom());
    let q = if r.is_zero() { q } else { q + 1u32 };
    q.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn calc() -> BoundCalc {
        BoundCalc::default()
    }

    fn n(x: u64) -> V {
        V::nat(x)
    }

    fn frac(p: u64, q: u64) -> V {
        V::Exact(Rational::new(BigUint::from(p), BigUint::from(q)))
    }

    fn two_to(e: u64) -> V {
        V::Exact(Rational::from_integer(BigUint::one() << e as usize))
    }

    #[test]
    fn ordering_and_absorption() {
        let c = calc();
        assert!(n(u64::MAX) < V::Overflow);
        assert_eq!(c.add(&n(1), &V::Overflow), V::Overflow);
        assert_eq!(c.mul(&V::Overflow, &n(3)), V::Overflow);
        assert_eq!(c.pow2(&V::Overflow), V::Overflow);
        assert_eq!(c.monus(&n(3), &n(5)), n(0));
        assert!(V::Overflow.admits(u64::MAX));
    }

    #[test]
    fn towers() {
        let c = calc();
        assert_eq!(c.iter_exp(7, 0), n(7));
        assert_eq!(c.iter_exp(1, 4), n(65536));
        assert_eq!(c.iter_exp(2, 64), V::Overflow);
        assert_eq!(c.f_iter(4, 0), n(4));
        assert_eq!(c.f_iter(4, 1), n(8));
        assert_eq!(c.f_iter(4, 2), n(128));
    }

    #[test]
    fn lengths_and_sizes() {
        let c = calc();
        assert_eq!(c.len_bound(9, 0), n(0));
        assert_eq!(c.len_bound(4, 1), n(1));
        assert_eq!(c.len_bound(4, 2), n(4));
        assert_eq!(c.size_after_steps(8, 1), n(8));
        assert_eq!(c.size_after_steps(4, 1), n(2));
        assert_eq!(c.size_after_steps(16, 2), n(128));
        assert_eq!(c.size_after_steps(5, 0), n(5));
        assert_eq!(c.star_size_bound(1), n(1));
        assert_eq!(c.star_size_bound(4), n(8));
        assert_eq!(c.star_size_bound(1 << 21), V::Overflow);
    }

    #[test]
    fn mon_and_rev() {
        let c = calc();
        assert_eq!(c.mon_bound(2, 0, 1), n(4));
        assert_eq!(c.mon_bound(2, 1, 1), n(16));
        // Mon(4,1,1) = 2^16, so Mon(4,1,2) = 2^2^(2^65536·4): far past the cap
        assert_eq!(c.mon_bound(4, 1, 2), V::Overflow);
        assert_eq!(c.rev_bound(4, 1).unwrap(), n(8));
        assert_eq!(c.rev_bound(2, 1).unwrap(), n(2));
        assert_eq!(c.rev_bound(2, 2).unwrap(), c.add(&n(8), &two_to(256)));
        assert!(c.rev_bound(2, 0).is_err());
    }

    #[test]
    fn peak_bounds() {
        let c = calc();
        let t = c.cr_red_bound(0, 4, 1).unwrap();
        assert_eq!((t.left, t.right), (n(2), n(24)));
        let t = c.cr_red_bound(1, 4, 1).unwrap();
        assert_eq!((t.left, t.right), (n(8), n(8 + 65536)));
        let t = c.v_size_bound(1, 4, 1).unwrap();
        assert_eq!((t.left, t.right), (n(12), n(8)));
        let t = c.v_size_bound(1, 2, 1).unwrap();
        assert_eq!((t.left, t.right), (n(4), n(2)));
        let t = c.v_size_bound(1, 2, 2).unwrap();
        assert_eq!(t.left, n(6));
        assert_eq!(t.right, c.add(&n(8), &two_to(256)));
        assert_eq!(
            c.v_size_bound(3, 2, 2),
            Err(Error::OrderViolation { left: 3, right: 2 })
        );
    }

    #[test]
    fn chain_bounds() {
        use Direction::*;
        let c = calc();
        let t = c.cr_eq_bound(&[Left], 7, &n(7));
        assert_eq!(
            (t.left, t.right, t.reduct.as_str()),
            (n(0), n(1), "M_0^{0*}")
        );
        let t = c.cr_eq_bound(&[Right], 4, &n(4));
        assert_eq!((t.left, t.right), (n(2), n(8)));
        let t = c.cr_eq_bound(&[Right, Left], 4, &n(4));
        assert_eq!((t.left, t.right), (n(2), n(9)));
        let t = c.cr_eq_bound(&[], 4, &n(4));
        assert_eq!((t.left, t.right), (n(0), n(0)));
    }

    #[test]
    fn comparison_bound() {
        let c = calc();
        assert_eq!(c.bl_bound(0, 2, 1).unwrap(), n(256));
        assert_eq!(c.bl_bound(1, 2, 1).unwrap(), two_to(32));
        assert_eq!(c.bl_bound(1, 2, 2).unwrap(), V::Overflow);
    }

    #[test]
    fn rationals() {
        let c = calc();
        assert_eq!(c.half(&n(5)), frac(5, 2));
        assert_eq!(c.size_after_steps(3, 1), frac(9, 8));
        assert_eq!(frac(5, 2).to_string(), "5/2");
        assert_eq!(ceil_u64(frac(5, 2).as_exact().unwrap()), Some(3));
        // non-integral exponents round up
        assert_eq!(c.pow2(&frac(5, 2)), n(8));
    }
}
