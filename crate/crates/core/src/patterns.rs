//! Arrow patterns of length `k` and the reducts the main lemma and its
//! refinement name for them. Works on descriptors only; no terms involved.

use alloc::vec::Vec;

use crate::chain::Direction;
use crate::error::{Cap, Error, Result};
use crate::join::Descriptor;

pub const DEFAULT_PATTERN_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternInfo {
    pub arrows: Vec<Direction>,
    pub r: usize,
    pub l: usize,
    /// Left arrows among the first `r` links.
    pub m_l: usize,
    /// `M₀^{r*}`.
    pub at_first: Descriptor,
    /// `Mₖ^{l*}`.
    pub at_last: Descriptor,
    /// `M_r^{m_l*}`.
    pub crossed: Descriptor,
}

/// All patterns with the same number `r` of right arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternClass {
    pub r: usize,
    pub patterns: Vec<PatternInfo>,
}

pub fn describe_pattern(arrows: &[Direction]) -> PatternInfo {
    let k = arrows.len();
    let r = arrows.iter().filter(|d| **d == Direction::Right).count();
    let m_l = arrows[..r]
        .iter()
        .filter(|d| **d == Direction::Left)
        .count();
    PatternInfo {
        arrows: arrows.to_vec(),
        r,
        l: k - r,
        m_l,
        at_first: Descriptor::chain(0, r),
        at_last: Descriptor::chain(k, k - r),
        crossed: Descriptor::chain(r, m_l),
    }
}

/// The `2^k` patterns grouped by `r`, from `r = k` down to `r = 0`. Within a
/// class, patterns are listed by reading the arrows as binary digits with
/// `→` as 0, first link most significant.
pub fn enumerate_patterns(k: usize, cap: usize) -> Result<Vec<PatternClass>> {
    if k > cap || k >= usize::BITS as usize {
        return Err(Error::ResourceCap(Cap::PatternLength { k, cap }));
    }
    let mut classes: Vec<PatternClass> = (0..=k)
        .rev()
        .map(|r| PatternClass {
            r,
            patterns: Vec::new(),
        })
        .collect();
    for mask in 0..(1usize << k) {
        let arrows: Vec<Direction> = (0..k)
            .map(|i| {
                if mask >> (k - 1 - i) & 1 == 0 {
                    Direction::Right
                } else {
                    Direction::Left
                }
            })
            .collect();
        let info = describe_pattern(&arrows);
        classes[k - info.r].patterns.push(info);
    }
    Ok(classes)
}
