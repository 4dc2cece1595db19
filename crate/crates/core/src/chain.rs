//! β-equality chains `M₀ = M₁ = … = Mₖ` where every link is a single step in
//! one direction or the other.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::position::Position;
use crate::reduction::{contract, ReductionPath, Step};
use crate::term::Term;

/// `Right` is `Mᵢ → Mᵢ₊₁`, `Left` is `Mᵢ ← Mᵢ₊₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Direction::Right => "->",
            Direction::Left => "<-",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "->" => Some(Direction::Right),
            "<-" => Some(Direction::Left),
            _ => None,
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::Right => '→',
            Direction::Left => '←',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One link: its direction and the redex contracted in the arrow's source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub direction: Direction,
    pub witness: Position,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityChain {
    terms: Vec<Term>,
    links: Vec<Link>,
}

impl EqualityChain {
    /// The length-0 chain `[M]`.
    pub fn single(term: Term) -> Self {
        EqualityChain {
            terms: alloc::vec![term],
            links: Vec::new(),
        }
    }

    /// Builds and validates a chain; fails with `LinkInvalid` on the first
    /// link whose witness does not contract its source to its target.
    pub fn new(terms: Vec<Term>, links: Vec<Link>) -> Result<Self> {
        if terms.len() != links.len() + 1 {
            return Err(Error::LinkInvalid {
                index: links.len().min(terms.len()),
            });
        }
        let chain = EqualityChain { terms, links };
        chain.validate()?;
        Ok(chain)
    }

    /// Builds a chain from terms and directions, inferring each witness as the
    /// least redex position of the arrow source that contracts to the target.
    pub fn infer(terms: Vec<Term>, arrows: &[Direction]) -> Result<Self> {
        if terms.len() != arrows.len() + 1 {
            return Err(Error::LinkInvalid {
                index: arrows.len().min(terms.len()),
            });
        }
        let mut links = Vec::with_capacity(arrows.len());
        for (index, &direction) in arrows.iter().enumerate() {
            let (src, dst) = match direction {
                Direction::Right => (&terms[index], &terms[index + 1]),
                Direction::Left => (&terms[index + 1], &terms[index]),
            };
            let witness = find_witness(src, dst).ok_or(Error::LinkInvalid { index })?;
            links.push(Link { direction, witness });
        }
        Ok(EqualityChain { terms, links })
    }

    /// The all-`Right` chain along a reduction path.
    pub fn from_path(p: &ReductionPath) -> Self {
        EqualityChain {
            terms: p.terms().cloned().collect(),
            links: p
                .positions()
                .map(|w| Link {
                    direction: Direction::Right,
                    witness: w.clone(),
                })
                .collect(),
        }
    }

    /// Extends the chain by one link, validating it.
    pub fn push(&mut self, direction: Direction, witness: Position, term: Term) -> Result<()> {
        let index = self.links.len();
        let last = self.last();
        let ok = match direction {
            Direction::Right => contract(last, &witness).is_ok_and(|s| s.target == term),
            Direction::Left => contract(&term, &witness).is_ok_and(|s| s.target == *last),
        };
        if !ok {
            return Err(Error::LinkInvalid { index });
        }
        self.links.push(Link { direction, witness });
        self.terms.push(term);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for index in 0..self.links.len() {
            let step = self
                .link_step(index)
                .map_err(|_| Error::LinkInvalid { index })?;
            if step.target != *self.link_target(index) {
                return Err(Error::LinkInvalid { index });
            }
        }
        Ok(())
    }

    /// Number of links `k`.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn arrows(&self) -> impl Iterator<Item = Direction> + '_ {
        self.links.iter().map(|l| l.direction)
    }

    pub fn first(&self) -> &Term {
        &self.terms[0]
    }

    pub fn last(&self) -> &Term {
        &self.terms[self.terms.len() - 1]
    }

    /// The step of link `i`, taken in its arrow direction.
    pub fn link_step(&self, i: usize) -> Result<Step> {
        let link = &self.links[i];
        let src = match link.direction {
            Direction::Right => &self.terms[i],
            Direction::Left => &self.terms[i + 1],
        };
        contract(src, &link.witness)
    }

    fn link_target(&self, i: usize) -> &Term {
        match self.links[i].direction {
            Direction::Right => &self.terms[i + 1],
            Direction::Left => &self.terms[i],
        }
    }

    fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i > j || j > self.len() {
            Err(Error::IndexOutOfRange {
                start: i,
                end: j,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// `(♯l[i,j], ♯r[i,j])`: left and right arrows among links `i..j`.
    pub fn counts(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        self.check_range(i, j)?;
        let right = self.links[i..j]
            .iter()
            .filter(|l| l.direction == Direction::Right)
            .count();
        Ok((j - i - right, right))
    }

    pub fn right_count(&self) -> usize {
        self.arrows().filter(|d| *d == Direction::Right).count()
    }

    pub fn left_count(&self) -> usize {
        self.len() - self.right_count()
    }

    /// The sub-chain `Mᵢ … Mⱼ`.
    pub fn slice(&self, i: usize, j: usize) -> Result<Self> {
        self.check_range(i, j)?;
        Ok(EqualityChain {
            terms: self.terms[i..=j].to_vec(),
            links: self.links[i..j].to_vec(),
        })
    }

    pub fn reverse(&self) -> Self {
        EqualityChain {
            terms: self.terms.iter().rev().cloned().collect(),
            links: self
                .links
                .iter()
                .rev()
                .map(|l| Link {
                    direction: l.direction.flip(),
                    witness: l.witness.clone(),
                })
                .collect(),
        }
    }

    /// Concatenation at the shared pivot term.
    pub fn append(&self, other: &EqualityChain) -> Result<Self> {
        if self.last() != other.first() {
            return Err(Error::AppendMismatch);
        }
        let mut out = self.clone();
        out.terms.extend(other.terms[1..].iter().cloned());
        out.links.extend(other.links.iter().cloned());
        Ok(out)
    }
}

fn find_witness(src: &Term, dst: &Term) -> Option<Position> {
    src.redexes()
        .into_iter()
        .find(|p| contract(src, p).is_ok_and(|s| s.target == *dst))
}
