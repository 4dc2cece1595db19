//! Paths from a term's root to one of its subterm occurrences.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::ParsePositionError;

/// One edge of a path through a term tree.
///
/// `Fun` and `Arg` descend into an application, `Body` into an abstraction.
/// The derived order `Fun < Arg < Body` makes [`Position`] order
/// lexicographic, which coincides with a left-to-right preorder walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Fun,
    Arg,
    Body,
}

impl Dir {
    pub fn name(self) -> &'static str {
        match self {
            Dir::Fun => "Fun",
            Dir::Arg => "Arg",
            Dir::Body => "Body",
        }
    }
}

/// How two positions of the same term relate as subterm occurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubtermRelation {
    Equal,
    /// The first position lies strictly inside the second.
    Inside,
    /// The second position lies strictly inside the first.
    Encloses,
    /// Neither contains the other (the subterms do not overlap).
    Disjoint,
}

/// A path from the root of a term; the empty path is the root itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(Vec<Dir>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_dirs(dirs: impl IntoIterator<Item = Dir>) -> Self {
        Position(dirs.into_iter().collect())
    }

    pub fn dirs(&self) -> &[Dir] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn push(&mut self, dir: Dir) {
        self.0.push(dir);
    }

    pub fn child(&self, dir: Dir) -> Self {
        let mut dirs = Vec::with_capacity(self.0.len() + 1);
        dirs.extend_from_slice(&self.0);
        dirs.push(dir);
        Position(dirs)
    }

    /// `prefix` followed by `self`.
    pub fn under(&self, prefix: &Position) -> Self {
        let mut dirs = Vec::with_capacity(prefix.0.len() + self.0.len());
        dirs.extend_from_slice(&prefix.0);
        dirs.extend_from_slice(&self.0);
        Position(dirs)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The remainder of `self` after `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Position) -> Option<Position> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Position(rest.to_vec()))
    }

    pub fn relation(&self, other: &Position) -> SubtermRelation {
        if self == other {
            SubtermRelation::Equal
        } else if other.is_prefix_of(self) {
            SubtermRelation::Inside
        } else if self.is_prefix_of(other) {
            SubtermRelation::Encloses
        } else {
            SubtermRelation::Disjoint
        }
    }
}

impl From<Vec<Dir>> for Position {
    fn from(dirs: Vec<Dir>) -> Self {
        Position(dirs)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, dir) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(dir.name())?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = ParsePositionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "root" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part {
                "Fun" => Ok(Dir::Fun),
                "Arg" => Ok(Dir::Arg),
                "Body" => Ok(Dir::Body),
                _ => Err(ParsePositionError),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}
