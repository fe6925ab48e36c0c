//! Structural element tags.
//!
//! Elements of constructed sets (evaluations, composites, coproducts, trees)
//! carry a nested-tuple tag recording how they were built. Coherence
//! isomorphisms act on tags by re-nesting, so they are computable functions.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tag {
    Atom(u32),
    Seq(Arc<[Tag]>),
}

impl Tag {
    pub fn atom(i: usize) -> Tag {
        Tag::Atom(i as u32)
    }

    pub fn seq<I: IntoIterator<Item = Tag>>(items: I) -> Tag {
        Tag::Seq(items.into_iter().collect())
    }

    pub fn pair(a: Tag, b: Tag) -> Tag {
        Tag::Seq(Arc::from(vec![a, b]))
    }

    pub fn triple(a: Tag, b: Tag, c: Tag) -> Tag {
        Tag::Seq(Arc::from(vec![a, b, c]))
    }

    /// Summand tag for coproducts: `(k, inner)`.
    pub fn inj(k: usize, inner: Tag) -> Tag {
        Tag::pair(Tag::atom(k), inner)
    }

    pub fn as_atom(&self) -> Option<usize> {
        match self {
            Tag::Atom(a) => Some(*a as usize),
            Tag::Seq(_) => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Tag]> {
        match self {
            Tag::Atom(_) => None,
            Tag::Seq(items) => Some(items),
        }
    }

    /// Component `k` of a sequence tag.
    pub fn get(&self, k: usize) -> Option<&Tag> {
        self.as_seq().and_then(|s| s.get(k))
    }

    /// Splits a coproduct tag `(k, inner)`.
    pub fn as_inj(&self) -> Option<(usize, &Tag)> {
        match self.as_seq() {
            Some([k, inner]) => k.as_atom().map(|k| (k, inner)),
            _ => None,
        }
    }

    pub fn atoms(n: usize) -> Vec<Tag> {
        (0..n).map(Tag::atom).collect()
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Atom(a) => write!(f, "{a}"),
            Tag::Seq(items) => {
                write!(f, "(")?;
                for (k, t) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
