use std::fmt;

use serde::{Serialize, Serializer};

/// A free-group letter: generator `i` is `i` (1-based), its inverse `-i`.
pub type Letter = i8;

// `e` is reserved for the identity.
const ALPHABET: &[u8] = b"abcdfghijklmnopqrstuvwxyz";

pub(crate) const MAX_FREE_RANK: usize = ALPHABET.len();

pub fn letter_char(l: Letter) -> char {
    let c = ALPHABET[(l.unsigned_abs() - 1) as usize] as char;
    if l > 0 {
        c
    } else {
        c.to_ascii_uppercase()
    }
}

pub(crate) fn char_letter(c: char) -> Option<Letter> {
    let lower = c.to_ascii_lowercase() as u8;
    let i = ALPHABET.iter().position(|&a| a == lower)? as Letter + 1;
    Some(if c.is_ascii_uppercase() { -i } else { i })
}

pub fn format_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "e".to_string()
    } else {
        w.iter().map(|&l| letter_char(l)).collect()
    }
}

/// Appends `l` to a reduced word, cancelling against its last letter.
#[inline]
pub(crate) fn push_reduced(w: &mut Vec<Letter>, l: Letter) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

pub(crate) fn reduce(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut w = Vec::new();
    for l in letters {
        push_reduced(&mut w, l);
    }
    w
}

pub(crate) fn invert_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&l| -l).collect()
}

pub(crate) fn is_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != -p[1])
}

/// An element of a free group (reduced word) or of a lattice (vector).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Word(Vec<Letter>),
    Vector(Vec<i64>),
}

impl GroupElement {
    pub fn word(letters: impl IntoIterator<Item = Letter>) -> Self {
        GroupElement::Word(reduce(letters))
    }

    pub fn as_word(&self) -> Option<&[Letter]> {
        match self {
            GroupElement::Word(w) => Some(w),
            GroupElement::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            GroupElement::Word(_) => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Vector(v) => v.iter().all(|&c| c == 0),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Word(w) => f.write_str(&format_word(w)),
            GroupElement::Vector(v) => {
                f.write_str("(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
