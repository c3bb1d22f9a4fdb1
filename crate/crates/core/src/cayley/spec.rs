use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::element::{
    char_letter, format_word, invert_word, is_reduced, reduce, GroupElement, Letter, MAX_FREE_RANK,
};
use crate::error::{Error, Result};

/// Which group and which generating set.
///
/// Text grammar:
/// - `free:<k>`: free group of rank `k`, standard basis;
/// - `free:<k>:gens=<w1>,<w2>,...`: same group, generating words `w_i`;
/// - `zd:<d>:gens=(v1),(v2),...`: `Z^d` generated by the `v_i` and their
///   negations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Free {
        rank: usize,
        /// `None` is the standard basis.
        gens: Option<Vec<Vec<Letter>>>,
    },
    Lattice {
        rank: usize,
        /// Given generators, deduplicated up to sign; negations implicit.
        gens: Vec<Vec<i64>>,
    },
}

pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let (family, rest) = text
        .split_once(':')
        .ok_or_else(|| Error::parse(0, "expected `free:<k>` or `zd:<d>:gens=...`"))?;
    let off = family.len() + 1;
    let (rank_text, tail) = match rest.split_once(':') {
        Some((r, t)) => (r, Some(t)),
        None => (rest, None),
    };
    let rank: usize = rank_text
        .parse()
        .map_err(|_| Error::parse(off, format!("bad rank {rank_text:?}")))?;
    if rank == 0 {
        return Err(Error::parse(off, "rank must be at least 1"));
    }
    let gens_off = off + rank_text.len() + 1;
    let gens_text = match tail {
        None => None,
        Some(t) => Some(
            t.strip_prefix("gens=")
                .ok_or_else(|| Error::parse(gens_off, "expected `gens=`"))?,
        ),
    };
    let gens_off = gens_off + "gens=".len();
    match family {
        "free" => {
            if rank > MAX_FREE_RANK {
                return Err(Error::parse(
                    off,
                    format!("free rank is at most {MAX_FREE_RANK}"),
                ));
            }
            let gens = gens_text
                .map(|g| parse_free_gens(g, rank, gens_off))
                .transpose()?;
            let spec = GroupSpec::Free { rank, gens };
            if let GroupSpec::Free { gens: Some(g), .. } = &spec {
                if !generates_free_group(g, rank) {
                    return Err(Error::parse(
                        gens_off,
                        format!("generators do not generate the free group of rank {rank}"),
                    ));
                }
            }
            Ok(spec)
        }
        "zd" => {
            let g = gens_text.ok_or_else(|| Error::parse(text.len(), "lattice needs `:gens=`"))?;
            let gens = parse_lattice_gens(g, rank, gens_off)?;
            if !spans_lattice(&gens, rank) {
                return Err(Error::parse(
                    gens_off,
                    format!("generators do not generate Z^{rank}"),
                ));
            }
            Ok(GroupSpec::Lattice { rank, gens })
        }
        _ => Err(Error::parse(0, format!("unknown family {family:?}"))),
    }
}

fn parse_free_gens(text: &str, rank: usize, off: usize) -> Result<Vec<Vec<Letter>>> {
    let mut out: Vec<Vec<Letter>> = Vec::new();
    let mut pos = off;
    for part in text.split(',') {
        let w = parse_word(part, rank, pos)?;
        if w.is_empty() {
            return Err(Error::parse(pos, "generator reduces to the identity"));
        }
        let inv = invert_word(&w);
        if !out.iter().any(|g| *g == w || *g == inv) {
            out.push(w);
        }
        pos += part.len() + 1;
    }
    Ok(out)
}

fn parse_lattice_gens(text: &str, rank: usize, off: usize) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for (at, v) in parse_vector_list(text, rank, off)? {
        if v.iter().all(|&c| c == 0) {
            return Err(Error::parse(at, "zero generator"));
        }
        let neg: Vec<i64> = v.iter().map(|c| -c).collect();
        if !out.iter().any(|g| *g == v || *g == neg) {
            out.push(v);
        }
    }
    Ok(out)
}

/// `(..),(..),...`, each vector paired with its offset.
pub(crate) fn parse_vector_list(
    text: &str,
    rank: usize,
    off: usize,
) -> Result<Vec<(usize, Vec<i64>)>> {
    let mut out = Vec::new();
    let mut pos = 0;
    let bytes = text.as_bytes();
    while pos < bytes.len() {
        if bytes[pos] != b'(' {
            return Err(Error::parse(off + pos, "expected `(`"));
        }
        let close = text[pos..]
            .find(')')
            .ok_or_else(|| Error::parse(off + pos, "unclosed `(`"))?
            + pos;
        out.push((
            off + pos,
            parse_vector(&text[pos..=close], rank, off + pos)?,
        ));
        pos = close + 1;
        if pos < bytes.len() {
            if bytes[pos] != b',' {
                return Err(Error::parse(off + pos, "expected `,` between vectors"));
            }
            pos += 1;
            if pos == bytes.len() {
                return Err(Error::parse(off + pos, "trailing `,`"));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::parse(off, "no vectors"));
    }
    Ok(out)
}

/// `(c1,...,cd)`.
pub(crate) fn parse_vector(text: &str, rank: usize, off: usize) -> Result<Vec<i64>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::parse(off, format!("expected a vector `(..)`, got {text:?}")))?;
    let mut v = Vec::with_capacity(rank);
    let mut pos = off + 1;
    for c in inner.split(',') {
        v.push(
            c.trim()
                .parse::<i64>()
                .map_err(|_| Error::parse(pos, format!("bad coordinate {c:?}")))?,
        );
        pos += c.len() + 1;
    }
    if v.len() != rank {
        return Err(Error::parse(
            off,
            format!("expected {rank} coordinates, got {}", v.len()),
        ));
    }
    Ok(v)
}

/// Letters `a b c d f ...` (no `e`), uppercase for inverses, optional
/// `^n` exponents and parenthesised groups: `aB`, `a^-3`, `(ab)^4b`.
pub(crate) fn parse_word(text: &str, rank: usize, off: usize) -> Result<Vec<Letter>> {
    let t = text.trim();
    if t == "e" || t == "1" {
        return Ok(Vec::new());
    }
    let chars: Vec<char> = t.chars().collect();
    let mut pos = 0;
    let w = parse_seq(&chars, &mut pos, rank, off)?;
    if pos != chars.len() {
        return Err(Error::parse(off + pos, "unbalanced `)`"));
    }
    Ok(reduce(w))
}

fn parse_seq(chars: &[char], pos: &mut usize, rank: usize, off: usize) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    while *pos < chars.len() {
        let c = chars[*pos];
        let unit: Vec<Letter> = if c == '(' {
            *pos += 1;
            let inner = parse_seq(chars, pos, rank, off)?;
            if chars.get(*pos) != Some(&')') {
                return Err(Error::parse(off + *pos, "expected `)`"));
            }
            *pos += 1;
            inner
        } else if c == ')' {
            break;
        } else {
            let l = char_letter(c)
                .filter(|l| (l.unsigned_abs() as usize) <= rank)
                .ok_or_else(|| Error::parse(off + *pos, format!("bad letter {c:?}")))?;
            *pos += 1;
            vec![l]
        };
        let mut exp: i64 = 1;
        if chars.get(*pos) == Some(&'^') {
            *pos += 1;
            let start = *pos;
            if chars.get(*pos) == Some(&'-') {
                *pos += 1;
            }
            while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let s: String = chars[start..*pos].iter().collect();
            exp = s
                .parse()
                .map_err(|_| Error::parse(off + start, format!("bad exponent {s:?}")))?;
        }
        let piece = if exp < 0 { invert_word(&unit) } else { unit };
        for _ in 0..exp.unsigned_abs() {
            out.extend_from_slice(&piece);
        }
    }
    Ok(out)
}

/// Stallings folding: the subgroup generated by `gens` is all of `F_rank`
/// iff the folded flower graph is the rose with one loop per letter.
fn generates_free_group(gens: &[Vec<Letter>], rank: usize) -> bool {
    // edges (u, letter, v) with letter > 0; inverse edges are implicit
    let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
    let mut vertices = 1;
    for w in gens {
        let mut at = 0;
        for (i, &l) in w.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                vertices += 1;
                vertices - 1
            };
            if l > 0 {
                edges.push((at, l, next));
            } else {
                edges.push((next, -l, at));
            }
            at = next;
        }
    }
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    loop {
        let mut out: HashMap<(usize, Letter), usize> = HashMap::new();
        let mut merged = false;
        for &(u, l, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (from, lab, to) in [(u, l, v), (v, -l, u)] {
                match out.get(&(from, lab)) {
                    Some(&t) => {
                        let (t, to) = (find(&mut parent, t), find(&mut parent, to));
                        if t != to {
                            parent[t.max(to)] = t.min(to);
                            merged = true;
                        }
                    }
                    None => {
                        out.insert((from, lab), to);
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let roots: std::collections::BTreeSet<usize> =
        (0..vertices).map(|v| find(&mut parent, v)).collect();
    let letters: std::collections::BTreeSet<Letter> = edges.iter().map(|e| e.1).collect();
    roots.len() == 1 && letters.len() == rank
}

/// The generated subgroup is `Z^rank` iff the row-echelon form over the
/// integers has `rank` pivots of absolute value 1.
fn spans_lattice(gens: &[Vec<i64>], rank: usize) -> bool {
    let mut m: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|&c| c as i128).collect())
        .collect();
    let mut det: i128 = 1;
    for col in 0..rank {
        let row = col;
        // Euclid down the column until at most one nonzero entry remains.
        loop {
            let mut nz: Vec<usize> = (row..m.len()).filter(|&r| m[r][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    m.swap(row, r);
                }
                break;
            }
            nz.sort_by_key(|&r| m[r][col].abs());
            let pivot = m[nz[0]].clone();
            for &r in &nz[1..] {
                let q = m[r][col] / pivot[col];
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= q * y;
                }
            }
        }
        if row >= m.len() || m[row][col] == 0 {
            return false;
        }
        det *= m[row][col].abs();
    }
    det == 1
}

impl GroupSpec {
    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Free { rank, .. } | GroupSpec::Lattice { rank, .. } => *rank,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, GroupSpec::Free { .. })
    }

    /// Free group with its standard basis.
    pub fn is_standard_free(&self) -> bool {
        matches!(self, GroupSpec::Free { gens: None, .. })
    }

    /// Free groups and `Z` are hyperbolic; `Z^d` for `d >= 2` is not.
    pub fn is_hyperbolic(&self) -> bool {
        match self {
            GroupSpec::Free { .. } => true,
            GroupSpec::Lattice { rank, .. } => *rank == 1,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Free { .. } => GroupElement::Word(Vec::new()),
            GroupSpec::Lattice { rank, .. } => GroupElement::Vector(vec![0; *rank]),
        }
    }

    /// The symmetric generating set, each generator followed by its inverse.
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            GroupSpec::Free { rank, gens: None } => (1..=*rank as Letter)
                .flat_map(|l| [GroupElement::Word(vec![l]), GroupElement::Word(vec![-l])])
                .collect(),
            GroupSpec::Free { gens: Some(g), .. } => g
                .iter()
                .flat_map(|w| {
                    [
                        GroupElement::Word(w.clone()),
                        GroupElement::Word(invert_word(w)),
                    ]
                })
                .collect(),
            GroupSpec::Lattice { gens, .. } => gens
                .iter()
                .flat_map(|v| {
                    [
                        GroupElement::Vector(v.clone()),
                        GroupElement::Vector(v.iter().map(|c| -c).collect()),
                    ]
                })
                .collect(),
        }
    }

    /// Checks that `g` is an element of this group.
    pub fn check(&self, g: &GroupElement) -> Result<()> {
        let ok = match (self, g) {
            (GroupSpec::Free { rank, .. }, GroupElement::Word(w)) => {
                is_reduced(w)
                    && w.iter()
                        .all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank)
            }
            (GroupSpec::Lattice { rank, .. }, GroupElement::Vector(v)) => v.len() == *rank,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{g} is not an element of {self}")))
        }
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (x, y) {
            (GroupElement::Word(a), GroupElement::Word(b)) => {
                // cancel the suffix of a against the prefix of b
                let k = a
                    .iter()
                    .rev()
                    .zip(b)
                    .take_while(|(p, q)| **p == -**q)
                    .count();
                let mut w = a[..a.len() - k].to_vec();
                w.extend_from_slice(&b[k..]);
                GroupElement::Word(w)
            }
            (GroupElement::Vector(a), GroupElement::Vector(b)) => {
                GroupElement::Vector(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(match x {
            GroupElement::Word(w) => GroupElement::Word(invert_word(w)),
            GroupElement::Vector(v) => GroupElement::Vector(v.iter().map(|c| -c).collect()),
        })
    }

    /// `x⁻¹y`.
    pub fn quotient(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.multiply(&self.inverse(x)?, y)
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        match self {
            GroupSpec::Free { rank, .. } => parse_word(text, *rank, 0).map(GroupElement::Word),
            GroupSpec::Lattice { rank, .. } => {
                if text.trim() == "e" {
                    Ok(self.identity())
                } else {
                    parse_vector(text, *rank, 0).map(GroupElement::Vector)
                }
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Free { rank, gens: None } => write!(f, "free:{rank}"),
            GroupSpec::Free {
                rank,
                gens: Some(g),
            } => {
                let g: Vec<String> = g.iter().map(|w| format_word(w)).collect();
                write!(f, "free:{rank}:gens={}", g.join(","))
            }
            GroupSpec::Lattice { rank, gens } => {
                let g: Vec<String> = gens
                    .iter()
                    .map(|v| GroupElement::Vector(v.clone()).to_string())
                    .collect();
                write!(f, "zd:{rank}:gens={}", g.join(","))
            }
        }
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
