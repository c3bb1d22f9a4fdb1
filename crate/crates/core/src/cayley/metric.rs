use std::collections::HashMap;

use super::ball::{bfs, DEFAULT_CAP};
use super::element::{invert_word, reduce, GroupElement, Letter};
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::exact::{int, Exact, HalfExact};
use crate::metric::{horofunction_from_distances, product_from_distances};

/// Exact word metric on a group, valid for elements of norm at most
/// `radius`.
///
/// Free groups with the standard basis use the reduced length. Free groups
/// whose generating set is closed under junction cancellation (every
/// product `pq` of generators that cancels reduces to a generator or `e`)
/// use the shortest segmentation of the reduced word into generators,
/// which is exact for such sets. Everything else reads a BFS table.
#[derive(Debug, Clone)]
pub struct WordMetric {
    spec: GroupSpec,
    radius: u32,
    norms: Norms,
}

#[derive(Debug, Clone)]
enum Norms {
    Reduced,
    Segmentation(Vec<Vec<Letter>>),
    Table(HashMap<GroupElement, u32>),
}

impl WordMetric {
    pub fn new(spec: &GroupSpec, radius: u32) -> Result<Self> {
        Self::with_cap(spec, radius, DEFAULT_CAP)
    }

    pub fn with_cap(spec: &GroupSpec, radius: u32, cap: u64) -> Result<Self> {
        let norms = match spec {
            GroupSpec::Free { gens: None, .. } => Norms::Reduced,
            GroupSpec::Free { gens: Some(g), .. } if segmentation_closed(g) => {
                let mut pieces: Vec<Vec<Letter>> =
                    g.iter().flat_map(|w| [w.clone(), invert_word(w)]).collect();
                pieces.sort();
                pieces.dedup();
                Norms::Segmentation(pieces)
            }
            _ => {
                let (elements, norms, _) = bfs(spec, radius, cap, "word-metric table")?;
                Norms::Table(elements.into_iter().zip(norms).collect())
            }
        };
        Ok(WordMetric {
            spec: spec.clone(),
            radius,
            norms,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    fn out_of_window(&self, g: &GroupElement) -> Error {
        Error::OutOfWindow {
            element: g.to_string(),
            radius: self.radius,
        }
    }

    /// `|g|`, or an out-of-window error when `|g| > radius`.
    pub fn norm(&self, g: &GroupElement) -> Result<u32> {
        self.spec.check(g)?;
        let n = match (&self.norms, g) {
            (Norms::Reduced, GroupElement::Word(w)) => w.len() as u32,
            (Norms::Segmentation(pieces), GroupElement::Word(w)) => {
                segment(w, pieces).ok_or_else(|| self.out_of_window(g))?
            }
            (Norms::Table(t), g) => *t.get(g).ok_or_else(|| self.out_of_window(g))?,
            _ => unreachable!("spec.check guarantees the element kind"),
        };
        if n > self.radius {
            return Err(self.out_of_window(g));
        }
        Ok(n)
    }

    /// `d(x,y) = |x⁻¹y|`.
    pub fn dist(&self, x: &GroupElement, y: &GroupElement) -> Result<u32> {
        if let (Norms::Reduced, GroupElement::Word(a), GroupElement::Word(b)) = (&self.norms, x, y)
        {
            self.spec.check(x)?;
            self.spec.check(y)?;
            let cp = a.iter().zip(b).take_while(|(p, q)| p == q).count();
            let d = (a.len() + b.len() - 2 * cp) as u32;
            if d > self.radius {
                return Err(Error::OutOfWindow {
                    element: format!("{x}⁻¹{y}"),
                    radius: self.radius,
                });
            }
            return Ok(d);
        }
        self.norm(&self.spec.quotient(x, y)?)
    }

    /// `(x·y)` with base point `e`.
    pub fn product(&self, x: &GroupElement, y: &GroupElement) -> Result<HalfExact> {
        Ok(product_from_distances(
            int(self.norm(x)? as i64),
            int(self.norm(y)? as i64),
            int(self.dist(x, y)? as i64),
        ))
    }

    /// `(x·y)` with base point `base`.
    pub fn product_based(
        &self,
        x: &GroupElement,
        y: &GroupElement,
        base: &GroupElement,
    ) -> Result<HalfExact> {
        Ok(product_from_distances(
            int(self.dist(x, base)? as i64),
            int(self.dist(y, base)? as i64),
            int(self.dist(x, y)? as i64),
        ))
    }

    /// `φ_z(x) = d(x,e) - d(x,z)`.
    pub fn horofunction(&self, z: &GroupElement, x: &GroupElement) -> Result<Exact> {
        Ok(horofunction_from_distances(
            int(self.norm(x)? as i64),
            int(self.dist(x, z)? as i64),
        ))
    }

    /// `d(x,z) + d(z,y) = d(x,y)`.
    pub fn on_geodesic(
        &self,
        x: &GroupElement,
        y: &GroupElement,
        z: &GroupElement,
    ) -> Result<bool> {
        Ok(self.dist(x, z)? + self.dist(z, y)? == self.dist(x, y)?)
    }
}

/// Every cancelling product of two generators is a generator or `e`.
fn segmentation_closed(gens: &[Vec<Letter>]) -> bool {
    let pieces: Vec<Vec<Letter>> = gens
        .iter()
        .flat_map(|w| [w.clone(), invert_word(w)])
        .collect();
    pieces.iter().all(|p| {
        pieces.iter().all(|q| {
            if p.last() != q.first().map(|l| -l).as_ref() {
                return true;
            }
            let r = reduce(p.iter().chain(q).copied());
            r.is_empty() || pieces.contains(&r)
        })
    })
}

/// Fewest pieces whose concatenation is `w`.
fn segment(w: &[Letter], pieces: &[Vec<Letter>]) -> Option<u32> {
    let mut best = vec![u32::MAX; w.len() + 1];
    best[0] = 0;
    for i in 1..=w.len() {
        for p in pieces {
            if p.len() <= i && best[i - p.len()] != u32::MAX && w[i - p.len()..i] == p[..] {
                best[i] = best[i].min(best[i - p.len()] + 1);
            }
        }
    }
    (best[w.len()] != u32::MAX).then_some(best[w.len()])
}

/// `|g|` for `|g| <= radius`.
pub fn word_norm(spec: &GroupSpec, g: &GroupElement, radius: u32) -> Result<u32> {
    WordMetric::new(spec, radius)?.norm(g)
}

/// Is `z` on some geodesic from `x` to `y`?
pub fn on_geodesic(
    spec: &GroupSpec,
    x: &GroupElement,
    y: &GroupElement,
    z: &GroupElement,
    radius: u32,
) -> Result<bool> {
    WordMetric::new(spec, radius)?.on_geodesic(x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::parse_group_spec;

    #[test]
    fn segmentation_matches_bfs_table() {
        let spec = parse_group_spec("free:2:gens=a,b,ab").unwrap();
        let seg = WordMetric::new(&spec, 6).unwrap();
        assert!(matches!(seg.norms, Norms::Segmentation(_)));
        let (elements, norms, _) = bfs(&spec, 6, DEFAULT_CAP, "t").unwrap();
        for (g, n) in elements.iter().zip(norms) {
            assert_eq!(seg.norm(g).unwrap(), n, "{g}");
        }
    }

    #[test]
    fn non_closed_sets_fall_back_to_tables() {
        let spec = parse_group_spec("free:2:gens=aba,ab").unwrap();
        let m = WordMetric::new(&spec, 4).unwrap();
        assert!(matches!(m.norms, Norms::Table(_)));
        assert_eq!(m.norm(&spec.parse_element("a").unwrap()).unwrap(), 2);
    }

    #[test]
    fn out_of_window() {
        let f2 = parse_group_spec("free:2").unwrap();
        let g = f2.parse_element("a^5").unwrap();
        assert_eq!(word_norm(&f2, &g, 5).unwrap(), 5);
        assert!(matches!(
            word_norm(&f2, &g, 4),
            Err(Error::OutOfWindow { .. })
        ));
    }

    #[test]
    fn word_norm_examples() {
        let f2 = parse_group_spec("free:2").unwrap();
        assert_eq!(
            word_norm(&f2, &f2.parse_element("abA").unwrap(), 10).unwrap(),
            3
        );
        assert_eq!(word_norm(&f2, &f2.identity(), 0).unwrap(), 0);
        let kings = parse_group_spec("zd:2:gens=(1,0),(0,1),(1,1),(1,-1)").unwrap();
        let g = kings.parse_element("(3,2)").unwrap();
        assert_eq!(word_norm(&kings, &g, 5).unwrap(), 3);
        assert_eq!(word_norm(&kings, &kings.identity(), 0).unwrap(), 0);
    }

    #[test]
    fn on_geodesic_examples() {
        let z2 = parse_group_spec("zd:2:gens=(1,0),(0,1)").unwrap();
        let p = |s: &str| z2.parse_element(s).unwrap();
        assert!(on_geodesic(&z2, &p("(4,0)"), &p("(0,4)"), &p("(2,2)"), 8).unwrap());
        assert!(on_geodesic(&z2, &p("(4,0)"), &p("(0,4)"), &p("(4,0)"), 8).unwrap());
        let f2 = parse_group_spec("free:2").unwrap();
        let w = |s: &str| f2.parse_element(s).unwrap();
        assert!(!on_geodesic(&f2, &w("aa"), &w("bb"), &w("ab"), 8).unwrap());
    }
}
