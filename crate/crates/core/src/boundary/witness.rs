use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::Serialize;

use super::certificate::converges_to_infinity;
use super::sample::BoundarySample;
use crate::cayley::{GroupElement, WordMetric};
use crate::error::{Error, Result};
use crate::exact::{format_exact, int, serde_exact, Exact};

/// Points at distance `r` from `e` lying on some geodesic from `e` to `x`:
/// `{y : |y| = r, |y| + d(y,x) = |x|}`.
///
/// Walks down from `x` one sphere at a time; a neighbour one step closer to
/// `e` of a point on a geodesic is again on a geodesic.
pub fn geodesic_layer(
    metric: &WordMetric,
    x: &GroupElement,
    r: u32,
) -> Result<BTreeSet<GroupElement>> {
    let spec = metric.spec();
    let gens = spec.generators();
    let mut level = metric.norm(x)?;
    if r > level {
        return Ok(BTreeSet::new());
    }
    let mut layer = BTreeSet::from([x.clone()]);
    while level > r {
        let mut next = BTreeSet::new();
        for y in &layer {
            for s in &gens {
                let w = spec.multiply(y, s)?;
                if metric.norm(&w)? + 1 == level {
                    next.insert(w);
                }
            }
        }
        layer = next;
        level -= 1;
    }
    Ok(layer)
}

/// A sphere point `z` with `φ_z(x_n) = r > N` along a subsequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaWitness {
    pub z: GroupElement,
    pub r: u32,
    #[serde(with = "serde_exact")]
    pub bound: Exact,
    /// Every `n` (1-based) with `|x_n| ≥ r` and `z` on a geodesic to `x_n`.
    pub indices: Vec<usize>,
    /// Occurrences of `z` among the last `⌊H/2⌋` indices, and that count.
    pub recurrence: usize,
    pub window: usize,
}

impl LemmaWitness {
    /// Recomputes `φ_z(x_n)` at every returned index.
    pub fn replay(&self, s: &BoundarySample, metric: &WordMetric) -> Result<bool> {
        for &n in &self.indices {
            if metric.horofunction(&self.z, s.point(n))? != self.bound {
                return Ok(false);
            }
        }
        Ok(!self.indices.is_empty())
    }
}

/// For `r` the least integer above `N + ε`, finds a point of the sphere
/// `S(e, r)` that lies on geodesics `[e, x_n]` for at least half of the
/// last `⌊H/2⌋` indices, and returns it with `φ_z(x_n) = r` certified on
/// that subsequence.
///
/// In an integer metric with `ε < 1` the ε/2-clustering on the sphere is
/// exact recurrence of one sphere point.
pub fn witness_large_horofunction(
    s: &BoundarySample,
    n_bound: Exact,
    epsilon: Exact,
    metric: &WordMetric,
) -> Result<LemmaWitness> {
    s.check_metric(metric)?;
    if !epsilon.is_positive() || epsilon >= int(1) {
        return Err(Error::Precondition(format!(
            "epsilon must lie in (0, 1), got {}",
            format_exact(&epsilon)
        )));
    }
    let r = (n_bound + epsilon).floor().to_integer() + 1;
    let r = u32::try_from(r.max(0)).map_err(|_| Error::Precondition("radius overflow".into()))?;
    if r > metric.radius() {
        return Err(Error::OutOfWindow {
            element: format!("sphere of radius {r}"),
            radius: metric.radius(),
        });
    }
    if !converges_to_infinity(s, int(r as i64), metric)?.passes() {
        return Err(Error::Precondition(format!(
            "sample {} does not converge to infinity at M = {r}",
            s.label
        )));
    }
    let h = s.horizon();
    let window = h / 2;
    let mut layers: Vec<Option<BTreeSet<GroupElement>>> = Vec::with_capacity(h);
    for (x, &norm) in s.points().iter().zip(s.norms()) {
        layers.push(if norm >= r {
            Some(geodesic_layer(metric, x, r)?)
        } else {
            None
        });
    }
    let mut counts: BTreeMap<&GroupElement, usize> = BTreeMap::new();
    for layer in layers[h - window..].iter().flatten() {
        for z in layer {
            *counts.entry(z).or_default() += 1;
        }
    }
    // most frequent, ties to the smallest element
    let best = counts
        .iter()
        .fold(None::<(&GroupElement, usize)>, |acc, (&z, &c)| match acc {
            Some((_, bc)) if bc >= c => acc,
            _ => Some((z, c)),
        });
    let (z, recurrence) = match best {
        Some((z, c)) if window > 0 && 2 * c >= window => (z.clone(), c),
        _ => {
            return Err(Error::Inconclusive(format!(
                "no point of S(e, {r}) recurs on half of the last {window} geodesics of {}; \
                 try a longer horizon or a wider window",
                s.label
            )))
        }
    };
    let indices = layers
        .iter()
        .enumerate()
        .filter(|(_, l)| l.as_ref().is_some_and(|l| l.contains(&z)))
        .map(|(i, _)| i + 1)
        .collect();
    Ok(LemmaWitness {
        z,
        r,
        bound: int(r as i64),
        indices,
        recurrence,
        window,
    })
}
