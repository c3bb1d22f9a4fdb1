use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::element::GroupElement;
use super::metric::WordMetric;
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use crate::metric::MetricWindow;

/// Default element cap for balls and BFS tables.
pub const DEFAULT_CAP: u64 = 5_000_000;

/// All elements of norm at most `radius`, in BFS order (norm, then
/// discovery order through the generators).
#[derive(Debug, Clone)]
pub struct CayleyBall {
    spec: GroupSpec,
    radius: u32,
    elements: Vec<GroupElement>,
    norms: Vec<u32>,
    index: HashMap<GroupElement, usize>,
}

/// Upper bound on the number of elements of norm at most `radius`.
pub fn estimate_ball_size(spec: &GroupSpec, radius: u32) -> u128 {
    let s = spec.generators().len() as u128;
    // non-backtracking words over the symmetric generating set
    let mut words: u128 = 1;
    let mut layer: u128 = s;
    for _ in 0..radius {
        words = words.saturating_add(layer);
        layer = layer.saturating_mul(s - 1);
    }
    let geometric = match spec {
        GroupSpec::Free { rank, gens } => {
            let maxlen = gens
                .as_ref()
                .map_or(1, |g| g.iter().map(Vec::len).max().unwrap_or(1))
                as u32;
            let k = 2 * *rank as u128;
            let mut total: u128 = 1;
            let mut layer = k;
            for _ in 0..radius.saturating_mul(maxlen) {
                total = total.saturating_add(layer);
                layer = layer.saturating_mul(k - 1);
                if total == u128::MAX {
                    break;
                }
            }
            total
        }
        GroupSpec::Lattice { rank, gens } => {
            let m = gens
                .iter()
                .flatten()
                .map(|c| c.unsigned_abs() as u128)
                .max()
                .unwrap_or(1);
            let side = 2 * m * radius as u128 + 1;
            (0..*rank).fold(1u128, |acc, _| acc.saturating_mul(side))
        }
    };
    words.min(geometric)
}

pub(crate) type BfsTable = (Vec<GroupElement>, Vec<u32>, HashMap<GroupElement, usize>);

pub(crate) fn bfs(spec: &GroupSpec, radius: u32, cap: u64, what: &str) -> Result<BfsTable> {
    let estimate = estimate_ball_size(spec, radius);
    if estimate > cap as u128 {
        return Err(Error::ResourceCap {
            what: format!("{what} for {spec} at radius {radius}"),
            estimate,
            cap,
        });
    }
    let gens = spec.generators();
    let e = spec.identity();
    let mut elements = vec![e.clone()];
    let mut norms = vec![0u32];
    let mut index = HashMap::from([(e, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if norms[i] == radius {
            continue;
        }
        for s in &gens {
            let next = spec.multiply(&elements[i], s)?;
            if index.contains_key(&next) {
                continue;
            }
            if elements.len() as u64 >= cap {
                return Err(Error::ResourceCap {
                    what: format!("{what} for {spec} at radius {radius}"),
                    estimate,
                    cap,
                });
            }
            index.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(next);
            norms.push(norms[i] + 1);
        }
    }
    Ok((elements, norms, index))
}

pub fn build_ball(spec: &GroupSpec, radius: u32) -> Result<CayleyBall> {
    CayleyBall::with_cap(spec, radius, DEFAULT_CAP)
}

/// All elements of norm exactly `r`.
pub fn sphere(ball: &CayleyBall, r: u32) -> Result<Vec<GroupElement>> {
    ball.sphere(r).map(|s| s.to_vec())
}

#[derive(Serialize)]
struct BallEntry<'a> {
    id: usize,
    repr: &'a GroupElement,
    norm: u32,
}

#[derive(Serialize)]
struct BallJson<'a> {
    spec: &'a GroupSpec,
    radius: u32,
    elements: Vec<BallEntry<'a>>,
}

impl CayleyBall {
    pub fn with_cap(spec: &GroupSpec, radius: u32, cap: u64) -> Result<Self> {
        let (elements, norms, index) = bfs(spec, radius, cap, "ball")?;
        Ok(CayleyBall {
            spec: spec.clone(),
            radius,
            elements,
            norms,
            index,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn norms(&self) -> &[u32] {
        &self.norms
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn sphere(&self, r: u32) -> Result<&[GroupElement]> {
        if r > self.radius {
            return Err(Error::OutOfWindow {
                element: format!("sphere of radius {r}"),
                radius: self.radius,
            });
        }
        // BFS order groups elements by norm
        let lo = self.norms.partition_point(|&n| n < r);
        let hi = self.norms.partition_point(|&n| n <= r);
        Ok(&self.elements[lo..hi])
    }

    /// Elements of norm at most `r`, as a prefix of the BFS order.
    pub fn sub_ball(&self, r: u32) -> &[GroupElement] {
        let hi = self.norms.partition_point(|&n| n <= r);
        &self.elements[..hi]
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = BallJson {
            spec: &self.spec,
            radius: self.radius,
            elements: self
                .elements
                .iter()
                .zip(&self.norms)
                .enumerate()
                .map(|(id, (repr, &norm))| BallEntry { id, repr, norm })
                .collect(),
        };
        serde_json::to_value(j).expect("ball serializes")
    }

    /// The ball as a metric window based at `e`.
    pub fn window(&self) -> Result<MetricWindow> {
        let metric = WordMetric::new(&self.spec, 2 * self.radius)?;
        let n = self.len();
        let mut dist = vec![0u32; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.dist(&self.elements[i], &self.elements[j])?;
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let labels = self.elements.iter().map(|g| g.to_string()).collect();
        MetricWindow::from_numerators(n, 0, 1, dist, labels)
    }
}
