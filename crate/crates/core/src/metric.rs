//! Finite metric windows: Gromov products, horofunctions and the minimal
//! hyperbolicity constant.
//!
//! Distances are exact rationals sharing one common denominator (`scale`),
//! so internally every distance is an integer numerator. A doubled Gromov
//! product `d(x,0) + d(y,0) - d(x,y)` is then an integer too, which is what
//! the triple-scan kernel in [`MetricWindow::min_delta`] runs on.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Exact, HalfExact};
use crate::par::{self, Execution};

pub type PointId = usize;

/// `(x·y)` from the three distances it is built from.
pub fn product_from_distances(dx0: Exact, dy0: Exact, dxy: Exact) -> HalfExact {
    HalfExact::from_doubled(dx0 + dy0 - dxy)
}

/// `φ_z(x) = d(x,0) - d(x,z)`.
pub fn horofunction_from_distances(dx0: Exact, dxz: Exact) -> Exact {
    dx0 - dxz
}

/// A finite metric space with a base point and a total exact distance.
#[derive(Debug, Clone)]
pub struct MetricWindow {
    n: usize,
    base: PointId,
    scale: i64,
    // numerators over `scale`, row-major n×n
    dist: Vec<u32>,
    labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub x: PointId,
    pub y: PointId,
    pub z: PointId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub delta: HalfExact,
    /// Lexicographically smallest triple attaining `delta`, when `delta > 0`.
    pub witness: Option<Triple>,
    pub witness_labels: Option<[String; 3]>,
    pub points: usize,
}

impl MetricWindow {
    /// Builds a window from a distance oracle, checking every metric axiom.
    ///
    /// `dist` returning `None` for any pair is a construction error: the
    /// oracle must be total on the window.
    pub fn from_fn<F>(n: usize, base: PointId, labels: Vec<String>, dist: F) -> Result<Self>
    where
        F: Fn(PointId, PointId) -> Option<Exact>,
    {
        let mut raw = Vec::with_capacity(n * n);
        let mut scale: i64 = 1;
        for i in 0..n {
            for j in 0..n {
                let d = dist(i, j).ok_or_else(|| {
                    Error::Construction(format!("distance oracle undefined on ({i}, {j})"))
                })?;
                scale = scale.lcm(d.denom());
                raw.push(d);
            }
        }
        let mut nums = Vec::with_capacity(n * n);
        for d in &raw {
            let v = d.numer() * (scale / d.denom());
            let v = u32::try_from(v).map_err(|_| {
                Error::Construction(format!("distance {d} is negative or too large"))
            })?;
            nums.push(v);
        }
        let w = Self::from_numerators(n, base, scale, nums, labels)?;
        w.check_triangle()?;
        Ok(w)
    }

    /// Builds a window from integer numerators over `scale`, checking the
    /// O(n²) axioms only. Callers vouch for the triangle inequality (word
    /// metrics satisfy it by construction).
    pub fn from_numerators(
        n: usize,
        base: PointId,
        scale: i64,
        dist: Vec<u32>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if scale <= 0 {
            return Err(Error::Construction("scale must be positive".into()));
        }
        if dist.len() != n * n {
            return Err(Error::Construction(format!(
                "expected {} distances, got {}",
                n * n,
                dist.len()
            )));
        }
        if n > 0 && base >= n {
            return Err(Error::Construction(format!("base {base} not in window")));
        }
        let labels = if labels.len() == n {
            labels
        } else {
            (0..n).map(|i| i.to_string()).collect()
        };
        for i in 0..n {
            if dist[i * n + i] != 0 {
                return Err(Error::Construction(format!("d({i},{i}) != 0")));
            }
            for j in (i + 1)..n {
                let (a, b) = (dist[i * n + j], dist[j * n + i]);
                if a != b {
                    return Err(Error::Construction(format!("d({i},{j}) != d({j},{i})")));
                }
                if a == 0 {
                    return Err(Error::Construction(format!(
                        "d({i},{j}) = 0 for distinct points"
                    )));
                }
            }
        }
        Ok(MetricWindow {
            n,
            base,
            scale,
            dist,
            labels,
        })
    }

    fn check_triangle(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                let dxy = self.dist[x * n + y] as u64;
                for z in 0..n {
                    if self.dist[x * n + z] as u64 > dxy + self.dist[y * n + z] as u64 {
                        return Err(Error::Construction(format!(
                            "triangle inequality fails on ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn base(&self) -> PointId {
        self.base
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p]
    }

    pub fn find(&self, label: &str) -> Option<PointId> {
        self.labels.iter().position(|l| l == label)
    }

    fn check(&self, p: PointId) -> Result<()> {
        if p < self.n {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "unknown point {p} (window has {})",
                self.n
            )))
        }
    }

    #[inline]
    fn raw(&self, x: PointId, y: PointId) -> i64 {
        self.dist[x * self.n + y] as i64
    }

    pub fn dist(&self, x: PointId, y: PointId) -> Result<Exact> {
        self.check(x)?;
        self.check(y)?;
        Ok(Exact::new(self.raw(x, y), self.scale))
    }

    pub fn gromov_product(&self, x: PointId, y: PointId) -> Result<HalfExact> {
        self.check(x)?;
        self.check(y)?;
        let b = self.base;
        let doubled = self.raw(x, b) + self.raw(y, b) - self.raw(x, y);
        Ok(HalfExact::from_doubled(Exact::new(doubled, self.scale)))
    }

    /// `φ_z(x) = d(x,0) - d(x,z)`.
    pub fn horofunction(&self, z: PointId, x: PointId) -> Result<Exact> {
        self.check(z)?;
        self.check(x)?;
        Ok(Exact::new(
            self.raw(x, self.base) - self.raw(x, z),
            self.scale,
        ))
    }

    /// `(x·y) - ½(φ_z(x) + φ_z(y))`, which is `½(d(x,z) + d(z,y) - d(x,y))`:
    /// nonnegative, and zero exactly when `z` lies between `x` and `y`.
    pub fn product_horofunction_gap(&self, x: PointId, y: PointId, z: PointId) -> Result<Exact> {
        let p = self.gromov_product(x, y)?.value();
        let phi = self.horofunction(z, x)? + self.horofunction(z, y)?;
        Ok(p - phi / 2)
    }

    pub fn min_delta(&self) -> DeltaReport {
        self.min_delta_with(Execution::default())
    }

    /// Smallest `δ ≥ 0` with `(x·y) ≥ min{(x·z), (y·z)} - δ` over every
    /// triple, by exhaustive scan.
    pub fn min_delta_with(&self, exec: Execution) -> DeltaReport {
        let n = self.n;
        let b = self.base;
        let norms: Vec<u64> = (0..n).map(|i| self.raw(i, b) as u64).collect();
        let max_doubled = 2 * norms.iter().copied().max().unwrap_or(0);
        let doubled = |x: usize, y: usize| norms[x] + norms[y] - self.raw(x, y) as u64;

        let (best, witness) = if max_doubled <= u8::MAX as u64 {
            scan(exec, &product_matrix::<u8>(n, doubled), n)
        } else if max_doubled <= u16::MAX as u64 {
            scan(exec, &product_matrix::<u16>(n, doubled), n)
        } else if max_doubled <= u32::MAX as u64 {
            scan(exec, &product_matrix::<u32>(n, doubled), n)
        } else {
            scan(exec, &product_matrix::<u64>(n, doubled), n)
        };
        let witness = if best > 0 { witness } else { None };
        DeltaReport {
            delta: HalfExact::from_doubled(Exact::new(best as i64, self.scale)),
            witness_labels: witness.map(|t| {
                [
                    self.labels[t.x].clone(),
                    self.labels[t.y].clone(),
                    self.labels[t.z].clone(),
                ]
            }),
            witness,
            points: n,
        }
    }

    /// `min{(x·z), (y·z)} - (x·y)` for one ordered triple, straight from
    /// the definition.
    pub fn triple_defect(&self, x: PointId, y: PointId, z: PointId) -> Result<HalfExact> {
        let xz = self.gromov_product(x, z)?;
        let yz = self.gromov_product(y, z)?;
        let xy = self.gromov_product(x, y)?;
        Ok(HalfExact::from_doubled(xz.min(yz).doubled() - xy.doubled()))
    }
}

trait Lane: Copy + Ord + Default + Send + Sync + Into<u64> + TryFrom<u64> {}
impl Lane for u8 {}
impl Lane for u16 {}
impl Lane for u32 {}
impl Lane for u64 {}

fn product_matrix<T: Lane>(n: usize, doubled: impl Fn(usize, usize) -> u64) -> Vec<T> {
    let mut p = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            p.push(T::try_from(doubled(x, y)).unwrap_or_else(|_| unreachable!()));
        }
    }
    p
}

/// `max_z min(a[z], b[z])`; written as a plain fold so it vectorizes.
#[inline]
fn pair_peak<T: Lane>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::default(), |m, (&u, &v)| m.max(u.min(v)))
}

/// Returns the largest defect and the lexicographically smallest triple
/// attaining it. The defect is symmetric in `(x, y)`, so the smallest
/// witness always has `x <= y` and only that half is scanned.
fn scan<T: Lane>(exec: Execution, p: &[T], n: usize) -> (u64, Option<Triple>) {
    if n == 0 {
        return (0, None);
    }
    let rows = par::map_indexed(exec, n, |x| {
        let px = &p[x * n..(x + 1) * n];
        let mut best = (0u64, x);
        for y in x..n {
            let py = &p[y * n..(y + 1) * n];
            let peak: u64 = pair_peak(px, py).into();
            let v = peak - px[y].into();
            if v > best.0 {
                best = (v, y);
            }
        }
        best
    });
    let (mut best, mut at) = (0u64, None);
    for (x, &(v, y)) in rows.iter().enumerate() {
        if v > best {
            best = v;
            at = Some((x, y));
        }
    }
    let witness = at.map(|(x, y)| {
        let target = best + p[x * n + y].into();
        let z = (0..n)
            .find(|&z| {
                let m: u64 = p[x * n + z].min(p[y * n + z]).into();
                m == target
            })
            .expect("peak is attained");
        Triple { x, y, z }
    });
    (best, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use num_traits::Signed;

    fn cycle(n: usize) -> MetricWindow {
        MetricWindow::from_fn(n, 0, vec![], |i, j| {
            let d = i.abs_diff(j);
            Some(int(d.min(n - d) as i64))
        })
        .unwrap()
    }

    fn brute_delta(w: &MetricWindow) -> Exact {
        let mut best = int(0);
        for x in 0..w.len() {
            for y in 0..w.len() {
                for z in 0..w.len() {
                    best = best.max(w.triple_defect(x, y, z).unwrap().value());
                }
            }
        }
        best
    }

    #[test]
    fn four_cycle_has_delta_one() {
        let w = cycle(4);
        let r = w.min_delta();
        assert_eq!(r.delta.value(), int(1));
        assert_eq!(r.delta.value(), brute_delta(&w));
        let t = r.witness.unwrap();
        assert_eq!(w.triple_defect(t.x, t.y, t.z).unwrap(), r.delta);
    }

    #[test]
    fn cycles_match_brute_force() {
        for n in 3..12 {
            let w = cycle(n);
            assert_eq!(w.min_delta().delta.value(), brute_delta(&w), "C{n}");
        }
    }

    #[test]
    fn empty_and_singleton_windows() {
        let w = MetricWindow::from_fn(0, 0, vec![], |_, _| Some(int(0))).unwrap();
        assert_eq!(w.min_delta().delta, HalfExact::ZERO);
        let w = MetricWindow::from_fn(1, 0, vec![], |_, _| Some(int(0))).unwrap();
        let r = w.min_delta();
        assert!(r.delta.is_zero() && r.witness.is_none());
    }

    #[test]
    fn rejects_partial_oracle() {
        let e = MetricWindow::from_fn(3, 0, vec![], |i, j| (i + j != 3).then(|| int(1)));
        assert!(matches!(e, Err(Error::Construction(_))));
    }

    #[test]
    fn rejects_triangle_violation() {
        // d(0,2) = 5 > d(0,1) + d(1,2)
        let d = [[0, 1, 5], [1, 0, 1], [5, 1, 0]];
        let e = MetricWindow::from_fn(3, 0, vec![], |i, j| Some(int(d[i][j])));
        assert!(matches!(e, Err(Error::Construction(_))));
    }

    #[test]
    fn rejects_asymmetry_and_zero() {
        assert!(MetricWindow::from_numerators(2, 0, 1, vec![0, 1, 2, 0], vec![]).is_err());
        assert!(MetricWindow::from_numerators(2, 0, 1, vec![0, 0, 0, 0], vec![]).is_err());
    }

    #[test]
    fn rational_distances_share_a_scale() {
        // three points on a line at 0, 1/2, 5/3
        let pos = [Exact::new(0, 1), Exact::new(1, 2), Exact::new(5, 3)];
        let w = MetricWindow::from_fn(3, 0, vec![], |i, j| Some((pos[i] - pos[j]).abs())).unwrap();
        assert_eq!(w.dist(1, 2).unwrap(), Exact::new(7, 6));
        assert_eq!(w.gromov_product(1, 2).unwrap().value(), Exact::new(1, 2));
        assert!(w.min_delta().delta.is_zero());
    }

    #[test]
    fn unknown_point_is_domain_error() {
        let w = cycle(4);
        assert!(matches!(w.gromov_product(0, 9), Err(Error::Domain(_))));
        assert!(matches!(w.horofunction(9, 0), Err(Error::Domain(_))));
        assert!(matches!(
            w.product_horofunction_gap(0, 1, 7),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let w = cycle(9);
        assert_eq!(
            w.min_delta_with(Execution::Sequential),
            w.min_delta_with(Execution::Parallel)
        );
    }
}
