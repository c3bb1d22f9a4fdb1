use serde::Serialize;

use crate::cayley::{GroupElement, GroupSpec, WordMetric};
use crate::error::{Error, Result};
use crate::exact::int;
use crate::rays::RaySpec;

/// A finite tail `x_1, ..., x_H` standing in for a boundary point.
///
/// Norms are at least 1 and strictly increasing (consecutive repeats are
/// dropped first), the finite stand-in for "leaves every bounded set".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundarySample {
    pub spec: GroupSpec,
    pub label: String,
    points: Vec<GroupElement>,
    norms: Vec<u32>,
}

impl BoundarySample {
    pub fn new(
        metric: &WordMetric,
        label: impl Into<String>,
        points: Vec<GroupElement>,
    ) -> Result<Self> {
        let label = label.into();
        let mut pts: Vec<GroupElement> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        let norms = pts
            .iter()
            .map(|p| metric.norm(p))
            .collect::<Result<Vec<u32>>>()?;
        if pts.is_empty() {
            return Err(Error::Construction(format!("sample {label} is empty")));
        }
        if norms[0] == 0 {
            return Err(Error::Construction(format!(
                "sample {label} starts at the base point"
            )));
        }
        if let Some(i) = norms.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Construction(format!(
                "sample {label} is not norm-increasing at index {} ({} then {})",
                i + 1,
                norms[i],
                norms[i + 1]
            )));
        }
        Ok(BoundarySample {
            spec: metric.spec().clone(),
            label,
            points: pts,
            norms,
        })
    }

    /// `γ(t)` for sampled `t` in `(0, horizon]`.
    pub fn from_ray(
        metric: &WordMetric,
        label: impl Into<String>,
        ray: &RaySpec,
        horizon: u32,
    ) -> Result<Self> {
        ray.validate(metric.spec())?;
        let points = match ray {
            RaySpec::ExplicitTable(rows) => rows
                .iter()
                .filter(|(t, _)| *t > int(0) && *t <= int(horizon as i64))
                .map(|(_, p)| p.clone())
                .collect(),
            _ => (1..=horizon)
                .map(|t| ray.point_at(t).expect("generated families are total"))
                .collect(),
        };
        Self::new(metric, label, points)
    }

    /// Parses points in element syntax.
    pub fn from_reprs(
        metric: &WordMetric,
        label: impl Into<String>,
        reprs: &[String],
    ) -> Result<Self> {
        let points = reprs
            .iter()
            .map(|r| metric.spec().parse_element(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(metric, label, points)
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn norms(&self) -> &[u32] {
        &self.norms
    }

    /// `x_n`, 1-based.
    pub fn point(&self, n: usize) -> &GroupElement {
        &self.points[n - 1]
    }

    /// Keeps only `x_1..x_h`.
    pub fn truncated(&self, h: usize) -> Self {
        let h = h.min(self.horizon()).max(1);
        BoundarySample {
            spec: self.spec.clone(),
            label: self.label.clone(),
            points: self.points[..h].to_vec(),
            norms: self.norms[..h].to_vec(),
        }
    }

    pub(crate) fn check_metric(&self, metric: &WordMetric) -> Result<()> {
        if &self.spec != metric.spec() {
            return Err(Error::Domain(format!(
                "sample {} lives in {}, not {}",
                self.label,
                self.spec,
                metric.spec()
            )));
        }
        Ok(())
    }
}
