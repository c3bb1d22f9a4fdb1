use num_traits::Signed;
use serde::Serialize;

use super::sample::BoundarySample;
use super::tail_limit;
use crate::cayley::{GroupElement, WordMetric};
use crate::error::Result;
use crate::exact::{serde_exact, Exact};
use crate::par::{self, Execution};

/// Stabilized horofunction value `φ_z(ω)` for one probe `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeValue {
    pub probe: GroupElement,
    /// `φ_z(x_H)`.
    #[serde(with = "serde_exact")]
    pub value: Exact,
    /// First `n` with `|φ_z(x_m) - value| ≤ tol` for every sampled `m ≥ n`.
    pub index: usize,
    /// `index ≤ ⌊H/2⌋`.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HorofunctionProfile {
    pub label: String,
    pub horizon: usize,
    #[serde(with = "serde_exact::option")]
    pub tol: Option<Exact>,
    pub entries: Vec<ProbeValue>,
}

impl HorofunctionProfile {
    pub fn unstable(&self) -> Vec<&GroupElement> {
        self.entries
            .iter()
            .filter(|e| !e.stable)
            .map(|e| &e.probe)
            .collect()
    }

    pub fn get(&self, probe: &GroupElement) -> Option<&ProbeValue> {
        self.entries.iter().find(|e| &e.probe == probe)
    }
}

pub(crate) fn probe_value(
    s: &BoundarySample,
    z: &GroupElement,
    tol: Exact,
    metric: &WordMetric,
) -> Result<ProbeValue> {
    let values = s
        .points()
        .iter()
        .map(|x| metric.horofunction(z, x))
        .collect::<Result<Vec<_>>>()?;
    let h = values.len();
    let last = values[h - 1];
    let mut index = h;
    while index > 1 && (values[index - 2] - last).abs() <= tol {
        index -= 1;
    }
    Ok(ProbeValue {
        probe: z.clone(),
        value: last,
        index,
        stable: index <= tail_limit(h),
    })
}

/// `φ_z(x_n)` along the sample for every probe, with stabilization data.
///
/// All word metrics here are integer-valued, so any `tol < 1` is exact
/// stabilization; `None` means `tol = 0`.
pub fn horofunction_profile(
    s: &BoundarySample,
    probes: &[GroupElement],
    tol: Option<Exact>,
    metric: &WordMetric,
) -> Result<HorofunctionProfile> {
    horofunction_profile_with(s, probes, tol, metric, Execution::default())
}

pub fn horofunction_profile_with(
    s: &BoundarySample,
    probes: &[GroupElement],
    tol: Option<Exact>,
    metric: &WordMetric,
    exec: Execution,
) -> Result<HorofunctionProfile> {
    s.check_metric(metric)?;
    let t = tol.unwrap_or_default();
    let entries = par::map_slice(exec, probes, |z| probe_value(s, z, t, metric))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(HorofunctionProfile {
        label: s.label.clone(),
        horizon: s.horizon(),
        tol,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeDiff {
    pub probe: GroupElement,
    #[serde(with = "serde_exact")]
    pub a: Exact,
    #[serde(with = "serde_exact")]
    pub b: Exact,
    #[serde(with = "serde_exact")]
    pub diff: Exact,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MetricVerdict {
    Equivalent,
    NotEquivalent,
    /// Some probe did not stabilize within the horizon.
    Inconclusive {
        unstable: Vec<GroupElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricEquivReport {
    pub a: String,
    pub b: String,
    pub result: MetricVerdict,
    pub table: Vec<ProbeDiff>,
}

impl MetricEquivReport {
    pub fn is_equivalent(&self) -> bool {
        self.result == MetricVerdict::Equivalent
    }
}

/// Same metric-boundary point iff the stabilized profiles agree on every
/// probe (within `tol`).
pub fn metric_equiv(
    a: &BoundarySample,
    b: &BoundarySample,
    probes: &[GroupElement],
    tol: Option<Exact>,
    metric: &WordMetric,
) -> Result<MetricEquivReport> {
    let pa = horofunction_profile(a, probes, tol, metric)?;
    let pb = horofunction_profile(b, probes, tol, metric)?;
    Ok(compare_profiles(&pa, &pb))
}

pub(crate) fn compare_profiles(
    pa: &HorofunctionProfile,
    pb: &HorofunctionProfile,
) -> MetricEquivReport {
    let tol = pa.tol.unwrap_or_default();
    let mut unstable = Vec::new();
    let mut agree = true;
    let table: Vec<ProbeDiff> = pa
        .entries
        .iter()
        .zip(&pb.entries)
        .map(|(x, y)| {
            let stable = x.stable && y.stable;
            if !stable {
                unstable.push(x.probe.clone());
            }
            let diff = x.value - y.value;
            if diff.abs() > tol {
                agree = false;
            }
            ProbeDiff {
                probe: x.probe.clone(),
                a: x.value,
                b: y.value,
                diff,
                stable,
            }
        })
        .collect();
    let result = if !unstable.is_empty() {
        MetricVerdict::Inconclusive { unstable }
    } else if agree {
        MetricVerdict::Equivalent
    } else {
        MetricVerdict::NotEquivalent
    };
    MetricEquivReport {
        a: pa.label.clone(),
        b: pb.label.clone(),
        result,
        table,
    }
}
