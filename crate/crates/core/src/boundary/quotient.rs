use serde::Serialize;

use super::certificate::{
    converges_to_infinity, equiv_certificate, extended_product, DivergenceCertificate, EquivMode,
    ExtendedProduct, Operand,
};
use super::profile::{compare_profiles, horofunction_profile_with, probe_value, MetricVerdict};
use super::sample::BoundarySample;
use crate::cayley::{CayleyBall, WordMetric};
use crate::error::{Error, Result};
use crate::exact::{format_exact, Exact};
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairEntry {
    pub a: String,
    pub b: String,
    pub gromov: DivergenceCertificate,
    pub metric: MetricVerdict,
}

/// `x ∼ via` and `y ∼ via` pass but `x ∼ y` fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityViolation {
    pub x: String,
    pub y: String,
    pub via: String,
}

/// Samples grouped into Gromov classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientPartition {
    pub labels: Vec<String>,
    pub hyperbolic: bool,
    /// Connected components of the passing pairs; `None` when the group is
    /// not hyperbolic and partitioning is refused.
    pub classes: Option<Vec<Vec<String>>>,
    pub pairwise: Vec<PairEntry>,
    /// Pairs with equal horofunction profiles whose Gromov certificate fails.
    pub refinement_violations: Vec<(String, String)>,
    pub transitivity_violations: Vec<TransitivityViolation>,
}

fn ensure_converges(s: &BoundarySample, threshold: Exact, metric: &WordMetric) -> Result<()> {
    if converges_to_infinity(s, threshold, metric)?.passes() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "sample {} does not converge to infinity at M = {}",
            s.label,
            format_exact(&threshold)
        )))
    }
}

pub fn quotient_partition(
    samples: &[BoundarySample],
    threshold: Exact,
    probes: &[crate::cayley::GroupElement],
    tol: Option<Exact>,
    metric: &WordMetric,
    mode: EquivMode,
) -> Result<QuotientPartition> {
    quotient_partition_with(
        samples,
        threshold,
        probes,
        tol,
        metric,
        mode,
        Execution::default(),
    )
}

pub fn quotient_partition_with(
    samples: &[BoundarySample],
    threshold: Exact,
    probes: &[crate::cayley::GroupElement],
    tol: Option<Exact>,
    metric: &WordMetric,
    mode: EquivMode,
    exec: Execution,
) -> Result<QuotientPartition> {
    for s in samples {
        s.check_metric(metric)?;
        ensure_converges(s, threshold, metric)?;
    }
    let profiles = samples
        .iter()
        .map(|s| horofunction_profile_with(s, probes, tol, metric, exec))
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let pairwise = par::map_slice(exec, &pairs, |&(i, j)| -> Result<PairEntry> {
        Ok(PairEntry {
            a: samples[i].label.clone(),
            b: samples[j].label.clone(),
            gromov: equiv_certificate(&samples[i], &samples[j], threshold, metric, mode)?,
            metric: compare_profiles(&profiles[i], &profiles[j]).result,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut pass = vec![false; n * n];
    for (&(i, j), e) in pairs.iter().zip(&pairwise) {
        pass[i * n + j] = e.gromov.passes();
        pass[j * n + i] = e.gromov.passes();
    }
    let labels: Vec<String> = samples.iter().map(|s| s.label.clone()).collect();

    let refinement_violations = pairs
        .iter()
        .zip(&pairwise)
        .filter(|(_, e)| e.metric == MetricVerdict::Equivalent && !e.gromov.passes())
        .map(|(&(i, j), _)| (labels[i].clone(), labels[j].clone()))
        .collect();

    let mut transitivity_violations = Vec::new();
    for &(i, j) in &pairs {
        if pass[i * n + j] {
            continue;
        }
        for k in (0..n).filter(|&k| k != i && k != j) {
            if pass[i * n + k] && pass[j * n + k] {
                transitivity_violations.push(TransitivityViolation {
                    x: labels[i].clone(),
                    y: labels[j].clone(),
                    via: labels[k].clone(),
                });
            }
        }
    }

    let hyperbolic = metric.spec().is_hyperbolic();
    let classes = hyperbolic.then(|| {
        let mut class = vec![usize::MAX; n];
        let mut out: Vec<Vec<String>> = Vec::new();
        for start in 0..n {
            if class[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            class[start] = id;
            while let Some(i) = stack.pop() {
                members.push(i);
                for k in 0..n {
                    if class[k] == usize::MAX && pass[i * n + k] {
                        class[k] = id;
                        stack.push(k);
                    }
                }
            }
            members.sort_unstable();
            out.push(members.into_iter().map(|i| labels[i].clone()).collect());
        }
        out
    });

    Ok(QuotientPartition {
        labels,
        hyperbolic,
        classes,
        pairwise,
        refinement_violations,
        transitivity_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityRow {
    pub label: String,
    /// Largest `r` such that both profiles are stable and agree on every
    /// probe of norm at most `r`.
    pub agreement_radius: u32,
    pub probe_radius: u32,
    pub product: ExtendedProduct,
    pub product_certificate: DivergenceCertificate,
}

/// For each `ω_j`: how far its horofunction profile agrees with that of
/// `ω`, next to the extended product `(ω_j · ω)`. Metric convergence
/// `ω_j → ω` shows as a growing agreement radius; Gromov convergence as a
/// growing product.
pub fn continuity_probe(
    omegas: &[BoundarySample],
    omega: &BoundarySample,
    probes: &CayleyBall,
    threshold: Exact,
    metric: &WordMetric,
) -> Result<Vec<ContinuityRow>> {
    ensure_converges(omega, threshold, metric)?;
    for s in omegas {
        s.check_metric(metric)?;
        ensure_converges(s, threshold, metric)?;
    }
    let all = probes.elements();
    let zero = Exact::default();
    let base = par::map_slice(Execution::default(), all, |z| {
        probe_value(omega, z, zero, metric)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let norms = probes.norms();

    omegas
        .iter()
        .map(|s| {
            let mut agreement = probes.radius();
            let mut start = 0;
            for r in 0..=probes.radius() {
                let end = norms.partition_point(|&n| n <= r);
                let sphere = &all[start..end];
                let mine = par::map_slice(Execution::default(), sphere, |z| {
                    probe_value(s, z, zero, metric)
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
                let agrees = mine
                    .iter()
                    .zip(&base[start..end])
                    .all(|(x, y)| x.stable && y.stable && x.value == y.value);
                if !agrees {
                    agreement = r.saturating_sub(1);
                    break;
                }
                start = end;
            }
            let product = extended_product(Operand::Sample(s), Operand::Sample(omega), metric)?;
            Ok(ContinuityRow {
                label: s.label.clone(),
                agreement_radius: agreement,
                probe_radius: probes.radius(),
                product_certificate: product.certificate(threshold),
                product,
            })
        })
        .collect()
}
