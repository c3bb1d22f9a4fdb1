use serde::Serialize;

use super::sample::BoundarySample;
use super::tail_limit;
use crate::cayley::{GroupElement, WordMetric};
use crate::error::{Error, Result};
use crate::exact::{serde_exact, Exact, HalfExact};
use crate::rays::Verdict;

/// The finite form of "`q(n, k) → ∞`": `D(N) = min q` over sampled indices
/// `≥ N`, for `N = 1..H`, and the verdict "`D(N) ≥ M` for some `N ≤ H/2`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergenceCertificate {
    pub quantity: String,
    pub horizon: usize,
    #[serde(with = "serde_exact")]
    pub threshold: Exact,
    /// `values[N - 1] = D(N)`.
    pub values: Vec<HalfExact>,
    pub verdict: Verdict,
    /// Least `N ≤ H/2` with `D(N) ≥ M`.
    pub first_pass: Option<usize>,
}

impl DivergenceCertificate {
    pub(crate) fn from_tail_minima(
        quantity: String,
        values: Vec<HalfExact>,
        threshold: Exact,
    ) -> Self {
        let horizon = values.len();
        let limit = tail_limit(horizon).min(horizon);
        let first_pass = (1..=limit).find(|&n| values[n - 1].value() >= threshold);
        DivergenceCertificate {
            quantity,
            horizon,
            threshold,
            values,
            verdict: if first_pass.is_some() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            first_pass,
        }
    }

    /// `D(N)`, 1-based.
    pub fn at(&self, n: usize) -> HalfExact {
        self.values[n - 1]
    }

    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Same data judged against a different threshold.
    pub fn with_threshold(&self, threshold: Exact) -> Self {
        Self::from_tail_minima(self.quantity.clone(), self.values.clone(), threshold)
    }
}

/// Suffix minima of a sequence.
fn suffix_min(v: &[HalfExact]) -> Vec<HalfExact> {
    let mut out = v.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].min(out[i + 1]);
    }
    out
}

/// `D(N) = min_{n,k ≥ N} q(n,k)` for a symmetric or general square table.
fn double_tail_minima(
    h: usize,
    q: impl Fn(usize, usize) -> Result<HalfExact>,
) -> Result<Vec<HalfExact>> {
    let mut table = vec![HalfExact::ZERO; h * h];
    for n in 0..h {
        for k in 0..h {
            table[n * h + k] = q(n, k)?;
        }
    }
    let mut out = vec![HalfExact::ZERO; h];
    for n in (0..h).rev() {
        let mut m = (n..h)
            .map(|k| table[n * h + k].min(table[k * h + n]))
            .min()
            .expect("nonempty");
        if n + 1 < h {
            m = m.min(out[n + 1]);
        }
        out[n] = m;
    }
    Ok(out)
}

/// Certificate for `lim_{n,k} (x_n · x_k) = ∞`.
pub fn converges_to_infinity(
    s: &BoundarySample,
    threshold: Exact,
    metric: &WordMetric,
) -> Result<DivergenceCertificate> {
    s.check_metric(metric)?;
    let p = s.points();
    let values = double_tail_minima(s.horizon(), |n, k| metric.product(&p[n], &p[k]))?;
    Ok(DivergenceCertificate::from_tail_minima(
        format!("({0}_n . {0}_k)", s.label),
        values,
        threshold,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivMode {
    /// `(a_n · b_n)`.
    #[default]
    SingleIndex,
    /// `(a_n · b_k)` over all `n, k ≥ N`.
    DoubleIndex,
}

/// Certificate for `lim_n (a_n · b_n) = ∞`; both samples must first pass
/// [`converges_to_infinity`] at the same threshold.
pub fn gromov_equiv(
    a: &BoundarySample,
    b: &BoundarySample,
    threshold: Exact,
    metric: &WordMetric,
    mode: EquivMode,
) -> Result<DivergenceCertificate> {
    if a.spec != b.spec {
        return Err(Error::Domain(format!(
            "samples {} and {} live in different groups",
            a.label, b.label
        )));
    }
    for s in [a, b] {
        if !converges_to_infinity(s, threshold, metric)?.passes() {
            return Err(Error::Precondition(format!(
                "sample {} does not converge to infinity at M = {}",
                s.label,
                crate::exact::format_exact(&threshold)
            )));
        }
    }
    equiv_certificate(a, b, threshold, metric, mode)
}

/// [`gromov_equiv`] without the convergence preconditions.
pub(crate) fn equiv_certificate(
    a: &BoundarySample,
    b: &BoundarySample,
    threshold: Exact,
    metric: &WordMetric,
    mode: EquivMode,
) -> Result<DivergenceCertificate> {
    let h = a.horizon().min(b.horizon());
    let (pa, pb) = (a.points(), b.points());
    let (values, quantity) = match mode {
        EquivMode::SingleIndex => {
            let raw = (0..h)
                .map(|n| metric.product(&pa[n], &pb[n]))
                .collect::<Result<Vec<_>>>()?;
            (suffix_min(&raw), format!("({}_n . {}_n)", a.label, b.label))
        }
        EquivMode::DoubleIndex => {
            let v = double_tail_minima(h, |n, k| {
                Ok(metric
                    .product(&pa[n], &pb[k])?
                    .min(metric.product(&pa[k], &pb[n])?))
            })?;
            (v, format!("({}_n . {}_k)", a.label, b.label))
        }
    };
    Ok(DivergenceCertificate::from_tail_minima(
        quantity, values, threshold,
    ))
}

/// One side of an extended product.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Point(&'a GroupElement),
    Sample(&'a BoundarySample),
}

/// Estimate of the extended product over the supplied representatives:
/// the tail minimum `D(⌊H/2⌋)` of `(a_n · b_n)`.
///
/// This is the liminf along the given sequences only, so it bounds the
/// true extended product (an infimum over all representatives) from above.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedProduct {
    pub estimate: HalfExact,
    /// Point–point products are exact, not estimates.
    pub exact: bool,
    /// The `N` at which the estimate is read.
    pub tail_from: usize,
    /// `D(N)` is constant on `[tail_from, H]`.
    pub tail_stable: bool,
    /// `D(N)` for `N = 1..H`.
    pub values: Vec<HalfExact>,
}

impl ExtendedProduct {
    /// Divergence certificate built on the same tail minima.
    pub fn certificate(&self, threshold: Exact) -> DivergenceCertificate {
        DivergenceCertificate::from_tail_minima(
            "extended product".into(),
            self.values.clone(),
            threshold,
        )
    }
}

pub fn extended_product(
    a: Operand<'_>,
    b: Operand<'_>,
    metric: &WordMetric,
) -> Result<ExtendedProduct> {
    for op in [a, b] {
        if let Operand::Sample(s) = op {
            s.check_metric(metric)?;
        }
    }
    let raw: Vec<HalfExact> = match (a, b) {
        (Operand::Point(x), Operand::Point(y)) => {
            let p = metric.product(x, y)?;
            return Ok(ExtendedProduct {
                estimate: p,
                exact: true,
                tail_from: 1,
                tail_stable: true,
                values: vec![p],
            });
        }
        (Operand::Sample(s), Operand::Point(y)) | (Operand::Point(y), Operand::Sample(s)) => s
            .points()
            .iter()
            .map(|x| metric.product(x, y))
            .collect::<Result<_>>()?,
        (Operand::Sample(s), Operand::Sample(t)) => s
            .points()
            .iter()
            .zip(t.points())
            .map(|(x, y)| metric.product(x, y))
            .collect::<Result<_>>()?,
    };
    let values = suffix_min(&raw);
    let h = values.len();
    let tail_from = tail_limit(h).min(h);
    let estimate = values[tail_from - 1];
    Ok(ExtendedProduct {
        estimate,
        exact: false,
        tail_from,
        tail_stable: values[tail_from - 1..].iter().all(|v| *v == estimate),
        values,
    })
}
