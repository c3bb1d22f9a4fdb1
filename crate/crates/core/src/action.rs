//! The left action on boundary samples, its compatibility with the Gromov
//! relation, and a numerical probe of approximately invariant means.
//!
//! The probe uses the family `m_n(ω)` = uniform measure on the first `n`
//! points of the canonical geodesic ray from `e` toward `ω`, and measures
//! the translation defect `‖g·m_n(ω) - m_n(g·ω)‖₁` exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::boundary::{
    converges_to_infinity, equiv_certificate, BoundarySample, DivergenceCertificate, EquivMode,
};
use crate::cayley::{GroupElement, GroupSpec, Letter, WordMetric};
use crate::error::{Error, Result};
use crate::exact::{decimal, format_exact, int, serde_exact, Exact};
use crate::par::{self, Execution};
use crate::rays::RaySpec;

/// Translates the sample pointwise by `g`, then drops the shortest prefix
/// that keeps norms positive and strictly increasing.
pub fn act_on_sample(
    g: &GroupElement,
    s: &BoundarySample,
    metric: &WordMetric,
) -> Result<BoundarySample> {
    s.check_metric(metric)?;
    let spec = metric.spec();
    let moved = s
        .points()
        .iter()
        .map(|x| spec.multiply(g, x))
        .collect::<Result<Vec<_>>>()?;
    let keep = valid_suffix_start(&moved, metric)?;
    BoundarySample::new(metric, s.label.clone(), moved[keep..].to_vec())
}

fn valid_suffix_start(points: &[GroupElement], metric: &WordMetric) -> Result<usize> {
    let norms = points
        .iter()
        .map(|p| metric.norm(p))
        .collect::<Result<Vec<_>>>()?;
    let mut start = norms.len().saturating_sub(1);
    while start > 0 && norms[start - 1] >= 1 && norms[start - 1] < norms[start] {
        start -= 1;
    }
    if norms.last().is_some_and(|&n| n == 0) {
        return Err(Error::Construction(
            "translated sample ends at the base point".into(),
        ));
    }
    Ok(start)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivarianceReport {
    pub g: GroupElement,
    pub g_norm: u32,
    pub before: DivergenceCertificate,
    pub after: DivergenceCertificate,
    /// Largest `|(g a_n · g b_n) - (a_n · b_n)|` over aligned indices.
    #[serde(with = "serde_exact")]
    pub max_shift: Exact,
    /// `max_shift ≤ |g|` and `after` passes at `M - |g|`.
    pub holds: bool,
}

/// Checks that `a ∼ b` at `M` carries over to `g·a ∼ g·b` at `M - |g|`.
///
/// The two translated samples lose the same number of leading points so
/// their indices stay aligned.
pub fn equivariance_check(
    g: &GroupElement,
    a: &BoundarySample,
    b: &BoundarySample,
    threshold: Exact,
    metric: &WordMetric,
) -> Result<EquivarianceReport> {
    let before = crate::boundary::gromov_equiv(a, b, threshold, metric, EquivMode::SingleIndex)?;
    if !before.passes() {
        return Err(Error::Precondition(format!(
            "{} and {} are not Gromov-equivalent at M = {}",
            a.label,
            b.label,
            format_exact(&threshold)
        )));
    }
    let spec = metric.spec();
    let h = a.horizon().min(b.horizon());
    let ga: Vec<GroupElement> = a.points()[..h]
        .iter()
        .map(|x| spec.multiply(g, x))
        .collect::<Result<_>>()?;
    let gb: Vec<GroupElement> = b.points()[..h]
        .iter()
        .map(|x| spec.multiply(g, x))
        .collect::<Result<_>>()?;
    let skip = valid_suffix_start(&ga, metric)?.max(valid_suffix_start(&gb, metric)?);
    let ta = BoundarySample::new(metric, format!("g.{}", a.label), ga[skip..].to_vec())?;
    let tb = BoundarySample::new(metric, format!("g.{}", b.label), gb[skip..].to_vec())?;

    let g_norm = metric.norm(g)?;
    let lowered = threshold - int(g_norm as i64);
    let after = equiv_certificate(&ta, &tb, lowered, metric, EquivMode::SingleIndex)?;
    let converge = converges_to_infinity(&ta, lowered, metric)?.passes()
        && converges_to_infinity(&tb, lowered, metric)?.passes();

    let mut max_shift = Exact::zero();
    for n in skip..h {
        let p0 = metric.product(&a.points()[n], &b.points()[n])?.value();
        let p1 = metric.product(&ga[n], &gb[n])?.value();
        max_shift = max_shift.max((p1 - p0).abs());
    }
    Ok(EquivarianceReport {
        g: g.clone(),
        g_norm,
        holds: max_shift <= int(g_norm as i64) && after.passes() && converge,
        before,
        after,
        max_shift,
    })
}

/// A finitely supported probability measure with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityMeasure {
    weights: BTreeMap<GroupElement, Exact>,
}

impl ProbabilityMeasure {
    /// Zero weights are dropped; weights must be nonnegative and sum to 1.
    pub fn new(weights: impl IntoIterator<Item = (GroupElement, Exact)>) -> Result<Self> {
        let mut map: BTreeMap<GroupElement, Exact> = BTreeMap::new();
        for (g, w) in weights {
            if w.is_negative() {
                return Err(Error::Construction(format!("negative weight at {g}")));
            }
            *map.entry(g).or_default() += w;
        }
        map.retain(|_, w| !w.is_zero());
        let total: Exact = map.values().sum();
        if !total.is_one() {
            return Err(Error::Construction(format!(
                "weights sum to {}, not 1",
                format_exact(&total)
            )));
        }
        Ok(ProbabilityMeasure { weights: map })
    }

    pub fn uniform(points: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let pts: Vec<GroupElement> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::Construction(
                "uniform measure on an empty set".into(),
            ));
        }
        let w = Exact::new(1, pts.len() as i64);
        Self::new(pts.into_iter().map(|p| (p, w)))
    }

    pub fn weight(&self, g: &GroupElement) -> Exact {
        self.weights.get(g).copied().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &Exact)> {
        self.weights.iter()
    }

    pub fn total_mass(&self) -> Exact {
        self.weights.values().sum()
    }
}

/// `(g·μ)(gh) = μ(h)`.
pub fn pushforward(
    spec: &GroupSpec,
    g: &GroupElement,
    mu: &ProbabilityMeasure,
) -> Result<ProbabilityMeasure> {
    let weights = mu
        .iter()
        .map(|(h, w)| Ok((spec.multiply(g, h)?, *w)))
        .collect::<Result<Vec<_>>>()?;
    ProbabilityMeasure::new(weights)
}

/// `Σ_h |μ(h) - ν(h)|`, the ℓ1 norm of the difference (between 0 and 2).
pub fn tv_distance(mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> Exact {
    let mut total = Exact::zero();
    for (g, w) in mu.iter() {
        total += (*w - nu.weight(g)).abs();
    }
    for (g, w) in nu.iter() {
        if mu.weight(g).is_zero() {
            total += *w;
        }
    }
    total
}

/// `m_n(ω)`: uniform on `γ(1..n)` of the canonical geodesic toward `ω`, or
/// on `γ(0..n-1)` in the inclusive variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MeanFamily {
    pub inclusive: bool,
}

fn require_canonical(spec: &GroupSpec, omega: &RaySpec) -> Result<()> {
    match (spec, omega) {
        (GroupSpec::Free { gens: None, .. }, RaySpec::FreeTail { .. }) => omega.validate(spec),
        _ => Err(Error::Unsupported(format!(
            "no canonical geodesic normal form for {omega} in {spec}; \
             means are built for eventually periodic rays in free groups with the standard basis"
        ))),
    }
}

impl MeanFamily {
    pub fn mean(&self, spec: &GroupSpec, omega: &RaySpec, n: u32) -> Result<ProbabilityMeasure> {
        require_canonical(spec, omega)?;
        if n == 0 {
            return Err(Error::Precondition("n must be positive".into()));
        }
        let range = if self.inclusive { 0..n } else { 1..n + 1 };
        ProbabilityMeasure::uniform(range.map(|t| omega.point_at(t).expect("free tails are total")))
    }
}

/// `α_g ω` as an eventually periodic ray: reduce `g` against a prefix of
/// `ω` longer than `g`, keep the period.
pub fn translate_ray(spec: &GroupSpec, g: &GroupElement, omega: &RaySpec) -> Result<RaySpec> {
    require_canonical(spec, omega)?;
    let RaySpec::FreeTail { prefix, period } = omega else {
        unreachable!()
    };
    let gw = match g {
        GroupElement::Word(w) => w,
        _ => return Err(Error::Domain(format!("{g} is not in {spec}"))),
    };
    spec.check(g)?;
    let mut head: Vec<Letter> = prefix.clone();
    while head.len() <= gw.len() {
        head.extend_from_slice(period);
    }
    let moved = spec.multiply(g, &GroupElement::Word(head))?;
    let GroupElement::Word(new_prefix) = moved else {
        unreachable!()
    };
    let ray = RaySpec::FreeTail {
        prefix: new_prefix,
        period: period.clone(),
    };
    ray.validate(spec)?;
    Ok(ray)
}

/// `‖g·m_n(ω) - m_n(α_g ω)‖₁`.
pub fn mean_defect(
    spec: &GroupSpec,
    g: &GroupElement,
    omega: &RaySpec,
    n: u32,
    family: MeanFamily,
) -> Result<Exact> {
    let moved = translate_ray(spec, g, omega)?;
    let lhs = pushforward(spec, g, &family.mean(spec, omega, n)?)?;
    let rhs = family.mean(spec, &moved, n)?;
    Ok(tv_distance(&lhs, &rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectRow {
    pub g: GroupElement,
    pub omega: RaySpec,
    pub n: u32,
    #[serde(with = "serde_exact")]
    pub defect: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefectMax {
    pub n: u32,
    #[serde(with = "serde_exact")]
    pub max_defect: Exact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayScan {
    pub rows: Vec<DefectRow>,
    pub max_by_n: Vec<DefectMax>,
    /// Smallest integer `C` with `max_defect(n) ≤ C/n` for every scanned `n`.
    pub c: i64,
    /// `2·max|g|`.
    pub c_bound: i64,
    pub within_bound: bool,
    /// What the scan covers: finitely many `(g, ω)` only.
    pub coverage: String,
}

impl DecayScan {
    /// `g,omega,n,defect,decimal` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("g,omega,n,defect,decimal\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.g,
                r.omega,
                r.n,
                format_exact(&r.defect),
                decimal(&r.defect)
            );
        }
        out
    }
}

pub fn defect_decay_scan(
    spec: &GroupSpec,
    gens: &[GroupElement],
    omegas: &[RaySpec],
    n_values: &[u32],
    family: MeanFamily,
) -> Result<DecayScan> {
    defect_decay_scan_with(spec, gens, omegas, n_values, family, Execution::default())
}

pub fn defect_decay_scan_with(
    spec: &GroupSpec,
    gens: &[GroupElement],
    omegas: &[RaySpec],
    n_values: &[u32],
    family: MeanFamily,
    exec: Execution,
) -> Result<DecayScan> {
    let cells: Vec<(&GroupElement, &RaySpec, u32)> = gens
        .iter()
        .flat_map(|g| {
            omegas
                .iter()
                .flat_map(move |w| n_values.iter().map(move |&n| (g, w, n)))
        })
        .collect();
    let rows = par::map_slice(exec, &cells, |&(g, w, n)| -> Result<DefectRow> {
        Ok(DefectRow {
            g: g.clone(),
            omega: w.clone(),
            n,
            defect: mean_defect(spec, g, w, n, family)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut max_by_n: Vec<DefectMax> = Vec::new();
    for &n in n_values {
        let m = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.defect)
            .max()
            .unwrap_or_default();
        max_by_n.push(DefectMax { n, max_defect: m });
    }
    let c = max_by_n
        .iter()
        .map(|m| (m.max_defect * int(m.n as i64)).ceil().to_integer())
        .max()
        .unwrap_or(0);
    let metric = WordMetric::new(spec, u32::MAX)?;
    let max_g = gens
        .iter()
        .map(|g| metric.norm(g))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0) as i64;
    Ok(DecayScan {
        c_bound: 2 * max_g,
        within_bound: c <= 2 * max_g,
        coverage: format!(
            "{} group elements x {} rays x {} values of n; uniformity over the whole boundary is not certified",
            gens.len(),
            omegas.len(),
            n_values.len()
        ),
        rows,
        max_by_n,
        c,
    })
}
