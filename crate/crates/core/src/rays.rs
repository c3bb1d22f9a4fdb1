//! Truncated rays `γ: T → X` and their classification as geodesic,
//! almost-geodesic or weakly-geodesic.
//!
//! A clause quantified over "all `t, s ≥ N`" passes on a truncation when
//! some integer `N ≤ horizon/2` satisfies it on every sampled parameter in
//! `[N, horizon]`. The reported `N` is the least such integer; a failure
//! reports the violation that defeats every candidate `N`.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cayley::{format_word, GroupElement, GroupSpec, Letter, WordMetric};
use crate::error::{Error, Result};
use crate::exact::{format_exact, int, parse_exact, serde_exact, Exact};
use crate::par::{self, Execution};

#[derive(Clone, PartialEq, Eq)]
pub enum RaySpec {
    /// `prefix · period · period · ...`, parameter = word length.
    FreeTail {
        prefix: Vec<Letter>,
        period: Vec<Letter>,
    },
    /// `γ(t) = offset + steps[0] + ... + steps[t-1]`, steps cycled.
    LatticePath {
        offset: Vec<i64>,
        steps: Vec<Vec<i64>>,
    },
    ExplicitTable(Vec<(Exact, GroupElement)>),
}

impl RaySpec {
    pub fn free_tail(spec: &GroupSpec, prefix: &str, period: &str) -> Result<Self> {
        let word = |s: &str| -> Result<Vec<Letter>> {
            match spec.parse_element(s)? {
                GroupElement::Word(w) => Ok(w),
                GroupElement::Vector(_) => unreachable!(),
            }
        };
        if !spec.is_free() {
            return Err(Error::Domain(format!("free ray in {spec}")));
        }
        let prefix = if prefix.is_empty() {
            Vec::new()
        } else {
            word(prefix)?
        };
        let ray = RaySpec::FreeTail {
            prefix,
            period: word(period)?,
        };
        ray.validate(spec)?;
        Ok(ray)
    }

    /// Checks junctions, dimensions and parameter order.
    pub fn validate(&self, spec: &GroupSpec) -> Result<()> {
        match self {
            RaySpec::FreeTail { prefix, period } => {
                spec.check(&GroupElement::Word(prefix.clone()))?;
                spec.check(&GroupElement::Word(period.clone()))?;
                if period.is_empty() {
                    return Err(Error::Construction("empty period".into()));
                }
                let cancels = |a: Option<&Letter>, b: Option<&Letter>| matches!((a, b), (Some(x), Some(y)) if *x == -*y);
                if cancels(prefix.last(), period.first()) {
                    return Err(Error::Construction(format!(
                        "prefix {} cancels against period {}",
                        format_word(prefix),
                        format_word(period)
                    )));
                }
                if cancels(period.last(), period.first()) {
                    return Err(Error::Construction(format!(
                        "period {} cancels against itself",
                        format_word(period)
                    )));
                }
            }
            RaySpec::LatticePath { offset, steps } => {
                spec.check(&GroupElement::Vector(offset.clone()))?;
                if steps.is_empty() {
                    return Err(Error::Construction("lattice path needs a direction".into()));
                }
                for s in steps {
                    spec.check(&GroupElement::Vector(s.clone()))?;
                    if s.iter().all(|&c| c == 0) {
                        return Err(Error::Construction("zero step".into()));
                    }
                }
            }
            RaySpec::ExplicitTable(rows) => {
                if rows.first().map(|r| r.0) != Some(int(0)) {
                    return Err(Error::Construction("table must start at t = 0".into()));
                }
                for w in rows.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::Construction(format!(
                            "parameters must increase strictly: {} then {}",
                            format_exact(&w[0].0),
                            format_exact(&w[1].0)
                        )));
                    }
                }
                for (_, p) in rows {
                    spec.check(p)?;
                }
            }
        }
        Ok(())
    }

    /// `γ(t)` for integer `t` on the generated families.
    pub fn point_at(&self, t: u32) -> Option<GroupElement> {
        match self {
            RaySpec::FreeTail { prefix, period } => {
                let t = t as usize;
                let mut w: Vec<Letter> = prefix.iter().take(t).copied().collect();
                while w.len() < t {
                    let need = t - w.len();
                    w.extend(period.iter().take(need));
                }
                Some(GroupElement::Word(w))
            }
            RaySpec::LatticePath { offset, steps } => {
                let mut p = offset.clone();
                for i in 0..t as usize {
                    for (c, s) in p.iter_mut().zip(&steps[i % steps.len()]) {
                        *c += s;
                    }
                }
                Some(GroupElement::Vector(p))
            }
            RaySpec::ExplicitTable(rows) => rows
                .iter()
                .find(|(p, _)| *p == int(t as i64))
                .map(|(_, g)| g.clone()),
        }
    }

    /// Reads an explicit table: a JSON array of `[t, point]`, with `t` an
    /// integer or a `"p/q"` string and `point` in element syntax.
    pub fn table_from_json(spec: &GroupSpec, text: &str) -> Result<Self> {
        let rows: Vec<(serde_json::Value, String)> = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.column(), format!("ray table: {e}")))?;
        let mut out = Vec::with_capacity(rows.len());
        for (t, p) in rows {
            let t = match t {
                serde_json::Value::Number(n) => int(n
                    .as_i64()
                    .ok_or_else(|| Error::parse(0, format!("bad parameter {n}")))?),
                serde_json::Value::String(s) => parse_exact(&s)?,
                other => return Err(Error::parse(0, format!("bad parameter {other}"))),
            };
            if t.is_negative() {
                return Err(Error::Construction("negative parameter".into()));
            }
            out.push((t, spec.parse_element(&p)?));
        }
        let ray = RaySpec::ExplicitTable(out);
        ray.validate(spec)?;
        Ok(ray)
    }
}

impl fmt::Display for RaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaySpec::FreeTail { prefix, period } => {
                let p = if prefix.is_empty() {
                    String::new()
                } else {
                    format_word(prefix)
                };
                write!(f, "free:{p}|{}", format_word(period))
            }
            RaySpec::LatticePath { offset, steps } => {
                let v = |v: &Vec<i64>| GroupElement::Vector(v.clone()).to_string();
                let d: Vec<String> = steps.iter().map(v).collect();
                write!(f, "lattice:offset={};dir={}", v(offset), d.join(","))
            }
            RaySpec::ExplicitTable(rows) => write!(f, "table[{}]", rows.len()),
        }
    }
}

impl fmt::Debug for RaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RaySpec({self})")
    }
}

impl Serialize for RaySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `free:<prefix>|<period>` or `lattice:offset=(..);dir=(..),(..)`,
/// with an optional leading `ray=`. Tables (`@file.json`) are read by the
/// caller and passed to [`RaySpec::table_from_json`].
pub fn parse_ray_spec(spec: &GroupSpec, text: &str) -> Result<RaySpec> {
    let body = text.strip_prefix("ray=").unwrap_or(text);
    let skip = text.len() - body.len();
    if let Some(rest) = body.strip_prefix("free:") {
        let (prefix, period) = rest
            .split_once('|')
            .ok_or_else(|| Error::parse(skip + 5, "expected `<prefix>|<period>`"))?;
        return RaySpec::free_tail(spec, prefix, period);
    }
    if let Some(rest) = body.strip_prefix("lattice:") {
        let at = skip + 8;
        let rank = match spec {
            GroupSpec::Lattice { rank, .. } => *rank,
            _ => return Err(Error::Domain(format!("lattice ray in {spec}"))),
        };
        let (off, dir) = rest
            .split_once(';')
            .ok_or_else(|| Error::parse(at, "expected `offset=(..);dir=(..)`"))?;
        let off = off
            .strip_prefix("offset=")
            .ok_or_else(|| Error::parse(at, "expected `offset=`"))?;
        let dir_at = at + "offset=".len() + off.len() + 1;
        let dir = dir
            .strip_prefix("dir=")
            .ok_or_else(|| Error::parse(dir_at, "expected `dir=`"))?;
        let offset = match spec.parse_element(off)? {
            GroupElement::Vector(v) => v,
            GroupElement::Word(_) => unreachable!(),
        };
        let steps = crate::cayley::parse_vector_list(dir, rank, dir_at + 4)?
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        let ray = RaySpec::LatticePath { offset, steps };
        ray.validate(spec)?;
        return Ok(ray);
    }
    Err(Error::parse(skip, "expected `free:` or `lattice:` ray"))
}

/// A finite piece `γ(t_0 = 0), ..., γ(t_m = horizon)` of a ray.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayTruncation {
    pub spec: GroupSpec,
    pub origin: RaySpec,
    #[serde(with = "serde_exact")]
    pub horizon: Exact,
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sample {
    #[serde(with = "serde_exact")]
    pub t: Exact,
    pub point: GroupElement,
}

pub fn materialize_ray(spec: &GroupSpec, ray: &RaySpec, horizon: u32) -> Result<RayTruncation> {
    ray.validate(spec)?;
    if horizon == 0 {
        return Err(Error::Construction("horizon must be positive".into()));
    }
    let samples: Vec<Sample> = match ray {
        RaySpec::ExplicitTable(rows) => rows
            .iter()
            .filter(|(t, _)| *t <= int(horizon as i64))
            .map(|(t, p)| Sample {
                t: *t,
                point: p.clone(),
            })
            .collect(),
        _ => (0..=horizon)
            .map(|t| Sample {
                t: int(t as i64),
                point: ray.point_at(t).expect("generated families are total"),
            })
            .collect(),
    };
    if samples.len() < 2 {
        return Err(Error::Construction(format!(
            "truncation at horizon {horizon} has fewer than two samples"
        )));
    }
    Ok(RayTruncation {
        spec: spec.clone(),
        origin: ray.clone(),
        horizon: samples.last().unwrap().t,
        samples,
    })
}

impl RayTruncation {
    /// Largest candidate threshold: `⌊horizon/2⌋`.
    pub fn max_threshold(&self) -> i64 {
        (self.horizon / 2).floor().to_integer()
    }

    /// Points after `γ(0)`, in order.
    pub fn tail_points(&self) -> Vec<GroupElement> {
        self.samples[1..].iter().map(|s| s.point.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Geodesic,
    AlmostGeodesic,
    WeaklyGeodesic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One violated (or maximal) instance of a clause's inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(with = "serde_exact")]
    pub t: Exact,
    #[serde(with = "serde_exact::option")]
    pub s: Option<Exact>,
    pub probe: Option<GroupElement>,
    /// 1: `|d(γ(t),γ(0)) - t|`; 2: the pair/probe inequality.
    pub inequality: u8,
    #[serde(with = "serde_exact")]
    pub defect: Exact,
}

impl Violation {
    /// The parameter a threshold `N` must exceed to exclude this instance.
    fn anchor(&self) -> Exact {
        self.s.unwrap_or(self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub clause: Clause,
    #[serde(with = "serde_exact::option")]
    pub epsilon: Option<Exact>,
    pub verdict: Verdict,
    /// Least passing threshold.
    pub n: Option<i64>,
    pub witness: Option<Violation>,
    #[serde(with = "serde_exact")]
    pub max_defect: Exact,
    /// Largest defect among instances anchored at or beyond `⌊horizon/2⌋`;
    /// every `ε` above it passes.
    #[serde(with = "serde_exact")]
    pub tail_defect: Exact,
    pub probes: Vec<GroupElement>,
}

fn d(metric: &WordMetric, x: &GroupElement, y: &GroupElement) -> Result<Exact> {
    Ok(int(metric.dist(x, y)? as i64))
}

/// Every instance of a clause's inequality, row by row in `t`.
fn instances(
    ray: &RayTruncation,
    clause: Clause,
    probes: &[GroupElement],
    metric: &WordMetric,
    exec: Execution,
) -> Result<Vec<Violation>> {
    let s = &ray.samples;
    let g0 = &s[0].point;
    let rows = par::map_indexed(exec, s.len(), |i| -> Result<Vec<Violation>> {
        let (t, gt) = (s[i].t, &s[i].point);
        let mut out = Vec::new();
        match clause {
            Clause::Geodesic => {
                for sj in &s[..i] {
                    let defect = (d(metric, gt, &sj.point)? - (t - sj.t)).abs();
                    out.push(Violation {
                        t,
                        s: Some(sj.t),
                        probe: None,
                        inequality: 2,
                        defect,
                    });
                }
            }
            Clause::AlmostGeodesic => {
                for sj in &s[..=i] {
                    let defect = (d(metric, gt, &sj.point)? + d(metric, &sj.point, g0)? - t).abs();
                    out.push(Violation {
                        t,
                        s: Some(sj.t),
                        probe: None,
                        inequality: 2,
                        defect,
                    });
                }
            }
            Clause::WeaklyGeodesic => {
                let defect = (d(metric, gt, g0)? - t).abs();
                out.push(Violation {
                    t,
                    s: None,
                    probe: None,
                    inequality: 1,
                    defect,
                });
                for y in probes {
                    let dty = d(metric, gt, y)?;
                    for sj in &s[..i] {
                        let defect = (dty - d(metric, &sj.point, y)? - (t - sj.t)).abs();
                        out.push(Violation {
                            t,
                            s: Some(sj.t),
                            probe: Some(y.clone()),
                            inequality: 2,
                            defect,
                        });
                    }
                }
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for r in rows {
        all.extend(r?);
    }
    Ok(all)
}

fn classify(
    ray: &RayTruncation,
    clause: Clause,
    epsilon: Option<Exact>,
    probes: Vec<GroupElement>,
    metric: &WordMetric,
    exec: Execution,
) -> Result<ClassificationReport> {
    if let Some(e) = epsilon {
        if !e.is_positive() {
            return Err(Error::Precondition("epsilon must be positive".into()));
        }
    }
    let all = instances(ray, clause, &probes, metric, exec)?;
    let half = int(ray.max_threshold());
    let max_defect = all
        .iter()
        .map(|v| v.defect)
        .max()
        .unwrap_or_else(Exact::zero);
    let tail_defect = all
        .iter()
        .filter(|v| v.anchor() >= half)
        .map(|v| v.defect)
        .max()
        .unwrap_or_else(Exact::zero);

    let report = match epsilon {
        None => {
            // exact equality, no threshold
            let witness = all
                .iter()
                .find(|v| v.defect == max_defect && !v.defect.is_zero());
            ClassificationReport {
                clause,
                epsilon,
                verdict: if witness.is_none() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                },
                n: None,
                witness: witness.cloned(),
                max_defect,
                tail_defect,
                probes,
            }
        }
        Some(eps) => {
            // the violation anchored furthest out; ties go to the smallest t
            let mut worst: Option<&Violation> = None;
            for v in all.iter().filter(|v| v.defect >= eps) {
                if worst.is_none_or(|w| v.anchor() > w.anchor()) {
                    worst = Some(v);
                }
            }
            let n = worst.map_or(0, |w| w.anchor().floor().to_integer() + 1);
            let pass = n <= ray.max_threshold();
            ClassificationReport {
                clause,
                epsilon,
                verdict: if pass { Verdict::Pass } else { Verdict::Fail },
                n: pass.then_some(n),
                witness: if pass { None } else { worst.cloned() },
                max_defect,
                tail_defect,
                probes,
            }
        }
    };
    Ok(report)
}

/// `d(γ(s), γ(t)) = |s - t|` for every sampled pair.
pub fn check_geodesic(ray: &RayTruncation, radius: u32) -> Result<ClassificationReport> {
    let metric = WordMetric::new(&ray.spec, radius)?;
    classify(
        ray,
        Clause::Geodesic,
        None,
        vec![],
        &metric,
        Execution::default(),
    )
}

/// `|d(γ(t), γ(s)) + d(γ(s), γ(0)) - t| < ε` for sampled `t ≥ s ≥ N`.
pub fn check_almost_geodesic(
    ray: &RayTruncation,
    epsilon: Exact,
    radius: u32,
) -> Result<ClassificationReport> {
    let metric = WordMetric::new(&ray.spec, radius)?;
    classify(
        ray,
        Clause::AlmostGeodesic,
        Some(epsilon),
        vec![],
        &metric,
        Execution::default(),
    )
}

/// Both inequalities of the weakly-geodesic clause for sampled `t, s ≥ N`
/// and every probe `y`.
pub fn check_weakly_geodesic(
    ray: &RayTruncation,
    epsilon: Exact,
    probes: &[GroupElement],
    radius: u32,
) -> Result<ClassificationReport> {
    if probes.is_empty() {
        return Err(Error::Precondition("probe set is empty".into()));
    }
    let metric = WordMetric::new(&ray.spec, radius)?;
    classify(
        ray,
        Clause::WeaklyGeodesic,
        Some(epsilon),
        probes.to_vec(),
        &metric,
        Execution::default(),
    )
}

/// The sphere of radius 2 about `e`, the default weakly-geodesic probes.
pub fn default_probes(spec: &GroupSpec) -> Result<Vec<GroupElement>> {
    Ok(crate::cayley::build_ball(spec, 2)?.sphere(2)?.to_vec())
}

impl ClassificationReport {
    /// Re-evaluates the clause at the reported threshold or witness and
    /// checks that the verdict comes out the same.
    pub fn replay(&self, ray: &RayTruncation, radius: u32) -> Result<bool> {
        let metric = WordMetric::new(&ray.spec, radius)?;
        let all = instances(
            ray,
            self.clause,
            &self.probes,
            &metric,
            Execution::Sequential,
        )?;
        Ok(match (self.epsilon, self.verdict) {
            (None, Verdict::Pass) => all.iter().all(|v| v.defect.is_zero()),
            (None, Verdict::Fail) => self.witness.as_ref().is_some_and(|w| all.contains(w)),
            (Some(eps), Verdict::Pass) => {
                let Some(n) = self.n else { return Ok(false) };
                let n = int(n);
                let holds = all
                    .iter()
                    .filter(|v| v.anchor() >= n)
                    .all(|v| v.defect < eps);
                let minimal =
                    n.is_zero() || all.iter().any(|v| v.anchor() >= n - 1 && v.defect >= eps);
                holds && minimal && n <= int(ray.max_threshold())
            }
            (Some(eps), Verdict::Fail) => self.witness.as_ref().is_some_and(|w| {
                all.contains(w) && w.defect >= eps && w.anchor() >= int(ray.max_threshold())
            }),
        })
    }
}
