use bscope_core::action::{defect_decay_scan, MeanFamily};
use bscope_core::boundary::{
    continuity_probe, default_probe_radius, extended_product, gromov_equiv, metric_equiv,
    quotient_partition, witness_large_horofunction, BoundarySample, EquivMode, MetricVerdict,
    Operand,
};
use bscope_core::cayley::{build_ball, parse_group_spec, GroupElement, GroupSpec, WordMetric};
use bscope_core::exact::{parse_exact, Exact};
use bscope_core::rays::{
    check_almost_geodesic, check_geodesic, check_weakly_geodesic, default_probes, materialize_ray,
    parse_ray_spec, RaySpec,
};
use bscope_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::{OperandInput, RunConfig, SampleInput};

pub struct Outcome {
    pub result: Value,
    /// Set when the verdict is "inconclusive at this horizon".
    pub inconclusive: bool,
    /// Plain-text rendering for `--format csv`.
    pub csv: Option<String>,
}

impl Outcome {
    fn of(result: Value) -> Self {
        Outcome {
            result,
            inconclusive: false,
            csv: None,
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn exact_arg(name: &str, v: &Option<String>) -> Result<Exact> {
    let text = v
        .as_deref()
        .ok_or_else(|| Error::Precondition(format!("missing --{name}")))?;
    parse_exact(text)
}

fn opt_exact(v: &Option<String>) -> Result<Option<Exact>> {
    v.as_deref().map(parse_exact).transpose()
}

fn point(spec: &GroupSpec, cfg: &RunConfig, key: &str) -> Result<GroupElement> {
    let text = cfg
        .points
        .get(key)
        .ok_or_else(|| Error::Precondition(format!("missing --{key}")))?;
    spec.parse_element(text)
}

fn is_out_of_window(e: &Error) -> bool {
    matches!(e, Error::OutOfWindow { .. })
}

/// Runs `f` at the requested radius, or at doubling radii from 32 until
/// nothing falls outside the window.
fn fit_radius<T>(explicit: Option<u32>, mut f: impl FnMut(u32) -> Result<T>) -> Result<(u32, T)> {
    if let Some(r) = explicit {
        return f(r).map(|t| (r, t));
    }
    let mut r = 32u32;
    loop {
        match f(r) {
            Err(e) if is_out_of_window(&e) && r < 1 << 20 => r *= 2,
            other => return other.map(|t| (r, t)),
        }
    }
}

fn ray_of(spec: &GroupSpec, s: &SampleInput) -> Result<Option<RaySpec>> {
    if let Some(t) = &s.table {
        return RaySpec::table_from_json(spec, &t.to_string()).map(Some);
    }
    s.ray
        .as_deref()
        .map(|r| parse_ray_spec(spec, r))
        .transpose()
}

fn build_sample(metric: &WordMetric, s: &SampleInput, horizon: u32) -> Result<BoundarySample> {
    if let Some(points) = &s.points {
        return BoundarySample::from_reprs(metric, s.label.clone(), points);
    }
    match ray_of(metric.spec(), s)? {
        Some(ray) => BoundarySample::from_ray(metric, s.label.clone(), &ray, horizon),
        None => Err(Error::Precondition(format!(
            "sample {} has no points or ray",
            s.label
        ))),
    }
}

fn build_samples(
    metric: &WordMetric,
    inputs: &[&SampleInput],
    horizon: u32,
) -> Result<Vec<BoundarySample>> {
    inputs
        .iter()
        .map(|s| build_sample(metric, s, horizon))
        .collect()
}

/// Samples plus a window wide enough for products among them and for
/// horofunctions with probes up to `extra`.
fn sample_window(
    spec: &GroupSpec,
    cfg: &RunConfig,
    inputs: &[&SampleInput],
    extra: u32,
) -> Result<(WordMetric, Vec<BoundarySample>)> {
    if inputs.is_empty() {
        return Err(Error::Precondition("no samples given".into()));
    }
    let (_, samples) = fit_radius(cfg.radius, |r| {
        build_samples(&WordMetric::new(spec, r)?, inputs, cfg.horizon)
    })?;
    let radius = match cfg.radius {
        Some(r) => r,
        None => {
            let top = samples
                .iter()
                .flat_map(|s| s.norms().last().copied())
                .max()
                .unwrap_or(0);
            2 * top + extra + 1
        }
    };
    Ok((WordMetric::new(spec, radius)?, samples))
}

fn probe_radius(cfg: &RunConfig) -> u32 {
    cfg.probe_radius
        .unwrap_or_else(|| default_probe_radius(cfg.radius.unwrap_or(u32::MAX)))
}

fn mode(cfg: &RunConfig) -> EquivMode {
    if cfg.double_index {
        EquivMode::DoubleIndex
    } else {
        EquivMode::SingleIndex
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let spec = parse_group_spec(&cfg.group)?;
    if cfg.format == "csv" && cfg.command != "mean-scan" {
        return Err(Error::Precondition(format!(
            "--format csv is only available for mean-scan, not {}",
            cfg.command
        )));
    }
    match cfg.command.as_str() {
        "ball" => {
            let radius = cfg
                .radius
                .ok_or_else(|| Error::Precondition("missing --radius".into()))?;
            Ok(Outcome::of(build_ball(&spec, radius)?.to_json()))
        }
        "delta" => {
            let radius = cfg
                .radius
                .ok_or_else(|| Error::Precondition("missing --radius".into()))?;
            let ball = build_ball(&spec, radius)?;
            let report = ball.window()?.min_delta();
            Ok(Outcome::of(
                json!({"ball_size": ball.len(), "delta": report}),
            ))
        }
        "product" => {
            let (x, y) = (point(&spec, cfg, "x")?, point(&spec, cfg, "y")?);
            let base = match cfg.points.get("base") {
                Some(b) => spec.parse_element(b)?,
                None => spec.identity(),
            };
            let (radius, (p, d)) = fit_radius(cfg.radius, |r| {
                let m = WordMetric::new(&spec, r)?;
                Ok((m.product_based(&x, &y, &base)?, m.dist(&x, &y)?))
            })?;
            Ok(Outcome::of(json!({
                "x": x, "y": y, "base": base, "product": p, "distance": d, "window_radius": radius,
            })))
        }
        "horofn" => {
            let (z, x) = (point(&spec, cfg, "z")?, point(&spec, cfg, "x")?);
            let (radius, v) = fit_radius(cfg.radius, |r| {
                WordMetric::new(&spec, r)?.horofunction(&z, &x)
            })?;
            Ok(Outcome::of(json!({
                "z": z, "x": x, "value": bscope_core::exact::format_exact(&v), "window_radius": radius,
            })))
        }
        "classify" => {
            let input = cfg
                .ray
                .as_ref()
                .ok_or_else(|| Error::Precondition("missing --ray".into()))?;
            let ray =
                ray_of(&spec, input)?.ok_or_else(|| Error::Precondition("missing --ray".into()))?;
            let tr = materialize_ray(&spec, &ray, cfg.horizon)?;
            let clause = cfg.clause.as_deref().unwrap_or("geodesic");
            let probes = match cfg.probe_radius {
                Some(p) => build_ball(&spec, p)?.sphere(p)?.to_vec(),
                None => default_probes(&spec)?,
            };
            let (radius, report) = fit_radius(cfg.radius, |r| match clause {
                "geodesic" => check_geodesic(&tr, r),
                "almost-geodesic" => {
                    check_almost_geodesic(&tr, exact_arg("epsilon", &cfg.epsilon)?, r)
                }
                "weakly-geodesic" => {
                    check_weakly_geodesic(&tr, exact_arg("epsilon", &cfg.epsilon)?, &probes, r)
                }
                other => Err(Error::Precondition(format!(
                    "unknown clause {other}; use geodesic, almost-geodesic or weakly-geodesic"
                ))),
            })?;
            Ok(Outcome::of(json!({
                "ray": ray, "truncation": tr, "window_radius": radius, "report": report,
            })))
        }
        "equiv" => {
            let inputs: Vec<&SampleInput> = cfg.samples.iter().collect();
            if inputs.len() != 2 {
                return Err(Error::Precondition(
                    "equiv needs exactly two samples".into(),
                ));
            }
            let (m, s) = sample_window(&spec, cfg, &inputs, 0)?;
            let cert = gromov_equiv(&s[0], &s[1], exact_arg("M", &cfg.threshold)?, &m, mode(cfg))?;
            Ok(Outcome::of(
                json!({"window_radius": m.radius(), "certificate": cert}),
            ))
        }
        "metric-equiv" => {
            let inputs: Vec<&SampleInput> = cfg.samples.iter().collect();
            if inputs.len() != 2 {
                return Err(Error::Precondition(
                    "metric-equiv needs exactly two samples".into(),
                ));
            }
            let pr = probe_radius(cfg);
            let (m, s) = sample_window(&spec, cfg, &inputs, pr)?;
            let probes = build_ball(&spec, pr)?.elements().to_vec();
            let report = metric_equiv(&s[0], &s[1], &probes, opt_exact(&cfg.tol)?, &m)?;
            let inconclusive = matches!(report.result, MetricVerdict::Inconclusive { .. });
            Ok(Outcome {
                result: json!({"window_radius": m.radius(), "probe_radius": pr, "report": report}),
                inconclusive,
                csv: None,
            })
        }
        "witness" => {
            let inputs: Vec<&SampleInput> = cfg.samples.iter().collect();
            if inputs.len() != 1 {
                return Err(Error::Precondition(
                    "witness needs exactly one sample".into(),
                ));
            }
            let n = exact_arg("N", &cfg.n_bound)?;
            let eps = exact_arg("epsilon", &cfg.epsilon)?;
            let r = (n + eps).floor().to_integer().max(0) as u32 + 1;
            let (m, s) = sample_window(&spec, cfg, &inputs, r)?;
            let w = witness_large_horofunction(&s[0], n, eps, &m)?;
            let replayed = w.replay(&s[0], &m)?;
            Ok(Outcome::of(
                json!({"window_radius": m.radius(), "witness": w, "replayed": replayed}),
            ))
        }
        "quotient" => {
            let inputs: Vec<&SampleInput> = cfg.samples.iter().collect();
            let pr = probe_radius(cfg);
            let (m, s) = sample_window(&spec, cfg, &inputs, pr)?;
            let probes = build_ball(&spec, pr)?.elements().to_vec();
            let q = quotient_partition(
                &s,
                exact_arg("M", &cfg.threshold)?,
                &probes,
                opt_exact(&cfg.tol)?,
                &m,
                mode(cfg),
            )?;
            Ok(Outcome::of(
                json!({"window_radius": m.radius(), "probe_radius": pr, "partition": q}),
            ))
        }
        "extended" => {
            if cfg.operands.len() != 2 {
                return Err(Error::Precondition("extended needs --a and --b".into()));
            }
            let inputs: Vec<&SampleInput> = cfg
                .operands
                .iter()
                .filter_map(|o| match o {
                    OperandInput::Sample(s) => Some(s),
                    OperandInput::Point(_) => None,
                })
                .collect();
            let pts: Vec<Option<GroupElement>> = cfg
                .operands
                .iter()
                .map(|o| match o {
                    OperandInput::Point(p) => spec.parse_element(p).map(Some),
                    OperandInput::Sample(_) => Ok(None),
                })
                .collect::<Result<_>>()?;
            let (_, top) = fit_radius(cfg.radius, |r| {
                let m = WordMetric::new(&spec, r)?;
                pts.iter()
                    .flatten()
                    .try_fold(0u32, |a, p| Ok(a.max(m.norm(p)?)))
            })?;
            let (m, samples) = if inputs.is_empty() {
                (
                    WordMetric::new(&spec, cfg.radius.unwrap_or(2 * top + 1))?,
                    Vec::new(),
                )
            } else {
                sample_window(&spec, cfg, &inputs, top)?
            };
            let mut it = samples.iter();
            let ops: Vec<Operand> = pts
                .iter()
                .map(|p| match p {
                    Some(p) => Operand::Point(p),
                    None => Operand::Sample(it.next().expect("one sample per operand")),
                })
                .collect();
            let p = extended_product(ops[0], ops[1], &m)?;
            let cert = opt_exact(&cfg.threshold)?.map(|t| p.certificate(t));
            Ok(Outcome::of(
                json!({"window_radius": m.radius(), "product": p, "certificate": cert}),
            ))
        }
        "continuity" => {
            let omega = cfg
                .omega
                .as_ref()
                .ok_or_else(|| Error::Precondition("missing --omega".into()))?;
            let mut inputs: Vec<&SampleInput> = cfg.samples.iter().collect();
            inputs.push(omega);
            let pr = probe_radius(cfg);
            let (m, mut s) = sample_window(&spec, cfg, &inputs, pr)?;
            let target = s.pop().expect("omega was pushed last");
            let probes = build_ball(&spec, pr)?;
            let rows = continuity_probe(&s, &target, &probes, exact_arg("M", &cfg.threshold)?, &m)?;
            Ok(Outcome::of(
                json!({"window_radius": m.radius(), "rows": rows}),
            ))
        }
        "mean-scan" => {
            let gens = if cfg.gens.is_empty() {
                spec.generators()
            } else {
                cfg.gens
                    .iter()
                    .map(|g| spec.parse_element(g))
                    .collect::<Result<_>>()?
            };
            if cfg.rays.is_empty() {
                return Err(Error::Precondition(
                    "mean-scan needs at least one --ray".into(),
                ));
            }
            let rays = cfg
                .rays
                .iter()
                .map(|r| parse_ray_spec(&spec, r))
                .collect::<Result<Vec<_>>>()?;
            let n_values = if cfg.n_values.is_empty() {
                vec![4, 8, 16, 32, 64]
            } else {
                cfg.n_values.clone()
            };
            let scan = defect_decay_scan(
                &spec,
                &gens,
                &rays,
                &n_values,
                MeanFamily {
                    inclusive: cfg.inclusive,
                },
            )?;
            Ok(Outcome {
                csv: Some(scan.to_csv()),
                result: to_value(&scan),
                inconclusive: false,
            })
        }
        other => Err(Error::Precondition(format!("unknown command {other}"))),
    }
}
