use std::collections::BTreeMap;
use std::fs;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One boundary sample: explicit points, a generated ray, or an explicit
/// ray table, always with a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInput {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Value>,
}

/// Everything a run depends on, with file inputs inlined so a report can
/// be replayed from its own config echo.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    pub horizon: u32,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_radius: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<String>,
    pub seed: u64,
    pub format: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub double_index: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub points: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<SampleInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<SampleInput>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operands: Vec<OperandInput>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gens: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rays: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_values: Vec<u32>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub inclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperandInput {
    Point(String),
    Sample(SampleInput),
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Reads `@path` as file contents; anything else is returned unchanged.
pub fn read_at(text: &str) -> Result<String, String> {
    match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(text.to_string()),
    }
}

fn read_json(path_arg: &str) -> Result<Value, String> {
    let text = read_at(path_arg)?;
    serde_json::from_str(&text).map_err(|e| format!("{path_arg}: {e}"))
}

/// `label=free:..|..`, `label=lattice:...`, `label=@table.json` or
/// `label=points:p1;p2;...`.
pub fn parse_sample_arg(arg: &str) -> Result<SampleInput, String> {
    let (label, body) = arg
        .split_once('=')
        .ok_or_else(|| format!("sample `{arg}` must look like label=<ray or points>"))?;
    let mut s = SampleInput {
        label: label.to_string(),
        points: None,
        ray: None,
        table: None,
    };
    if let Some(list) = body.strip_prefix("points:") {
        s.points = Some(
            list.split(';')
                .filter(|p| !p.is_empty())
                .map(String::from)
                .collect(),
        );
    } else if body.starts_with('@') {
        s.table = Some(read_json(body)?);
    } else {
        s.ray = Some(body.to_string());
    }
    Ok(s)
}

/// `@file.json`: an array of `{"label", "points" | "ray" | "table"}`.
pub fn parse_samples_file(arg: &str) -> Result<Vec<SampleInput>, String> {
    let value = read_json(arg)?;
    let mut samples: Vec<SampleInput> =
        serde_json::from_value(value).map_err(|e| format!("{arg}: {e}"))?;
    for s in &mut samples {
        let given = [s.points.is_some(), s.ray.is_some(), s.table.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(format!(
                "sample {} needs exactly one of points, ray, table",
                s.label
            ));
        }
        if let Some(r) = s
            .ray
            .as_deref()
            .and_then(|r| r.strip_prefix("ray=").or(Some(r)))
        {
            if r.starts_with('@') {
                s.table = Some(read_json(r)?);
                s.ray = None;
            }
        }
    }
    Ok(samples)
}

/// An operand is a sample when it has a `label=` part, a point otherwise.
pub fn parse_operand(arg: &str) -> Result<OperandInput, String> {
    if arg.contains('=') {
        parse_sample_arg(arg).map(OperandInput::Sample)
    } else {
        Ok(OperandInput::Point(arg.to_string()))
    }
}
