//! Merges the per-command JSON reports of one output directory into
//! `summary.csv` and a printed table.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

pub struct Row {
    pub source: String,
    pub metric: String,
    pub value: Option<f64>,
    /// Printed value when `value` is not numeric (model names, flags).
    pub text: Option<String>,
    pub reference: String,
}

impl Row {
    fn number(source: &str, metric: impl Into<String>, value: Option<f64>, reference: impl Into<String>) -> Self {
        Row { source: source.into(), metric: metric.into(), value, text: None, reference: reference.into() }
    }

    fn text(source: &str, metric: impl Into<String>, text: impl Into<String>, reference: impl Into<String>) -> Self {
        Row { source: source.into(), metric: metric.into(), value: None, text: Some(text.into()), reference: reference.into() }
    }

    fn shown(&self) -> String {
        match (&self.text, self.value) {
            (Some(t), _) => t.clone(),
            (None, Some(v)) if v != 0.0 && v.abs() < 0.01 => format!("{v:.2e}"),
            (None, Some(v)) => format!("{v:.2}"),
            (None, None) => "n/a".into(),
        }
    }

    fn raw(&self) -> String {
        match (&self.text, self.value) {
            (Some(t), _) => t.clone(),
            (None, Some(v)) => v.to_string(),
            (None, None) => String::new(),
        }
    }

    /// `metric: value (reference)`
    pub fn line(&self) -> String {
        if self.reference.is_empty() {
            format!("{}: {}", self.metric, self.shown())
        } else {
            format!("{}: {} ({})", self.metric, self.shown(), self.reference)
        }
    }
}

fn ratio_label(num: u32, den: u32) -> String {
    if num == den {
        "1".into()
    } else {
        format!("{num}/{den}")
    }
}

/// Reference growth rate of `osc2` for the known surface and field pairs:
/// `Some(rate)` for power laws, `None` where the log model is expected.
fn growth_reference(surface: &str, order: Option<u32>, field: &str) -> Option<Option<String>> {
    match (surface, field) {
        ("plane", "x1" | "x2" | "u" | "v") => Some(Some("1".into())),
        ("enneper", f) => {
            let k = order.unwrap_or(1);
            let den = 2 * k + 1;
            match f {
                "x1" | "x2" => Some(Some("1".into())),
                "x3" => Some(Some(ratio_label(k + 1, den))),
                "u" | "v" => Some(Some(ratio_label(1, den))),
                _ => None,
            }
        }
        ("catenoid", "x3") | ("helicoid", "u") => Some(None),
        _ => None,
    }
}

fn area_reference(surface: &str, order: Option<u32>) -> (String, String) {
    match surface {
        "plane" => ("plane π".into(), "reference 2".into()),
        "enneper" => {
            let k = order.unwrap_or(1);
            (format!("reference {}π", 2 * k + 1), "reference 2".into())
        }
        "helicoid" => (String::new(), "reference 3, cubic".into()),
        _ => (String::new(), String::new()),
    }
}

fn f(v: &Value) -> Option<f64> {
    v.as_f64()
}

fn rows_for(name: &str, report: &Value) -> Vec<Row> {
    let surface = report["surface"].as_str().unwrap_or("");
    let order = report["order"].as_u64().map(|k| k as u32);
    let field = report["field"].as_str().unwrap_or("");
    let r = &report["result"];
    let mut rows = Vec::new();
    match report["command"].as_str().unwrap_or("") {
        "mesh" => {
            let chi = r["euler_characteristic"].as_i64();
            let disk = if chi == Some(1) { "disk" } else { "non-disk" };
            rows.push(Row::text(name, "Euler characteristic", chi.map(|c| c.to_string()).unwrap_or_default(), disk));
            rows.push(Row::number(name, "max conformal defect", f(&r["max_conformal_defect"]), ""));
        }
        "area-growth" => {
            let (c_ref, exp_ref) = area_reference(surface, order);
            rows.push(Row::number(name, "C_a", f(&r["fit"]["c_a"]), c_ref));
            rows.push(Row::number(name, "area exponent", f(&r["fit"]["exponent"]), exp_ref));
        }
        "growth-fit" => {
            let fit = &r["fit"];
            let preferred = fit["preferred"].as_str().unwrap_or("");
            match growth_reference(surface, order, field) {
                Some(Some(rate)) => {
                    rows.push(Row::number(name, format!("{field} growth"), f(&fit["alpha"]), format!("reference {rate}")));
                    rows.push(Row::text(name, format!("{field} growth model"), preferred, "reference power"));
                }
                Some(None) => {
                    rows.push(Row::number(name, format!("{field} growth"), f(&fit["alpha"]), ""));
                    rows.push(Row::text(name, format!("{field} growth model"), preferred, "reference log"));
                }
                None => {
                    rows.push(Row::number(name, format!("{field} growth"), f(&fit["alpha"]), ""));
                    rows.push(Row::text(name, format!("{field} growth model"), preferred, ""));
                }
            }
        }
        "osc-decay" => {
            let max_ratio = r["curve"]["ratios"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|d| f(&d["ratio"]))
                .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |m| m.max(q))));
            rows.push(Row::number(name, format!("{field} max decay ratio"), max_ratio, "reference < 1"));
        }
        "certify" => {
            let total = r["certificates"].as_array().map_or(0, |a| a.len());
            let passed = r["certificates"]
                .as_array()
                .into_iter()
                .flatten()
                .filter(|c| c["status"] == "pass")
                .count();
            rows.push(Row::text(name, format!("{field} certificates"), format!("{passed}/{total} pass"), ""));
            rows.push(Row::number(name, "gamma", f(&r["bound"]["gamma"]), ""));
        }
        "holder" => {
            rows.push(Row::number(name, format!("{field} Hölder alpha"), f(&r["fit"]["alpha"]), ""));
        }
        "nodal" => {
            let worst = r["radii"]
                .as_array()
                .into_iter()
                .flatten()
                .filter_map(|e| Some(f(&e["length"])? / (0.5 * f(&e["radius"])?)))
                .fold(None, |m: Option<f64>, q| Some(m.map_or(q, |m| m.min(q))));
            rows.push(Row::number(name, "min nodal length / (r/2)", worst, "reference >= 1"));
            rows.push(Row::number(name, "coarea relative error", f(&r["coarea"]["relative_error"]), ""));
        }
        "cone-profile" => {
            for p in r["profiles"].as_array().into_iter().flatten() {
                let alpha = f(&p["alpha"]).unwrap_or(f64::NAN);
                rows.push(Row::number(name, format!("cone C (alpha {alpha})"), f(&p["c"]), ""));
            }
        }
        _ => {}
    }
    rows
}

fn collect_json(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_json(&path, out)?;
        } else if path.extension().is_some_and(|x| x == "json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Reads every `*.json` report under `dir` (recursively), writes
/// `summary.csv` into `dir` and returns the rows. Rows are labelled by the
/// report's path relative to `dir`, without the extension. Fails with a
/// missing-input error when there is nothing to merge.
pub fn summarize(dir: &Path) -> Result<Vec<Row>, CliError> {
    let mut paths = Vec::new();
    collect_json(dir, &mut paths).map_err(|e| CliError::MissingInput(format!("{}: {e}", dir.display())))?;
    paths.sort();
    let mut rows = Vec::new();
    for path in &paths {
        let text = fs::read_to_string(path).map_err(minlab::Error::from)?;
        let report: Value = serde_json::from_str(&text)
            .map_err(|e| minlab::Error::Parse { line: e.line(), message: format!("{}: {e}", path.display()) })?;
        let name = path.strip_prefix(dir).unwrap_or(path).with_extension("");
        rows.extend(rows_for(&name.to_string_lossy(), &report));
    }
    if rows.is_empty() {
        return Err(CliError::MissingInput(format!("no run reports found in {}", dir.display())));
    }
    let mut out = String::from("source,metric,value,reference\n");
    for row in &rows {
        out.push_str(&format!("{},{},{},{}\n", row.source, row.metric, row.raw(), row.reference));
    }
    fs::write(dir.join("summary.csv"), out).map_err(minlab::Error::from)?;
    Ok(rows)
}
