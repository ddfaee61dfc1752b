//! Runs a bound search from a [`RunConfig`] and renders the report.

use std::path::PathBuf;

use serde_json::{json, Map, Value};
use slopebound::bounds::{self, Envelope};
use slopebound::data::{self, CovariateSelection, Dataset, InteractionSpec};
use slopebound::linalg;
use slopebound::search::{self, SearchOptions, SearchResult, DEFAULT_BRUTE_FORCE_CAP};

/// Significant digits in every printed number.
pub const SIG_DIGITS: usize = 12;

/// Relative tolerance for declaring the two searches in agreement.
pub const AGREEMENT_TOL: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Bb,
    Bf,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bb => "bb",
            Mode::Bf => "bf",
            Mode::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub y_col: String,
    pub x_col: String,
    pub covariates: CovariateSelection,
    pub interactions: Option<InteractionSpec>,
    pub mode: Mode,
    pub node_budget: Option<u64>,
    pub output_format: OutputFormat,
    pub grid_check: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct GridAudit {
    pub grid_n: usize,
    pub exact: Envelope,
    pub grid: Envelope,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub mode: Mode,
    pub n: usize,
    pub p: usize,
    pub beta_simple: f64,
    /// Result of the search named by `mode`; branch and bound for `both`.
    pub primary: SearchResult,
    pub argmin_labels: Vec<String>,
    pub argmax_labels: Vec<String>,
    /// Brute-force result when `mode` is `both`.
    pub reference: Option<SearchResult>,
    pub grid_audit: Option<GridAudit>,
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

fn agree(a: &SearchResult, b: &SearchResult) -> bool {
    let close = |u: f64, v: f64| (u - v).abs() <= AGREEMENT_TOL * u.abs().max(v.abs());
    close(a.extrema.lower, b.extrema.lower) && close(a.extrema.upper, b.extrema.upper)
}

impl Report {
    pub fn agreement(&self) -> Option<bool> {
        self.reference.as_ref().map(|r| agree(&self.primary, r))
    }

    pub fn is_partial(&self) -> bool {
        self.primary.partial
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_partial() {
            EXIT_BUDGET
        } else {
            EXIT_OK
        }
    }

    /// Ordered key/value pairs shared by both output formats.
    fn fields(&self) -> Vec<(&'static str, Value)> {
        let r = &self.primary;
        let mut out = vec![
            ("beta_simple", json!(round_sig(self.beta_simple))),
            ("lower", json!(round_sig(r.extrema.lower))),
            ("upper", json!(round_sig(r.extrema.upper))),
            ("argmin", json!(self.argmin_labels)),
            ("argmax", json!(self.argmax_labels)),
            ("nodes_popped", json!(r.nodes_popped)),
            ("nodes_pruned", json!(r.nodes_pruned)),
            ("nodes_pushed", json!(r.nodes_pushed)),
            (
                "elapsed_ms",
                json!(round_sig(r.elapsed.as_secs_f64() * 1e3)),
            ),
            ("n", json!(self.n)),
            ("p", json!(self.p)),
            ("mode", json!(self.mode.as_str())),
        ];
        if let Some(bf) = &self.reference {
            out.push(("agreement", json!(agree(r, bf))));
            out.push((
                "brute_force",
                json!({
                    "lower": round_sig(bf.extrema.lower),
                    "upper": round_sig(bf.extrema.upper),
                    "nodes_popped": bf.nodes_popped,
                    "elapsed_ms": round_sig(bf.elapsed.as_secs_f64() * 1e3),
                }),
            ));
        }
        if let Some(g) = &self.grid_audit {
            out.push((
                "grid_check",
                json!({
                    "grid_n": g.grid_n,
                    "exact_lower": round_sig(g.exact.lower),
                    "exact_upper": round_sig(g.exact.upper),
                    "grid_lower": round_sig(g.grid.lower),
                    "grid_upper": round_sig(g.grid.upper),
                    "contained": g.exact.encloses(&g.grid),
                }),
            ));
        }
        if r.partial {
            out.push(("partial", json!(true)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.fields()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect::<Map<_, _>>(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            render_text(&mut s, k, &v, 0);
        }
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            OutputFormat::Text => self.to_text(),
        }
    }
}

fn render_text(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in map {
                render_text(out, k, v, indent + 1);
            }
        }
        Value::Array(items) => {
            let labels: Vec<String> = items
                .iter()
                .map(|i| i.as_str().map_or_else(|| i.to_string(), str::to_string))
                .collect();
            let joined = if labels.is_empty() {
                "(none)".to_string()
            } else {
                labels.join(", ")
            };
            out.push_str(&format!("{pad}{key}: {joined}\n"));
        }
        Value::String(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}

/// Envelope at the root node, exact and on a grid.
fn grid_audit(d: &Dataset, grid_n: usize) -> slopebound::Result<GridAudit> {
    let inputs = bounds::bound_inputs(d.x(), d.y(), d.covariates())?;
    Ok(GridAudit {
        grid_n,
        exact: bounds::envelope(&inputs),
        grid: bounds::envelope_grid_oracle(&inputs, grid_n),
    })
}

pub fn load(config: &RunConfig) -> slopebound::Result<Dataset> {
    let d = data::load_csv_with(
        &config.data_path,
        &config.y_col,
        &config.x_col,
        &config.covariates,
    )?;
    match &config.interactions {
        Some(spec) => data::build_interactions(&d, spec),
        None => Ok(d),
    }
}

pub fn run(config: &RunConfig) -> slopebound::Result<Report> {
    let d = load(config)?;
    run_on(&d, config)
}

pub fn run_on(d: &Dataset, config: &RunConfig) -> slopebound::Result<Report> {
    if config.mode != Mode::Bb && d.p() > DEFAULT_BRUTE_FORCE_CAP {
        return Err(slopebound::Error::InvalidInput(format!(
            "brute force needs p ≤ {DEFAULT_BRUTE_FORCE_CAP}, got p = {}",
            d.p()
        )));
    }
    let beta_simple = linalg::simple_slope(d.x(), d.y())?;
    let opts = SearchOptions {
        node_budget: config.node_budget,
        ..SearchOptions::default()
    };
    let (primary, reference) = match config.mode {
        Mode::Bb => (search::branch_and_bound_with(d, &opts)?, None),
        Mode::Bf => (search::brute_force(d)?, None),
        Mode::Both => (
            search::branch_and_bound_with(d, &opts)?,
            Some(search::brute_force(d)?),
        ),
    };
    let grid_audit = config.grid_check.map(|g| grid_audit(d, g)).transpose()?;
    Ok(Report {
        mode: config.mode,
        n: d.n(),
        p: d.p(),
        beta_simple,
        argmin_labels: d.labels_of(&primary.extrema.argmin),
        argmax_labels: d.labels_of(&primary.extrema.argmax),
        primary,
        reference,
        grid_audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1234567890123456), 0.123456789012);
        assert_eq!(round_sig(-49.6000000000004), -49.6);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1e-20 / 3.0), 3.33333333333e-21);
    }

    #[test]
    fn text_lists() {
        let mut s = String::new();
        render_text(&mut s, "argmin", &json!([]), 0);
        render_text(&mut s, "argmax", &json!(["a", "b×c"]), 0);
        assert_eq!(s, "argmin: (none)\nargmax: a, b×c\n");
    }
}
