//! Scenario files: TOML with the metric and vector field as expression strings.
//!
//! ```toml
//! name = "perturbed-t2"
//! n = 2
//! order = 6
//! mode = "binary64"
//! metric = "g11 = 1 + cos(x1)/10; g22 = 1 + cos(x1)/10"
//! vector_field = "X2 = 1"
//! radius = 0.05
//! samples = 100
//!
//! [tolerances]
//! ricci_residual = 1e-8
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::error::{ConfigError, ParseError};
use crate::geometry::{
    parse_assignments, parse_metric, parse_vector_field, MetricJet, VectorFieldJet,
};
use crate::jet::{Coeff, Mode, MAX_VARS};
use crate::verify::{SampleSpec, Tolerances, VerifyOptions, DEFAULT_SLOPE_RADII};

/// Environment variable naming the default root for output directories.
pub const OUTPUT_ROOT_ENV: &str = "CYTUBE_OUTPUT_ROOT";
pub const MAX_ORDER: usize = 16;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Spanned<String>,
    n: Spanned<usize>,
    #[serde(default)]
    order: Option<Spanned<usize>>,
    #[serde(default)]
    mode: Option<Spanned<String>>,
    metric: Spanned<String>,
    vector_field: Spanned<String>,
    #[serde(default)]
    radius: Option<Spanned<f64>>,
    #[serde(default)]
    samples: Option<Spanned<usize>>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    slope_radii: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    output: Option<String>,
    #[serde(default)]
    tolerances: BTreeMap<Spanned<String>, Spanned<f64>>,
}

/// Where an expression string sits in the scenario file.
#[derive(Clone, Debug, PartialEq)]
struct ExprSource {
    text: String,
    /// Byte offset in the file of the first character of the string's contents.
    start: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub n: usize,
    pub order: usize,
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub samples: SampleSpec,
    pub slope_radii: Vec<f64>,
    pub output: Option<PathBuf>,
    metric: ExprSource,
    vector_field: ExprSource,
    origin: String,
    source: String,
}

/// Command-line overrides of scenario keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub order: Option<usize>,
    pub mode: Option<Mode>,
    pub tolerances: Vec<(String, f64)>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
}

fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Offset of the contents of a string value whose span starts at `span_start`.
/// Offsets inside the string are exact unless it contains escape sequences.
fn contents_start(source: &str, span_start: usize) -> usize {
    let rest = &source[span_start..];
    if rest.starts_with("\"\"\"") || rest.starts_with("'''") {
        let after = span_start + 3;
        if source[after..].starts_with("\r\n") {
            after + 2
        } else if source[after..].starts_with('\n') {
            after + 1
        } else {
            after
        }
    } else {
        span_start + 1
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let source = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: origin.clone(),
            line: 0,
            column: 0,
            message: format!("cannot read scenario: {e}"),
        })?;
        Self::parse(&source, &origin)
    }

    pub fn parse(source: &str, origin: &str) -> Result<Self, ConfigError> {
        let at = |offset: usize, message: String| {
            let (line, column) = line_col(source, offset);
            ConfigError {
                origin: origin.to_string(),
                line,
                column,
                message,
            }
        };
        let raw: RawScenario = toml::from_str(source).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            at(offset, e.message().to_string())
        })?;

        let name = raw.name.get_ref().clone();
        if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '/' || c == '\\') {
            return Err(at(
                raw.name.span().start,
                "name must be non-empty, without spaces or slashes".into(),
            ));
        }
        let n = *raw.n.get_ref();
        if n == 0 || 2 * n > MAX_VARS {
            return Err(at(
                raw.n.span().start,
                format!("n must be between 1 and {}", MAX_VARS / 2),
            ));
        }
        let mode = match &raw.mode {
            Some(m) => m
                .get_ref()
                .parse::<Mode>()
                .map_err(|e| at(m.span().start, e))?,
            None => Mode::Binary64,
        };
        let mut tolerances = Tolerances::for_mode(mode);
        for (k, v) in &raw.tolerances {
            if *v.get_ref() < 0.0 || !v.get_ref().is_finite() {
                return Err(at(
                    v.span().start,
                    "tolerances must be finite and non-negative".into(),
                ));
            }
            tolerances
                .set(k.get_ref(), *v.get_ref())
                .map_err(|e| at(k.span().start, e))?;
        }
        let mut samples = SampleSpec::default();
        if let Some(s) = raw.seed {
            samples.seed = s;
        }
        let mut cfg = ScenarioConfig {
            name,
            n,
            order: raw.order.as_ref().map_or(6, |o| *o.get_ref()),
            mode,
            tolerances,
            samples,
            slope_radii: DEFAULT_SLOPE_RADII.to_vec(),
            output: raw.output.map(PathBuf::from),
            metric: ExprSource {
                text: raw.metric.get_ref().clone(),
                start: Some(contents_start(source, raw.metric.span().start)),
            },
            vector_field: ExprSource {
                text: raw.vector_field.get_ref().clone(),
                start: Some(contents_start(source, raw.vector_field.span().start)),
            },
            origin: origin.to_string(),
            source: source.to_string(),
        };
        if let Some(r) = &raw.radius {
            cfg.samples.radius = *r.get_ref();
        }
        if let Some(s) = &raw.samples {
            cfg.samples.count = *s.get_ref();
        }
        if let Some(r) = &raw.slope_radii {
            if r.get_ref().len() < 2 || r.get_ref().iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(at(
                    r.span().start,
                    "slope_radii needs at least two positive radii".into(),
                ));
            }
            cfg.slope_radii = r.get_ref().clone();
        }
        let span_of =
            |s: &Option<Spanned<_>>| s.as_ref().map_or(0, |v: &Spanned<usize>| v.span().start);
        if let Err(message) = cfg.check_ranges() {
            let offset = match message.split_whitespace().next() {
                Some("order") => span_of(&raw.order),
                Some("samples") => span_of(&raw.samples),
                Some("radius") => raw.radius.as_ref().map_or(0, |r| r.span().start),
                _ => 0,
            };
            return Err(at(offset, message));
        }
        cfg.check_expressions()?;
        Ok(cfg)
    }

    fn check_ranges(&self) -> Result<(), String> {
        if self.order < 2 || self.order > MAX_ORDER {
            return Err(format!("order must be between 2 and {MAX_ORDER}"));
        }
        if !(self.samples.radius > 0.0 && self.samples.radius.is_finite()) {
            return Err("radius must be positive".into());
        }
        if self.samples.count == 0 {
            return Err("samples must be at least 1".into());
        }
        Ok(())
    }

    /// Syntax of both expression strings.
    fn check_expressions(&self) -> Result<(), ConfigError> {
        parse_assignments(&self.metric.text, self.n)
            .map_err(|e| self.expr_error(&self.metric, "metric", e))?;
        parse_assignments(&self.vector_field.text, self.n)
            .map_err(|e| self.expr_error(&self.vector_field, "vector_field", e))?;
        Ok(())
    }

    fn expr_error(&self, src: &ExprSource, key: &str, e: ParseError) -> ConfigError {
        let (line, column) = match (src.start, e.offset()) {
            (Some(start), Some(off)) => line_col(&self.source, start + off),
            (Some(start), None) => line_col(&self.source, start),
            _ => (0, 0),
        };
        ConfigError {
            origin: self.origin.clone(),
            line,
            column,
            message: format!("{key}: {e}"),
        }
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        let cli = |message: String| ConfigError {
            origin: "command line".into(),
            line: 0,
            column: 0,
            message,
        };
        if let Some(mode) = o.mode {
            if mode != self.mode {
                // Keep explicit tolerance entries, reset the mode defaults.
                let old = std::mem::replace(&mut self.tolerances, Tolerances::for_mode(mode));
                let defaults = Tolerances::for_mode(self.mode);
                for (k, v) in old.iter() {
                    if v != defaults.get(k) {
                        self.tolerances.set(k, v).map_err(cli)?;
                    }
                }
                self.mode = mode;
            }
        }
        if let Some(k) = o.order {
            self.order = k;
        }
        if let Some(r) = o.radius {
            self.samples.radius = r;
        }
        if let Some(s) = o.samples {
            self.samples.count = s;
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
        for (name, v) in &o.tolerances {
            if *v < 0.0 || !v.is_finite() {
                return Err(cli(format!(
                    "tolerance {name} must be finite and non-negative"
                )));
            }
            self.tolerances.set(name, *v).map_err(cli)?;
        }
        self.check_ranges().map_err(cli)
    }

    pub fn metric_text(&self) -> &str {
        &self.metric.text
    }

    pub fn vector_field_text(&self) -> &str {
        &self.vector_field.text
    }

    pub fn metric_jet<C: Coeff>(&self) -> Result<MetricJet<C>, ConfigError> {
        parse_metric(&self.metric.text, self.n, self.order)
            .map_err(|e| self.expr_error(&self.metric, "metric", e))
    }

    pub fn vector_field_jet<C: Coeff>(&self) -> Result<VectorFieldJet<C>, ConfigError> {
        parse_vector_field(&self.vector_field.text, self.n, self.order)
            .map_err(|e| self.expr_error(&self.vector_field, "vector_field", e))
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tolerances: self.tolerances.clone(),
            samples: self.samples.clone(),
            slope_radii: self.slope_radii.clone(),
        }
    }

    /// Output directory: the configured one, else `$CYTUBE_OUTPUT_ROOT/<name>`,
    /// else `cytube-out/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV)
            .map_or_else(|| PathBuf::from("cytube-out"), PathBuf::from);
        root.join(&self.name)
    }
}
