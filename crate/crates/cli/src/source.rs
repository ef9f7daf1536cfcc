//! Field sources given on the command line: `builtin:<name>` or
//! `dsl:<dimension>:<expression>`.

use flowbox_core::builtin;
use flowbox_core::dsl::parse_field;
use flowbox_core::VectorField;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_DOMAIN_RADIUS: f64 = builtin::DOMAIN_RADIUS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSource {
    Builtin { name: String },
    Dsl { dimension: usize, source: String, domain_radius: f64 },
}

impl FieldSource {
    /// `domain_radius` applies to DSL fields; builtins carry their own.
    pub fn parse(spec: &str, domain_radius: f64) -> Result<Self, CliError> {
        if let Some(name) = spec.strip_prefix("builtin:") {
            if builtin::by_name(name).is_none() {
                return Err(CliError::Input(format!(
                    "unknown builtin field {name:?}; available: {}",
                    builtin::NAMES.join(", ")
                )));
            }
            return Ok(FieldSource::Builtin { name: name.to_string() });
        }
        if let Some(rest) = spec.strip_prefix("dsl:") {
            let (dim, source) = rest
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("expected dsl:<dimension>:<expression>, got {spec:?}")))?;
            let dimension: usize = dim
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("invalid dimension {dim:?} in {spec:?}")))?;
            if !(domain_radius > 0.0) || !domain_radius.is_finite() {
                return Err(CliError::Input(format!("domain radius must be positive, got {domain_radius}")));
            }
            let source = FieldSource::Dsl { dimension, source: source.to_string(), domain_radius };
            source.build()?;
            return Ok(source);
        }
        Err(CliError::Input(format!("field source must start with builtin: or dsl:, got {spec:?}")))
    }

    pub fn build(&self) -> Result<VectorField, CliError> {
        match self {
            FieldSource::Builtin { name } => {
                builtin::by_name(name).ok_or_else(|| CliError::Input(format!("unknown builtin field {name:?}")))
            }
            FieldSource::Dsl { dimension, source, domain_radius } => {
                let expr = parse_field(source, *dimension)
                    .map_err(|error| CliError::Parse { source_text: source.clone(), error })?;
                Ok(expr.into_field(self.to_string(), *domain_radius))
            }
        }
    }
}

impl std::fmt::Display for FieldSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSource::Builtin { name } => write!(f, "builtin:{name}"),
            FieldSource::Dsl { dimension, source, .. } => write!(f, "dsl:{dimension}:{source}"),
        }
    }
}

/// Parses comma-separated decimals.
pub fn parse_point(text: &str) -> Result<Vec<f64>, CliError> {
    let point: Vec<f64> = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("invalid coordinate {s:?} in point {text:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(point)
}

pub fn check_dimension(field: &VectorField, point: &[f64]) -> Result<(), CliError> {
    if point.len() != field.dimension() {
        return Err(CliError::Input(format!(
            "point has {} coordinates but the field is {}-dimensional",
            point.len(),
            field.dimension()
        )));
    }
    Ok(())
}
