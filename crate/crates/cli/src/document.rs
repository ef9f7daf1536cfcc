//! JSON documents for charts and verification reports. Neither contains
//! timestamps or paths, so equal inputs give byte-identical files.

use std::fs;
use std::path::Path;

use flowbox_core::flowbox::{ChartConfig, ChartParameters, FlowBoxChart};
use flowbox_core::verify::{
    ConjugacyReport, DependenceReport, FlowAxiomsReport, InteriorRadiusAudit, LipschitzScanReport, RoundTripReport,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::source::FieldSource;
use crate::{CliError, TOOL, VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolStamp {
    pub tool: String,
    pub version: String,
}

impl ToolStamp {
    pub fn current() -> Self {
        ToolStamp { tool: TOOL.to_string(), version: VERSION.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartTolerances {
    pub integration: f64,
    pub crossing: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartDocument {
    #[serde(flatten)]
    pub stamp: ToolStamp,
    pub field: FieldSource,
    pub dimension: usize,
    pub base_point: Vec<f64>,
    /// `B`, row-major.
    pub matrix_b: Vec<f64>,
    pub matrix_b_inverse: Vec<f64>,
    pub used_swap_map: bool,
    pub chi: Vec<f64>,
    pub z: Vec<f64>,
    pub r1: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub r2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_exact")]
    pub k_exact: bool,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "K_phi")]
    pub k_phi: f64,
    #[serde(rename = "K_phi_inv")]
    pub k_phi_inv: f64,
    pub tolerances: ChartTolerances,
    /// Sampled `min χ(f̃)` and `max ‖f̃‖` on `B(0, r₁)`.
    pub min_chi_f: f64,
    pub max_speed: f64,
    pub config: ChartConfig,
    pub fingerprint: String,
}

impl ChartDocument {
    pub fn new(source: &FieldSource, chart: &FlowBoxChart) -> Self {
        let record = chart.normalization();
        ChartDocument {
            stamp: ToolStamp::current(),
            field: source.clone(),
            dimension: chart.dimension(),
            base_point: record.base_point.clone(),
            matrix_b: record.linear_map.row_major().to_vec(),
            matrix_b_inverse: record.linear_map_inverse.row_major().to_vec(),
            used_swap_map: record.used_swap_map,
            chi: chart.chi().to_vec(),
            z: chart.z().to_vec(),
            r1: chart.r1(),
            t: chart.t(),
            r2: chart.r2(),
            k: chart.k(),
            k_exact: chart.k_is_exact(),
            m: chart.m(),
            k_phi: chart.k_phi(),
            k_phi_inv: chart.k_phi_inv(),
            tolerances: ChartTolerances {
                integration: chart.integration_tolerance(),
                crossing: chart.crossing_tolerance(),
            },
            min_chi_f: chart.radii().min_chi_f,
            max_speed: chart.radii().max_speed,
            config: *chart.config(),
            fingerprint: format!("{:016x}", chart.fingerprint()),
        }
    }

    /// Rebuilds the chart and insists that every stored quantity matches
    /// the rebuilt one exactly.
    pub fn to_chart(&self) -> Result<FlowBoxChart, CliError> {
        let field = self.field.build()?;
        if field.dimension() != self.dimension || self.base_point.len() != self.dimension {
            return Err(CliError::Input("chart dimension does not match its field".into()));
        }
        let mut config = self.config;
        config.integration_tolerance = self.tolerances.integration;
        config.crossing_tolerance = self.tolerances.crossing;
        let parameters = ChartParameters {
            base_point: self.base_point.clone(),
            r1: self.r1,
            lipschitz: self.k,
            lipschitz_exact: self.k_exact,
            config,
        };
        let chart = FlowBoxChart::from_parameters(&field, &parameters).map_err(|e| {
            CliError::Input(format!("chart document does not describe a valid chart: {e}"))
        })?;
        let rebuilt = ChartDocument::new(&self.field, &chart);
        let mismatch = [
            ("matrix_b", rebuilt.matrix_b != self.matrix_b),
            ("matrix_b_inverse", rebuilt.matrix_b_inverse != self.matrix_b_inverse),
            ("used_swap_map", rebuilt.used_swap_map != self.used_swap_map),
            ("chi", rebuilt.chi != self.chi),
            ("z", rebuilt.z != self.z),
            ("T", rebuilt.t != self.t),
            ("r2", rebuilt.r2 != self.r2),
            ("M", rebuilt.m != self.m),
            ("K_phi", rebuilt.k_phi != self.k_phi),
            ("K_phi_inv", rebuilt.k_phi_inv != self.k_phi_inv),
            ("fingerprint", rebuilt.fingerprint != self.fingerprint),
        ]
        .into_iter()
        .filter(|(_, bad)| *bad)
        .map(|(name, _)| name)
        .collect::<Vec<_>>();
        if !mismatch.is_empty() {
            return Err(CliError::Input(format!(
                "chart document is inconsistent with its own parameters: {}",
                mismatch.join(", ")
            )));
        }
        Ok(chart)
    }
}

/// One pass/fail line of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.to_string(), value, limit, passed: value <= limit }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySettings {
    pub seed: u64,
    pub conjugacy_samples: usize,
    pub t_max: f64,
    pub roundtrip_samples: usize,
    pub lipschitz_pairs: usize,
    pub dependence_pairs: usize,
    pub dependence_tolerance: f64,
    pub axiom_samples: usize,
    pub interior_points: usize,
    pub interior_perturbations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    #[serde(flatten)]
    pub stamp: ToolStamp,
    pub chart: ChartDocument,
    pub settings: VerifySettings,
    pub conjugacy: ConjugacyReport,
    pub roundtrip: RoundTripReport,
    pub lipschitz: LipschitzScanReport,
    pub dependence: DependenceReport,
    pub flow_axioms: FlowAxiomsReport,
    pub interior_radius: InteriorRadiusAudit,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    #[serde(flatten)]
    pub stamp: ToolStamp,
    pub chart: ChartDocument,
    pub scan: LipschitzScanReport,
    pub passed: bool,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &'static str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Document { path: path.to_path_buf(), what, source })
}
