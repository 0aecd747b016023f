//! Scenario-driven sweeps and their CSV/SVG output.

mod run;
mod scenario;
mod svg;
mod table;

pub use run::{
    overlay_reference, report_regime, report_tissue, run_scenario, run_sweep_distance, run_sweep_freq,
    run_sweep_offset, TissueModel,
};
pub use scenario::{
    Analysis, Axis, BodySection, CoilSpec, CoilsSection, LinkSection, OutputFormat, OutputSection, RangeSpec,
    Scenario, Spacing, SweepSection,
};
pub use svg::render_svg;
pub use table::{parse_csv, read_csv, write_csv, CSV_TEXT_UNIT};

use crate::{Error, Result};

pub const TOOL_VERSION: &str = concat!("mqs-hbc ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, unit: impl Into<String>, data: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            data: ColumnData::Numeric(data),
        }
    }

    pub fn text(name: impl Into<String>, data: Vec<String>) -> Self {
        Self {
            name: name.into(),
            unit: CSV_TEXT_UNIT.into(),
            data: ColumnData::Text(data),
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Text(_) => None,
        }
    }

    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit)
    }

    /// Reference-comparison columns may hold NaN where the reference has no data.
    fn allows_nan(&self) -> bool {
        self.name.starts_with("reference")
    }
}

/// `#`-comment block at the top of every CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub tool: String,
    pub scenario: String,
    pub config_sha256: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Column 0 against every column listed in `PlotSpec::series`.
    Lines,
    /// Long-format grid: columns 0 and 1 are the axes, `series[0]` the value.
    Heatmap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<usize>,
}

/// Externally supplied curve drawn next to the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSeries {
    pub label: String,
    pub x_unit: String,
    pub y_unit: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<Column>,
    pub provenance: Provenance,
    pub plot: PlotSpec,
    pub references: Vec<ReferenceSeries>,
}

impl SweepResult {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn values(&self, name: &str) -> Result<&[f64]> {
        self.column(name)
            .and_then(Column::values)
            .ok_or_else(|| Error::InvalidInput(format!("no numeric column `{name}`")))
    }

    pub fn abscissa(&self) -> &Column {
        &self.columns[0]
    }

    /// Equal lengths; numeric cells finite except `-inf` in dB columns
    /// (exact zeros), `inf` in length columns, and NaN in reference columns.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.rows();
        if n == 0 {
            return Err(Error::Numeric("empty sweep result".into()));
        }
        for c in &self.columns {
            if c.data.len() != n {
                return Err(Error::Numeric(format!(
                    "column `{}` has {} rows, expected {n}",
                    c.name,
                    c.data.len()
                )));
            }
            let Some(values) = c.values() else { continue };
            for (i, &v) in values.iter().enumerate() {
                let ok = v.is_finite()
                    || (v == f64::NEG_INFINITY && c.unit == "dB")
                    || (v == f64::INFINITY && c.unit == "m")
                    || (v.is_nan() && c.allows_nan());
                if !ok {
                    return Err(Error::Numeric(format!("column `{}` row {i} holds {v}", c.name)));
                }
            }
        }
        for &s in &self.plot.series {
            if s >= self.columns.len() {
                return Err(Error::Numeric(format!("plot series {s} out of range")));
            }
        }
        Ok(())
    }
}

/// `20 log10 |x|`; exact zeros map to `-inf`.
pub fn to_db(magnitude: f64) -> f64 {
    20.0 * magnitude.log10()
}
