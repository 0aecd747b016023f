//! Scenario runners producing [`SweepResult`] tables.

use super::scenario::{Analysis, Axis, Scenario};
use super::table::read_csv;
use super::{to_db, Column, PlotKind, PlotSpec, Provenance, ReferenceSeries, SweepResult, TOOL_VERSION};
use crate::coil::{mutual_neumann, DEFAULT_SEGMENTS};
use crate::eddy::CylinderModel;
use crate::link::{specialize, LinkModel, TerminationCase};
use crate::tissue::{
    ColeColeModel, InterpolatedPermittivityModel, InterpolationDomain, PropagationProperties, RegimeThresholds,
    TissueDb,
};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::Path;

/// Anchor frequencies of the interpolated permittivity mode.
const INTERP_LOW_HZ: f64 = 10.0;
const INTERP_HIGH_HZ: f64 = 10e6;

/// Permittivity source for tissue reports.
#[derive(Debug, Clone, PartialEq)]
pub enum TissueModel {
    ColeCole(ColeColeModel),
    /// Straight-line `eps'` between the model's values at 10 Hz and 10 MHz,
    /// with the Cole-Cole model outside that span.
    Interpolated {
        interp: InterpolatedPermittivityModel,
        outside: ColeColeModel,
    },
}

impl TissueModel {
    pub fn new(model: &ColeColeModel, interpolated: bool) -> Result<Self> {
        if !interpolated {
            return Ok(TissueModel::ColeCole(model.clone()));
        }
        let interp = InterpolatedPermittivityModel::from_cole_cole(
            model,
            INTERP_LOW_HZ,
            INTERP_HIGH_HZ,
            InterpolationDomain::LinearInFrequency,
        )?;
        Ok(TissueModel::Interpolated {
            interp,
            outside: model.clone(),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            TissueModel::ColeCole(m) => m.name(),
            TissueModel::Interpolated { outside, .. } => outside.name(),
        }
    }

    pub fn evaluate(&self, frequency: f64) -> Result<PropagationProperties> {
        match self {
            TissueModel::ColeCole(m) => m.evaluate(frequency),
            TissueModel::Interpolated { interp, .. } if interp.contains(frequency) => interp.evaluate(frequency),
            TissueModel::Interpolated { outside, .. } => outside.evaluate(frequency),
        }
    }
}

fn provenance(scenario: &Scenario) -> Result<Provenance> {
    let mut notes = Vec::new();
    if !scenario.description.is_empty() {
        notes.push(scenario.description.clone());
    }
    Ok(Provenance {
        tool: TOOL_VERSION.into(),
        scenario: scenario.name.clone(),
        config_sha256: scenario.config_hash()?,
        notes,
    })
}

fn lines(title: &str, x_log: bool, y_log: bool, series: Vec<usize>) -> PlotSpec {
    PlotSpec {
        kind: PlotKind::Lines,
        title: title.into(),
        x_log,
        y_log,
        series,
    }
}

/// Runs whatever the scenario's `analysis` and `sweep.axis` call for.
pub fn run_scenario(scenario: &Scenario, db: &TissueDb) -> Result<SweepResult> {
    match (scenario.analysis, scenario.sweep.axis) {
        (Analysis::Link, Axis::Frequency) => run_sweep_freq(scenario, db),
        (Analysis::Link, Axis::Distance) => run_sweep_distance(scenario, db),
        (Analysis::Link, Axis::Offset) => run_sweep_offset(scenario, db),
        (Analysis::Tissue | Analysis::Regime, _) => {
            scenario.validate(db)?;
            let model = TissueModel::new(db.get(&scenario.body.tissue)?, scenario.body.interpolated)?;
            let grid = scenario.sweep.range().grid()?;
            let mut r = if scenario.analysis == Analysis::Tissue {
                report_tissue(&model, &grid)?
            } else {
                report_regime(&model, scenario.body.dimension, &RegimeThresholds::default(), &grid)?
            };
            let notes = std::mem::take(&mut r.provenance.notes);
            r.provenance = provenance(scenario)?;
            r.provenance.notes.extend(notes);
            r.plot.title = scenario.name.clone();
            Ok(r)
        }
    }
}

/// Specialized links for every configured termination case.
fn case_links(scenario: &Scenario, mutual: f64) -> Result<Vec<(TerminationCase, LinkModel)>> {
    let base = scenario.link_model(mutual)?;
    let params = scenario.termination_params()?;
    scenario
        .cases()?
        .into_iter()
        .map(|c| Ok((c, specialize(&base, c, &params)?)))
        .collect()
}

/// Link response over frequency for each termination case.
///
/// `M` is computed once from the geometry unless overridden. With
/// `body.enabled` the gain magnitude is multiplied by the on-axis eddy
/// transmission of the body cylinder, a first-order composition.
pub fn run_sweep_freq(scenario: &Scenario, db: &TissueDb) -> Result<SweepResult> {
    scenario.validate(db)?;
    if scenario.sweep.axis != Axis::Frequency {
        return Err(Error::Scenario("sweep-freq needs sweep.axis = \"frequency\"".into()));
    }
    let freqs = scenario.sweep.range().grid()?;
    let mutual = match scenario.coils.mutual {
        Some(m) => m,
        None => scenario.pair_at(scenario.coils.separation, scenario.coils.lateral_offset)?.mutual_inductance()?,
    };
    let links = case_links(scenario, mutual)?;
    let mut prov = provenance(scenario)?;

    let body = if scenario.body.enabled {
        let cyl = CylinderModel::new(scenario.body.radius, db.get(&scenario.body.tissue)?.clone())?;
        let t: Vec<f64> = freqs
            .par_iter()
            .map(|&f| Ok(cyl.solve(f)?.transmission()))
            .collect::<Result<_>>()?;
        prov.notes.push(format!(
            "gain includes on-axis eddy transmission of a {} m {} cylinder (first-order composition)",
            scenario.body.radius, scenario.body.tissue
        ));
        Some(t)
    } else {
        None
    };

    let mut columns = vec![Column::numeric("frequency", "Hz", freqs.clone())];
    let mut series = Vec::new();
    for (case, link) in &links {
        let resp = link.frequency_response(&freqs)?;
        let factor = |i: usize| body.as_ref().map_or(1.0, |t| t[i]);
        let gain_db = resp.gain.iter().enumerate().map(|(i, g)| to_db(g.norm() * factor(i))).collect();
        series.push(columns.len());
        columns.push(Column::numeric(format!("gain {case}"), "dB", gain_db));
        columns.push(Column::numeric(format!("phase {case}"), "deg", phases(&resp.gain)));
        if let Some(s21) = &resp.s21 {
            let s21_db = s21.iter().enumerate().map(|(i, s)| to_db(s.norm() * factor(i))).collect();
            columns.push(Column::numeric(format!("s21 {case}"), "dB", s21_db));
        }
    }
    if let Some(t) = body {
        columns.push(Column::numeric("eddy transmission", "1", t));
    }
    finish(columns, prov, lines(&scenario.name, true, false, series))
}

fn phases(gain: &[Complex64]) -> Vec<f64> {
    gain.iter().map(|g| g.arg().to_degrees()).collect()
}

fn finish(columns: Vec<Column>, provenance: Provenance, plot: PlotSpec) -> Result<SweepResult> {
    let r = SweepResult {
        columns,
        provenance,
        plot,
        references: vec![],
    };
    r.check_invariants()?;
    Ok(r)
}

/// Gain at `sweep.frequency` as the receiver moves along the axis.
/// `M` is re-evaluated at every distance.
pub fn run_sweep_distance(scenario: &Scenario, db: &TissueDb) -> Result<SweepResult> {
    scenario.validate(db)?;
    if scenario.sweep.axis != Axis::Distance {
        return Err(Error::Scenario("sweep-distance needs sweep.axis = \"distance\"".into()));
    }
    let distances = scenario.sweep.range().grid()?;
    let offset = scenario.coils.lateral_offset;
    let mutuals: Vec<f64> = distances
        .par_iter()
        .map(|&d| scenario.pair_at(d, offset)?.mutual_inductance())
        .collect::<Result<_>>()?;
    let mut columns = vec![
        Column::numeric("distance", "m", distances),
        Column::numeric("mutual inductance", "H", mutuals.clone()),
    ];
    let series = gain_columns(scenario, &mutuals, &mut columns)?;
    let prov = provenance(scenario)?;
    finish(columns, prov, lines(&scenario.name, true, false, series))
}

/// Appends gain and phase columns per case for a list of mutual inductances
/// evaluated at `sweep.frequency`; returns the gain column indices.
fn gain_columns(scenario: &Scenario, mutuals: &[f64], columns: &mut Vec<Column>) -> Result<Vec<usize>> {
    let f = scenario.sweep.frequency;
    let cases = case_links(scenario, 0.0)?;
    let mut series = Vec::new();
    for (case, link) in cases {
        let gains: Vec<Complex64> = mutuals
            .par_iter()
            .map(|&m| link.with_mutual(m)?.voltage_gain(f))
            .collect::<Result<_>>()?;
        series.push(columns.len());
        columns.push(Column::numeric(format!("gain {case}"), "dB", gains.iter().map(|g| to_db(g.norm())).collect()));
        columns.push(Column::numeric(format!("phase {case}"), "deg", phases(&gains)));
    }
    Ok(series)
}

/// Long-format distance-by-offset grid at `sweep.frequency`, every cell by
/// Neumann quadrature.
pub fn run_sweep_offset(scenario: &Scenario, db: &TissueDb) -> Result<SweepResult> {
    scenario.validate(db)?;
    if scenario.sweep.axis != Axis::Offset {
        return Err(Error::Scenario("sweep-offset needs sweep.axis = \"offset\"".into()));
    }
    let offsets = scenario.sweep.range().grid()?;
    let distances = match &scenario.sweep.distance {
        Some(r) => r.grid()?,
        None => vec![scenario.coils.separation],
    };
    let cells: Vec<(f64, f64)> = distances
        .iter()
        .flat_map(|&d| offsets.iter().map(move |&o| (d, o)))
        .collect();
    let mutuals: Vec<f64> = cells
        .par_iter()
        .map(|&(d, o)| mutual_neumann(&scenario.pair_at(d, o)?, DEFAULT_SEGMENTS))
        .collect::<Result<_>>()?;
    let mut columns = vec![
        Column::numeric("distance", "m", cells.iter().map(|c| c.0).collect()),
        Column::numeric("offset", "m", cells.iter().map(|c| c.1).collect()),
        Column::numeric("mutual inductance", "H", mutuals.clone()),
    ];
    let series = gain_columns(scenario, &mutuals, &mut columns)?;
    let prov = provenance(scenario)?;
    let plot = PlotSpec {
        kind: PlotKind::Heatmap,
        title: scenario.name.clone(),
        x_log: false,
        y_log: false,
        series: vec![series[0]],
    };
    finish(columns, prov, plot)
}

fn tissue_columns(model: &TissueModel, grid: &[f64]) -> Result<(Vec<Column>, Vec<PropagationProperties>)> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("frequency grid must be non-empty and increasing".into()));
    }
    let props: Vec<PropagationProperties> = grid.iter().map(|&f| model.evaluate(f)).collect::<Result<_>>()?;
    let col = |name: &str, unit: &str, get: fn(&PropagationProperties) -> f64| {
        Column::numeric(name, unit, props.iter().map(get).collect())
    };
    let columns = vec![
        Column::numeric("frequency", "Hz", grid.to_vec()),
        col("eps_real", "1", |p| p.eps_real),
        col("sigma_eff", "S/m", |p| p.sigma_eff),
        col("wavelength lossless", "m", |p| p.wavelength_lossless),
        col("wavelength lossy", "m", |p| p.wavelength_lossy),
        col("skin depth", "m", |p| p.skin_depth),
    ];
    Ok((columns, props))
}

fn tissue_provenance(model: &TissueModel) -> Provenance {
    let mut notes = Vec::new();
    if let TissueModel::Interpolated { .. } = model {
        notes.push(format!(
            "eps' linearly interpolated in frequency between {INTERP_LOW_HZ} Hz and {INTERP_HIGH_HZ} Hz"
        ));
    }
    Provenance {
        tool: TOOL_VERSION.into(),
        scenario: model.name().into(),
        config_sha256: String::new(),
        notes,
    }
}

/// Permittivity, conductivity, wavelengths and skin depth over `grid`.
pub fn report_tissue(model: &TissueModel, grid: &[f64]) -> Result<SweepResult> {
    let (columns, _) = tissue_columns(model, grid)?;
    finish(columns, tissue_provenance(model), lines(model.name(), true, true, vec![3, 4, 5]))
}

/// [`report_tissue`] plus a regime label for a body of the given size.
pub fn report_regime(
    model: &TissueModel,
    body_dimension: f64,
    thresholds: &RegimeThresholds,
    grid: &[f64],
) -> Result<SweepResult> {
    let (mut columns, props) = tissue_columns(model, grid)?;
    let labels = props
        .iter()
        .map(|p| Ok(thresholds.classify(p, body_dimension)?.to_string()))
        .collect::<Result<_>>()?;
    columns.push(Column::text("regime", labels));
    let mut prov = tissue_provenance(model);
    prov.notes.push(format!("body dimension {body_dimension} m"));
    finish(columns, prov, lines(model.name(), true, true, vec![3]))
}

/// Attaches a two-column reference curve (`x [unit],y [unit]`).
///
/// Adds the reference interpolated onto the sweep abscissa and its
/// difference from the first plotted series; rows outside the reference
/// span hold NaN.
pub fn overlay_reference(result: &SweepResult, path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    if result.plot.kind != PlotKind::Lines {
        return Err(Error::InvalidInput("references can only be overlaid on line plots".into()));
    }
    let reference = read_csv(path)?;
    let [x_col, y_col] = reference.columns.as_slice() else {
        return Err(Error::Parse {
            line: 1,
            message: format!("reference must have exactly two columns, found {}", reference.columns.len()),
        });
    };
    let (Some(x), Some(y)) = (x_col.values(), y_col.values()) else {
        return Err(Error::Parse { line: 1, message: "reference columns must be numeric".into() });
    };
    if x.is_empty() {
        return Err(Error::Parse { line: 2, message: "reference has no data rows".into() });
    }
    if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Parse {
            line: i + 3,
            message: "reference abscissa must be strictly increasing".into(),
        });
    }
    let mut out = result.clone();
    let abscissa = result.abscissa();
    if x_col.unit != abscissa.unit {
        let msg = format!(
            "reference abscissa unit `{}` differs from sweep unit `{}`",
            x_col.unit, abscissa.unit
        );
        log::warn!("{msg}");
        out.provenance.notes.push(msg);
    }
    let primary = result
        .plot
        .series
        .first()
        .and_then(|&i| result.columns.get(i))
        .ok_or_else(|| Error::InvalidInput("sweep has no plotted series".into()))?;
    let primary_values = primary.values().unwrap_or(&[]);
    let xs = abscissa.values().unwrap_or(&[]);
    let interpolated: Vec<f64> = xs.iter().map(|&t| interpolate(x, y, t)).collect();
    let diff = primary_values.iter().zip(&interpolated).map(|(a, b)| a - b).collect();
    out.columns.push(Column::numeric("reference", y_col.unit.clone(), interpolated));
    out.columns.push(Column::numeric("reference_diff", primary.unit.clone(), diff));
    out.references.push(ReferenceSeries {
        label: path.file_stem().map_or_else(|| "reference".into(), |s| s.to_string_lossy().into_owned()),
        x_unit: x_col.unit.clone(),
        y_unit: y_col.unit.clone(),
        x: x.to_vec(),
        y: y.to_vec(),
    });
    out.provenance.notes.push(format!("reference overlay: {}", path.display()));
    out.check_invariants()?;
    Ok(out)
}

/// Piecewise-linear interpolation; exact at nodes, NaN outside the span.
fn interpolate(x: &[f64], y: &[f64], t: f64) -> f64 {
    match x.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => y[i],
        Err(0) => f64::NAN,
        Err(i) if i == x.len() => f64::NAN,
        Err(i) => {
            let w = (t - x[i - 1]) / (x[i] - x[i - 1]);
            y[i - 1] + w * (y[i] - y[i - 1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_space;
    use crate::sweep::{write_csv, Spacing};
    use crate::tissue::default_tissue_db;

    fn vna() -> Scenario {
        let mut s = Scenario::anchored("vna");
        s.coils.inductance = Some(260e-9);
        s.sweep.points = 120;
        s
    }

    fn csv_text(r: &SweepResult) -> String {
        let mut buf = Vec::new();
        write_csv(r, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn frequency_sweep_columns() {
        let r = run_sweep_freq(&vna(), default_tissue_db()).unwrap();
        let names: Vec<&str> = r.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["frequency", "gain vna_50", "phase vna_50", "s21 vna_50"]);
        assert_eq!(r.rows(), 120);
        let g = r.values("gain vna_50").unwrap();
        let s = r.values("s21 vna_50").unwrap();
        for (a, b) in g.iter().zip(s) {
            assert!((b - a - 20.0 * 2f64.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn db_matches_linear_gain() {
        let s = vna();
        let r = run_sweep_freq(&s, default_tissue_db()).unwrap();
        let m = s.pair_at(0.1, 0.0).unwrap().mutual_inductance().unwrap();
        let link = s.link_model(m).unwrap();
        for (f, db) in r.values("frequency").unwrap().iter().zip(r.values("gain vna_50").unwrap()) {
            let lin = link.voltage_gain(*f).unwrap().norm();
            assert!((db - 20.0 * lin.log10()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_mutual_gives_negative_infinity() {
        let mut s = vna();
        s.coils.mutual = Some(0.0);
        let r = run_sweep_freq(&s, default_tissue_db()).unwrap();
        assert!(r.values("gain vna_50").unwrap().iter().all(|&v| v == f64::NEG_INFINITY));
        assert!(csv_text(&r).contains(",-inf,"));
    }

    #[test]
    fn body_factor_lowers_gain_at_high_frequency() {
        let mut s = vna();
        s.body.enabled = true;
        let with = run_sweep_freq(&s, default_tissue_db()).unwrap();
        let without = run_sweep_freq(&vna(), default_tissue_db()).unwrap();
        let a = with.values("gain vna_50").unwrap();
        let b = without.values("gain vna_50").unwrap();
        assert!(a.iter().zip(b).all(|(x, y)| x <= y));
        assert!(a[119] < b[119] - 1.0);
        assert!(with.provenance.notes.iter().any(|n| n.contains("first-order")));
    }

    #[test]
    fn distance_and_offset_agree_at_zero_offset() {
        let mut d = vna();
        d.sweep.axis = Axis::Distance;
        d.sweep.min = 0.1;
        d.sweep.max = 0.5;
        d.sweep.points = 5;
        d.sweep.spacing = Spacing::Linear;
        let dist = run_sweep_distance(&d, default_tissue_db()).unwrap();

        let mut o = d.clone();
        o.sweep.axis = Axis::Offset;
        o.sweep.distance = Some(d.sweep.range());
        o.sweep.min = 0.0;
        o.sweep.max = 0.1;
        o.sweep.points = 3;
        let grid = run_sweep_offset(&o, default_tissue_db()).unwrap();
        assert_eq!(grid.rows(), 15);
        let g = grid.values("gain vna_50").unwrap();
        let off = grid.values("offset").unwrap();
        let zero: Vec<f64> = g.iter().zip(off).filter(|(_, &o)| o == 0.0).map(|(v, _)| *v).collect();
        for (a, b) in zero.iter().zip(dist.values("gain vna_50").unwrap()) {
            assert!((a - b).abs() < 0.1, "{a} vs {b}");
        }
        // goldens.py: Neumann at d = 0.1, offsets 0.05 and 0.1
        let m = grid.values("mutual inductance").unwrap();
        assert!((m[1] / 4.930646738880e-09 - 1.0).abs() < 1e-9);
        assert!((m[2] / 1.603236129326e-09 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn wrong_axis_rejected() {
        assert!(run_sweep_distance(&vna(), default_tissue_db()).is_err());
        assert!(run_sweep_offset(&vna(), default_tissue_db()).is_err());
    }

    #[test]
    fn deterministic_output() {
        let a = csv_text(&run_sweep_freq(&vna(), default_tissue_db()).unwrap());
        let b = csv_text(&run_sweep_freq(&vna(), default_tissue_db()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn tissue_report_rows() {
        let model = TissueModel::new(default_tissue_db().get("muscle").unwrap(), false).unwrap();
        let r = report_tissue(&model, &[447e6]).unwrap();
        let lambda = r.values("wavelength lossless").unwrap()[0];
        assert!((lambda - 0.089).abs() <= 0.0089);
    }

    #[test]
    fn lossless_tissue_has_infinite_skin_depth() {
        let model = TissueModel::ColeCole(ColeColeModel::dispersionless("water-ish", 80.0).unwrap());
        let r = report_tissue(&model, &log_space(1e3, 1e9, 10).unwrap()).unwrap();
        assert!(r.values("skin depth").unwrap().iter().all(|v| v.is_infinite()));
        assert!(csv_text(&r).lines().nth(4).unwrap().ends_with(",inf"));
    }

    #[test]
    fn interpolated_mode_opens_em_band() {
        let muscle = default_tissue_db().get("muscle").unwrap();
        let grid = log_space(1e5, 1e7, 81).unwrap();
        let th = RegimeThresholds::default();
        let label = |interp| {
            let r = report_regime(&TissueModel::new(muscle, interp).unwrap(), 0.08, &th, &grid).unwrap();
            match &r.column("regime").unwrap().data {
                super::super::ColumnData::Text(v) => v.clone(),
                _ => unreachable!(),
            }
        };
        assert!(label(true).iter().any(|l| l == "EM"));
        assert!(label(false).iter().all(|l| l == "MQS"));
    }

    #[test]
    fn overlay_of_itself_has_zero_difference() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_sweep_freq(&vna(), default_tissue_db()).unwrap();
        let f = r.values("frequency").unwrap();
        let g = r.values("gain vna_50").unwrap();
        let mut text = String::from("frequency [Hz],gain [dB]\n");
        for (a, b) in f.iter().zip(g) {
            text.push_str(&format!("{a},{b}\n"));
        }
        let path = dir.path().join("ref.csv");
        std::fs::write(&path, text).unwrap();
        let o = overlay_reference(&r, &path).unwrap();
        assert!(o.values("reference_diff").unwrap().iter().all(|&d| d == 0.0));
        assert_eq!(o.references.len(), 1);
        assert!(!o.provenance.notes.iter().any(|n| n.contains("differs")));

        std::fs::write(&path, "frequency [MHz],gain [dB]\n1,2\n3,4\n").unwrap();
        let o = overlay_reference(&r, &path).unwrap();
        assert!(o.provenance.notes.iter().any(|n| n.contains("differs")));
        assert!(o.values("reference_diff").unwrap()[0].is_nan());

        std::fs::write(&path, "frequency [Hz],gain [dB]\n1,2\n3,x\n").unwrap();
        assert!(matches!(overlay_reference(&r, &path), Err(Error::Parse { line: 3, .. })));
        std::fs::write(&path, "a [Hz],b [dB],c [dB]\n1,2,3\n").unwrap();
        assert!(matches!(overlay_reference(&r, &path), Err(Error::Parse { .. })));
    }

    #[test]
    fn interpolation_helper() {
        let x = [1.0, 2.0, 4.0];
        let y = [10.0, 20.0, 0.0];
        assert_eq!(interpolate(&x, &y, 2.0), 20.0);
        assert_eq!(interpolate(&x, &y, 3.0), 10.0);
        assert!(interpolate(&x, &y, 0.5).is_nan());
        assert!(interpolate(&x, &y, 5.0).is_nan());
    }
}
