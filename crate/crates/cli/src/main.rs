use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mqs_hbc::coil::{coupling_coefficient, self_inductance};
use mqs_hbc::sweep::{
    overlay_reference, render_svg, run_scenario, write_csv, Analysis, Axis, OutputFormat, RangeSpec, Scenario,
    Spacing, SweepResult, TOOL_VERSION,
};
use mqs_hbc::tissue::{default_tissue_db, load_tissue_db, TissueDb};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const TISSUE_DB_ENV: &str = "MQS_TISSUE_DB";

#[derive(Parser, Debug)]
#[command(name = "mqs", version, about = "Magneto-quasistatic body-channel link modelling")]
struct Cli {
    /// Tissue database file (overrides $MQS_TISSUE_DB and the built-in table).
    #[arg(long, global = true)]
    tissue_db: Option<PathBuf>,
    /// Output path without extension; `.csv` / `.svg` are appended.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Svg => OutputFormat::Svg,
            Format::Both => OutputFormat::Both,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Link gain against frequency.
    SweepFreq(SweepArgs),
    /// Link gain against coil separation at a fixed frequency.
    SweepDistance(SweepArgs),
    /// Link gain over a separation-by-lateral-offset grid.
    SweepOffset(SweepArgs),
    /// Permittivity, conductivity, wavelength and skin depth of a tissue.
    Tissue(TissueArgs),
    /// Tissue report plus MQS / transitional / EM labels.
    Regime(TissueArgs),
    /// Self and mutual inductance of the scenario's coils.
    Coil(CoilArgs),
    /// Print the tool version.
    Version,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    points: Option<usize>,
    /// Lower sweep bound (Hz for frequency sweeps, m otherwise).
    #[arg(long)]
    fmin: Option<f64>,
    /// Upper sweep bound.
    #[arg(long)]
    fmax: Option<f64>,
    /// Multiply gain by the on-axis eddy transmission of the body cylinder.
    #[arg(long)]
    body: bool,
    /// Two-column CSV to overlay.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TissueArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    tissue: Option<String>,
    /// Characteristic body size in metres.
    #[arg(long)]
    body_dimension: Option<f64>,
    /// Linearly interpolated permittivity between 10 Hz and 10 MHz.
    #[arg(long)]
    interpolated: bool,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    fmin: Option<f64>,
    #[arg(long)]
    fmax: Option<f64>,
}

#[derive(Args, Debug)]
struct CoilArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Axial separation in metres.
    #[arg(long)]
    separation: Option<f64>,
    /// Lateral offset in metres.
    #[arg(long)]
    offset: Option<f64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let env_db = std::env::var_os(TISSUE_DB_ENV).map(PathBuf::from);
    match run(cli, env_db) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for numeric failures, 1 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let numeric = e.chain().any(|c| c.downcast_ref::<mqs_hbc::Error>().is_some_and(|m| m.is_numeric()));
    if numeric {
        2
    } else {
        1
    }
}

fn tissue_db(cli: &Cli, env_db: Option<PathBuf>) -> Result<TissueDb> {
    match cli.tissue_db.clone().or(env_db) {
        Some(p) => load_tissue_db(&p).with_context(|| format!("loading tissue database {}", p.display())),
        None => Ok(default_tissue_db().clone()),
    }
}

fn load_or(path: &Option<PathBuf>, default: impl FnOnce() -> Scenario) -> Result<Scenario> {
    match path {
        Some(p) => Scenario::load(p).with_context(|| format!("reading scenario {}", p.display())),
        None => Ok(default()),
    }
}

fn run(cli: Cli, env_db: Option<PathBuf>) -> Result<()> {
    let db = tissue_db(&cli, env_db)?;
    match &cli.command {
        Command::Version => {
            println!("{TOOL_VERSION}");
            Ok(())
        }
        Command::SweepFreq(a) => sweep(&cli, &db, a, Axis::Frequency),
        Command::SweepDistance(a) => sweep(&cli, &db, a, Axis::Distance),
        Command::SweepOffset(a) => sweep(&cli, &db, a, Axis::Offset),
        Command::Tissue(a) => tissue(&cli, &db, a, Analysis::Tissue),
        Command::Regime(a) => tissue(&cli, &db, a, Analysis::Regime),
        Command::Coil(a) => coil(&db, a),
    }
}

fn default_sweep(axis: Axis) -> Scenario {
    let mut s = Scenario::anchored(match axis {
        Axis::Frequency => "sweep-freq",
        Axis::Distance => "sweep-distance",
        Axis::Offset => "sweep-offset",
    });
    s.sweep.axis = axis;
    match axis {
        Axis::Frequency => {}
        Axis::Distance => {
            (s.sweep.min, s.sweep.max, s.sweep.points) = (0.1, 1.0, 61);
        }
        Axis::Offset => {
            (s.sweep.min, s.sweep.max, s.sweep.points, s.sweep.spacing) = (0.0, 0.15, 7, Spacing::Linear);
            s.sweep.distance = Some(RangeSpec { min: 0.1, max: 0.5, points: 5, spacing: Spacing::Linear });
        }
    }
    s
}

fn sweep(cli: &Cli, db: &TissueDb, a: &SweepArgs, axis: Axis) -> Result<()> {
    let mut s = load_or(&a.scenario, || default_sweep(axis))?;
    if s.analysis != Analysis::Link || s.sweep.axis != axis {
        anyhow::bail!(mqs_hbc::Error::Scenario(format!(
            "scenario `{}` is not a {axis:?} link sweep",
            s.name
        )));
    }
    apply_range(&mut s, a.points, a.fmin, a.fmax);
    if a.body {
        if axis != Axis::Frequency {
            anyhow::bail!(mqs_hbc::Error::Scenario("--body applies to frequency sweeps only".into()));
        }
        s.body.enabled = true;
    }
    let mut result = run_scenario(&s, db)?;
    if let Some(r) = &a.reference {
        result = overlay_reference(&result, r).with_context(|| format!("overlaying {}", r.display()))?;
    }
    emit(cli, &s, &result)
}

fn apply_range(s: &mut Scenario, points: Option<usize>, min: Option<f64>, max: Option<f64>) {
    if let Some(p) = points {
        s.sweep.points = p;
    }
    if let Some(v) = min {
        s.sweep.min = v;
    }
    if let Some(v) = max {
        s.sweep.max = v;
    }
}

fn tissue(cli: &Cli, db: &TissueDb, a: &TissueArgs, analysis: Analysis) -> Result<()> {
    let mut s = load_or(&a.scenario, || {
        let mut s = Scenario::anchored(if analysis == Analysis::Tissue { "tissue" } else { "regime" });
        s.sweep.points = 400;
        s
    })?;
    s.analysis = analysis;
    if s.sweep.axis != Axis::Frequency {
        anyhow::bail!(mqs_hbc::Error::Scenario("tissue reports sweep frequency".into()));
    }
    if let Some(t) = &a.tissue {
        s.body.tissue = t.clone();
    }
    if let Some(d) = a.body_dimension {
        s.body.dimension = d;
    }
    s.body.interpolated |= a.interpolated;
    apply_range(&mut s, a.points, a.fmin, a.fmax);
    if a.scenario.is_none() {
        s.name = format!("{}-{}", s.name, s.body.tissue);
    }
    let result = run_scenario(&s, db)?;
    emit(cli, &s, &result)
}

fn coil(db: &TissueDb, a: &CoilArgs) -> Result<()> {
    let mut s = load_or(&a.scenario, || Scenario::anchored("coil"))?;
    if let Some(d) = a.separation {
        s.coils.separation = d;
    }
    if let Some(o) = a.offset {
        s.coils.lateral_offset = o;
    }
    s.validate(db)?;
    let pair = s.pair_at(s.coils.separation, s.coils.lateral_offset)?;
    let m = pair.mutual_inductance()?;
    println!("separation_m = {}", s.coils.separation);
    println!("lateral_offset_m = {}", s.coils.lateral_offset);
    println!("self_inductance_tx_h = {:e}", self_inductance(&pair.tx)?);
    println!("self_inductance_rx_h = {:e}", self_inductance(&pair.rx)?);
    println!("mutual_inductance_h = {m:e}");
    println!("coupling = {}", coupling_coefficient(&pair)?);
    Ok(())
}

fn with_extension(stem: &Path, ext: &str) -> PathBuf {
    let mut os = stem.as_os_str().to_owned();
    os.push(".");
    os.push(ext);
    PathBuf::from(os)
}

fn emit(cli: &Cli, s: &Scenario, result: &SweepResult) -> Result<()> {
    let stem = cli.out.clone().unwrap_or_else(|| s.output_stem());
    let format: OutputFormat = cli.format.map_or(s.output.format, Into::into);
    if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    if format.csv() {
        let path = with_extension(&stem, "csv");
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        write_csv(result, std::io::BufWriter::new(file))?;
        println!("{}", path.display());
    }
    if format.svg() {
        let path = with_extension(&stem, "svg");
        std::fs::write(&path, render_svg(result)).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios").join(format!("{name}.toml"))
    }

    fn s(p: &Path) -> &str {
        p.to_str().unwrap()
    }

    fn invoke_with(args: &[&str], env_db: Option<PathBuf>) -> u8 {
        let argv = std::iter::once("mqs").chain(args.iter().copied());
        match Cli::try_parse_from(argv) {
            Ok(cli) => run(cli, env_db).map_or_else(|e| exit_code(&e), |()| 0),
            Err(e) if e.use_stderr() => 1,
            Err(_) => 0,
        }
    }

    fn invoke(args: &[&str]) -> u8 {
        invoke_with(args, None)
    }

    #[test]
    fn version_and_help() {
        assert_eq!(invoke(&["version"]), 0);
        assert_eq!(invoke(&["--help"]), 0);
        assert_eq!(invoke(&["bogus"]), 1);
    }

    #[test]
    fn validation_errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("x");
        assert_eq!(invoke(&["tissue", "--tissue", "liver", "--out", s(&stem)]), 1);
        assert_eq!(invoke(&["sweep-freq", "--points", "1", "--out", s(&stem)]), 1);
        assert_eq!(invoke(&["sweep-freq", "--fmin", "10", "--fmax", "5", "--out", s(&stem)]), 1);
        assert_eq!(invoke(&["sweep-freq", "--scenario", s(&scenario("fig9a-mqs")), "--out", s(&stem)]), 1);
        assert_eq!(invoke(&["sweep-distance", "--body", "--out", s(&stem)]), 1);
        assert_eq!(invoke(&["sweep-freq", "--scenario", "/nonexistent.toml"]), 1);
        assert!(!stem.with_extension("csv").exists());
    }

    #[test]
    fn singular_circuit_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("singular.toml");
        // lossless receiver resonance driven from an ideal source, sampled exactly on resonance
        std::fs::write(
            &path,
            r#"
name = "singular"
[coils]
separation = 0.1
inductance = 260e-9
mutual = 0.0
[coils.tx]
radius = 0.05
wire_radius = 0.8137e-3
[coils.rx]
radius = 0.05
wire_radius = 0.8137e-3
[link]
cases = ["low_source_capacitive_load"]
low_source_resistance = 0.0
resonance_frequency = 80e6
[sweep]
min = 80e6
max = 90e6
points = 3
"#,
        )
        .unwrap();
        assert_eq!(invoke(&["sweep-freq", "--scenario", s(&path), "--out", s(&dir.path().join("o"))]), 2);
    }

    #[test]
    fn format_flag_selects_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("sub/t");
        assert_eq!(invoke(&["tissue", "--points", "20", "--out", s(&stem), "--format", "csv"]), 0);
        assert!(stem.with_extension("csv").exists());
        assert!(!stem.with_extension("svg").exists());
        assert_eq!(invoke(&["tissue", "--points", "20", "--out", s(&stem), "--format", "svg"]), 0);
        assert!(stem.with_extension("svg").exists());
    }

    #[test]
    fn tissue_db_from_environment_and_flag() {
        let dir = tempfile::tempdir().unwrap();
        let db = dir.path().join("db.txt");
        std::fs::write(
            &db,
            "name=gel eps_inf=4 sigma_ionic=0 \
             term.1.delta_eps=0 term.1.tau=1e-12 term.1.alpha=0 \
             term.2.delta_eps=0 term.2.tau=1e-9 term.2.alpha=0 \
             term.3.delta_eps=0 term.3.tau=1e-6 term.3.alpha=0 \
             term.4.delta_eps=0 term.4.tau=1e-3 term.4.alpha=0\n",
        )
        .unwrap();
        let stem = dir.path().join("gel");
        let args = ["tissue", "--tissue", "gel", "--points", "5", "--format", "csv", "--out", s(&stem)];
        assert_eq!(invoke_with(&args, Some(db.clone())), 0);
        let text = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
        // lossless medium: skin depth column is the infinite sentinel
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|l| l.ends_with(",inf")), "{text}");
        assert_eq!(invoke(&["tissue", "--tissue-db", s(&db), "--tissue", "gel", "--out", s(&stem)]), 0);
        assert_eq!(invoke(&["tissue", "--tissue", "gel", "--out", s(&stem)]), 1);
        // the flag wins over the environment
        let missing = dir.path().join("missing.db");
        assert_eq!(invoke_with(&["tissue", "--tissue-db", s(&db), "--tissue", "gel", "--out", s(&stem)], Some(missing.clone())), 0);
        assert_eq!(invoke_with(&["tissue", "--out", s(&stem)], Some(missing)), 1);
    }

    #[test]
    fn regime_interpolated_flag() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("r");
        let base = ["regime", "--fmin", "1e5", "--fmax", "1e7", "--points", "60", "--body-dimension", "0.08"];
        let run_with = |extra: &[&str]| {
            let mut a: Vec<&str> = base.to_vec();
            a.extend_from_slice(extra);
            a.extend_from_slice(&["--out", s(&stem), "--format", "csv"]);
            assert_eq!(invoke(&a), 0);
            std::fs::read_to_string(stem.with_extension("csv")).unwrap()
        };
        let plain = run_with(&[]);
        assert!(plain.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.ends_with(",MQS")));
        let interp = run_with(&["--interpolated"]);
        assert!(interp.lines().any(|l| l.ends_with(",EM")));
        assert!(interp.contains("# note: eps' linearly interpolated"));
    }

    #[test]
    fn reference_overlay_reaches_the_plot() {
        let dir = tempfile::tempdir().unwrap();
        let reference = dir.path().join("eqs.csv");
        std::fs::write(&reference, "distance [m],gain [dB]\n0.1,-40\n0.5,-70\n1.0,-80\n").unwrap();
        let stem = dir.path().join("d");
        let fig9a = scenario("fig9a-mqs");
        let args = ["sweep-distance", "--scenario", s(&fig9a), "--reference", s(&reference), "--out", s(&stem)];
        assert_eq!(invoke(&args), 0);
        let svg = std::fs::read_to_string(stem.with_extension("svg")).unwrap();
        assert!(svg.contains("gain vna_50 [dB]") && svg.contains("eqs [dB]"));
        assert!(svg.contains("stroke-dasharray"));
        let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(header.ends_with("reference [dB],reference_diff [dB]"), "{header}");

        std::fs::write(&reference, "distance [m],gain [dB]\n0.1,-40\n0.5,oops\n").unwrap();
        let cli = Cli::try_parse_from(std::iter::once("mqs").chain(args)).unwrap();
        let err = run(cli, None).unwrap_err();
        assert_eq!(exit_code(&err), 1);
        assert!(format!("{err:#}").contains("line 3"), "{err:#}");
    }

    #[test]
    fn body_flag_labels_composition() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("b");
        assert_eq!(invoke(&["sweep-freq", "--body", "--points", "30", "--out", s(&stem), "--format", "csv"]), 0);
        let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
        assert!(csv.contains("first-order composition"));
        assert!(csv.contains("eddy transmission [1]"));
    }

    #[test]
    fn coil_subcommand() {
        assert_eq!(invoke(&["coil", "--separation", "0.2"]), 0);
        assert_eq!(invoke(&["coil", "--separation", "0"]), 1);
        assert_eq!(invoke(&["coil", "--scenario", s(&scenario("fig9b")), "--offset", "0.05"]), 0);
    }

    #[test]
    fn default_sweeps_validate() {
        let db = default_tissue_db();
        for axis in [Axis::Frequency, Axis::Distance, Axis::Offset] {
            default_sweep(axis).validate(db).unwrap();
        }
    }
}
