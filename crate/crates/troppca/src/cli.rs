//! The `troppca` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use troppca_core::sim::{mixture_experiment, SimConfig};
use troppca_core::{
    fermat_weber, pull_into_hull, statistics, Init, McmcConfig, PcaFit, TropicalPoint, TropicalPolytope, Ultrametric,
};

use crate::config::FileConfig;
use crate::dataset::{self, Dataset};
use crate::error::{AppError, AppResult, ExitCode};
use crate::newick::{parse_newick_file, to_newick};
use crate::render::{render_svg, RenderSpec};
use crate::report::{
    point_newick, to_json, ConjectureReport, FermatWeberReport, FitConfigEcho, FitReport, InputInfo, MixManifest,
    PolytopeFile, ProjectReport, ProjectedSample, SampleFit, SimulationManifest, StatsReport, TOOL,
};
use crate::runner::{fit_parallel, mode_name, parse_mode, run_sensitivity, SensitivityGrid};
use crate::vectors::write_vectors;

#[derive(Debug, Parser)]
#[command(name = "troppca", version, about = "Tropical principal component analysis of equidistant phylogenetic trees")]
pub struct Cli {
    /// TOML file with default option values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a tropical polytope to a sample of trees by MCMC.
    Fit(FitArgs),
    /// Draw a three-vertex fit as an SVG scatter plot.
    Render(RenderArgs),
    /// Tropical Fermat-Weber point of a sample, pulled into its hull.
    Fw(InputArgs),
    /// Test whether the Fermat-Weber point lies in the fitted polytope.
    CheckConjecture(FitArgs),
    /// Generate random equidistant trees.
    Simulate(SimulateArgs),
    /// Fit simulated datasets over a grid of sizes and iteration budgets.
    Sensitivity(SensitivityArgs),
    /// Project trees onto a polytope.
    Project(PolytopeArgs),
    /// Fit statistics of a polytope for a sample.
    Stats(PolytopeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Newick file (one tree per line or `;`-separated), or `.csv` vectors.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Extend pendant edges of trees that are not equidistant.
    #[arg(long)]
    pub force_equidistant: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Number of polytope vertices.
    #[arg(long)]
    pub vertices: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub cooling_interval: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Newick file with the starting vertices.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Text file with one group label per input tree.
    #[arg(long)]
    pub groups: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Fit JSON written by `fit`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// by-topology, by-group or lower-percentile-black.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub percentile: Option<f64>,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 600)]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// caterpillar or coalescent.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Newick output; the manifest goes next to it as `<output>.manifest.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the cophenetic vectors as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Append a second group generated with this mode.
    #[arg(long)]
    pub mix_mode: Option<String>,
    #[arg(long)]
    pub mix_n: Option<usize>,
    #[arg(long)]
    pub mix_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Leaf counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub m: Vec<usize>,
    /// Tree counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "25")]
    pub n: Vec<usize>,
    /// Iteration budgets, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    pub iterations: Vec<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub vertices: Option<usize>,
    #[arg(long)]
    pub cooling_interval: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolytopeArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Polytope JSON, or a fit JSON holding one.
    #[arg(long)]
    pub polytope: PathBuf,
}

/// Parses `args` and runs the command, printing errors to stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::Usage } else { ExitCode::Success };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::Success,
        Err(e) => {
            eprintln!("troppca: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> AppResult<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Fit(a) => cmd_fit(&a, &file),
        Command::Render(a) => cmd_render(&a, &file),
        Command::Fw(a) => cmd_fw(&a, &file),
        Command::CheckConjecture(a) => cmd_check_conjecture(&a, &file),
        Command::Simulate(a) => cmd_simulate(&a, &file),
        Command::Sensitivity(a) => cmd_sensitivity(&a, &file),
        Command::Project(a) => cmd_project(&a, &file),
        Command::Stats(a) => cmd_stats(&a, &file),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> AppResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::io(p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| AppError::io("<stdout>", e))
        }
    }
}

fn read_text(path: &Path) -> AppResult<String> {
    std::fs::read_to_string(path).map_err(|e| AppError::io(path.display().to_string(), e))
}

fn load_input(io: &InputArgs, file: &FileConfig) -> AppResult<Dataset> {
    dataset::load(&io.input, io.force_equidistant || file.force_equidistant.unwrap_or(false))
}

fn input_info(io: &InputArgs, data: &Dataset) -> InputInfo {
    InputInfo {
        path: io.input.display().to_string(),
        trees: data.points.len(),
        m: data.m(),
        repaired: data.repaired.clone(),
        max_repair: data.max_repair,
    }
}

struct Resolved {
    config: McmcConfig,
    echo: FitConfigEcho,
    threads: usize,
}

fn resolve_fit(a: &FitArgs, file: &FileConfig, data: &Dataset) -> AppResult<Resolved> {
    let defaults = McmcConfig::default();
    let vertices = a.vertices.or(file.vertices).unwrap_or(defaults.vertices);
    let init = match &a.init {
        None => Init::SampleRandom,
        Some(p) => {
            let trees = parse_newick_file(&read_text(p)?)
                .map_err(|errors| AppError::Parse { path: p.display().to_string(), errors })?;
            let start = trees
                .iter()
                .map(|t| t.with_label_order(&data.labels).and_then(|t| t.cophenetic()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| AppError::Input(format!("{}: {e}", p.display())))?;
            Init::UserSupplied(start)
        }
    };
    let config = McmcConfig {
        vertices,
        iterations: a.iterations.or(file.iterations).unwrap_or(defaults.iterations),
        cooling_interval: a.cooling_interval.or(file.cooling_interval).unwrap_or(defaults.cooling_interval),
        seed: file.resolve_seed(a.seed)?,
        chains: a.chains.or(file.chains).unwrap_or(defaults.chains),
        init,
    };
    config.validate()?;
    let echo = FitConfigEcho {
        vertices: config.vertices,
        iterations: config.iterations,
        cooling_interval: config.cooling_interval,
        seed: config.seed,
        chains: config.chains,
        init: a.init.as_ref().map_or("sample".to_string(), |p| p.display().to_string()),
        force_equidistant: a.io.force_equidistant || file.force_equidistant.unwrap_or(false),
    };
    Ok(Resolved { config, echo, threads: a.threads.or(file.threads).unwrap_or(0) })
}

fn read_groups(path: &Path, n: usize) -> AppResult<Vec<String>> {
    let groups: Vec<String> = read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if groups.len() != n {
        return Err(AppError::Input(format!("{} lists {} groups for {n} trees", path.display(), groups.len())));
    }
    Ok(groups)
}

pub fn fit_report(data: &Dataset, info: InputInfo, echo: FitConfigEcho, fit: &PcaFit, groups: Option<Vec<String>>) -> AppResult<FitReport> {
    let samples = (0..fit.projections.len())
        .map(|i| SampleFit {
            index: i,
            group: groups.as_ref().map(|g| g[i].clone()),
            lambda: fit.lambdas[i].clone(),
            residual: fit.residuals[i],
            projection: fit.projections[i].coords().to_vec(),
            projection_newick: point_newick(&fit.projections[i], &data.labels),
        })
        .collect();
    Ok(FitReport {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: echo,
        input: info,
        polytope: PolytopeFile::new(&fit.vertices, &data.labels)?,
        chain: fit.chain,
        accepted: fit.accepted,
        pi: fit.pi_unexplained,
        s_reg: fit.s_reg,
        r_squared: fit.r_squared,
        samples,
        trace: fit.trace.clone(),
    })
}

fn cmd_fit(a: &FitArgs, file: &FileConfig) -> AppResult<()> {
    let data = load_input(&a.io, file)?;
    let groups = a.groups.as_deref().map(|p| read_groups(p, data.points.len())).transpose()?;
    let r = resolve_fit(a, file, &data)?;
    let fit = fit_parallel(&data.points, &r.config, r.threads)?;
    let report = fit_report(&data, input_info(&a.io, &data), r.echo, &fit, groups)?;
    write_output(a.io.output.as_deref(), &to_json(&report)?)
}

fn cmd_render(a: &RenderArgs, file: &FileConfig) -> AppResult<()> {
    let fit: FitReport = serde_json::from_str(&read_text(&a.input)?)?;
    let mode = a.mode.as_deref().or(file.mode.as_deref()).unwrap_or("by-topology");
    let spec = RenderSpec {
        width: a.width,
        height: a.height,
        mode: mode.parse()?,
        percentile: a.percentile.or(file.percentile).unwrap_or(5.0),
    };
    write_output(a.output.as_deref(), &render_svg(&fit, &spec)?)
}

/// Fermat-Weber point pulled into the hull, as an ultrametric.
fn fw_point(points: &[Ultrametric]) -> AppResult<(TropicalPoint, f64, bool)> {
    let sample: Vec<TropicalPoint> = points.iter().map(|u| u.point().clone()).collect();
    let fw = fermat_weber(&sample)?;
    let pulled = pull_into_hull(&sample, &fw.point)?;
    Ok((pulled, fw.objective, fw.in_hull))
}

fn ultrametric_newick(point: &TropicalPoint, labels: &[String]) -> AppResult<String> {
    point_newick(point, labels)
        .ok_or_else(|| AppError::Numeric("the Fermat-Weber point is not ultrametric within tolerance".into()))
}

fn cmd_fw(a: &InputArgs, file: &FileConfig) -> AppResult<()> {
    let data = load_input(a, file)?;
    let (point, objective, lp_in_hull) = fw_point(&data.points)?;
    let report = FermatWeberReport {
        tool: TOOL.to_string(),
        input: input_info(a, &data),
        labels: data.labels.clone(),
        objective,
        lp_point_in_hull: lp_in_hull,
        newick: ultrametric_newick(&point, &data.labels)?,
        point: point.into_coords(),
    };
    write_output(a.output.as_deref(), &to_json(&report)?)
}

fn cmd_check_conjecture(a: &FitArgs, file: &FileConfig) -> AppResult<()> {
    let data = load_input(&a.io, file)?;
    let r = resolve_fit(a, file, &data)?;
    let (point, objective, _) = fw_point(&data.points)?;
    let fit = fit_parallel(&data.points, &r.config, r.threads)?;
    let poly = TropicalPolytope::from_ultrametrics(&fit.vertices)?;
    let report = ConjectureReport {
        tool: TOOL.to_string(),
        note: "empirical evidence only: a single fitted polytope is checked, nothing is proved".to_string(),
        config: r.echo,
        input: input_info(&a.io, &data),
        fermat_weber_newick: ultrametric_newick(&point, &data.labels)?,
        fermat_weber_objective: objective,
        polytope: PolytopeFile::new(&fit.vertices, &data.labels)?,
        pi: fit.pi_unexplained,
        r_squared: fit.r_squared,
        contains: poly.contains(&point)?,
        residual: poly.residual(&point)?,
        fermat_weber: point.into_coords(),
    };
    write_output(a.io.output.as_deref(), &to_json(&report)?)
}

fn cmd_simulate(a: &SimulateArgs, file: &FileConfig) -> AppResult<()> {
    let mode = parse_mode(a.mode.as_deref().or(file.mode.as_deref()).unwrap_or("caterpillar"))?;
    let seed = file.resolve_seed(a.seed)?;
    let first = SimConfig { m: a.m, n: a.n, mode, seed };
    first.validate()?;
    let mix = match (&a.mix_mode, a.mix_n) {
        (None, None) => None,
        (Some(mm), n) => Some(SimConfig {
            m: a.m,
            n: n.unwrap_or(a.n),
            mode: parse_mode(mm)?,
            seed: a.mix_seed.unwrap_or(seed.wrapping_add(1)),
        }),
        (None, Some(_)) => return Err(AppError::Usage("--mix-n needs --mix-mode".into())),
    };
    let (trees, groups) = match &mix {
        None => (first.generate()?, None),
        Some(second) => {
            let ds = mixture_experiment(&first, second)?;
            (ds.trees, Some(ds.groups))
        }
    };
    let mut text = String::new();
    for t in &trees {
        text.push_str(&to_newick(t));
        text.push('\n');
    }
    write_output(a.output.as_deref(), &text)?;
    if let Some(csv_path) = &a.csv {
        let points = trees.iter().map(|t| t.cophenetic()).collect::<Result<Vec<_>, _>>()?;
        let f = std::fs::File::create(csv_path).map_err(|e| AppError::io(csv_path.display().to_string(), e))?;
        write_vectors(f, &points)?;
    }
    if let Some(out) = &a.output {
        let group_names = groups.map(|g| g.iter().map(|&i| if i == 0 { "A" } else { "B" }.to_string()).collect::<Vec<_>>());
        let mix_manifest = match (&mix, group_names) {
            (Some(second), Some(names)) => {
                let groups_file = format!("{}.groups", out.display());
                std::fs::write(&groups_file, names.join("\n") + "\n").map_err(|e| AppError::io(&groups_file, e))?;
                Some(MixManifest {
                    mode: mode_name(second.mode).to_string(),
                    seed: second.seed,
                    n: second.n,
                    groups: names,
                    groups_file,
                })
            }
            _ => None,
        };
        let manifest = SimulationManifest {
            tool: TOOL.to_string(),
            mode: mode_name(mode).to_string(),
            seed,
            m: a.m,
            n: a.n,
            labels: trees[0].labels().to_vec(),
            mix: mix_manifest,
            output: out.display().to_string(),
        };
        let path = format!("{}.manifest.json", out.display());
        std::fs::write(&path, to_json(&manifest)?).map_err(|e| AppError::io(&path, e))?;
    }
    Ok(())
}

const TABLE_LEAVES: std::ops::RangeInclusive<usize> = 4..=9;
const TABLE_TREES: [usize; 5] = [5, 25, 50, 100, 1000];
const TABLE_ITERATIONS: [usize; 4] = [10, 100, 1000, 10000];

fn cmd_sensitivity(a: &SensitivityArgs, file: &FileConfig) -> AppResult<()> {
    let grid = SensitivityGrid {
        leaves: a.m.clone(),
        trees: a.n.clone(),
        iterations: a.iterations.clone(),
        chains: a.chains.or(file.chains).unwrap_or(10),
        mode: parse_mode(a.mode.as_deref().or(file.mode.as_deref()).unwrap_or("caterpillar"))?,
        seed: file.resolve_seed(a.seed)?,
        vertices: a.vertices.or(file.vertices).unwrap_or(3),
        cooling_interval: a.cooling_interval.or(file.cooling_interval).unwrap_or(50),
    };
    if grid.leaves.iter().any(|m| !TABLE_LEAVES.contains(m))
        || grid.trees.iter().any(|n| !TABLE_TREES.contains(n))
        || grid.iterations.iter().any(|i| !TABLE_ITERATIONS.contains(i))
    {
        log::warn!("grid values outside m 4..9, n {TABLE_TREES:?}, iterations {TABLE_ITERATIONS:?}");
    }
    if grid.chains == 0 || grid.iterations.contains(&0) {
        return Err(AppError::Usage("chains and iteration budgets must be positive".into()));
    }
    let rows = run_sensitivity(&grid, a.threads.or(file.threads).unwrap_or(0))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| AppError::Input(format!("CSV: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Input(format!("CSV: {e}")))?;
    write_output(a.output.as_deref(), &String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn load_polytope(path: &Path, data: &Dataset) -> AppResult<(PolytopeFile, Vec<Ultrametric>)> {
    let file = PolytopeFile::from_json(&read_text(path)?)?;
    if file.labels != data.labels {
        return Err(AppError::Input(format!(
            "{}: polytope leaves {:?} differ from the sample's {:?}",
            path.display(),
            file.labels,
            data.labels
        )));
    }
    let vertices = file.ultrametrics()?;
    Ok((file, vertices))
}

fn cmd_project(a: &PolytopeArgs, file: &FileConfig) -> AppResult<()> {
    let data = load_input(&a.io, file)?;
    let (pfile, vertices) = load_polytope(&a.polytope, &data)?;
    let poly = TropicalPolytope::from_ultrametrics(&vertices)?;
    let samples = data
        .points
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let p = poly.project(u.point())?;
            Ok(ProjectedSample {
                index: i,
                residual: p.point.dist(u.point())?,
                projection_newick: point_newick(&p.point, &data.labels),
                projection: p.point.into_coords(),
                lambda: p.lambdas,
                inside: poly.contains(u.point())?,
            })
        })
        .collect::<AppResult<_>>()?;
    let report = ProjectReport { tool: TOOL.to_string(), polytope: pfile, samples };
    write_output(a.io.output.as_deref(), &to_json(&report)?)
}

fn cmd_stats(a: &PolytopeArgs, file: &FileConfig) -> AppResult<()> {
    let data = load_input(&a.io, file)?;
    let (pfile, vertices) = load_polytope(&a.polytope, &data)?;
    let s = statistics(&vertices, &data.points)?;
    let report = StatsReport {
        tool: TOOL.to_string(),
        input: input_info(&a.io, &data),
        polytope: pfile,
        pi: s.pi,
        s_reg: s.s_reg,
        r_squared: s.r_squared,
        centroid: s.centroid.into_coords(),
        residuals: s.residuals,
    };
    write_output(a.io.output.as_deref(), &to_json(&report)?)
}
