//! Argument parsing and sub-command execution for the `sdoflab` binary.
//!
//! Every artifact is a pure function of the parsed [`RunConfig`]; running the
//! same command line twice writes byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sdoflab::bounds::{emit_curve, CurveFormat, CURVE_CSV_HEADER};
use sdoflab::codec::format_rational;
use sdoflab::entropy::{secrecy_rate_proxy, SchemeSweep, DEFAULT_POWER_GRID, SWEEP_CSV_HEADER};
use sdoflab::oracles::{
    converse_search, full_space_trial, least_alignment_trial, rank_lemma_trial, AlignmentMode, RandomMask,
    RankLemmaParams, SearchParams, TrialSummary,
};
use sdoflab::sampling::{derive_seed, DEFAULT_GRID_DENOM};
use sdoflab::verifier::REPORT_CSV_HEADER;
use sdoflab::{
    compose_mac_timeshare, construct_wth_scheme, sample_realization, stack, verify, ChannelRealization, LinearScheme,
    RationalGrid, SdofError, SystemDims,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_COUNTEREXAMPLE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] SdofError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "sdoflab", version, about = "Seeded experiments on linear secure degrees of freedom")]
pub struct RunConfig {
    /// Denominator D of the rational sampling grid {j/D : 0 < |j| <= D}.
    #[arg(long, global = true, env = "SDOFLAB_GRID_DENOM", default_value_t = DEFAULT_GRID_DENOM)]
    pub grid_denom: u64,

    #[command(subcommand)]
    pub command: Command,
}

impl RunConfig {
    pub fn grid(&self) -> RationalGrid {
        RationalGrid::new(self.grid_denom)
    }
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Comparison bound curves over a range of eavesdropper antenna counts.
    #[command(after_help = concat!(
        "CSV header: N,K,linear_optimal,general_upper,fullcsit_macwt,fullcsit_wth,avc\n",
        "Empty cells mark regimes where a curve is undefined (null in JSON, NaN in gnuplot data)."
    ))]
    Bounds(BoundsArgs),

    /// Sample a realization and build the aligned-noise scheme for it.
    #[command(after_help = "Writes realization.json and scheme.json into --output-dir.")]
    Construct(ConstructArgs),

    /// Check decodability and leakage of a scheme over a realization.
    #[command(after_help = "CSV header: N,K,n,m1,m2,n1,n2,decodable_dims,leakage_dims,eve_rank,sdof,ok")]
    Verify(VerifyArgs),

    /// Gaussian-input mutual information sweep over transmit power.
    #[command(after_help = concat!(
        "Writes sweep.csv (header: P,mi_legitimate_nats,mi_leakage_nats) and summary.json ",
        "(fitted slopes, residuals, secrecy proxy) into --output-dir."
    ))]
    Leakage(LeakageArgs),

    /// Monte Carlo check of rank [G1 P1, G2 P2] = min(p1 + p2, K).
    #[command(name = "oracle-rank", after_help = "Writes a JSON trial summary; exit code 2 on any counterexample.")]
    OracleRank(OracleRankArgs),

    /// Monte Carlo check that the eavesdropper span dominates the legitimate one when K = N.
    #[command(name = "oracle-align", after_help = "Writes a JSON trial summary; exit code 2 on any counterexample.")]
    OracleAlign(OracleAlignArgs),

    /// Monte Carlo check that the constructed noise fills the eavesdropper space.
    #[command(name = "oracle-fullspace", after_help = "Writes a JSON trial summary; exit code 2 on any counterexample.")]
    OracleFullspace(OracleFullspaceArgs),

    /// Randomized search for linear schemes beating ceil(n (2N - K) / 2) secure symbols.
    #[command(after_help = concat!(
        "Writes a JSON outcome with best_found, bound and replayable counterexamples. ",
        "Exit code 2 if any accepted scheme beats the bound. A clean run is evidence, not a proof."
    ))]
    Search(SearchArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OutputArg {
    /// Artifact path; stdout when omitted.
    #[arg(long, short = 'o', visible_alias = "output-path")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BoundsArgs {
    /// Antennas per transmitter and at the legitimate receiver (N).
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    /// Inclusive range of eavesdropper antenna counts, `a:b`.
    #[arg(long, value_parser = parse_k_range)]
    pub k_range: RangeInclusive<usize>,
    #[arg(long, value_enum, default_value_t = BoundsFormat::Csv)]
    pub format: BoundsFormat,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsFormat {
    Csv,
    Json,
    Gnuplot,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ConstructArgs {
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    /// Eavesdropper antennas (K).
    #[arg(long = "k", visible_alias = "k-eve")]
    pub k_eve: usize,
    #[arg(long)]
    pub seed: u64,
    /// Multiple-access variant: each transmitter takes the helper role for
    /// one two-slot block (four slots total).
    #[arg(long)]
    pub timeshare: bool,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct VerifyArgs {
    #[arg(long)]
    pub realization: PathBuf,
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct LeakageArgs {
    /// Realization file; sampled from --n/--k/--seed when omitted.
    #[arg(long, requires = "scheme")]
    pub realization: Option<PathBuf>,
    #[arg(long, requires = "realization")]
    pub scheme: Option<PathBuf>,
    #[arg(long = "n", visible_alias = "n-antennas", conflicts_with = "realization")]
    pub n_antennas: Option<usize>,
    #[arg(long = "k", visible_alias = "k-eve", conflicts_with = "realization")]
    pub k_eve: Option<usize>,
    #[arg(long, conflicts_with = "realization")]
    pub seed: Option<u64>,
    /// Comma-separated transmit powers, e.g. `1e2,1e4,1e6,1e8,1e10`.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_POWER_GRID.to_vec())]
    pub power_grid: Vec<f64>,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct TrialArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArg,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleRankArgs {
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    #[arg(long = "k", visible_alias = "k-eve")]
    pub k_eve: usize,
    #[arg(long)]
    pub p1: usize,
    #[arg(long)]
    pub p2: usize,
    /// Columns of P1; defaults to N.
    #[arg(long)]
    pub m1: Option<usize>,
    /// Columns of P2; defaults to N.
    #[arg(long)]
    pub m2: Option<usize>,
    /// K x N pattern of redrawn entries, rows separated by `;`, e.g. `10;01`.
    /// `0` entries are held fixed across trials. All entries random by default.
    #[arg(long)]
    pub mask: Option<String>,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignModeArg {
    Aligned,
    Independent,
    Mixed,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleAlignArgs {
    /// Antennas at every terminal (N = K).
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    #[arg(long, visible_alias = "n-slots", default_value_t = 2)]
    pub slots: usize,
    #[arg(long, value_enum, default_value_t = AlignModeArg::Mixed)]
    pub mode: AlignModeArg,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleFullspaceArgs {
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    #[arg(long = "k", visible_alias = "k-eve")]
    pub k_eve: usize,
    #[command(flatten)]
    pub trials: TrialArgs,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct SearchArgs {
    #[arg(long = "n", visible_alias = "n-antennas")]
    pub n_antennas: usize,
    #[arg(long = "k", visible_alias = "k-eve")]
    pub k_eve: usize,
    #[arg(long, visible_alias = "n-slots", default_value_t = 2)]
    pub slots: usize,
    /// Accept schemes leaking at most this many dimensions.
    #[arg(long, default_value_t = 0)]
    pub leak_budget: usize,
    #[command(flatten)]
    pub trials: TrialArgs,
}

fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad range start `{a}`: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad range end `{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok(a..=b)
}

fn parse_mask(s: &str, rows: usize, cols: usize) -> CliResult<RandomMask> {
    let lines: Vec<&str> = s.split(';').collect();
    let shape_error = || CliError::Usage(format!("--mask must be {rows} rows of {cols} characters from {{0,1}}, got `{s}`"));
    if lines.len() != rows {
        return Err(shape_error());
    }
    let mut random = Vec::with_capacity(rows * cols);
    for line in lines {
        if line.len() != cols {
            return Err(shape_error());
        }
        for c in line.chars() {
            match c {
                '1' => random.push(true),
                '0' => random.push(false),
                _ => return Err(shape_error()),
            }
        }
    }
    Ok(RandomMask { rows, cols, random })
}

/// Parses arguments, mapping clap's own exit status onto ours: help and
/// version print and succeed, every other parse failure is a usage error.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunConfig::try_parse_from(args)
}

/// Where a sub-command's main artifact goes. The one-line summary goes to
/// `log` so that stdout artifacts stay clean.
pub struct Sinks<'a> {
    pub out: &'a mut dyn Write,
    pub log: &'a mut dyn Write,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, contents).map_err(CliError::io(path))
}

fn emit(sinks: &mut Sinks<'_>, output: &OutputArg, contents: &str) -> CliResult<()> {
    match &output.output {
        Some(path) => write_file(path, contents),
        None => sinks.out.write_all(contents.as_bytes()).map_err(CliError::io(Path::new("<stdout>"))),
    }
}

fn summary(sinks: &mut Sinks<'_>, line: String) -> CliResult<()> {
    writeln!(sinks.log, "{line}").map_err(CliError::io(Path::new("<stderr>")))
}

fn load_realization(path: &Path) -> CliResult<ChannelRealization> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(ChannelRealization::from_json(&text)?)
}

fn load_scheme(path: &Path) -> CliResult<LinearScheme> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(LinearScheme::from_json(&text)?)
}

/// Executes one sub-command and returns the process exit code.
pub fn run(config: &RunConfig, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    if config.grid_denom == 0 {
        return Err(CliError::Usage("grid denominator must be positive".into()));
    }
    let grid = config.grid();
    match &config.command {
        Command::Bounds(a) => run_bounds(a, sinks),
        Command::Construct(a) => run_construct(a, grid, sinks),
        Command::Verify(a) => run_verify(a, sinks),
        Command::Leakage(a) => run_leakage(a, grid, sinks),
        Command::OracleRank(a) => {
            let mut params = RankLemmaParams::new(a.n_antennas, a.k_eve, a.p1, a.p2);
            params.m1 = a.m1.unwrap_or(a.n_antennas);
            params.m2 = a.m2.unwrap_or(a.n_antennas);
            params.mask = a.mask.as_deref().map(|m| parse_mask(m, a.k_eve, a.n_antennas)).transpose()?;
            let s = rank_lemma_trial(&params, a.trials.trials, a.trials.seed, grid)?;
            finish_trials(&s, &a.trials.output, sinks)
        }
        Command::OracleAlign(a) => {
            let mode = match a.mode {
                AlignModeArg::Aligned => AlignmentMode::Aligned,
                AlignModeArg::Independent => AlignmentMode::Independent,
                AlignModeArg::Mixed => AlignmentMode::Mixed,
            };
            let s = least_alignment_trial(a.n_antennas, a.slots, mode, a.trials.trials, a.trials.seed, grid)?;
            finish_trials(&s, &a.trials.output, sinks)
        }
        Command::OracleFullspace(a) => {
            let s = full_space_trial(a.n_antennas, a.k_eve, a.trials.trials, a.trials.seed, grid)?;
            finish_trials(&s, &a.trials.output, sinks)
        }
        Command::Search(a) => {
            let params = SearchParams {
                n_antennas: a.n_antennas,
                k_eve: a.k_eve,
                n_slots: a.slots,
                leak_budget: a.leak_budget,
            };
            let outcome = converse_search(&params, a.trials.trials, a.trials.seed, grid)?;
            emit(sinks, &a.trials.output, &outcome.to_json())?;
            summary(
                sinks,
                format!(
                    "search N={} K={} n={} trials={} best_found={} bound={} counterexamples={}",
                    a.n_antennas,
                    a.k_eve,
                    a.slots,
                    outcome.trials,
                    outcome.best_found,
                    outcome.bound,
                    outcome.counterexamples.len()
                ),
            )?;
            Ok(if outcome.found_counterexample() { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
        }
    }
}

fn finish_trials(s: &TrialSummary, output: &OutputArg, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    emit(sinks, output, &s.to_json())?;
    summary(
        sinks,
        format!(
            "{} trials={} successes={} counterexamples={}",
            s.operation,
            s.trials,
            s.successes,
            s.counterexamples.len()
        ),
    )?;
    Ok(if s.all_passed() { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

fn run_bounds(a: &BoundsArgs, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    if a.n_antennas == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let format = match a.format {
        BoundsFormat::Csv => CurveFormat::Csv,
        BoundsFormat::Json => CurveFormat::Json,
        BoundsFormat::Gnuplot => CurveFormat::Gnuplot,
    };
    emit(sinks, &a.output, &emit_curve(a.n_antennas, a.k_range.clone(), format))?;
    summary(
        sinks,
        format!(
            "bounds N={} K={}..={} rows={} ({CURVE_CSV_HEADER})",
            a.n_antennas,
            a.k_range.start(),
            a.k_range.end(),
            a.k_range.clone().count()
        ),
    )?;
    Ok(EXIT_OK)
}

fn run_construct(a: &ConstructArgs, grid: RationalGrid, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    let dims = SystemDims::new(a.n_antennas, a.k_eve, 2)?;
    let (realization, scheme) = if a.timeshare {
        let first = sample_realization(dims, derive_seed(a.seed, 0), grid)?;
        let second = sample_realization(dims, derive_seed(a.seed, 1), grid)?;
        let (s1, s2) = compose_mac_timeshare(first.legitimate(), second.legitimate(), derive_seed(a.seed, 2), grid)?;
        (first.concat(&second)?, s1.concat(&s2)?)
    } else {
        let r = sample_realization(dims, derive_seed(a.seed, 0), grid)?;
        let s = construct_wth_scheme(r.legitimate(), derive_seed(a.seed, 1), grid)?;
        (r, s)
    };
    fs::create_dir_all(&a.output_dir).map_err(CliError::io(&a.output_dir))?;
    write_file(&a.output_dir.join("realization.json"), &realization.to_json())?;
    write_file(&a.output_dir.join("scheme.json"), &scheme.to_json())?;
    summary(
        sinks,
        format!(
            "construct N={} K={} n={} m1={} m2={} n1={} n2={} -> {}",
            a.n_antennas,
            a.k_eve,
            scheme.dims().n_slots,
            scheme.m1(),
            scheme.m2(),
            scheme.nn1(),
            scheme.nn2(),
            a.output_dir.display()
        ),
    )?;
    Ok(EXIT_OK)
}

fn run_verify(a: &VerifyArgs, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    let r = load_realization(&a.realization)?;
    let s = load_scheme(&a.scheme)?;
    let report = verify(&s, &stack(&r))?;
    let text = match a.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => format!("{REPORT_CSV_HEADER}\n{}\n", report.csv_row()),
    };
    emit(sinks, &a.output, &text)?;
    let sdof = report.achieved_sum_sdof.as_ref().map_or_else(|| "-".to_string(), format_rational);
    summary(
        sinks,
        format!(
            "verify decodable={} leakage={} sdof={} ok={}",
            report.decodable_dims,
            report.leakage_dims,
            sdof,
            report.ok()
        ),
    )?;
    Ok(EXIT_OK)
}

fn run_leakage(a: &LeakageArgs, grid: RationalGrid, sinks: &mut Sinks<'_>) -> CliResult<u8> {
    let (r, s) = match (&a.realization, &a.scheme) {
        (Some(rp), Some(sp)) => (load_realization(rp)?, load_scheme(sp)?),
        _ => {
            let (Some(n), Some(k), Some(seed)) = (a.n_antennas, a.k_eve, a.seed) else {
                return Err(CliError::Usage(
                    "leakage needs either --realization and --scheme, or --n, --k and --seed".into(),
                ));
            };
            let r = sample_realization(SystemDims::new(n, k, 2)?, derive_seed(seed, 0), grid)?;
            let s = construct_wth_scheme(r.legitimate(), derive_seed(seed, 1), grid)?;
            (r, s)
        }
    };
    if s.dims() != r.dims() {
        return Err(CliError::Usage(format!(
            "scheme dims {:?} do not match realization dims {:?}",
            s.dims(),
            r.dims()
        )));
    }
    let c = stack(&r);
    let sweep = SchemeSweep::run(&s, &c, &a.power_grid)?;
    let top = *a.power_grid.last().expect("grid validated non-empty");
    let proxy = secrecy_rate_proxy(&s, &c, top)?;
    let dims = r.dims();
    let summary_json = json!({
        "dims": dims,
        "m1": s.m1(), "m2": s.m2(), "n1": s.nn1(), "n2": s.nn2(),
        "alpha": sweep.alpha,
        "legitimate_slope": sweep.legitimate.fitted_slope,
        "legitimate_residual": sweep.legitimate.residual,
        "leakage_slope": sweep.leakage.fitted_slope,
        "leakage_residual": sweep.leakage.residual,
        "proxy_power": top,
        "secrecy_rate_proxy": proxy,
    });
    fs::create_dir_all(&a.output_dir).map_err(CliError::io(&a.output_dir))?;
    write_file(&a.output_dir.join("sweep.csv"), &sweep.to_csv())?;
    write_file(
        &a.output_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary_json).expect("json") + "\n"),
    )?;
    summary(
        sinks,
        format!(
            "leakage N={} K={} legit_slope={:.4} leak_slope={:.4} proxy={:.4} ({SWEEP_CSV_HEADER})",
            dims.n_antennas, dims.k_eve, sweep.legitimate.fitted_slope, sweep.leakage.fitted_slope, proxy
        ),
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_parsing() {
        assert_eq!(parse_k_range("0:8").unwrap(), 0..=8);
        assert!(parse_k_range("3:1").is_err());
        assert!(parse_k_range("3").is_err());
    }

    #[test]
    fn mask_parsing() {
        let m = parse_mask("10;01", 2, 2).unwrap();
        assert_eq!(m.random, vec![true, false, false, true]);
        assert!(parse_mask("10;0", 2, 2).is_err());
        assert!(parse_mask("1x;01", 2, 2).is_err());
    }

    #[test]
    fn seeds_are_mandatory() {
        assert!(parse_args(["sdoflab", "construct", "--n", "2", "--k", "1", "--output-dir", "x"]).is_err());
        assert!(parse_args(["sdoflab", "search", "--n", "1", "--k", "1"]).is_err());
    }

    #[test]
    fn long_aliases() {
        let a = parse_args(["sdoflab", "search", "--n-antennas", "1", "--k-eve", "1", "--n-slots", "2", "--seed", "1"]).unwrap();
        let b = parse_args(["sdoflab", "search", "--n", "1", "--k", "1", "--slots", "2", "--seed", "1"]).unwrap();
        assert_eq!(a.command, b.command);
    }

    #[test]
    fn bounds_to_stdout() {
        let cfg = parse_args(["sdoflab", "bounds", "--n", "1", "--k-range", "0:2"]).unwrap();
        let (mut out, mut log) = (Vec::new(), Vec::new());
        let code = run(&cfg, &mut Sinks { out: &mut out, log: &mut log }).unwrap();
        assert_eq!(code, EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with(CURVE_CSV_HEADER));
        assert!(String::from_utf8(log).unwrap().starts_with("bounds N=1"));
    }

    #[test]
    fn counterexamples_exit_two() {
        let mut s = rank_lemma_trial(&RankLemmaParams::new(1, 1, 1, 0), 1, 0, RationalGrid::default()).unwrap();
        s.counterexamples.push(sdoflab::oracles::Counterexample {
            trial: 0,
            seed: 0,
            observed: "0".into(),
            expected: "1".into(),
            replay: serde_json::Value::Null,
        });
        let (mut out, mut log) = (Vec::new(), Vec::new());
        let code = finish_trials(&s, &OutputArg { output: None }, &mut Sinks { out: &mut out, log: &mut log }).unwrap();
        assert_eq!(code, EXIT_COUNTEREXAMPLE);
    }

    fn run_quiet(args: &[&str]) -> CliResult<(u8, String)> {
        let cfg = parse_args(std::iter::once("sdoflab").chain(args.iter().copied())).map_err(|e| CliError::Usage(e.to_string()))?;
        let (mut out, mut log) = (Vec::new(), Vec::new());
        let code = run(&cfg, &mut Sinks { out: &mut out, log: &mut log })?;
        Ok((code, String::from_utf8(out).unwrap()))
    }

    #[test]
    fn construct_then_verify_reports_three_halves() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().display().to_string();
        run_quiet(&["construct", "--n", "2", "--k", "1", "--seed", "42", "--output-dir", &d]).unwrap();
        let r = dir.path().join("realization.json").display().to_string();
        let s = dir.path().join("scheme.json").display().to_string();
        let (code, out) = run_quiet(&["verify", "--realization", &r, "--scheme", &s, "--format", "csv"]).unwrap();
        assert_eq!(code, EXIT_OK);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!((row[8], row[10], row[11]), ("0", "3/2", "true"));
    }

    #[test]
    fn timeshare_uses_both_transmitters() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().display().to_string();
        run_quiet(&["construct", "--n", "2", "--k", "2", "--seed", "3", "--timeshare", "--output-dir", &d]).unwrap();
        let r = dir.path().join("realization.json").display().to_string();
        let s = dir.path().join("scheme.json").display().to_string();
        let (_, out) = run_quiet(&["verify", "--realization", &r, "--scheme", &s]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["n_slots"].as_u64(), v["m1"].as_u64(), v["m2"].as_u64()), (Some(4), Some(2), Some(2)));
        assert_eq!(v["achieved_sum_sdof"], "1");
        assert_eq!(v["leakage_dims"], 0);
    }

    #[test]
    fn grid_denominator_flag() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().display().to_string();
        run_quiet(&["construct", "--n", "1", "--k", "1", "--seed", "5", "--grid-denom", "7", "--output-dir", &d]).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("realization.json")).unwrap()).unwrap();
        for key in ["h1", "h2", "g1", "g2"] {
            for m in v[key].as_array().unwrap() {
                for entry in m.as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()) {
                    if let Some((_, den)) = entry.as_str().unwrap().split_once('/') {
                        assert_eq!(den, "7");
                    }
                }
            }
        }
        assert!(matches!(run_quiet(&["bounds", "--n", "1", "--k-range", "0:1", "--grid-denom", "0"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn leakage_writes_sweep_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().display().to_string();
        assert_eq!(run_quiet(&["leakage", "--n", "1", "--k", "1", "--seed", "2", "--output-dir", &d]).unwrap().0, EXIT_OK);
        let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(sweep.lines().next(), Some(SWEEP_CSV_HEADER));
        assert_eq!(sweep.lines().count(), 6);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert!(summary["leakage_slope"].as_f64().unwrap() < 0.05);
        let short = run_quiet(&["leakage", "--n", "1", "--k", "1", "--seed", "2", "--power-grid", "1e2,1e3", "--output-dir", &d]);
        assert!(matches!(short, Err(CliError::Core(SdofError::InvalidPowerGrid(_)))));
    }

    #[test]
    fn leakage_requires_inputs() {
        let cfg = parse_args(["sdoflab", "leakage", "--n", "1", "--k", "1", "--output-dir", "x"]).unwrap();
        let (mut out, mut log) = (Vec::new(), Vec::new());
        assert!(matches!(run(&cfg, &mut Sinks { out: &mut out, log: &mut log }), Err(CliError::Usage(_))));
    }
}
