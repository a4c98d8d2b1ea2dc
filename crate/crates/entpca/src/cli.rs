//! The `entpca` command line.
//!
//! Exit codes: 0 success, 1 numeric failure or output error, 2 contract
//! violation (bad arguments, out-of-range indices, wrong vector lengths),
//! 3 unreadable or malformed input files.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use entpca_core::estimators::{estimate_cols, estimate_query, exact_distance_cols, exact_distance_query};
use entpca_core::pca::{fit, project};
use entpca_core::rayleigh::{rq_estimate, rq_exact};
use entpca_core::{Dataset, PcaModel, Population, Preprocessing, Space};

use crate::bench::{self, SweepConfig, STREAM_RQ_COLUMN, STREAM_RQ_ROW};
use crate::config::RunConfig;
use crate::error::{contract, Error, Result};
use crate::io::{load_csv, load_model_file, read_numeric_rows_from, save_model_file, Orientation};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "entpca", version, about = "PCA distance and Rayleigh-quotient estimates with residual-energy corrections")]
pub struct Cli {
    /// Worker threads for bench and kmatch. Results do not depend on it.
    #[arg(long, global = true, env = "ENTPCA_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model and write it to a file.
    Fit(FitArgs),
    /// Estimate squared distances between columns or from query vectors.
    Dist(DistArgs),
    /// Estimate Rayleigh quotients.
    Rq(RqArgs),
    /// Run a benchmark config and print the JSON report.
    Bench(BenchArgs),
    /// Find the rank at which classic and lower match ent's error.
    Kmatch(KmatchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Column,
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PopulationArg {
    Pairs,
    Queries,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV dataset.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Orientation::ItemsAsRows)]
    orientation: Orientation,
    /// The CSV starts with a header line.
    #[arg(long)]
    header: bool,
}

impl DataArgs {
    fn load(&self) -> Result<Option<Dataset>> {
        self.input.as_deref().map(|p| load_csv(p, self.orientation, self.header)).transpose()
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    k: usize,
    /// Subtract row means before fitting.
    #[arg(long)]
    center: bool,
    #[arg(long)]
    output_model: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("targets").required(true).args(["pairs", "all_pairs", "query_file"]))]
struct DistArgs {
    #[arg(long)]
    model: PathBuf,
    /// Column pair `i,j`; repeatable.
    #[arg(long, value_parser = parse_pair)]
    pairs: Vec<(usize, usize)>,
    /// Every pair `i < j`.
    #[arg(long)]
    all_pairs: bool,
    /// CSV with one query vector per line.
    #[arg(long)]
    query_file: Option<PathBuf>,
    /// Dataset the model was fitted on; adds an `exact` column.
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("vectors").required(true).args(["vectors_file", "random"]))]
struct RqArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    space: SpaceArg,
    /// CSV with one vector per line.
    #[arg(long)]
    vectors_file: Option<PathBuf>,
    /// Number of standard Gaussian vectors to draw.
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset the model was fitted on; adds an `exact` column.
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the flat mean/std table as CSV.
    #[arg(long)]
    table_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KmatchArgs {
    /// JSON run config; its dataset, center, seed, num_queries and subsample are used.
    #[arg(long)]
    config: PathBuf,
    /// Rank at which ent's error is measured. Defaults to the config's kmatch_target_k.
    #[arg(long)]
    target_k: Option<usize>,
    #[arg(long, value_enum, default_value_t = PopulationArg::Pairs)]
    population: PopulationArg,
    /// jsonl prints the whole result on one line; csv prints the error curve.
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let idx = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((idx(a)?, idx(b)?))
}

enum Cell {
    Int(usize),
    Num(f64),
}

/// Row-by-row table output. Floats carry 17 significant digits.
struct Table<'a> {
    out: &'a mut dyn Write,
    format: Format,
    header_done: bool,
}

impl<'a> Table<'a> {
    fn new(out: &'a mut dyn Write, format: Format) -> Self {
        Self { out, format, header_done: false }
    }

    fn row(&mut self, cells: &[(&str, Cell)]) -> Result<()> {
        let text = |c: &Cell| match c {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
        };
        let line = match self.format {
            Format::Jsonl => {
                let fields: Vec<String> = cells.iter().map(|(k, v)| format!("\"{k}\":{}", text(v))).collect();
                format!("{{{}}}", fields.join(","))
            }
            Format::Csv => {
                if !self.header_done {
                    let names: Vec<&str> = cells.iter().map(|(k, _)| *k).collect();
                    writeln!(self.out, "{}", names.join(",")).map_err(Error::Write)?;
                    self.header_done = true;
                }
                cells.iter().map(|(_, v)| text(v)).collect::<Vec<_>>().join(",")
            }
        };
        writeln!(self.out, "{line}").map_err(Error::Write)
    }
}

fn check_same_shape(data: &Dataset, model: &PcaModel) -> Result<()> {
    if (data.m(), data.n()) != (model.m(), model.n()) {
        return Err(contract(format!(
            "dataset is {}x{} but the model is {}x{}",
            data.m(),
            data.n(),
            model.m(),
            model.n()
        )));
    }
    Ok(())
}

fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let data = args.data.load()?.ok_or_else(|| contract("fit needs --input"))?;
    let model = fit(&data, args.k, args.center)?;
    save_model_file(&model, &args.output_model)?;
    let sum_z: f64 = model.z().iter().sum();
    writeln!(
        out,
        "{{\"m\":{},\"n\":{},\"k\":{},\"center\":{},\"sum_z\":{:.16e},\"delta\":{:.16e}}}",
        model.m(),
        model.n(),
        model.k(),
        args.center,
        sum_z,
        model.delta()
    )
    .map_err(Error::Write)
}

fn cmd_dist(args: &DistArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model_file(&args.model)?;
    let data = args.data.load()?;
    if let Some(d) = &data {
        check_same_shape(d, &model)?;
    }
    let mut table = Table::new(out, args.format);

    if let Some(path) = &args.query_file {
        let queries = read_numeric_rows_from(path, false)?;
        for (q_idx, x) in queries.iter().enumerate() {
            let q = project(&model, x)?;
            for j in 0..model.n() {
                let e = estimate_query(&model, &q, j)?;
                let mut cells = vec![
                    ("query", Cell::Int(q_idx)),
                    ("j", Cell::Int(j)),
                    ("classic", Cell::Num(e.classic)),
                    ("lower", Cell::Num(e.lower)),
                    ("ent", Cell::Num(e.ent)),
                ];
                if let Some(d) = &data {
                    cells.push(("exact", Cell::Num(exact_distance_query(d, x, j)?)));
                }
                table.row(&cells)?;
            }
        }
        return Ok(());
    }

    let pairs: Vec<(usize, usize)> = if args.all_pairs {
        let n = model.n();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    } else {
        args.pairs.clone()
    };
    for (i, j) in pairs {
        let e = estimate_cols(&model, i, j)?;
        let mut cells = vec![
            ("i", Cell::Int(i)),
            ("j", Cell::Int(j)),
            ("classic", Cell::Num(e.classic)),
            ("lower", Cell::Num(e.lower)),
            ("ent", Cell::Num(e.ent)),
        ];
        if let Some(d) = &data {
            cells.push(("exact", Cell::Num(exact_distance_cols(d, i, j)?)));
        }
        table.row(&cells)?;
    }
    Ok(())
}

fn cmd_rq(args: &RqArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_model_file(&args.model)?;
    let space = match args.space {
        SpaceArg::Column => Space::Column,
        SpaceArg::Row => Space::Row,
    };
    let data = match args.data.load()? {
        Some(d) => {
            check_same_shape(&d, &model)?;
            // a centered model approximates the centered data
            Some(if model.preprocessing() == Preprocessing::Centered { d.centered() } else { d })
        }
        None => None,
    };
    let vectors = match (&args.vectors_file, args.random) {
        (Some(path), _) => read_numeric_rows_from(path, false)?,
        (None, Some(count)) => {
            let seed = args.seed.ok_or_else(|| contract("--random needs --seed"))?;
            let (stream, len) = match space {
                Space::Column => (STREAM_RQ_COLUMN, model.m()),
                Space::Row => (STREAM_RQ_ROW, model.n()),
            };
            bench::gaussian_vectors(seed, stream, count, len)
        }
        (None, None) => return Err(contract("need --vectors-file or --random")),
    };

    let mut table = Table::new(out, args.format);
    for (idx, v) in vectors.iter().enumerate() {
        let est = rq_estimate(&model, v, space)?;
        let mut cells = vec![("vector", Cell::Int(idx)), ("classic", Cell::Num(est.classic)), ("ent", Cell::Num(est.ent))];
        if let Some(d) = &data {
            cells.push(("exact", Cell::Num(rq_exact(d, v, space)?)));
        }
        table.row(&cells)?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(Error::Write)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let report = report::run(&cfg)?;
    let json = report.to_json();
    match &args.output {
        Some(path) => write_file(path, json.as_bytes())?,
        None => out.write_all(json.as_bytes()).map_err(Error::Write)?,
    }
    if let Some(path) = &args.table_csv {
        let mut buf = Vec::new();
        report::write_table_csv(&report.results, &mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(())
}

fn cmd_kmatch(args: &KmatchArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let target_k = args
        .target_k
        .or(cfg.kmatch_target_k)
        .ok_or_else(|| contract("need --target-k or kmatch_target_k in the config"))?;
    let data = load_csv(&cfg.dataset_path(), cfg.orientation, cfg.has_header)?;
    let population = match args.population {
        PopulationArg::Pairs => Population::Pairs,
        PopulationArg::Queries => Population::Queries,
    };
    let sweep = SweepConfig { center: cfg.center, num_queries: cfg.num_queries, seed: cfg.seed, subsample: cfg.subsample };
    let result = bench::k_match_sweep(&data, target_k, population, &sweep)?;
    match args.format {
        Format::Jsonl => {
            let line = serde_json::to_string(&result).expect("result is always serializable");
            writeln!(out, "{line}").map_err(Error::Write)
        }
        Format::Csv => {
            let mut table = Table::new(out, Format::Csv);
            for p in &result.curve {
                table.row(&[
                    ("k", Cell::Int(p.k)),
                    ("classic", Cell::Num(p.classic)),
                    ("lower", Cell::Num(p.lower)),
                    ("ent", Cell::Num(p.ent)),
                ])?;
            }
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let work = |out: &mut dyn Write| match &cli.command {
        Command::Fit(a) => cmd_fit(a, out),
        Command::Dist(a) => cmd_dist(a, out),
        Command::Rq(a) => cmd_rq(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Kmatch(a) => cmd_kmatch(a, out),
    };
    match cli.threads {
        None => work(out),
        Some(0) => Err(contract("--threads must be at least 1")),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| contract(format!("cannot start {t} threads: {e}")))?;
            let mut buf = Vec::new();
            let outcome = pool.install(|| work(&mut buf));
            out.write_all(&buf).map_err(Error::Write)?;
            outcome
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out).and_then(|()| out.flush().map_err(Error::Write)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("3,4"), Ok((3, 4)));
        assert_eq!(parse_pair(" 0 , 1"), Ok((0, 1)));
        assert!(parse_pair("3").is_err());
        assert!(parse_pair("a,1").is_err());
    }

    #[test]
    fn table_formats() {
        let mut buf = Vec::new();
        let mut t = Table::new(&mut buf, Format::Csv);
        t.row(&[("i", Cell::Int(1)), ("x", Cell::Num(0.1))]).unwrap();
        t.row(&[("i", Cell::Int(2)), ("x", Cell::Num(2.0))]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,x\n1,1.0000000000000001e-1\n2,2.0000000000000000e0\n");

        let mut buf = Vec::new();
        Table::new(&mut buf, Format::Jsonl).row(&[("i", Cell::Int(1)), ("x", Cell::Num(0.5))]).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["x"], 0.5);
    }

    #[test]
    fn printed_values_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02214076e23] {
            let s = format!("{x:.16e}");
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn usage_errors_exit_2() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["entpca", "fit", "--bogus"], &mut out, &mut err), 2);
        assert_eq!(run(["entpca", "rq", "--model", "m", "--space", "row", "--random", "3"], &mut out, &mut err), 2);
        assert_eq!(run(["entpca", "--help"], &mut out, &mut err), 0);
    }
}
