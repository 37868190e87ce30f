//! `rps`: command-line front end for permutation-set evidential reasoning.
//!
//! Exit status: 0 success, 2 parse error (including bad flags), 3 invariant
//! violation, 4 total conflict, 1 anything else.

mod table;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rps_evidence::classifier::{cross_validate, CvOptions, FusionMethod, TrainedClassifier};
use rps_evidence::data::{load_dataset, read_report, write_report, LabelColumn};
use rps_evidence::dst::{pignistic, MassFunction, ProbabilityDistribution};
use rps_evidence::reliability::{compute_reliabilities, ReliabilityReport};
use rps_evidence::rps::{discount_rps, enumerate_pes, fuse_sequential, Orientation, PermutationEvent, RandomPermutationSet};
use rps_evidence::transform::{internal_order_ranking, ordered_support, ranked_probability_transform, rps_transform, Lambda};
use rps_evidence::worked;
use rps_evidence::{Error, ErrorKind};

use table::{g6, render};

#[derive(Parser, Debug)]
#[command(name = "rps", version, about = "Random permutation set evidential reasoning")]
struct Cli {
    /// Dispersion factor of the ranked probability transformation, in [0, 1).
    #[arg(long, global = true, default_value_t = 0.67, value_parser = parse_lambda)]
    lambda: f64,
    /// Seed for fold assignment.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Number of cross-validation folds.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    folds: u64,
    /// Output file (a directory for `examples`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// More log output; repeat for debug level.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lift a mass function to a random permutation set and show its ranked probabilities.
    Transform {
        /// Mass function JSON: {"frame": [...], "masses": [{"focal": [...], "mass": m}]}.
        bpa: PathBuf,
        /// Print the permutation set as JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Fuse permutation sets sequentially.
    Fuse {
        /// Permutation set JSON files, fused in the order given.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = OrderArg::Left)]
        order: OrderArg,
        /// Reliability report JSON; sources are discounted and fused most reliable first.
        #[arg(long)]
        reliability: Option<PathBuf>,
        /// Print the fused set as JSON instead of tables.
        #[arg(long)]
        json: bool,
    },
    /// Cross-validate the fusion classifier on a CSV dataset.
    Classify {
        #[arg(long)]
        dataset: PathBuf,
        /// Label column: `last`, a 0-based index, or a header name.
        #[arg(long, default_value = "last")]
        label_column: LabelColumn,
        #[arg(long, value_enum, default_value_t = MethodArg::Rps)]
        method: MethodArg,
    },
    /// Source reliabilities, from a dataset (one source per feature) or from mass function files.
    Reliability {
        /// CSV dataset; every feature is a source, trained on all rows.
        #[arg(long, conflicts_with = "sources")]
        dataset: Option<PathBuf>,
        #[arg(long, default_value = "last")]
        label_column: LabelColumn,
        /// One JSON file per source holding a mass function or an array of them (one per sample).
        #[arg(required_unless_present = "dataset")]
        sources: Vec<PathBuf>,
        /// True label of every sample, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "dataset")]
        truth: Vec<String>,
    },
    /// Regenerate the worked examples and reliability sweeps.
    Examples,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Rps,
    Dempster,
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Lambda::new(v).map(Lambda::value).map_err(|e| e.to_string())
}

/// CLI-level failure: a library error or a plain message with its own status.
enum Failure {
    Lib(Error),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Parse => 2,
                ErrorKind::Invariant => 3,
                ErrorKind::Conflict => 4,
                ErrorKind::Other => 1,
            })
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    let lambda = Lambda::new(cli.lambda)?;
    match &cli.command {
        Command::Transform { bpa, json } => transform(cli, bpa, lambda, *json),
        Command::Fuse {
            inputs,
            order,
            reliability,
            json,
        } => fuse(cli, inputs, *order, reliability.as_deref(), lambda, *json),
        Command::Classify {
            dataset,
            label_column,
            method,
        } => classify(cli, dataset, label_column, *method, lambda),
        Command::Reliability {
            dataset,
            label_column,
            sources,
            truth,
        } => reliability(cli, dataset.as_deref(), label_column, sources, truth, lambda),
        Command::Examples => examples(cli, lambda),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str, force: bool) -> CliResult {
    if path.exists() && !force {
        return Err(Error::OutputExists(path.to_path_buf()).into());
    }
    fs::write(path, text)?;
    Ok(())
}

fn pmf_table(mu: &RandomPermutationSet) -> String {
    let rows: Vec<Vec<String>> = mu
        .iter()
        .map(|(e, m)| vec![e.display(mu.frame()), g6(m)])
        .collect();
    render(&["event", "mass"], &rows)
}

fn distribution_table(p: &ProbabilityDistribution, heading: &str) -> String {
    let rows: Vec<Vec<String>> = p.iter().map(|(l, v)| vec![l.to_string(), g6(v)]).collect();
    render(&["label", heading], &rows)
}

fn transform(cli: &Cli, path: &Path, lambda: Lambda, json: bool) -> CliResult {
    let m = MassFunction::from_json_str(&read_text(path)?)?;
    let mu = rps_transform(&m)?;
    if let Some(out) = &cli.out {
        write_text(out, &(mu.to_json_string() + "\n"), cli.force)?;
    }
    if json {
        println!("{}", mu.to_json_string());
        return Ok(());
    }
    let rpt = ranked_probability_transform(&mu, lambda);
    print!("{}", pmf_table(&mu));
    println!();
    print!("{}", distribution_table(&rpt, &format!("Rpt (lambda={lambda})")));
    Ok(())
}

fn fuse(
    cli: &Cli,
    inputs: &[PathBuf],
    order: OrderArg,
    reliability: Option<&Path>,
    lambda: Lambda,
    json: bool,
) -> CliResult {
    let mut sources = Vec::with_capacity(inputs.len());
    for path in inputs {
        sources.push(RandomPermutationSet::from_json_str(&read_text(path)?)?);
    }
    if let Some(path) = reliability {
        let report: ReliabilityReport = read_report(path)?;
        if report.sources() != sources.len() {
            return Err(Error::Shape(format!(
                "reliability report covers {} sources, {} given",
                report.sources(),
                sources.len()
            ))
            .into());
        }
        let mut discounted = Vec::with_capacity(sources.len());
        for &k in &report.fusion_order {
            discounted.push(discount_rps(&sources[k], report.reliability[k])?);
        }
        sources = discounted;
    }
    let orientation = match order {
        OrderArg::Left => Orientation::Left,
        OrderArg::Right => Orientation::Right,
    };
    let fused = fuse_sequential(&sources, orientation)?.expect("at least two inputs");
    if let Some(out) = &cli.out {
        write_text(out, &(fused.to_json_string() + "\n"), cli.force)?;
    }
    if json {
        println!("{}", fused.to_json_string());
        return Ok(());
    }
    print!("{}", pmf_table(&fused));
    println!();
    print!(
        "{}",
        distribution_table(&ranked_probability_transform(&fused, lambda), &format!("Rpt (lambda={lambda})"))
    );
    Ok(())
}

fn classify(cli: &Cli, path: &Path, label: &LabelColumn, method: MethodArg, lambda: Lambda) -> CliResult {
    let dataset = load_dataset(path, label)?;
    let options = CvOptions {
        folds: cli.folds as usize,
        seed: cli.seed,
        lambda,
        method: match method {
            MethodArg::Rps => FusionMethod::Rps,
            MethodArg::Dempster => FusionMethod::Dempster,
        },
    };
    let report = cross_validate(&dataset, &options)?;

    println!(
        "dataset {}: {} samples, {} features, {} classes",
        dataset.name,
        dataset.n_samples(),
        dataset.n_features(),
        dataset.classes()?.len()
    );
    println!();
    let mut header = vec!["fold".to_string()];
    header.extend(dataset.feature_names.iter().map(|f| format!("R({f})")));
    header.push("accuracy".into());
    let rows: Vec<Vec<String>> = report
        .per_fold_accuracy
        .iter()
        .zip(&report.per_source_reliability)
        .enumerate()
        .map(|(fold, (acc, rel))| {
            let mut row = vec![fold.to_string()];
            row.extend(rel.iter().map(|&r| g6(r)));
            row.push(g6(*acc));
            row
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    print!("{}", render(&header_refs, &rows));
    println!();
    println!("mean accuracy {} (std {})", g6(report.mean), g6(report.std));

    if let Some(out) = &cli.out {
        write_report(&report, out, cli.force)?;
    }
    Ok(())
}

fn reliability(
    cli: &Cli,
    dataset: Option<&Path>,
    label: &LabelColumn,
    sources: &[PathBuf],
    truth: &[String],
    lambda: Lambda,
) -> CliResult {
    let (names, report) = match dataset {
        Some(path) => {
            let d = load_dataset(path, label)?;
            let classes = d.classes()?;
            let labels = d.label_indices(&classes)?;
            let clf = TrainedClassifier::train(&d.features, &labels, &classes, lambda, FusionMethod::Rps)?;
            (d.feature_names.clone(), clf.reliabilities)
        }
        None => {
            let mut per_source = Vec::with_capacity(sources.len());
            for path in sources {
                let text = read_text(path)?;
                // Parse first as JSON so that a malformed file reports a parse
                // error and a well-formed but invalid mass function an invariant one.
                let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
                let parsed = match value {
                    serde_json::Value::Array(items) => items
                        .into_iter()
                        .map(|v| MassFunction::from_json_str(&v.to_string()))
                        .collect::<Result<Vec<_>, _>>()?,
                    other => vec![MassFunction::from_json_str(&other.to_string())?],
                };
                per_source.push(parsed);
            }
            let report = compute_reliabilities(&per_source, truth, lambda)?;
            let names = sources.iter().map(|p| p.display().to_string()).collect();
            (names, report)
        }
    };
    let mut rank = vec![0; report.sources()];
    for (pos, &k) in report.fusion_order.iter().enumerate() {
        rank[k] = pos + 1;
    }
    let rows: Vec<Vec<String>> = (0..report.sources())
        .map(|k| vec![names[k].clone(), g6(report.dc[k]), g6(report.reliability[k]), rank[k].to_string()])
        .collect();
    print!("{}", render(&["source", "DC", "reliability", "rank"], &rows));
    if let Some(out) = &cli.out {
        write_report(&report, out, cli.force)?;
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn examples(cli: &Cli, lambda: Lambda) -> CliResult {
    let mut s = String::new();
    let f = worked::dna();

    writeln!(s, "== Internal order rankings ==").unwrap();
    let rows: Vec<Vec<String>> = enumerate_pes(&f)?
        .iter()
        .map(|e| {
            let ranking = internal_order_ranking(e, &f)?;
            let mut row = vec![e.display(&f)];
            row.extend(ranking.render(&f));
            Ok(row)
        })
        .collect::<Result<_, Error>>()?;
    s.push_str(&render(&["event", "b1", "b2", "b3"], &rows));

    writeln!(s, "\n== Ordered support degree, BetP = (0.2, 0.3, 0.5) ==").unwrap();
    let betp = ProbabilityDistribution::new(f.clone(), vec![0.2, 0.3, 0.5])?;
    for labels in [&["N", "D"][..], &["A", "D", "N"][..]] {
        let e = PermutationEvent::from_labels(&f, labels)?;
        writeln!(s, "Sord{} = {}", e.display(&f), g6(ordered_support(&e, &betp))).unwrap();
    }

    writeln!(s, "\n== Transformation of m(D)=0.1, m(N)=0.2, m(A)=0.2, m(N,A)=0.2, m(D,N,A)=0.3 ==").unwrap();
    let m = worked::table2_bpa();
    s.push_str(&distribution_table(&pignistic(&m), "BetP"));
    writeln!(s).unwrap();
    let mu = rps_transform(&m)?;
    s.push_str(&pmf_table(&mu));
    writeln!(s).unwrap();
    s.push_str(&distribution_table(
        &ranked_probability_transform(&mu, lambda),
        &format!("Rpt (lambda={lambda})"),
    ));

    writeln!(s, "\n== Distances to (x1):1 with RPS_1 = {{(x1):0.4, (x1,x2):0.2, (A):0.4}} ==").unwrap();
    let table = worked::distance_table(lambda)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| vec![format!("({})", r.event.join(", ")), g6(r.j_distance), g6(r.rps_distance)])
        .collect();
    s.push_str(&render(&["A", "J distance", "RPS distance"], &rows));
    let d: Vec<f64> = table.iter().map(|r| r.rps_distance).collect();
    let equal = worked::EQUAL_DISTANCE_PAIRS.iter().all(|&(a, b)| (d[a] - d[b]).abs() <= 1e-12);
    let ordered = worked::ORDERED_GROUPS.windows(2).all(|w| {
        w[0].iter().map(|&i| d[i]).fold(f64::NEG_INFINITY, f64::max)
            < w[1].iter().map(|&i| d[i]).fold(f64::INFINITY, f64::min)
    });
    writeln!(s, "equality pairs: {}", pass(equal)).unwrap();
    writeln!(s, "group ordering: {}", pass(ordered)).unwrap();

    let first = worked::reliability_sweep(worked::sweep_one_source, lambda)?;
    let second = worked::reliability_sweep(worked::sweep_two_source, lambda)?;
    let r1: Vec<f64> = first.iter().map(|p| p.r_m1()).collect();
    let r2: Vec<f64> = second.iter().map(|p| p.r_m1()).collect();
    writeln!(
        s,
        "\n== Reliability sweep 1: m1(x1)=eta, m1(x3)=0.7-eta, m1(x2,x3)=0.2, m1(x1,x2,x3)=0.1 =="
    )
    .unwrap();
    writeln!(s, "R(m1) nondecreasing in eta: {}", pass(worked::is_nondecreasing(&r1))).unwrap();
    writeln!(s, "R(m1) range: {}", g6(worked::spread(&r1))).unwrap();
    writeln!(
        s,
        "\n== Reliability sweep 2: m1(x1)=0.1, m1(x3)=eta, m1(x2,x3)=0.7-eta, m1(x1,x2,x3)=0.2 =="
    )
    .unwrap();
    writeln!(s, "R(m1) range: {}", g6(worked::spread(&r2))).unwrap();
    writeln!(
        s,
        "range smaller than sweep 1: {}",
        pass(worked::spread(&r2) < worked::spread(&r1))
    )
    .unwrap();

    let csv1 = worked::sweep_csv(&first);
    let csv2 = worked::sweep_csv(&second);
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (name, csv) in [("sweep1.csv", &csv1), ("sweep2.csv", &csv2)] {
                let path = dir.join(name);
                write_text(&path, csv, cli.force)?;
                writeln!(s, "wrote {}", path.display()).unwrap();
            }
        }
        None => {
            writeln!(s, "\n== sweep1.csv ==").unwrap();
            s.push_str(&csv1);
            writeln!(s, "\n== sweep2.csv ==").unwrap();
            s.push_str(&csv2);
        }
    }
    print!("{s}");
    Ok(())
}
