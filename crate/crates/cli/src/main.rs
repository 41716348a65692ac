use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontalign::align::{write_diagnostics_jsonl, Aligner, Config};
use ontalign::eval::{
    evaluate_pairs, read_scored_tsv, threshold_sweep, top_per_first, write_sweep_csv, GoldStandard,
};
use ontalign::functionality::{FunctionalityStrategy, FunctionalityTable};
use ontalign::instances::NegativeReading;
use ontalign::literal::LiteralSimKind;
use ontalign::schema::Truncation;
use ontalign::store::{
    load_path, write_stats_csv, write_triples, Format, LoadOptions, Ontology, RawTriple,
    StoreConfig,
};
use ontalign::synthetic::{people, restaurants, twin, PeopleSpec, RestaurantSpec, TwinSpec};

#[derive(Parser)]
#[command(
    name = "ontalign",
    version,
    about = "Probabilistic alignment of two ontologies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align two ontologies and write the scored tables.
    Align(AlignArgs),
    /// Compare the top-scored pair per entity against a gold standard.
    Eval(EvalArgs),
    /// Count retained rows of a scored table per threshold.
    Sweep(SweepArgs),
    /// Generate synthetic ontologies with known alignments.
    Synth(SynthArgs),
    /// Entity, statement and relation counts as CSV.
    Stats(StatsArgs),
    /// Relation functionalities as CSV.
    Functionality(FunctionalityArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ntriples,
    Tsv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Ntriples => Format::NTriples,
            FormatArg::Tsv => Format::Tsv,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Skip unparsable lines instead of failing.
    #[arg(long)]
    skip_malformed: bool,
    /// Do not materialize subclass and subproperty consequences.
    #[arg(long)]
    no_closure: bool,
}

#[derive(Args)]
struct AlignArgs {
    #[arg(long)]
    o1: PathBuf,
    #[arg(long)]
    o2: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.1)]
    theta: f64,
    /// Iteration-1 inclusion constant, when it should differ from theta.
    #[arg(long)]
    bootstrap_theta: Option<f64>,
    #[arg(long = "max-iters", default_value_t = 10)]
    max_iterations: usize,
    #[arg(long)]
    negative_evidence: bool,
    /// Use the previous pair score in the negative-evidence factor.
    #[arg(long, requires = "negative_evidence")]
    pair_negative: bool,
    #[arg(long, default_value = "exact", value_parser = ["exact", "normalized", "edit"])]
    literal_sim: String,
    /// Minimum edit similarity (defaults to theta).
    #[arg(long)]
    edit_cutoff: Option<f64>,
    #[arg(long, default_value = "harmonic", value_parser = ["harmonic", "pair-ratio", "arg-ratio", "arithmetic-mean"])]
    functionality: String,
    #[arg(long, default_value_t = 10_000)]
    pair_limit: usize,
    /// Sample truncated relations with this seed instead of keeping the first pairs.
    #[arg(long)]
    sample_seed: Option<u64>,
    #[arg(long, default_value_t = 0.01)]
    convergence_fraction: f64,
    /// Score against all previous equalities, not only the maximal assignment.
    #[arg(long)]
    full_equalities: bool,
    #[arg(long)]
    dampening: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the tables of every iteration.
    #[arg(long)]
    dump_iterations: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// A table whose first column is the first-ontology entity and whose
    /// last column is the score.
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    thresholds: Vec<f64>,
    /// Gold pairs used to label rows (first column, second-to-last column).
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    People,
    Restaurants,
}

#[derive(Args)]
struct SynthArgs {
    /// Ontology to clone under fresh identifiers.
    #[arg(
        long = "in",
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    input: Option<PathBuf>,
    /// Build a synthetic dataset instead of cloning.
    #[arg(long, value_enum)]
    generate: Option<Generator>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, default_value_t = 0.0)]
    drop_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    perturb_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "http://twin.example.org/")]
    prefix: String,
    /// Persons for the people generator.
    #[arg(long, default_value_t = 800)]
    size: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct FunctionalityArgs {
    #[arg(long = "in")]
    input_file: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "harmonic", value_parser = ["harmonic", "pair-ratio", "arg-ratio", "arithmetic-mean"])]
    strategy: String,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<ontalign::Error> for Failure {
    fn from(e: ontalign::Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn guess_format(path: &Path, explicit: Option<FormatArg>) -> Result<Format, Failure> {
    if let Some(f) = explicit {
        return Ok(f.into());
    }
    let name = path.to_string_lossy();
    let name = name.strip_suffix(".gz").unwrap_or(&name);
    if name.ends_with(".tsv") || name.ends_with(".tab") {
        Ok(Format::Tsv)
    } else if name.ends_with(".nt") || name.ends_with(".ntriples") {
        Ok(Format::NTriples)
    } else {
        Err(Failure::input(format!(
            "{}: cannot guess the format, pass --format",
            path.display()
        )))
    }
}

fn load(path: &Path, input: &InputArgs) -> Result<(Ontology, Format), Failure> {
    let format = guess_format(path, input.format)?;
    let opts = LoadOptions {
        skip_malformed: input.skip_malformed,
    };
    let (raw, report) = load_path(path, format, opts).map_err(|e| match e {
        ontalign::Error::Io(io) => Failure::input(format!("{}: {io}", path.display())),
        other => Failure::input(format!("{}: {other}", path.display())),
    })?;
    if report.skipped > 0 {
        eprintln!(
            "{}: skipped {} malformed lines (first at line {})",
            path.display(),
            report.skipped,
            report.first_skipped_line.unwrap_or(0)
        );
    }
    let config = StoreConfig {
        closure: !input.no_closure,
        ..StoreConfig::default()
    };
    Ok((Ontology::finalize(raw, &config), format))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn read_gold(path: &Path) -> Result<GoldStandard, Failure> {
    let file = File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    GoldStandard::read_tsv(BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn run_align(args: AlignArgs) -> Outcome {
    let config = Config {
        theta: args.theta,
        bootstrap_theta: args.bootstrap_theta,
        pair_limit: args.pair_limit,
        max_iterations: args.max_iterations,
        negative_evidence: args.negative_evidence,
        negative_reading: if args.pair_negative {
            NegativeReading::PairEquality
        } else {
            NegativeReading::ObjectEquality
        },
        literal_sim: args.literal_sim.parse::<LiteralSimKind>()?,
        edit_cutoff: args.edit_cutoff,
        functionality_strategy: args.functionality.parse::<FunctionalityStrategy>()?,
        convergence_fraction: args.convergence_fraction,
        use_full_equalities: args.full_equalities,
        dampening: args.dampening,
        truncation: args
            .sample_seed
            .map_or(Truncation::First, Truncation::Seeded),
        threads: args.threads,
    };
    config.validate()?;
    let (o1, _) = load(&args.o1, &args.input)?;
    let (o2, _) = load(&args.o2, &args.input)?;
    fs::create_dir_all(&args.out)?;

    let out = args.out.clone();
    let mut dump_error: Option<io::Error> = None;
    let mut aligner = Aligner::new(config);
    if args.dump_iterations {
        let (o1, o2) = (&o1, &o2);
        let dump_error = &mut dump_error;
        aligner = aligner.on_iteration(move |snap| {
            let n = snap.diagnostics.iteration;
            let result = (|| -> io::Result<()> {
                let mut w = BufWriter::new(File::create(out.join(format!("instances.{n}.tsv")))?);
                snap.equalities.write_tsv(&mut w, o1, o2)?;
                w.flush()?;
                let mut w = BufWriter::new(File::create(out.join(format!("relations.{n}.tsv")))?);
                snap.subrelations.write_tsv(&mut w, o1, o2)?;
                w.flush()
            })();
            if let Err(e) = result {
                dump_error.get_or_insert(e);
            }
        });
    }
    let result = aligner.run(&o1, &o2)?;
    if let Some(e) = dump_error {
        return Err(e.into());
    }

    let mut w = create(&args.out.join("instances.tsv"))?;
    result.equalities.write_tsv(&mut w, &o1, &o2)?;
    w.flush()?;
    let mut w = create(&args.out.join("relations.tsv"))?;
    result.subrelations.write_tsv(&mut w, &o1, &o2)?;
    w.flush()?;
    let mut w = create(&args.out.join("classes.tsv"))?;
    result.subclasses.write_tsv(&mut w, &o1, &o2)?;
    w.flush()?;
    let mut w = create(&args.out.join("diagnostics.jsonl"))?;
    write_diagnostics_jsonl(&mut w, &result.diagnostics)?;
    w.flush()?;

    eprintln!(
        "{} iterations ({}), {} instances assigned, {} relation and {} class scores",
        result.diagnostics.len(),
        if result.converged {
            "converged"
        } else {
            "not converged"
        },
        result.assignment.len(),
        result.subrelations.len(),
        result.subclasses.len()
    );
    Ok(())
}

fn run_eval(args: EvalArgs) -> Outcome {
    let gold = read_gold(&args.gold)?;
    let file = File::open(&args.pred)
        .map_err(|e| Failure::input(format!("{}: {e}", args.pred.display())))?;
    let rows = read_scored_tsv(BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", args.pred.display())))?;
    let top = top_per_first(&rows);
    let metrics = evaluate_pairs(
        top.iter().map(|r| (r.first.as_str(), r.second.as_str())),
        &gold,
    );
    let mut stdout = io::stdout().lock();
    if args.json {
        serde_json::to_writer(&mut stdout, &metrics).map_err(io::Error::from)?;
        writeln!(stdout)?;
    } else {
        writeln!(stdout, "{metrics}")?;
    }
    if gold.is_empty() {
        eprintln!("warning: empty gold standard, recall is undefined");
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Outcome {
    let file = File::open(&args.table)
        .map_err(|e| Failure::input(format!("{}: {e}", args.table.display())))?;
    let rows = read_scored_tsv(BufReader::new(file))
        .map_err(|e| Failure::input(format!("{}: {e}", args.table.display())))?;
    let labels = match &args.gold {
        Some(path) => {
            let gold = read_gold(path)?;
            Some(
                rows.iter()
                    .map(|r| gold.contains(&r.first, &r.second))
                    .collect::<Vec<_>>(),
            )
        }
        None => None,
    };
    let sweep = threshold_sweep(&rows, labels.as_deref(), &args.thresholds)?;
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_sweep_csv(&mut w, &sweep)?;
            w.flush()?;
        }
        None => write_sweep_csv(io::stdout().lock(), &sweep)?,
    }
    Ok(())
}

fn write_dataset(path: &Path, triples: &[RawTriple], format: Format) -> Outcome {
    let mut w = create(path)?;
    write_triples(&mut w, triples, format)?;
    w.flush()?;
    Ok(())
}

fn write_gold(path: &Path, gold: &GoldStandard) -> Outcome {
    let mut w = create(path)?;
    gold.write_tsv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::NTriples => "nt",
        Format::Tsv => "tsv",
    }
}

fn run_synth(args: SynthArgs) -> Outcome {
    for (name, v) in [
        ("drop-rate", args.drop_rate),
        ("perturb-rate", args.perturb_rate),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Failure::input(format!(
                "--{name} must lie in [0, 1], got {v}"
            )));
        }
    }
    fs::create_dir_all(&args.out)?;
    if let Some(generator) = args.generate {
        let format = args.format.map_or(Format::NTriples, Format::from);
        let ext = extension(format);
        match generator {
            Generator::People => {
                let spec = PeopleSpec {
                    persons: args.size,
                    seed: args.seed,
                    ..PeopleSpec::default()
                };
                write_dataset(
                    &args.out.join(format!("people.{ext}")),
                    &people(&spec),
                    format,
                )?;
            }
            Generator::Restaurants => {
                let pair = restaurants(&RestaurantSpec {
                    seed: args.seed,
                    ..RestaurantSpec::default()
                })?;
                write_dataset(&args.out.join(format!("first.{ext}")), &pair.first, format)?;
                write_dataset(
                    &args.out.join(format!("second.{ext}")),
                    &pair.second,
                    format,
                )?;
                write_gold(&args.out.join("gold.tsv"), &pair.gold)?;
            }
        }
        return Ok(());
    }

    let input = args.input.expect("clap enforces --in or --generate");
    let input_args = InputArgs {
        format: args.format,
        skip_malformed: false,
        no_closure: false,
    };
    let (source, format) = load(&input, &input_args)?;
    let spec = TwinSpec {
        drop_rate: args.drop_rate,
        perturb_rate: args.perturb_rate,
        seed: args.seed,
        prefix: args.prefix,
    };
    let t = twin(&source, &spec)?;
    write_dataset(
        &args.out.join(format!("twin.{}", extension(format))),
        &t.triples,
        format,
    )?;
    write_gold(&args.out.join("gold.tsv"), &t.instances)?;
    write_gold(&args.out.join("relations_gold.tsv"), &t.relations)?;
    write_gold(&args.out.join("classes_gold.tsv"), &t.classes)?;
    eprintln!(
        "{} statements, {} instance, {} relation and {} class gold pairs",
        t.triples.len(),
        t.instances.len(),
        t.relations.len(),
        t.classes.len()
    );
    Ok(())
}

fn run_stats(args: StatsArgs) -> Outcome {
    let mut loaded = Vec::new();
    for path in &args.files {
        loaded.push((path.display().to_string(), load(path, &args.input)?.0));
    }
    let named: Vec<(&str, &Ontology)> = loaded.iter().map(|(n, o)| (n.as_str(), o)).collect();
    write_stats_csv(io::stdout().lock(), &named)?;
    Ok(())
}

fn run_functionality(args: FunctionalityArgs) -> Outcome {
    let strategy = args.strategy.parse::<FunctionalityStrategy>()?;
    let (o, _) = load(&args.input_file, &args.input)?;
    FunctionalityTable::compute(&o, strategy).write_csv(io::stdout().lock(), &o)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Align(a) => run_align(a),
        Command::Eval(a) => run_eval(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Synth(a) => run_synth(a),
        Command::Stats(a) => run_stats(a),
        Command::Functionality(a) => run_functionality(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
