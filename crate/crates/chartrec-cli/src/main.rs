//! Command line front end for the recommendation engine.
//!
//! Input always travels as files or flags and results land on stdout;
//! stderr carries nothing but errors.  Every command is deterministic:
//! the same inputs and seed produce byte-identical output, so shell
//! pipelines and golden files can rely on it.
//!
//! Exit codes: 0 on success, 1 when the input is at fault (unreadable
//! file, malformed query or envelope, bad flag value), 2 when the tool
//! itself is (an internal invariant failed).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::ValueParser;
use clap::{Parser, Subcommand, ValueEnum};

use chartrec::caption::{CuratedLexicon, FileLexicon};
use chartrec::chartspec::{bind_all, BindOptions};
use chartrec::corpus;
use chartrec::forest::{
    cross_validate, read_corpus, write_corpus, EvalConfig, LabeledExample, MaxFeatures,
    RandomForest, TrainConfig,
};
use chartrec::ingest::{apply_schema_hints, load_csv, load_envelope, load_sql_result};
use chartrec::pipeline::{
    analyze, analyze_with_lexicon, recommend_with_model, recommend_with_rules, Analysis,
};
use chartrec::rules::rule_docs;
use chartrec::types::{Dataset, FeatureSchema, Recommendation};

#[derive(Parser)]
#[command(
    name = "chartrec",
    version,
    about = "Recommend chart types for SQL results and captioned tables"
)]
struct Cli {
    /// Emit machine-readable JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recommend charts for a dataset envelope.
    Recommend {
        /// Dataset envelope (JSON file).
        #[arg(long)]
        input: PathBuf,
        /// Which engine ranks the charts.
        #[arg(long, value_enum, default_value_t = Engine::Rules)]
        engine: Engine,
        /// Trained model file; required with --engine model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// What to print: ranked summaries or bindable chart specs.
        #[arg(long, value_enum, default_value_t = Emit::Summary)]
        emit: Emit,
    },
    /// Recommend charts for a SQL query file and its result CSV.
    RecommendSql {
        /// File holding the query text.
        #[arg(long)]
        query: PathBuf,
        /// Result set as CSV with a header row.
        #[arg(long)]
        result: PathBuf,
        /// Schema hints (JSON): {"pk:col": "true", "dtype:col": "numeric"}.
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Recommend charts for a captioned CSV table.
    RecommendCaption {
        /// The caption text itself.
        #[arg(long)]
        caption: String,
        /// Table as CSV with a header row.
        #[arg(long)]
        csv: PathBuf,
        /// Extra quantifier lexicon: plain text, one term per line.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Show the named feature bits for a dataset envelope.
    Features {
        /// Dataset envelope (JSON file).
        #[arg(long)]
        input: PathBuf,
    },
    /// Train a random forest on a labeled corpus (JSONL).
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Number of trees.
        #[arg(long, default_value_t = 100)]
        trees: usize,
        /// Features tried per split: "auto" or a count.
        #[arg(long, default_value = "auto", value_parser = ValueParser::new(parse_max_features))]
        max_features: MaxFeatures,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Where to write the model (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate over a grid of fold counts and feature caps.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        /// Fold counts, comma-separated (e.g. 10,5,3).
        #[arg(long, default_value = "10,5,3")]
        kfold: String,
        /// Feature caps, comma-separated "auto" or counts.
        #[arg(long, default_value = "auto")]
        max_features: String,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Report file; .json gets JSON, anything else CSV.  Stdout gets
        /// a summary either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the recommendation rules.
    Rules {
        #[command(subcommand)]
        action: DumpAction,
    },
    /// Inspect the built-in quantifier lexicon.
    Lexicon {
        #[command(subcommand)]
        action: DumpAction,
    },
    /// Generate a seeded synthetic corpus.
    GenCorpus {
        /// Which pipeline the examples exercise.
        #[arg(long, value_enum)]
        kind: CorpusKind,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Where to write the JSONL output.
        #[arg(long)]
        out: PathBuf,
        /// Write raw dataset envelopes instead of labeled examples.
        #[arg(long)]
        envelopes: bool,
    },
}

#[derive(Subcommand)]
enum DumpAction {
    /// Print the full table.
    Dump,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Rules,
    Model,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Summary,
    Spec,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CorpusKind {
    Sql,
    Caption,
}

/// Errors split by whose fault they are; the distinction is the exit code.
enum CliError {
    /// The input was unusable: exit 1.
    Input(String),
    /// The tool broke its own invariants: exit 2.
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

fn input_err(err: impl fmt::Display) -> CliError {
    CliError::Input(err.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; they are not errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(body) => match write_stdout(&body) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write to stdout: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Input(_) => 1,
                CliError::Internal(_) => 2,
            })
        }
    }
}

/// Writes the command's output in one shot. A closed pipe downstream
/// (`chartrec rules dump | head`) is how pagers and `head` end the
/// conversation, not a failure, so it is swallowed.
fn write_stdout(body: &str) -> std::io::Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(body.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let json = cli.json;
    match cli.command {
        Command::Recommend { input, engine, model, emit } => {
            let ds = load_envelope(&read_file(&input)?).map_err(input_err)?;
            let analysis = analyze(&ds).map_err(input_err)?;
            let recs = match engine {
                Engine::Rules => recommend_with_rules(&analysis, &ds),
                Engine::Model => {
                    let path = model.ok_or_else(|| {
                        CliError::Input("--engine model needs --model <file>".into())
                    })?;
                    let forest =
                        RandomForest::from_json(&read_file(&path)?).map_err(input_err)?;
                    vec![recommend_with_model(&analysis, &ds, &forest).map_err(input_err)?]
                }
            };
            match emit {
                Emit::Summary => render_recommendations(&recs, &ds, json),
                Emit::Spec => {
                    let specs = bind_all(&recs, &ds, &BindOptions::default())
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                    let out = serde_json::to_string_pretty(&specs)
                        .map_err(|e| CliError::Internal(e.to_string()))?;
                    Ok(format!("{out}\n"))
                }
            }
        }
        Command::RecommendSql { query, result, schema } => {
            let query = read_file(&query)?;
            let csv = read_file(&result)?;
            let mut ds = load_sql_result(&csv, query.trim()).map_err(input_err)?;
            if let Some(path) = schema {
                let hints: BTreeMap<String, String> =
                    serde_json::from_str(&read_file(&path)?).map_err(|e| {
                        CliError::Input(format!("schema hints are not a JSON string map: {e}"))
                    })?;
                apply_schema_hints(&mut ds, &hints).map_err(input_err)?;
            }
            let analysis = analyze(&ds).map_err(input_err)?;
            let recs = recommend_with_rules(&analysis, &ds);
            render_recommendations(&recs, &ds, json)
        }
        Command::RecommendCaption { caption, csv, lexicon } => {
            let csv = read_file(&csv)?;
            let ds = load_csv(&csv, &caption).map_err(input_err)?;
            let analysis = match lexicon {
                Some(path) => {
                    let lex = FileLexicon::parse(&read_file(&path)?);
                    analyze_with_lexicon(&ds, &lex).map_err(input_err)?
                }
                None => analyze(&ds).map_err(input_err)?,
            };
            let recs = recommend_with_rules(&analysis, &ds);
            render_recommendations(&recs, &ds, json)
        }
        Command::Features { input } => {
            let ds = load_envelope(&read_file(&input)?).map_err(input_err)?;
            let analysis = analyze(&ds).map_err(input_err)?;
            render_features(&analysis, json)
        }
        Command::Train { corpus, trees, max_features, seed, out } => {
            let examples = read_corpus(&read_file(&corpus)?).map_err(input_err)?;
            let schema = corpus_schema(&examples)?;
            let config = TrainConfig { n_trees: trees, max_features, seed, ..TrainConfig::default() };
            let forest = RandomForest::train(&examples, schema, config).map_err(input_err)?;
            let model = forest.to_json();
            write_file(&out, &model)?;
            if json {
                Ok(format!(
                    "{}\n",
                    serde_json::json!({
                        "model_id": forest.id(),
                        "schema": schema,
                        "examples": examples.len(),
                        "trees": trees,
                    })
                ))
            } else {
                Ok(format!(
                    "trained {} on {} examples ({} bits)\n",
                    forest.id(),
                    examples.len(),
                    schema.len()
                ))
            }
        }
        Command::Evaluate { corpus, kfold, max_features, trees, seed, out } => {
            let examples = read_corpus(&read_file(&corpus)?).map_err(input_err)?;
            let schema = corpus_schema(&examples)?;
            let k_folds = parse_list(&kfold, "--kfold", |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?;
            let caps = parse_list(&max_features, "--max-features", parse_max_features)?;
            let config = EvalConfig {
                k_folds,
                max_features: caps,
                n_trees: trees,
                seed,
                ..EvalConfig::default()
            };
            let report = cross_validate(&examples, schema, &config).map_err(input_err)?;
            if let Some(path) = &out {
                let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
                let body = if is_json { report.to_json() } else { report.to_csv() };
                write_file(path, &body)?;
            }
            if json {
                Ok(format!("{}\n", report.to_json()))
            } else {
                Ok(render_eval_table(&report))
            }
        }
        Command::Rules { action: DumpAction::Dump } => {
            let docs = rule_docs();
            if json {
                let body = serde_json::to_string_pretty(&docs)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                Ok(format!("{body}\n"))
            } else {
                let mut out = String::new();
                for d in docs {
                    let _ = writeln!(
                        out,
                        "{:<22} {:<14} {:<14} {}",
                        d.id,
                        d.rank1.as_str(),
                        d.rank2,
                        d.when
                    );
                }
                Ok(out)
            }
        }
        Command::Lexicon { action: DumpAction::Dump } => {
            let lex = CuratedLexicon::new();
            if json {
                let map: BTreeMap<&str, f64> = lex.entries().into_iter().collect();
                let body = serde_json::to_string_pretty(&map)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                Ok(format!("{body}\n"))
            } else {
                let mut out = String::new();
                for (word, score) in lex.entries() {
                    let _ = writeln!(out, "{word} {score:.2}");
                }
                Ok(out)
            }
        }
        Command::GenCorpus { kind, count, seed, out, envelopes } => {
            let envs = match kind {
                CorpusKind::Sql => corpus::sql_envelopes(count, seed),
                CorpusKind::Caption => corpus::caption_envelopes(count, seed),
            };
            let body = if envelopes {
                let mut body = envs.join("\n");
                body.push('\n');
                body
            } else {
                let labeled = corpus::labeled_corpus(&envs)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                write_corpus(&labeled)
            };
            write_file(&out, &body)?;
            let what = if envelopes { "envelopes" } else { "labeled examples" };
            if json {
                Ok(format!(
                    "{}\n",
                    serde_json::json!({ "count": count, "seed": seed, "kind": kind_name(kind), "wrote": what })
                ))
            } else {
                Ok(format!("wrote {count} {what} ({} corpus, seed {seed})\n", kind_name(kind)))
            }
        }
    }
}

fn kind_name(kind: CorpusKind) -> &'static str {
    match kind {
        CorpusKind::Sql => "sql",
        CorpusKind::Caption => "caption",
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn parse_max_features(s: &str) -> Result<MaxFeatures, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(MaxFeatures::Auto);
    }
    s.parse::<usize>()
        .map(MaxFeatures::Fixed)
        .map_err(|_| format!("expected \"auto\" or a count, got `{s}`"))
}

fn parse_list<T>(
    raw: &str,
    flag: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).map_err(|e| CliError::Input(format!("{flag}: {e}"))))
        .collect()
}

/// The schema every example in a corpus shares; mixed corpora are the
/// user's error, caught here before training starts.
fn corpus_schema(examples: &[LabeledExample]) -> Result<FeatureSchema, CliError> {
    let first = examples
        .first()
        .ok_or_else(|| CliError::Input("the corpus is empty".into()))?
        .features
        .schema;
    Ok(first)
}

/// True when it is polite to colorize: stdout is a terminal and the
/// NO_COLOR convention does not veto it.
fn use_color() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn bold(text: &str) -> String {
    if use_color() {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn render_recommendations(
    recs: &[Recommendation],
    ds: &Dataset,
    json: bool,
) -> Result<String, CliError> {
    if json {
        let body = serde_json::to_string_pretty(recs)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        return Ok(format!("{body}\n"));
    }
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {} rows, {} columns", ds.row_count, ds.columns.len());
    for (i, rec) in recs.iter().enumerate() {
        let engine = match &rec.provenance {
            chartrec::types::Provenance::Rule { id } => format!("rule {id}"),
            chartrec::types::Provenance::Model { id } => format!("model {id}"),
        };
        let tag = if rec.combinable { ", combinable" } else { "" };
        let _ = writeln!(out, "recommendation {} of {} ({engine}{tag})", i + 1, recs.len());
        for (rank, r) in rec.ranked.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {}. {} ({:.2})",
                rank + 1,
                bold(r.chart_type.as_str()),
                r.score
            );
        }
        if let Some(b) = &rec.bindings {
            let _ = writeln!(out, "  x: {}", b.x_field);
            let _ = writeln!(out, "  y: {}", b.y_fields.join(", "));
            if let Some(s) = &b.series_field {
                let _ = writeln!(out, "  series: {s}");
            }
            if let Some(g) = &b.group_field {
                let _ = writeln!(out, "  group: {g}");
            }
        }
    }
    Ok(out)
}

fn render_features(analysis: &Analysis, json: bool) -> Result<String, CliError> {
    let fv = &analysis.features;
    let names = fv.schema.feature_names();
    if json {
        let named: Vec<serde_json::Value> = fv
            .set_indices()
            .into_iter()
            .map(|i| serde_json::json!({ "index": i, "name": names[i] }))
            .collect();
        let body = serde_json::to_string_pretty(&serde_json::json!({
            "schema": fv.schema,
            "bits": fv.bits,
            "set": named,
        }))
        .map_err(|e| CliError::Internal(e.to_string()))?;
        return Ok(format!("{body}\n"));
    }
    let mut out = String::new();
    let _ = writeln!(out, "schema: {} ({} bits)", fv.schema, fv.schema.len());
    for (i, name) in names.iter().enumerate() {
        let mark = if fv.is_set(i) { "x" } else { " " };
        let _ = writeln!(out, "  [{mark}] {i:>2}  {name}");
    }
    Ok(out)
}

fn render_eval_table(report: &chartrec::forest::EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "corpus: {} examples ({}), {} trees, seed {}\n",
        report.corpus_size, report.schema, report.n_trees, report.seed
    ));
    out.push_str(&format!(
        "{:<14} {:>6} {:>8} {:>8} {:>8} {:>8}\n",
        "max_features", "k", "rank1", "rank2", "either", "top2"
    ));
    for cell in &report.cells {
        out.push_str(&format!(
            "{:<14} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4}\n",
            cell.max_features.to_string(),
            cell.k,
            cell.rank1_accuracy,
            cell.rank2_accuracy,
            cell.rank2_within_top2,
            cell.label1_within_top2,
        ));
    }
    out
}
