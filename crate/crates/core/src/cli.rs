//! Command-line front end.

use std::ffi::{OsStr, OsString};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::crf::{train_from, LabelSet, TrainConfig};
use crate::error::{Error, Result};
use crate::eval::{evaluate, run_experiment, split_domain, ExperimentConfig, Protocol, SplitSizes};
use crate::features::{featurize, tokens_of_aspects};
use crate::io;
use crate::lifelong::{decode_domain, aspects_of, lifelong_extract, LifelongConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lcrf", version, about = "Lifelong CRF aspect extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct TrainOpts {
    /// L2 penalty coefficient.
    #[arg(long, default_value_t = 1.0)]
    l2: f64,
    /// Gradient infinity-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Maximum optimizer iterations.
    #[arg(long = "max-iters", default_value_t = 300)]
    max_iters: usize,
}

impl TrainOpts {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            l2: self.l2,
            tol: self.tol,
            max_iters: self.max_iters,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model on a labeled corpus.
    Train {
        corpus: PathBuf,
        /// Output model path; training aspects go to `<model>.kt`.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        opts: TrainOpts,
    },
    /// Extract aspects from a corpus using only the training aspects.
    Extract {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Also write the corpus with predicted tags.
        #[arg(long = "tags-out")]
        tags_out: Option<PathBuf>,
    },
    /// Run lifelong extraction on a new domain and update the aspect store.
    Lifelong {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        store: PathBuf,
        /// Defaults to the corpus file stem.
        #[arg(long = "domain-id")]
        domain_id: Option<String>,
        /// Minimum number of past domains for a reliable aspect.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        lambda: u64,
        #[arg(long = "max-iters", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        max_iters: u64,
        /// Also write the corpus with the final round's tags.
        #[arg(long = "tags-out")]
        tags_out: Option<PathBuf>,
    },
    /// Score predicted tags against gold tags.
    Eval { gold: PathBuf, pred: PathBuf },
    /// Compare CRF, CRF+R and L-CRF over labeled domains.
    Experiment {
        #[arg(required = true, num_args = 2..)]
        domains: Vec<PathBuf>,
        /// Past-domain aspect store.
        #[arg(long)]
        store: PathBuf,
        #[arg(long, default_value = "cross", value_parser = ["cross", "in"])]
        protocol: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the tab-separated report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        lambda: u64,
        #[arg(long = "lifelong-iters", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        lifelong_iters: u64,
        #[arg(long = "train-size", default_value_t = 200)]
        train_size: usize,
        #[arg(long = "test-size", default_value_t = 200)]
        test_size: usize,
    },
}

/// Training-aspect sidecar stored next to a model.
pub fn sidecar_path(model: &Path) -> PathBuf {
    let mut s: OsString = model.as_os_str().to_owned();
    s.push(".kt");
    PathBuf::from(s)
}

fn require_file(p: &Path) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::config(format!("{} does not exist or is not a file", p.display())))
    }
}

fn require_output(p: &Path) -> Result<()> {
    match p.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(Error::config(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence { .. } => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| Error::io(OsStr::new("<stdout>"), e))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Train { corpus, model, opts } => cmd_train(&corpus, &model, &opts.config(), out),
        Command::Extract {
            corpus,
            model,
            tags_out,
        } => cmd_extract(&corpus, &model, tags_out.as_deref(), out),
        Command::Lifelong {
            corpus,
            model,
            store,
            domain_id,
            lambda,
            max_iters,
            tags_out,
        } => {
            let config = LifelongConfig {
                lambda: lambda as usize,
                max_iters: max_iters as usize,
            };
            cmd_lifelong(&corpus, &model, &store, domain_id, &config, tags_out.as_deref(), out)
        }
        Command::Eval { gold, pred } => cmd_eval(&gold, &pred, out),
        Command::Experiment {
            domains,
            store,
            protocol,
            seed,
            report,
            opts,
            lambda,
            lifelong_iters,
            train_size,
            test_size,
        } => {
            let config = ExperimentConfig {
                train: opts.config(),
                lifelong: LifelongConfig {
                    lambda: lambda as usize,
                    max_iters: lifelong_iters as usize,
                },
                seed,
            };
            let sizes = SplitSizes {
                train: train_size,
                test: test_size,
            };
            cmd_experiment(&domains, &store, protocol.parse()?, sizes, &config, report.as_deref(), out)
        }
    }
}

pub fn cmd_train(corpus_path: &Path, model_path: &Path, config: &TrainConfig, out: &mut dyn Write) -> Result<()> {
    require_file(corpus_path)?;
    require_output(model_path)?;
    config.validate()?;
    let corpus = io::read_conll(corpus_path, true)?;
    let labels = LabelSet::bio();
    let kt = io::extract_training_aspects(&corpus)?;
    let kb = tokens_of_aspects(&kt);
    let featurized = corpus
        .sentences()
        .iter()
        .map(|s| featurize(s, &kb, &labels))
        .collect::<Result<Vec<_>>>()?;
    let (model, report) = train_from(&featurized, &labels, config, None)?;
    io::write_model(&model, model_path)?;
    io::write_phrases(&kt, &sidecar_path(model_path))?;
    emit(
        out,
        format!(
            "slots: {}\niterations: {}\nnll: {:.6}\nconverged: {}\ntraining aspects: {}\n",
            model.num_slots(),
            report.iterations,
            report.nll,
            report.converged,
            kt.len()
        ),
    )
}

fn load_model(model_path: &Path) -> Result<(crate::crf::CrfModel, std::collections::BTreeSet<String>)> {
    let sidecar = sidecar_path(model_path);
    require_file(model_path)?;
    require_file(&sidecar)?;
    Ok((io::read_model(model_path)?, io::read_phrases(&sidecar)?))
}

fn print_aspects(out: &mut dyn Write, aspects: &std::collections::BTreeSet<String>) -> Result<()> {
    let mut text = String::new();
    for a in aspects {
        text.push_str(a);
        text.push('\n');
    }
    emit(out, text)
}

pub fn cmd_extract(corpus_path: &Path, model_path: &Path, tags_out: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    require_file(corpus_path)?;
    if let Some(p) = tags_out {
        require_output(p)?;
    }
    let (model, kt) = load_model(model_path)?;
    let corpus = io::read_conll(corpus_path, false)?;
    let tags = decode_domain(&model, corpus.sentences(), &tokens_of_aspects(&kt))?;
    if let Some(p) = tags_out {
        io::write_conll(&corpus.with_tags(&tags)?, p)?;
    }
    print_aspects(out, &aspects_of(corpus.sentences(), &tags))
}

pub fn cmd_lifelong(
    corpus_path: &Path,
    model_path: &Path,
    store_path: &Path,
    domain_id: Option<String>,
    config: &LifelongConfig,
    tags_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    require_file(corpus_path)?;
    require_output(store_path)?;
    if let Some(p) = tags_out {
        require_output(p)?;
    }
    config.validate()?;
    let (model, kt) = load_model(model_path)?;
    let store = io::read_store(store_path)?;
    let corpus = io::read_conll(corpus_path, false)?;
    let domain_id = domain_id.unwrap_or_else(|| corpus.domain_id.clone());
    let (result, store) = lifelong_extract(&model, &domain_id, corpus.sentences(), store, &kt, config)?;
    io::write_store(&store, store_path)?;
    if let Some(p) = tags_out {
        let tags = decode_domain(&model, corpus.sentences(), &tokens_of_aspects(&result.knowledge))?;
        io::write_conll(&corpus.with_tags(&tags)?, p)?;
    }
    let mut text = String::new();
    for (t, k) in result.k_history.iter().enumerate().skip(1) {
        text.push_str(&format!("# iteration {t}: {} reliable aspects\n", k.len()));
    }
    text.push_str(&format!(
        "# converged: {} after {} iterations\n",
        result.converged, result.iterations
    ));
    emit(out, text)?;
    print_aspects(out, &result.aspects)
}

pub fn cmd_eval(gold_path: &Path, pred_path: &Path, out: &mut dyn Write) -> Result<()> {
    require_file(gold_path)?;
    require_file(pred_path)?;
    let gold = io::read_conll(gold_path, true)?;
    let pred = io::read_conll(pred_path, true)?;
    let same_shape = gold.len() == pred.len()
        && gold
            .sentences()
            .iter()
            .zip(pred.sentences())
            .all(|(g, p)| g.words().eq(p.words()));
    if !same_shape {
        return Err(Error::config("gold and predicted corpora do not contain the same sentences"));
    }
    let r = evaluate(&gold.gold_tags()?, &pred.gold_tags()?)?;
    emit(
        out,
        format!(
            "precision: {:.4}\nrecall: {:.4}\nf1: {:.4}\ntp: {}\nfp: {}\nfn: {}\n",
            r.precision, r.recall, r.f1, r.tp, r.fp, r.fn_
        ),
    )
}

pub fn cmd_experiment(
    domain_paths: &[PathBuf],
    store_path: &Path,
    protocol: Protocol,
    sizes: SplitSizes,
    config: &ExperimentConfig,
    report_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    for p in domain_paths {
        require_file(p)?;
    }
    if let Some(p) = report_path {
        require_output(p)?;
    }
    config.train.validate()?;
    config.lifelong.validate()?;
    let store = io::read_store(store_path)?;
    let splits = domain_paths
        .iter()
        .map(|p| split_domain(&io::read_conll(p, true)?, sizes, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let report = run_experiment(&splits, &store, protocol, config)?;
    if let Some(p) = report_path {
        std::fs::write(p, report.to_tsv()).map_err(|e| Error::io(p, e))?;
    }
    emit(out, report.to_text())
}
