//! `matmono`: run classifiers and verification suites, write a versioned
//! report. Exit status 0 on a completed run, 1 on a consistency
//! discrepancy (or a failed recheck), 2 on usage and input errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use matmono::classifiers::{
    cn_class_check, cn_membership, cn_operator_check, is_n_concave, is_n_convex, is_n_monotone_dd, is_n_monotone_mx,
    Route, SearchConfig,
};
use matmono::report::{load_certificates, Command, OutputFormat, RecheckRecord, Report, ResultRecord, RunConfig};
use matmono::theorems::{
    check_assertions, gap_search, standard_corpus, verify_double_piling, verify_equivalence_ii_iii,
    verify_mathias_remark, verify_prop35, verify_prop36, verify_prop38_batch, verify_thm32_corpus, BisectionConfig,
};
use matmono::{Error, IntervalSpec};

#[derive(Parser, Debug)]
#[command(name = "matmono", version, about = "Matrix monotonicity and convexity checks with re-checkable certificates")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// n-monotonicity, n-convexity or n-concavity on an interval
    Classify(Common),
    /// Assertions (i), (ii), (iii), (iv), (v3) on [0, alpha)
    Jensen(Common),
    /// Pick interpolation at given points, or sampled C_n membership
    Cn(Common),
    /// A named verification suite
    Suite(Common),
    /// Monotonicity radius and class gaps of a gap polynomial
    Gap(Common),
    /// Recompute every certificate in a report or certificate file
    Recheck {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Text => OutputFormat::Text,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Function in the mini-language, e.g. poly:0,0,1 or moebius:1,0,1,1
    #[arg(long = "fn")]
    function: Option<String>,
    /// "lo,hi" (open) or with brackets, e.g. "[0,1)"
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long = "grid-size", default_value_t = matmono::classifiers::CN_GRID_SIZE)]
    grid_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// loewner_dd, matrix_pairs, kraus_dd or local2x2
    #[arg(long)]
    route: Option<String>,
    /// monotone, convex or concave for classify; membership or operator for cn
    #[arg(long)]
    property: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// equivalence, thm32, prop35, prop36, prop38, mathias, piling
    #[arg(long)]
    name: Option<String>,
    /// Comma-separated interpolation points in (0, 1)
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<f64>>,
}

impl Common {
    fn config(&self, command: Command) -> RunConfig {
        RunConfig {
            command,
            function: self.function.clone(),
            interval: self.interval.clone(),
            order: self.order,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            grid_size: self.grid_size,
            output: self.out.as_ref().map(|p| p.display().to_string()),
            format: self.format.into(),
            route: self.route.clone(),
            property: self.property.clone(),
            alpha: self.alpha,
            suite: self.name.clone(),
            points: self.points.clone(),
        }
    }
}

/// Default number of random quintics added to the built-in corpus.
const CORPUS_QUINTICS: usize = 10;

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn search(cfg: &RunConfig) -> SearchConfig {
    SearchConfig::new(cfg.trials, cfg.seed).with_tol(cfg.tol)
}

fn required<T: Clone>(v: &Option<T>, what: &str) -> Result<T, Error> {
    v.clone().ok_or_else(|| usage(format!("--{what} is required")))
}

fn classify(cfg: &RunConfig, report: &mut Report) -> Result<(), Error> {
    let f = cfg.function_spec()?.ok_or_else(|| usage("--fn is required"))?;
    let interval = cfg.interval_spec()?.ok_or_else(|| usage("--interval is required"))?;
    let n = required(&cfg.order, "order")?;
    let s = search(cfg);
    let route = cfg.route.as_deref().map(str::parse::<Route>).transpose()?;
    let r = match cfg.property.as_deref().unwrap_or("monotone") {
        "monotone" => match route.unwrap_or(Route::LoewnerDd) {
            Route::LoewnerDd => is_n_monotone_dd(&f, &interval, n, &s)?,
            Route::MatrixPairs => is_n_monotone_mx(&f, &interval, n, &s)?,
            other => return Err(usage(format!("route {other} does not decide monotonicity"))),
        },
        "convex" => is_n_convex(&f, &interval, n, &s, route.unwrap_or(Route::KrausDd))?,
        "concave" => is_n_concave(&f, &interval, n, &s, route.unwrap_or(Route::KrausDd))?,
        other => return Err(usage(format!("unknown property '{other}'"))),
    };
    report.push(ResultRecord::Class(r));
    Ok(())
}

fn jensen(cfg: &RunConfig, report: &mut Report) -> Result<(), Error> {
    let f = cfg.function_spec()?.ok_or_else(|| usage("--fn is required"))?;
    let alpha = cfg.alpha.unwrap_or(1.0);
    let n = required(&cfg.order, "order")?;
    for v in check_assertions(&f, alpha, n, &search(cfg))? {
        report.push(ResultRecord::Assertion(v));
    }
    Ok(())
}

fn cn(cfg: &RunConfig, report: &mut Report) -> Result<(), Error> {
    let f = cfg.function_spec()?.ok_or_else(|| usage("--fn is required"))?;
    let unit = IntervalSpec::open(0.0, 1.0);
    let r = match (cfg.property.as_deref().unwrap_or("membership"), &cfg.points) {
        ("membership", Some(points)) => {
            let n = cfg.order.unwrap_or(points.len());
            cn_membership(&f, &unit, n, points, cfg.grid_size, cfg.tol.max(matmono::classifiers::CN_TOL))?
        }
        ("membership", None) => cn_class_check(&f, required(&cfg.order, "order")?, &search(cfg), cfg.grid_size)?,
        ("operator", _) => cn_operator_check(&f, required(&cfg.order, "order")?, &search(cfg))?,
        (other, _) => return Err(usage(format!("unknown cn property '{other}'"))),
    };
    report.push(ResultRecord::Class(r));
    Ok(())
}

fn suite(cfg: &RunConfig, report: &mut Report) -> Result<(), Error> {
    let name = required(&cfg.suite, "name")?;
    let s = search(cfg);
    let corpus = |alpha: f64| standard_corpus(alpha, CORPUS_QUINTICS, cfg.seed);
    let orders = |default: &[usize]| cfg.order.map_or(default.to_vec(), |n| vec![n]);
    match name.as_str() {
        "equivalence" => {
            let alpha = cfg.alpha.unwrap_or(1.0);
            let c = corpus(alpha)?;
            for n in orders(&[1, 2, 3]) {
                report.push(ResultRecord::Equivalence(verify_equivalence_ii_iii(&c, alpha, n, &s)?));
            }
        }
        "thm32" => {
            let alpha = cfg.alpha.unwrap_or(1.0);
            let c = corpus(alpha)?;
            for n in orders(&[2, 3]) {
                report.push(ResultRecord::Implication(verify_thm32_corpus(&c, alpha, n, &s)?));
            }
        }
        "prop35" => report.push(ResultRecord::Split(verify_prop35(&s)?)),
        "prop36" => report.push(ResultRecord::Quintic(verify_prop36(500, cfg.alpha.unwrap_or(0.1), &s)?)),
        "prop38" => {
            let alpha = cfg.alpha.unwrap_or(0.1);
            report.push(ResultRecord::Antiderivative(verify_prop38_batch(&corpus(alpha)?, alpha, 100, 100, &s)?));
        }
        "mathias" => {
            for n in orders(&[1, 2]) {
                report.push(ResultRecord::Concavity(verify_mathias_remark(n, &s)?));
            }
        }
        "piling" => {
            let alpha = cfg.alpha.unwrap_or(1.0);
            let c = corpus(alpha)?;
            for n in orders(&[1, 2]) {
                report.push(ResultRecord::Piling(verify_double_piling(&c, alpha, n, &s)?));
            }
        }
        other => return Err(usage(format!("unknown suite '{other}'"))),
    }
    Ok(())
}

fn gap(cfg: &RunConfig, report: &mut Report) -> Result<(), Error> {
    for n in cfg.order.map_or(vec![2, 3], |n| vec![n]) {
        report.push(ResultRecord::Gap(gap_search(n, BisectionConfig::default(), &search(cfg), cfg.grid_size)?));
    }
    Ok(())
}

fn render(report: &Report, format: OutputFormat) -> Result<String, Error> {
    Ok(match format {
        OutputFormat::Json => report.to_json()? + "\n",
        OutputFormat::Text => report.text_lines()?.join("\n") + "\n",
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in report.csv_rows()? {
                w.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))?
        }
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn run_command(command: Command, common: &Common) -> Result<ExitCode, String> {
    let cfg = common.config(command);
    cfg.validate().map_err(|e| e.to_string())?;
    let mut report = Report::new(cfg.clone());
    let res = match command {
        Command::Classify => classify(&cfg, &mut report),
        Command::Jensen => jensen(&cfg, &mut report),
        Command::Cn => cn(&cfg, &mut report),
        Command::Suite => suite(&cfg, &mut report),
        Command::Gap => gap(&cfg, &mut report),
        Command::Recheck => unreachable!("recheck has its own arguments"),
    };
    res.map_err(|e| e.to_string())?;
    report.finish();
    emit(&render(&report, cfg.format).map_err(|e| e.to_string())?, common.out.as_ref())?;
    Ok(if report.has_high_priority() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn recheck(file: &PathBuf, out: Option<&PathBuf>, format: Format) -> Result<ExitCode, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let certs = load_certificates(&text).map_err(|e| e.to_string())?;
    if certs.is_empty() {
        return Err(format!("no certificates in {}", file.display()));
    }
    let mut cfg = RunConfig::new(Command::Recheck);
    cfg.output = out.map(|p| p.display().to_string());
    cfg.format = format.into();
    let mut report = Report::new(cfg);
    let mut all_ok = true;
    for c in certs {
        let r = RecheckRecord::of(c);
        all_ok &= r.consistent;
        report.push(ResultRecord::Recheck(r));
    }
    report.finish();
    let rendered = match format {
        Format::Text => report
            .results
            .iter()
            .filter_map(|r| match r {
                ResultRecord::Recheck(r) => Some(format!(
                    "{} {} order {} claim {} stored {:.6e} recomputed {} ({})\n",
                    if r.consistent { "OK      " } else { "MISMATCH" },
                    r.certificate.function,
                    r.certificate.order,
                    r.certificate.claim,
                    r.certificate.margin,
                    r.recomputed_margin.map_or("-".into(), |m| format!("{m:.6e}")),
                    r.detail
                )),
                _ => None,
            })
            .collect(),
        _ => render(&report, format.into()).map_err(|e| e.to_string())?,
    };
    emit(&rendered, out)?;
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Cmd::Classify(c) => run_command(Command::Classify, c),
        Cmd::Jensen(c) => run_command(Command::Jensen, c),
        Cmd::Cn(c) => run_command(Command::Cn, c),
        Cmd::Suite(c) => run_command(Command::Suite, c),
        Cmd::Gap(c) => run_command(Command::Gap, c),
        Cmd::Recheck { file, out, format } => recheck(file, out.as_ref(), *format),
    };
    match res {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
