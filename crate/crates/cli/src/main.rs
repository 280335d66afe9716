use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use infoflow_cli::error::EXIT_INPUT;
use infoflow_cli::pipeline::{self, MeasureRequest, MirRequest, OrderChoice};
use infoflow_cli::result_doc::{self, ResultDocument};
use infoflow_cli::{load_timeseries, save_timeseries, CliError, Layout, ModelDocument, Result, Units, OUT_DIR_ENV};
use infoflow_core::var_model::DEFAULT_BURN_IN;
use infoflow_core::{OrderCriterion, VerifyConfig, DEFAULT_GRID_POINTS};

/// Information PDC / DTF connectivity and mutual information rates for VAR models.
#[derive(Parser, Debug)]
#[command(name = "infoflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file
    #[arg(long)]
    out: Option<PathBuf>,

    /// Directory for outputs when --out is not given
    #[arg(long, env = OUT_DIR_ENV, hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

impl OutArgs {
    fn resolve(&self, default_name: &str) -> PathBuf {
        match (&self.out, &self.out_dir) {
            (Some(out), _) => out.clone(),
            (None, Some(dir)) => dir.join(default_name),
            (None, None) => PathBuf::from(default_name),
        }
    }
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV time series
    #[arg(long)]
    data: Option<PathBuf>,

    #[arg(long, default_value = "rows_are_samples", value_parser = ["rows_are_samples", "rows_are_channels"])]
    layout: String,

    /// Fixed model order; overrides --max-order
    #[arg(long)]
    order: Option<usize>,

    /// Largest order tried by the information criterion
    #[arg(long, default_value_t = 10)]
    max_order: usize,

    #[arg(long, default_value = "bic", value_parser = ["aic", "bic"])]
    criterion: String,

    /// Sampling rate; frequencies are additionally reported in Hz
    #[arg(long)]
    fs: Option<f64>,
}

impl DataArgs {
    fn order_choice(&self) -> OrderChoice {
        match self.order {
            Some(p) => OrderChoice::Fixed(p),
            None => OrderChoice::Select {
                max_order: self.max_order,
                criterion: if self.criterion == "aic" { OrderCriterion::Aic } else { OrderCriterion::Bic },
            },
        }
    }

    fn sample_rate(&self) -> Result<Option<f64>> {
        match self.fs {
            Some(fs) if !(fs.is_finite() && fs > 0.0) => {
                Err(CliError::Config(format!("--fs must be positive and finite, got {fs}")))
            }
            fs => Ok(fs),
        }
    }

    /// Model from --model, or fitted to --data.
    fn model(&self, model: &Option<PathBuf>) -> Result<ModelDocument> {
        match (model, &self.data) {
            (Some(path), None) => ModelDocument::load(path),
            (None, Some(path)) => {
                let layout: Layout = self.layout.parse()?;
                let data = load_timeseries(path, layout)?;
                let (m, p) = pipeline::fit(&data, self.order_choice())?;
                eprintln!("fitted order {p}");
                Ok(pipeline::fitted_document(&m, self.sample_rate()?))
            }
            _ => Err(CliError::Config("exactly one of --model or --data is required".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample path from a model and write it as CSV
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the innovations to this CSV file
        #[arg(long)]
        innovations: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fit a VAR model to a CSV time series
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Evaluate connectivity measures on a frequency grid
    Measure {
        #[arg(long, conflicts_with = "data")]
        model: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated subset of coh,pdc,gpdc,ipdc,dtf,dc,idtf
        #[arg(long, value_delimiter = ',', default_value = "coh,pdc,gpdc,ipdc,dtf,dc,idtf")]
        measures: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        nfreq: usize,
        /// Include |value|^2 arrays next to the complex values
        #[arg(long)]
        magnitude_sq: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mutual information rates for ipdc, idtf and coherence pairs
    Mir {
        #[arg(long, conflicts_with = "data")]
        model: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_value = "ipdc,idtf,coh")]
        kinds: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        nfreq: usize,
        #[arg(long, default_value = "nats", value_parser = ["nats", "bits"])]
        units: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the identities numerically on a seeded population of random models
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        models: usize,
        #[arg(long, default_value_t = 128)]
        nfreq: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn sample_rate(data: &DataArgs, doc: &ModelDocument) -> Result<Option<f64>> {
    Ok(data.sample_rate()?.or_else(|| doc.metadata.as_ref().and_then(|m| m.sample_rate_hz)))
}

fn save_result(doc: &ResultDocument, path: &Path) -> Result<()> {
    result_doc::save(doc, path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { model, samples, burn_in, seed, innovations, out } => {
            let m = ModelDocument::load(&model)?.to_model()?;
            let (x, w) = m.simulate(samples, burn_in, seed)?;
            let path = out.resolve("simulated.csv");
            save_timeseries(&path, &x)?;
            eprintln!("wrote {}", path.display());
            if let Some(p) = innovations {
                save_timeseries(&p, &w)?;
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Fit { data, out } => {
            if data.data.is_none() {
                return Err(CliError::Config("--data is required".into()));
            }
            let doc = data.model(&None)?;
            let report = doc.to_model()?.validate();
            if !report.stable {
                eprintln!("warning: fitted model is unstable (spectral radius {:.6})", report.spectral_radius);
            }
            let path = out.resolve("model.json");
            doc.save(&path)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Measure { model, data, measures, nfreq, magnitude_sq, out } => {
            let kinds = pipeline::parse_measures(&measures)?;
            let doc = data.model(&model)?;
            let req = MeasureRequest { kinds, n_points: nfreq, sample_rate_hz: sample_rate(&data, &doc)?, magnitude_sq };
            save_result(&pipeline::run_measure(&doc, &req)?, &out.resolve("measures.json"))?;
        }
        Command::Mir { model, data, kinds, nfreq, units, out } => {
            let kinds = pipeline::parse_mir_kinds(&kinds)?;
            let doc = data.model(&model)?;
            let units = if units == "bits" { Units::BitsPerSample } else { Units::NatsPerSample };
            let req = MirRequest { kinds, n_points: nfreq, sample_rate_hz: sample_rate(&data, &doc)?, units };
            let result = pipeline::run_mir(&doc, &req)?;
            for (name, m) in &result.mir {
                let unit = serde_json::to_value(m.units).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                println!("{name} [{unit}] row = target, column = source");
                for row in &m.values {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:.9}")).collect();
                    println!("  {}", cells.join("  "));
                }
            }
            save_result(&result, &out.resolve("mir.json"))?;
        }
        Command::Verify { seed, models, nfreq, out } => {
            let doc = pipeline::run_verify(&VerifyConfig { seed, models, grid_points: nfreq })?;
            for c in &doc.checks {
                println!(
                    "{} {:<24} max deviation {:.3e} (bound {:.0e})",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.max_deviation,
                    c.bound
                );
            }
            let path = out.resolve("verify.json");
            result_doc::save(&doc, &path)?;
            eprintln!("wrote {}", path.display());
            if !doc.passed {
                let failed = doc.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
                return Err(CliError::Verification { failed });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error: usage: {first} (see --help)");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(e.exit_code())
        }
    }
}
