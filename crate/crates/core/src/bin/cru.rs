//! `cru`: batch front end for corpus augmentation, recognition, evaluation,
//! robustness sweeps and surveillance fetching.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cru_core::augment::{augment_corpus, synthetic_donors, AirspaceProfile};
use cru_core::config::{RunConfig, RunManifest};
use cru_core::corpus::{read_corpus, write_corpus};
use cru_core::eval::{
    parse_predictions, predict_corpus, predictions_csa, predictions_to_jsonl, sweep, Mode, SweepConfig, SweepParameter,
};
use cru_core::osn::{
    fetch_surveillance, Credentials, HttpProvider, OfflineProvider, SurveillanceProvider, SurveillanceQuery,
};
use cru_core::{AirlineRegistry, CruError};

#[derive(Parser)]
#[command(name = "cru", version, about = "Call-sign recognition for ATC transcripts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file, or a run manifest (JSON) to repeat a run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Airline registry TSV (built-in registry when omitted).
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Seed for every random draw; chosen and recorded when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (all cores when omitted).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate templated donor transcripts.
    Donors {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build an augmented corpus from donor transcripts.
    Augment {
        #[arg(long)]
        donors: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Output size (defaults to the number of donors).
        #[arg(long)]
        size: Option<usize>,
        /// Calibrate noise to this corpus WER in percent; 0 for a clean corpus.
        #[arg(long)]
        target_wer: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Predict the call-sign of every corpus sample.
    Recognize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_parser = parse_mode, default_value = "sur")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute call-sign accuracy of a predictions file.
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        /// Metrics JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Accuracy as a function of one surveillance parameter.
    Sweep {
        #[arg(long)]
        corpus: PathBuf,
        /// surveillance_size, identifier_dup_fraction or number_duplicates.
        #[arg(long, value_parser = parse_parameter)]
        parameter: SweepParameter,
        /// Comma-separated values (parameter default range when omitted).
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long, value_parser = parse_mode, default_value = "sur")]
        mode: Mode,
        /// Report JSON path; a CSV with the same stem is written beside it.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fetch the surveillance call-signs around a time and place.
    Fetch {
        /// Seconds since the Unix epoch.
        #[arg(long)]
        time: i64,
        #[arg(long, allow_negative_numbers = true)]
        lat: f64,
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long)]
        radius_km: Option<f64>,
        #[arg(long)]
        window_s: Option<u64>,
        /// Offline fixture instead of the HTTP API.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// API base URL (overrides the config).
        #[arg(long)]
        base_url: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: CruError| e.to_string())
}

fn parse_parameter(s: &str) -> Result<SweepParameter, String> {
    s.parse().map_err(|e: CruError| e.to_string())
}

/// Exit code 2 for usage and configuration problems, 1 for the rest.
enum Failure {
    Usage(CruError),
    Runtime(CruError),
}

impl From<CruError> for Failure {
    fn from(e: CruError) -> Self {
        Failure::Runtime(e)
    }
}

fn usage<T>(r: cru_core::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

struct Ctx {
    config: RunConfig,
    registry: AirlineRegistry,
    seed: u64,
    manifest: RunManifest,
}

fn setup(name: &str, common: &Common) -> Result<Ctx, Failure> {
    let mut config = match &common.config {
        Some(path) => usage(RunConfig::load(path))?,
        None => RunConfig::default(),
    };
    usage(config.matcher.load_confusions())?;
    let registry = match &common.registry {
        Some(path) => usage(AirlineRegistry::load(path))?,
        None => AirlineRegistry::builtin(),
    };
    let seed = common.seed.or(config.seed).unwrap_or_else(rand::random);
    config.seed = Some(seed);
    config.augment.seed = seed;
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(CruError::InvalidConfig(format!("--jobs: {e}"))))?;
    }
    let mut manifest = RunManifest::new(name, config.clone());
    if let Some(path) = &common.registry {
        manifest.inputs.push(path.clone());
    }
    Ok(Ctx {
        config,
        registry,
        seed,
        manifest,
    })
}

fn write_text(path: &Path, text: &str) -> cru_core::Result<()> {
    std::fs::write(path, text).map_err(|e| CruError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn finish(mut ctx: Ctx, artifact: &Path) -> Result<(), Failure> {
    ctx.manifest.config = ctx.config;
    ctx.manifest.seed = Some(ctx.seed);
    ctx.manifest.write_for(artifact)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Donors { count, out, common } => {
            let mut ctx = setup("donors", &common)?;
            let profile = usage(ctx.config.augment.profile(&ctx.registry))?;
            let donors = synthetic_donors(count, ctx.seed, &ctx.registry, &profile)?;
            write_corpus(&out, &donors)?;
            ctx.manifest.option("count", count);
            ctx.manifest.outputs.push(out.clone());
            finish(ctx, &out)
        }
        Command::Augment {
            donors,
            out,
            size,
            target_wer,
            common,
        } => {
            let mut ctx = setup("augment", &common)?;
            if let Some(size) = size {
                ctx.config.augment.size = Some(size);
            }
            if let Some(wer) = target_wer {
                ctx.config.augment.set_target_wer(wer);
            }
            usage(ctx.config.augment.validate())?;
            let base = read_corpus(&donors)?;
            let result = augment_corpus(&base, &ctx.config.augment, &ctx.registry)?;
            write_corpus(&out, &result.samples)?;
            ctx.manifest.inputs.push(donors);
            ctx.manifest.outputs.push(out.clone());
            ctx.manifest.realized_wer = result.realized_wer;
            if let Some(nm) = &result.noise {
                ctx.manifest.option(
                    "calibrated_noise",
                    json!({ "p_sub": nm.p_sub, "p_del": nm.p_del, "p_ins": nm.p_ins }),
                );
            }
            finish(ctx, &out)
        }
        Command::Recognize {
            corpus,
            mode,
            out,
            common,
        } => {
            let mut ctx = setup("recognize", &common)?;
            usage(ctx.config.matcher.validate())?;
            let samples = read_corpus(&corpus)?;
            let preds = predict_corpus(&samples, mode, &ctx.registry, &ctx.config.matcher);
            write_text(&out, &predictions_to_jsonl(&preds))?;
            ctx.manifest.option("mode", mode);
            ctx.manifest.inputs.push(corpus);
            ctx.manifest.outputs.push(out.clone());
            finish(ctx, &out)
        }
        Command::Evaluate {
            predictions,
            out,
            common,
        } => {
            let mut ctx = setup("evaluate", &common)?;
            let text = std::fs::read_to_string(&predictions).map_err(|e| CruError::Io {
                path: predictions.clone(),
                source: e,
            })?;
            let preds = parse_predictions(&text, &predictions.display().to_string())?;
            let csa = predictions_csa(&preds)?;
            let correct = preds.iter().filter(|p| p.is_correct()).count();
            let report = serde_json::to_string_pretty(&json!({ "csa": csa, "correct": correct, "n": preds.len() }))
                .expect("metrics serialize")
                + "\n";
            ctx.manifest.inputs.push(predictions);
            match out {
                Some(out) => {
                    write_text(&out, &report)?;
                    ctx.manifest.outputs.push(out.clone());
                    finish(ctx, &out)
                }
                None => {
                    print!("{report}");
                    Ok(())
                }
            }
        }
        Command::Sweep {
            corpus,
            parameter,
            values,
            mode,
            out,
            common,
        } => {
            let mut ctx = setup("sweep", &common)?;
            let values = values.unwrap_or_else(|| parameter.default_values());
            let samples = read_corpus(&corpus)?;
            // Describe the corpus from its own manifest when there is one.
            let corpus_manifest = RunManifest::read(RunManifest::path_for(&corpus)).ok();
            let cfg = SweepConfig {
                matcher: ctx.config.matcher.clone(),
                number_style: ctx.config.augment.number_style.clone(),
                airspace_profile: ctx.config.augment.airspace_profile.clone(),
                target_wer: corpus_manifest
                    .as_ref()
                    .and_then(|m| m.config.augment.noise.as_ref().and_then(|n| n.target_wer).or(Some(0.0))),
                corpus_seed: corpus_manifest.as_ref().and_then(|m| m.seed),
            };
            usage(AirspaceProfile::from_weights(&cfg.airspace_profile, &ctx.registry).map(|_| ()))?;
            let report = sweep(&samples, mode, parameter, &values, &ctx.registry, &cfg, ctx.seed)?;
            let csv = out.with_extension("csv");
            write_text(&out, &report.to_json())?;
            write_text(&csv, &report.to_csv())?;
            ctx.manifest.option("parameter", parameter);
            ctx.manifest.option("values", &values);
            ctx.manifest.option("mode", mode);
            ctx.manifest.inputs.push(corpus);
            ctx.manifest.outputs.extend([out.clone(), csv]);
            finish(ctx, &out)
        }
        Command::Fetch {
            time,
            lat,
            lon,
            radius_km,
            window_s,
            fixture,
            base_url,
            out,
            common,
        } => {
            let mut ctx = setup("fetch", &common)?;
            let query = SurveillanceQuery {
                timestamp: time,
                lat,
                lon,
                radius_km: radius_km.unwrap_or(ctx.config.fetch.radius_km),
                window_s: window_s.unwrap_or(ctx.config.fetch.window_s),
            };
            usage(query.validate())?;
            if let Some(url) = base_url {
                ctx.config.fetch.http.base_url = url;
            }
            let provider: Box<dyn SurveillanceProvider> = match &fixture {
                Some(path) => Box::new(usage(OfflineProvider::load(path))?),
                None => Box::new(usage(HttpProvider::new(
                    ctx.config.fetch.http.clone(),
                    Credentials::from_env(),
                ))?),
            };
            let result = fetch_surveillance(&query, provider.as_ref())?;
            let body = serde_json::to_string_pretty(&json!({
                "query": query,
                "callsigns": result.snapshot,
                "dropped": result.dropped,
            }))
            .expect("snapshot serializes")
                + "\n";
            write_text(&out, &body)?;
            ctx.manifest.option("query", query);
            ctx.manifest
                .option("provider", if fixture.is_some() { "offline" } else { "http" });
            ctx.manifest.inputs.extend(fixture);
            ctx.manifest.outputs.push(out.clone());
            finish(ctx, &out)
        }
    }
}

fn report(e: &CruError) {
    eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            report(&e);
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            report(&e);
            ExitCode::from(1)
        }
    }
}
