use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freqlim::freqgram::{h2_norm_sq, h2w_norm_sq};
use freqlim::reducers::{reduce, InitPolicy, Method, OptimizerOptions, ReductionReport};
use freqlim::{FrequencyBand, StateSpaceModel, StructureMask};

mod output;

use output::{frequency_grid, write_metrics, write_response, Failure};

/// Frequency-limited model order reduction.
#[derive(Parser)]
#[command(name = "freqlim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a state-space model with one or more methods.
    Reduce(ReduceArgs),
    /// Print band-limited and standard norms of a model.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct ReduceArgs {
    /// Model JSON file with keys A, B, C, D.
    #[arg(long)]
    model: PathBuf,
    /// Reduced state dimension.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    order: u64,
    /// Frequency band in rad/s, e.g. "0:1.7" or "0.5:2,3:inf".
    #[arg(long)]
    band: FrequencyBand,
    /// Comma-separated methods: hankel, gawronski, modgawronski, proposed.
    #[arg(long, value_delimiter = ',', default_value = "hankel,gawronski,modgawronski,proposed")]
    methods: Vec<Method>,
    /// Structure mask JSON (binary A, B, C, D arrays) for the proposed method.
    #[arg(long, conflicts_with = "free_feedthrough")]
    mask: Option<PathBuf>,
    /// Let the proposed method optimize D as well (bounded bands only).
    #[arg(long)]
    free_feedthrough: bool,
    /// Starting point of the proposed method: auto, gawronski or hankel.
    #[arg(long, default_value = "auto")]
    init: InitPolicy,
    /// Directory for reduced models and CSV output.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write magnitude-response CSVs with this many points per band interval.
    #[arg(long, num_args = 0..=1, default_missing_value = "400", value_parser = clap::value_parser!(u64).range(2..))]
    respgrid: Option<u64>,
    /// Iteration cap of the proposed method.
    #[arg(long, default_value_t = OptimizerOptions::default().max_iterations)]
    max_iterations: usize,
    /// Gradient tolerance of the proposed method.
    #[arg(long, default_value_t = OptimizerOptions::default().gradient_tolerance)]
    gradient_tolerance: f64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    band: FrequencyBand,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Reduce(args) => cmd_reduce(&args),
        Command::Analyze(args) => cmd_analyze(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(1)
        }
    }
}

fn cmd_reduce(args: &ReduceArgs) -> Result<u8, Failure> {
    let model = StateSpaceModel::read(&args.model)?;
    let r = usize::try_from(args.order).map_err(|_| Failure::msg("order: value too large"))?;
    let (m, p) = (model.inputs(), model.outputs());
    let mask = match (&args.mask, args.free_feedthrough) {
        (Some(path), _) => {
            let mask = StructureMask::read(path)?;
            mask.check_shape(r, m, p).map_err(|e| Failure::msg(format!("mask {}: {e}", path.display())))?;
            Some(mask)
        }
        (None, true) => Some(StructureMask::full(r, m, p)),
        (None, false) => None,
    };
    let opts = OptimizerOptions {
        max_iterations: args.max_iterations,
        gradient_tolerance: args.gradient_tolerance,
        ..OptimizerOptions::default()
    };
    opts.validate().map_err(|e| Failure::msg(format!("optimizer options: {e}")))?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::io(&args.out_dir, e))?;

    let grid = args
        .respgrid
        .map(|n| frequency_grid(&args.band, n as usize))
        .transpose()?;
    if let Some(grid) = &grid {
        write_response(&args.out_dir.join("response_full.csv"), &model, grid)?;
    }

    let mut reports: Vec<ReductionReport> = Vec::new();
    for &method in &args.methods {
        let (reduced, report) = reduce(method, &model, r, &args.band, mask.as_ref(), args.init, &opts)
            .map_err(|e| Failure::msg(format!("method {method}: {e}")))?;
        let path = args.out_dir.join(format!("{method}.json"));
        reduced.write(&path)?;
        if let Some(grid) = &grid {
            write_response(&args.out_dir.join(format!("response_{method}.csv")), &reduced, grid)?;
            let error = StateSpaceModel::error_system(&model, &reduced)?;
            write_response(&args.out_dir.join(format!("error_{method}.csv")), &error, grid)?;
        }
        if !report.stable {
            eprintln!(
                "warning: {method} produced an unstable model (largest real part {:e})",
                report.max_real_eig
            );
        }
        reports.push(report);
    }
    let table = write_metrics(&args.out_dir.join("metrics.csv"), &reports)?;
    print!("{table}");
    Ok(if reports.iter().all(|r| r.stable) { 0 } else { 2 })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let model = StateSpaceModel::read(&args.model)?;
    let (stable, max_real_eig) = model.is_hurwitz()?;
    let name = args.model.display();
    if !stable {
        return Err(Failure::msg(format!(
            "{name}: model is unstable (largest real part {max_real_eig:e}); norms are undefined"
        )));
    }
    let h2w = h2w_norm_sq(&model, &args.band)?.max(0.0).sqrt();
    println!("h2w_norm: {}", output::sci(h2w));
    let strictly_proper = model.d().iter().all(|x| *x == 0.0);
    if strictly_proper {
        println!("h2_norm: {}", output::sci(h2_norm_sq(&model)?.max(0.0).sqrt()));
    } else {
        println!("h2_norm: -- (D is nonzero)");
    }
    println!("max_real_eig: {}", output::sci(max_real_eig));
    println!("theta: {}", output::sci(args.band.theta()));
    Ok(0)
}
