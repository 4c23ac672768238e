use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use induction_core::driver::output::ErrorRow;
use induction_core::driver::{
    fitted_order, run, run_comparison_suite, run_convergence, run_fixed_dof_study, write_dispersion,
    write_stability_region, ExperimentConfig, SchemeId, StudyOptions,
};
use induction_core::{Error, Result};

#[derive(Parser)]
#[command(name = "induction", version, about = "Divergence-free induction-equation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a key = value file and/or flags.
    Run(RunArgs),
    /// Loop test with all four schemes and a merged summary.csv.
    Compare(CompareArgs),
    /// Loop test at a fixed number of degrees of freedom per direction.
    FixedDof(FixedDofArgs),
    /// Smooth-field convergence study written to errors.csv.
    Converge(ConvergeArgs),
    /// Semi-discrete dispersion relation of the SD scheme.
    Dispersion(DispersionArgs),
    /// |P(z)| of the ADER amplification polynomial on a grid.
    StabilityRegion(StabilityArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long = "c-h")]
    c_h: Option<f64>,
    #[arg(long = "c-p2")]
    c_p2: Option<f64>,
    #[arg(long)]
    outdir: Option<PathBuf>,
    #[arg(long)]
    diag_interval: Option<usize>,
    #[arg(long)]
    diag_dt: Option<f64>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = ".")]
    outdir: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    cfl: f64,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long, default_value_t = 10)]
    diag_interval: usize,
    #[arg(long)]
    diag_dt: Option<f64>,
}

impl Common {
    fn options(&self) -> StudyOptions {
        StudyOptions {
            outdir: self.outdir.clone(),
            cfl: self.cfl,
            t_final: self.tfinal,
            diag_interval: self.diag_interval,
            diag_dt: self.diag_dt,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 32)]
    elements: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FixedDofArgs {
    #[arg(long, default_value_t = 40)]
    dof: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,3,7")]
    degrees: Vec<usize>,
    #[arg(long, default_value = "ctsd_ader")]
    scheme: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, default_value = "ctsd_ader")]
    scheme: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    degrees: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    elements: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DispersionArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    dx: f64,
    #[arg(long, default_value_t = 1.0)]
    velocity: f64,
    #[arg(long, default_value = "dispersion.csv")]
    output: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    re_max: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    im_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    im_max: f64,
    #[arg(long, default_value_t = 201)]
    resolution: usize,
    #[arg(long, default_value = "stabregion.csv")]
    output: PathBuf,
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::parse(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("test", args.test.clone()),
        ("scheme", args.scheme.clone()),
        ("n", args.n.map(|v| v.to_string())),
        ("elements", args.elements.map(|v| v.to_string())),
        ("tfinal", args.tfinal.map(|v| v.to_string())),
        ("cfl", args.cfl.map(|v| v.to_string())),
        ("c_h", args.c_h.map(|v| v.to_string())),
        ("c_p2", args.c_p2.map(|v| v.to_string())),
        ("diag_interval", args.diag_interval.map(|v| v.to_string())),
        ("diag_dt", args.diag_dt.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, &v)?;
        }
    }
    if let Some(dir) = &args.outdir {
        config.outdir = dir.clone();
    }
    config.validate()?;
    Ok(config)
}

fn print_orders(rows: &[ErrorRow]) {
    let mut degrees: Vec<usize> = rows.iter().map(|r| r.n).collect();
    degrees.dedup();
    for n in degrees {
        match fitted_order(rows, n) {
            Some(p) => println!("n={n}: fitted order {p:.2}"),
            None => println!("n={n}: fitted order unavailable"),
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let config = run_config(&args)?;
            let out = run(&config)?;
            println!(
                "{} {} n={} N={}: {} steps to t={:.6}, E/E0={:.8}",
                config.test,
                config.scheme,
                config.degree,
                config.elements,
                out.steps,
                out.t,
                out.final_energy / out.initial_energy
            );
            println!("wrote {}", out.timeseries.display());
            if let Some(map) = out.fieldmap {
                println!("wrote {}", map.display());
            }
        }
        Command::Compare(args) => {
            let suite = run_comparison_suite(&args.degrees, args.elements, &args.common.options())?;
            for r in &suite.runs {
                println!(
                    "{} n={}: E/E0={:.8}",
                    r.config.scheme,
                    r.config.degree,
                    r.final_energy / r.initial_energy
                );
            }
            println!("wrote {}", suite.summary.display());
        }
        Command::FixedDof(args) => {
            let scheme: SchemeId = args.scheme.parse()?;
            let rows = run_fixed_dof_study(args.dof, &args.degrees, scheme, &args.common.options())?;
            for r in &rows {
                println!("n={} N={}: E/E0={:.8} at t={}", r.n, r.cells, r.energy, r.t);
            }
            println!("wrote {}", args.common.outdir.join("fixed_dof.csv").display());
        }
        Command::Converge(args) => {
            let scheme: SchemeId = args.scheme.parse()?;
            let rows = run_convergence(scheme, &args.degrees, &args.elements, &args.common.options())?;
            print_orders(&rows);
            println!("wrote {}", args.common.outdir.join("errors.csv").display());
        }
        Command::Dispersion(args) => {
            let rows = write_dispersion(&args.degrees, args.samples, args.dx, args.velocity, &args.output)?;
            println!("wrote {} rows to {}", rows.len(), args.output.display());
        }
        Command::StabilityRegion(args) => {
            let rows = write_stability_region(
                &args.degrees,
                (args.re_min, args.re_max),
                (args.im_min, args.im_max),
                args.resolution,
                &args.output,
            )?;
            println!("wrote {} rows to {}", rows.len(), args.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            report_code(&e)
        }
    }
}

fn report_code(e: &Error) -> ExitCode {
    ExitCode::from(e.exit_code() as u8)
}
