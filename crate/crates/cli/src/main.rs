use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use tandyn_core::raster::{
    region_color, render_dynamical, render_parameter, with_workers, write_ppm,
};
use tandyn_core::verify::registered_checks;
use tandyn_core::{
    normalize_lambda, orbit, run_selected, ClassifyConfig, Complex64, EvalLimits, FatePalette,
    GridSpec, OrbitClassifier, OrbitEnd, ParamMode, ParamRaster,
};

#[derive(Parser, Debug)]
#[command(
    name = "tandyn",
    version,
    about = "Dynamics of z -> lambda + z + tan z"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct GridArgs {
    /// Viewport center as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    center: Option<Complex64>,
    /// Viewport width in plane units.
    #[arg(long, allow_hyphen_values = true)]
    width: Option<f64>,
    /// Viewport height in plane units.
    #[arg(long, allow_hyphen_values = true)]
    height: Option<f64>,
    /// Image size as WxH.
    #[arg(long, value_parser = parse_px, default_value = "800x800")]
    px: (usize, usize),
    /// Iteration budget per pixel.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output PPM file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print an orbit as CSV (step,re,im); the fate goes to stderr.
    Orbit {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Complex64,
        #[arg(long)]
        steps: usize,
    },
    /// Render the dynamical plane of one parameter.
    Render {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Render the parameter plane.
    Param {
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run numerical checks.
    Verify {
        /// Check name, or "all".
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override a tolerance, as NAME=VALUE; repeatable.
        #[arg(long = "tol", value_parser = parse_override)]
        tolerances: Vec<(String, f64)>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Analytic,
    Critical,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let err = || format!("expected RE,IM with two finite reals, got {s:?}");
    let (re, im) = s.split_once(',').ok_or_else(err)?;
    let re: f64 = re.trim().parse().map_err(|_| err())?;
    let im: f64 = im.trim().parse().map_err(|_| err())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(err());
    }
    Ok(Complex64::new(re, im))
}

fn parse_px(s: &str) -> Result<(usize, usize), String> {
    let err = || format!("expected WxH with positive integers, got {s:?}");
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(err)?;
    let w: usize = w.parse().map_err(|_| err())?;
    let h: usize = h.parse().map_err(|_| err())?;
    if w == 0 || h == 0 {
        return Err(err());
    }
    Ok((w, h))
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let err = || format!("expected NAME=VALUE, got {s:?}");
    let (name, value) = s.split_once('=').ok_or_else(err)?;
    let value: f64 = value.parse().map_err(|_| err())?;
    if value.is_nan() || value < 0.0 {
        return Err(err());
    }
    Ok((name.to_string(), value))
}

fn usage_error(kind: ErrorKind, msg: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, msg).exit()
}

impl GridArgs {
    fn spec(&self, center: Complex64, width: f64, height: f64) -> GridSpec {
        let spec = GridSpec {
            center: self.center.unwrap_or(center),
            width: self.width.unwrap_or(width),
            height: self.height.unwrap_or(height),
            px_w: self.px.0,
            px_h: self.px.1,
        };
        if let Err(e) = spec.validate() {
            usage_error(ErrorKind::ValueValidation, e);
        }
        spec
    }

    fn config(&self) -> ClassifyConfig {
        let cfg = ClassifyConfig {
            budget: self.max_iter,
            ..ClassifyConfig::default()
        };
        if let Err(e) = cfg.validate() {
            usage_error(ErrorKind::ValueValidation, e);
        }
        cfg
    }

    fn run<T: Send>(&self, op: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
        match self.workers {
            Some(0) => usage_error(ErrorKind::ValueValidation, "--workers must be at least 1"),
            Some(n) => Ok(with_workers(n, op)?),
            None => Ok(op()),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let limits = EvalLimits::default();
    match cli.command {
        Command::Orbit { lambda, z0, steps } => {
            let orb = orbit(lambda, z0, steps, &limits);
            let mut out = io::stdout().lock();
            writeln!(out, "step,re,im")?;
            for (n, z) in orb.points.iter().enumerate() {
                writeln!(out, "{n},{},{}", z.re, z.im)?;
            }
            match orb.end {
                OrbitEnd::Completed => {}
                OrbitEnd::PoleHit => eprintln!("orbit stopped: next iterate is a pole"),
                OrbitEnd::Escaped => eprintln!("orbit stopped: iterate exceeded the blow-up bound"),
            }
            let classifier =
                OrbitClassifier::new(normalize_lambda(lambda), ClassifyConfig::default(), limits)?;
            let verdict = classifier.classify_input_plane(z0);
            eprintln!("fate: {:?} after {} steps", verdict.fate, verdict.steps);
            Ok(true)
        }
        Command::Render { lambda, grid } => {
            let spec = grid.spec(Complex64::new(0.0, -1.0), 4.0 * PI, 4.0 * PI);
            let cfg = grid.config();
            let param = normalize_lambda(lambda);
            let raster = grid.run(|| render_dynamical(&param, &spec, &cfg, &limits))??;
            let palette = FatePalette { budget: cfg.budget };
            write_ppm(&raster, |c| palette.color(c), &grid.out)?;
            println!(
                "wrote {} ({}x{}, lambda region {})",
                grid.out.display(),
                spec.px_w,
                spec.px_h,
                param.region.name()
            );
            Ok(true)
        }
        Command::Param { mode, grid } => {
            let spec = grid.spec(Complex64::new(0.0, 1.5), 4.0 * PI, 6.0);
            let cfg = grid.config();
            let mode = match mode {
                Mode::Analytic => ParamMode::Analytic,
                Mode::Critical => ParamMode::CriticalOrbit,
            };
            let raster = grid.run(|| render_parameter(&spec, mode, &cfg, &limits))??;
            match &raster {
                ParamRaster::Analytic(r) => write_ppm(r, region_color, &grid.out),
                ParamRaster::CriticalOrbit(r) => {
                    let palette = FatePalette { budget: cfg.budget };
                    write_ppm(r, |c| palette.color(c), &grid.out)
                }
            }?;
            println!("wrote {} ({}x{})", grid.out.display(), spec.px_w, spec.px_h);
            Ok(true)
        }
        Command::Verify {
            check,
            seed,
            json,
            tolerances,
        } => {
            let registered = registered_checks();
            let names: Vec<&str> = if check == "all" {
                registered.clone()
            } else if registered.contains(&check.as_str()) {
                vec![check.as_str()]
            } else {
                usage_error(
                    ErrorKind::InvalidValue,
                    format!(
                        "unknown check {check:?}; registered: all, {}",
                        registered.join(", ")
                    ),
                )
            };
            let mut overrides = BTreeMap::new();
            for (name, tol) in tolerances {
                if !registered.contains(&name.as_str()) {
                    usage_error(
                        ErrorKind::InvalidValue,
                        format!("unknown check {name:?} in --tol"),
                    );
                }
                overrides.insert(name, tol);
            }
            let report = run_selected(&names, seed, &overrides)?;
            print!("{}", report.to_text());
            if let Some(path) = json {
                report.write_json(&path)?;
            }
            Ok(report.all_passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
