use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use levi_core::analytic::{self, Frame, Scheme};
use levi_core::claims::claims_report;
use levi_core::config::{load_config, LoadedConfig};
use levi_core::model::SubspaceState;
use levi_core::oracle::{run_oracle, OracleConfig, DEFAULT_SEED};
use levi_core::physics::{balance_drive, bare_couplings, derive_rates, photon_fluctuation_report};
use levi_core::sweep::{run_sweep, run_sweep_on, write_csv, SweepSpec};
use levi_core::units::{from_angular, khz};
use levi_core::Error;

#[derive(Parser)]
#[command(name = "levi", version, about = "Librational–translational state transfer for a levitated nanoparticle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive couplings and effective rates from a configuration file
    Derive {
        config: PathBuf,
        #[arg(long)]
        json: bool,
        /// also solve for the Ω₂ that makes G₁ = G₂
        #[arg(long)]
        balance: bool,
    },
    /// Tabulate the closed-form amplitudes of one scheme as CSV
    Evolve(EvolveArgs),
    /// Run the sweeps defined in a configuration file
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// run only the sweep with this name
        #[arg(long)]
        name: Option<String>,
    },
    /// Compare closed forms against numerical propagation
    Oracle {
        #[arg(long, default_value_t = 100)]
        tuples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Quoted numbers against computed ones
    Claims {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long, value_parser = parse_scheme)]
    scheme: Scheme,
    /// G/2π, or G₃/2π for the beam-splitter scheme
    #[arg(long)]
    g_khz: f64,
    #[arg(long, default_value_t = 0.0)]
    delta_khz: f64,
    #[arg(long, default_value_t = 0.0)]
    kappa_khz: f64,
    /// end time in seconds; twice the transfer time when omitted
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// G₁/2π for the beam-splitter scheme (adds the common phase)
    #[arg(long)]
    g1_khz: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Derive { config, json, balance } => derive(&config, json, balance),
        Command::Evolve(args) => evolve(&args),
        Command::Sweep { config, out, name } => sweep(&config, &out, name.as_deref()),
        Command::Oracle { tuples, seed, json } => oracle(tuples, seed, json),
        Command::Claims { config, json } => claims(&config, json),
    }
}

fn print_warnings(cfg: &LoadedConfig) {
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
}

fn derive(path: &Path, json: bool, balance: bool) -> Result<ExitCode, Error> {
    let cfg = load_config(path)?;
    print_warnings(&cfg);
    let bare = bare_couplings(&cfg.setup)?;
    let rates = cfg.drives.as_ref().map(|d| derive_rates(&cfg.setup, d)).transpose()?;
    let balanced = match (&cfg.drives, balance) {
        (Some(d), true) => Some(balance_drive(&cfg.setup, d)?),
        (None, true) => return Err(Error::InvalidInput("--balance needs a drives block".into())),
        _ => None,
    };

    if json {
        let v = serde_json::json!({
            "bare": bare,
            "rates": rates,
            "balanced_rabi2": balanced,
            "warnings": cfg.warnings,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("values serialize"));
        return Ok(ExitCode::SUCCESS);
    }
    let i = bare.inertia;
    let s = bare.susceptibility;
    println!("mass                 {:.6e} kg", i.mass);
    println!("moment of inertia    {:.6e} kg m^2", i.moment);
    println!("susceptibility s1,s2 {:.6} {:.6}", s.s1, s.s2);
    println!("g_ab                 {:.6e} rad/s  (g_ab/2π = {:.6e} Hz)", bare.g_ab, from_angular(bare.g_ab));
    println!("g_ac                 {:.6e} rad/s  (g_ac/2π = {:.6e} Hz)", bare.g_ac, from_angular(bare.g_ac));
    println!("kappa/2π             {:.6} kHz", from_angular(bare.kappa) / 1e3);
    match rates {
        Some(r) => {
            println!("|alpha1|, |alpha2|   {:.6e} {:.6e}", r.alpha1.norm(), r.alpha2.norm());
            println!("beta, gamma          {:.6e} {:.6e}", r.beta, r.gamma);
            for (name, v) in [("G1", r.g1), ("G2", r.g2), ("G3", r.g3)] {
                println!("{name}/2π               {:.6e} Hz", from_angular(v));
            }
            for (n, f) in photon_fluctuation_report(r.alpha1, r.alpha2).iter().enumerate() {
                println!("sqrt|alpha{}|         {:.4e} (linear/nonlinear {:.4e})", n + 1, f.sqrt, f.ratio);
            }
        }
        None => println!("no drives configured: derive-only"),
    }
    if let Some(b) = balanced {
        println!("balancing Omega2/2π  {:.6e} Hz", from_angular(b));
    }
    Ok(ExitCode::SUCCESS)
}

fn evolve(a: &EvolveArgs) -> Result<ExitCode, Error> {
    let (g, delta, kappa) = (khz(a.g_khz), khz(a.delta_khz), khz(a.kappa_khz));
    if a.steps < 1 {
        return Err(Error::InvalidInput("--steps must be at least 1".into()));
    }
    let t_end = match a.t_end {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Error::InvalidInput(format!("--t-end must be positive, got {t}"))),
        None => 2.0 * analytic::transfer_time(a.scheme, g, delta, kappa)?,
    };
    let state_at = |t: f64| -> Result<SubspaceState, Error> {
        match (a.scheme, a.g1_khz) {
            (Scheme::Beamsplitter, Some(g1)) => {
                let (c01, c10) = analytic::beamsplitter_amplitudes(t, khz(g1), g, Frame::Rotating, None)?;
                Ok(SubspaceState::new(c01, c10, Default::default()))
            }
            _ => analytic::amplitudes(a.scheme, t, g, delta, kappa),
        }
    };

    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "t,re_c001,im_c001,re_c010,im_c010,re_c100,im_c100,P,F")?;
    for k in 0..=a.steps {
        let t = t_end * k as f64 / a.steps as f64;
        let s = state_at(t)?;
        let (f, p) = analytic::fidelity_and_probability(&s)?;
        write!(w, "{t:.11e}")?;
        for z in s.as_array() {
            write!(w, ",{:.11e},{:.11e}", z.re, z.im)?;
        }
        writeln!(w, ",{p:.11e},{f:.11e}")?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn thread_cap() -> Result<Option<usize>, Error> {
    match std::env::var("LEVI_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidInput(format!("LEVI_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn output_path(out: &Path, spec: &SweepSpec, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}-{}.csv", spec.name))
}

fn sweep(path: &Path, out: &Path, name: Option<&str>) -> Result<ExitCode, Error> {
    let cfg = load_config(path)?;
    print_warnings(&cfg);
    let specs: Vec<&SweepSpec> = cfg.sweeps.iter().filter(|s| name.is_none_or(|n| s.name == n)).collect();
    if specs.is_empty() {
        return Err(Error::Spec(match name {
            Some(n) => format!("no sweep named `{n}` in {}", path.display()),
            None => format!("{} defines no sweeps", path.display()),
        }));
    }
    let threads = thread_cap()?;
    for spec in &specs {
        let result = match threads {
            Some(n) => run_sweep_on(spec, n)?,
            None => run_sweep(spec)?,
        };
        let target = output_path(out, spec, specs.len() > 1);
        let mut w = BufWriter::new(File::create(&target)?);
        write_csv(&result, &mut w)?;
        w.flush()?;
        let bad = result.cells.iter().filter(|c| c.fidelity.is_nan()).count();
        eprintln!(
            "{}: {}×{} cells ({bad} without transfer) -> {}",
            spec.name,
            spec.axis1.count,
            spec.axis2.count,
            target.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(tuples: usize, seed: u64, json: bool) -> Result<ExitCode, Error> {
    let cfg = OracleConfig {
        seed,
        random_tuples: tuples,
        ..OracleConfig::default()
    };
    let s = run_oracle(&cfg)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&s).expect("summary serializes"));
    } else {
        println!(
            "max deviation {:.3e} over {} cases (seed {:#x}, {} redrawn, tolerance {:.0e}): {}",
            s.max_deviation,
            s.cases.len(),
            s.seed,
            s.redrawn,
            s.tolerance,
            if s.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(if s.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn claims(path: &Path, json: bool) -> Result<ExitCode, Error> {
    let cfg = load_config(path)?;
    let report = claims_report(&cfg.setup, cfg.drives.as_ref())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", report.render_text());
    }
    Ok(ExitCode::SUCCESS)
}
