//! `allspeed` command-line tool: runs problems and the stand-alone analyses.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use allspeed::acoustics::{stability_scan, AcousticParams};
use allspeed::diagnostics::radial_scatter;
use allspeed::driver::{run, Scheme};
use allspeed::grid::Boundary;
use allspeed::io::{write_scatter_csv, OutputDir};
use allspeed::problems::Problem;
use allspeed::toy::{half_life, toy_csv, toy_explicit, toy_implicit, ToyRun};
use allspeed_cli::{PartialConfig, RunConfig};
use allspeed_oracles::nullspace::max_divergence;
use allspeed_oracles::riemann::{sample_cells, RiemannSolution};
use allspeed_oracles::{divergence_nullspace_sample, Prim1d};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "allspeed",
    version,
    about = "All-speed finite-volume schemes for the 2D Euler equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a test problem, writing dumps and diagnostics.
    Run(RunArgs),
    /// Spectral radius of the multi-d acoustic scheme over a wavenumber grid.
    StabilityScan(ScanArgs),
    /// Scalar relaxation model `dq/dt = -(q - a)/eps` with `dt = eps tau`.
    Toy(ToyArgs),
    /// Random velocity field in the kernel of the vertex divergence.
    SampleNullspace(NullspaceArgs),
    /// Exact solution of a 1D Riemann problem.
    Riemann(RiemannArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<Problem>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dump_every: Option<f64>,
    #[arg(long)]
    diag_every: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1.0)]
    cfl: f64,
    /// Points per direction of the inclusive grid over [-pi, pi].
    #[arg(long, default_value_t = 64)]
    n: usize,
    /// Mach parameter of the acoustic system (the result depends only on the CFL number).
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value = "stability.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    q0: f64,
    /// Attractor `a`.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Use implicit instead of explicit Euler.
    #[arg(long)]
    implicit: bool,
    #[arg(long, default_value = "toy.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct NullspaceArgs {
    #[arg(long, default_value_t = 12)]
    nx: usize,
    #[arg(long, default_value_t = 12)]
    ny: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "nullspace.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct RiemannArgs {
    /// Left state `rho,u,p`.
    #[arg(long, default_value = "1,0,1", value_parser = parse_state)]
    left: Prim1d,
    /// Right state `rho,u,p`.
    #[arg(long, default_value = "0.125,0,0.1", value_parser = parse_state)]
    right: Prim1d,
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    t: f64,
    /// Cells on [0, 1], jump at 0.5.
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value = "riemann.csv")]
    out: PathBuf,
}

fn parse_state(s: &str) -> Result<Prim1d, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [rho, u, p] => Ok(Prim1d::new(rho, u, p)),
        _ => Err(format!("expected rho,u,p, got {s:?}")),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn resolve_run(args: RunArgs) -> anyhow::Result<RunConfig> {
    let file = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            PartialConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        problem: args.problem,
        scheme: args.scheme,
        nx: args.nx,
        ny: args.ny,
        eps: args.eps,
        cfl: args.cfl,
        t_end: args.t_end,
        out: args.out,
        dump_every: args.dump_every,
        diag_every: args.diag_every,
        ..Default::default()
    };
    Ok(file.overridden_by(flags).resolve()?)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let cfg = resolve_run(args)?;
    let initial = cfg.problem.build()?;
    let mut out = OutputDir::create(&cfg.out)?;
    fs::write(cfg.out.join("run.cfg"), cfg.to_config_text())?;
    let rec = run(&cfg.scheme, initial, &mut out)?;
    if cfg.problem.problem == Problem::RadialSod {
        let ((x0, x1), (y0, y1)) = rec.field.spec().extent();
        let center = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let pts = radial_scatter(&rec.field, cfg.scheme.gamma, center)?;
        let mut w = create(&cfg.out.join("scatter.csv"))?;
        write_scatter_csv(&mut w, &pts)?;
        w.flush()?;
    }
    println!(
        "{} with {}: t = {} after {} steps ({} halvings) in {:.2?}; output in {}",
        cfg.problem.problem,
        cfg.scheme.scheme,
        rec.time,
        rec.steps,
        rec.halvings,
        rec.wall_time,
        out.dir().display()
    );
    if let Some(err) = rec.failure {
        bail!("run stopped early: {err}");
    }
    Ok(())
}

fn cmd_scan(args: ScanArgs) -> anyhow::Result<()> {
    let h = 1.0 / args.n as f64;
    let prm = AcousticParams::new(1.0, args.eps, h, h, Boundary::Periodic)?;
    let probes = stability_scan(args.n, &prm, args.cfl)?;
    let mut w = create(&args.out)?;
    writeln!(w, "beta_x,beta_y,spectral_radius")?;
    for p in &probes {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e}",
            p.beta_x, p.beta_y, p.spectral_radius
        )?;
    }
    w.flush()?;
    let worst = probes
        .iter()
        .max_by(|a, b| a.spectral_radius.total_cmp(&b.spectral_radius))
        .context("empty scan")?;
    println!(
        "max spectral radius {:.15} at (beta_x, beta_y) = ({:.6}, {:.6}); CFL {}, {}x{} grid -> {}",
        worst.spectral_radius,
        worst.beta_x,
        worst.beta_y,
        args.cfl,
        args.n,
        args.n,
        args.out.display()
    );
    Ok(())
}

fn cmd_toy(args: ToyArgs) -> anyhow::Result<()> {
    let r = ToyRun {
        q0: args.q0,
        a: args.a,
        eps: args.eps,
        tau: args.tau,
        n: args.steps,
    };
    let (seq, predicted) = if args.implicit {
        (toy_implicit(&r)?, r.implicit_half_life())
    } else {
        if !r.explicit_is_stable() {
            eprintln!("warning: explicit Euler is unstable for tau = {}", r.tau);
        }
        (toy_explicit(&r), r.explicit_half_life())
    };
    let mut w = create(&args.out)?;
    w.write_all(toy_csv(&seq, r.dt()).as_bytes())?;
    w.flush()?;
    match half_life(&seq, r.a, r.dt()) {
        Ok(t) => println!(
            "half-life {t:.6e} (predicted {predicted:.6e}, dt {:.3e})",
            r.dt()
        ),
        Err(e) => println!("no half-life: {e}"),
    }
    Ok(())
}

fn cmd_nullspace(args: NullspaceArgs) -> anyhow::Result<()> {
    let (dx, dy) = (1.0 / args.nx as f64, 1.0 / args.ny as f64);
    let s = divergence_nullspace_sample(args.nx, args.ny, dx, dy, args.seed)?;
    let mut w = create(&args.out)?;
    writeln!(w, "i,j,u,v")?;
    for j in 0..s.ny {
        for i in 0..s.nx {
            let k = j * s.nx + i;
            writeln!(w, "{i},{j},{:.17e},{:.17e}", s.u[k], s.v[k])?;
        }
    }
    w.flush()?;
    println!(
        "{}x{} sample (seed {}), max vertex divergence {:.3e} -> {}",
        s.nx,
        s.ny,
        args.seed,
        max_divergence(&s, dx, dy),
        args.out.display()
    );
    Ok(())
}

fn cmd_riemann(args: RiemannArgs) -> anyhow::Result<()> {
    let sol = RiemannSolution::solve(args.left, args.right, args.gamma)?;
    let cells = sample_cells(&sol, args.n, (0.0, 1.0), 0.5, args.t, 16);
    let mut w = create(&args.out)?;
    writeln!(w, "x,rho,u,p")?;
    let dx = 1.0 / args.n as f64;
    for (i, c) in cells.iter().enumerate() {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e}",
            (i as f64 + 0.5) * dx,
            c.rho,
            c.u,
            c.p
        )?;
    }
    w.flush()?;
    println!(
        "p* = {:.6}, u* = {:.6} ({:?} | {:?}) -> {}",
        sol.p_star,
        sol.u_star,
        sol.left_wave,
        sol.right_wave,
        args.out.display()
    );
    Ok(())
}

/// Caps the worker pool at `ALLSPEED_THREADS` if set.
fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("ALLSPEED_THREADS") {
        let n: usize =
            v.parse().ok().filter(|&n| n > 0).with_context(|| {
                format!("ALLSPEED_THREADS must be a positive integer, got {v:?}")
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::StabilityScan(a) => cmd_scan(a),
        Command::Toy(a) => cmd_toy(a),
        Command::SampleNullspace(a) => cmd_nullspace(a),
        Command::Riemann(a) => cmd_riemann(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
