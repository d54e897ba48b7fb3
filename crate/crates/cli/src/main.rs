mod bc;
mod error;
mod evolve;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qwalls::boundary::reflection_phase;
use qwalls::carpet::{box_counting_dimension, CarpetSeries, DEFAULT_N_MAX};
use qwalls::forms::{form_descriptor, star, CompositionCase};
use qwalls::model::{Interval, PhysicalConfig};
use qwalls::movingwalls::gravitational_scales;
use qwalls::spectral::{solve_airy_levels, solve_spectrum, spectrum_csv_rows, SpectrumOptions};
use qwalls::trotter::{bump, convergence_report, TrotterProblem};

use crate::bc::{parse_bc, BC_HELP};
use crate::error::{CliError, CliResult};
use crate::output::{num, Output, Units};

const UNITS: &str = "Units: hbar = 1 and m = 1/2 by default, so hbar^2/2m = 1; lengths are measured in units of l0 = 1 and \
energies in hbar^2/(2 m l0^2). Override with --hbar, --mass and --l0. Set QWALLS_THREADS to cap worker threads.";

#[derive(Parser, Debug)]
#[command(name = "qwalls", version, about = "Quantum particle in a box with general and moving walls", after_help = UNITS)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Reduced Planck constant
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,
    /// Particle mass
    #[arg(long, global = true, default_value_t = 0.5)]
    mass: f64,
    /// Reference length
    #[arg(long, global = true, default_value_t = 1.0)]
    l0: f64,
    /// Write data files and manifest.json into this directory instead of stdout/stderr
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues and eigenfunction coefficients on [a, a + l]
    #[command(after_help = UNITS)]
    Spectrum {
        #[arg(long, help = BC_HELP)]
        bc: String,
        /// Interval width
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Left endpoint
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        /// Energy cutoff
        #[arg(long)]
        emax: f64,
    },
    /// Flat initial state evolved by the theta series at rescaled time tau
    #[command(after_help = UNITS)]
    Carpet {
        /// Time in units of the revival time
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Sample points in xi on [-1/2, 1/2]
        #[arg(long, default_value_t = 4097)]
        points: usize,
        /// Box width, sets the tail tolerance
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Also estimate the box-counting dimension of |theta|^2
        #[arg(long)]
        dimension: bool,
        /// Smallest box exponent (boxes of width 2^-k)
        #[arg(long, default_value_t = 4)]
        scale_lo: u32,
        /// Largest box exponent, needs at least 2^k points
        #[arg(long, default_value_t = 12)]
        scale_hi: u32,
    },
    /// Moving-wall evolution from a JSON file {l0, M, dt, t_end, l, d}; l and d are expressions in t (e.g. "1 + 0.1*math::sin(t)")
    #[command(after_help = UNITS)]
    Evolve {
        /// Trajectory file
        #[arg(long)]
        input: PathBuf,
    },
    /// Alternating evolution between two boundary conditions against the composed one
    #[command(after_help = UNITS)]
    Trotter {
        #[arg(long, help = BC_HELP)]
        bc_u: String,
        #[arg(long, help = BC_HELP)]
        bc_v: String,
        /// Total time of each alternating run
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        /// Increasing list of pair counts
        #[arg(long, value_delimiter = ',', default_value = "8,32,128,256")]
        n_list: Vec<usize>,
        /// Eigenmodes kept per boundary condition
        #[arg(long, default_value_t = 64)]
        modes: usize,
        /// Interval width
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        /// Initial state ((x-a)(b-x))^p
        #[arg(long, default_value_t = 4)]
        bump_power: i32,
    },
    /// Boundary condition produced by rapid alternation of two others
    #[command(after_help = UNITS)]
    Compose {
        #[arg(long, help = BC_HELP)]
        u: String,
        #[arg(long, help = BC_HELP)]
        v: String,
    },
    /// Levels of a box of one gravitational length in a uniform field
    #[command(after_help = UNITS)]
    Airy {
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Field strength; adds energies m g l_g eps_n
        #[arg(long)]
        g: Option<f64>,
    },
    /// Reflection phase of a plane wave off a wall with Robin angle alpha
    #[command(after_help = UNITS)]
    Reflect {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Wavenumber
        #[arg(long)]
        k: f64,
    },
}

fn units(cfg: &PhysicalConfig) -> Units {
    Units { hbar: cfg.hbar, mass: cfg.mass, l0: cfg.l0, convention: "hbar = 1, m = 1/2 unless overridden" }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let config = PhysicalConfig::new(g.hbar, g.mass, g.l0)?;
    let mut out = Output::new(g.out.clone())?;
    let (name, params) = match &cli.command {
        Command::Spectrum { bc, l, a, emax } => {
            let u = parse_bc(bc)?;
            let iv = Interval::new(*a, a + l)?;
            let modes = solve_spectrum(&u, &iv, &config, *emax, &SpectrumOptions::default())?;
            let rows: Vec<Vec<String>> = spectrum_csv_rows(&modes).into_iter().map(|r| r.to_vec()).collect();
            out.csv("spectrum", &["index", "branch", "k_or_kappa", "energy", "re_c1", "im_c1", "re_c2", "im_c2"], &rows)?;
            ("spectrum", json!({"bc": u, "a": a, "l": l, "emax": emax}))
        }
        Command::Carpet { tau, n_max, points, l, dimension, scale_lo, scale_hi } => {
            let s = CarpetSeries::new(*n_max, *l)?;
            let grid = s.theta_grid(*tau, *points)?;
            let rows: Vec<Vec<String>> = grid
                .iter()
                .map(|(x, z)| vec![num(*x), num(z.re), num(z.im), num(z.norm_sqr())])
                .collect();
            out.csv("carpet", &["xi", "re_theta", "im_theta", "intensity"], &rows)?;
            let dim = if *dimension {
                Some(box_counting_dimension(&s.profile(*tau, *points)?, *scale_lo..=*scale_hi)?.dimension)
            } else {
                None
            };
            out.sidecar(
                "carpet_meta",
                &json!({"tau": tau, "n_max": n_max, "tail_bound": s.tail_bound(), "dimension_estimate": dim,
                        "revival_fidelity": s.revival_fidelity(*tau)}),
            )?;
            ("carpet", json!({"tau": tau, "n_max": n_max, "points": points, "l": l, "dimension": dimension,
                              "scales": [scale_lo, scale_hi]}))
        }
        Command::Evolve { input } => {
            let text = std::fs::read_to_string(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
            let spec: evolve::EvolveSpec = serde_json::from_str(&text)?;
            let rows = evolve::run(&spec, config.hbar, config.mass)?;
            out.csv("evolve", &["t", "norm", "energy", "lhs_rate", "rhs_rate"], &rows)?;
            ("evolve", serde_json::to_value(&spec)?)
        }
        Command::Trotter { bc_u, bc_v, t, n_list, modes, l, bump_power } => {
            let (u, v) = (parse_bc(bc_u)?, parse_bc(bc_v)?);
            if n_list.is_empty() || n_list.contains(&0) {
                return Err(CliError::Args("n-list needs positive entries".into()));
            }
            let iv = Interval::new(0.0, *l)?;
            let p = TrotterProblem::new(&u, &v, iv, &config, *modes, bump(&iv, *bump_power))?;
            let rep = convergence_report(&p, *t, n_list)?;
            let rows: Vec<Vec<String>> = rep
                .rows
                .iter()
                .map(|r| vec![r.n.to_string(), num(r.error), num(r.norm_deficit)])
                .collect();
            out.csv("trotter", &["N", "error", "norm_deficit"], &rows)?;
            out.sidecar(
                "trotter_summary",
                &json!({"composed": rep.composed, "composed_label": rep.composed.label(), "fitted_order": rep.fitted_order,
                        "t": t, "modes": rep.modes,
                        "isometry_defects": [p.u.isometry_defect, p.v.isometry_defect, p.w.isometry_defect]}),
            )?;
            ("trotter", json!({"bc_u": u, "bc_v": v, "t": t, "n_list": n_list, "modes": modes, "l": l, "bump_power": bump_power}))
        }
        Command::Compose { u, v } => {
            let (u, v) = (parse_bc(u)?, parse_bc(v)?);
            let w = star(&u, &v, config.l0);
            let case = |b| CompositionCase::from(&form_descriptor(b, config.l0));
            out.json(
                "compose",
                &json!({"w": w, "w_label": w.label(), "case_u": case(&u), "case_v": case(&v), "case_w": case(&w)}),
            )?;
            ("compose", json!({"u": u, "v": v}))
        }
        Command::Airy { levels, g: field } => {
            let eps = solve_airy_levels(*levels)?;
            let scale = field.map(|gv| gravitational_scales(&config, gv)).transpose()?;
            let rows: Vec<Vec<String>> = eps
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut r = vec![(i + 1).to_string(), num(*e)];
                    if let Some((_, unit)) = scale {
                        r.push(num(e * unit));
                    }
                    r
                })
                .collect();
            let header: &[&str] = if scale.is_some() { &["index", "epsilon", "energy"] } else { &["index", "epsilon"] };
            out.csv("airy", header, &rows)?;
            ("airy", json!({"levels": levels, "g": field}))
        }
        Command::Reflect { alpha, k } => {
            let beta = reflection_phase(*alpha, *k, config.l0)?;
            out.json("reflect", &json!({"alpha": alpha, "k": k, "l0": config.l0, "beta": beta}))?;
            ("reflect", json!({"alpha": alpha, "k": k}))
        }
    };
    out.finish(name, params, units(&config))
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("QWALLS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Args(format!("QWALLS_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Args(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
