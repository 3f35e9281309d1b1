//! Command-line front end. The binary is a thin wrapper around this module;
//! everything here delegates to the library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
//! 3 numeric (convergence/optimization) failure.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::configs;
use crate::energy::{self, EnergyResult};
use crate::error::{Error, Result};
use crate::geometry::GaussianPotential;
use crate::optimize;
use crate::svg;
use crate::verify;

#[derive(Parser)]
#[command(
    name = "lattice-energy",
    version,
    about = "Gaussian energies of periodic point configurations",
    long_about = "Evaluates Gaussian-potential energies of lattices and shifted-lattice \
unions, optimizes shift parameters, traces critical curves and runs the full \
numerical verification suite. Configuration specs are presets like 'square', \
'hexagonal@1', 'honeycomb', 'rect:2', 'union2:hexagonal:1/3,1/3', \
'union3:1/3,1/3;2/3,2/3', 'cuboid:2,1/2', 'tensor:1:0,0.5*1:0' or inline JSON."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathChoice {
    Auto,
    Direct,
    Dual,
    Tensor,
    Agm,
}

#[derive(Subcommand)]
enum Command {
    /// Energy of one configuration at one Gaussian width.
    Energy {
        /// Configuration preset or JSON.
        spec: String,
        /// Gaussian width parameter.
        #[arg(long)]
        alpha: f64,
        /// Interpret alpha as exp(-pi alpha r^2) instead of exp(-alpha r^2).
        #[arg(long, default_value_t = false)]
        pi_scaled: bool,
        /// Certified absolute truncation tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Evaluation route (auto picks direct or dual by exponent size).
        #[arg(long, value_enum, default_value_t = PathChoice::Auto)]
        path: PathChoice,
        /// Emit JSON instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Energies of several configurations over an alpha grid, as CSV.
    Sweep {
        /// Configuration presets (two or more add margin columns vs the first).
        specs: Vec<String>,
        /// Grid 'lo:hi:n[:log|lin]'.
        #[arg(long, default_value = "0.1:10:20:log")]
        alpha_grid: String,
        /// Interpret alpha as exp(-pi alpha r^2).
        #[arg(long, default_value_t = false)]
        pi_scaled: bool,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shift optimization: union2, union3 or 1d.
    Optimize {
        /// Target problem: union2 | union3 | 1d.
        target: String,
        /// Lattice preset for union2 (square, hexagonal, rect:a).
        #[arg(long, default_value = "square")]
        lattice: String,
        /// Gaussian width. union3 always uses the pi-scaled convention.
        #[arg(long)]
        alpha: f64,
        /// Interpret alpha as exp(-pi alpha r^2) (union2 only; union3 is
        /// always pi-scaled, 1d always raw).
        #[arg(long, default_value_t = false)]
        pi_scaled: bool,
        /// Number of points for the 1d target.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Coarse grid resolution per axis.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Trace the two critical curves and their intersections.
    Curves {
        /// Width parameter (pi-scaled convention).
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Polyline + intersection CSV (stdout when omitted).
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// SVG rendering of the two curves.
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Emit the curve set as JSON on stdout instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Render a configuration as an SVG scatter plot.
    Render {
        spec: String,
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        #[arg(long)]
        out_svg: PathBuf,
    },
    /// Run the verification suite and write a JSON report.
    Verify {
        /// Per-evaluation truncation tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Number of alpha grid points for the global inequalities.
        #[arg(long, default_value_t = 200)]
        grid_points: usize,
        /// Marching grid for the curve tracer.
        #[arg(long, default_value_t = 512)]
        curve_grid: usize,
        /// Report file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::Validation(_)
        | Error::DegenerateLattice(_)
        | Error::UnsupportedDimension { .. } => 2,
        Error::Convergence(_) | Error::Optimization(_) => 3,
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("LATTICE_ENERGY_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", p.display()))),
    }
}

fn evaluate_energy(
    spec: &str,
    pot: &GaussianPotential,
    tol: f64,
    path: PathChoice,
) -> Result<EnergyResult> {
    let config = configs::parse_config(spec)?;
    match path {
        PathChoice::Direct => energy::energy_direct(&config, pot, tol),
        PathChoice::Dual => energy::energy_dual(&config, pot, tol),
        PathChoice::Auto => {
            if pot.raw_exponent() < 0.5 {
                energy::energy_dual(&config, pot, tol)
            } else {
                energy::energy_direct(&config, pot, tol)
            }
        }
        PathChoice::Tensor => {
            let factors = configs::tensor_factors(spec)?.ok_or_else(|| {
                Error::Validation(
                    "tensor path needs a 'tensor:' or 'cuboid:' spec".to_string(),
                )
            })?;
            energy::energy_tensor(&factors, pot, tol)
        }
        PathChoice::Agm => {
            if !spec.trim_start().starts_with("honeycomb") {
                return Err(Error::Validation(
                    "agm path applies to honeycomb configurations".to_string(),
                ));
            }
            // scale invariance moves any density into the width parameter:
            // honeycomb(rho) = rho^{-1/2} honeycomb(1)
            let alpha_pi = pot.raw_exponent() / (config.density() * PI);
            energy::honeycomb_energy_agm(alpha_pi, tol)
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(Error::Parse(format!(
            "grid must be 'lo:hi:n[:log|lin]', got '{spec}'"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid start '{}'", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid end '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count '{}'", parts[2])))?;
    let log = match parts.get(3) {
        None => true,
        Some(&"log") => true,
        Some(&"lin") => false,
        Some(other) => return Err(Error::Parse(format!("bad grid mode '{other}'"))),
    };
    if n == 0 || !(lo > 0.0) || !(hi >= lo) {
        return Err(Error::Parse(format!("grid '{spec}' is empty or unordered")));
    }
    if n == 1 || hi == lo {
        return Ok(vec![lo; n]);
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect())
}

fn cmd_energy(
    spec: &str,
    alpha: f64,
    pi_scaled: bool,
    tol: f64,
    path: PathChoice,
    json: bool,
) -> Result<()> {
    let pot = GaussianPotential::new(alpha, pi_scaled)?;
    let result = evaluate_energy(spec, &pot, tol, path)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "spec": spec,
                "alpha": alpha,
                "pi_scaled": pi_scaled,
                "value": result.value,
                "trunc_error": result.trunc_error,
                "radius": result.radius,
                "path": result.path.to_string(),
            })
        );
    } else {
        println!(
            "E = {:.15e} +- {:.3e} (path={}, radius={:.3}, alpha={}, pi_scaled={})",
            result.value, result.trunc_error, result.path, result.radius, alpha, pi_scaled
        );
    }
    Ok(())
}

fn cmd_sweep(
    specs: &[String],
    grid: &str,
    pi_scaled: bool,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Parse("sweep needs at least one configuration spec".to_string()));
    }
    // parse every spec once up front so errors surface before the sweep
    for s in specs {
        configs::parse_config(s)?;
    }
    let alphas = parse_grid(grid)?;
    let rows: Vec<Result<Vec<EnergyResult>>> = alphas
        .par_iter()
        .map(|&alpha| {
            let pot = GaussianPotential::new(alpha, pi_scaled)?;
            specs
                .iter()
                .map(|s| evaluate_energy(s, &pot, tol, PathChoice::Auto))
                .collect()
        })
        .collect();
    let mut csv = String::new();
    csv.push_str(&format!(
        "# lattice-energy sweep generated {}\n",
        chrono::Utc::now().to_rfc3339()
    ));
    csv.push_str(&format!(
        "# grid={grid} pi_scaled={pi_scaled} tol={tol:e}\n"
    ));
    csv.push_str("alpha");
    for s in specs {
        csv.push_str(&format!(",E[{s}],err[{s}]"));
    }
    for s in specs.iter().skip(1) {
        csv.push_str(&format!(",margin[{s}]"));
    }
    csv.push('\n');
    for (alpha, row) in alphas.iter().zip(rows) {
        let row = row?;
        // exponential formatting keeps the shortest round-trip digits while
        // staying readable when energies span hundreds of orders of magnitude
        csv.push_str(&format!("{alpha:e}"));
        for r in &row {
            csv.push_str(&format!(",{:e},{:e}", r.value, r.trunc_error));
        }
        for r in row.iter().skip(1) {
            csv.push_str(&format!(",{:e}", r.value - row[0].value));
        }
        csv.push('\n');
    }
    write_output(out, &csv)
}

fn cmd_optimize(
    target: &str,
    lattice: &str,
    alpha: f64,
    pi_scaled: bool,
    n: usize,
    grid: Option<usize>,
    tol: f64,
) -> Result<()> {
    match target {
        "union2" => {
            let lat = match lattice {
                "square" => crate::geometry::Lattice::integer(2),
                "hexagonal" => configs::hexagonal_lattice_unit(),
                other => {
                    if let Some(a) = other.strip_prefix("rect:") {
                        configs::rectangular(a.parse().map_err(|_| {
                            Error::Parse(format!("bad rectangular parameter '{a}'"))
                        })?)?
                    } else {
                        return Err(Error::Parse(format!("unknown lattice '{other}'")));
                    }
                }
            };
            let pot = GaussianPotential::new(alpha, pi_scaled)?;
            let m = optimize::minimize_shift_union2(&lat, &pot, tol, grid.unwrap_or(64))?;
            println!(
                "{}",
                serde_json::json!({
                    "target": "union2",
                    "lattice": lattice,
                    "alpha": alpha,
                    "pi_scaled": pi_scaled,
                    "argmin_basis_coords": m.argmin.coords(),
                    "energy": m.energy.value,
                    "trunc_error": m.energy.trunc_error,
                    "heuristic": false,
                })
            );
        }
        "union3" => {
            let m = optimize::minimize_union3(alpha, tol, grid.unwrap_or(48))?;
            println!(
                "{}",
                serde_json::json!({
                    "target": "union3",
                    "alpha": alpha,
                    "pi_scaled": true,
                    "x": m.x.coords(),
                    "y": m.y.coords(),
                    "objective": m.objective,
                    "energy": m.energy.value,
                    "heuristic": m.heuristic,
                })
            );
        }
        "1d" => {
            let shifts = optimize::minimize_1d(n, alpha, tol)?;
            let gaps: Vec<f64> = (0..shifts.len())
                .map(|i| {
                    if i + 1 < shifts.len() {
                        shifts[i + 1] - shifts[i]
                    } else {
                        1.0 - shifts[i] + shifts[0]
                    }
                })
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "target": "1d",
                    "n": n,
                    "alpha": alpha,
                    "pi_scaled": false,
                    "shifts": shifts,
                    "gaps": gaps,
                    "heuristic": true,
                })
            );
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown optimize target '{other}' (union2 | union3 | 1d)"
            )))
        }
    }
    Ok(())
}

fn cmd_curves(
    alpha: f64,
    grid: usize,
    out_csv: &Option<PathBuf>,
    out_svg: &Option<PathBuf>,
    json: bool,
) -> Result<()> {
    let set = optimize::trace_curves(alpha, grid)?;
    if json {
        let doc = serde_json::json!({
            "alpha": set.alpha,
            "grid": set.grid_n,
            "c1": set.c1,
            "c2": set.c2,
            "intersections": set.intersections.iter().map(|i| {
                serde_json::json!({"point": i.point, "residual": i.residual})
            }).collect::<Vec<_>>(),
        });
        println!("{doc}");
    }
    let mut csv = String::new();
    csv.push_str(&format!(
        "# lattice-energy curves generated {}\n",
        chrono::Utc::now().to_rfc3339()
    ));
    csv.push_str(&format!(
        "# alpha={alpha} pi_scaled=true grid={}\n",
        set.grid_n
    ));
    csv.push_str(&format!("# intersections={}\n", set.intersections.len()));
    if set.intersections.len() != 4 {
        csv.push_str("# note: intersection count differs from the generic four\n");
    }
    for inter in &set.intersections {
        csv.push_str(&format!(
            "# intersection: {},{} residual={:.3e},{:.3e}\n",
            inter.point[0], inter.point[1], inter.residual[0], inter.residual[1]
        ));
    }
    csv.push_str("x1,x2,curve,chain\n");
    for (cid, chains) in [(1usize, &set.c1), (2usize, &set.c2)] {
        for (chain_idx, chain) in chains.iter().enumerate() {
            for p in chain {
                csv.push_str(&format!("{},{},c{cid},{chain_idx}\n", p[0], p[1]));
            }
        }
    }
    // with --json and no CSV file the JSON on stdout is the whole output
    if !json || out_csv.is_some() {
        write_output(out_csv, &csv)?;
    }
    if let Some(path) = out_svg {
        let svg = svg::render_curves(&set);
        std::fs::write(path, svg)
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_render(spec: &str, radius: f64, out_svg: &PathBuf) -> Result<()> {
    let config = configs::parse_config(spec)?;
    if config.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: config.dim(),
            reason: "rendering is 2D only".to_string(),
        });
    }
    let svg = svg::render_config(&config, radius);
    std::fs::write(out_svg, svg)
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", out_svg.display())))?;
    Ok(())
}

fn cmd_verify(
    tol: f64,
    grid_points: usize,
    curve_grid: usize,
    report: &Option<PathBuf>,
) -> Result<i32> {
    let mut tolerances = verify::Tolerances::with_energy_tol(tol);
    tolerances.alpha_grid_points = grid_points;
    tolerances.curve_grid = curve_grid;
    let reports = verify::run_all(&tolerances);
    for r in &reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} (worst margin {:.3e}, budget {:.3e})",
            r.name, r.worst_margin, r.error_budget
        );
        if let Some(err) = &r.error {
            println!("     error: {err}");
        }
        for note in &r.notes {
            println!("     {note}");
        }
    }
    if let Some(path) = report {
        std::fs::write(path, verify::report_json(&reports))
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    let convergence_failure = reports.iter().any(|r| r.error.is_some());
    let any_fail = reports.iter().any(|r| !r.pass);
    std::io::stdout().flush().ok();
    Ok(if convergence_failure {
        3
    } else if any_fail {
        1
    } else {
        0
    })
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run() -> i32 {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome: Result<i32> = match &cli.command {
        Command::Energy {
            spec,
            alpha,
            pi_scaled,
            tol,
            path,
            json,
        } => cmd_energy(spec, *alpha, *pi_scaled, *tol, *path, *json).map(|()| 0),
        Command::Sweep {
            specs,
            alpha_grid,
            pi_scaled,
            tol,
            out,
        } => cmd_sweep(specs, alpha_grid, *pi_scaled, *tol, out).map(|()| 0),
        Command::Optimize {
            target,
            lattice,
            alpha,
            pi_scaled,
            n,
            grid,
            tol,
        } => cmd_optimize(target, lattice, *alpha, *pi_scaled, *n, *grid, *tol).map(|()| 0),
        Command::Curves {
            alpha,
            grid,
            out_csv,
            out_svg,
            json,
        } => cmd_curves(*alpha, *grid, out_csv, out_svg, *json).map(|()| 0),
        Command::Render {
            spec,
            radius,
            out_svg,
        } => cmd_render(spec, *radius, out_svg).map(|()| 0),
        Command::Verify {
            tol,
            grid_points,
            curve_grid,
            report,
        } => cmd_verify(*tol, *grid_points, *curve_grid, report),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.1:10:3:log").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g[1] - 1.0).abs() < 1e-12);
        assert!((g[2] - 10.0).abs() < 1e-12);
        let g = parse_grid("1:2:2:lin").unwrap();
        assert_eq!(g, vec![1.0, 2.0]);
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:5").is_err());
    }

    #[test]
    fn agm_path_matches_direct_for_honeycomb() {
        let pot = GaussianPotential::pi_scaled(1.0).unwrap();
        let agm = evaluate_energy("honeycomb", &pot, 1e-12, PathChoice::Agm).unwrap();
        let direct = evaluate_energy("honeycomb", &pot, 1e-12, PathChoice::Direct).unwrap();
        assert!((agm.value - direct.value).abs() < 1e-10);
    }

    #[test]
    fn tensor_path_requires_tensor_spec() {
        let pot = GaussianPotential::raw(1.0).unwrap();
        assert!(evaluate_energy("hexagonal", &pot, 1e-12, PathChoice::Tensor).is_err());
        assert!(evaluate_energy("cuboid:2,1/2", &pot, 1e-12, PathChoice::Tensor).is_ok());
    }
}
