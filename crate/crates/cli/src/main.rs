//! `cvfeed` - steady-state Gaussian entanglement under continuous feedback.
//!
//! Subcommands: `bound`, `free`, `optimal`, `local`, `sweep`, `verify`.
//! Exit codes: 0 success, 1 check failure or instability, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cvfeed::dynamics::steady_state_cm;
use cvfeed::error::Error;
use cvfeed::feedback::{entanglement_bound, is_stabilising_solution, optimal_unravelling};
use cvfeed::io::{
    format_g12, load_cm, load_drift, save_matrix, write_combined_csv, write_sweep_csv,
};
use cvfeed::parametric::{
    chi_grid, free_logneg, full_drift, optimal_cm, optimize_local_feedback, reduced_drift,
    stability_threshold, sweep_chi, SweepRow,
};
use cvfeed::symplectic::{
    check_physical, log_negativity, poincare_check, pt_min_symplectic, sympb_check,
};
use cvfeed::tol::TOL_BOUNDARY;
use cvfeed::{Bipartition, DriftMatrix};

#[derive(Parser)]
#[command(
    name = "cvfeed",
    version,
    about = "Steady-state Gaussian entanglement bounds and feedback schemes for lossy bosonic systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit a machine-readable JSON report to stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Tolerance for validity and saturation checks.
    #[arg(long, global = true, default_value_t = TOL_BOUNDARY)]
    tol: f64,

    /// RNG seed, echoed into JSON reports. All built-in subcommands are
    /// deterministic and ignore it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Number of bosonic modes N.
    #[arg(long)]
    modes: usize,

    /// Interaction-to-loss ratio chi.
    #[arg(long)]
    chi: f64,

    /// Comma-separated size splits, e.g. 1:5,2:4,3:3. Defaults to the
    /// (most) balanced split of N.
    #[arg(long, value_delimiter = ',')]
    bipartitions: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement bound from the drift spectrum.
    Bound {
        /// Number of bosonic modes N (parametric model).
        #[arg(long, requires = "chi", conflicts_with_all = ["drift", "hamiltonian"])]
        modes: Option<usize>,
        /// Interaction-to-loss ratio chi (parametric model).
        #[arg(long, requires = "modes")]
        chi: Option<f64>,
        /// Drift matrix file (shared JSON schema).
        #[arg(long, conflicts_with = "hamiltonian")]
        drift: Option<PathBuf>,
        /// Hamiltonian matrix file (shared JSON schema).
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Free (uncontrolled) steady-state entanglement.
    Free {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Bound-attaining covariance matrix and its optimal unravelling.
    Optimal {
        #[command(flatten)]
        model: ModelArgs,
        /// Prefix for the emitted sigma/drift/unravelling JSON files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerically optimized local Markovian feedback.
    Local {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sweep chi and emit CSV tables (one per bipartition plus a combined file).
    Sweep {
        /// Number of bosonic modes N.
        #[arg(long)]
        modes: usize,
        /// Grid as START:STOP:STEPS, e.g. 0.001:0.099:60.
        #[arg(long, value_name = "START:STOP:STEPS")]
        chi_range: String,
        /// Comma-separated size splits, e.g. 1:5,2:4,3:3.
        #[arg(long, value_delimiter = ',')]
        bipartitions: Vec<String>,
        /// Output directory for the CSV files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Batch-verify a sigma/drift pair against every inequality.
    Verify {
        /// Covariance matrix file (shared JSON schema).
        #[arg(long)]
        sigma: PathBuf,
        /// Drift matrix file (shared JSON schema).
        #[arg(long)]
        drift: PathBuf,
        /// Size splits to test; defaults to every 1:(N-1) split.
        #[arg(long, value_delimiter = ',')]
        bipartitions: Vec<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_default_env()
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::InvalidArgument(_)
        | Error::InvalidBipartition(_)
        | Error::ShapeMismatch { .. }
        | Error::NonFinite { .. } => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Bound {
            modes,
            chi,
            drift,
            hamiltonian,
        } => cmd_bound(cli, *modes, *chi, drift.as_deref(), hamiltonian.as_deref()),
        Command::Free { model } => cmd_free(cli, model),
        Command::Optimal { model, out } => cmd_optimal(cli, model, out.as_deref()),
        Command::Local { model } => cmd_local(cli, model),
        Command::Sweep {
            modes,
            chi_range,
            bipartitions,
            out,
        } => cmd_sweep(cli, *modes, chi_range, bipartitions, out),
        Command::Verify {
            sigma,
            drift,
            bipartitions,
        } => cmd_verify(cli, sigma, drift, bipartitions),
    }
}

/// Reject chi at or above the stability threshold with a message naming it.
fn check_parametric_stability(n_modes: usize, chi: f64) -> Result<(), Error> {
    let threshold = stability_threshold(n_modes);
    if chi >= threshold {
        return Err(Error::UnstableModel {
            n_modes,
            chi,
            threshold,
        });
    }
    Ok(())
}

fn parse_bipartitions(model_modes: usize, specs: &[String]) -> Result<Vec<Bipartition>, Error> {
    if specs.is_empty() {
        let m = model_modes / 2;
        return Ok(vec![Bipartition::first_m(m.max(1), model_modes)?]);
    }
    specs
        .iter()
        .map(|s| {
            let part = Bipartition::parse_sizes(s)?;
            if part.n_modes() != model_modes {
                return Err(Error::InvalidBipartition(format!(
                    "{s} covers {} modes but the model has {model_modes}",
                    part.n_modes()
                )));
            }
            Ok(part)
        })
        .collect()
}

fn cmd_bound(
    cli: &Cli,
    modes: Option<usize>,
    chi: Option<f64>,
    drift: Option<&Path>,
    hamiltonian: Option<&Path>,
) -> Result<ExitCode, Error> {
    let (a, source) = match (modes, chi, drift, hamiltonian) {
        (Some(n), Some(chi), None, None) => {
            check_parametric_stability(n, chi)?;
            (full_drift(n, chi)?, json!({"modes": n, "chi": chi}))
        }
        (None, None, Some(path), None) => (
            load_drift(path)?,
            json!({"drift": path.display().to_string()}),
        ),
        (None, None, None, Some(path)) => {
            let (m, _) = cvfeed::io::load_matrix(path)?;
            let h = cvfeed::HamiltonianMatrix::new(cvfeed::SymMatrix::from_matrix(&m))?;
            (
                DriftMatrix::from_hamiltonian(&h),
                json!({"hamiltonian": path.display().to_string()}),
            )
        }
        _ => {
            return Err(Error::InvalidArgument(
                "bound needs either --modes with --chi, or --drift FILE, or --hamiltonian FILE"
                    .into(),
            ))
        }
    };
    let report = entanglement_bound(&a)?;
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "bound",
                "source": source,
                "seed": cli.seed,
                "alpha1": report.alpha1,
                "alpha2": report.alpha2,
                "nu_sq_bound": report.nu_sq_bound,
                "en_bound_ebits": report.en_bound,
            }))?
        );
    } else {
        println!("alpha_1     = {}", format_g12(report.alpha1));
        println!("alpha_2     = {}", format_g12(report.alpha2));
        println!("nu_sq_bound = {}", format_g12(report.nu_sq_bound));
        println!("en_bound    = {} ebits", format_g12(report.en_bound));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_free(cli: &Cli, model: &ModelArgs) -> Result<ExitCode, Error> {
    check_parametric_stability(model.modes, model.chi)?;
    let parts = parse_bipartitions(model.modes, &model.bipartitions)?;
    let mut entries = Vec::new();
    for part in &parts {
        let (m, n) = (part.m(), part.n());
        let a = reduced_drift(m, n, model.chi)?;
        let sigma = steady_state_cm(&a)?;
        let split = Bipartition::first_m(1, 2)?;
        let nu = pt_min_symplectic(&sigma, &split)?;
        let en = log_negativity(&sigma, &split)?;
        let closed = if m == n {
            Some(free_logneg(model.modes, model.chi)?)
        } else {
            None
        };
        if !cli.json {
            print!(
                "bipartition {m}:{n}: nu_sq_free = {}, E_N = {} ebits",
                format_g12(nu * nu),
                format_g12(en)
            );
            match closed {
                Some(c) => println!(" (closed form {})", format_g12(c)),
                None => println!(),
            }
        }
        entries.push(json!({
            "bipartition": format!("{m}:{n}"),
            "nu_sq_free": nu * nu,
            "en_ebits": en,
            "en_closed_form_ebits": closed,
        }));
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "free",
                "modes": model.modes,
                "chi": model.chi,
                "seed": cli.seed,
                "results": entries,
            }))?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimal(cli: &Cli, model: &ModelArgs, out: Option<&Path>) -> Result<ExitCode, Error> {
    check_parametric_stability(model.modes, model.chi)?;
    let parts = parse_bipartitions(model.modes, &model.bipartitions)?;
    let mut entries = Vec::new();
    let mut files = Vec::new();
    for part in &parts {
        let (m, n) = (part.m(), part.n());
        let a = reduced_drift(m, n, model.chi)?;
        let bound = entanglement_bound(&a)?;
        let sigma = optimal_cm(&a)?;
        let split = Bipartition::first_m(1, 2)?;
        let en = log_negativity(&sigma, &split)?;
        let stab = is_stabilising_solution(&sigma, a.matrix(), cli.tol)?;
        let u = optimal_unravelling(a.matrix(), &sigma)?;

        if let Some(prefix) = out {
            let tag = if parts.len() > 1 {
                format!(".{m}to{n}")
            } else {
                String::new()
            };
            let base = prefix.display();
            let sigma_path = PathBuf::from(format!("{base}{tag}.sigma.json"));
            let drift_path = PathBuf::from(format!("{base}{tag}.drift.json"));
            let u_path = PathBuf::from(format!("{base}{tag}.uopt.json"));
            save_matrix(&sigma_path, sigma.matrix(), sigma.n_modes())?;
            save_matrix(&drift_path, a.matrix(), a.n_modes())?;
            save_matrix(&u_path, u.matrix(), u.n_modes())?;
            files.extend([sigma_path, drift_path, u_path]);
        }

        if !cli.json {
            println!(
                "bipartition {m}:{n}: en_bound = {} ebits, E_N(sigma_opt) = {} ebits",
                format_g12(bound.en_bound),
                format_g12(en)
            );
            println!(
                "  saturation margins: riccati = {}, physicality = {}",
                format_g12(stab.riccati_min_eig),
                format_g12(stab.physical_min_eig)
            );
        }
        entries.push(json!({
            "bipartition": format!("{m}:{n}"),
            "alpha1": bound.alpha1,
            "alpha2": bound.alpha2,
            "nu_sq_bound": bound.nu_sq_bound,
            "en_bound_ebits": bound.en_bound,
            "en_sigma_opt_ebits": en,
            "riccati_margin": stab.riccati_min_eig,
            "physicality_margin": stab.physical_min_eig,
        }));
    }
    if !cli.json {
        for f in &files {
            println!("wrote {}", f.display());
        }
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "optimal",
                "modes": model.modes,
                "chi": model.chi,
                "seed": cli.seed,
                "results": entries,
                "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
            }))?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_local(cli: &Cli, model: &ModelArgs) -> Result<ExitCode, Error> {
    check_parametric_stability(model.modes, model.chi)?;
    let parts = parse_bipartitions(model.modes, &model.bipartitions)?;
    let mut entries = Vec::new();
    for part in &parts {
        let (m, n) = (part.m(), part.n());
        let opt = optimize_local_feedback(m, n, model.chi)?;
        let mu2 = opt.mu1_star * n as f64 / m as f64;
        if !cli.json {
            println!(
                "bipartition {m}:{n}: mu1* = {}, mu2* = {}, nu_sq = {}, E_N = {} ebits",
                format_g12(opt.mu1_star),
                format_g12(mu2),
                format_g12(opt.nu_sq_min),
                format_g12(opt.en)
            );
        }
        entries.push(json!({
            "bipartition": format!("{m}:{n}"),
            "mu1_star": opt.mu1_star,
            "mu2_star": mu2,
            "nu_sq_local": opt.nu_sq_min,
            "en_ebits": opt.en,
        }));
    }
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "local",
                "modes": model.modes,
                "chi": model.chi,
                "seed": cli.seed,
                "results": entries,
            }))?
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_chi_range(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "chi range must be START:STOP:STEPS, got {text:?}"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad range start {:?}", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad range stop {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad range steps {:?}", parts[2])))?;
    chi_grid(start, stop, steps)
}

fn cmd_sweep(
    cli: &Cli,
    modes: usize,
    chi_range: &str,
    bipartitions: &[String],
    out: &Path,
) -> Result<ExitCode, Error> {
    let grid = parse_chi_range(chi_range)?;
    let parts = parse_bipartitions(modes, bipartitions)?;
    fs::create_dir_all(out)?;

    let mut groups: Vec<(String, Vec<SweepRow>)> = Vec::new();
    let mut files = Vec::new();
    let mut ok_points = 0usize;
    for part in &parts {
        let (m, n) = (part.m(), part.n());
        let rows = sweep_chi(m, n, &grid);
        ok_points += rows.iter().filter(|r| r.status == "ok").count();
        let path = out.join(format!("sweep_{m}to{n}.csv"));
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows)?;
        fs::write(&path, buf)?;
        files.push(path);
        groups.push((format!("{m}:{n}"), rows));
    }
    let combined = out.join("sweep_combined.csv");
    let mut buf = Vec::new();
    write_combined_csv(&mut buf, &groups)?;
    fs::write(&combined, buf)?;
    files.push(combined);

    let total_points = grid.len() * parts.len();
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "sweep",
                "modes": modes,
                "chi_range": chi_range,
                "seed": cli.seed,
                "points": total_points,
                "ok_points": ok_points,
                "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
            }))?
        );
    } else {
        for f in &files {
            println!("wrote {}", f.display());
        }
        println!("{ok_points}/{total_points} grid points succeeded");
    }
    // Exit cleanly when at least 90% of points computed.
    if (ok_points as f64) < 0.9 * total_points as f64 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    cli: &Cli,
    sigma_path: &Path,
    drift_path: &Path,
    bipartitions: &[String],
) -> Result<ExitCode, Error> {
    let sigma = load_cm(sigma_path)?;
    let a = load_drift(drift_path)?;
    if a.matrix().rows() != sigma.matrix().rows() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} drift", sigma.matrix().rows()),
            got: format!("{0}x{0}", a.matrix().rows()),
        });
    }
    let n_modes = sigma.n_modes();
    let parts: Vec<Bipartition> = if bipartitions.is_empty() {
        (0..n_modes)
            .map(|k| Bipartition::new(&[k], n_modes))
            .collect::<Result<_, _>>()?
    } else {
        parse_bipartitions(n_modes, bipartitions)?
    };
    let tol = cli.tol;

    let mut checks: Vec<(String, bool, String)> = Vec::new();

    let phys = check_physical(&sigma, tol)?;
    checks.push((
        "physicality".into(),
        phys.physical,
        format!(
            "min embedding eigenvalue {}",
            format_g12(phys.min_embedding_eig)
        ),
    ));

    let stab = is_stabilising_solution(&sigma, a.matrix(), tol)?;
    checks.push((
        "stabilising-solution".into(),
        stab.stabilising,
        format!(
            "riccati margin {}, physicality margin {}",
            format_g12(stab.riccati_min_eig),
            format_g12(stab.physical_min_eig)
        ),
    ));

    let split_label = |part: &Bipartition| {
        if part.m() == 1 {
            format!("1:{} (mode {})", part.n(), part.party_a()[0])
        } else {
            format!("{}:{}", part.m(), part.n())
        }
    };

    match entanglement_bound(&a) {
        Ok(bound) => {
            for part in &parts {
                let label = split_label(part);
                match pt_min_symplectic(&sigma, part) {
                    Ok(nu) => checks.push((
                        format!("entanglement-bound {label}"),
                        nu * nu >= bound.nu_sq_bound - tol,
                        format!(
                            "nu_sq {} >= alpha1*alpha2 {}",
                            format_g12(nu * nu),
                            format_g12(bound.nu_sq_bound)
                        ),
                    )),
                    Err(e) => {
                        checks.push((format!("entanglement-bound {label}"), false, e.to_string()))
                    }
                }
            }
        }
        Err(e) => checks.push(("entanglement-bound".into(), false, e.to_string())),
    }

    match poincare_check(&sigma) {
        Ok(p) => checks.push((
            "poincare-pairing".into(),
            p.holds,
            format!("min eigenvalue-pair product {}", format_g12(p.min_product)),
        )),
        Err(e) => checks.push(("poincare-pairing".into(), false, e.to_string())),
    }

    for part in &parts {
        let label = split_label(part);
        match sympb_check(&sigma, part) {
            Ok(s) => checks.push((
                format!("pt-eigenvalue-floor {label}"),
                s.holds,
                format!(
                    "nu_sq {} >= lam1*lam2 {}",
                    format_g12(s.nu_sq),
                    format_g12(s.eig_product)
                ),
            )),
            Err(e) => checks.push((format!("pt-eigenvalue-floor {label}"), false, e.to_string())),
        }
    }

    let all_pass = checks.iter().all(|(_, ok, _)| *ok);
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "verify",
                "sigma": sigma_path.display().to_string(),
                "drift": drift_path.display().to_string(),
                "seed": cli.seed,
                "tol": tol,
                "checks": checks.iter().map(|(name, ok, detail)| json!({
                    "name": name, "pass": ok, "detail": detail,
                })).collect::<Vec<_>>(),
                "all_pass": all_pass,
            }))?
        );
    } else {
        for (name, ok, detail) in &checks {
            println!("{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
