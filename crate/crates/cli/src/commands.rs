use std::path::{Path, PathBuf};

use faddeev_core::io::{self, load_solution, write_atomic, write_json};
use faddeev_core::ode::ScanOutcome;
use faddeev_core::topology::{hopf_closed, hopf_grid3d, hopf_reduced, Grid3dSpec};
use faddeev_core::verify::{
    asymptotic_exponents, boundary_audit, convergence_study, field_equation_residual,
    DerivativeMode,
};
use faddeev_core::{
    integrate_profile, scan_coefficient, AnsatzParams, Classification, EnergyConfig, Error,
    ProfileSolution, RadialProfile, ResidualGrid, SolveConfig,
};
use serde::Serialize;
use serde_json::json;

use crate::{
    ChargeArgs, ExportArgs, ExportWhat, MethodArg, Outcome, ScanArgs, SolveArgs, VerifyArgs,
    EXIT_NOINPUT, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, EXIT_VERIFY,
};

const MAX_DEFAULT_SPACING: f64 = 0.01;

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MissingInput(_) | Error::Io(_) | Error::Format(_) => EXIT_NOINPUT,
        e if e.is_numerical() => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

fn failed(e: Error, mut outcome: Outcome) -> Outcome {
    outcome.exit = exit_code(&e);
    outcome.diagnostic = Some(e.to_string());
    outcome
}

/// A solution file that fails to load or rebuild is unusable input.
fn load(path: &Path) -> Result<ProfileSolution, Error> {
    load_solution(path).map_err(|e| match e {
        Error::MissingInput(_) | Error::Io(_) | Error::Format(_) => e,
        other => Error::Format(format!("{}: {other}", path.display())),
    })
}

fn emit_text(out: Option<&PathBuf>, text: &str, outcome: &mut Outcome) -> Result<(), Error> {
    match out {
        Some(p) => {
            write_atomic(p, text.as_bytes())?;
            outcome.outputs.push(p.clone());
        }
        None => print!("{text}"),
    }
    Ok(())
}

/// Pretty JSON to stdout, and to `out` when given.
fn emit_report<T: Serialize>(
    out: Option<&PathBuf>,
    value: &T,
    outcome: &mut Outcome,
) -> Result<(), Error> {
    print!("{}", io::to_json_pretty(value)?);
    if let Some(p) = out {
        write_json(p, value)?;
        outcome.outputs.push(p.clone());
    }
    Ok(())
}

pub fn solve(a: &SolveArgs) -> Outcome {
    let mut cfg = SolveConfig::default();
    if let Some(v) = a.rho_eps {
        cfg.rho_eps = v;
    }
    if let Some(v) = a.g_max {
        cfg.g_max = v;
    }
    if let Some(v) = a.rho_max {
        cfg.rho_max = v;
    }
    if let Some(v) = a.tol {
        cfg.rel_tol = v;
        cfg.abs_tol = 1e-2 * v;
    }
    let mut outcome = Outcome {
        config: json!({ "m": a.m, "n": a.n, "c_lead": a.c_lead, "solver": cfg, "out": a.out }),
        ..Outcome::default()
    };
    let mut run = || -> Result<(), Error> {
        let params = AnsatzParams::new(a.m, a.n, a.c_lead)?;
        cfg.validate()?;
        let sol = integrate_profile(&params, &cfg)?;
        match sol.classification() {
            Classification::Singular {
                rho0,
                tail_constant,
            } => {
                println!("SINGULAR rho0={rho0} tail_constant={tail_constant}")
            }
            Classification::Bounded { rho_max, g_sup } => {
                println!("BOUNDED rho_max={rho_max} g_sup={g_sup}")
            }
        }
        if let Some(p) = &a.out {
            io::save_solution(p, &sol)?;
            outcome.outputs.push(p.clone());
        }
        Ok(())
    };
    match run() {
        Ok(()) => outcome,
        Err(e) => failed(e, outcome),
    }
}

pub fn charge(a: &ChargeArgs) -> Outcome {
    let grid = Grid3dSpec {
        n_rho: a.grid,
        n_phi: a.angular,
        n_z: a.angular,
        axis_excision: a.eps,
    };
    let mut outcome = Outcome {
        config: json!({
            "sol": a.sol, "method": format!("{:?}", a.method).to_lowercase(),
            "grid": grid, "points": a.points, "out": a.out,
        }),
        inputs: vec![a.sol.clone()],
        ..Outcome::default()
    };
    let mut run = || -> Result<(), Error> {
        let sol = load(&a.sol)?;
        let report = match a.method {
            MethodArg::Closed => hopf_closed(&sol)?,
            MethodArg::Reduced => hopf_reduced(&sol, a.points, 1)?,
            MethodArg::Grid3d => hopf_grid3d(&sol, &grid)?,
        };
        emit_report(a.out.as_ref(), &report, &mut outcome)
    };
    match run() {
        Ok(()) => outcome,
        Err(e) => failed(e, outcome),
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: &'static str,
    detail: String,
}

impl Check {
    fn new(name: &'static str, passed: Option<bool>, detail: String) -> Self {
        let status = match passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "not_applicable",
        };
        Self {
            name,
            status,
            detail,
        }
    }
}

pub fn verify(a: &VerifyArgs) -> Outcome {
    let mut outcome = Outcome {
        config: json!({
            "sol": a.sol, "window": a.window, "grid": a.grid, "refinements": a.refinements,
            "tol": a.tol, "full_fd": a.full_fd, "out": a.out,
        }),
        inputs: vec![a.sol.clone()],
        ..Outcome::default()
    };
    let mut run = || -> Result<Vec<&'static str>, Error> {
        let sol = load(&a.sol)?;
        let n_rho = a.grid.unwrap_or_else(|| {
            let extent = (a.window[1] - a.window[0]).abs() * sol.end().rho_end();
            ((extent / MAX_DEFAULT_SPACING).ceil() as usize + 1).max(256)
        });
        let mut grid = ResidualGrid::fraction_window(&sol, a.window[0], a.window[1], n_rho);
        if a.full_fd {
            grid.mode = DerivativeMode::FiniteDifference;
            grid.n_phi = 64;
            grid.n_z = 64;
        }
        let (residual, study) = if a.refinements > 0 {
            let study = convergence_study(&sol, &grid, a.refinements)?;
            (study.reports[0].clone(), Some(study))
        } else {
            (field_equation_residual(&sol, &grid)?, None)
        };
        let audit = boundary_audit(&sol, sol.config().tail_lo)?;
        let exponents = asymptotic_exponents(&sol)?;

        let mut checks = vec![
            Check::new(
                "residual",
                Some(residual.linf_norm < a.tol),
                format!(
                    "relative max-norm {:e} against {:e}",
                    residual.linf_norm, a.tol
                ),
            ),
            Check::new(
                "periodicity",
                Some(audit.periodicity_z_defect == 0.0 && audit.periodicity_phi_defect == 0.0),
                format!(
                    "z {:e}, phi {:e}",
                    audit.periodicity_z_defect, audit.periodicity_phi_defect
                ),
            ),
            Check::new(
                "singular_boundary",
                audit.singular_check.map(|c| c.passed),
                match audit.singular_check {
                    Some(c) => format!(
                        "|u| = {:e} at the last sample, threshold {:e}",
                        c.last_magnitude, c.threshold
                    ),
                    None => "bounded profile has no pole".into(),
                },
            ),
        ];
        if let Some(s) = &study {
            checks.push(Check::new(
                "convergence",
                Some(!s.unreliable && s.order >= 1.7),
                format!(
                    "observed order {}{}",
                    s.order,
                    if s.unreliable {
                        ", norms not decreasing"
                    } else {
                        ""
                    }
                ),
            ));
        }
        let failing: Vec<&'static str> = checks
            .iter()
            .filter(|c| c.status == "fail")
            .map(|c| c.name)
            .collect();
        let report = json!({
            "status": if failing.is_empty() { "PASS" } else { "FAIL" },
            "failed_checks": failing,
            "checks": checks,
            "residual": residual,
            "convergence": study,
            "boundary": audit,
            "exponents": exponents,
        });
        emit_report(a.out.as_ref(), &report, &mut outcome)?;
        Ok(failing)
    };
    match run() {
        Ok(failing) if failing.is_empty() => outcome,
        Ok(failing) => {
            outcome.exit = EXIT_VERIFY;
            outcome.diagnostic = Some(format!("failed checks: {}", failing.join(", ")));
            outcome
        }
        Err(e) => failed(e, outcome),
    }
}

pub fn scan(a: &ScanArgs) -> Outcome {
    let cfg = SolveConfig::default();
    let mut outcome = Outcome {
        config: json!({
            "m": a.m, "n": a.n, "c_from": a.c_from, "c_to": a.c_to, "steps": a.steps,
            "solver": cfg, "out": a.out,
        }),
        ..Outcome::default()
    };
    let mut run = || -> Result<bool, Error> {
        let table = scan_coefficient(a.m, a.n, (a.c_from, a.c_to), a.steps, &cfg)?;
        emit_text(a.out.as_ref(), &io::scan_csv(&table), &mut outcome)?;
        Ok(table
            .rows
            .iter()
            .all(|r| matches!(r.outcome, ScanOutcome::Error { .. })))
    };
    match run() {
        Ok(false) => outcome,
        Ok(true) => {
            outcome.exit = EXIT_NUMERIC;
            outcome.diagnostic = Some("every row of the scan failed".into());
            outcome
        }
        Err(e) => failed(e, outcome),
    }
}

pub fn export(a: &ExportArgs) -> Outcome {
    let mut outcome = Outcome {
        config: json!({ "sol": a.sol, "what": format!("{:?}", a.what).to_lowercase(), "out": a.out }),
        inputs: vec![a.sol.clone()],
        ..Outcome::default()
    };
    let mut run = || -> Result<(), Error> {
        let sol = load(&a.sol)?;
        let text = match a.what {
            ExportWhat::Profile => io::profile_csv(&sol),
            ExportWhat::Energy => io::energy_csv(&sol, &EnergyConfig::default())?,
            ExportWhat::Integrand => io::integrand_csv(&sol)?,
        };
        emit_text(a.out.as_ref(), &text, &mut outcome)
    };
    match run() {
        Ok(()) => {
            outcome.exit = EXIT_OK;
            outcome
        }
        Err(e) => failed(e, outcome),
    }
}
