//! `gasflow <subcommand> --config <path> [--out <dir>]`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::Error;
use crate::numerics::linspace;
use crate::output::{self, num, CsvTable};
use crate::phase::binodal_curve;
use crate::singularity::{
    breakdown_time, caustic, cusp, phase_front_crossings, phase_onsets, phase_transition_curve,
    shock_front_curve,
};
use crate::solution::SolutionManifold;
use crate::thermo::ModelKind;
use crate::verify;

#[derive(Debug, Parser)]
#[command(
    name = "gasflow",
    version,
    about = "Exact multivalued homentropic gas flows, caustics, shocks and phase transitions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON scenario file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Isotherms, spinodal and binodal tables.
    Thermo(CommonArgs),
    /// Density and velocity branches at each configured time.
    Profile {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated times; overrides `times` from the config.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        times: Option<Vec<f64>>,
    },
    /// Both caustic branches.
    Caustic(CommonArgs),
    /// Shock front from the cusp to `t_max`.
    Shock(CommonArgs),
    /// Phase-transition curve and its crossings with the shock front.
    PhaseCurve(CommonArgs),
    /// Breakdown time from the closed formula and from minimization.
    Tstar(CommonArgs),
    /// Full residual and oracle suite.
    Verify(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Thermo(c)
            | Command::Caustic(c)
            | Command::Shock(c)
            | Command::PhaseCurve(c)
            | Command::Tstar(c)
            | Command::Verify(c) => c,
            Command::Profile { common, .. } => common,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(#[from] Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

fn write_table(
    out: &mut dyn Write,
    dir: &Path,
    name: &str,
    table: &CsvTable,
) -> Result<(), CliError> {
    let path = table
        .write(dir, name)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", dir.join(name).display())))?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

/// Runs one subcommand, printing a summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let common = cli.command.common();
    let config =
        ScenarioConfig::load(&common.config).map_err(|e| CliError::Config(e.to_string()))?;
    let scenario = config
        .resolve()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let dir = common
        .out
        .clone()
        .unwrap_or_else(|| scenario.config.output_dir.clone());
    match &cli.command {
        Command::Thermo(_) => thermo(&scenario, &dir, out),
        Command::Profile { times, .. } => profile(&scenario, times.as_deref(), &dir, out),
        Command::Caustic(_) => caustic_cmd(&scenario, &dir, out),
        Command::Shock(_) => shock(&scenario, &dir, out),
        Command::PhaseCurve(_) => phase_curve(&scenario, &dir, out),
        Command::Tstar(_) => tstar(&scenario, out),
        Command::Verify(_) => {
            let report = verify::run(&scenario);
            let _ = writeln!(out, "{report}");
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| c.status == verify::Status::Fail)
                    .map(|c| c.name)
                    .collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
    }
}

fn thermo(s: &Scenario, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let model = &s.model;
    let rhos = linspace(s.rho_range.0, s.rho_range.1, s.config.samples);
    let mut iso = CsvTable::new(&["T", "rho", "p"]);
    for &t in &s.config.isotherm_temperatures {
        for &rho in &rhos {
            iso.row(&[num(t), num(rho), num(model.pressure(t, rho)?)]);
        }
    }
    write_table(out, dir, "isotherms.csv", &iso)?;
    if model.kind == ModelKind::Ideal {
        let _ = writeln!(out, "ideal gas: no spinodal and no binodal");
        return Ok(());
    }
    let mut spin = CsvTable::new(&["rho", "T", "p"]);
    for &rho in &rhos {
        let t = model.spinodal_t(rho)?;
        spin.row(&[num(rho), num(t), num(model.pressure(t, rho)?)]);
    }
    write_table(out, dir, "spinodal.csv", &spin)?;
    let binodal = binodal_curve(model, s.config.binodal_t_min, 1.0, s.config.binodal_count)?;
    write_table(out, dir, "binodal.csv", &output::binodal_table(&binodal))?;
    Ok(())
}

fn profile(
    s: &Scenario,
    times: Option<&[f64]>,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let times = times.unwrap_or(&s.config.times);
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Config(
            "times must be a non-empty list of finite values".into(),
        ));
    }
    let manifold = SolutionManifold::new(s.consts)?;
    let mut profiles = Vec::with_capacity(times.len());
    for &t in times {
        let p = manifold.density_profile(t, s.rho_range, s.config.samples)?;
        let max_cover = p
            .coverage_intervals()
            .iter()
            .map(|c| c.2)
            .max()
            .unwrap_or(0);
        let _ = writeln!(
            out,
            "t = {t}: {} branches, at most {max_cover} per x, {} excluded samples",
            p.branch_count(),
            p.excluded.len()
        );
        profiles.push(p);
    }
    write_table(out, dir, "profile.csv", &output::profile_table(&profiles))?;
    if profiles.iter().any(|p| !p.excluded.is_empty()) {
        write_table(
            out,
            dir,
            "profile_excluded.csv",
            &output::profile_excluded_table(&profiles),
        )?;
    }
    Ok(())
}

fn caustic_cmd(s: &Scenario, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let c = caustic(&s.consts, s.rho_range, s.config.samples)?;
    let _ = writeln!(
        out,
        "caustic: {} points per branch, {} excluded intervals",
        c.plus.points.len(),
        c.excluded.len()
    );
    if let Ok(cu) = cusp(&s.consts) {
        let _ = writeln!(
            out,
            "cusp: t = {:.12}, rho = {:.12}, x = {:.12}",
            cu.t, cu.rho, cu.x
        );
    }
    write_table(out, dir, "caustic.csv", &output::caustic_table(&c))?;
    if !c.excluded.is_empty() {
        write_table(
            out,
            dir,
            "caustic_excluded.csv",
            &output::caustic_excluded_table(&c),
        )?;
    }
    Ok(())
}

fn front_end(s: &Scenario) -> Result<f64, CliError> {
    let cu = cusp(&s.consts)?;
    Ok(s.config.t_max.unwrap_or(cu.t + 20.0))
}

fn shock(s: &Scenario, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let t_max = front_end(s)?;
    let front = shock_front_curve(&s.consts, t_max, s.config.front_samples)?;
    let worst = front.points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let _ = writeln!(
        out,
        "shock front: {} points from t = {:.12} to {t_max}, max residual {worst:.3e}, {} alternative roots",
        front.points.len(),
        front.cusp.t,
        front.alternatives.len()
    );
    write_table(out, dir, "shock.csv", &output::shock_table(&front))?;
    if !front.alternatives.is_empty() {
        write_table(
            out,
            dir,
            "shock_alternatives.csv",
            &output::shock_alternatives_table(&front),
        )?;
    }
    Ok(())
}

fn phase_curve(s: &Scenario, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let t_max = match s.config.t_max {
        Some(t) => t,
        None => front_end(s)?,
    };
    let points = phase_transition_curve(
        &s.consts,
        &s.model,
        s.s0,
        s.rho_range,
        (0.0, t_max),
        s.config.front_samples,
    )?;
    let onsets = phase_onsets(&s.model, s.s0, s.rho_range)?;
    for o in &onsets {
        let _ = writeln!(
            out,
            "{} onset: rho = {:.12}, T = {:.12}",
            o.side.label(),
            o.rho,
            o.temperature
        );
    }
    write_table(
        out,
        dir,
        "phase_curve.csv",
        &output::phase_curve_table(&points),
    )?;
    if cusp(&s.consts).map(|c| c.t < t_max).unwrap_or(false) {
        let front = shock_front_curve(&s.consts, t_max, s.config.front_samples)?;
        let crossings = phase_front_crossings(&s.consts, &front, &onsets)?;
        for k in &crossings {
            let _ = writeln!(
                out,
                "crosses the shock front at t = {:.12}, x = {:.12} (gap {:.3e})",
                k.t, k.x, k.distance
            );
        }
        write_table(
            out,
            dir,
            "phase_crossings.csv",
            &output::crossing_table(&crossings),
        )?;
    }
    Ok(())
}

fn tstar(s: &Scenario, out: &mut dyn Write) -> Result<(), CliError> {
    let formula = breakdown_time(&s.consts)?;
    let cu = cusp(&s.consts)?;
    let _ = writeln!(out, "t* formula:      {formula:.12}");
    let _ = writeln!(out, "t* minimization: {:.12}  (rho = {:.12})", cu.t, cu.rho);
    Ok(())
}
