//! Command-line front door: parse model files, run the analytic pipeline
//! and the oracle, and emit text, structured (JSON), or CSV reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::asymptotics::{self, AsymptoticLaw, GfAccess, LawTarget};
use crate::error::{Error, Result};
use crate::oracle::{self, StationaryGrid, Target};
use crate::report::{
    ConfigEcho, DirectionReport, OracleSummary, ReportDocument, VerifyRow,
};
use crate::walk::{self, RawModel};
use crate::{analyze, Analysis, Tolerances};

/// Verify-table tolerance on the decay rate (relative).
pub const VERIFY_RATE_TOL: f64 = 0.01;
/// Verify-table tolerance on the polynomial exponent (absolute).
pub const VERIFY_EXPONENT_TOL: f64 = 0.15;
/// Verify-table slack on the aggregate coefficient ratio, added to the
/// propagated relative error bar.
pub const VERIFY_COEFF_SLACK: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    X,
    Y,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Validate the model file and echo the parsed walk.
    Validate,
    /// Run the analytic pipeline only: singularities and case label.
    Classify,
    /// Compute tail laws for boundary, marginal, and joint probabilities.
    Asymptotics,
    /// Compare analytic laws against the brute-force oracle.
    Verify,
    /// Full report with laws, verification, and CSV dumps.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::Asymptotics => "asymptotics",
            Command::Verify => "verify",
            Command::Report => "report",
        }
    }


    fn needs_verification(self) -> bool {
        matches!(self, Command::Verify | Command::Report)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qptail",
    about = "Exact tail asymptotics for quarter-plane random walks, with a brute-force oracle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Model file: JSON with sections interior/horizontal/vertical/origin,
    /// step keys "di,dj", decimal probabilities.
    #[arg(long, value_name = "PATH", global = true)]
    pub model: Option<PathBuf>,
    /// Oracle truncation size.
    #[arg(long = "N", global = true, default_value_t = 400)]
    pub truncation: usize,
    /// Root real-coercion tolerance (relative).
    #[arg(long = "tol-root", global = true, default_value_t = 1e-9)]
    pub tol_root: f64,
    /// Case-boundary equality tolerance (relative).
    #[arg(long = "tol-eq", global = true, default_value_t = 1e-8)]
    pub tol_eq: f64,
    /// Stationary solver L1 stopping tolerance.
    #[arg(long = "tol-solver", global = true, default_value_t = 1e-13)]
    pub tol_solver: f64,
    #[arg(long, value_enum, global = true, default_value_t = Direction::Both)]
    pub direction: Direction,
    /// Largest fixed offset j for joint laws pi_{n,j}.
    #[arg(long = "jmax", global = true, default_value_t = 3)]
    pub j_max: usize,
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the structured report (and CSV dumps) here instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            real_coerce: self.tol_root,
            case_eq: self.tol_eq,
            solver: self.tol_solver,
            ..Tolerances::default()
        }
    }
}

pub struct RunOutput {
    pub document: ReportDocument,
    pub text: String,
    /// (file suffix, contents) pairs for CSV dumps.
    pub csv: Vec<(String, String)>,
}

fn law_name(target: LawTarget) -> String {
    match target {
        LawTarget::BoundaryX => "boundary_x".into(),
        LawTarget::BoundaryY => "boundary_y".into(),
        LawTarget::MarginalX => "marginal_x".into(),
        LawTarget::MarginalY => "marginal_y".into(),
        LawTarget::JointX(j) => format!("joint_x_j{j}"),
        LawTarget::JointY(i) => format!("joint_y_i{i}"),
    }
}

fn relabel_for_y(target: LawTarget) -> LawTarget {
    match target {
        LawTarget::BoundaryX => LawTarget::BoundaryY,
        LawTarget::MarginalX => LawTarget::MarginalY,
        LawTarget::JointX(j) => LawTarget::JointY(j),
        other => other,
    }
}

fn oracle_target(target: LawTarget) -> Target {
    // The grid is solved for the original orientation; y-direction
    // sequences read columns instead of rows.
    match target {
        LawTarget::BoundaryX => Target::Row(0),
        LawTarget::BoundaryY => Target::Column(0),
        LawTarget::MarginalX => Target::MarginalX,
        LawTarget::MarginalY => Target::MarginalY,
        LawTarget::JointX(j) => Target::Row(j),
        LawTarget::JointY(i) => Target::Column(i),
    }
}

fn sequence_of(grid: &StationaryGrid, target: LawTarget) -> Vec<f64> {
    match oracle_target(target) {
        Target::Row(j) => grid.row(j),
        Target::Column(i) => grid.column(i),
        Target::MarginalX => grid.marginal_x(),
        Target::MarginalY => grid.marginal_y(),
    }
}

/// One direction's law computation (x-direction of `analysis`, relabelled
/// when it is the transposed walk).
fn direction_laws(
    analysis: &Analysis,
    gf: &GfAccess,
    j_max: usize,
    tol: &Tolerances,
    relabel: bool,
) -> Result<(DirectionReport, Vec<AsymptoticLaw>)> {
    let boundary = asymptotics::boundary_law(
        &analysis.kp,
        &analysis.sextic,
        &analysis.report,
        &analysis.shapes,
        gf,
        tol,
    )?;
    let (marginal, marginal_case) = asymptotics::marginal_law(
        &analysis.kp,
        &analysis.sextic,
        &boundary.report,
        &analysis.drift,
        &boundary.law,
        gf,
        tol,
    )?;
    let mut laws = vec![boundary.law.clone(), marginal];
    for j in 1..=j_max {
        laws.push(asymptotics::joint_law(
            &analysis.kp,
            &boundary.report,
            &boundary.law,
            j,
        )?);
    }
    if relabel {
        for law in &mut laws {
            law.target = relabel_for_y(law.target);
        }
    }
    let report = DirectionReport {
        direction: if relabel { 'y' } else { 'x' },
        kernel: analysis.kp.clone(),
        discriminant: analysis.disc.clone(),
        branch_points: analysis.bp,
        sextic: analysis.sextic.clone(),
        singularity: boundary.report,
        laws: laws.clone(),
        marginal_case: Some(marginal_case),
    };
    Ok((report, laws))
}

fn verify_law(grid: &StationaryGrid, law: &AsymptoticLaw) -> Result<VerifyRow> {
    let seq = sequence_of(grid, law.target);
    let window = (grid.size / 4, grid.size / 2);
    let fit = oracle::fit_decay(&seq, window)?;
    let rate_ok = (fit.rate_hat - law.rate).abs() <= VERIFY_RATE_TOL * law.rate;
    // Raw exponent within tolerance, or classifying to the nearest
    // admissible exponent recovers the predicted one.
    let exp_ok = (fit.exponent_hat - law.exponent).abs() <= VERIFY_EXPONENT_TOL
        || (fit.exponent_verdict() - law.exponent).abs() < 1e-12;
    let mut obs = 0.0;
    let mut pred = 0.0;
    for n in window.0..=window.1 {
        obs += seq[n].abs();
        pred += law.predict(n).abs();
    }
    let ratio = if pred > 0.0 { obs / pred } else { f64::NAN };
    let rel_err = if law.coefficient != 0.0 {
        (law.coefficient_error / law.coefficient).abs()
    } else {
        0.0
    };
    let coeff_ok = (ratio - 1.0).abs() <= VERIFY_COEFF_SLACK + rel_err;
    Ok(VerifyRow {
        target: law_name(law.target),
        rate_predicted: law.rate,
        rate_empirical: fit.rate_hat,
        exponent_predicted: law.exponent,
        exponent_empirical: fit.exponent_hat,
        coefficient_ratio: ratio,
        alternation_predicted: law.periodic_coefficient.is_some(),
        alternation_detected: fit.alternation_detected,
        fit_r2: fit.r2,
        pass: rate_ok && exp_ok && coeff_ok,
    })
}

fn sequence_csv(grid: &StationaryGrid, law: &AsymptoticLaw) -> String {
    let seq = sequence_of(grid, law.target);
    let mut out = String::from("n,pi_n,predicted_pi_n\n");
    for (n, v) in seq.iter().enumerate().skip(1) {
        let _ = writeln!(out, "{n},{v:e},{:e}", law.predict(n));
    }
    out
}

fn grid_csv(grid: &StationaryGrid) -> String {
    let mut out = String::from("m,n,pi\n");
    for m in 0..=grid.size {
        for n in 0..=grid.size {
            let _ = writeln!(out, "{m},{n},{:e}", grid.at(m, n));
        }
    }
    out
}

fn format_law_text(out: &mut String, law: &AsymptoticLaw) {
    let name = law_name(law.target);
    let periodic = match law.periodic_coefficient {
        Some(c) => format!(" + (-1)^(n-1) * {c:.6e}"),
        None => String::new(),
    };
    let _ = writeln!(
        out,
        "  {name}: pi_n ~ [{:.6e}{periodic}] * n^{} * {:.6}^(n-1)   (coefficient error +-{:.2e})",
        law.coefficient, law.exponent, law.rate, law.coefficient_error
    );
}

/// Run the full flow for a parsed CLI invocation.
pub fn execute(cli: &Cli) -> Result<RunOutput> {
    let tol = cli.tolerances();
    let model_path = cli.model.as_ref().ok_or_else(|| {
        Error::BadModelDocument("missing required --model PATH".to_string())
    })?;
    let raw: RawModel = serde_json::from_str(
        &fs::read_to_string(model_path).map_err(Error::Io)?,
    )
    .map_err(|e| Error::BadModelDocument(e.to_string()))?;
    let spec = walk::validate_spec(&raw)?;
    let drift = walk::drift_vectors(&spec);
    let ergodicity = walk::check_ergodic(&drift);
    let shapes = walk::classify_shape(&spec);

    let mut text = String::new();
    let mut document = ReportDocument {
        model: spec.to_raw(),
        config: ConfigEcho {
            command: cli.command.name().to_string(),
            truncation: cli.truncation,
            tolerances: tol,
            direction: format!("{:?}", cli.direction).to_lowercase(),
            j_max: cli.j_max,
        },
        drift,
        ergodicity,
        shapes,
        directions: Vec::new(),
        oracle: None,
        phi_check: None,
        verification: Vec::new(),
        empirical: Vec::new(),
    };

    let _ = writeln!(text, "model: {}", model_path.display());
    let _ = writeln!(
        text,
        "drift: M = ({:.6}, {:.6}), M1 = ({:.6}, {:.6}), M2 = ({:.6}, {:.6})",
        drift.m.0, drift.m.1, drift.m1.0, drift.m1.1, drift.m2.0, drift.m2.1
    );
    let _ = writeln!(text, "ergodicity: {ergodicity:?}");

    if cli.command == Command::Validate {
        match ergodicity {
            walk::Ergodicity::Ergodic(_) => {}
            walk::Ergodicity::NotErgodic => return Err(Error::NotErgodic),
            walk::Ergodicity::OutOfScopeZeroDrift => return Err(Error::OutOfScopeZeroDrift),
        }
        let _ = writeln!(text, "model is valid");
        return Ok(RunOutput {
            document,
            text,
            csv: Vec::new(),
        });
    }

    // Both orientations are always analyzed; the y-side radius feeds the
    // x-side evaluators and vice versa.
    let analysis_x = analyze(&spec, &tol)?;
    let analysis_y = analyze(&spec.transpose(), &tol)?;

    let run_x = cli.direction != Direction::Y;
    let run_y = cli.direction != Direction::X;

    if cli.command == Command::Classify {
        for (analysis, dir, enabled) in
            [(&analysis_x, 'x', run_x), (&analysis_y, 'y', run_y)]
        {
            if !enabled {
                continue;
            }
            let r = &analysis.report;
            let _ = writeln!(
                text,
                "direction {dir}: case = {:?}, x_dom = {:.6}, rate = {:.6}, exponent = {}, periodic = {}, scenario = {}",
                r.case_label,
                r.x_dom,
                1.0 / r.x_dom,
                r.case_label.exponent(),
                r.periodic,
                r.shape_scenario
            );
            for w in &r.warnings {
                let _ = writeln!(text, "  warning: {w}");
            }
            document.directions.push(DirectionReport {
                direction: dir,
                kernel: analysis.kp.clone(),
                discriminant: analysis.disc.clone(),
                branch_points: analysis.bp,
                sextic: analysis.sextic.clone(),
                singularity: r.clone(),
                laws: Vec::new(),
                marginal_case: None,
            });
        }
        return Ok(RunOutput {
            document,
            text,
            csv: Vec::new(),
        });
    }

    // Oracle-backed commands.
    let grid = oracle::solve_stationary(&spec, cli.truncation, tol.solver)?;
    document.oracle = Some(OracleSummary {
        truncation: grid.size,
        iterations: grid.iterations,
        residual: grid.residual,
        pi00: grid.at(0, 0),
    });
    let _ = writeln!(
        text,
        "oracle: N = {}, sweeps = {}, residual = {:.3e}, pi00 = {:.9e}",
        grid.size,
        grid.iterations,
        grid.residual,
        grid.at(0, 0)
    );

    let gf_x = GfAccess::new(
        &grid,
        false,
        analysis_x.report.x_dom,
        analysis_y.report.x_dom,
    );
    let gf_y = GfAccess::new(
        &grid,
        true,
        analysis_y.report.x_dom,
        analysis_x.report.x_dom,
    );

    let mut all_laws = Vec::new();
    for (analysis, gf, relabel, enabled) in [
        (&analysis_x, &gf_x, false, run_x),
        (&analysis_y, &gf_y, true, run_y),
    ] {
        if !enabled {
            continue;
        }
        let (dir_report, laws) = direction_laws(analysis, gf, cli.j_max, &tol, relabel)?;
        let _ = writeln!(
            text,
            "direction {}: case = {:?}, x_dom = {:.6}, periodic = {}",
            dir_report.direction,
            dir_report.singularity.case_label,
            dir_report.singularity.x_dom,
            dir_report.singularity.periodic
        );
        for law in &laws {
            format_law_text(&mut text, law);
        }
        for w in &dir_report.singularity.warnings {
            let _ = writeln!(text, "  warning: {w}");
        }
        document.directions.push(dir_report);
        all_laws.extend(laws);
    }

    let mut csv = Vec::new();
    if cli.command.needs_verification() {
        let _ = writeln!(text, "verification (window [{}..{}]):", grid.size / 4, grid.size / 2);
        for law in &all_laws {
            let row = verify_law(&grid, law)?;
            let _ = writeln!(
                text,
                "  {}: rate predicted {:.6} empirical {:.6}, exponent predicted {} empirical {:+.3}, coeff ratio {:.3}, {}",
                row.target,
                row.rate_predicted,
                row.rate_empirical,
                row.exponent_predicted,
                row.exponent_empirical,
                row.coefficient_ratio,
                if row.pass { "PASS" } else { "FAIL" }
            );
            document.verification.push(row);
        }
        if run_x {
            let check = asymptotics::phi_recursion_check(
                &analysis_x.kp,
                &grid,
                &gf_x,
                5,
                1.0 + 0.2_f64.min((analysis_x.report.x_dom - 1.0) * 0.4),
            )?;
            let _ = writeln!(
                text,
                "phi recursion (J = {}, x = {:.3}): balance {:.3e}, closed-form {:.3e}, w-identity {:.3e}",
                check.depth,
                check.x,
                check.max_balance_residual,
                check.max_closed_form_residual,
                check.max_w_identity_residual
            );
            document.phi_check = Some(check);
        }
    }
    if cli.command == Command::Report || cli.format == Format::Csv {
        csv.push(("grid".to_string(), grid_csv(&grid)));
        for law in &all_laws {
            csv.push((law_name(law.target), sequence_csv(&grid, law)));
        }
    }

    Ok(RunOutput {
        document,
        text,
        csv,
    })
}

/// Entry point used by the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let rendered = match cli.format {
                Format::Text => output.text.clone(),
                Format::Structured => match crate::report::to_deterministic_json(&output.document)
                {
                    Ok(json) => json,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 4;
                    }
                },
                Format::Csv => String::new(),
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = write_outputs(path, &rendered, &output.csv, cli.format) {
                        eprintln!("error: {e}");
                        return 2;
                    }
                }
                None => {
                    if !rendered.is_empty() {
                        println!("{rendered}");
                    }
                    for (name, contents) in &output.csv {
                        println!("# --- {name}.csv ---");
                        print!("{contents}");
                    }
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_outputs(
    path: &Path,
    rendered: &str,
    csv: &[(String, String)],
    format: Format,
) -> Result<()> {
    if !rendered.is_empty() {
        fs::write(path, rendered)?;
    }
    let stem = path.with_extension("");
    let stem = stem.to_string_lossy();
    let _ = format;
    for (name, contents) in csv {
        fs::write(format!("{stem}.{name}.csv"), contents)?;
    }
    Ok(())
}
