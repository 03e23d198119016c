use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pointfam_core::diffraction::{no_diffraction_scan_with, outgoing_amplitudes_with, ray_kinematics, PathConvention};
use pointfam_core::many_body::{
    mcguire_reference, nbody_bound_states_capped, relative_strength, DEFAULT_MAX_PARTICLES,
};
use pointfam_core::one_body::{bound_spectrum, phase_diagram_grid};
use pointfam_core::scattering::sweep;
use pointfam_core::suite::{run_suite, Suite};
use pointfam_core::{InteractionKind, InteractionParams, C64};

/// Upper bound on the number of values a `lo:hi:step` range may expand to.
const MAX_RANGE_LEN: usize = 10_000_000;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(#[from] pointfam_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("{0} check(s) failed")]
    VerificationFailed(usize),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Tabulated,
    Narrated,
}

impl From<Convention> for PathConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Tabulated => PathConvention::Tabulated,
            Convention::Narrated => PathConvention::Narrated,
        }
    }
}

/// Exact solutions for the four-parameter family of one-dimensional point interactions.
///
/// Parameter files are JSON objects
/// `{"alpha": .., "beta": .., "gamma": .., "delta": .., "theta": .., "mass": ..}`
/// with `alpha*gamma - beta*delta = 1`. The canonical anti-delta set of strength
/// `g` is `alpha = gamma = 1, beta = g, delta = 0, theta = pi`, so `g` equals
/// the magnitude-matched `beta` of the sign-reversed delta.
///
/// Exit status: 0 on success, 1 on a usage or validation error, 2 when a
/// verification check fails. Set POINTFAM_THREADS to cap scan parallelism.
#[derive(Debug, Parser)]
#[command(name = "pointfam", version)]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a parameter file and echo it back.
    ParamsCheck {
        #[arg(long)]
        params: PathBuf,
    },
    /// One-body bound states.
    Bound {
        #[arg(long)]
        params: PathBuf,
    },
    /// Transmission and reflection amplitudes over a wavenumber range.
    Scatter {
        #[arg(long)]
        params: PathBuf,
        /// `lo:hi:step`
        #[arg(long, allow_hyphen_values = true)]
        k_range: String,
    },
    /// Bound-state count on the (alpha, gamma) plane at fixed delta.
    PhaseDiagram {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        /// `lo:hi:step`
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// `lo:hi:step`
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// N-body bound states.
    Nbody {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        n: usize,
        /// Largest N accepted.
        #[arg(long, default_value_t = DEFAULT_MAX_PARTICLES)]
        max_particles: usize,
    },
    /// Evaluate an N-body bound state at points read from a CSV file (one row per point).
    NbodyEval {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        state_index: usize,
        #[arg(long)]
        points: PathBuf,
    },
    /// Outgoing amplitudes of the two three-body ray geometries at one (k, phi).
    Diffraction {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, value_enum, default_value = "tabulated")]
        convention: Convention,
    },
    /// Largest diffraction residual over a quasi-random (k, phi) scan.
    DiffractionScan {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, value_enum, default_value = "tabulated")]
        convention: Convention,
    },
    /// Run oracle checks; a table goes to stderr and a JSON report to stdout.
    Verify {
        /// bound, scatter, nbody-boundary, nbody-interior, diffraction or all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Delta-function N-body reference values next to the closed-form result.
    Mcguire {
        /// Pair strength g0 of `g0 delta(x_i - x_j)`; binds for g0 < 0.
        #[arg(long, allow_hyphen_values = true)]
        g0: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        n: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ParamsCheck { .. } => "params-check",
            Command::Bound { .. } => "bound",
            Command::Scatter { .. } => "scatter",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Nbody { .. } => "nbody",
            Command::NbodyEval { .. } => "nbody-eval",
            Command::Diffraction { .. } => "diffraction",
            Command::DiffractionScan { .. } => "diffraction-scan",
            Command::Verify { .. } => "verify",
            Command::Mcguire { .. } => "mcguire",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let name = cli.command.name();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerificationFailed(n)) => {
            eprintln!("{name}: {n} check(s) failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("POINTFAM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("POINTFAM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let fmt = cli.output;
    match cli.command {
        Command::ParamsCheck { params } => params_check(&mut out, &load_params(&params)?, fmt),
        Command::Bound { params } => bound(&mut out, &load_params(&params)?, fmt),
        Command::Scatter { params, k_range } => scatter(&mut out, &load_params(&params)?, &parse_range(&k_range)?, fmt),
        Command::PhaseDiagram { delta, alpha, gamma } => {
            phase_diagram(&mut out, delta, &parse_range(&alpha)?, &parse_range(&gamma)?, fmt)
        }
        Command::Nbody {
            params,
            n,
            max_particles,
        } => nbody(&mut out, &load_params(&params)?, n, max_particles, fmt),
        Command::NbodyEval {
            params,
            n,
            state_index,
            points,
        } => nbody_eval(&mut out, &load_params(&params)?, n, state_index, &points, fmt),
        Command::Diffraction {
            params,
            k,
            phi,
            convention,
        } => diffraction(&mut out, &load_params(&params)?, k, phi, convention, fmt),
        Command::DiffractionScan {
            params,
            samples,
            convention,
        } => diffraction_scan(&mut out, &load_params(&params)?, samples, convention, fmt),
        Command::Verify { suite } => verify(&mut out, &suite, fmt),
        Command::Mcguire { g0, mass, n } => mcguire(&mut out, g0, mass, n, fmt),
    }?;
    out.flush()?;
    Ok(())
}

fn load_params(path: &Path) -> CliResult<InteractionParams> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Expands `lo:hi:step` to `lo, lo + step, ...` up to `hi` with a half-step guard.
fn parse_range(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("range `{spec}` is not of the form lo:hi:step"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!(
            "range `{spec}` needs finite bounds and a positive step"
        )));
    }
    let len = ((hi - lo) / step + 0.5).floor();
    if len >= MAX_RANGE_LEN as f64 {
        return Err(CliError::Usage(format!("range `{spec}` has too many points")));
    }
    let values: Vec<f64> = (0..=len.max(-1.0) as i64 + 1)
        .map(|i| lo + i as f64 * step)
        .filter(|&v| v < hi + step / 2.0)
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage(format!("range `{spec}` is empty")));
    }
    Ok(values)
}

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer<W: Write>(out: &mut W) -> csv::Writer<&mut W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish_csv<W: Write>(wtr: csv::Writer<W>) -> CliResult<()> {
    wtr.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

fn params_check<W: Write>(out: &mut W, p: &InteractionParams, fmt: Option<Format>) -> CliResult<()> {
    match fmt.unwrap_or(Format::Json) {
        Format::Json => write_json(out, p),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.serialize(p.raw()).map_err(csv_err)?;
            finish_csv(w)
        }
    }
}

fn bound<W: Write>(out: &mut W, p: &InteractionParams, fmt: Option<Format>) -> CliResult<()> {
    let states = bound_spectrum(p);
    match fmt.unwrap_or(Format::Json) {
        Format::Json => {
            let states: Vec<_> = states
                .iter()
                .map(|s| json!({"kappa": s.kappa, "energy": s.energy, "eta_re": s.eta.re, "eta_im": s.eta.im}))
                .collect();
            write_json(out, &json!({ "states": states }))
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["kappa", "energy", "eta_re", "eta_im"])
                .map_err(csv_err)?;
            for s in &states {
                w.serialize((s.kappa, s.energy, s.eta.re, s.eta.im)).map_err(csv_err)?;
            }
            finish_csv(w)
        }
    }
}

fn scatter<W: Write>(out: &mut W, p: &InteractionParams, ks: &[f64], fmt: Option<Format>) -> CliResult<()> {
    let amps = sweep(p, ks)?;
    match fmt.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "k", "|T|^2", "|R|^2", "re(T+)", "im(T+)", "re(R+)", "im(R+)", "re(R-)", "im(R-)",
            ])
            .map_err(csv_err)?;
            for a in &amps {
                w.serialize((
                    a.k,
                    a.transmission_probability(),
                    a.reflection_probability(),
                    a.t_plus.re,
                    a.t_plus.im,
                    a.r_plus.re,
                    a.r_plus.im,
                    a.r_minus.re,
                    a.r_minus.im,
                ))
                .map_err(csv_err)?;
            }
            finish_csv(w)
        }
        Format::Json => {
            let points: Vec<_> = amps
                .iter()
                .map(|a| {
                    json!({
                        "k": a.k,
                        "transmission": a.transmission_probability(),
                        "reflection": a.reflection_probability(),
                        "t_plus": a.t_plus,
                        "t_minus": a.t_minus,
                        "r_plus": a.r_plus,
                        "r_minus": a.r_minus,
                    })
                })
                .collect();
            write_json(out, &json!({ "points": points }))
        }
    }
}

fn phase_diagram<W: Write>(
    out: &mut W,
    delta: f64,
    alphas: &[f64],
    gammas: &[f64],
    fmt: Option<Format>,
) -> CliResult<()> {
    let cells = phase_diagram_grid(alphas, gammas, delta)?;
    match fmt.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["alpha", "gamma", "count"]).map_err(csv_err)?;
            for c in &cells {
                w.serialize((c.alpha, c.gamma, c.count)).map_err(csv_err)?;
            }
            finish_csv(w)
        }
        Format::Json => write_json(out, &json!({ "delta": delta, "cells": cells })),
    }
}

fn nbody<W: Write>(out: &mut W, p: &InteractionParams, n: usize, cap: usize, fmt: Option<Format>) -> CliResult<()> {
    let states = nbody_bound_states_capped(p, n, cap)?;
    match fmt.unwrap_or(Format::Json) {
        Format::Json => {
            let states: Vec<_> = states
                .iter()
                .map(|s| {
                    json!({
                        "kappa": s.kappa,
                        "energy": s.energy,
                        "eta": s.eta,
                        "c_even": s.c_even,
                        "c_odd": s.c_odd,
                        "symmetry": s.symmetry(),
                    })
                })
                .collect();
            write_json(out, &json!({ "n": n, "states": states }))
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "kappa",
                "energy",
                "re(eta)",
                "im(eta)",
                "re(c_even)",
                "im(c_even)",
                "re(c_odd)",
                "im(c_odd)",
                "symmetry",
            ])
            .map_err(csv_err)?;
            for s in &states {
                let sym = serde_json::to_value(s.symmetry()).map_err(io::Error::from)?;
                w.serialize((
                    s.kappa,
                    s.energy,
                    s.eta.re,
                    s.eta.im,
                    s.c_even.re,
                    s.c_even.im,
                    s.c_odd.re,
                    s.c_odd.im,
                    sym.as_str().unwrap_or_default(),
                ))
                .map_err(csv_err)?;
            }
            finish_csv(w)
        }
    }
}

/// Reads one point per row; a first row that does not parse as numbers is taken as a header.
fn read_points(path: &Path, n: usize) -> CliResult<Vec<Vec<f64>>> {
    let input_err = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input_err(e.to_string()))?;
    let mut points = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| input_err(e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(input_err(format!("row {}: {e}", line + 1))),
        };
        if row.len() != n {
            return Err(input_err(format!(
                "row {} has {} coordinates, expected {n}",
                line + 1,
                row.len()
            )));
        }
        points.push(row);
    }
    Ok(points)
}

fn nbody_eval<W: Write>(
    out: &mut W,
    p: &InteractionParams,
    n: usize,
    index: usize,
    points: &Path,
    fmt: Option<Format>,
) -> CliResult<()> {
    let states = nbody_bound_states_capped(p, n, DEFAULT_MAX_PARTICLES)?;
    let state = states.get(index).ok_or_else(|| {
        CliError::Usage(format!(
            "state index {index} out of range ({} bound states)",
            states.len()
        ))
    })?;
    let points = read_points(points, n)?;
    let values: Vec<C64> = points.iter().map(|x| state.eval(x)).collect::<Result<_, _>>()?;
    match fmt.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer(out);
            let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
            header.extend(["re(psi)".to_string(), "im(psi)".to_string()]);
            w.write_record(&header).map_err(csv_err)?;
            for (x, v) in points.iter().zip(&values) {
                let mut row = x.clone();
                row.extend([v.re, v.im]);
                w.serialize(row).map_err(csv_err)?;
            }
            finish_csv(w)
        }
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .zip(&values)
                .map(|(x, v)| json!({"x": x, "psi": v}))
                .collect();
            write_json(
                out,
                &json!({ "n": n, "state_index": index, "energy": state.energy, "points": rows }),
            )
        }
    }
}

fn diffraction<W: Write>(
    out: &mut W,
    p: &InteractionParams,
    k: f64,
    phi: f64,
    convention: Convention,
    fmt: Option<Format>,
) -> CliResult<()> {
    let kin = ray_kinematics(k, phi)?;
    let r = outgoing_amplitudes_with(p, &kin, convention.into())?;
    match fmt.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &r),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "k", "phi", "k1", "k2", "k3", "re(fig3)", "im(fig3)", "re(fig4)", "im(fig4)", "residual",
            ])
            .map_err(csv_err)?;
            w.serialize((
                kin.k,
                kin.phi,
                kin.k1,
                kin.k2,
                kin.k3,
                r.amp_fig3.re,
                r.amp_fig3.im,
                r.amp_fig4.re,
                r.amp_fig4.im,
                r.residual_norm,
            ))
            .map_err(csv_err)?;
            finish_csv(w)
        }
    }
}

fn diffraction_scan<W: Write>(
    out: &mut W,
    p: &InteractionParams,
    samples: usize,
    convention: Convention,
    fmt: Option<Format>,
) -> CliResult<()> {
    let s = no_diffraction_scan_with(p, samples, convention.into())?;
    match fmt.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &s),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.serialize(s).map_err(csv_err)?;
            finish_csv(w)
        }
    }
}

fn verify<W: Write>(out: &mut W, suite: &str, fmt: Option<Format>) -> CliResult<()> {
    let suite: Suite = suite.parse()?;
    let reports = run_suite(suite);
    let width = reports.iter().map(|r| r.check_name.len()).max().unwrap_or(5).max(5);
    let mut err = io::stderr().lock();
    writeln!(
        err,
        "{:<width$}  {:>12}  {:>9}  {:>8}  result",
        "check", "max_residual", "tolerance", "samples"
    )?;
    for r in &reports {
        writeln!(
            err,
            "{:<width$}  {:>12.3e}  {:>9.0e}  {:>8}  {}",
            r.check_name,
            r.max_residual,
            r.tolerance,
            r.samples,
            if r.passed { "pass" } else { "FAIL" }
        )?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    match fmt.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &json!({ "passed": failed == 0, "reports": reports }))?,
        Format::Csv => {
            let mut w = csv_writer(out);
            for r in &reports {
                w.serialize(r).map_err(csv_err)?;
            }
            finish_csv(w)?;
        }
    }
    if failed > 0 {
        out.flush()?;
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}

fn mcguire<W: Write>(out: &mut W, g0: f64, mass: f64, n: usize, fmt: Option<Format>) -> CliResult<()> {
    let r = mcguire_reference(g0, mass, n)?;
    let params = InteractionParams::canonical(InteractionKind::Delta, relative_strength(g0), mass)?;
    let closed = nbody_bound_states_capped(&params, n, n)?
        .first()
        .map(|s| s.energy)
        .ok_or(CliError::Domain(pointfam_core::Error::NonBinding(g0)))?;
    let rel = ((closed - r.energy) / r.energy).abs();
    match fmt.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &json!({
                "g0": r.g0,
                "mass": r.mass,
                "n": r.n,
                "kappa": r.kappa,
                "energy": r.energy,
                "closed_form_energy": closed,
                "relative_difference": rel,
            }),
        ),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "g0",
                "mass",
                "n",
                "kappa",
                "energy",
                "closed_form_energy",
                "relative_difference",
            ])
            .map_err(csv_err)?;
            w.serialize((r.g0, r.mass, r.n, r.kappa, r.energy, closed, rel))
                .map_err(csv_err)?;
            finish_csv(w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0:0.9:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0:0.7:0.5").unwrap(), vec![0.0, 0.5]);
        assert_eq!(parse_range("-4:4:0.1").unwrap().len(), 81);
        assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
        assert!(parse_range("1:0:0.5").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("a:1:0.1").is_err());
    }
}
