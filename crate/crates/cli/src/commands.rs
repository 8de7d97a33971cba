use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use resonance_core::dynamics::{assemble_invariants_with, find_homoclinics, HomoclinicDatum, InvariantDiagnostics};
use resonance_core::spectral::{
    assemble_report, h_entry, lattice_points, lemma_window, pseudo_resonances_in_window, Case, HEntry, InstabilityReport,
    PseudoResonance, QuantizationInput, Source,
};

use crate::config::{check_h_values, HSelection, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{num, FailureManifest, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Invariants,
    MuScan,
    HSet,
    PseudoResonances,
    LatticeCheck,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::MuScan => "mu-scan",
            Command::HSet => "h-set",
            Command::PseudoResonances => "pseudo-resonances",
            Command::LatticeCheck => "lattice-check",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub h: Vec<f64>,
    pub delta: Option<f64>,
    pub threads: Option<usize>,
}

/// Applies command-line overrides and re-validates.
pub fn apply_overrides(mut cfg: RunConfig, ov: &Overrides) -> Result<RunConfig> {
    if let Some(d) = &ov.out_dir {
        cfg.output.dir = d.clone();
    }
    if let Some(delta) = ov.delta {
        cfg.delta = delta;
    }
    if let Some(t) = ov.threads {
        cfg.search.threads = t;
    }
    if !ov.h.is_empty() {
        check_h_values(&ov.h)?;
        cfg.h_selection = HSelection::Explicit { values: ov.h.clone() };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one command and writes its outputs; on failure a `failure_manifest.json`
/// lists what was written before the error.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Vec<String>> {
    let mut out = Outputs::new(&cfg.output.dir)?;
    let result = match command {
        Command::Invariants => invariants(cfg, &mut out),
        Command::MuScan => mu_scan(cfg, &mut out),
        Command::HSet => h_set(cfg, &mut out),
        Command::PseudoResonances => pseudo_resonances(cfg, &mut out),
        Command::LatticeCheck => lattice_check(cfg, &mut out),
        Command::Report => report(cfg, &mut out),
    };
    match result {
        Ok(mut lines) => {
            lines.extend(out.written.iter().map(|p| format!("wrote {}", p.display())));
            Ok(lines)
        }
        Err(e) => {
            let stage = match &e {
                CliError::Numerical { stage, .. } => stage.clone(),
                CliError::NoHomoclinics => "dynamics/find_homoclinics".into(),
                CliError::Validation(_) => "validation".into(),
                CliError::Io(_) => "output".into(),
            };
            let manifest = FailureManifest {
                command: command.name().into(),
                stage,
                error: e.to_string(),
                exit_code: e.exit_code(),
                written: out.written.iter().map(|p| p.display().to_string()).collect(),
            };
            out.json("failure_manifest.json", &manifest)?;
            Err(e)
        }
    }
}

type DynamicsRows = Vec<(HomoclinicDatum<f64>, InvariantDiagnostics<f64>)>;

fn dynamics(cfg: &RunConfig) -> Result<(DynamicsRows, Vec<String>, Vec<resonance_core::dynamics::Trajectory<f64>>)> {
    let spec = cfg.potential.as_ref().ok_or_else(|| CliError::Validation("command needs a `potential` section".into()))?;
    let found = find_homoclinics(spec, &cfg.search).map_err(|e| CliError::from_dynamics("find_homoclinics", e))?;
    let maslov = if cfg.maslov.is_empty() { vec![0; found.homoclinics.len()] } else { cfg.maslov.clone() };
    let rows = assemble_invariants_with(spec, &found.homoclinics, &maslov, &cfg.invariants)
        .map_err(|e| CliError::from_dynamics("assemble_invariants", e))?;
    let trajectories = found.homoclinics.into_iter().map(|h| h.trajectory).collect();
    Ok((rows, found.warnings, trajectories))
}

/// Quantization input from the synthetic records or from the dynamics pipeline.
pub fn quantization_input(cfg: &RunConfig) -> Result<QuantizationInput<f64>> {
    let input = match (&cfg.synthetic_invariants, &cfg.potential) {
        (Some(s), _) => s.input()?,
        (None, Some(spec)) => {
            let (rows, _, _) = dynamics(cfg)?;
            let data: Vec<HomoclinicDatum<f64>> = rows.into_iter().map(|(d, _)| d).collect();
            let perturbed = data.iter().position(|d| d.w_integral != 0.0).unwrap_or(0);
            let input = QuantizationInput {
                data,
                lambda1: spec.lambda1,
                lambda2: spec.lambda2,
                e0: spec.e0,
                source: Source::DynamicsDerived,
                perturbed,
            };
            input.validate().map_err(|e| CliError::from_spectral("dynamics-derived invariants", e))?;
            input
        }
        (None, None) => return Err(CliError::Validation("no invariants configured".into())),
    };
    if let Some(case) = cfg.case.case() {
        input.check_case(case, 1e-8).map_err(|e| CliError::from_spectral("case check", e))?;
    }
    Ok(input)
}

pub fn h_list(cfg: &RunConfig, input: &QuantizationInput<f64>) -> Result<Vec<f64>> {
    match &cfg.h_selection {
        HSelection::Explicit { values } => Ok(values.clone()),
        HSelection::Case { j_max } => {
            let case = cfg.case.case().ok_or_else(|| CliError::Validation("h_selection kind `case` needs a case".into()))?;
            input.admissible_h_set(case, *j_max).map_err(|e| CliError::from_spectral("admissible_h_set", e))
        }
        HSelection::Geometric { base, m_min, m_max } => Ok((*m_min..=*m_max).map(|m| base.powi(-m)).collect()),
    }
}

/// `h` values accepted by the solvers, i.e. those in `(0, 1)`.
fn solver_h_list(cfg: &RunConfig, input: &QuantizationInput<f64>) -> Result<Vec<f64>> {
    let hs: Vec<f64> = h_list(cfg, input)?.into_iter().filter(|h| *h < 1.0).collect();
    check_h_values(&hs)?;
    Ok(hs)
}

fn row(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| num(*v)).collect()
}

fn invariants(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    const HEADER: [&str; 16] = [
        "k", "action_a", "re_b", "im_b", "time_t", "maslov_nu", "g_plus_abs", "g_minus_abs", "m_plus", "m_minus",
        "w_integral", "fit_residual", "m_plus_error", "m_minus_error", "collinearity_angle", "energy_error",
    ];
    let (rows, warnings, trajectories) = match dynamics(cfg) {
        Err(CliError::NoHomoclinics) => {
            out.csv::<Vec<String>>("invariants.csv", "invariants", &HEADER, &[])?;
            return Err(CliError::NoHomoclinics);
        }
        r => r?,
    };
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(d, g)| {
            let mut r = vec![d.index.to_string()];
            r.extend(row(&[d.action_a, d.amplitude_b.re, d.amplitude_b.im, d.time_t]));
            r.push(d.maslov_nu.to_string());
            r.extend(row(&[
                d.g_plus[0].hypot(d.g_plus[1]),
                d.g_minus[0].hypot(d.g_minus[1]),
                d.m_plus,
                d.m_minus,
                d.w_integral,
                g.fit_residual,
                g.m_plus_error,
                g.m_minus_error,
                g.collinearity_angle,
                g.energy_error,
            ]));
            r
        })
        .collect();
    out.csv("invariants.csv", "invariants", &HEADER, &table)?;
    for (k, t) in trajectories.iter().enumerate() {
        let mut f = out.file(&format!("trajectory_{}.csv", k + 1))?;
        writeln!(f, "# reslab trajectory schema v{}", crate::output::CSV_SCHEMA_VERSION)?;
        t.write_csv(&mut f)?;
        f.flush()?;
    }
    let mut lines = vec![format!("{} homoclinic trajectories", rows.len())];
    lines.extend(warnings.into_iter().map(|w| format!("warning: {w}")));
    Ok(lines)
}

fn hset_rows(input: &QuantizationInput<f64>, hs: &[f64]) -> Result<Vec<Vec<String>>> {
    hs.iter()
        .enumerate()
        .map(|(j, &h)| {
            let rel = |tau: f64| -> Result<f64> {
                let t = Complex64::new(tau, 0.0);
                let mu = input.mu(t, h).map_err(|e| CliError::from_spectral("mu", e))?;
                let scale = input.mu_scale(t, h).map_err(|e| CliError::from_spectral("mu", e))?;
                Ok(mu.norm() / scale)
            };
            let mut r = vec![j.to_string()];
            r.extend(row(&[h, rel(0.0)?, rel(1.0)?]));
            Ok(r)
        })
        .collect()
}

const HSET_HEADER: [&str; 4] = ["j", "h", "mu_rel_tau0", "mu_rel_tau1"];

fn h_set(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let input = quantization_input(cfg)?;
    let hs = h_list(cfg, &input)?;
    out.csv("hset.csv", "hset", &HSET_HEADER, &hset_rows(&input, &hs)?)?;
    Ok(vec![format!("{} h values", hs.len())])
}

fn mu_scan(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let input = quantization_input(cfg)?;
    let hs = h_list(cfg, &input)?;
    let m = &cfg.mu_scan;
    let taus: Vec<f64> = (0..m.n_tau)
        .map(|i| if m.n_tau == 1 { m.tau_min } else { m.tau_min + (m.tau_max - m.tau_min) * i as f64 / (m.n_tau - 1) as f64 })
        .collect();
    let blocks: Vec<Vec<Vec<String>>> = hs
        .par_iter()
        .map(|&h| {
            taus.iter()
                .map(|&tau| {
                    let t = Complex64::new(tau, m.tau_im);
                    let mu = input.mu(t, h).map_err(|e| CliError::from_spectral("mu", e))?;
                    let scale = input.mu_scale(t, h).map_err(|e| CliError::from_spectral("mu", e))?;
                    Ok(row(&[h, tau, m.tau_im, mu.re, mu.im, mu.norm(), scale, mu.norm() / scale]))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = blocks.into_iter().flatten().collect();
    let header = ["h", "tau_re", "tau_im", "mu_re", "mu_im", "mu_abs", "mu_scale", "mu_rel"];
    out.csv("mu_scan.csv", "mu-scan", &header, &rows)?;
    if cfg.case.case() == Some(Case::I) {
        let j_max = match cfg.h_selection {
            HSelection::Case { j_max } => j_max,
            _ => 20,
        };
        let set = input.admissible_h_set(Case::I, j_max).map_err(|e| CliError::from_spectral("admissible_h_set", e))?;
        out.csv("hset.csv", "hset", &HSET_HEADER, &hset_rows(&input, &set)?)?;
    }
    Ok(vec![format!("{} grid points", rows.len())])
}

fn roots_at(cfg: &RunConfig, input: &QuantizationInput<f64>, h: f64) -> Result<Vec<PseudoResonance<f64>>> {
    let w = lemma_window(input, h, cfg.delta, cfg.window.c, cfg.window.c_low)
        .map_err(|e| CliError::from_spectral("lemma_window", e))?;
    pseudo_resonances_in_window(input, h, cfg.delta, &w, &cfg.solver)
        .map_err(|e| CliError::from_spectral(&format!("pseudo_resonances h={h}"), e))
}

fn resonance_rows(h: f64, roots: &[PseudoResonance<f64>], tol: f64) -> Result<Vec<Vec<String>>> {
    roots
        .iter()
        .map(|r| {
            if !(r.residual < tol) {
                return Err(CliError::Numerical {
                    stage: format!("spectral/pseudo_resonances h={h}"),
                    message: format!("residual {:e} above tolerance {tol:e}", r.residual),
                });
            }
            let mut v = row(&[h]);
            v.push(r.q.to_string());
            v.extend(row(&[r.z.re, r.z.im, r.sigma.re, r.sigma.im, r.tau, r.residual, r.lattice_distance]));
            Ok(v)
        })
        .collect()
}

const RESONANCE_HEADER: [&str; 9] = ["h", "q", "re_z", "im_z", "re_sigma", "im_sigma", "tau", "residual", "lattice_distance"];

fn pseudo_resonances(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let input = quantization_input(cfg)?;
    let hs = solver_h_list(cfg, &input)?;
    let blocks = hs
        .par_iter()
        .map(|&h| resonance_rows(h, &roots_at(cfg, &input, h)?, cfg.solver.newton_tol))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = blocks.into_iter().flatten().collect();
    out.csv("pseudo_resonances.csv", "pseudo-resonances", &RESONANCE_HEADER, &rows)?;
    Ok(vec![format!("{} pseudo-resonances over {} h values", rows.len(), hs.len())])
}

fn lattice_check(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let input = quantization_input(cfg)?;
    let hs = solver_h_list(cfg, &input)?;
    let c = cfg.window.c;
    let rows = hs
        .par_iter()
        .map(|&h| {
            let roots = roots_at(cfg, &input, h)?;
            let pts = lattice_points(&input, h, cfg.delta, -c - 1.0, c + 1.0)
                .map_err(|e| CliError::from_spectral("lattice_points", e))?;
            let w = lemma_window(&input, h, cfg.delta, c, cfg.window.c_low).map_err(|e| CliError::from_spectral("lemma_window", e))?;
            let n_lattice = pts.iter().filter(|p| w.contains(p.sigma * h + input.e0)).count();
            let worst = roots.iter().map(|r| r.lattice_distance).fold(0.0, f64::max);
            let paired = roots.iter().all(|r| r.lattice_distance < 1.0);
            let mut v = row(&[h, -h.ln()]);
            v.extend([roots.len().to_string(), n_lattice.to_string(), num(worst), paired.to_string()]);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    let header = ["h", "log_h_abs", "roots", "lattice_points", "max_lattice_distance", "all_paired"];
    out.csv("lattice_check.csv", "lattice-check", &header, &rows)?;
    Ok(vec![format!("{} h values checked", rows.len())])
}

fn report(cfg: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let input = quantization_input(cfg)?;
    let hs = solver_h_list(cfg, &input)?;
    let alpha = cfg.alpha();
    if !(cfg.delta < alpha) {
        return Err(CliError::Validation(format!("report needs delta < alpha (delta = {}, alpha = {alpha})", cfg.delta)));
    }
    let results: Vec<(f64, Result<HEntry>)> = hs
        .par_iter()
        .map(|&h| (h, h_entry(&input, cfg.delta, alpha, h, cfg.window, &cfg.solver).map_err(|e| CliError::from_spectral(&format!("report h={h}"), e))))
        .collect();
    let mut entries = Vec::new();
    let mut failure = None;
    for (_, r) in results {
        match r {
            Ok(e) => entries.push(e),
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    let mut rows = Vec::new();
    for e in &entries {
        rows.extend(resonance_rows(e.h, &e.pseudo_resonances, cfg.solver.newton_tol)?);
    }
    out.csv("resonances.csv", "pseudo-resonances", &RESONANCE_HEADER, &rows)?;
    write_plot_data(cfg, &input, alpha, &entries, out)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let report = assemble_report(&input, cfg.delta, alpha, cfg.window, entries)
        .map_err(|e| CliError::from_spectral("assemble_report", e))?;
    out.json("report.json", &report)?;
    Ok(summary(&report))
}

fn write_plot_data(cfg: &RunConfig, input: &QuantizationInput<f64>, alpha: f64, entries: &[HEntry], out: &mut Outputs) -> Result<()> {
    let d0 = input.lambda2 / 2.0;
    let lines: Vec<Vec<f64>> = entries.iter().map(|e| vec![e.h, -(d0 + alpha) * e.h, -(d0 + cfg.delta) * e.h]).collect();
    out.columns("plot/depth_lines.dat", &["h", "unperturbed_depth", "perturbed_depth"], &lines)?;
    let markers: Vec<Vec<f64>> = entries
        .iter()
        .flat_map(|e| e.pseudo_resonances.iter().map(move |r| vec![e.h, r.z.re - input.e0, r.z.im, r.sigma.re, r.sigma.im]))
        .collect();
    out.columns("plot/markers.dat", &["h", "re_z_minus_e0", "im_z", "re_sigma", "im_sigma"], &markers)?;
    let depth: Vec<Vec<f64>> = entries
        .iter()
        .map(|e| vec![e.h, e.log_h_abs, e.top_depth_over_h.unwrap_or(f64::NAN), -(d0 + cfg.delta)])
        .collect();
    out.columns("plot/top_depth.dat", &["h", "log_h_abs", "top_im_sigma", "limit"], &depth)?;
    Ok(())
}

fn summary(r: &InstabilityReport) -> Vec<String> {
    vec![
        format!("h values: {} (certified {})", r.h_list.len(), r.hset.len()),
        format!("counts in [A, B]: {:?}", r.counts),
        format!("ess-qt proxy {:.6} vs unperturbed bound {:.6}", r.ess_qt_proxy, r.unperturbed_ess_qt_bound),
        format!("trapping increase {:.6} (bound {:.6})", r.trapping_increase, r.trapping_increase_bound),
    ]
}
