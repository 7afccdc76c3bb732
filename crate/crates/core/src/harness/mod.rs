//! Driver for single runs and parameter studies on the box flow: mesh
//! refinement, Nitsche parameter sweeps and slip-length sweeps with the
//! substitution comparison.

pub mod output;
pub mod parse;

use std::path::PathBuf;

use rayon::prelude::*;

use crate::assembly::{assemble_system, BcMode, OseenConfig, Regime, SlipLength};
use crate::cut_geometry::DomainPolygon;
use crate::fem_basis::FunctionSpace;
use crate::linear_solver::{solve, SolveStatus};
use crate::mesh::{build_background_mesh, extract_active_mesh};
use crate::verification::{compute_errors, convergence_rates, pressure_moments, ErrorReport, ExactSolution};
use crate::{Error, Result};

use parse::{parse_eps_list, parse_f64_list, parse_usize_list, parse_zeta, ConfigFile};

pub const HALF_EXTENT: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    Single,
    Converge,
    SweepGamma,
    SweepEps,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Single => "single",
            Study::Converge => "converge",
            Study::SweepGamma => "sweep_gamma",
            Study::SweepEps => "sweep_eps",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "single" | "run" => Ok(Study::Single),
            "converge" => Ok(Study::Converge),
            "sweep_gamma" => Ok(Study::SweepGamma),
            "sweep_eps" => Ok(Study::SweepEps),
            other => Err(Error::InvalidConfig(format!("unknown study `{other}`"))),
        }
    }
}

pub fn parse_mode(s: &str) -> Result<BcMode> {
    match s.trim() {
        "nitsche" | "nitsche_gnbc" => Ok(BcMode::NitscheGnbc),
        "substitution" => Ok(BcMode::Substitution),
        other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
    }
}

pub fn parse_regime(s: &str) -> Result<Regime> {
    match s.trim() {
        "experimental" => Ok(Regime::Experimental),
        "analysis" => Ok(Regime::Analysis),
        other => Err(Error::InvalidConfig(format!("unknown regime `{other}`"))),
    }
}

/// Physical and discretization parameters of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub order: usize,
    pub n: usize,
    pub theta: f64,
    pub eps: SlipLength,
    pub inv_gamma: f64,
    pub zeta: f64,
    pub mode: BcMode,
    pub regime: Regime,
    pub nu: f64,
    pub sigma: f64,
}

impl Case {
    pub fn new(order: usize, n: usize) -> Self {
        Self {
            order,
            n,
            theta: 0.25 * std::f64::consts::PI,
            eps: SlipLength::new(1.0).expect("valid"),
            inv_gamma: 10.0,
            zeta: 1.0,
            mode: BcMode::NitscheGnbc,
            regime: Regime::Experimental,
            nu: 1.0,
            sigma: 1.0,
        }
    }

    pub fn h(&self) -> f64 {
        2.0 * HALF_EXTENT / self.n as f64
    }

    /// Solver configuration with the box-flow data installed.
    pub fn config(&self) -> OseenConfig {
        let mut c = OseenConfig::new(self.order);
        ExactSolution::new(self.nu, self.sigma).configure(&mut c);
        c.slip_length = self.eps;
        c.gamma_n = 1.0 / self.inv_gamma;
        c.gamma_t = 1.0 / self.inv_gamma;
        c.zeta_u = self.zeta;
        c.bc_mode = self.mode;
        c.regime_weights = self.regime.weights();
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub case: Case,
    pub dofs: usize,
    pub status: String,
    pub errors: Option<ErrorReport>,
    /// `(∫_Ω p_h, ‖p_h‖_Ω)` of a converged solve
    pub pressure: Option<(f64, f64)>,
}

impl CaseResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged.name()
    }
}

/// Assembles, solves and measures one case. Failures are reported in the
/// status, never returned as errors.
pub fn run_case(case: &Case) -> CaseResult {
    let mut out = CaseResult {
        case: *case,
        dofs: 0,
        status: String::new(),
        errors: None,
        pressure: None,
    };
    match try_run_case(case, &mut out) {
        Ok(()) => {}
        Err(Error::SingularMatrix) => out.status = SolveStatus::Singular.name().to_string(),
        Err(e) => out.status = format!("error: {e}"),
    }
    out
}

fn try_run_case(case: &Case, out: &mut CaseResult) -> Result<()> {
    let mesh = extract_active_mesh(
        build_background_mesh(case.n, HALF_EXTENT, case.theta),
        DomainPolygon::square(1.0),
    )?;
    let space = FunctionSpace::new(&mesh, case.order)?;
    out.dofs = space.n_field_dofs() + 1;
    let system = assemble_system(&case.config(), &mesh, &space)?;
    let sol = solve(&system)?;
    out.status = sol.report.status.name().to_string();
    let exact = ExactSolution::new(case.nu, case.sigma);
    if sol.coeffs.iter().all(|v| v.is_finite()) {
        out.errors = Some(compute_errors(sol.fields(), &exact, &mesh, &space)?);
        out.pressure = Some(pressure_moments(sol.fields(), &mesh, &space)?);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub study: Study,
    pub order: usize,
    pub ns: Vec<usize>,
    pub theta: f64,
    pub eps: Vec<SlipLength>,
    pub inv_gamma: Vec<f64>,
    pub zeta: f64,
    pub mode: BcMode,
    pub regime: Regime,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl StudySpec {
    pub fn new(study: Study) -> Self {
        let base = Case::new(1, 16);
        Self {
            study,
            order: 1,
            ns: vec![16],
            theta: base.theta,
            eps: vec![base.eps],
            inv_gamma: vec![base.inv_gamma],
            zeta: base.zeta,
            mode: base.mode,
            regime: base.regime,
            out: None,
            svg: None,
        }
    }

    /// Applies the recognised keys of a config file.
    pub fn apply_config(&mut self, cfg: &ConfigFile) -> Result<()> {
        for (key, value) in &cfg.entries {
            match key.as_str() {
                "study" => self.study = Study::parse(value)?,
                "order" => {
                    self.order = value
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("invalid order `{value}`")))?
                }
                "n" => self.ns = parse_usize_list(value)?,
                "theta" => {
                    self.theta = value
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("invalid theta `{value}`")))?
                }
                "eps" => self.eps = parse_eps_list(value)?,
                "inv_gamma" => self.inv_gamma = parse_f64_list(value)?,
                "zeta" => self.zeta = parse_zeta(value)?,
                "mode" => self.mode = parse_mode(value)?,
                "regime" => self.regime = parse_regime(value)?,
                "out" => self.out = Some(PathBuf::from(value)),
                "svg" => self.svg = Some(PathBuf::from(value)),
                other => return Err(Error::InvalidConfig(format!("unknown config key `{other}`"))),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.order) {
            return Err(Error::InvalidConfig(format!("order must be 1 or 2, got {}", self.order)));
        }
        if self.ns.is_empty() || self.eps.is_empty() || self.inv_gamma.is_empty() {
            return Err(Error::InvalidConfig("sweep lists must be non-empty".into()));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidConfig("theta must be finite".into()));
        }
        Ok(())
    }

    /// All cases in output order: for each slip length, each `1/γ`, each
    /// mesh size. A single run uses the first entry of each list.
    pub fn cases(&self) -> Vec<Case> {
        let base = |n: usize, eps: SlipLength, inv_gamma: f64| Case {
            theta: self.theta,
            eps,
            inv_gamma,
            zeta: self.zeta,
            mode: self.mode,
            regime: self.regime,
            ..Case::new(self.order, n)
        };
        if self.study == Study::Single {
            return vec![base(self.ns[0], self.eps[0], self.inv_gamma[0])];
        }
        let mut out = Vec::new();
        for &eps in &self.eps {
            for &g in &self.inv_gamma {
                for &n in &self.ns {
                    out.push(base(n, eps, g));
                }
            }
        }
        out
    }
}

/// Observed orders between consecutive mesh sizes of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub coarse: Case,
    pub fine: Case,
    /// one entry per error norm; `None` where a neighbour did not converge
    pub rates: [Option<f64>; 6],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub spec: StudySpec,
    pub rows: Vec<CaseResult>,
    pub rates: Vec<RateRow>,
}

/// Runs every case of the spec (concurrently; results keep spec order).
pub fn run_study(spec: &StudySpec) -> Result<StudyOutput> {
    spec.validate()?;
    let cases = spec.cases();
    let rows: Vec<CaseResult> = cases.par_iter().map(run_case).collect();
    let rates = if spec.study == Study::Converge { rate_rows(&rows) } else { Vec::new() };
    Ok(StudyOutput {
        spec: spec.clone(),
        rows,
        rates,
    })
}

/// Rate rows for consecutive entries that belong to the same series
/// (same slip length and `1/γ`).
pub fn rate_rows(rows: &[CaseResult]) -> Vec<RateRow> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.case.eps != b.case.eps || a.case.inv_gamma != b.case.inv_gamma || b.case.n <= a.case.n {
            continue;
        }
        let mut rates = [None; 6];
        if let (Some(ea), Some(eb)) = (a.errors, b.errors) {
            if a.converged() && b.converged() {
                let (ea, eb) = (ea.as_array(), eb.as_array());
                for i in 0..6 {
                    rates[i] = convergence_rates(&[(a.case.h(), ea[i]), (b.case.h(), eb[i])])
                        .ok()
                        .map(|r| r[0]);
                }
            }
        }
        out.push(RateRow {
            coarse: a.case,
            fine: b.case,
            rates,
        });
    }
    out
}

/// Runs the study and writes the requested CSV and SVG files.
pub fn run_and_write(spec: &StudySpec) -> Result<StudyOutput> {
    let out = run_study(spec)?;
    if let Some(path) = &spec.out {
        output::write_csv_file(path, &out)?;
    }
    if let Some(path) = &spec.svg {
        std::fs::write(path, output::svg_plot(&out))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_expansion_order() {
        let mut s = StudySpec::new(Study::SweepEps);
        s.ns = vec![8, 16];
        s.eps = parse_eps_list("1e-10,inf").unwrap();
        let c = s.cases();
        assert_eq!(c.len(), 4);
        assert_eq!((c[0].n, c[1].n), (8, 16));
        assert!(c[2].eps.is_infinite());
        s.study = Study::Single;
        assert_eq!(s.cases().len(), 1);
    }

    #[test]
    fn config_overrides() {
        let mut s = StudySpec::new(Study::Single);
        let cfg = parse::parse_config_str("study = converge\norder = 2\nn = 8,16\nmode = substitution\nzeta=-1").unwrap();
        s.apply_config(&cfg).unwrap();
        assert_eq!(s.study, Study::Converge);
        assert_eq!(s.order, 2);
        assert_eq!(s.mode, BcMode::Substitution);
        assert_eq!(s.zeta, -1.0);
        let bad = parse::parse_config_str("colour = red").unwrap();
        assert!(s.apply_config(&bad).is_err());
        s.order = 3;
        assert!(s.validate().is_err());
    }

    #[test]
    fn failed_case_becomes_status_row() {
        let mut c = Case::new(1, 4);
        c.mode = BcMode::Substitution;
        c.eps = SlipLength::new(0.0).unwrap();
        let r = run_case(&c);
        assert!(r.status.starts_with("error"));
        assert!(r.errors.is_none());
    }

    #[test]
    fn small_solve_converges_with_zero_mean_pressure() {
        let r = run_case(&Case::new(1, 8));
        assert!(r.converged(), "{}", r.status);
        let (mean, norm) = r.pressure.unwrap();
        assert!(mean.abs() <= 1e-9 * norm);
    }
}
