//! Refinement sweeps: mesh, solve, measure, and write result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    convergence_orders, error_norms, inf_sup_estimate, interpolate_ih, kt_perturbation_report,
    order, ConvergenceTable, ErrorOptions, ErrorReport, DENSE_LIMIT,
};
use crate::assembly::{assemble, assemble_gram, AssembledSystem, AssemblyRules, BasisChoice};
use crate::error::{Error, Result};
use crate::linsolve::{solve, SolveReport};
use crate::mesh::{
    classify_elements, gen_annulus_sector_mesh, gen_quarter_ellipse_concentric_mesh,
    gen_quarter_ellipse_mesh, gen_unit_square_mesh, read_mesh_text, write_mesh_text, TriMesh,
};
use crate::problems::{annulus_test2, ellipse_test1, polygon_patch, ExtensionMode, ProblemSpec};
use crate::spaces::{build_dof_map, build_local_bases, DofMap, LocalBasis};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "SHIFTFEM_OUT_DIR";

pub const DEFAULT_OUT_DIR: &str = "shiftfem-out";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// Quarter ellipse, polynomial solution vanishing on the curve. Sweep over J.
    #[default]
    EllipseTest1,
    /// Quarter annulus, radial solution. Sweep over I with J = I/2.
    AnnulusTest2,
    /// Unit square, full polynomial of degree k. Sweep over cells per side.
    PolygonPatch,
    /// Meshes read from `mesh_<param>.txt` files with a named solution.
    Custom,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularRange {
    #[default]
    HalfPi,
    QuarterPi,
}

impl AngularRange {
    pub fn radians(self) -> f64 {
        match self {
            AngularRange::HalfPi => std::f64::consts::FRAC_PI_2,
            AngularRange::QuarterPi => std::f64::consts::FRAC_PI_4,
        }
    }
}

/// Mesh family for the ellipse problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllipseMesh {
    /// Polar image of the square grid with an origin fan.
    #[default]
    PolarFan,
    /// Concentric L-shaped rings of the square grid mapped to elliptic arcs.
    ConcentricSquares,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub stiffness_degree: Option<usize>,
    pub load_degree: Option<usize>,
    pub error_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSource {
    /// Manufactured solution (and geometry) to use; must not be `custom`.
    pub solution: ProblemKind,
    /// Directory holding `mesh_<param>.txt` for every sweep entry.
    pub mesh_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub e: f64,
    pub k: usize,
    pub sweep: Vec<usize>,
    pub extension_mode: ExtensionMode,
    pub angular_range: AngularRange,
    pub ellipse_mesh: EllipseMesh,
    pub quadrature: QuadratureOverrides,
    pub out_dir: Option<PathBuf>,
    /// Leave wall-clock timings out of the written files.
    pub deterministic: bool,
    /// Compute the inf-sup estimate only up to this many unknowns.
    pub inf_sup_max_unknowns: usize,
    pub dump_meshes: bool,
    /// Integrate errors only over quadrature points inside the true domain.
    pub skip_outside_errors: bool,
    pub custom: Option<CustomSource>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::EllipseTest1,
            e: 0.5,
            k: 2,
            sweep: vec![4, 8, 16, 32, 64],
            extension_mode: ExtensionMode::Analytic,
            angular_range: AngularRange::HalfPi,
            ellipse_mesh: EllipseMesh::PolarFan,
            quadrature: QuadratureOverrides::default(),
            out_dir: None,
            deterministic: true,
            inf_sup_max_unknowns: 1200,
            dump_meshes: false,
            skip_outside_errors: false,
            custom: None,
        }
    }
}

impl ExperimentConfig {
    pub fn for_problem(problem: ProblemKind) -> Self {
        Self {
            problem,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParam(msg));
        if !(2..=3).contains(&self.k) {
            return Err(Error::UnsupportedDegree(self.k));
        }
        if !(self.e > 0.0 && self.e < 1.0) {
            return bad(format!("e = {} must lie in (0, 1)", self.e));
        }
        if self.sweep.is_empty() || self.sweep.contains(&0) {
            return bad("sweep must be a non-empty list of positive integers".into());
        }
        if self.sweep.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("sweep {:?} is not strictly increasing", self.sweep));
        }
        if let Some(w) = self.sweep.windows(2).find(|w| w[1] != 2 * w[0]) {
            return Err(Error::NonDyadicSequence(format!(
                "{} is followed by {}",
                w[0], w[1]
            )));
        }
        if self.inf_sup_max_unknowns > DENSE_LIMIT {
            return bad(format!("inf_sup_max_unknowns exceeds {DENSE_LIMIT}"));
        }
        if self.solution_kind()? == ProblemKind::AnnulusTest2
            && self.problem != ProblemKind::Custom
            && self.sweep.iter().any(|i| i % 2 != 0)
        {
            return bad("annulus sweep values are I = 2J and must be even".into());
        }
        Ok(())
    }

    /// Manufactured solution in use, resolving `custom`.
    pub fn solution_kind(&self) -> Result<ProblemKind> {
        match (self.problem, &self.custom) {
            (ProblemKind::Custom, Some(c)) if c.solution != ProblemKind::Custom => Ok(c.solution),
            (ProblemKind::Custom, _) => Err(Error::InvalidParam(
                "custom problem needs a `custom` section naming a built-in solution".into(),
            )),
            (kind, _) => Ok(kind),
        }
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let problem = match self.solution_kind()? {
            ProblemKind::EllipseTest1 => ellipse_test1(self.e)?,
            ProblemKind::AnnulusTest2 => annulus_test2(self.e)?,
            ProblemKind::PolygonPatch => polygon_patch(self.k)?,
            ProblemKind::Custom => unreachable!("resolved by solution_kind"),
        };
        Ok(problem.with_extension(self.extension_mode))
    }

    pub fn mesh_for(&self, param: usize) -> Result<TriMesh> {
        match self.problem {
            ProblemKind::EllipseTest1 => match self.ellipse_mesh {
                EllipseMesh::PolarFan => gen_quarter_ellipse_mesh(param, self.e),
                EllipseMesh::ConcentricSquares => {
                    gen_quarter_ellipse_concentric_mesh(param, self.e)
                }
            },
            ProblemKind::AnnulusTest2 => gen_annulus_sector_mesh(
                param,
                (param / 2).max(1),
                self.e,
                self.angular_range.radians(),
            ),
            ProblemKind::PolygonPatch => gen_unit_square_mesh(param),
            ProblemKind::Custom => {
                let dir = &self.custom.as_ref().expect("validated").mesh_dir;
                read_mesh_text(&fs::read_to_string(dir.join(format!("mesh_{param}.txt")))?)
            }
        }
    }

    pub fn rules(&self) -> AssemblyRules {
        let d = AssemblyRules::for_degree(self.k);
        AssemblyRules {
            stiffness_degree: self
                .quadrature
                .stiffness_degree
                .unwrap_or(d.stiffness_degree),
            load_degree: self.quadrature.load_degree.unwrap_or(d.load_degree),
        }
    }

    pub fn error_options(&self) -> ErrorOptions {
        ErrorOptions {
            degree: self.quadrature.error_degree,
            skip_outside: self.skip_outside_errors,
        }
    }

    /// Explicit directory, else the environment override, else the config value.
    pub fn resolve_out_dir(&self, explicit: Option<&Path>) -> PathBuf {
        explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .or_else(|| self.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

/// Mesh with its spaces.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: TriMesh,
    pub dofmap: DofMap,
    pub local_bases: Vec<LocalBasis>,
}

pub fn discretize(mesh: TriMesh, problem: &ProblemSpec, k: usize) -> Result<Discretization> {
    let mesh = classify_elements(mesh, &problem.geom)?;
    let local_bases = build_local_bases(&mesh, &problem.geom, k)?;
    let d = problem.d.clone();
    let dofmap = build_dof_map(&mesh, &problem.geom, k, |p| d(p))?;
    Ok(Discretization {
        mesh,
        dofmap,
        local_bases,
    })
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub disc: Discretization,
    pub system: AssembledSystem,
    pub report: SolveReport,
    /// Values at every global node, Dirichlet data included.
    pub nodal: Vec<f64>,
}

pub fn solve_problem(
    mesh: TriMesh,
    problem: &ProblemSpec,
    k: usize,
    rules: &AssemblyRules,
) -> Result<Solution> {
    let disc = discretize(mesh, problem, k)?;
    let system = assemble(&disc.mesh, &disc.dofmap, &disc.local_bases, problem, rules)?;
    let report = solve(&system.a, &system.rhs)?;
    let nodal = disc.dofmap.expand(&report.solution);
    Ok(Solution {
        disc,
        system,
        report,
        nodal,
    })
}

impl Solution {
    pub fn errors(&self, problem: &ProblemSpec, options: &ErrorOptions) -> Result<ErrorReport> {
        let d = &self.disc;
        error_norms(
            &d.mesh,
            &d.dofmap,
            &d.local_bases,
            &self.nodal,
            problem,
            options,
        )
    }

    /// Errors of the trial-space interpolant of the exact solution.
    pub fn interpolation_errors(
        &self,
        problem: &ProblemSpec,
        options: &ErrorOptions,
    ) -> Result<ErrorReport> {
        let u = problem.exact()?.u.clone();
        let d = &self.disc;
        let nodal = interpolate_ih(|p| u(p), &d.dofmap);
        error_norms(&d.mesh, &d.dofmap, &d.local_bases, &nodal, problem, options)
    }

    pub fn inf_sup(&self, rules: &AssemblyRules) -> Result<f64> {
        let d = &self.disc;
        let g_test = assemble_gram(
            &d.mesh,
            &d.dofmap,
            &d.local_bases,
            BasisChoice::TestSpace,
            rules,
        )?;
        let g_trial = assemble_gram(
            &d.mesh,
            &d.dofmap,
            &d.local_bases,
            BasisChoice::TrialSpace,
            rules,
        )?;
        inf_sup_estimate(&self.system.a, &g_test, &g_trial)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub param: usize,
    pub n_elements: usize,
    pub n_unknowns: usize,
    pub errors: ErrorReport,
    pub interpolation: ErrorReport,
    pub kt_max_dev: f64,
    pub alpha_h: Option<f64>,
    pub residual: f64,
    pub asymmetry: f64,
    pub seconds: f64,
    pub mesh_text: Option<String>,
}

/// Label, error accessor and orders of one markdown norm row.
type NormRow<'a> = (&'a str, fn(&ErrorReport) -> f64, &'a Vec<f64>);

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub entries: Vec<SweepEntry>,
    pub table: ConvergenceTable,
}

fn run_entry(cfg: &ExperimentConfig, problem: &ProblemSpec, param: usize) -> Result<SweepEntry> {
    let start = Instant::now();
    let rules = cfg.rules();
    let options = cfg.error_options();
    let mesh = cfg.mesh_for(param)?;
    let mesh_text = cfg.dump_meshes.then(|| write_mesh_text(&mesh));
    let sol = solve_problem(mesh, problem, cfg.k, &rules)?;
    let errors = ErrorReport {
        param,
        ..sol.errors(problem, &options)?
    };
    let interpolation = ErrorReport {
        param,
        ..sol.interpolation_errors(problem, &options)?
    };
    let n_unknowns = sol.disc.dofmap.n_unknowns;
    let alpha_h = if n_unknowns <= cfg.inf_sup_max_unknowns {
        Some(sol.inf_sup(&rules)?)
    } else {
        None
    };
    Ok(SweepEntry {
        param,
        n_elements: sol.disc.mesh.n_elements(),
        n_unknowns,
        errors,
        interpolation,
        kt_max_dev: kt_perturbation_report(&sol.disc.mesh, &sol.disc.local_bases).max_dev,
        alpha_h,
        residual: sol.report.residual_norm,
        asymmetry: sol.system.a.max_asymmetry(),
        seconds: start.elapsed().as_secs_f64(),
        mesh_text,
    })
}

/// Runs every sweep entry in memory.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let problem = cfg.problem_spec()?;
    let entries = cfg
        .sweep
        .iter()
        .map(|&param| {
            run_entry(cfg, &problem, param).map_err(|e| Error::Sweep {
                param,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<ErrorReport> = entries.iter().map(|e| e.errors).collect();
    let mut table = if reports.len() >= 2 {
        convergence_orders(&reports)?
    } else {
        ConvergenceTable {
            rows: reports,
            grad_orders: vec![f64::NAN],
            l2_orders: vec![f64::NAN],
            max_orders: vec![f64::NAN],
            alpha_h: vec![f64::NAN],
            kt_dev: vec![f64::NAN],
        }
    };
    table.alpha_h = entries
        .iter()
        .map(|e| e.alpha_h.unwrap_or(f64::NAN))
        .collect();
    table.kt_dev = entries.iter().map(|e| e.kt_max_dev).collect();
    Ok(ExperimentResult {
        config: cfg.clone(),
        entries,
        table,
    })
}

/// Runs the sweep and writes its artifacts into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentResult> {
    let result = run_sweep(cfg)?;
    result.write_artifacts(out_dir)?;
    Ok(result)
}

/// Writes through a temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `0.539250E-2` style: mantissa in [0.1, 1).
pub fn fortran_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.000000E0".into();
    }
    let mut exp = x.abs().log10().floor() as i32 + 1;
    let mut mantissa = x / 10f64.powi(exp);
    if format!("{:.6}", mantissa.abs()).starts_with('1') {
        exp += 1;
        mantissa /= 10.0;
    }
    format!("{mantissa:.6}E{exp}")
}

impl ExperimentResult {
    pub fn param_label(&self) -> &'static str {
        match self.config.solution_kind() {
            Ok(ProblemKind::AnnulusTest2) => "I",
            Ok(ProblemKind::PolygonPatch) => "n",
            _ => "J",
        }
    }

    pub fn diagnostics_csv(&self) -> String {
        let mut s = String::from("param,n_elements,n_unknowns,h,kt_dev,alpha_h,interp_grad_err,interp_grad_order,residual,asymmetry");
        if !self.config.deterministic {
            s.push_str(",seconds");
        }
        s.push('\n');
        for (i, e) in self.entries.iter().enumerate() {
            let interp_order = if i == 0 {
                f64::NAN
            } else {
                order(
                    self.entries[i - 1].interpolation.grad_err,
                    e.interpolation.grad_err,
                )
            };
            write!(
                s,
                "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                e.param,
                e.n_elements,
                e.n_unknowns,
                e.errors.h,
                e.kt_max_dev,
                e.alpha_h.unwrap_or(f64::NAN),
                e.interpolation.grad_err,
                interp_order,
                e.residual,
                e.asymmetry
            )
            .expect("writing to a String");
            if !self.config.deterministic {
                write!(s, ",{:.3}", e.seconds).expect("writing to a String");
            }
            s.push('\n');
        }
        s
    }

    /// Norms as rows, refinement levels as columns.
    pub fn markdown(&self) -> String {
        let t = &self.table;
        let label = self.param_label();
        let mut s = String::new();
        let cfg = &self.config;
        writeln!(
            s,
            "Errors for {:?}, k = {}, e = {}, extension {:?}\n",
            cfg.solution_kind().unwrap_or(cfg.problem),
            cfg.k,
            cfg.e,
            cfg.extension_mode
        )
        .expect("writing to a String");
        let row = |s: &mut String, name: &str, cells: Vec<String>| {
            writeln!(s, "| {name} | {} |", cells.join(" | ")).expect("writing to a String");
        };
        row(
            &mut s,
            label,
            t.rows.iter().map(|r| r.param.to_string()).collect(),
        );
        row(&mut s, "---", vec!["---".to_string(); t.rows.len()]);
        let norms: [NormRow; 3] = [
            ("‖grad(u−u_h)‖_{0,h}", |r| r.grad_err, &t.grad_orders),
            ("‖u−u_h‖_{0,h}", |r| r.l2_err, &t.l2_orders),
            ("‖u−u_h‖_{0,∞,h}", |r| r.max_nodal_err, &t.max_orders),
        ];
        for (name, f, orders) in norms {
            row(
                &mut s,
                name,
                t.rows.iter().map(|r| fortran_sci(f(r))).collect(),
            );
            row(
                &mut s,
                "order",
                orders
                    .iter()
                    .map(|o| {
                        if o.is_nan() {
                            "–".to_string()
                        } else {
                            format!("{o:.3}")
                        }
                    })
                    .collect(),
            );
        }
        s
    }

    pub fn write_artifacts(&self, out_dir: &Path) -> Result<()> {
        fs::create_dir_all(out_dir)?;
        write_atomic(&out_dir.join("table.csv"), &self.table.to_csv())?;
        write_atomic(&out_dir.join("table.md"), &self.markdown())?;
        write_atomic(&out_dir.join("diagnostics.csv"), &self.diagnostics_csv())?;
        for e in &self.entries {
            if let Some(text) = &e.mesh_text {
                write_atomic(&out_dir.join(format!("mesh_{}.txt", e.param)), text)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_the_ellipse_experiment() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.problem, ProblemKind::EllipseTest1);
        assert_eq!((cfg.e, cfg.k), (0.5, 2));
        assert_eq!(cfg.sweep, vec![4, 8, 16, 32, 64]);
        assert_eq!(cfg.extension_mode, ExtensionMode::Analytic);
        assert_eq!(cfg.angular_range, AngularRange::HalfPi);
        cfg.validate().unwrap();
    }

    #[test]
    fn json_round_trip_and_partial_documents() {
        let mut cfg = ExperimentConfig::for_problem(ProblemKind::AnnulusTest2);
        cfg.extension_mode = ExtensionMode::ZeroOutside;
        cfg.quadrature.load_degree = Some(9);
        cfg.out_dir = Some("runs/a".into());
        assert_eq!(
            ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap(),
            cfg
        );
        let partial = ExperimentConfig::from_json(
            r#"{"problem": "annulus_test2", "extension_mode": "zero_outside"}"#,
        )
        .unwrap();
        assert_eq!(partial.sweep, vec![4, 8, 16, 32, 64]);
        assert_eq!(partial.extension_mode, ExtensionMode::ZeroOutside);
        assert!(ExperimentConfig::from_json(r#"{"problm": "x"}"#).is_err());
    }

    #[test]
    fn invalid_configs() {
        let base = ExperimentConfig::default();
        let with = |f: fn(&mut ExperimentConfig)| {
            let mut c = base.clone();
            f(&mut c);
            c.validate()
        };
        assert!(matches!(
            with(|c| c.k = 4),
            Err(Error::UnsupportedDegree(4))
        ));
        assert!(matches!(with(|c| c.e = 1.0), Err(Error::InvalidParam(_))));
        assert!(matches!(
            with(|c| c.sweep = vec![]),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            with(|c| c.sweep = vec![8, 4]),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            with(|c| c.sweep = vec![4, 12]),
            Err(Error::NonDyadicSequence(_))
        ));
        assert!(matches!(
            with(|c| c.problem = ProblemKind::Custom),
            Err(Error::InvalidParam(_))
        ));
        assert!(with(|c| c.sweep = vec![6]).is_ok());
        assert!(matches!(
            with(|c| {
                c.problem = ProblemKind::AnnulusTest2;
                c.sweep = vec![3, 6];
            }),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn fortran_notation() {
        assert_eq!(fortran_sci(0.00539250), "0.539250E-2");
        assert_eq!(fortran_sci(0.232998e-4), "0.232998E-4");
        assert_eq!(fortran_sci(0.0099999999), "0.100000E-1");
        assert_eq!(fortran_sci(12.5), "0.125000E2");
        assert_eq!(fortran_sci(0.0), "0.000000E0");
    }

    #[test]
    fn polygon_patch_sweep_is_exact() {
        let mut cfg = ExperimentConfig::for_problem(ProblemKind::PolygonPatch);
        cfg.sweep = vec![2, 4];
        let r = run_sweep(&cfg).unwrap();
        for e in &r.entries {
            assert!(
                e.errors.grad_err <= 1e-10
                    && e.errors.l2_err <= 1e-10
                    && e.errors.max_nodal_err <= 1e-10
            );
            assert!((e.alpha_h.unwrap() - 1.0).abs() <= 1e-10);
        }
        assert!(r.table.grad_orders.iter().all(|o| o.is_nan()));
        assert!(r.markdown().contains("| n | 2 | 4 |"));
    }

    #[test]
    fn sweep_errors_name_the_entry() {
        let mut cfg = ExperimentConfig {
            k: 3,
            sweep: vec![2],
            ..Default::default()
        };
        cfg.quadrature.load_degree = Some(11);
        match run_sweep(&cfg) {
            Err(Error::Sweep { param: 2, source }) => {
                assert!(matches!(*source, Error::UnsupportedDegree(11)))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
