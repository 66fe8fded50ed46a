//! Refinement studies: per-level solves, error tables and fitted orders.

mod equality;
mod fit;
mod one_d;

pub use equality::{rhs_equality_experiment, EqualityConfig, EqualityRow};
pub use fit::{fit_order, OrderFit};
pub use one_d::{demo_1d, run_1d_study, solve_1d, OneDRow, OneDStudy};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactSolution, Green, SineProduct};
use crate::femcore::{
    assemble_load, assemble_stiffness, solve_with_boundary, DofVector, FeSpace, DEFAULT_REL_TOL,
};
use crate::meshkit::{check_separation, gen_disk, gen_square, Mesh, Point2, Rectangle, SubdomainSpec};
use crate::norms::{error_norms, NormTag};
use crate::singular_rhs::{assemble_ball_rhs, assemble_dirac_rhs, choose_epsilon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Unit square; a level is the number of cells per side.
    Square,
    /// Unit disk centered at the origin; a level is the ring count.
    Disk,
}

impl Domain {
    pub fn mesh(self, resolution: usize) -> Result<Mesh> {
        match self {
            Domain::Square => gen_square(resolution, Rectangle::UNIT),
            Domain::Disk => gen_disk(resolution, 1.0, Point2::ORIGIN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsChoice {
    Dirac,
    /// Ball regularisation with the radius from `choose_epsilon`.
    Ball,
    /// `f = 2π² sin(πx) sin(πy)` on the unit square.
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// Boundary dofs take the exact solution's values.
    ExactData,
    Zero,
}

fn default_tol() -> f64 {
    DEFAULT_REL_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub domain: Domain,
    pub x0: Point2,
    pub orders: Vec<usize>,
    pub levels: Vec<usize>,
    pub rhs: RhsChoice,
    pub bc: BoundaryMode,
    pub omega0: SubdomainSpec,
    pub omega1: SubdomainSpec,
    pub norms: Vec<NormTag>,
    #[serde(default = "default_tol")]
    pub solver_tol: f64,
}

impl StudyConfig {
    /// Point source at the center of the unit disk, measured on `0.2 < |x| < 1`.
    pub fn disk_dirac(orders: Vec<usize>) -> StudyConfig {
        StudyConfig {
            domain: Domain::Disk,
            x0: Point2::ORIGIN,
            orders,
            levels: vec![10, 15, 20, 30, 45],
            rhs: RhsChoice::Dirac,
            bc: BoundaryMode::ExactData,
            omega0: SubdomainSpec::annulus(Point2::ORIGIN, 0.2, 1.0),
            omega1: SubdomainSpec::annulus(Point2::ORIGIN, 0.1, 1.0),
            norms: vec![NormTag::H1, NormTag::L2],
            solver_tol: DEFAULT_REL_TOL,
        }
    }

    /// Off-node point source in the unit square with Green boundary data.
    pub fn square_dirac(orders: Vec<usize>) -> StudyConfig {
        let x0 = Point2::new(0.50314, 0.49717);
        StudyConfig {
            domain: Domain::Square,
            x0,
            orders,
            levels: vec![8, 16, 32, 64, 128],
            rhs: RhsChoice::Dirac,
            bc: BoundaryMode::ExactData,
            omega0: SubdomainSpec::exclusion_ball(x0, 0.2),
            omega1: SubdomainSpec::exclusion_ball(x0, 0.1),
            norms: vec![NormTag::H1, NormTag::L2],
            solver_tol: DEFAULT_REL_TOL,
        }
    }

    /// Smooth manufactured solution on the whole unit square.
    pub fn manufactured(orders: Vec<usize>) -> StudyConfig {
        let whole = SubdomainSpec::Rectangle { bounds: Rectangle::UNIT };
        StudyConfig {
            domain: Domain::Square,
            x0: Point2::new(0.5, 0.5),
            orders,
            levels: vec![4, 8, 16, 32],
            rhs: RhsChoice::Manufactured,
            bc: BoundaryMode::Zero,
            omega0: whole,
            omega1: whole,
            norms: vec![NormTag::H1, NormTag::L2],
            solver_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.orders.is_empty() || self.levels.is_empty() || self.norms.is_empty() {
            return bad("orders, levels and norms must be nonempty".into());
        }
        if let Some(k) = self.orders.iter().find(|k| !(1..=4).contains(*k)) {
            return Err(Error::UnsupportedOrder(*k));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) || self.levels[0] == 0 {
            return bad(format!("levels must increase strictly from 1, got {:?}", self.levels));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1.0) {
            return bad(format!("solver tolerance {} outside (0, 1)", self.solver_tol));
        }
        self.omega0.validate()?;
        self.omega1.validate()?;
        if !self.x0.is_finite() {
            return bad("x0 must be finite".into());
        }
        match self.rhs {
            RhsChoice::Manufactured => {
                if self.domain != Domain::Square || self.bc != BoundaryMode::Zero {
                    return bad("manufactured source needs the square with zero boundary data".into());
                }
            }
            RhsChoice::Dirac | RhsChoice::Ball => {
                if self.omega1.contains(self.x0) {
                    return bad("x0 must lie outside the closure of omega1".into());
                }
                if self.domain == Domain::Disk
                    && self.bc == BoundaryMode::Zero
                    && self.x0.norm() > 1e-14
                {
                    return bad("zero boundary data is exact on the disk only for a centered source".into());
                }
            }
        }
        Ok(())
    }

    /// Exact solution of the configured problem.
    pub fn exact(&self) -> Box<dyn ExactSolution> {
        match self.rhs {
            RhsChoice::Manufactured => Box::new(SineProduct),
            RhsChoice::Dirac | RhsChoice::Ball => Box::new(Green { source: self.x0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub resolution: usize,
    pub h_max: f64,
    pub dofs: usize,
    pub errors: Vec<(NormTag, f64)>,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFit {
    pub norm: NormTag,
    pub fit: OrderFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub order: usize,
    pub rows: Vec<LevelRow>,
    /// Present only with at least three rows.
    pub fits: Vec<NormFit>,
}

impl ConvergenceTable {
    pub fn from_rows(order: usize, rows: Vec<LevelRow>) -> Result<ConvergenceTable> {
        let mut fits = Vec::new();
        if rows.len() >= 3 {
            let h: Vec<f64> = rows.iter().map(|r| r.h_max).collect();
            for (i, (norm, _)) in rows[0].errors.iter().enumerate() {
                let e: Vec<f64> = rows.iter().map(|r| r.errors[i].1).collect();
                fits.push(NormFit {
                    norm: *norm,
                    fit: fit_order(&h, &e)?,
                });
            }
        }
        Ok(ConvergenceTable { order, rows, fits })
    }

    pub fn fit(&self, norm: NormTag) -> Option<OrderFit> {
        self.fits.iter().find(|f| f.norm == norm).map(|f| f.fit)
    }

    pub fn errors(&self, norm: NormTag) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.errors.iter().find(|(t, _)| *t == norm).map(|(_, v)| *v))
            .collect()
    }
}

/// Output of [`run_convergence`]: one table per polynomial order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub tables: Vec<ConvergenceTable>,
}

impl StudyReport {
    pub fn table(&self, order: usize) -> Option<&ConvergenceTable> {
        self.tables.iter().find(|t| t.order == order)
    }
}

/// Solution of the configured problem on one mesh.
pub struct LevelSolution {
    pub dofs: DofVector,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Assembles and solves the configured problem on `space`.
pub fn solve_level(cfg: &StudyConfig, space: &FeSpace) -> Result<LevelSolution> {
    let mesh = space.mesh();
    let exact = cfg.exact();
    let stiffness = assemble_stiffness(space);
    let load: Vec<f64> = match cfg.rhs {
        RhsChoice::Dirac => assemble_dirac_rhs(space, cfg.x0)?.into_inner(),
        RhsChoice::Ball => {
            let eps = choose_epsilon(mesh, cfg.x0)?;
            assemble_ball_rhs(space, cfg.x0, eps)?.into_inner()
        }
        RhsChoice::Manufactured => assemble_load(space, SineProduct::source),
    };
    let (dofs, outcome) = match cfg.bc {
        BoundaryMode::Zero => solve_with_boundary(space, &stiffness, &load, |_| 0.0, cfg.solver_tol)?,
        BoundaryMode::ExactData => {
            solve_with_boundary(space, &stiffness, &load, |p| exact.value(p), cfg.solver_tol)?
        }
    };
    Ok(LevelSolution {
        dofs,
        iterations: outcome.iterations,
        relative_residual: outcome.relative_residual,
    })
}

fn run_level(cfg: &StudyConfig, order: usize, level: usize) -> Result<LevelRow> {
    let resolution = cfg.levels[level];
    let mesh = cfg.domain.mesh(resolution)?;
    let sep = check_separation(&mesh, &cfg.omega0, &cfg.omega1);
    if !sep.ok {
        return Err(Error::SeparationFailed {
            count: sep.offending.len(),
            first: sep.offending[0],
        });
    }
    let space = FeSpace::new(&mesh, order)?;
    let sol = solve_level(cfg, &space)?;
    let exact = cfg.exact();
    let report = error_norms(&space, &sol.dofs, exact.as_ref(), &cfg.omega0, &cfg.norms)?;
    Ok(LevelRow {
        level,
        resolution,
        h_max: mesh.h_max(),
        dofs: space.num_dofs(),
        errors: report.values,
        iterations: sol.iterations,
        relative_residual: sol.relative_residual,
    })
}

/// Runs every (order, level) pair of the configuration. Levels run in
/// parallel; rows are ordered by level.
pub fn run_convergence(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let mut tables = Vec::with_capacity(cfg.orders.len());
    for &k in &cfg.orders {
        let rows: Vec<LevelRow> = (0..cfg.levels.len())
            .into_par_iter()
            .map(|l| run_level(cfg, k, l).map_err(|e| e.at_level(l)))
            .collect::<Result<_>>()?;
        tables.push(ConvergenceTable::from_rows(k, rows)?);
    }
    Ok(StudyReport {
        config: cfg.clone(),
        tables,
    })
}

/// CSV with columns `level,h_max,dofs,norm,value`.
///
/// Each order's rows follow a `# order k` line; the fitted orders close the
/// file as `#` comment lines.
pub fn report_csv(report: &StudyReport) -> String {
    let mut out = String::from("level,h_max,dofs,norm,value\n");
    for table in &report.tables {
        let _ = writeln!(out, "# order {}", table.order);
        for row in &table.rows {
            for (norm, value) in &row.errors {
                let _ = writeln!(out, "{},{:e},{},{},{:e}", row.level, row.h_max, row.dofs, norm, value);
            }
        }
    }
    for table in &report.tables {
        for f in &table.fits {
            let _ = writeln!(
                out,
                "# fit order={} norm={} slope={:.6} r2={:.6} last={:.6}",
                table.order, f.norm, f.fit.order, f.fit.r2, f.fit.last_order
            );
        }
    }
    out
}

/// Pretty JSON of the report, configuration included.
pub fn report_json(report: &StudyReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// CSV of a 1D study with the same column layout as [`report_csv`].
pub fn one_d_csv(study: &OneDStudy) -> String {
    let mut out = String::from("level,h_max,dofs,norm,value\n");
    for (l, r) in study.rows.iter().enumerate() {
        let _ = writeln!(out, "{l},{:e},{},l2,{:e}", r.h, r.elements - 1, r.l2);
        let _ = writeln!(out, "{l},{:e},{},h1,{:e}", r.h, r.elements - 1, r.h1);
    }
    for (name, fit) in [("l2", study.l2_fit), ("h1", study.h1_fit)] {
        if let Some(f) = fit {
            let _ = writeln!(
                out,
                "# fit norm={name} slope={:.6} r2={:.6} last={:.6}",
                f.order, f.r2, f.last_order
            );
        }
    }
    let _ = writeln!(out, "# on-node x0={} max-nodal-error={:e}", study.on_node_x0, study.on_node_error);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_and_validates() {
        for cfg in [
            StudyConfig::disk_dirac(vec![1]),
            StudyConfig::square_dirac(vec![1, 2]),
            StudyConfig::manufactured(vec![3]),
        ] {
            cfg.validate().unwrap();
            let json = serde_json::to_string(&cfg).unwrap();
            let back: StudyConfig = serde_json::from_str(&json).unwrap();
            assert_eq!(back, cfg);
        }
        let mut cfg = StudyConfig::disk_dirac(vec![1]);
        cfg.levels = vec![10, 10, 20];
        assert!(cfg.validate().is_err());
        let mut cfg = StudyConfig::disk_dirac(vec![5]);
        assert!(matches!(cfg.validate(), Err(Error::UnsupportedOrder(5))));
        cfg.orders = vec![1];
        cfg.omega1 = SubdomainSpec::annulus(Point2::ORIGIN, 0.0, 1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_shape() {
        let text = r#"{
            "domain": "disk",
            "x0": {"x": 0.0, "y": 0.0},
            "orders": [1],
            "levels": [4, 6, 8],
            "rhs": "dirac",
            "bc": "zero",
            "omega0": {"kind": "annulus", "center": {"x": 0.0, "y": 0.0}, "r_inner": 0.4, "r_outer": 1.0},
            "omega1": {"kind": "annulus", "center": {"x": 0.0, "y": 0.0}, "r_inner": 0.2, "r_outer": 1.0},
            "norms": ["h1", "l2", "w1p:1.5"]
        }"#;
        let cfg: StudyConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.solver_tol, DEFAULT_REL_TOL);
        let report = run_convergence(&cfg).unwrap();
        let t = &report.tables[0];
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.fits.len(), 3);
        let h1 = t.errors(NormTag::H1);
        assert!(h1.windows(2).all(|w| w[1] < w[0]));
        let csv = report_csv(&report);
        assert!(csv.starts_with("level,h_max,dofs,norm,value\n# order 1\n0,"));
        assert!(csv.contains("# fit order=1 norm=h1 slope="));
        assert_eq!(csv, report_csv(&run_convergence(&cfg).unwrap()));
        let json = report_json(&report).unwrap();
        let back: StudyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.config, cfg);
    }

    #[test]
    fn separation_failure_names_level() {
        let mut cfg = StudyConfig::disk_dirac(vec![1]);
        cfg.levels = vec![2, 3];
        cfg.omega1 = SubdomainSpec::annulus(Point2::ORIGIN, 0.19, 1.0);
        let err = run_convergence(&cfg).unwrap_err();
        assert!(matches!(err, Error::AtLevel { level: 0, .. }), "{err}");
        assert_eq!(err.kind(), "separation-failed");
    }

    #[test]
    fn short_tables_have_no_fit() {
        let mut cfg = StudyConfig::manufactured(vec![1]);
        cfg.levels = vec![2, 4];
        let report = run_convergence(&cfg).unwrap();
        assert!(report.tables[0].fits.is_empty());
    }
}
