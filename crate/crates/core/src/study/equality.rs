//! Ball-regularised versus point-source load vectors for `P1`.

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};
use crate::exact::{ExactSolution, Green};
use crate::femcore::{assemble_stiffness, solve_with_boundary, FeSpace, DEFAULT_REL_TOL};
use crate::meshkit::Point2;
use crate::singular_rhs::{assemble_ball_rhs, assemble_dirac_rhs, choose_epsilon, SourceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityConfig {
    pub domain: Domain,
    pub x0: Point2,
    pub levels: Vec<usize>,
    /// Overrides the radius rule with `factor · h_max`.
    #[serde(default)]
    pub forced_epsilon_factor: Option<f64>,
}

impl EqualityConfig {
    pub fn square() -> EqualityConfig {
        EqualityConfig {
            domain: Domain::Square,
            x0: Point2::new(0.50314, 0.49717),
            levels: vec![8, 16, 32, 64],
            forced_epsilon_factor: None,
        }
    }

    /// Disk family with the source moved off the central vertex, inside the
    /// first fan triangle at every level.
    pub fn disk() -> EqualityConfig {
        EqualityConfig {
            domain: Domain::Disk,
            x0: Point2::new(0.01234, 0.00567),
            levels: vec![10, 15, 20, 30],
            forced_epsilon_factor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityRow {
    pub level: usize,
    pub resolution: usize,
    pub h_max: f64,
    pub epsilon: f64,
    /// Whether the ball lies inside the element holding `x0`.
    pub contained: bool,
    /// `max_i |F_ε,i - D_i|`.
    pub rhs_diff: f64,
    /// `‖u_ε^h - u_δ^h‖_∞`.
    pub solution_diff: f64,
    /// Largest relative residual of the two solves.
    pub relative_residual: f64,
}

/// Per-level discrepancies between the ball and the point-source problems
/// with `P1` elements and Green boundary data.
pub fn rhs_equality_experiment(cfg: &EqualityConfig) -> Result<Vec<EqualityRow>> {
    if cfg.levels.is_empty() {
        return Err(Error::InvalidArgument("no levels".into()));
    }
    let exact = Green { source: cfg.x0 };
    let mut rows = Vec::with_capacity(cfg.levels.len());
    for (level, &resolution) in cfg.levels.iter().enumerate() {
        let row = (|| {
            let mesh = cfg.domain.mesh(resolution)?;
            let space = FeSpace::new(&mesh, 1)?;
            let epsilon = match cfg.forced_epsilon_factor {
                Some(f) => f * mesh.h_max(),
                None => choose_epsilon(&mesh, cfg.x0)?,
            };
            let contained = SourceSpec::ball(&mesh, cfg.x0, epsilon)?.contained;
            let dirac = assemble_dirac_rhs(&space, cfg.x0)?;
            let ball = assemble_ball_rhs(&space, cfg.x0, epsilon)?;
            let rhs_diff = dirac
                .iter()
                .zip(ball.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let a = assemble_stiffness(&space);
            let g = |p| exact.value(p);
            let (ud, od) = solve_with_boundary(&space, &a, &dirac, g, DEFAULT_REL_TOL)?;
            let (ue, oe) = solve_with_boundary(&space, &a, &ball, g, DEFAULT_REL_TOL)?;
            let solution_diff = ud
                .iter()
                .zip(ue.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(EqualityRow {
                level,
                resolution,
                h_max: mesh.h_max(),
                epsilon,
                contained,
                rhs_diff,
                solution_diff,
                relative_residual: od.relative_residual.max(oe.relative_residual),
            })
        })()
        .map_err(|e: Error| e.at_level(level))?;
        rows.push(row);
    }
    Ok(rows)
}
