//! Evaluation of the spectral predicates over an `(alpha, beta)` grid,
//! optionally with a cycle search per cell.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poincare::{find_cycle, SectionPoint};
use crate::spectrum::{branch_bound, GeometryClass, SpectrumReport};
use crate::system::Params;

pub const CYCLE_SEED: (f64, f64) = (10.0, 10.0);
pub const CYCLE_BUDGET: usize = 200;
pub const CYCLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub with_cycle_search: bool,
}

/// One axis: `n >= 2` nodes on `[min, max]`, or the single node `min == max`.
fn check_axis(name: &str, min: f64, max: f64, n: usize) -> Result<()> {
    if !(min.is_finite() && max.is_finite() && min > 0.0) {
        return Err(Error::InvalidConfig(format!("{name} bounds must be positive, got {min}..{max}")));
    }
    let ok = match n {
        0 => false,
        1 => min == max,
        _ => min < max,
    };
    if !ok {
        return Err(Error::InvalidConfig(format!(
            "{name} range {min}:{max}:{n} is degenerate (need min < max with n >= 2, or min = max with n = 1)"
        )));
    }
    Ok(())
}

fn nodes(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let h = (max - min) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { max } else { min + h * i as f64 }).collect()
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        check_axis("alpha", self.alpha_min, self.alpha_max, self.n_alpha)?;
        check_axis("beta", self.beta_min, self.beta_max, self.n_beta)
    }

    pub fn alphas(&self) -> Vec<f64> {
        nodes(self.alpha_min, self.alpha_max, self.n_alpha)
    }

    pub fn betas(&self) -> Vec<f64> {
        nodes(self.beta_min, self.beta_max, self.n_beta)
    }
}

/// Result of a budgeted cycle search. A search that neither converges nor
/// observes capture is inconclusive, never a negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleOutcome {
    Found,
    NotFound,
    Inconclusive,
}

impl CycleOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            CycleOutcome::Found => "true",
            CycleOutcome::NotFound => "false",
            CycleOutcome::Inconclusive => "inconclusive",
        }
    }
}

impl Serialize for CycleOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub params: Params,
    pub routh: bool,
    pub single_root: bool,
    pub geometry_class: GeometryClass,
    pub in_theorem_region: bool,
    pub cycle_found: Option<CycleOutcome>,
    pub lambda_star: f64,
}

/// Cycle search from [`CYCLE_SEED`] with [`CYCLE_BUDGET`] returns.
pub fn probe_cycle(p: &Params) -> CycleOutcome {
    let seed = SectionPoint { x1: CYCLE_SEED.0, x2: CYCLE_SEED.1 };
    match find_cycle(seed, p, CYCLE_TOL, CYCLE_BUDGET) {
        Ok(r) if r.converged => CycleOutcome::Found,
        Ok(r) if matches!(r.failure, Some(Error::NoReturn { .. })) => CycleOutcome::NotFound,
        _ => CycleOutcome::Inconclusive,
    }
}

pub fn evaluate_cell(p: &Params, with_cycle_search: bool) -> CellReport {
    let s = SpectrumReport::compute(p);
    CellReport {
        params: *p,
        routh: s.routh,
        single_root: s.single_root,
        geometry_class: s.geometry_class,
        in_theorem_region: s.in_theorem_region,
        cycle_found: with_cycle_search.then(|| probe_cycle(p)),
        lambda_star: s.lambda_star,
    }
}

/// One report per node, row-major: alpha outer, beta inner. Cells are
/// evaluated in parallel.
pub fn scan_grid(g: &GridSpec) -> Result<Vec<CellReport>> {
    g.validate()?;
    let (alphas, betas) = (g.alphas(), g.betas());
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    cells.par_iter().map(|&(a, b)| Params::new(a, b).map(|p| evaluate_cell(&p, g.with_cycle_search))).collect()
}

/// `β = 2(1+α)³ / (9(1-2α))` for `α ∈ ]1/8, 1/2[`.
pub fn bifurcation_curve(alpha: f64) -> Option<f64> {
    (alpha > 0.125 && alpha < 0.5).then(|| branch_bound(alpha))
}
