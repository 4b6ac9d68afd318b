//! Numerical kernel shared by the solvers: adaptive quadrature on compact
//! intervals, grid-scanned bracketed root finding, implicit-curve sampling
//! and a fixed-step Runge-Kutta integrator.

mod curves;
mod ode;
mod quadrature;
mod roots;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use curves::{intersect_on_curve, trace_implicit};
pub(crate) use curves::upper_column;
pub use ode::{shoot_ode, shoot_ode_trajectory};
pub use quadrature::{integrate, integrate_fallible, integrate_with_breaks};
pub use roots::{brent, find_roots, RootSet};

/// Accuracy targets for quadrature and root refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 50,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature.rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("quadrature.abs_tol", "must be positive"));
        }
        if self.max_depth == 0 {
            return Err(Error::invalid("quadrature.max_depth", "must be positive"));
        }
        Ok(())
    }
}

/// A closed interval sampled on `grid_n` equally spaced nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub grid_n: usize,
}

impl Window {
    pub fn new(lo: f64, hi: f64, grid_n: usize) -> Result<Self> {
        let w = Window { lo, hi, grid_n };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || !(self.hi > self.lo) {
            return Err(Error::invalid("scan", format!("need lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.grid_n < 2 {
            return Err(Error::invalid("scan.grid_n", "need at least 2 grid points"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.grid_n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.grid_n {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.grid_n - 1) as f64
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.grid_n).map(move |i| self.node(i))
    }

    /// Same center, twice the half-width, same node density.
    pub fn expanded(&self) -> Window {
        let mid = 0.5 * (self.lo + self.hi);
        let half = self.hi - self.lo;
        Window {
            lo: mid - half,
            hi: mid + half,
            grid_n: 2 * self.grid_n - 1,
        }
    }
}
