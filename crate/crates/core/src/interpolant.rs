//! Piecewise Chebyshev interpolation of smooth vector-valued functions,
//! refined panel by panel until a held-out check error meets a tolerance.
//!
//! Used to cache expensive amplitudes (each sample is a full line integral)
//! so that synthesis can evaluate them at arbitrary quadrature nodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};

/// Chebyshev points of the first kind per panel.
pub const NODES: usize = 20;

/// Refinement stops at this bisection depth even if the check error is too large.
pub const MAX_DEPTH: u32 = 12;

#[derive(Debug, Clone)]
struct Table {
    nodes: [f64; NODES],
    weights: [f64; NODES],
    checks: [f64; 3],
}

impl Table {
    fn new() -> Self {
        let mut nodes = [0.0; NODES];
        let mut weights = [0.0; NODES];
        for j in 0..NODES {
            let theta = (2 * j + 1) as f64 * PI / (2 * NODES) as f64;
            nodes[j] = theta.cos();
            weights[j] = if j % 2 == 0 { theta.sin() } else { -theta.sin() };
        }
        let checks = [NODES / 4, NODES / 2, 3 * NODES / 4].map(|j| (j as f64 * PI / NODES as f64).cos());
        Self { nodes, weights, checks }
    }

    fn eval<const N: usize>(&self, values: &[[Complex64; N]; NODES], t: f64) -> [Complex64; N] {
        let mut num = [Complex64::new(0.0, 0.0); N];
        let mut den = 0.0;
        for j in 0..NODES {
            let d = t - self.nodes[j];
            if d == 0.0 {
                return values[j];
            }
            let c = self.weights[j] / d;
            den += c;
            for (n, v) in num.iter_mut().zip(values[j].iter()) {
                *n += c * v;
            }
        }
        num.map(|z| z / den)
    }
}

#[derive(Debug, Clone)]
struct Panel<const N: usize> {
    hi: f64,
    values: [[Complex64; N]; NODES],
    error: f64,
}

/// Piecewise interpolant of `f: [lo, hi] -> C^N`; zero outside the range.
#[derive(Debug, Clone)]
pub struct PanelInterpolant<const N: usize> {
    table: Table,
    breaks: Vec<f64>,
    panels: Vec<[[Complex64; N]; NODES]>,
    max_error: f64,
}

fn max_diff<const N: usize>(a: &[Complex64; N], b: &[Complex64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn refine<const N: usize, F>(
    f: &F,
    table: &Table,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
    out: &mut Vec<Panel<N>>,
) -> Result<()>
where
    F: Fn(f64) -> Result<[Complex64; N]>,
{
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut values = [[Complex64::new(0.0, 0.0); N]; NODES];
    for (v, &t) in values.iter_mut().zip(table.nodes.iter()) {
        *v = f(mid + half * t)?;
    }
    let mut error: f64 = 0.0;
    for &t in &table.checks {
        let exact = f(mid + half * t)?;
        error = error.max(max_diff(&exact, &table.eval(&values, t)));
    }
    if error > tol && depth < MAX_DEPTH && mid > lo && mid < hi {
        refine(f, table, lo, mid, tol, depth + 1, out)?;
        return refine(f, table, mid, hi, tol, depth + 1, out);
    }
    out.push(Panel { hi, values, error });
    Ok(())
}

impl<const N: usize> PanelInterpolant<N> {
    /// Samples `f` on `initial_panels` equal pieces of `[lo, hi]` (in parallel)
    /// and bisects each until the check error is at most `tol`.
    pub fn build<F>(f: F, lo: f64, hi: f64, initial_panels: usize, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<[Complex64; N]> + Sync,
    {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() || initial_panels == 0 || !(tol > 0.0) {
            return Err(domain(format!(
                "interpolation range [{lo}, {hi}] with {initial_panels} panels and tolerance {tol} is invalid"
            )));
        }
        let table = Table::new();
        let width = (hi - lo) / initial_panels as f64;
        let pieces: Vec<Vec<Panel<N>>> = (0..initial_panels)
            .into_par_iter()
            .map(|i| {
                let a = lo + width * i as f64;
                let b = if i + 1 == initial_panels { hi } else { lo + width * (i + 1) as f64 };
                let mut out = Vec::new();
                refine(&f, &table, a, b, tol, 0, &mut out)?;
                Ok(out)
            })
            .collect::<Result<_>>()?;

        let mut breaks = vec![lo];
        let mut panels = Vec::new();
        let mut max_error: f64 = 0.0;
        for p in pieces.into_iter().flatten() {
            breaks.push(p.hi);
            max_error = max_error.max(p.error);
            panels.push(p.values);
        }
        Ok(Self {
            table,
            breaks,
            panels,
            max_error,
        })
    }

    pub fn eval(&self, x: f64) -> [Complex64; N] {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return [Complex64::new(0.0, 0.0); N];
        }
        let i = self.breaks.partition_point(|&b| b <= x).clamp(1, self.panels.len()) - 1;
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        let t = (2.0 * x - a - b) / (b - a);
        self.table.eval(&self.panels[i], t)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    /// Largest check-point error over all accepted panels.
    pub fn max_error(&self) -> f64 {
        self.max_error
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Panel boundaries, useful as quadrature breakpoints.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }
}
