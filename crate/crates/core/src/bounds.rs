//! Envelope on the slope of every extension of a node.
//!
//! After residualizing on the included covariates `w`, the slope of `x` in a
//! model that additionally adjusts for a subset `z̃` of the candidates is
//!
//! ```text
//! β = (σ_y / σ_x) · (ρ − R_zx · R_zy · ρ̂) / (1 − R_zx²)
//! ```
//!
//! where `ρ` is the correlation of the residualized `x` and `y`, `R_zx²` and
//! `R_zy²` are the shares of their variance explained by `z̃`, and `ρ̂` is the
//! correlation of the two fitted vectors. Over all `z̃ ⊆ z` we only know
//! `ρ̂ ∈ [−1, 1]`, `R_zx² ≤ R²(z, x)` and `R_zy² ≤ R²(z, y)`, so the envelope
//! is the exact range of the expression over that box.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Keeps `1 − R_zx²` strictly positive.
pub const EPS_DIV: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// `σ_y / σ_x` of the residualized vectors.
    pub sigma_ratio: f64,
    /// Correlation of the residualized `x` and `y`.
    pub rho: f64,
    /// Cap on `R_zx²`, clamped to at most `1 − EPS_DIV`.
    pub rx2_max: f64,
    /// Cap on `R_zy²`.
    pub ry2_max: f64,
}

impl BoundInputs {
    /// Validates and clamps the raw quantities.
    pub fn new(sigma_ratio: f64, rho: f64, rx2_max: f64, ry2_max: f64) -> Result<Self> {
        if !(sigma_ratio.is_finite() && sigma_ratio > 0.0) {
            return Err(Error::DegenerateInput(format!(
                "sigma ratio must be finite and positive, got {sigma_ratio}"
            )));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidInput(format!(
                "correlation {rho} outside [-1, 1]"
            )));
        }
        for (name, v) in [("rx2_max", rx2_max), ("ry2_max", ry2_max)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(Self {
            sigma_ratio,
            rho,
            rx2_max: rx2_max.min(1.0 - EPS_DIV),
            ry2_max,
        })
    }

    /// Slope of the model that adds nothing to `w`: `σ_y/σ_x · ρ`.
    pub fn slope(&self) -> f64 {
        self.sigma_ratio * self.rho
    }

    /// The slope expression at a point of the box.
    pub fn objective(&self, rx2: f64, ry2: f64, rho_hat: f64) -> f64 {
        self.sigma_ratio * (self.rho - rx2.sqrt() * ry2.sqrt() * rho_hat) / (1.0 - rx2)
    }
}

/// `lower ≤ β ≤ upper` for every extension of a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    pub fn contains(&self, beta: f64) -> bool {
        self.lower <= beta && beta <= self.upper
    }

    /// Whether `other` lies inside `self`.
    pub fn encloses(&self, other: &Envelope) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }
}

/// Computes the envelope inputs for a node from the residualized `x`, `y`
/// and candidate columns.
pub fn bound_inputs(x_res: &[f64], y_res: &[f64], z_res: &Matrix) -> Result<BoundInputs> {
    let sx = linalg::std_dev(x_res);
    let sy = linalg::std_dev(y_res);
    if sx == 0.0 {
        return Err(Error::DegenerateExplanatory);
    }
    let rho = linalg::correlation(x_res, y_res)?;
    let (rx2, ry2) = if z_res.is_empty() {
        (0.0, 0.0)
    } else {
        let ctx = linalg::make_context(z_res)?;
        (ctx.r_squared(x_res)?, ctx.r_squared(y_res)?)
    };
    BoundInputs::new(sy / sx, rho, rx2, ry2)
}

/// Exact range of [`BoundInputs::objective`] over
/// `ρ̂ ∈ [−1, 1]`, `R_zx² ∈ [0, rx2_max]`, `R_zy² ∈ [0, ry2_max]`.
///
/// The objective is linear in the product `R_zy·ρ̂`, whose range is
/// `[−c, c]` with `c = √ry2_max`, so only `±c` matter. What is left is
/// `(ρ ± c·r) / (1 − r²)` on `r ∈ [0, √rx2_max]`, whose extrema sit at the
/// endpoints or at roots of `c·r² ± 2ρ·r + c = 0`.
pub fn envelope(b: &BoundInputs) -> Envelope {
    let r_max = b.rx2_max.sqrt();
    let c = b.ry2_max.sqrt();

    // At r = 0 this is exactly sigma_ratio * rho, bit for bit.
    let eval = |k: f64, r: f64, r2: f64| b.sigma_ratio * (b.rho + k * r) / (1.0 - r2);

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };

    for k in [c, -c] {
        visit(eval(k, 0.0, 0.0));
        visit(eval(k, r_max, b.rx2_max));
        // d/dr (ρ + k r)/(1 − r²) ∝ k r² + 2ρ r + k.
        for r in quadratic_roots(k, 2.0 * b.rho, k) {
            if r > 0.0 && r < r_max {
                visit(eval(k, r, r * r));
            }
        }
    }
    Envelope {
        lower: lo,
        upper: hi,
    }
}

/// Real roots of `a t² + b t + c`, computed without cancellation.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    if q == 0.0 {
        // b = 0 and disc = 0 means c = 0 too: double root at zero.
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Brute-force envelope over a `grid_n × grid_n` lattice in `(R_zx², R_zy²)`
/// with `ρ̂ ∈ {−1, 1}`. Always inside [`envelope`]; converges to it as the
/// grid is refined.
pub fn envelope_grid_oracle(b: &BoundInputs, grid_n: usize) -> Envelope {
    let grid_n = grid_n.max(2);
    let step = |max: f64, i: usize| max * i as f64 / (grid_n - 1) as f64;
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..grid_n {
        let rx2 = step(b.rx2_max, i);
        for j in 0..grid_n {
            let ry2 = step(b.ry2_max, j);
            for rho_hat in [-1.0, 1.0] {
                let v = b.objective(rx2, ry2, rho_hat);
                lower = lower.min(v);
                upper = upper.max(v);
            }
        }
    }
    Envelope { lower, upper }
}
