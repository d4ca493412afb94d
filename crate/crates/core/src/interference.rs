//! Shadowing-averaged lattice interference and its polynomial bounds.
//!
//! The normalized interference at a point is `Σ_k r̄_k^(-α)` over the
//! interfering sites. Along the corner direction (`θ = π/6`) it is smallest
//! for a given `r̄`, along the edge direction (`θ = 0`) largest, so
//! polynomial fits along those two lines bracket the whole cell.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{hexagon_contains_closed, interferer_positions, LatticeLayout, Point, SQRT3};
use crate::propagation::PropagationParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    pub fn opposite(self) -> Bound {
        match self {
            Bound::Lower => Bound::Upper,
            Bound::Upper => Bound::Lower,
        }
    }
}

/// Polynomial interference bounds, coefficients ordered from the highest
/// power down: `Σ_i a_i r̄^(P-i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBounds {
    pub alpha: f64,
    pub order: usize,
    pub tiers: usize,
    pub samples: usize,
    pub lower_coeffs: Vec<f64>,
    pub upper_coeffs: Vec<f64>,
    pub fit_max_rel_error: f64,
}

impl PolyBounds {
    pub fn coeffs(&self, which: Bound) -> &[f64] {
        match which {
            Bound::Lower => &self.lower_coeffs,
            Bound::Upper => &self.upper_coeffs,
        }
    }

    pub fn eval(&self, which: Bound, r: f64) -> f64 {
        horner(self.coeffs(which), r)
    }

    /// Pointwise envelope of the two fitted lines. Least-squares fits can
    /// cross near the centre, where the edge line undershoots; the envelope
    /// keeps the lower bound below the upper one everywhere.
    pub fn envelope(&self, which: Bound, r: f64) -> f64 {
        let (l, u) = (self.eval(Bound::Lower, r), self.eval(Bound::Upper, r));
        match which {
            Bound::Lower => l.min(u),
            Bound::Upper => l.max(u),
        }
    }

    /// Text record, one `key = value` per line.
    pub fn to_record(&self) -> String {
        let join = |c: &[f64]| c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "order = {}", self.order);
        let _ = writeln!(s, "tiers = {}", self.tiers);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "lower = {}", join(&self.lower_coeffs));
        let _ = writeln!(s, "upper = {}", join(&self.upper_coeffs));
        let _ = writeln!(s, "fit_max_rel_error = {}", self.fit_max_rel_error);
        s
    }

    pub fn from_record(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut alpha = None;
        let mut order = None;
        let mut tiers = None;
        let mut samples = None;
        let mut lower = None;
        let mut upper = None;
        let mut fit_err = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(n + 1, format!("expected 'key = value', got '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| err(n + 1, format!("bad number '{v}'")));
            let int = |v: &str| v.parse::<usize>().map_err(|_| err(n + 1, format!("bad integer '{v}'")));
            let list = |v: &str| -> Result<Vec<f64>> { v.split(',').map(|x| num(x.trim())).collect() };
            match k {
                "alpha" => alpha = Some(num(v)?),
                "order" => order = Some(int(v)?),
                "tiers" => tiers = Some(int(v)?),
                "samples" => samples = Some(int(v)?),
                "lower" => lower = Some(list(v)?),
                "upper" => upper = Some(list(v)?),
                "fit_max_rel_error" => fit_err = Some(num(v)?),
                _ => return Err(err(n + 1, format!("unknown key '{k}'"))),
            }
        }
        let missing = |k: &str| err(0, format!("missing key '{k}'"));
        let b = PolyBounds {
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            order: order.ok_or_else(|| missing("order"))?,
            tiers: tiers.ok_or_else(|| missing("tiers"))?,
            samples: samples.ok_or_else(|| missing("samples"))?,
            lower_coeffs: lower.ok_or_else(|| missing("lower"))?,
            upper_coeffs: upper.ok_or_else(|| missing("upper"))?,
            fit_max_rel_error: fit_err.ok_or_else(|| missing("fit_max_rel_error"))?,
        };
        if b.lower_coeffs.len() != b.order + 1 || b.upper_coeffs.len() != b.order + 1 {
            return Err(err(0, format!("expected {} coefficients per line", b.order + 1)));
        }
        Ok(b)
    }
}

fn horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &a| acc * r + a)
}

/// Normalized interference at `point` (units of `r_mc`).
pub fn avg_norm_interference(point: Point, layout: &LatticeLayout, alpha: f64) -> Result<f64> {
    if !hexagon_contains_closed(1.0, point) {
        return Err(Error::OutOfDomain {
            x: point.x,
            y: point.y,
        });
    }
    Ok(lattice_sum(point, layout, alpha))
}

pub(crate) fn lattice_sum(point: Point, layout: &LatticeLayout, alpha: f64) -> f64 {
    layout
        .positions
        .iter()
        .map(|s| {
            let d2 = (s.x - point.x).powi(2) + (s.y - point.y).powi(2);
            d2.powf(-0.5 * alpha)
        })
        .sum()
}

pub fn eval_bound(bounds: &PolyBounds, r: f64, which: Bound) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::InvalidArgument(format!("normalized radius must be >= 0, got {r}")));
    }
    Ok(bounds.eval(which, r))
}

/// Average interference power in watts at distance scale `r_mc`.
pub fn denormalize(value: f64, sigma_m_sq_w: f64, r_mc: f64, params: &PropagationParams) -> f64 {
    value * sigma_m_sq_w * r_mc.powf(-params.alpha) * params.shadow_mean()
}

pub const DEFAULT_TIERS: usize = 2;
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_SAMPLES: usize = 101;

pub fn fit_bounds(alpha: f64, order: usize, samples: usize) -> Result<PolyBounds> {
    let layout = interferer_positions(1.0, DEFAULT_TIERS)?;
    fit_bounds_with(&layout, alpha, order, samples)
}

/// Least-squares fits along the two extremal lines.
///
/// Radii are `k / (samples - 1)`. The corner line uses all of them; the
/// edge line stops at the cell boundary `r̄ = √3/2`, beyond which the ray
/// leaves the macrocell and the interference grows without bound.
pub fn fit_bounds_with(layout: &LatticeLayout, alpha: f64, order: usize, samples: usize) -> Result<PolyBounds> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidArgument(format!("alpha must exceed 2, got {alpha}")));
    }
    if order == 0 {
        return Err(Error::InvalidArgument("polynomial order must be at least 1".into()));
    }
    if samples < 4 * (order + 1) {
        return Err(Error::FitFailure(format!(
            "{samples} samples cannot support an order-{order} fit (need {})",
            4 * (order + 1)
        )));
    }
    let h = 1.0 / (samples - 1) as f64;
    let radii: Vec<f64> = (0..samples).map(|k| k as f64 * h).collect();
    let edge: Vec<f64> = radii
        .iter()
        .copied()
        .filter(|&r| r <= 0.5 * SQRT3 + 1e-12)
        .collect();
    let line = |rs: &[f64], theta: f64| -> Vec<f64> {
        rs.iter()
            .map(|&r| lattice_sum(Point::polar(r, theta), layout, alpha))
            .collect()
    };
    let low_y = line(&radii, std::f64::consts::FRAC_PI_6);
    let up_y = line(&edge, 0.0);
    let lower = least_squares(&radii, &low_y, order)?;
    let upper = least_squares(&edge, &up_y, order)?;
    let rel = |c: &[f64], xs: &[f64], ys: &[f64]| {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| ((horner(c, x) - y) / y).abs())
            .fold(0.0, f64::max)
    };
    let fit_max_rel_error = rel(&lower, &radii, &low_y).max(rel(&upper, &edge, &up_y));
    Ok(PolyBounds {
        alpha,
        order,
        tiers: layout.tiers,
        samples,
        lower_coeffs: lower,
        upper_coeffs: upper,
        fit_max_rel_error,
    })
}

fn least_squares(xs: &[f64], ys: &[f64], order: usize) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(xs.len(), order + 1, |i, j| xs[i].powi((order - j) as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let rank = svd.rank(1e-12 * svd.singular_values.max());
    if rank < order + 1 {
        return Err(Error::FitFailure(format!(
            "design matrix has rank {rank}, need {}",
            order + 1
        )));
    }
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::FitFailure(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

pub fn cache_file_name(alpha: f64, order: usize, tiers: usize) -> String {
    format!("bounds_alpha{alpha}_p{order}_t{tiers}.txt")
}

/// Loads a cached fit from `dir`, fitting and storing it when absent.
pub fn load_or_fit(dir: &Path, alpha: f64, order: usize, tiers: usize, samples: usize) -> Result<PolyBounds> {
    let path: PathBuf = dir.join(cache_file_name(alpha, order, tiers));
    if path.exists() {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let b = PolyBounds::from_record(&text, &path)?;
        if b.alpha == alpha && b.order == order && b.tiers == tiers && b.samples == samples {
            return Ok(b);
        }
    }
    let layout = interferer_positions(1.0, tiers)?;
    let b = fit_bounds_with(&layout, alpha, order, samples)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    std::fs::write(&path, b.to_record()).map_err(|e| Error::io(&path, e))?;
    Ok(b)
}
