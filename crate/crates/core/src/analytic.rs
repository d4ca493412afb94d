//! Lognormal SIR bounds, rate outage probabilities, outage area fractions
//! per region and the resulting small-cell count.
//!
//! Region integrals are written in coordinates centred on the midpoint `D`
//! of the edge shared with the neighbour at `(√3, 0)`, all lengths in units
//! of `r_mc`. The A2 rectangle spans `[0, g]` inward from `D` and `[0, b]`
//! along the edge; the A3 triangle has vertices `H`, `E` and the corner `F`.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::format::sig9;
use crate::interference::{fit_bounds, Bound, PolyBounds, DEFAULT_ORDER, DEFAULT_SAMPLES};
use crate::lattice::{interferer_positions, region_of, Point, Region, RegionPartition, SQRT3};
use crate::propagation::PropagationParams;
use crate::quadrature::integrate_2d_checked;

pub const QUAD_NODES: usize = 64;
pub const QUAD_TOL: f64 = 1e-6;
/// Upper end of the bracket used for threshold-radius solves.
pub const R_CAP: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reuse {
    One,
    Seven,
}

impl Reuse {
    pub fn factor(self) -> u32 {
        match self {
            Reuse::One => 1,
            Reuse::Seven => 7,
        }
    }

    pub fn from_factor(f: u32) -> Result<Self> {
        match f {
            1 => Ok(Reuse::One),
            7 => Ok(Reuse::Seven),
            _ => Err(Error::InvalidArgument(format!("reuse must be 1 or 7, got {f}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkParams {
    pub propagation: PropagationParams,
    pub r_mc: f64,
    pub r_sc: f64,
    pub gamma_g: f64,
    pub sigma_m_sq_dbm: f64,
    pub sigma_sc_sq_dbm: f64,
    pub sigma_n_sq_dbm: f64,
    pub gamma_gap_db: f64,
    pub c0: f64,
    pub eta: f64,
    pub reuse: Reuse,
    pub w_hz: f64,
    pub m_slots: u32,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            propagation: PropagationParams::default(),
            r_mc: 1000.0,
            r_sc: 150.0,
            gamma_g: 0.25,
            sigma_m_sq_dbm: 43.0,
            sigma_sc_sq_dbm: 20.0,
            sigma_n_sq_dbm: -100.0,
            gamma_gap_db: 2.0,
            c0: 1.0,
            eta: 0.5,
            reuse: Reuse::One,
            w_hz: 10e6,
            m_slots: 50,
        }
    }
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let p = &self.propagation;
        PropagationParams::new(p.alpha, p.sigma_l_db, p.r_ref)?;
        if !(self.r_mc > 0.0) || !(self.r_sc > 0.0) {
            return bad(format!("radii must be positive: r_mc {}, r_sc {}", self.r_mc, self.r_sc));
        }
        if self.r_sc > self.r_mc {
            return bad(format!("r_sc {} exceeds r_mc {}", self.r_sc, self.r_mc));
        }
        if !(self.gamma_g > 0.0 && self.gamma_g < 1.0) {
            return bad(format!("gamma_g must lie in (0, 1), got {}", self.gamma_g));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return bad(format!("eta must lie in (0, 1), got {}", self.eta));
        }
        if !(self.c0 > 0.0) {
            return bad(format!("c0 must be positive, got {}", self.c0));
        }
        if !(self.w_hz > 0.0) || self.m_slots == 0 {
            return bad(format!("need w_hz > 0 and m_slots >= 1, got {} and {}", self.w_hz, self.m_slots));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.propagation.alpha
    }

    pub fn gap(&self) -> f64 {
        10f64.powf(self.gamma_gap_db / 10.0)
    }

    /// SINR below which a link with full per-user bandwidth is in outage.
    pub fn sinr_threshold(&self) -> f64 {
        self.gap() * (2f64.powf(self.c0) - 1.0)
    }

    /// SINR threshold for macro links, including the reuse bandwidth split.
    pub fn macro_threshold(&self) -> f64 {
        self.gap() * (2f64.powf(self.reuse.factor() as f64 * self.c0) - 1.0)
    }

    pub fn rho(&self) -> f64 {
        self.macro_threshold().ln()
    }

    /// Per-user bandwidth `W / M`.
    pub fn w0_hz(&self) -> f64 {
        self.w_hz / self.m_slots as f64
    }

    pub fn r_ref_norm(&self) -> f64 {
        self.propagation.r_ref / self.r_mc
    }
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirLognormal {
    pub xi: f64,
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
}

/// Lognormal SIR model at normalized distance `r0`. `which` selects the
/// SIR bound; the upper SIR bound divides by the lower interference line
/// (taken as the pointwise envelope of the two fits).
pub fn sir_bound(r0: f64, bounds: &PolyBounds, params: &NetworkParams, which: Bound) -> Result<SirLognormal> {
    if !(r0 > 0.0 && r0 <= R_CAP) {
        return Err(Error::InvalidArgument(format!("r0 must lie in (0, {R_CAP}], got {r0}")));
    }
    let p = &params.propagation;
    let xi = r0.max(params.r_ref_norm()).powf(-p.alpha) / (p.shadow_mean() * bounds.envelope(which.opposite(), r0));
    Ok(SirLognormal {
        xi,
        mu: xi.ln(),
        sigma: p.sigma_z,
        rho: params.rho(),
    })
}

pub fn rop_point(model: &SirLognormal) -> f64 {
    step_or_phi(model.rho - model.mu, model.sigma)
}

fn step_or_phi(num: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        if num > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        phi(num / sigma)
    }
}

/// Single-link ROP as a function of normalized distance.
#[derive(Clone, Debug)]
pub(crate) enum Kernel {
    Interference {
        bounds: PolyBounds,
        line: Bound,
        alpha: f64,
        r_ref: f64,
        ln_shadow_mean: f64,
        sigma: f64,
        rho: f64,
    },
    Noise {
        ln_snr_scale: f64,
        alpha: f64,
        r_ref: f64,
        sigma: f64,
        rho: f64,
    },
}

impl Kernel {
    pub(crate) fn for_params(bounds: Option<&PolyBounds>, params: &NetworkParams, which: Bound) -> Result<Kernel> {
        let p = &params.propagation;
        match params.reuse {
            Reuse::One => {
                let b = bounds.ok_or_else(|| Error::InvalidArgument("reuse-1 analysis needs fitted bounds".into()))?;
                if b.alpha != p.alpha {
                    return Err(Error::InvalidArgument(format!(
                        "bounds fitted for alpha {} but params use {}",
                        b.alpha, p.alpha
                    )));
                }
                Ok(Kernel::Interference {
                    bounds: b.clone(),
                    line: which.opposite(),
                    alpha: p.alpha,
                    r_ref: params.r_ref_norm(),
                    ln_shadow_mean: 0.5 * p.sigma_z * p.sigma_z,
                    sigma: p.sigma_z,
                    rho: params.rho(),
                })
            }
            Reuse::Seven => Ok(Kernel::Noise {
                ln_snr_scale: (dbm_to_w(params.sigma_m_sq_dbm) / dbm_to_w(params.sigma_n_sq_dbm)).ln()
                    - p.alpha * params.r_mc.ln(),
                alpha: p.alpha,
                r_ref: params.r_ref_norm(),
                sigma: p.sigma_z,
                rho: params.rho(),
            }),
        }
    }

    pub(crate) fn rop(&self, r: f64) -> f64 {
        match self {
            Kernel::Interference {
                bounds,
                line,
                alpha,
                r_ref,
                ln_shadow_mean,
                sigma,
                rho,
            } => {
                let poly = bounds.envelope(*line, r);
                let ln_xi = -alpha * r.max(*r_ref).ln() - ln_shadow_mean - poly.ln();
                step_or_phi(rho - ln_xi, *sigma)
            }
            Kernel::Noise {
                ln_snr_scale,
                alpha,
                r_ref,
                sigma,
                rho,
            } => {
                let ln_snr = ln_snr_scale - alpha * r.max(*r_ref).ln();
                step_or_phi(rho - ln_snr, *sigma)
            }
        }
    }

    fn r_ref(&self) -> f64 {
        match self {
            Kernel::Interference { r_ref, .. } | Kernel::Noise { r_ref, .. } => *r_ref,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdRadius {
    /// ROP equals eta at this normalized radius.
    Disc(f64),
    /// ROP stays below eta out to the bracket cap.
    FullCoverage,
}

impl ThresholdRadius {
    pub fn value(self) -> f64 {
        match self {
            ThresholdRadius::Disc(r) => r,
            ThresholdRadius::FullCoverage => R_CAP,
        }
    }
}

fn solve_kernel(k: &Kernel, eta: f64) -> Result<ThresholdRadius> {
    let at_ref = k.rop(k.r_ref());
    if at_ref >= eta {
        return Err(Error::NoCoverage { rop: at_ref, eta });
    }
    if k.rop(R_CAP) < eta {
        return Ok(ThresholdRadius::FullCoverage);
    }
    // The bracket is fixed so the iterates do not depend on r_ref (and
    // hence on r_mc); ROP is flat below r_ref.
    let (mut lo, mut hi) = (0.0, R_CAP);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if k.rop(mid) < eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdRadius::Disc(0.5 * (lo + hi)))
}

/// Normalized radius where the ROP under the chosen SIR bound reaches eta.
pub fn solve_r_opt(bounds: &PolyBounds, params: &NetworkParams, which: Bound) -> Result<ThresholdRadius> {
    let k = Kernel::for_params(Some(bounds), params, which)?;
    solve_kernel(&k, params.eta)
}

/// Fraction of A1 outside the coverage disc of normalized radius `r_opt`.
pub fn delta1(r_opt_norm: f64, gamma_g: f64) -> f64 {
    let u = r_opt_norm / (1.0 - gamma_g);
    let h = 0.5 * SQRT3;
    let hex = 1.5 * SQRT3;
    if u >= 1.0 {
        0.0
    } else if u <= h {
        1.0 - std::f64::consts::PI * u * u / hex
    } else {
        let s = (u * u - h * h).sqrt();
        let segment = u * u * s.atan2(h) - h * s;
        let inside = std::f64::consts::PI * u * u - 6.0 * segment;
        (1.0 - inside / hex).max(0.0)
    }
}

fn a2_mean(k: &Kernel, gamma_g: f64) -> Result<f64> {
    let g = 0.5 * SQRT3 * gamma_g;
    let b = 0.5 * (1.0 - gamma_g);
    let area = g * b;
    if area == 0.0 {
        return Ok(0.0);
    }
    let h = 0.5 * SQRT3;
    let f = |a: f64, t: f64| {
        let r0 = ((h - a).powi(2) + t * t).sqrt();
        let r1 = ((h + a).powi(2) + t * t).sqrt();
        k.rop(r0) * k.rop(r1)
    };
    let v = integrate_2d_checked(&f, 0.0, g, &|_| 0.0, &|_| b, QUAD_NODES, QUAD_TOL * area)?;
    Ok((v / area).clamp(0.0, 1.0))
}

fn a3_mean(k: &Kernel, gamma_g: f64, links: usize) -> Result<f64> {
    let h = 0.5 * SQRT3;
    let g = h * gamma_g;
    let b = 0.5 * (1.0 - gamma_g);
    let area = 0.5 * g * (0.5 - b);
    if area == 0.0 {
        return Ok(0.0);
    }
    let f = |x: f64, y: f64| {
        let r0 = (x * x + y * y).sqrt();
        let r1 = ((2.0 * h - x).powi(2) + y * y).sqrt();
        let r2 = ((h - x).powi(2) + (1.5 - y).powi(2)).sqrt();
        let mut v = k.rop(r0);
        if links > 1 {
            v *= k.rop(r1);
        }
        if links > 2 {
            v *= k.rop(r2);
        }
        v
    };
    let v = integrate_2d_checked(&f, h - g, h, &|_| b, &|x| x / SQRT3, QUAD_NODES, QUAD_TOL * area)?;
    Ok((v / area).clamp(0.0, 1.0))
}

/// Mean ROP over the A2 rectangle with the two nearest sites as candidates.
pub fn delta2(bounds: &PolyBounds, params: &NetworkParams, which: Bound) -> Result<f64> {
    let k = Kernel::for_params(Some(bounds), params, which)?;
    a2_mean(&k, params.gamma_g)
}

/// Mean ROP over the A3 triangle with the three nearest sites as candidates.
pub fn delta3(bounds: &PolyBounds, params: &NetworkParams, which: Bound) -> Result<f64> {
    let k = Kernel::for_params(Some(bounds), params, which)?;
    a3_mean(&k, params.gamma_g, 3)
}

/// Mean single-link ROP over the A3 triangle (serving site only).
pub fn delta3_single_link(bounds: &PolyBounds, params: &NetworkParams, which: Bound) -> Result<f64> {
    let k = Kernel::for_params(Some(bounds), params, which)?;
    a3_mean(&k, params.gamma_g, 1)
}

pub fn delta_mc(d1: f64, d2: f64, d3: f64, gamma_g: f64) -> f64 {
    let g = gamma_g;
    d1 * (1.0 - g).powi(2) + 2.0 * d2 * g * (1.0 - g) + d3 * g * g
}

pub fn sc_count(delta_mc: f64, r_mc: f64, r_sc: f64) -> u64 {
    (delta_mc * r_mc * r_mc / (r_sc * r_sc)).ceil() as u64
}

/// SNR threshold in dB for a reuse-7 macro link.
pub fn snr_threshold_db(params: &NetworkParams) -> f64 {
    10.0 * (params.gap() * (2f64.powf(7.0 * params.c0) - 1.0)).log10()
}

/// Noise-limited ROP at a point (metres) of a reuse-7 macrocell, taking the
/// best of the one to three candidate sites of the point's region.
pub fn rop_reuse7(point: Point, params: &NetworkParams) -> Result<f64> {
    if params.reuse != Reuse::Seven {
        return Err(Error::InvalidArgument("rop_reuse7 needs reuse = 7".into()));
    }
    let part = RegionPartition::new(params.r_mc, params.gamma_g)?;
    let extra = match region_of(point, &part)? {
        Region::A1 => 0,
        Region::A2 => 1,
        Region::A3 => 2,
    };
    let mut neighbours: Vec<Point> = interferer_positions(params.r_mc, 1)?
        .sites_m()
        .into_iter()
        .skip(1)
        .collect();
    neighbours.sort_by(|a, b| a.dist(point).total_cmp(&b.dist(point)));
    let k = Kernel::for_params(None, params, Bound::Lower)?;
    let mut rop = k.rop(point.norm() / params.r_mc);
    for s in neighbours.iter().take(extra) {
        rop *= k.rop(s.dist(point) / params.r_mc);
    }
    Ok(rop)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub r_opt: f64,
    pub full_coverage: bool,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta_mc: f64,
    pub n_sc: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageReport {
    pub alpha: f64,
    pub sigma_l_db: f64,
    pub c0: f64,
    pub eta: f64,
    pub gamma_g: f64,
    pub reuse: Reuse,
    pub r_mc: f64,
    pub r_sc: f64,
    /// Optimistic outage (upper SIR bound).
    pub lower: BoundReport,
    /// Pessimistic outage (lower SIR bound).
    pub upper: BoundReport,
    pub avg: BoundReport,
}

fn bound_report(k: &Kernel, params: &NetworkParams) -> Result<BoundReport> {
    let r = solve_kernel(k, params.eta)?;
    let d1 = match r {
        ThresholdRadius::Disc(v) => delta1(v, params.gamma_g),
        ThresholdRadius::FullCoverage => 0.0,
    };
    let d2 = a2_mean(k, params.gamma_g)?;
    let d3 = a3_mean(k, params.gamma_g, 3)?;
    let dmc = delta_mc(d1, d2, d3, params.gamma_g);
    Ok(BoundReport {
        r_opt: r.value(),
        full_coverage: r == ThresholdRadius::FullCoverage,
        delta1: d1,
        delta2: d2,
        delta3: d3,
        delta_mc: dmc,
        n_sc: sc_count(dmc, params.r_mc, params.r_sc),
    })
}

/// Fits bounds for `params.alpha` with the default order and sampling,
/// then builds the report.
pub fn full_report(params: &NetworkParams) -> Result<OutageReport> {
    let bounds = match params.reuse {
        Reuse::One => Some(fit_bounds(params.alpha(), DEFAULT_ORDER, DEFAULT_SAMPLES)?),
        Reuse::Seven => None,
    };
    full_report_with(params, bounds.as_ref())
}

pub fn full_report_with(params: &NetworkParams, bounds: Option<&PolyBounds>) -> Result<OutageReport> {
    params.validate()?;
    let (lower, upper) = match params.reuse {
        Reuse::One => (
            bound_report(&Kernel::for_params(bounds, params, Bound::Upper)?, params)?,
            bound_report(&Kernel::for_params(bounds, params, Bound::Lower)?, params)?,
        ),
        Reuse::Seven => {
            let r = bound_report(&Kernel::for_params(None, params, Bound::Lower)?, params)?;
            (r, r)
        }
    };
    let mean = |a: f64, b: f64| 0.5 * (a + b);
    let (d1, d2, d3) = (
        mean(lower.delta1, upper.delta1),
        mean(lower.delta2, upper.delta2),
        mean(lower.delta3, upper.delta3),
    );
    let dmc = delta_mc(d1, d2, d3, params.gamma_g);
    let avg = BoundReport {
        r_opt: mean(lower.r_opt, upper.r_opt),
        full_coverage: lower.full_coverage && upper.full_coverage,
        delta1: d1,
        delta2: d2,
        delta3: d3,
        delta_mc: dmc,
        n_sc: sc_count(dmc, params.r_mc, params.r_sc),
    };
    Ok(OutageReport {
        alpha: params.alpha(),
        sigma_l_db: params.propagation.sigma_l_db,
        c0: params.c0,
        eta: params.eta,
        gamma_g: params.gamma_g,
        reuse: params.reuse,
        r_mc: params.r_mc,
        r_sc: params.r_sc,
        lower,
        upper,
        avg,
    })
}

impl OutageReport {
    pub fn csv_header() -> String {
        let mut cols: Vec<String> = ["alpha", "sigma_l", "c0", "eta", "gamma_g", "reuse", "r_mc", "r_sc"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for field in ["r_opt", "delta1", "delta2", "delta3", "delta_mc", "n_sc"] {
            for suffix in ["l", "u", "avg"] {
                cols.push(format!("{field}_{suffix}"));
            }
        }
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            sig9(self.alpha),
            sig9(self.sigma_l_db),
            sig9(self.c0),
            sig9(self.eta),
            sig9(self.gamma_g),
            self.reuse.factor().to_string(),
            sig9(self.r_mc),
            sig9(self.r_sc),
        ];
        let b = [&self.lower, &self.upper, &self.avg];
        for get in [
            |r: &BoundReport| r.r_opt,
            |r: &BoundReport| r.delta1,
            |r: &BoundReport| r.delta2,
            |r: &BoundReport| r.delta3,
            |r: &BoundReport| r.delta_mc,
        ] {
            cols.extend(b.iter().map(|r| sig9(get(r))));
        }
        cols.extend(b.iter().map(|r| r.n_sc.to_string()));
        cols.join(",")
    }

    /// Text record, one `key = value` per line.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        for (k, v) in Self::csv_header().split(',').zip(self.csv_row().split(',')) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hexagon_contains_closed;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::sync::OnceLock;

    const LOWER_A4: [f64; 4] = [1.1021, 0.3650, 0.1019, 0.7784];
    const UPPER_A4: [f64; 4] = [4.2482, -2.4301, 0.7687, 0.7469];

    fn fitted() -> &'static PolyBounds {
        static B: OnceLock<PolyBounds> = OnceLock::new();
        B.get_or_init(|| fit_bounds(4.0, 3, DEFAULT_SAMPLES).unwrap())
    }

    fn table_bounds() -> PolyBounds {
        PolyBounds {
            alpha: 4.0,
            order: 3,
            tiers: 2,
            samples: 0,
            lower_coeffs: LOWER_A4.to_vec(),
            upper_coeffs: UPPER_A4.to_vec(),
            fit_max_rel_error: 0.0,
        }
    }

    fn with_c0(c0: f64) -> NetworkParams {
        NetworkParams {
            c0,
            ..NetworkParams::default()
        }
    }

    // Trapezoid integral of the normal density, independent of erfc.
    fn cdf_oracle(x: f64) -> f64 {
        let n = 200_000;
        let a = -12.0;
        let h = (x - a) / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * pdf(a + i as f64 * h)
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn sir_bound_examples() {
        let p0 = NetworkParams {
            propagation: PropagationParams::new(4.0, 0.0, 1.0).unwrap(),
            ..NetworkParams::default()
        };
        let b = table_bounds();
        let s = sir_bound(0.6, &b, &p0, Bound::Upper).unwrap();
        assert!((s.xi - 0.6f64.powi(-4) / b.eval(Bound::Lower, 0.6)).abs() < 1e-12);
        assert_eq!(s.mu, s.xi.ln());
        let s = sir_bound(1.0, &b, &NetworkParams::default(), Bound::Upper).unwrap();
        assert!((s.xi - 1.0 / (1.5283 * 2.3474)).abs() < 2e-4, "{}", s.xi);
        assert!((s.xi - 0.2787).abs() < 1e-3);
        assert!(sir_bound(0.0, &b, &p0, Bound::Upper).is_err());
        assert!(sir_bound(1.3, &b, &p0, Bound::Upper).is_err());
    }

    #[test]
    fn xi_decreasing() {
        let b = fitted();
        let p = NetworkParams::default();
        for which in [Bound::Lower, Bound::Upper] {
            let mut prev = f64::INFINITY;
            for k in 1..=100 {
                let xi = sir_bound(k as f64 / 100.0, b, &p, which).unwrap().xi;
                assert!(xi < prev);
                prev = xi;
            }
        }
    }

    #[test]
    fn rop_point_examples() {
        let m = SirLognormal { xi: 2.0, mu: 2f64.ln(), sigma: 0.9, rho: 2f64.ln() };
        assert_eq!(rop_point(&m), 0.5);
        let m = SirLognormal { rho: -1e300, ..m };
        assert_eq!(rop_point(&m), 0.0);
        let s = sir_bound(1.0, &table_bounds(), &NetworkParams::default(), Bound::Upper).unwrap();
        let v = rop_point(&s);
        assert!((v - 0.970).abs() < 1e-3, "{v}");
        assert!((v - cdf_oracle((s.rho - s.mu) / s.sigma)).abs() < 1e-8);
        assert!((s.rho - 0.4605).abs() < 1e-4);
    }

    #[test]
    fn rop_point_step_without_shadowing() {
        let m = SirLognormal { xi: 1.0, mu: 0.0, sigma: 0.0, rho: 0.1 };
        assert_eq!(rop_point(&m), 1.0);
        assert_eq!(rop_point(&SirLognormal { rho: -0.1, ..m }), 0.0);
    }

    #[test]
    fn r_opt_hits_eta() {
        let p = NetworkParams::default();
        for which in [Bound::Lower, Bound::Upper] {
            let r = solve_r_opt(fitted(), &p, which).unwrap().value();
            let s = sir_bound(r, fitted(), &p, which).unwrap();
            assert!((rop_point(&s) - p.eta).abs() <= 1e-6);
            // eta = 0.5 reduces to xi = threshold
            assert!((s.xi - p.macro_threshold()).abs() <= 1e-5 * s.xi);
        }
    }

    #[test]
    fn r_opt_matches_grid_scan() {
        let p = NetworkParams { eta: 0.3, ..NetworkParams::default() };
        for which in [Bound::Lower, Bound::Upper] {
            let r = solve_r_opt(fitted(), &p, which).unwrap().value();
            let n = 10_000;
            let best = (1..=n)
                .map(|i| i as f64 * R_CAP / n as f64)
                .min_by(|a, b| {
                    let f = |r: f64| (rop_point(&sir_bound(r, fitted(), &p, which).unwrap()) - p.eta).abs();
                    f(*a).total_cmp(&f(*b))
                })
                .unwrap();
            assert!((r - best).abs() <= R_CAP / n as f64, "{r} vs {best}");
        }
    }

    #[test]
    fn r_opt_signals() {
        let p = with_c0(0.01);
        assert_eq!(solve_r_opt(fitted(), &p, Bound::Upper).unwrap(), ThresholdRadius::FullCoverage);
        let p = with_c0(60.0);
        assert!(matches!(solve_r_opt(fitted(), &p, Bound::Upper), Err(Error::NoCoverage { .. })));
    }

    #[test]
    fn delta1_examples() {
        assert_eq!(delta1(0.75, 0.25), 0.0);
        assert_eq!(delta1(0.9, 0.25), 0.0);
        assert_eq!(delta1(0.0, 0.25), 1.0);
        let u = 0.5 * SQRT3;
        let want = 1.0 - std::f64::consts::PI * SQRT3 / 6.0;
        assert!((delta1(u * 0.75, 0.25) - want).abs() < 1e-9);
        assert!((want - 0.0931).abs() < 1e-4);
    }

    #[test]
    fn delta1_branches_continuous() {
        let u = 0.5 * SQRT3;
        let inner = 1.0 - std::f64::consts::PI * u * u / (1.5 * SQRT3);
        let h = 0.5 * SQRT3;
        let seg = u * u * (h / u).acos() - h * (u * u - h * h).max(0.0).sqrt();
        let cut = 1.0 - (std::f64::consts::PI * u * u - 6.0 * seg) / (1.5 * SQRT3);
        assert!((inner - cut).abs() < 1e-9);
        assert!((delta1(1.0 - 1e-12, 0.0)).abs() < 1e-9);
    }

    #[test]
    fn delta1_matches_point_count() {
        // Hexagon-minus-disc area by a fine grid count.
        let g = 0.25;
        for r in [0.5, 0.68, 0.72] {
            let step = 0.002;
            let n = (1.0 / step) as i64;
            let (mut inside, mut out) = (0usize, 0usize);
            for i in -n..=n {
                for j in -n..=n {
                    let p = Point::new(i as f64 * step, j as f64 * step);
                    if hexagon_contains_closed(1.0 - g, p) {
                        inside += 1;
                        if p.norm() > r {
                            out += 1;
                        }
                    }
                }
            }
            let frac = out as f64 / inside as f64;
            assert!((delta1(r, g) - frac).abs() < 3e-3, "r {r}: {} vs {frac}", delta1(r, g));
        }
    }

    fn mc_rect(k: &Kernel, g: f64, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = 0.5 * SQRT3;
        let (gg, b) = (h * g, 0.5 * (1.0 - g));
        (0..n)
            .map(|_| {
                let a: f64 = rng.gen::<f64>() * gg;
                let t: f64 = rng.gen::<f64>() * b;
                k.rop(((h - a).powi(2) + t * t).sqrt()) * k.rop(((h + a).powi(2) + t * t).sqrt())
            })
            .sum::<f64>()
            / n as f64
    }

    fn mc_tri(k: &Kernel, g: f64, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = 0.5 * SQRT3;
        let hp = Point::new(h - h * g, 0.5 * (1.0 - g));
        let e = Point::new(h, 0.5 * (1.0 - g));
        let f = Point::new(h, 0.5);
        let bs = [Point::ORIGIN, Point::new(SQRT3, 0.0), Point::new(h, 1.5)];
        (0..n)
            .map(|_| {
                let (mut u, mut v): (f64, f64) = (rng.gen(), rng.gen());
                if u + v > 1.0 {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                let p = Point::new(
                    hp.x + u * (e.x - hp.x) + v * (f.x - hp.x),
                    hp.y + u * (e.y - hp.y) + v * (f.y - hp.y),
                );
                bs.iter().map(|s| k.rop(s.dist(p))).product::<f64>()
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn delta2_delta3_match_monte_carlo() {
        let p = NetworkParams::default();
        for which in [Bound::Lower, Bound::Upper] {
            let k = Kernel::for_params(Some(fitted()), &p, which).unwrap();
            let d2 = delta2(fitted(), &p, which).unwrap();
            let d3 = delta3(fitted(), &p, which).unwrap();
            assert!((d2 - mc_rect(&k, p.gamma_g, 10_000_000, 1)).abs() < 1e-3);
            assert!((d3 - mc_tri(&k, p.gamma_g, 10_000_000, 2)).abs() < 1e-3);
        }
    }

    #[test]
    fn delta2_delta3_limits() {
        let lo = with_c0(1e-6);
        assert!(delta2(fitted(), &lo, Bound::Upper).unwrap() < 1e-6);
        assert!(delta3(fitted(), &lo, Bound::Upper).unwrap() < 1e-6);
        let hi = with_c0(30.0);
        assert!(delta2(fitted(), &hi, Bound::Lower).unwrap() > 1.0 - 1e-6);
        assert!(delta3(fitted(), &hi, Bound::Lower).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn extra_candidates_never_raise_outage() {
        for c0 in [0.5, 1.0, 2.0, 3.0] {
            let p = with_c0(c0);
            for which in [Bound::Lower, Bound::Upper] {
                let d3 = delta3(fitted(), &p, which).unwrap();
                let single = delta3_single_link(fitted(), &p, which).unwrap();
                assert!(d3 <= single + 1e-12);
            }
        }
    }

    #[test]
    fn delta_mc_examples() {
        assert!((delta_mc(0.3, 0.3, 0.3, 0.25) - 0.3).abs() < 1e-15);
        assert_eq!(delta_mc(0.4, 0.9, 0.1, 0.0), 0.4);
    }

    #[test]
    fn sc_count_examples() {
        assert_eq!(sc_count(0.29, 1000.0, 150.0), 13);
        assert_eq!(sc_count(0.0, 1234.0, 99.0), 0);
        assert_eq!(sc_count(0.29, 500.0, 100.0), 8);
    }

    #[test]
    fn headline_report() {
        let r = full_report(&NetworkParams::default()).unwrap();
        assert!((r.avg.delta_mc - 0.29).abs() <= 0.02, "{}", r.avg.delta_mc);
        for b in [&r.lower, &r.upper, &r.avg] {
            let w = delta_mc(b.delta1, b.delta2, b.delta3, r.gamma_g);
            assert!((w - b.delta_mc).abs() < 1e-12);
        }
        assert!(r.lower.delta_mc <= r.upper.delta_mc);
    }

    #[test]
    fn report_invariant_to_radius_and_power() {
        let base = full_report(&NetworkParams::default()).unwrap();
        let other = NetworkParams {
            r_mc: 500.0,
            r_sc: 75.0,
            sigma_m_sq_dbm: 30.0,
            ..NetworkParams::default()
        };
        let r = full_report(&other).unwrap();
        for (a, b) in [(&base.lower, &r.lower), (&base.upper, &r.upper), (&base.avg, &r.avg)] {
            assert_eq!(a.delta1, b.delta1);
            assert_eq!(a.delta2, b.delta2);
            assert_eq!(a.delta3, b.delta3);
            assert_eq!(a.delta_mc, b.delta_mc);
            assert_eq!(a.n_sc, b.n_sc);
        }
    }

    #[test]
    fn deltas_monotone_in_c0_and_ordered() {
        let mut prev: Option<OutageReport> = None;
        for i in 0..=10 {
            let c0 = 0.5 + 0.25 * i as f64;
            let r = full_report_with(&with_c0(c0), Some(fitted())).unwrap();
            for b in [&r.lower, &r.upper, &r.avg] {
                for v in [b.delta1, b.delta2, b.delta3, b.delta_mc] {
                    assert!((0.0..=1.0).contains(&v));
                }
            }
            assert!(r.lower.delta1 <= r.upper.delta1, "c0 {c0}: {:?} {:?}", r.lower, r.upper);
            assert!(r.lower.delta2 <= r.upper.delta2);
            assert!(r.lower.delta3 <= r.upper.delta3);
            if let Some(p) = prev {
                for (a, b) in [(&p.lower, &r.lower), (&p.upper, &r.upper)] {
                    assert!(b.delta1 >= a.delta1 && b.delta2 >= a.delta2);
                    assert!(b.delta3 >= a.delta3 && b.delta_mc >= a.delta_mc);
                }
            }
            prev = Some(r);
        }
    }

    #[test]
    fn rop_monotone_on_grid() {
        // 100 radii × 20 rate targets.
        for which in [Bound::Lower, Bound::Upper] {
            let mut last_row: Option<Vec<f64>> = None;
            for j in 0..20 {
                let p = with_c0(0.25 + 0.2 * j as f64);
                let row: Vec<f64> = (1..=100)
                    .map(|i| rop_point(&sir_bound(i as f64 / 100.0, fitted(), &p, which).unwrap()))
                    .collect();
                assert!(row.windows(2).all(|w| w[1] >= w[0]));
                if let Some(prev) = &last_row {
                    assert!(row.iter().zip(prev).all(|(a, b)| a >= b));
                }
                last_row = Some(row);
            }
        }
    }

    #[test]
    fn reuse7_threshold() {
        let t = snr_threshold_db(&NetworkParams::default());
        assert!((t - 23.03).abs() < 0.01, "{t}");
    }

    #[test]
    fn reuse7_noise_free_limit() {
        let p = NetworkParams {
            reuse: Reuse::Seven,
            sigma_n_sq_dbm: -400.0,
            ..NetworkParams::default()
        };
        let v = rop_reuse7(Point::polar(980.0, 0.5), &p).unwrap();
        assert!(v < 1e-12);
        assert!(rop_reuse7(Point::ORIGIN, &NetworkParams::default()).is_err());
    }

    #[test]
    fn reuse7_matches_shadowing_monte_carlo() {
        let p = NetworkParams {
            reuse: Reuse::Seven,
            r_mc: 2000.0,
            ..NetworkParams::default()
        };
        let t = 10f64.powf(snr_threshold_db(&p) / 10.0);
        let snr0 = dbm_to_w(p.sigma_m_sq_dbm) / dbm_to_w(p.sigma_n_sq_dbm);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let sites = interferer_positions(p.r_mc, 1).unwrap().sites_m();
        for pt in [
            Point::new(900.0, 100.0),
            Point::new(1650.0, 300.0),
            Point::polar(1900.0, std::f64::consts::FRAC_PI_6),
        ] {
            let mut near: Vec<Point> = sites.clone();
            near.sort_by(|a, b| a.dist(pt).total_cmp(&b.dist(pt)));
            let part = RegionPartition::new(p.r_mc, p.gamma_g).unwrap();
            let m = 1 + match region_of(pt, &part).unwrap() {
                Region::A1 => 0,
                Region::A2 => 1,
                Region::A3 => 2,
            };
            let draws = 100_000;
            let mut out = 0;
            for _ in 0..draws {
                let best = near[..m]
                    .iter()
                    .map(|s| {
                        let z: f64 = rng.sample(StandardNormal);
                        snr0 * s.dist(pt).powf(-4.0) * 10f64.powf(-4.0 * z / 10.0)
                    })
                    .fold(0.0, f64::max);
                if best < t {
                    out += 1;
                }
            }
            let mc = out as f64 / draws as f64;
            let an = rop_reuse7(pt, &p).unwrap();
            assert!((mc - an).abs() < 0.01, "{pt:?}: {mc} vs {an}");
        }
    }

    #[test]
    fn csv_row_has_header_arity() {
        let r = full_report_with(&NetworkParams::default(), Some(fitted())).unwrap();
        assert_eq!(
            OutageReport::csv_header().split(',').count(),
            r.csv_row().split(',').count()
        );
        assert!(r.to_record().contains("delta_mc_avg = "));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rop_in_unit_interval(r in 0.01f64..1.2, c0 in 0.05f64..4.0, sl in 0.0f64..10.0) {
            let p = NetworkParams {
                propagation: PropagationParams::new(4.0, sl, 1.0).unwrap(),
                c0,
                ..NetworkParams::default()
            };
            for which in [Bound::Lower, Bound::Upper] {
                let v = rop_point(&sir_bound(r, fitted(), &p, which).unwrap());
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn delta1_in_unit_interval(r in 0.0f64..1.5, g in 0.01f64..0.99) {
            let d = delta1(r, g);
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
