//! PPP and real-site baselines for bracketing lattice coverage.
//!
//! Coordinates are metres in a local frame whose origin is the window
//! centre. Site files hold `id,latitude_deg,longitude_deg` rows after a
//! header line and are projected equirectangularly about a given centre
//! with an earth radius of 6,371,000 m.

use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::analytic::{dbm_to_w, NetworkParams};
use crate::error::{Error, Result};
use crate::lattice::{axial_round, hexagon_area, Point, SQRT3};
use crate::propagation::{derive_seed, path_gain, shadow_db};
use crate::simulator::mean_std;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Axis-aligned rectangle centred on the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub width: f64,
    pub height: f64,
}

impl Window {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return Err(Error::InvalidArgument(format!("window must be positive, got {width} x {height}")));
        }
        Ok(Window { width, height })
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x.abs() <= self.width / 2.0 && p.y.abs() <= self.height / 2.0
    }

    /// The window shrunk by `guard` on every side.
    pub fn inner(&self, guard: f64) -> Result<Window> {
        if !(guard >= 0.0) || 2.0 * guard >= self.width.min(self.height) {
            return Err(Error::InvalidArgument(format!(
                "guard margin {guard} m leaves nothing of a {} x {} m window",
                self.width, self.height
            )));
        }
        Ok(Window {
            width: self.width - 2.0 * guard,
            height: self.height - 2.0 * guard,
        })
    }

    /// Cell-centred grid with spacing close to `step`.
    pub fn grid(&self, step: f64) -> Vec<Point> {
        let nx = (self.width / step).round().max(1.0) as usize;
        let ny = (self.height / step).round().max(1.0) as usize;
        let (dx, dy) = (self.width / nx as f64, self.height / ny as f64);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Point::new(
                    -self.width / 2.0 + (i as f64 + 0.5) * dx,
                    -self.height / 2.0 + (j as f64 + 0.5) * dy,
                ));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteSet {
    pub name: String,
    pub sites: Vec<Point>,
    pub window: Window,
    pub density: f64,
}

impl SiteSet {
    /// Keeps the sites inside `window` and sets the density from the count.
    pub fn new(name: impl Into<String>, sites: Vec<Point>, window: Window) -> Self {
        let sites: Vec<Point> = sites.into_iter().filter(|&p| window.contains(p)).collect();
        SiteSet {
            name: name.into(),
            density: sites.len() as f64 / window.area(),
            sites,
            window,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

pub fn ppp_generate(density: f64, window: Window, seed: u64) -> Result<SiteSet> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::InvalidArgument(format!("density must be non-negative, got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x5050]));
    let mean = density * window.area();
    let n = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let sites = (0..n)
        .map(|_| {
            Point::new(
                (rng.gen::<f64>() - 0.5) * window.width,
                (rng.gen::<f64>() - 0.5) * window.height,
            )
        })
        .collect();
    Ok(SiteSet::new("ppp", sites, window))
}

/// Hexagonal lattice of spacing `√3·r_mc` covering the window, with a site
/// at the origin.
pub fn hex_site_set(r_mc: f64, window: Window) -> Result<SiteSet> {
    if !(r_mc > 0.0) {
        return Err(Error::InvalidArgument(format!("r_mc must be positive, got {r_mc}")));
    }
    let d = SQRT3 * r_mc;
    let nr = (window.height / (1.5 * r_mc)).ceil() as i64 + 1;
    let nq = (window.width / d).ceil() as i64 + nr + 1;
    let mut sites = Vec::new();
    for r in -nr..=nr {
        for q in -nq..=nq {
            let p = Point::new(d * (q as f64 + r as f64 / 2.0), 1.5 * r_mc * r as f64);
            if window.contains(p) {
                sites.push(p);
            }
        }
    }
    sites.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.angle().total_cmp(&b.angle())));
    Ok(SiteSet::new("hex", sites, window))
}

/// Adds independent Gaussian offsets to every site, keeping those that stay
/// inside the window.
pub fn perturb_site_set(set: &SiteSet, sigma_m: f64, seed: u64) -> Result<SiteSet> {
    let normal = Normal::new(0.0, sigma_m)
        .map_err(|e| Error::InvalidArgument(format!("perturbation sigma {sigma_m}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x7e57]));
    let sites = set
        .sites
        .iter()
        .map(|p| Point::new(p.x + normal.sample(&mut rng), p.y + normal.sample(&mut rng)))
        .collect();
    Ok(SiteSet::new(format!("{}_perturbed", set.name), sites, set.window))
}

pub fn project(lat_deg: f64, lon_deg: f64, center_lat_deg: f64, center_lon_deg: f64) -> Point {
    let (dlat, dlon) = ((lat_deg - center_lat_deg).to_radians(), (lon_deg - center_lon_deg).to_radians());
    Point::new(
        EARTH_RADIUS_M * dlon * center_lat_deg.to_radians().cos(),
        EARTH_RADIUS_M * dlat,
    )
}

pub fn parse_site_set<R: BufRead>(
    reader: R,
    path: &Path,
    center: (f64, f64),
    window: Window,
) -> Result<SiteSet> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut sites = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let n = k + 1;
        if n == 1 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(parse_err(n, format!("expected 3 columns, found {}", cols.len())));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(n, format!("bad {what} '{s}'")))
        };
        let (lat, lon) = (num(cols[1], "latitude")?, num(cols[2], "longitude")?);
        if lat.abs() > 90.0 || lon.abs() > 180.0 {
            return Err(parse_err(n, format!("coordinates out of range: {lat}, {lon}")));
        }
        sites.push(project(lat, lon, center.0, center.1));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sites".into());
    let set = SiteSet::new(name, sites, window);
    if set.is_empty() {
        return Err(Error::EmptySet(set.name));
    }
    Ok(set)
}

pub fn load_site_set(path: &Path, center: (f64, f64), window: Window) -> Result<SiteSet> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_site_set(std::io::BufReader::new(f), path, center, window)
}

/// Fading treatment in the baseline evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineFading {
    /// Closed-form Rayleigh outage given the mean powers.
    RayleighExact,
    /// Outage when the fading-averaged SINR is below threshold.
    Averaged,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineOptions {
    /// Guard margin in metres; `None` means two mean nearest-neighbour
    /// spacings, `2/√(π·density)`.
    pub guard_m: Option<f64>,
    pub grid_step_m: f64,
    pub fading: BaselineFading,
    pub realizations: usize,
    pub seed: u64,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        BaselineOptions {
            guard_m: None,
            grid_step_m: 50.0,
            fading: BaselineFading::Averaged,
            realizations: 100,
            seed: 1,
        }
    }
}

impl BaselineOptions {
    pub fn guard(&self, density: f64) -> f64 {
        self.guard_m.unwrap_or_else(|| 2.0 / (std::f64::consts::PI * density).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineResult {
    /// Fraction of users whose ROP exceeds eta, averaged over realizations.
    pub outage: f64,
    pub outage_std: f64,
    /// Mean per-user ROP.
    pub mean_rop: f64,
    pub users: usize,
    pub per_realization: Vec<f64>,
    pub density: f64,
    /// Small cells for a hexagonal macrocell of `params.r_mc`.
    pub n_sc: u64,
}

/// Outage probability over users of the inner window.
///
/// Each site transmits at the macro power with reuse-1 interference from
/// every other site. Shadowing is blocked on an `r_sc` tiling anchored at
/// the window centre and redrawn per realization.
pub fn siteset_outage(set: &SiteSet, params: &NetworkParams, opts: &BaselineOptions) -> Result<BaselineResult> {
    if set.is_empty() {
        return Err(Error::EmptySet(set.name.clone()));
    }
    let users = prepare(set.window, set.density, params, opts)?;
    let gains = gain_table(set, &users, params);
    let runs: Vec<(f64, f64)> = (0..opts.realizations)
        .into_par_iter()
        .map(|k| realization(set, &users, &gains, params, opts, derive_seed(opts.seed, &[k as u64])))
        .collect();
    finish(runs, users.len(), set.density, params)
}

/// Like [`siteset_outage`], but with a fresh PPP layout per realization.
/// Realizations whose layout happens to be empty are skipped.
pub fn ppp_outage(density: f64, window: Window, params: &NetworkParams, opts: &BaselineOptions) -> Result<BaselineResult> {
    let users = prepare(window, density, params, opts)?;
    let runs: Vec<Option<(f64, f64)>> = (0..opts.realizations)
        .into_par_iter()
        .map(|k| {
            let seed = derive_seed(opts.seed, &[k as u64]);
            let set = ppp_generate(density, window, derive_seed(seed, &[0x999]))?;
            if set.is_empty() {
                return Ok(None);
            }
            let gains = gain_table(&set, &users, params);
            Ok(Some(realization(&set, &users, &gains, params, opts, seed)))
        })
        .collect::<Result<_>>()?;
    let runs: Vec<(f64, f64)> = runs.into_iter().flatten().collect();
    if runs.is_empty() {
        return Err(Error::EmptySet("ppp".into()));
    }
    finish(runs, users.len(), density, params)
}

struct Users {
    points: Vec<Point>,
    tiles: Vec<(i32, i32)>,
}

impl Users {
    fn len(&self) -> usize {
        self.points.len()
    }
}

fn prepare(window: Window, density: f64, params: &NetworkParams, opts: &BaselineOptions) -> Result<Users> {
    params.validate()?;
    if opts.realizations == 0 || !(opts.grid_step_m > 0.0) {
        return Err(Error::InvalidArgument("need realizations >= 1 and a positive grid step".into()));
    }
    if opts.guard_m.is_none() && !(density > 0.0) {
        return Err(Error::InvalidArgument("the default guard needs a positive density".into()));
    }
    let points = window.inner(opts.guard(density))?.grid(opts.grid_step_m);
    let tiles = points.iter().map(|&u| axial_round(u, params.r_sc)).collect();
    Ok(Users { points, tiles })
}

fn gain_table(set: &SiteSet, users: &Users, params: &NetworkParams) -> Vec<f64> {
    let bs_w = dbm_to_w(params.sigma_m_sq_dbm);
    users
        .points
        .iter()
        .flat_map(|&u| set.sites.iter().map(move |&s| bs_w * path_gain(s.dist(u), &params.propagation)))
        .collect()
}

/// Outage fraction and mean ROP of one shadowing draw.
fn realization(
    set: &SiteSet,
    users: &Users,
    gains: &[f64],
    params: &NetworkParams,
    opts: &BaselineOptions,
    seed: u64,
) -> (f64, f64) {
    let noise = dbm_to_w(params.sigma_n_sq_dbm);
    let t = params.sinr_threshold();
    let sigma = params.propagation.sigma_l_db;
    let n = set.len();
    let mut out = 0usize;
    let mut rop_sum = 0.0;
    let mut p = vec![0.0; n];
    for (ui, g) in gains.chunks_exact(n).enumerate() {
        let (q, r) = users.tiles[ui];
        for (j, gj) in g.iter().enumerate() {
            p[j] = gj * 10f64.powf(-shadow_db(seed, j as u64, q, r, sigma) / 10.0);
        }
        let serve = (0..n).fold(0, |b, j| if p[j] > p[b] { j } else { b });
        let s = p[serve];
        let rop = match opts.fading {
            BaselineFading::Averaged => {
                let i: f64 = p.iter().sum::<f64>() - s;
                if s / (i + noise) < t {
                    1.0
                } else {
                    0.0
                }
            }
            BaselineFading::RayleighExact => {
                let mut cov = (-t * noise / s).exp();
                for (j, &pj) in p.iter().enumerate() {
                    if j != serve {
                        cov /= 1.0 + t * pj / s;
                    }
                }
                1.0 - cov
            }
        };
        rop_sum += rop;
        if rop > params.eta {
            out += 1;
        }
    }
    let m = users.len() as f64;
    (out as f64 / m, rop_sum / m)
}

fn finish(runs: Vec<(f64, f64)>, users: usize, density: f64, params: &NetworkParams) -> Result<BaselineResult> {
    let per_realization: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (outage, outage_std) = mean_std(&per_realization);
    let mean_rop = mean_std(&runs.iter().map(|r| r.1).collect::<Vec<_>>()).0;
    Ok(BaselineResult {
        outage,
        outage_std,
        mean_rop,
        users,
        per_realization,
        density,
        n_sc: sc_count_for_area(outage, hexagon_area(params.r_mc), params.r_sc)?,
    })
}

/// Small cells needed to cover the outage share of an area `s_m2`.
pub fn sc_count_for_area(probability: f64, s_m2: f64, r_sc: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&probability) || !(s_m2 > 0.0) || !(r_sc > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need probability in [0,1] and positive area and radius, got {probability}, {s_m2}, {r_sc}"
        )));
    }
    Ok((probability * s_m2 / hexagon_area(r_sc)).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::PropagationParams;
    use proptest::prelude::*;

    #[test]
    fn window_geometry() {
        let w = Window::new(1000.0, 600.0).unwrap();
        assert_eq!(w.area(), 6e5);
        assert!(w.contains(Point::new(500.0, -300.0)));
        assert!(!w.contains(Point::new(500.1, 0.0)));
        assert!(w.inner(300.0).is_err());
        assert_eq!(w.inner(100.0).unwrap(), Window::new(800.0, 400.0).unwrap());
        let g = w.grid(100.0);
        assert_eq!(g.len(), 60);
        assert!(g.iter().all(|&p| w.contains(p)));
        assert!(Window::new(0.0, 1.0).is_err());
    }

    #[test]
    fn ppp_empty_and_deterministic() {
        let w = Window::square(1000.0).unwrap();
        assert!(ppp_generate(0.0, w, 1).unwrap().is_empty());
        assert_eq!(ppp_generate(1e-5, w, 9).unwrap(), ppp_generate(1e-5, w, 9).unwrap());
        assert_ne!(ppp_generate(1e-5, w, 9).unwrap(), ppp_generate(1e-5, w, 10).unwrap());
        assert!(ppp_generate(-1.0, w, 1).is_err());
    }

    #[test]
    fn ppp_mean_count() {
        let w = Window::square(2000.0).unwrap();
        let mean = 2.5e-5 * w.area();
        let total: usize = (0..10_000u64).map(|s| ppp_generate(2.5e-5, w, s).unwrap().len()).sum();
        let emp = total as f64 / 10_000.0;
        assert!((emp / mean - 1.0).abs() < 0.01, "{emp} vs {mean}");
    }

    #[test]
    fn site_set_density_and_window() {
        let w = Window::square(1000.0).unwrap();
        let s = SiteSet::new("t", vec![Point::new(0.0, 0.0), Point::new(400.0, -100.0), Point::new(900.0, 0.0)], w);
        assert_eq!(s.len(), 2);
        assert_eq!(s.density, 2e-6);
    }

    #[test]
    fn projection() {
        assert_eq!(project(43.65, -79.38, 43.65, -79.38), Point::new(0.0, 0.0));
        let p = project(43.66, -79.38, 43.65, -79.38);
        assert!((p.y - EARTH_RADIUS_M * 0.01f64.to_radians()).abs() < 1e-6);
        let q = project(0.0, 1.0, 0.0, 0.0);
        assert!((q.x - EARTH_RADIUS_M * 1f64.to_radians()).abs() < 1e-6);
    }

    #[test]
    fn parse_sites() {
        let w = Window::square(1000.0).unwrap();
        let text = "id,latitude_deg,longitude_deg\n1,0.0,0.0\n2,0.001,0.001\n3,1.0,1.0\n";
        let s = parse_site_set(text.as_bytes(), Path::new("x.csv"), (0.0, 0.0), w).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.density, 2e-6);
        assert_eq!(s.name, "x");
        let bad = "id,lat,lon\n1,0,0\n2,abc,0\n";
        match parse_site_set(bad.as_bytes(), Path::new("x.csv"), (0.0, 0.0), w) {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_site_set("h\n1,0,0,0\n".as_bytes(), Path::new("x"), (0.0, 0.0), w),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_site_set("h\n1,5,5\n".as_bytes(), Path::new("x"), (0.0, 0.0), w),
            Err(Error::EmptySet(_))
        ));
    }

    #[test]
    fn toronto_like_density() {
        let w = Window::square(6000.0).unwrap();
        let sites = (0..25).map(|k| Point::new(-2500.0 + 1000.0 * (k % 5) as f64 + 50.0, -2500.0 + 1000.0 * (k / 5) as f64)).collect();
        let s = SiteSet::new("toronto", sites, w);
        assert!((s.density - 6.94e-7).abs() < 0.01e-7);
        assert!((s.density - 6.95e-7).abs() <= 1.0 / w.area());
    }

    #[test]
    fn hex_sites_have_lattice_spacing() {
        let w = Window::square(8000.0).unwrap();
        let s = hex_site_set(1000.0, w).unwrap();
        assert_eq!(s.sites[0], Point::new(0.0, 0.0));
        for a in &s.sites {
            let nn = s.sites.iter().filter(|b| *b != a).map(|b| a.dist(*b)).fold(f64::INFINITY, f64::min);
            assert!((nn - SQRT3 * 1000.0).abs() < 1e-6);
        }
    }

    #[test]
    fn sc_count_examples() {
        assert_eq!(sc_count_for_area(0.0, 1e6, 100.0).unwrap(), 0);
        assert_eq!(sc_count_for_area(0.29, 2.598e6, 150.0).unwrap(), 13);
        let a = 0.29 * 2.598e6 / hexagon_area(150.0);
        let b = 0.29 * 5.196e6 / hexagon_area(150.0);
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert!(sc_count_for_area(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn guard_errors() {
        let w = Window::square(1000.0).unwrap();
        let s = SiteSet::new("one", vec![Point::new(0.0, 0.0)], w);
        let opts = BaselineOptions { guard_m: Some(500.0), ..Default::default() };
        assert!(matches!(siteset_outage(&s, &NetworkParams::default(), &opts), Err(Error::InvalidArgument(_))));
        let empty = SiteSet::new("none", vec![], w);
        assert!(matches!(siteset_outage(&empty, &NetworkParams::default(), &opts), Err(Error::EmptySet(_))));
    }

    #[test]
    fn single_site_is_noise_limited() {
        let p = NetworkParams { r_sc: 50.0, c0: 6.0, ..NetworkParams::default() };
        let w = Window::square(4000.0).unwrap();
        let s = SiteSet::new("one", vec![Point::new(0.0, 0.0)], w);
        let opts = BaselineOptions { guard_m: Some(1000.0), grid_step_m: 40.0, realizations: 40, ..Default::default() };
        let r = siteset_outage(&s, &p, &opts).unwrap();
        let sz = p.propagation.sigma_z;
        let snr0 = dbm_to_w(p.sigma_m_sq_dbm) / dbm_to_w(p.sigma_n_sq_dbm);
        let t = p.sinr_threshold();
        let users = w.inner(1000.0).unwrap().grid(40.0);
        let oracle: f64 = users
            .iter()
            .map(|u| {
                let mu = (snr0 * path_gain(u.norm(), &p.propagation)).ln();
                crate::analytic::phi((t.ln() - mu) / sz)
            })
            .sum::<f64>()
            / users.len() as f64;
        assert!(oracle > 0.05 && oracle < 0.95, "{oracle}");
        assert!((r.outage - oracle).abs() < 0.01, "{} vs {oracle}", r.outage);
    }

    #[test]
    fn deterministic_over_threads() {
        let w = Window::square(5000.0).unwrap();
        let s = hex_site_set(1000.0, w).unwrap();
        let opts = BaselineOptions { guard_m: Some(1500.0), grid_step_m: 100.0, realizations: 8, ..Default::default() };
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| siteset_outage(&s, &NetworkParams::default(), &opts).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn rayleigh_exact_matches_draws() {
        let p = NetworkParams {
            propagation: PropagationParams::new(4.0, 0.0, 1.0).unwrap(),
            ..NetworkParams::default()
        };
        let w = Window::square(3000.0).unwrap();
        let s = SiteSet::new("two", vec![Point::new(-500.0, 0.0), Point::new(500.0, 0.0)], w);
        let opts = BaselineOptions {
            guard_m: Some(1400.0),
            grid_step_m: 200.0,
            realizations: 1,
            fading: BaselineFading::RayleighExact,
            ..Default::default()
        };
        let r = siteset_outage(&s, &p, &opts).unwrap();
        let u = Point::new(0.0, 0.0);
        let pw = |x: f64| dbm_to_w(p.sigma_m_sq_dbm) * path_gain(Point::new(x, 0.0).dist(u), &p.propagation);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = p.sinr_threshold();
        let n = 200_000;
        let fails = (0..n)
            .filter(|_| {
                let a = pw(-500.0) * crate::propagation::fading_power(&mut rng);
                let b = pw(500.0) * crate::propagation::fading_power(&mut rng);
                a / (b + dbm_to_w(p.sigma_n_sq_dbm)) < t
            })
            .count();
        assert_eq!(r.users, 1);
        assert!((r.mean_rop - fails as f64 / n as f64).abs() < 0.005);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn ppp_sites_inside_window(d in 1e-7f64..1e-4, side in 100.0f64..3000.0, seed: u64) {
            let w = Window::square(side).unwrap();
            let s = ppp_generate(d, w, seed).unwrap();
            prop_assert!(s.sites.iter().all(|&p| w.contains(p)));
            prop_assert_eq!(s.density, s.len() as f64 / w.area());
        }

        #[test]
        fn sc_count_linear(p in 0.0f64..1.0, s in 1e4f64..1e7, r in 10.0f64..300.0) {
            let n = sc_count_for_area(p, s, r).unwrap() as f64;
            let x = p * s / hexagon_area(r);
            prop_assert!(n >= x && n < x + 1.0);
        }
    }
}
