//! Seeded Monte Carlo coverage simulation of the central macrocell with
//! small-cell placement and residual-outage evaluation.
//!
//! Every realization draws its block shadowing from
//! `derive_seed(seed, [realization])`, and fading streams from
//! `derive_seed(seed, [realization, stream])`, so results do not depend on
//! which worker runs which realization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::{dbm_to_w, NetworkParams, Reuse};
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::lattice::{grid_points, hex_tiling, interferer_positions, HexTiling, Point};
use crate::propagation::{derive_seed, fading_power, path_gain, sample_field, ShadowingField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScMode {
    None,
    Isolated,
    Orthogonal,
    Cochannel,
    OrthogonalReuse3,
}

impl ScMode {
    pub const WITH_SCS: [ScMode; 4] = [
        ScMode::Isolated,
        ScMode::Orthogonal,
        ScMode::Cochannel,
        ScMode::OrthogonalReuse3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScMode::None => "none",
            ScMode::Isolated => "isolated",
            ScMode::Orthogonal => "orthogonal",
            ScMode::Cochannel => "cochannel",
            ScMode::OrthogonalReuse3 => "orthogonal_reuse3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => ScMode::None,
            "isolated" => ScMode::Isolated,
            "orthogonal" => ScMode::Orthogonal,
            "cochannel" => ScMode::Cochannel,
            "orthogonal_reuse3" => ScMode::OrthogonalReuse3,
            _ => return Err(Error::InvalidArgument(format!("unknown sc mode '{s}'"))),
        })
    }

    fn stream(self) -> u64 {
        match self {
            ScMode::None => 0,
            ScMode::Isolated => 1,
            ScMode::Orthogonal => 2,
            ScMode::Cochannel => 3,
            ScMode::OrthogonalReuse3 => 4,
        }
    }
}

/// How small-scale fading enters the per-point outage decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FadingModel {
    /// SINR from fading-averaged (unit-mean) powers; ROP is 0 or 1.
    Averaged,
    /// ROP is the fraction of `fading_draws` joint Rayleigh draws in outage.
    Rayleigh,
}

impl FadingModel {
    pub fn name(self) -> &'static str {
        match self {
            FadingModel::Averaged => "averaged",
            FadingModel::Rayleigh => "rayleigh",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "averaged" => Ok(FadingModel::Averaged),
            "rayleigh" => Ok(FadingModel::Rayleigh),
            _ => Err(Error::InvalidArgument(format!("unknown fading model '{s}'"))),
        }
    }
}

/// Tile selection rule for small-cell placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlacementRule {
    /// Select a tile when the BS-only ROP at its centre exceeds eta.
    Center,
    /// Select a tile when more than half of its grid points are in outage.
    Majority,
}

impl PlacementRule {
    pub fn name(self) -> &'static str {
        match self {
            PlacementRule::Center => "center",
            PlacementRule::Majority => "majority",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(PlacementRule::Center),
            "majority" => Ok(PlacementRule::Majority),
            _ => Err(Error::InvalidArgument(format!("unknown placement rule '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub tiers: usize,
    pub grid_step: f64,
    pub fading_draws: usize,
    pub realizations: usize,
    pub seed: u64,
    pub sc_mode: ScMode,
    pub fading: FadingModel,
    pub placement: PlacementRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            params: NetworkParams::default(),
            tiers: 2,
            grid_step: 10.0,
            fading_draws: 500,
            realizations: 200,
            seed: 1,
            sc_mode: ScMode::None,
            fading: FadingModel::Averaged,
            placement: PlacementRule::Center,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.grid_step > 0.0) {
            return Err(Error::InvalidArgument(format!("grid_step must be positive, got {}", self.grid_step)));
        }
        if self.fading_draws < 100 {
            return Err(Error::InvalidArgument(format!(
                "fading_draws must be at least 100, got {}",
                self.fading_draws
            )));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidArgument("realizations must be at least 1".into()));
        }
        if self.tiers == 0 {
            return Err(Error::InvalidArgument("tiers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageMap {
    pub points: Vec<Point>,
    /// Serving transmitter: sites are `0..n_bs`, the small cell in tile `t`
    /// is `n_bs + t`.
    pub serving: Vec<u32>,
    pub rop: Vec<f64>,
    pub se: Vec<f64>,
    pub outage: Vec<bool>,
    pub n_bs: u32,
}

impl CoverageMap {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn outage_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.outage.iter().filter(|&&o| o).count() as f64 / self.points.len() as f64
    }

    pub fn mean_se(&self) -> f64 {
        pairwise_sum(&self.se) / self.se.len().max(1) as f64
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x_m,y_m,serving_id,rop,se_bps_hz,outage_flag")?;
        for i in 0..self.points.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                sig9(self.points[i].x),
                sig9(self.points[i].y),
                self.serving[i],
                sig9(self.rop[i]),
                sig9(self.se[i]),
                u8::from(self.outage[i])
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlacementPlan {
    pub seed: u64,
    pub realization: usize,
    pub rule: PlacementRule,
    /// Indices into the scenario tiling, ascending.
    pub tiles: Vec<usize>,
    pub centers: Vec<Point>,
    pub weights: Vec<f64>,
    pub weighted_count: f64,
}

impl PlacementPlan {
    pub fn write_csv<W: std::io::Write>(&self, tiling: &HexTiling, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tile_index,tile_q,tile_r,x_m,y_m,edge_weight")?;
        for (k, &t) in self.tiles.iter().enumerate() {
            let tile = &tiling.tiles[t];
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t,
                tile.q,
                tile.r,
                sig9(self.centers[k].x),
                sig9(self.centers[k].y),
                sig9(self.weights[k])
            )?;
        }
        Ok(())
    }
}

/// Sum with pairwise splitting, for stable and order-fixed aggregation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0)).sqrt())
}

/// Outcome of one link evaluation.
#[derive(Clone, Copy, Debug)]
struct LinkOutcome {
    rop: f64,
    se: f64,
}

#[derive(Clone, Copy, Debug)]
struct LinkRule {
    threshold: f64,
    gap: f64,
    se_scale: f64,
}

/// Evaluates one point given the mean serving power and interferer powers.
fn evaluate(
    fading: FadingModel,
    draws: usize,
    rule: LinkRule,
    s: f64,
    interferers: &[f64],
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> LinkOutcome {
    match fading {
        FadingModel::Averaged => {
            let sinr = s / (interferers.iter().sum::<f64>() + noise);
            LinkOutcome {
                rop: if sinr < rule.threshold { 1.0 } else { 0.0 },
                se: rule.se_scale * (1.0 + sinr / rule.gap).log2(),
            }
        }
        FadingModel::Rayleigh => {
            let mut fails = 0usize;
            let mut se = 0.0;
            for _ in 0..draws {
                let sig = s * fading_power(rng);
                let int: f64 = interferers.iter().map(|&p| p * fading_power(rng)).sum();
                let sinr = sig / (int + noise);
                if sinr < rule.threshold {
                    fails += 1;
                }
                se += (1.0 + sinr / rule.gap).log2();
            }
            LinkOutcome {
                rop: fails as f64 / draws as f64,
                se: rule.se_scale * se / draws as f64,
            }
        }
    }
}

/// Precomputed geometry shared by all realizations of one configuration.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: SimConfig,
    pub sites: Vec<Point>,
    pub tiling: HexTiling,
    pub points: Vec<Point>,
    pub point_tile: Vec<usize>,
    tile_members: Vec<Vec<usize>>,
    /// Mean received BS power without shadowing, `points × sites`.
    bs_gain: Vec<f64>,
    /// Same at tile centres, `tiles × sites`.
    center_gain: Vec<f64>,
    noise_w: f64,
    sc_w: f64,
}

impl Scenario {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let p = &config.params;
        let sites = interferer_positions(p.r_mc, config.tiers)?.sites_m();
        let tiling = hex_tiling(p.r_mc, p.r_sc)?;
        let points = grid_points(p.r_mc, config.grid_step);
        let mut point_tile = Vec::with_capacity(points.len());
        let mut tile_members = vec![Vec::new(); tiling.len()];
        for (i, &pt) in points.iter().enumerate() {
            let t = tiling.index_of(pt).ok_or_else(|| {
                Error::InvalidArgument(format!("grid point {pt:?} has no tile"))
            })?;
            point_tile.push(t);
            tile_members[t].push(i);
        }
        let bs_w = dbm_to_w(p.sigma_m_sq_dbm);
        let gain_row = |pt: Point| -> Vec<f64> {
            sites
                .iter()
                .map(|s| bs_w * path_gain(s.dist(pt), &p.propagation))
                .collect()
        };
        let bs_gain = points.iter().flat_map(|&pt| gain_row(pt)).collect();
        let center_gain = tiling.tiles.iter().flat_map(|t| gain_row(t.center)).collect();
        Ok(Scenario {
            config: *config,
            sites,
            tiling,
            points,
            point_tile,
            tile_members,
            bs_gain,
            center_gain,
            noise_w: dbm_to_w(p.sigma_n_sq_dbm),
            sc_w: dbm_to_w(p.sigma_sc_sq_dbm),
        })
    }

    pub fn n_bs(&self) -> usize {
        self.sites.len()
    }

    /// Shadowing for all sites and all candidate small cells.
    pub fn field(&self, realization: usize) -> ShadowingField {
        let seed = derive_seed(self.config.seed, &[realization as u64]);
        sample_field(
            seed,
            &self.tiling,
            self.n_bs() + self.tiling.len(),
            &self.config.params.propagation,
        )
        .expect("at least one transmitter")
    }

    fn rng(&self, realization: usize, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(derive_seed(self.config.seed, &[realization as u64, stream]))
    }

    fn macro_rule(&self) -> LinkRule {
        let p = &self.config.params;
        LinkRule {
            threshold: p.macro_threshold(),
            gap: p.gap(),
            se_scale: 1.0 / p.reuse.factor() as f64,
        }
    }

    fn sc_rule(&self) -> LinkRule {
        let p = &self.config.params;
        LinkRule {
            threshold: p.sinr_threshold(),
            gap: p.gap(),
            se_scale: 1.0,
        }
    }

    fn lin(db: f64) -> f64 {
        10f64.powf(-db / 10.0)
    }

    /// Mean BS powers at a location with the given gain row and tile.
    fn bs_powers(&self, gains: &[f64], tile: usize, field: &ShadowingField, out: &mut Vec<f64>) {
        out.clear();
        out.extend(gains.iter().enumerate().map(|(k, g)| g * Self::lin(field.get(k, tile))));
    }

    fn serving(powers: &[f64]) -> usize {
        let mut best = 0;
        for (k, &v) in powers.iter().enumerate() {
            if v > powers[best] {
                best = k;
            }
        }
        best
    }

    /// BS interferers of a macro link: every other site for reuse-1, none
    /// for reuse-7.
    fn macro_interferers(&self, powers: &[f64], serve: usize, out: &mut Vec<f64>) {
        out.clear();
        if self.config.params.reuse == Reuse::One {
            out.extend(powers.iter().enumerate().filter(|&(k, _)| k != serve).map(|(_, &v)| v));
        }
    }

    fn sc_power(&self, sc_tile: usize, at: Point, at_tile: usize, field: &ShadowingField) -> f64 {
        let c = self.tiling.tiles[sc_tile].center;
        self.sc_w
            * path_gain(c.dist(at), &self.config.params.propagation)
            * Self::lin(field.get(self.n_bs() + sc_tile, at_tile))
    }

    /// BS-only coverage map for one realization.
    pub fn outage_map_with(&self, field: &ShadowingField, realization: usize) -> CoverageMap {
        self.bs_map(field, realization, false)
    }

    fn bs_map(&self, field: &ShadowingField, realization: usize, ergodic: bool) -> CoverageMap {
        let model = if ergodic { FadingModel::Rayleigh } else { self.config.fading };
        let mut rng = self.rng(realization, if ergodic { 100 } else { 10 });
        let n = self.n_bs();
        let rule = self.macro_rule();
        let eta = self.config.params.eta;
        let mut powers = Vec::with_capacity(n);
        let mut ints = Vec::with_capacity(n);
        let mut map = self.empty_map();
        for i in 0..self.points.len() {
            self.bs_powers(&self.bs_gain[i * n..(i + 1) * n], self.point_tile[i], field, &mut powers);
            let serve = Self::serving(&powers);
            self.macro_interferers(&powers, serve, &mut ints);
            let o = evaluate(model, self.config.fading_draws, rule, powers[serve], &ints, self.noise_w, &mut rng);
            map.serving.push(serve as u32);
            map.rop.push(o.rop);
            map.se.push(o.se);
            map.outage.push(o.rop > eta);
        }
        map
    }

    fn empty_map(&self) -> CoverageMap {
        let n = self.points.len();
        CoverageMap {
            points: self.points.clone(),
            serving: Vec::with_capacity(n),
            rop: Vec::with_capacity(n),
            se: Vec::with_capacity(n),
            outage: Vec::with_capacity(n),
            n_bs: self.n_bs() as u32,
        }
    }

    /// BS-only ROP at every tile centre.
    pub fn center_rops(&self, field: &ShadowingField, realization: usize) -> Vec<f64> {
        let mut rng = self.rng(realization, 20);
        let n = self.n_bs();
        let rule = self.macro_rule();
        let mut powers = Vec::with_capacity(n);
        let mut ints = Vec::with_capacity(n);
        (0..self.tiling.len())
            .map(|t| {
                self.bs_powers(&self.center_gain[t * n..(t + 1) * n], t, field, &mut powers);
                let serve = Self::serving(&powers);
                self.macro_interferers(&powers, serve, &mut ints);
                evaluate(
                    self.config.fading,
                    self.config.fading_draws,
                    rule,
                    powers[serve],
                    &ints,
                    self.noise_w,
                    &mut rng,
                )
                .rop
            })
            .collect()
    }

    /// Selects small-cell tiles from the BS-only map of the same realization.
    pub fn place_with(&self, field: &ShadowingField, base: &CoverageMap, realization: usize) -> PlacementPlan {
        let eta = self.config.params.eta;
        let selected: Vec<usize> = match self.config.placement {
            PlacementRule::Center => {
                let rops = self.center_rops(field, realization);
                (0..self.tiling.len()).filter(|&t| rops[t] > eta).collect()
            }
            PlacementRule::Majority => (0..self.tiling.len())
                .filter(|&t| {
                    let m = &self.tile_members[t];
                    let out = m.iter().filter(|&&i| base.outage[i]).count();
                    !m.is_empty() && 2 * out > m.len()
                })
                .collect(),
        };
        let weights: Vec<f64> = selected.iter().map(|&t| self.tiling.tiles[t].edge_weight).collect();
        PlacementPlan {
            seed: self.config.seed,
            realization,
            rule: self.config.placement,
            centers: selected.iter().map(|&t| self.tiling.tiles[t].center).collect(),
            weighted_count: weights.iter().sum(),
            weights,
            tiles: selected,
        }
    }

    /// Greedy largest-degree-first 3-colouring of the chosen tiles.
    pub fn reuse3_colors(&self, plan: &PlacementPlan) -> Vec<u8> {
        let k = plan.tiles.len();
        let adj: Vec<Vec<usize>> = (0..k)
            .map(|a| {
                (0..k)
                    .filter(|&b| b != a && self.tiling.adjacent(plan.tiles[a], plan.tiles[b]))
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(a.cmp(&b)));
        let mut color: Vec<Option<u8>> = vec![None; k];
        for &v in &order {
            let mut clashes = [0usize; 3];
            for &u in &adj[v] {
                if let Some(c) = color[u] {
                    clashes[c as usize] += 1;
                }
            }
            let c = (0..3u8)
                .min_by_key(|&c| (clashes[c as usize], c))
                .expect("three colours");
            color[v] = Some(c);
        }
        color.into_iter().map(|c| c.expect("coloured")).collect()
    }

    fn check_plan(&self, plan: &PlacementPlan, realization: usize) -> Result<()> {
        if plan.seed != self.config.seed || plan.realization != realization {
            return Err(Error::InvalidArgument(format!(
                "plan from seed {} realization {} used for seed {} realization {}",
                plan.seed, plan.realization, self.config.seed, realization
            )));
        }
        Ok(())
    }

    /// Coverage after adding the planned small cells under `mode`.
    ///
    /// `base` must be the BS-only map of the same realization; BS-served
    /// points keep its values unless co-channel small cells interfere.
    pub fn residual_with(
        &self,
        field: &ShadowingField,
        base: &CoverageMap,
        plan: &PlacementPlan,
        mode: ScMode,
        realization: usize,
    ) -> Result<(CoverageMap, f64)> {
        self.check_plan(plan, realization)?;
        let map = self.with_scs(field, base, plan, mode, realization, false);
        let frac = map.outage_fraction();
        Ok((map, frac))
    }

    fn with_scs(
        &self,
        field: &ShadowingField,
        base: &CoverageMap,
        plan: &PlacementPlan,
        mode: ScMode,
        realization: usize,
        ergodic: bool,
    ) -> CoverageMap {
        if mode == ScMode::None {
            return if ergodic {
                self.bs_map(field, realization, true)
            } else {
                base.clone()
            };
        }
        let model = if ergodic { FadingModel::Rayleigh } else { self.config.fading };
        let mut rng = self.rng(realization, if ergodic { 200 } else { 30 } + mode.stream());
        let n = self.n_bs();
        let eta = self.config.params.eta;
        let reuse7 = self.config.params.reuse == Reuse::Seven;
        let mut sc_of_tile = vec![None; self.tiling.len()];
        for (k, &t) in plan.tiles.iter().enumerate() {
            sc_of_tile[t] = Some(k);
        }
        let colors = if mode == ScMode::OrthogonalReuse3 {
            self.reuse3_colors(plan)
        } else {
            vec![0; plan.tiles.len()]
        };
        let (macro_rule, sc_rule) = (self.macro_rule(), self.sc_rule());
        let mut powers = Vec::with_capacity(n);
        let mut ints = Vec::with_capacity(n + plan.tiles.len());
        let mut map = self.empty_map();
        for i in 0..self.points.len() {
            let (pt, tile) = (self.points[i], self.point_tile[i]);
            let outcome;
            let serving;
            if let Some(k) = sc_of_tile[tile] {
                serving = n + tile;
                let s = self.sc_power(tile, pt, tile, field);
                ints.clear();
                match mode {
                    ScMode::Isolated | ScMode::None => {}
                    ScMode::Orthogonal | ScMode::OrthogonalReuse3 => {
                        for (j, &t) in plan.tiles.iter().enumerate() {
                            if j != k && colors[j] == colors[k] {
                                ints.push(self.sc_power(t, pt, tile, field));
                            }
                        }
                    }
                    ScMode::Cochannel => {
                        for (j, &t) in plan.tiles.iter().enumerate() {
                            if j != k {
                                ints.push(self.sc_power(t, pt, tile, field));
                            }
                        }
                        self.bs_powers(&self.bs_gain[i * n..(i + 1) * n], tile, field, &mut powers);
                        if reuse7 {
                            ints.push(powers[0]);
                        } else {
                            ints.extend_from_slice(&powers);
                        }
                    }
                }
                outcome = evaluate(model, self.config.fading_draws, sc_rule, s, &ints, self.noise_w, &mut rng);
            } else if mode == ScMode::Cochannel || ergodic {
                self.bs_powers(&self.bs_gain[i * n..(i + 1) * n], tile, field, &mut powers);
                let serve = Self::serving(&powers);
                serving = serve;
                self.macro_interferers(&powers, serve, &mut ints);
                if mode == ScMode::Cochannel && (!reuse7 || serve == 0) {
                    for &t in &plan.tiles {
                        ints.push(self.sc_power(t, pt, tile, field));
                    }
                }
                outcome = evaluate(
                    model,
                    self.config.fading_draws,
                    macro_rule,
                    powers[serve],
                    &ints,
                    self.noise_w,
                    &mut rng,
                );
            } else {
                map.serving.push(base.serving[i]);
                map.rop.push(base.rop[i]);
                map.se.push(base.se[i]);
                map.outage.push(base.outage[i]);
                continue;
            }
            map.serving.push(serving as u32);
            map.rop.push(outcome.rop);
            map.se.push(outcome.se);
            map.outage.push(outcome.rop > eta);
        }
        map
    }

    /// Mean spectral efficiency over `fading_draws` Rayleigh draws per point.
    pub fn ergodic_with(
        &self,
        field: &ShadowingField,
        base: &CoverageMap,
        plan: &PlacementPlan,
        mode: ScMode,
        realization: usize,
    ) -> Result<CoverageMap> {
        self.check_plan(plan, realization)?;
        Ok(self.with_scs(field, base, plan, mode, realization, true))
    }

    /// Outage, placement and every residual mode for one realization.
    pub fn run_realization(&self, realization: usize) -> RealizationResult {
        let field = self.field(realization);
        let base = self.outage_map_with(&field, realization);
        let plan = self.place_with(&field, &base, realization);
        let mut residual = [0.0; 4];
        for (k, mode) in ScMode::WITH_SCS.iter().enumerate() {
            residual[k] = self
                .with_scs(&field, &base, &plan, *mode, realization, false)
                .outage_fraction();
        }
        RealizationResult {
            realization,
            outage: base.outage_fraction(),
            weighted_count: plan.weighted_count,
            residual,
        }
    }

    /// Outage, placement and the residual of one mode for one realization.
    pub fn run_mode(&self, realization: usize, mode: ScMode) -> RealizationResult {
        let field = self.field(realization);
        let base = self.outage_map_with(&field, realization);
        let plan = self.place_with(&field, &base, realization);
        let mut residual = [f64::NAN; 4];
        if let Some(k) = ScMode::WITH_SCS.iter().position(|&m| m == mode) {
            residual[k] = self
                .with_scs(&field, &base, &plan, mode, realization, false)
                .outage_fraction();
        }
        RealizationResult {
            realization,
            outage: base.outage_fraction(),
            weighted_count: plan.weighted_count,
            residual,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizationResult {
    pub realization: usize,
    pub outage: f64,
    pub weighted_count: f64,
    /// Residual fraction per mode in [`ScMode::WITH_SCS`] order (NaN when
    /// not evaluated).
    pub residual: [f64; 4],
}

pub fn outage_map(config: &SimConfig, realization: usize) -> Result<CoverageMap> {
    let s = Scenario::new(config)?;
    Ok(s.outage_map_with(&s.field(realization), realization))
}

pub fn place_scs(config: &SimConfig, realization: usize) -> Result<PlacementPlan> {
    let s = Scenario::new(config)?;
    let field = s.field(realization);
    let base = s.outage_map_with(&field, realization);
    Ok(s.place_with(&field, &base, realization))
}

/// Residual coverage under `config.sc_mode`.
pub fn residual_outage(config: &SimConfig, plan: &PlacementPlan, realization: usize) -> Result<(CoverageMap, f64)> {
    let s = Scenario::new(config)?;
    s.check_plan(plan, realization)?;
    let field = s.field(realization);
    let base = s.outage_map_with(&field, realization);
    s.residual_with(&field, &base, plan, config.sc_mode, realization)
}

pub fn ergodic_rate_map(config: &SimConfig, plan: &PlacementPlan, realization: usize) -> Result<CoverageMap> {
    let s = Scenario::new(config)?;
    s.check_plan(plan, realization)?;
    let field = s.field(realization);
    let base = s.outage_map_with(&field, realization);
    s.ergodic_with(&field, &base, plan, config.sc_mode, realization)
}

/// Runs `f` over all realizations, in parallel, returning results in
/// realization order.
pub fn par_realizations<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub fn simulate(config: &SimConfig) -> Result<Vec<RealizationResult>> {
    let s = Scenario::new(config)?;
    let mode = config.sc_mode;
    Ok(par_realizations(config.realizations, |r| s.run_mode(r, mode)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub config: SimConfig,
    pub outage_mean: f64,
    pub outage_std: f64,
    /// Mean residual per mode in [`ScMode::WITH_SCS`] order.
    pub residual_mean: [f64; 4],
    pub sc_count_mean: f64,
}

impl SweepRow {
    pub const HEADER: &'static str = "alpha,sigma_l_db,c0,reuse,r_mc_m,r_sc_m,realizations,seed,outage_mean,outage_std,\
residual_isolated,residual_orthogonal,residual_cochannel,residual_orthogonal_reuse3,sc_count_mean";

    pub fn csv_row(&self) -> String {
        let p = &self.config.params;
        let mut cols = vec![
            sig9(p.alpha()),
            sig9(p.propagation.sigma_l_db),
            sig9(p.c0),
            p.reuse.factor().to_string(),
            sig9(p.r_mc),
            sig9(p.r_sc),
            self.config.realizations.to_string(),
            self.config.seed.to_string(),
            sig9(self.outage_mean),
            sig9(self.outage_std),
        ];
        cols.extend(self.residual_mean.iter().map(|&v| sig9(v)));
        cols.push(sig9(self.sc_count_mean));
        cols.join(",")
    }
}

pub fn summarize(config: &SimConfig, results: &[RealizationResult]) -> SweepRow {
    let col = |f: &dyn Fn(&RealizationResult) -> f64| -> Vec<f64> { results.iter().map(f).collect() };
    let (outage_mean, outage_std) = mean_std(&col(&|r| r.outage));
    let mut residual_mean = [0.0; 4];
    for (k, slot) in residual_mean.iter_mut().enumerate() {
        *slot = mean_std(&col(&|r| r.residual[k])).0;
    }
    SweepRow {
        config: *config,
        outage_mean,
        outage_std,
        residual_mean,
        sc_count_mean: mean_std(&col(&|r| r.weighted_count)).0,
    }
}

/// Aggregates every configuration over its realizations, all modes included.
pub fn sweep(configs: &[SimConfig]) -> Result<Vec<SweepRow>> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one configuration".into()));
    }
    configs
        .iter()
        .map(|c| {
            let s = Scenario::new(c)?;
            let results = par_realizations(c.realizations, |r| s.run_realization(r));
            Ok(summarize(c, &results))
        })
        .collect()
}
