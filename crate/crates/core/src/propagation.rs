//! Distance path loss, block lognormal shadowing and Rayleigh fading.
//!
//! Shadowing values are a pure function of `(seed, transmitter, tile)`:
//!
//! ```text
//! h  = mix64(mix64(mix64(mix64(seed) ^ tx) ^ q) ^ r)     q, r as u32 bit patterns
//! u1 = ((h >> 11) + 0.5) / 2^53,  u2 = ((mix64(h) >> 11) + 0.5) / 2^53
//! L  = sigma_l_db * sqrt(-2 ln u1) * cos(2 pi u2)
//! ```
//!
//! where `mix64` is the SplitMix64 output function. Any implementation that
//! follows these lines regenerates the same field bit for bit.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::lattice::HexTiling;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationParams {
    pub alpha: f64,
    pub sigma_l_db: f64,
    pub r_ref: f64,
    pub sigma_z: f64,
}

impl PropagationParams {
    pub fn new(alpha: f64, sigma_l_db: f64, r_ref: f64) -> Result<Self> {
        if !(alpha > 2.0) {
            return Err(Error::InvalidArgument(format!("alpha must exceed 2, got {alpha}")));
        }
        if !(sigma_l_db >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma_l_db must be non-negative, got {sigma_l_db}"
            )));
        }
        if !(r_ref > 0.0) {
            return Err(Error::InvalidArgument(format!("r_ref must be positive, got {r_ref}")));
        }
        Ok(PropagationParams {
            alpha,
            sigma_l_db,
            r_ref,
            sigma_z: sigma_z(sigma_l_db),
        })
    }

    /// `E[10^(-L/10)]` for the lognormal shadowing term.
    pub fn shadow_mean(&self) -> f64 {
        (0.5 * self.sigma_z * self.sigma_z).exp()
    }
}

impl Default for PropagationParams {
    fn default() -> Self {
        PropagationParams::new(4.0, 4.0, 1.0).expect("valid defaults")
    }
}

/// Natural-log standard deviation of the shadowing gain.
pub fn sigma_z(sigma_l_db: f64) -> f64 {
    0.1 * std::f64::consts::LN_10 * sigma_l_db
}

pub fn pathloss_db(r: f64, params: &PropagationParams) -> f64 {
    10.0 * params.alpha * r.max(params.r_ref).log10()
}

/// Linear path gain `10^(-PL/10)`, computed without the dB round trip.
pub fn path_gain(r: f64, params: &PropagationParams) -> f64 {
    r.max(params.r_ref).powf(-params.alpha)
}

pub fn channel_power(r: f64, shadow_db: f64, fading_power: f64, params: &PropagationParams) -> f64 {
    fading_power * 10f64.powf(-(pathloss_db(r, params) + shadow_db) / 10.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSample {
    pub distance: f64,
    pub shadow_db: f64,
    pub fading_power: f64,
    pub power_linear: f64,
}

impl LinkSample {
    pub fn new(distance: f64, shadow_db: f64, fading_power: f64, params: &PropagationParams) -> Self {
        LinkSample {
            distance,
            shadow_db,
            fading_power,
            power_linear: channel_power(distance, shadow_db, fading_power, params),
        }
    }
}

/// Unit-mean exponential power of a Rayleigh amplitude.
pub fn fading_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into a seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(seed), |h, &p| mix64(h ^ p))
}

fn unit_open(h: u64) -> f64 {
    ((h >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviate for one (transmitter, tile) cell of the field.
pub fn cell_normal(seed: u64, tx: u64, q: i32, r: i32) -> f64 {
    let h = derive_seed(seed, &[tx, q as u32 as u64, r as u32 as u64]);
    let u1 = unit_open(h);
    let u2 = unit_open(mix64(h));
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Shadowing in dB for one (transmitter, tile) cell.
pub fn shadow_db(seed: u64, tx: u64, q: i32, r: i32, sigma_l_db: f64) -> f64 {
    if sigma_l_db == 0.0 {
        0.0
    } else {
        sigma_l_db * cell_normal(seed, tx, q, r)
    }
}

/// Block shadowing realization for a set of transmitters over a tiling.
#[derive(Clone, Debug)]
pub struct ShadowingField {
    pub seed: u64,
    pub tiling: HexTiling,
    pub transmitters: usize,
    values: Vec<f64>,
}

pub fn sample_field(
    seed: u64,
    tiling: &HexTiling,
    transmitters: usize,
    params: &PropagationParams,
) -> Result<ShadowingField> {
    if transmitters == 0 {
        return Err(Error::InvalidArgument("need at least one transmitter".into()));
    }
    let mut values = Vec::with_capacity(transmitters * tiling.len());
    for tx in 0..transmitters {
        for t in &tiling.tiles {
            values.push(shadow_db(seed, tx as u64, t.q, t.r, params.sigma_l_db));
        }
    }
    Ok(ShadowingField {
        seed,
        tiling: tiling.clone(),
        transmitters,
        values,
    })
}

impl ShadowingField {
    /// A field with every value set to zero, for constructing test cases.
    pub fn zeros(seed: u64, tiling: &HexTiling, transmitters: usize) -> Self {
        ShadowingField {
            seed,
            tiling: tiling.clone(),
            transmitters,
            values: vec![0.0; transmitters * tiling.len()],
        }
    }

    pub fn get(&self, tx: usize, tile: usize) -> f64 {
        self.values[tx * self.tiling.len() + tile]
    }

    pub fn set(&mut self, tx: usize, tile: usize, value_db: f64) {
        let n = self.tiling.len();
        self.values[tx * n + tile] = value_db;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Writes `transmitter_id,tile_q,tile_r,value_db` rows. Values use the
    /// shortest representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "transmitter_id,tile_q,tile_r,value_db")?;
        for tx in 0..self.transmitters {
            for (i, t) in self.tiling.tiles.iter().enumerate() {
                writeln!(w, "{},{},{},{}", tx, t.q, t.r, self.get(tx, i))?;
            }
        }
        Ok(())
    }

    /// Reads a table written by [`ShadowingField::write_csv`] over `tiling`.
    pub fn read_csv<R: BufRead>(
        reader: R,
        path: &Path,
        seed: u64,
        tiling: &HexTiling,
        transmitters: usize,
    ) -> Result<Self> {
        let mut field = ShadowingField::zeros(seed, tiling, transmitters);
        let mut seen = vec![false; field.values.len()];
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let lineno = n + 1;
            if n == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(parse_err(lineno, format!("expected 4 columns, got {}", cols.len())));
            }
            let tx: usize = cols[0]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad transmitter id '{}'", cols[0])))?;
            let q: i32 = cols[1]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad tile_q '{}'", cols[1])))?;
            let r: i32 = cols[2]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad tile_r '{}'", cols[2])))?;
            let v: f64 = cols[3]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad value '{}'", cols[3])))?;
            let tile = tiling
                .index_of_axial(q, r)
                .ok_or_else(|| parse_err(lineno, format!("tile ({q}, {r}) not in tiling")))?;
            if tx >= transmitters {
                return Err(parse_err(lineno, format!("transmitter {tx} out of range")));
            }
            field.set(tx, tile, v);
            seen[tx * tiling.len() + tile] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let t = &tiling.tiles[i % tiling.len()];
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                msg: format!("missing value for transmitter {} tile ({}, {})", i / tiling.len(), t.q, t.r),
            });
        }
        Ok(field)
    }
}
