//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k_range: (f64, f64),
    pub d_range: (f64, f64),
    pub grid_counts: (usize, usize),
    /// Interior points of the grid oracle for the supremum.
    pub sup_grid: usize,
    pub ou_k: Vec<f64>,
    pub ou_d: Vec<f64>,
    pub ou_exact_d: Vec<f64>,
    pub ou_m: usize,
    pub circle_n: usize,
    pub circle_radii: Vec<f64>,
    pub circle_a: f64,
    pub sphere_subdivisions: usize,
    pub sphere_heights: Vec<f64>,
    pub weight_shift: f64,
    pub shrinker_circle_points: usize,
    pub al_p: u32,
    pub al_q: u32,
    pub al_points: usize,
    pub soliton_n: usize,
    pub soliton_lambda: f64,
    pub soliton_samples: usize,
    pub soliton_radius: f64,
    pub soliton_seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k_range: (-10.0, 10.0),
            d_range: (0.1, 20.0),
            grid_counts: (50, 50),
            sup_grid: 1_000_000,
            ou_k: vec![-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 5.0],
            ou_d: vec![0.5, 1.0, 2.0, PI, 5.0],
            ou_exact_d: vec![1.0, 2.0, PI, 5.0],
            ou_m: crate::sturm::DEFAULT_CELLS,
            circle_n: 1000,
            circle_radii: vec![1.0, 2.0],
            circle_a: 0.3,
            sphere_subdivisions: 5,
            sphere_heights: vec![0.0, 0.3, 0.5, 0.9],
            weight_shift: 5.0,
            shrinker_circle_points: 1000,
            al_p: 2,
            al_q: 3,
            al_points: 4096,
            soliton_n: 3,
            soliton_lambda: 0.5,
            soliton_samples: 20,
            soliton_radius: 3.0,
            soliton_seed: 7,
            out_dir: PathBuf::from("reports"),
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidInput(format!("cannot parse `{value}` for config key `{key}`"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    match value.trim() {
        "pi" => Ok(PI),
        v => v.parse::<f64>().map_err(|_| bad(key, value)),
    }
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| bad(key, value))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| number(key, v)).collect()
}

fn pair(key: &str, value: &str) -> Result<(f64, f64)> {
    match list(key, value)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(bad(key, value)),
    }
}

impl RunConfig {
    /// Apply one `key = value` setting. Lists are comma-separated; `pi` is accepted.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "k_range" => self.k_range = pair(key, value)?,
            "d_range" => self.d_range = pair(key, value)?,
            "grid_counts" => {
                let (a, b) = pair(key, value)?;
                self.grid_counts = (a as usize, b as usize);
            }
            "sup_grid" => self.sup_grid = integer(key, value)?,
            "ou_k" => self.ou_k = list(key, value)?,
            "ou_d" => self.ou_d = list(key, value)?,
            "ou_exact_d" => self.ou_exact_d = list(key, value)?,
            "ou_m" => self.ou_m = integer(key, value)?,
            "circle_n" => self.circle_n = integer(key, value)?,
            "circle_radii" => self.circle_radii = list(key, value)?,
            "circle_a" => self.circle_a = number(key, value)?,
            "sphere_subdivisions" => self.sphere_subdivisions = integer(key, value)?,
            "sphere_heights" => self.sphere_heights = list(key, value)?,
            "weight_shift" => self.weight_shift = number(key, value)?,
            "shrinker_circle_points" => self.shrinker_circle_points = integer(key, value)?,
            "al_p" => self.al_p = integer(key, value)?,
            "al_q" => self.al_q = integer(key, value)?,
            "al_points" => self.al_points = integer(key, value)?,
            "soliton_n" => self.soliton_n = integer(key, value)?,
            "soliton_lambda" => self.soliton_lambda = number(key, value)?,
            "soliton_samples" => self.soliton_samples = integer(key, value)?,
            "soliton_radius" => self.soliton_radius = number(key, value)?,
            "soliton_seed" => self.soliton_seed = integer(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            _ => return Err(Error::InvalidInput(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parse the flat format: one `key = value` per line, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(&std::fs::read_to_string(path)?)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.k_range.0 <= self.k_range.1) || !(0.0 < self.d_range.0 && self.d_range.0 <= self.d_range.1) {
            return fail(format!("empty range: K {:?}, d {:?}", self.k_range, self.d_range));
        }
        if self.grid_counts.0 == 0 || self.grid_counts.1 == 0 || self.sup_grid == 0 {
            return fail("grid counts must be positive".into());
        }
        if self.ou_k.is_empty() || self.ou_d.is_empty() || self.ou_d.iter().chain(&self.ou_exact_d).any(|&d| d <= 0.0) {
            return fail("OU grid needs nonempty K and positive d lists".into());
        }
        if self.ou_m < 8 {
            return fail(format!("ou_m = {} is below 8", self.ou_m));
        }
        if self.circle_n < 8 || self.circle_radii.iter().any(|&r| r <= 0.0) {
            return fail("circle needs n >= 8 and positive radii".into());
        }
        if self.sphere_subdivisions > crate::spectral::MAX_SUBDIVISIONS {
            return fail(format!("sphere_subdivisions = {} exceeds 7", self.sphere_subdivisions));
        }
        if self.sphere_heights.iter().any(|a| !(a.abs() < 1.0)) {
            return fail("sphere heights must satisfy |a| < 1".into());
        }
        if self.shrinker_circle_points < 16 || self.al_points < 16 {
            return fail("shrinker curves need at least 16 points".into());
        }
        if self.soliton_n == 0 || !(self.soliton_lambda > 0.0) || !(self.soliton_radius > 0.0) {
            return fail("soliton check needs n >= 1, lambda > 0 and radius > 0".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_file_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nou_m = 400\nou_d = 1, pi\n\nk_range = -1, 1  # trailing\n")
            .unwrap();
        assert_eq!(c.ou_m, 400);
        assert_eq!(c.ou_d, vec![1.0, PI]);
        assert_eq!(c.k_range, (-1.0, 1.0));
        c.validate().unwrap();
    }

    #[test]
    fn rejects_garbage() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nonsense").is_err());
        assert!(c.apply_text("unknown = 1").is_err());
        assert!(c.apply_text("ou_m = many").is_err());
        c.set("ou_m", "4").unwrap();
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.set("sphere_heights", "0.5, 1.2").unwrap();
        assert!(c.validate().is_err());
    }
}
