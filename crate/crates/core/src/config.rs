//! Run configuration in flat `key = value` text.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Unknown keys, repeated keys and out-of-range values are errors. Every key
//! is optional and falls back to [`RunConfig::default`].
//!
//! ```text
//! dim         = 2        # torus dimension (even, 2..=8)
//! flux        = 1        # degree of the line bundle on T^2, |flux| <= 8
//! levels      = 12       # Landau levels kept per chirality, 1..=64
//! lambda      = 3        # Fourier cutoff of flat models, 1..=16
//! potential   = 0.15     # amplitude of the periodic test potential, |.| <= 1
//! background  = 0.2,-0.1 # constant flat twist of the magnetic line
//! n_max       = 3        # curvature slots in the Bismut chain, 0..=4
//! max_len     = 4        # longest chain word, 1..=6
//! quad        = exact    # exact | gauss:N | qmc:S
//! samples     = 100000   # Monte Carlo loops, 2..=10^8
//! grid        = 256      # grid points per loop, 2..=65536
//! seed        = 0
//! cases       = 100      # random cases per property, 1..=10^5
//! tol_index   = 1e-3
//! tol_spectral = 1e-8
//! max_stderr  = 0.005
//! z_max       = 3
//! out         = out      # report directory
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::parse_err;
use crate::quadrature::Quadrature;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dim: usize,
    pub flux: i32,
    pub levels: usize,
    pub lambda: i32,
    pub potential: f64,
    pub background: [f64; 2],
    pub n_max: usize,
    pub max_len: usize,
    pub quad: Quadrature,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    pub cases: usize,
    pub tol_index: f64,
    pub tol_spectral: f64,
    pub max_stderr: f64,
    pub z_max: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            flux: 1,
            levels: 12,
            lambda: 3,
            potential: 0.15,
            background: [0.2, -0.1],
            n_max: 3,
            max_len: 4,
            quad: Quadrature::Exact,
            samples: 100_000,
            grid: 256,
            seed: 0,
            cases: 100,
            tol_index: 1e-3,
            tol_spectral: 1e-8,
            max_stderr: 0.005,
            z_max: 3.0,
            out: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 18] = [
    "dim",
    "flux",
    "levels",
    "lambda",
    "potential",
    "background",
    "n_max",
    "max_len",
    "quad",
    "samples",
    "grid",
    "seed",
    "cases",
    "tol_index",
    "tol_spectral",
    "max_stderr",
    "z_max",
    "out",
];

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().or_else(|_| parse_err(line, format!("{key}: cannot parse '{v}'")))
}

fn ranged<T: std::str::FromStr + PartialOrd + std::fmt::Display + Copy>(
    line: usize,
    key: &str,
    v: &str,
    lo: T,
    hi: T,
) -> Result<T> {
    let x: T = num(line, key, v)?;
    if x < lo || x > hi {
        return parse_err(line, format!("{key} = {x} outside [{lo}, {hi}]"));
    }
    Ok(x)
}

fn finite(line: usize, key: &str, v: &str, lo: f64, hi: f64) -> Result<f64> {
    let x: f64 = num(line, key, v)?;
    if !x.is_finite() || x < lo || x > hi {
        return parse_err(line, format!("{key} = {v} outside [{lo}, {hi}]"));
    }
    Ok(x)
}

fn parse_quad(line: usize, v: &str) -> Result<Quadrature> {
    match v.split_once(':') {
        None if v == "exact" => Ok(Quadrature::Exact),
        Some(("gauss", n)) => Ok(Quadrature::Gauss(ranged(line, "quad", n, 1, 64)?)),
        Some(("qmc", n)) => Ok(Quadrature::QuasiMonteCarlo(ranged(line, "quad", n, 1, 10_000_000)?)),
        _ => parse_err(line, format!("quad: expected exact, gauss:N or qmc:S, found '{v}'")),
    }
}

fn format_quad(q: Quadrature) -> String {
    match q {
        Quadrature::Exact => "exact".into(),
        Quadrature::Gauss(n) => format!("gauss:{n}"),
        Quadrature::QuasiMonteCarlo(s) => format!("qmc:{s}"),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut seen = [false; KEYS.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return parse_err(line, "expected key = value");
            };
            let key = key.trim();
            if let Some(slot) = KEYS.iter().position(|k| *k == key) {
                if std::mem::replace(&mut seen[slot], true) {
                    return parse_err(line, format!("repeated key '{key}'"));
                }
            }
            c.set_at(line, key, value.trim())?;
        }
        Ok(c)
    }

    /// Assigns one key from its text form, as a command-line override would.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        self.set_at(0, key, v)
    }

    fn set_at(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        let c = self;
        match key {
            "dim" => {
                c.dim = ranged(line, key, v, 2, 8)?;
                if !c.dim.is_multiple_of(2) {
                    return parse_err(line, "dim must be even");
                }
            }
            "flux" => c.flux = ranged(line, key, v, -8, 8)?,
            "levels" => c.levels = ranged(line, key, v, 1, 64)?,
            "lambda" => c.lambda = ranged(line, key, v, 1, 16)?,
            "potential" => c.potential = finite(line, key, v, -1.0, 1.0)?,
            "background" => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return parse_err(line, "background: expected two comma-separated numbers");
                }
                c.background = [finite(line, key, parts[0], -1e3, 1e3)?, finite(line, key, parts[1], -1e3, 1e3)?];
            }
            "n_max" => c.n_max = ranged(line, key, v, 0, 4)?,
            "max_len" => c.max_len = ranged(line, key, v, 1, 6)?,
            "quad" => c.quad = parse_quad(line, v)?,
            "samples" => c.samples = ranged(line, key, v, 2, 100_000_000)?,
            "grid" => c.grid = ranged(line, key, v, 2, 65_536)?,
            "seed" => c.seed = num(line, key, v)?,
            "cases" => c.cases = ranged(line, key, v, 1, 100_000)?,
            "tol_index" => c.tol_index = finite(line, key, v, 0.0, 1e6)?,
            "tol_spectral" => c.tol_spectral = finite(line, key, v, 0.0, 1e6)?,
            "max_stderr" => c.max_stderr = finite(line, key, v, 0.0, 1e6)?,
            "z_max" => c.z_max = finite(line, key, v, 0.0, 1e6)?,
            "out" => {
                // the text form has no escapes, so these could not round-trip
                if v.is_empty() || v != v.trim() || v.contains(['#', '\n', '\r']) {
                    return parse_err(line, "out: path must be nonempty, without surrounding spaces, '#' or newlines");
                }
                c.out = PathBuf::from(v);
            }
            _ => return parse_err(line, format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Canonical text: every key once, in [`KEYS`] order; `parse` inverts it.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let q = format_quad(self.quad);
        let out = self.out.to_string_lossy();
        let values: [String; KEYS.len()] = [
            self.dim.to_string(),
            self.flux.to_string(),
            self.levels.to_string(),
            self.lambda.to_string(),
            self.potential.to_string(),
            format!("{},{}", self.background[0], self.background[1]),
            self.n_max.to_string(),
            self.max_len.to_string(),
            q,
            self.samples.to_string(),
            self.grid.to_string(),
            self.seed.to_string(),
            self.cases.to_string(),
            self.tol_index.to_string(),
            self.tol_spectral.to_string(),
            self.max_stderr.to_string(),
            self.z_max.to_string(),
            out.into_owned(),
        ];
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the canonical text.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}
