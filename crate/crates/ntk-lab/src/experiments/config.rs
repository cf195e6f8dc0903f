//! Flat key-value experiment configuration.
//!
//! Grammar, one entry per line, order-insensitive:
//!
//! ```text
//! # comment (also allowed after a value)
//! name = early_stop
//! seed = 1
//! n_list = 128, 256, 512
//! sigma = 0.5
//! ```
//!
//! `name` is required and selects the scenario; every other key falls back
//! to that scenario's default. A repeated key keeps its last value.
//! Unknown keys, malformed numbers, and missing `=` are reported with their
//! line number. Semantic violations (empty lists, probabilities outside
//! `[0, 1]`) are reported as line 0.

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Every knob a scenario reads. Scenarios ignore fields they have no use
/// for; defaults come from [`ExperimentConfig::defaults_for`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    pub sigma: f64,
    pub alpha_list: Vec<f64>,
    pub t_star_c: f64,
    pub corruption_p_list: Vec<f64>,
    pub grid_n: usize,
    pub quad_n: usize,
    pub j_max: usize,
    pub output_dir: PathBuf,
}

/// The scenario names `run` accepts, in documentation order.
pub const SCENARIOS: [&str; 9] = [
    "min_eig",
    "edr",
    "sandwich",
    "interp_gap",
    "early_stop",
    "overfit_floor",
    "uniform_kernel",
    "uniform_function",
    "stopping_rules",
];

impl ExperimentConfig {
    /// Baseline configuration shared by all scenarios before per-scenario
    /// overrides.
    fn base(name: &str) -> ExperimentConfig {
        ExperimentConfig {
            name: name.to_string(),
            seed: 1,
            n_list: vec![128],
            m_list: vec![256],
            sigma: 0.0,
            alpha_list: vec![1.0],
            t_star_c: 1.0,
            corruption_p_list: vec![0.0],
            grid_n: 256,
            quad_n: 2001,
            j_max: 40,
            output_dir: PathBuf::from("out"),
        }
    }

    /// Default configuration for a scenario.
    pub fn defaults_for(name: &str) -> Result<ExperimentConfig> {
        let mut c = Self::base(name);
        match name {
            "min_eig" => {
                c.n_list = vec![8, 16, 32, 64, 128, 256, 512, 1024];
            }
            "edr" => {
                c.alpha_list = vec![1.0, 9.0 / 7.0];
                c.j_max = 40;
                c.grid_n = 2000;
            }
            "sandwich" => {
                c.n_list = vec![32]; // maximum size of each random point set
            }
            "interp_gap" => {
                c.n_list = (1..=10).map(|k| 100 * k).collect();
                c.grid_n = 4096;
            }
            "early_stop" | "overfit_floor" => {
                c.n_list = vec![128, 256, 512, 1024, 2048];
                c.sigma = 0.5;
                c.quad_n = 2001;
            }
            "uniform_kernel" => {
                c.n_list = vec![16];
                c.m_list = vec![64, 256, 1024, 4096];
                c.grid_n = 64;
            }
            "uniform_function" => {
                c.n_list = vec![16];
                c.m_list = vec![256, 4096];
                c.grid_n = 257;
            }
            "stopping_rules" => {
                c.n_list = vec![256];
                c.m_list = vec![2048];
                c.corruption_p_list = vec![0.0, 0.3, 0.6];
            }
            other => return Err(Error::UnknownScenario(other.to_string())),
        }
        Ok(c)
    }

    /// Structural invariants: nonempty lists, probabilities in range,
    /// positive sizes and scales.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::ConfigParse { line: 0, message };
        if self.n_list.is_empty() || self.m_list.is_empty() {
            return Err(bad("n_list and m_list must be nonempty".into()));
        }
        if self.alpha_list.is_empty() || self.corruption_p_list.is_empty() {
            return Err(bad("alpha_list and corruption_p_list must be nonempty".into()));
        }
        for &p in &self.corruption_p_list {
            if !(0.0..=1.0).contains(&p) {
                return Err(bad(format!("corruption probability {p} outside [0, 1]")));
            }
        }
        for &a in &self.alpha_list {
            if !(a >= 1.0) {
                return Err(bad(format!("alpha {a} must be >= 1")));
            }
        }
        if !(self.sigma >= 0.0) {
            return Err(bad(format!("sigma {} must be >= 0", self.sigma)));
        }
        if !(self.t_star_c > 0.0) {
            return Err(bad(format!("t_star_c {} must be > 0", self.t_star_c)));
        }
        if self.grid_n < 2 || self.quad_n < 2 || self.j_max < 1 {
            return Err(bad("grid_n and quad_n must be >= 2, j_max >= 1".into()));
        }
        Ok(())
    }

    /// Renders the configuration in the same flat grammar `parse_config`
    /// reads, so write-then-load round-trips.
    pub fn to_text(&self) -> String {
        let join_usize =
            |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let join_f64 = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        format!(
            "name = {}\nseed = {}\nn_list = {}\nm_list = {}\nsigma = {}\nalpha_list = {}\n\
             t_star_c = {}\ncorruption_p_list = {}\ngrid_n = {}\nquad_n = {}\nj_max = {}\n\
             output_dir = {}\n",
            self.name,
            self.seed,
            join_usize(&self.n_list),
            join_usize(&self.m_list),
            self.sigma,
            join_f64(&self.alpha_list),
            self.t_star_c,
            join_f64(&self.corruption_p_list),
            self.grid_n,
            self.quad_n,
            self.j_max,
            self.output_dir.display(),
        )
    }
}

fn parse_list<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>().map_err(|_| Error::ConfigParse {
                line,
                message: format!("cannot parse `{s}` in {key}"),
            })
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::ConfigParse {
        line,
        message: format!("cannot parse `{}` as {key}", value.trim()),
    })
}

/// Parses the flat key-value grammar. See the module docs for the format.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    // First pass: find the scenario name so defaults can seed the rest.
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        entries.push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    let name = entries
        .iter()
        .rev()
        .find(|(_, k, _)| k == "name")
        .map(|(_, _, v)| v.clone())
        .ok_or_else(|| Error::ConfigParse {
            line: 0,
            message: "missing required key `name`".into(),
        })?;
    let mut cfg = ExperimentConfig::defaults_for(&name)?;
    for (line, key, value) in entries {
        match key.as_str() {
            "name" => cfg.name = value,
            "seed" => cfg.seed = parse_one(&value, line, "seed")?,
            "n_list" => cfg.n_list = parse_list(&value, line, "n_list")?,
            "m_list" => cfg.m_list = parse_list(&value, line, "m_list")?,
            "sigma" => cfg.sigma = parse_one(&value, line, "sigma")?,
            "alpha_list" => cfg.alpha_list = parse_list(&value, line, "alpha_list")?,
            "t_star_c" => cfg.t_star_c = parse_one(&value, line, "t_star_c")?,
            "corruption_p_list" => {
                cfg.corruption_p_list = parse_list(&value, line, "corruption_p_list")?
            }
            "grid_n" => cfg.grid_n = parse_one(&value, line, "grid_n")?,
            "quad_n" => cfg.quad_n = parse_one(&value, line, "quad_n")?,
            "j_max" => cfg.j_max = parse_one(&value, line, "j_max")?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            other => {
                return Err(Error::ConfigParse {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
