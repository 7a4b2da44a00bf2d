use std::path::Path;

use crate::error::{Error, Result};

use super::grid::{Algorithm, ExperimentGrid};

/// Parses `"600"`, `"200,400,600"` or an inclusive `"200:2000:200"`.
pub fn parse_usize_list(field: &str, text: &str) -> Result<Vec<usize>> {
    let bad = |why: &str| Error::config(field, format!("{why} in {text:?}"));
    let text = text.trim();
    if text.is_empty() {
        return Err(bad("empty list"));
    }
    if text.contains(':') {
        let parts: Vec<usize> = text
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad("bad integer")))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad("expected start:stop:step"));
        };
        if step == 0 || stop < start {
            return Err(bad("empty range"));
        }
        return Ok((start..=stop).step_by(step).collect());
    }
    text.split(',')
        .map(|p| p.trim().parse().map_err(|_| bad("bad integer")))
        .collect()
}

/// Float variant of [`parse_usize_list`]; range points are rounded to 12
/// decimals so `0.1:1.0:0.1` yields `0.1, 0.2, …, 1.0` exactly as written.
pub fn parse_f64_list(field: &str, text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::config(field, format!("{why} in {text:?}"));
    let num = |p: &str| -> Result<f64> {
        let v: f64 = p.trim().parse().map_err(|_| bad("bad number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("non-finite number"))
        }
    };
    let text = text.trim();
    if text.is_empty() {
        return Err(bad("empty list"));
    }
    if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(num).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad("expected start:stop:step"));
        };
        if !(step > 0.0) || stop < start {
            return Err(bad("empty range"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect());
    }
    text.split(',').map(num).collect()
}

/// Optional settings layered over a preset grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub n: Option<usize>,
    pub s: Option<Vec<usize>>,
    pub b: Option<usize>,
    pub k: Option<usize>,
    pub m: Option<Vec<usize>>,
    /// `None` entries are the Gaussian-amplitude baseline.
    pub alpha: Option<Vec<Option<f64>>>,
    pub nsr: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub algo: Option<Algorithm>,
    pub t0: Option<usize>,
    pub inner_iters: Option<usize>,
    pub success_threshold: Option<f64>,
    pub workers: Option<usize>,
    pub preset: Option<String>,
}

fn parse_alpha_list(text: &str) -> Result<Vec<Option<f64>>> {
    text.split(',')
        .map(|p| match p.trim() {
            "normal" | "gaussian" | "none" => Ok(vec![None]),
            other => Ok(parse_f64_list("alpha", other)?
                .into_iter()
                .map(Some)
                .collect()),
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().flatten().collect())
}

fn scalar<T: std::str::FromStr>(field: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("cannot parse {text:?}")))
}

impl ConfigOverrides {
    /// Sets one key from its textual value. Keys use the flag spelling;
    /// underscores and dashes are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.replace('_', "-");
        match key.as_str() {
            "n" => self.n = Some(scalar("n", value)?),
            "s" => self.s = Some(parse_usize_list("s", value)?),
            "b" => self.b = Some(scalar("b", value)?),
            "k" => self.k = Some(scalar("k", value)?),
            "m" => self.m = Some(parse_usize_list("m", value)?),
            "alpha" => self.alpha = Some(parse_alpha_list(value)?),
            "nsr" => self.nsr = Some(parse_f64_list("nsr", value)?),
            "trials" => self.trials = Some(scalar("trials", value)?),
            "seed" | "master-seed" => self.seed = Some(scalar("seed", value)?),
            "algo" | "algorithm" => self.algo = Some(value.parse()?),
            "t0" => self.t0 = Some(scalar("t0", value)?),
            "inner-iters" => self.inner_iters = Some(scalar("inner-iters", value)?),
            "success-threshold" => {
                self.success_threshold = Some(scalar("success-threshold", value)?)
            }
            "workers" => self.workers = Some(scalar("workers", value)?),
            "preset" => self.preset = Some(value.trim().to_string()),
            _ => return Err(Error::config(key, "unknown configuration key")),
        }
        Ok(())
    }

    /// Parses a flat TOML table. Values may be numbers, strings in flag
    /// syntax, or arrays of numbers.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("config", e.message().to_string()))?;
        let mut out = ConfigOverrides::default();
        for (key, value) in &table {
            let text = match value {
                toml::Value::String(s) => s.clone(),
                toml::Value::Integer(i) => i.to_string(),
                toml::Value::Float(f) => f.to_string(),
                toml::Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        toml::Value::Integer(i) => Ok(i.to_string()),
                        toml::Value::Float(f) => Ok(f.to_string()),
                        toml::Value::String(s) => Ok(s.clone()),
                        _ => Err(Error::config(
                            key.as_str(),
                            "arrays hold numbers or strings",
                        )),
                    })
                    .collect::<Result<Vec<_>>>()?
                    .join(","),
                _ => {
                    return Err(Error::config(
                        key.as_str(),
                        "expected a number, string or array",
                    ))
                }
            };
            out.set(key, &text)?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// `self` wins wherever it is set.
    pub fn or(self, fallback: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            n: self.n.or(fallback.n),
            s: self.s.or(fallback.s),
            b: self.b.or(fallback.b),
            k: self.k.or(fallback.k),
            m: self.m.or(fallback.m),
            alpha: self.alpha.or(fallback.alpha),
            nsr: self.nsr.or(fallback.nsr),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            algo: self.algo.or(fallback.algo),
            t0: self.t0.or(fallback.t0),
            inner_iters: self.inner_iters.or(fallback.inner_iters),
            success_threshold: self.success_threshold.or(fallback.success_threshold),
            workers: self.workers.or(fallback.workers),
            preset: self.preset.or(fallback.preset),
        }
    }

    pub fn apply(&self, grid: &mut ExperimentGrid) -> Result<()> {
        if let Some(n) = self.n {
            grid.n = n;
        }
        if let Some(m) = &self.m {
            grid.ms = m.clone();
        }
        if let Some(s) = &self.s {
            grid.ss = s.clone();
        }
        if let Some(alpha) = &self.alpha {
            grid.alphas = alpha.clone();
            if alpha.iter().any(Option::is_some) {
                grid.block_lens = vec![None];
            }
        }
        if let Some(b) = self.b {
            grid.block_lens = vec![if b == 0 { None } else { Some(b) }];
        }
        if let Some(k) = self.k {
            let Some(Some(b)) = grid
                .block_lens
                .first()
                .copied()
                .filter(|_| grid.block_lens.len() == 1)
            else {
                return Err(Error::config("k", "k needs a single block length b"));
            };
            match &self.s {
                Some(s) if s.iter().any(|&s| s != k * b) => {
                    return Err(Error::config("k", format!("s must equal k*b = {}", k * b)));
                }
                _ => grid.ss = vec![k * b],
            }
        }
        if let Some(nsr) = &self.nsr {
            grid.nsrs = nsr.clone();
        }
        if let Some(t) = self.trials {
            grid.trials = t;
        }
        if let Some(seed) = self.seed {
            grid.master_seed = seed;
        }
        if let Some(algo) = self.algo {
            grid.algorithms = vec![algo];
        }
        if let Some(t0) = self.t0 {
            grid.outer_iters = t0;
        }
        if let Some(l) = self.inner_iters {
            grid.inner_iters = l;
        }
        if let Some(th) = self.success_threshold {
            grid.success_threshold = th;
        }
        if let Some(w) = self.workers {
            grid.workers = w;
        }
        grid.validate()
    }
}
