//! Sampling the front `(q, r)` of a germ on a float grid.

use std::fmt::Write as _;

use legendre_core::integral_maps::IntegralMap;
use legendre_core::ring::VarKind;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FrontError {
    #[error("fronts are sampled for n <= 2, got n = {0}")]
    TooManyVariables(usize),
    #[error("need at least two samples per direction")]
    TooFewSamples,
    #[error("bad grid `{0}`, expected name=start:end:count")]
    BadGrid(String),
    #[error("no parameter named `{0}`")]
    UnknownParameter(String),
}

/// Values `start, ..., end` at `count` evenly spaced points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(spec: &str) -> Result<Grid, FrontError> {
        let bad = || FrontError::BadGrid(spec.to_string());
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let end = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 {
            return Err(bad());
        }
        Ok(Grid {
            name: name.trim().to_string(),
            start,
            end,
            count,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// Decimal rendering with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0".to_string()
        } else {
            x.to_string()
        };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        return "0".to_string();
    }
    s
}

/// CSV with columns `q1..qn, r` and one column per parameter.  Source
/// directions run over `[-range, range]` with `samples` points each;
/// parameters without a grid are held at zero.
pub fn sample_front(
    f: &IntegralMap,
    samples: usize,
    range: f64,
    grids: &[Grid],
) -> Result<String, FrontError> {
    let n = f.n();
    if n > 2 {
        return Err(FrontError::TooManyVariables(n));
    }
    if samples < 2 {
        return Err(FrontError::TooFewSamples);
    }
    let vars = f.source();
    for g in grids {
        if vars
            .index_of(&g.name)
            .is_none_or(|i| vars.kind(i) != VarKind::Param)
        {
            return Err(FrontError::UnknownParameter(g.name.clone()));
        }
    }
    let dirs = vars.indices_of(VarKind::Source);
    let params = vars.indices_of(VarKind::Param);
    let axis: Vec<f64> = Grid {
        name: String::new(),
        start: -range,
        end: range,
        count: samples,
    }
    .points();
    let param_values: Vec<Vec<f64>> = params
        .iter()
        .map(|&i| {
            grids
                .iter()
                .find(|g| g.name == vars.get(i).name)
                .map(|g| g.points())
                .unwrap_or_else(|| vec![0.0])
        })
        .collect();

    let mut out = String::new();
    let mut header: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    header.push("r".into());
    header.extend(params.iter().map(|&i| vars.get(i).name.clone()));
    writeln!(out, "{}", header.join(",")).unwrap();

    let mut point = vec![0.0; vars.len()];
    let emit = |point: &[f64], out: &mut String| {
        let mut row: Vec<String> = (0..n).map(|i| format_sig(f.q(i).eval_f64(point))).collect();
        row.push(format_sig(f.r().eval_f64(point)));
        row.extend(params.iter().map(|&i| format_sig(point[i])));
        writeln!(out, "{}", row.join(",")).unwrap();
    };
    // parameters vary slowest, then the source directions in order
    let mut param_index = vec![0usize; params.len()];
    loop {
        for (slot, &i) in params.iter().enumerate() {
            point[i] = param_values[slot][param_index[slot]];
        }
        let total = samples.pow(dirs.len() as u32);
        for flat in 0..total {
            let mut rest = flat;
            for &d in dirs.iter().rev() {
                point[d] = axis[rest % samples];
                rest /= samples;
            }
            emit(&point, &mut out);
        }
        // odometer over parameter grids
        let mut slot = params.len();
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            param_index[slot] += 1;
            if param_index[slot] < param_values[slot].len() {
                break;
            }
            param_index[slot] = 0;
        }
    }
}
