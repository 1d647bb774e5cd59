//! Text format for conformally compact data on the 2-hemisphere.
//!
//! ```text
//! # comments start with '#'
//! n = 3
//! t_max = 0.5
//! grid = 5 8              # latitude rows, longitude columns
//! remainder_power = 5     # optional, with remainder_bound
//! remainder_bound = 1.0
//!
//! [h]
//! # one line per grid node, latitude-major:
//! # H11 H12 H13 H22 H23 H33
//! ...
//! [k]                     # optional, same layout
//! ...
//! ```
//!
//! Row `i` sits at polar angle `ψ_i = i·(π/2)/(rows − 1)` from `e_3`, so row 0
//! is the pole and the last row the equator; column `j` at azimuth
//! `φ_j = 2πj/cols`. Components are ambient Cartesian and only their part
//! tangent to the sphere is used. Interpolation is a periodic cubic spline in
//! `φ` followed by a natural cubic spline in `ψ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::conformal::{ConformallyCompactData, Remainder, SphereTensor};
use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sampled tensor on a latitude-longitude grid.
#[derive(Clone, Debug)]
pub struct GridTensor {
    rows: usize,
    /// `[component][row]` periodic splines in the azimuth.
    azimuthal: Vec<Vec<CubicSpline>>,
}

const COMPONENTS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

impl GridTensor {
    /// `samples[row * cols + col]` holds the six upper-triangular components.
    pub fn new(rows: usize, cols: usize, samples: &[[f64; 6]]) -> Result<Self> {
        if rows < 2 || cols < 3 {
            return Err(Error::ConformalData(format!("grid {}x{} is too small (need rows ≥ 2, cols ≥ 3)", rows, cols)));
        }
        if samples.len() != rows * cols {
            return Err(Error::ConformalData(format!("expected {} samples, found {}", rows * cols, samples.len())));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::ConformalData("non-finite sample".into()));
        }
        let azimuthal = (0..6)
            .map(|c| {
                (0..rows)
                    .map(|i| {
                        CubicSpline::periodic(0.0, 2.0 * PI, (0..cols).map(|j| samples[i * cols + j][c]).collect())
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, azimuthal })
    }

    fn eval_f64(&self, omega: [f64; 3]) -> Result<[[f64; 3]; 3]> {
        let psi = omega[2].clamp(-1.0, 1.0).acos();
        let phi = omega[1].atan2(omega[0]);
        let step = FRAC_PI_2 / (self.rows - 1) as f64;
        let mut out = [[0.0; 3]; 3];
        for (c, &(i, j)) in COMPONENTS.iter().enumerate() {
            let col: Vec<f64> = self.azimuthal[c].iter().map(|s| s.eval(phi)).collect();
            let v = CubicSpline::natural(0.0, step, col)?.eval(psi);
            out[i][j] = v;
            out[j][i] = v;
        }
        Ok(out)
    }
}

impl<T: Real> SphereTensor<T> for GridTensor {
    fn dim(&self) -> usize {
        3
    }
    fn value(&self, omega: &DVector<T>) -> Result<DMatrix<T>> {
        if omega.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: omega.len() });
        }
        let m = self.eval_f64([omega[0].to_f64_lossy(), omega[1].to_f64_lossy(), omega[2].to_f64_lossy()])?;
        Ok(DMatrix::from_fn(3, 3, |i, j| T::lit(m[i][j])))
    }
}

/// Parsed contents of a data file.
#[derive(Clone, Debug)]
pub struct ConformalFile {
    pub dim: usize,
    pub t_max: f64,
    pub rows: usize,
    pub cols: usize,
    pub h: Vec<[f64; 6]>,
    pub k: Option<Vec<[f64; 6]>>,
    pub remainder_power: Option<f64>,
    pub remainder_bound: Option<f64>,
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::ConformalData(format!("line {}: {}", line, msg))
}

pub fn parse_conformal_data(text: &str) -> Result<ConformalFile> {
    let mut dim = None;
    let mut t_max = None;
    let mut grid = None;
    let mut power = None;
    let mut bound = None;
    let mut h: Vec<[f64; 6]> = Vec::new();
    let mut k: Option<Vec<[f64; 6]>> = None;
    let mut section = "";
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[h]" => "h",
                "[k]" => {
                    if k.is_some() {
                        return Err(err(ln, "duplicate [k] section"));
                    }
                    k = Some(Vec::new());
                    "k"
                }
                other => return Err(err(ln, format!("unknown section {}", other))),
            };
            continue;
        }
        if section.is_empty() {
            let (key, value) = line.split_once('=').ok_or_else(|| err(ln, "expected key = value"))?;
            let key = key.trim();
            let value = value.trim();
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(ln, format!("{}: {}", key, e)));
            let slot_taken = |taken: bool| if taken { Err(err(ln, format!("duplicate key {}", key))) } else { Ok(()) };
            match key {
                "n" => {
                    slot_taken(dim.is_some())?;
                    dim = Some(value.parse::<usize>().map_err(|e| err(ln, format!("n: {}", e)))?);
                }
                "t_max" => {
                    slot_taken(t_max.is_some())?;
                    t_max = Some(num(value)?);
                }
                "grid" => {
                    slot_taken(grid.is_some())?;
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(err(ln, "grid takes two integers"));
                    }
                    let p = |s: &str| s.parse::<usize>().map_err(|e| err(ln, format!("grid: {}", e)));
                    grid = Some((p(parts[0])?, p(parts[1])?));
                }
                "remainder_power" => {
                    slot_taken(power.is_some())?;
                    power = Some(num(value)?);
                }
                "remainder_bound" => {
                    slot_taken(bound.is_some())?;
                    bound = Some(num(value)?);
                }
                other => return Err(err(ln, format!("unknown key {}", other))),
            }
            continue;
        }
        let vals: Vec<f64> =
            line.split_whitespace().map(|s| s.parse::<f64>().map_err(|e| err(ln, e))).collect::<Result<_>>()?;
        if vals.len() != 6 {
            return Err(err(ln, format!("expected 6 components, found {}", vals.len())));
        }
        let row = [vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]];
        match section {
            "h" => h.push(row),
            _ => k.as_mut().expect("section opened").push(row),
        }
    }
    let dim = dim.ok_or_else(|| Error::ConformalData("missing key n".into()))?;
    if dim != 3 {
        return Err(Error::ConformalData(format!("data files describe n = 3 only, got n = {}", dim)));
    }
    let t_max = t_max.ok_or_else(|| Error::ConformalData("missing key t_max".into()))?;
    let (rows, cols) = grid.ok_or_else(|| Error::ConformalData("missing key grid".into()))?;
    if k.is_some() && (power.is_none() || bound.is_none()) {
        return Err(Error::ConformalData("[k] requires remainder_power and remainder_bound".into()));
    }
    Ok(ConformalFile { dim, t_max, rows, cols, h, k, remainder_power: power, remainder_bound: bound })
}

impl ConformalFile {
    pub fn into_data(self) -> Result<ConformallyCompactData<f64>> {
        let h: Option<Arc<dyn SphereTensor<f64>>> = if self.h.is_empty() || self.h.iter().flatten().all(|v| *v == 0.0) {
            None
        } else {
            Some(Arc::new(GridTensor::new(self.rows, self.cols, &self.h)?))
        };
        let remainder = match self.k {
            Some(k) => Some(Remainder {
                power: self.remainder_power.expect("checked"),
                tensor: Arc::new(GridTensor::new(self.rows, self.cols, &k)?),
                bound: self.remainder_bound.expect("checked"),
            }),
            None => None,
        };
        Ok(ConformallyCompactData { dim: self.dim, t_max: self.t_max, h, remainder })
    }
}

pub fn load_conformal_data(path: &Path) -> Result<ConformallyCompactData<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ConformalData(format!("{}: {}", path.display(), e)))?;
    parse_conformal_data(&text)?.into_data()
}
