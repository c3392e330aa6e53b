//! Domain types shared by every propagator: the bare level basis, the
//! spin-one operators, amplitude triples, parameter sets and sampled
//! population series.
//!
//! Units: ħ = 1 throughout, so every energy is an angular frequency.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_mul, mat_sub, transpose, Mat3};

/// Default tolerance on `| |psi|^2 - 1 |` for a value to count as a physical
/// state.
pub const DEFAULT_NORM_TOL: f64 = 1e-9;

/// One of the three cascade levels. Ordered by the `I_z` eigenvalue, so
/// `Upper > Middle > Lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomicLevel {
    Lower,
    Middle,
    Upper,
}

impl AtomicLevel {
    pub const ALL: [AtomicLevel; 3] = [AtomicLevel::Upper, AtomicLevel::Middle, AtomicLevel::Lower];

    /// Eigenvalue of `I_z` on this level.
    pub fn iz_eigenvalue(self) -> i32 {
        match self {
            AtomicLevel::Upper => 1,
            AtomicLevel::Middle => 0,
            AtomicLevel::Lower => -1,
        }
    }

    /// Row index in the `(upper, middle, lower)` column convention of the
    /// spin-one matrices.
    pub fn index(self) -> usize {
        match self {
            AtomicLevel::Upper => 0,
            AtomicLevel::Middle => 1,
            AtomicLevel::Lower => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AtomicLevel::Upper => "upper",
            AtomicLevel::Middle => "middle",
            AtomicLevel::Lower => "lower",
        }
    }
}

impl fmt::Display for AtomicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AtomicLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "upper" | "+" => Ok(AtomicLevel::Upper),
            "middle" | "0" => Ok(AtomicLevel::Middle),
            "lower" | "-" => Ok(AtomicLevel::Lower),
            other => Err(Error::InvalidParameter(format!("unknown level '{other}'"))),
        }
    }
}

/// Spin-one representation of the SU(2) generators acting on
/// `(|+>, |0>, |->)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOneOps {
    pub i_plus: Mat3,
    pub i_minus: Mat3,
    pub i_z: Mat3,
}

impl SpinOneOps {
    pub fn new() -> Self {
        let i_plus = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]];
        SpinOneOps {
            i_plus,
            i_minus: transpose(&i_plus),
            i_z: [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
        }
    }

    /// `[I+, I-]`. With unit off-diagonal entries in `I+` this is exactly
    /// `I_z`.
    pub fn plus_minus_commutator(&self) -> Mat3 {
        commutator(&self.i_plus, &self.i_minus)
    }

    /// `[I_z, I+]`, which equals `I+`.
    pub fn z_plus_commutator(&self) -> Mat3 {
        commutator(&self.i_z, &self.i_plus)
    }
}

impl Default for SpinOneOps {
    fn default() -> Self {
        Self::new()
    }
}

fn commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

/// Complex amplitudes of the three levels at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelAmplitudes {
    pub c_upper: C64,
    pub c_middle: C64,
    pub c_lower: C64,
}

impl ThreeLevelAmplitudes {
    pub fn new(c_upper: C64, c_middle: C64, c_lower: C64) -> Self {
        ThreeLevelAmplitudes { c_upper, c_middle, c_lower }
    }

    pub fn zero() -> Self {
        Self::from_array([C64::new(0.0, 0.0); 3])
    }

    /// Amplitudes in `(upper, middle, lower)` order.
    pub fn to_array(self) -> [C64; 3] {
        [self.c_upper, self.c_middle, self.c_lower]
    }

    pub fn from_array(c: [C64; 3]) -> Self {
        ThreeLevelAmplitudes { c_upper: c[0], c_middle: c[1], c_lower: c[2] }
    }

    pub fn amplitude(&self, level: AtomicLevel) -> C64 {
        match level {
            AtomicLevel::Upper => self.c_upper,
            AtomicLevel::Middle => self.c_middle,
            AtomicLevel::Lower => self.c_lower,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        norm_squared(self)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        (self.norm_squared() - 1.0).abs() <= tol
    }

    /// Fails with [`Error::NotNormalized`] unless the norm is within `tol` of 1.
    pub fn ensure_physical(&self, tol: f64) -> Result<()> {
        if self.is_physical(tol) {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_squared: self.norm_squared(), tol })
        }
    }

    pub fn populations(&self) -> Populations {
        Populations {
            upper: self.c_upper.norm_sqr(),
            middle: self.c_middle.norm_sqr(),
            lower: self.c_lower.norm_sqr(),
        }
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unit vector of a bare level.
pub fn bare_state(level: AtomicLevel) -> ThreeLevelAmplitudes {
    let mut c = [C64::new(0.0, 0.0); 3];
    c[level.index()] = C64::new(1.0, 0.0);
    ThreeLevelAmplitudes::from_array(c)
}

pub fn norm_squared(state: &ThreeLevelAmplitudes) -> f64 {
    state.c_upper.norm_sqr() + state.c_middle.norm_sqr() + state.c_lower.norm_sqr()
}

/// Occupation probabilities of the three levels at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Populations {
    pub upper: f64,
    pub middle: f64,
    pub lower: f64,
}

impl Populations {
    pub fn new(upper: f64, middle: f64, lower: f64) -> Self {
        Populations { upper, middle, lower }
    }

    pub fn sum(&self) -> f64 {
        self.upper + self.middle + self.lower
    }

    pub fn get(&self, level: AtomicLevel) -> f64 {
        match level {
            AtomicLevel::Upper => self.upper,
            AtomicLevel::Middle => self.middle,
            AtomicLevel::Lower => self.lower,
        }
    }

    pub fn max_abs_diff(&self, other: &Populations) -> f64 {
        (self.upper - other.upper)
            .abs()
            .max((self.middle - other.middle).abs())
            .max((self.lower - other.lower).abs())
    }

    /// Exchange the upper and lower entries.
    pub fn mirrored(&self) -> Populations {
        Populations { upper: self.lower, middle: self.middle, lower: self.upper }
    }
}

/// Atomic gap, drive frequency and coupling of the classically driven atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalParams {
    pub omega0: f64,
    pub omega: f64,
    pub omega1: f64,
}

impl SemiclassicalParams {
    pub fn new(omega0: f64, omega: f64, omega1: f64) -> Result<Self> {
        let p = SemiclassicalParams { omega0, omega, omega1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega0", self.omega0), ("omega", self.omega), ("omega1", self.omega1)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Drive detuning `omega - omega0`.
    pub fn detuning(&self) -> f64 {
        self.omega - self.omega0
    }
}

/// Coupling, detuning and photon number selecting one excitation manifold of
/// the cascade Jaynes-Cummings Hamiltonian.
///
/// `delta` is stored as the angular frequency `omega0 - omega`; `n` is the
/// photon number of the middle bare state `|n, 0>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcmParams {
    pub g: f64,
    pub delta: f64,
    pub n: u32,
}

impl JcmParams {
    pub fn new(g: f64, delta: f64, n: i64) -> Result<Self> {
        if n < 0 {
            return Err(Error::InvalidParameter(format!("photon number must be >= 0, got {n}")));
        }
        let n = u32::try_from(n)
            .map_err(|_| Error::InvalidParameter(format!("photon number {n} is too large")))?;
        let p = JcmParams { g, delta, n };
        p.validate()?;
        Ok(p)
    }

    pub fn resonant(g: f64, n: u32) -> Self {
        JcmParams { g, delta: 0.0, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be finite and > 0, got {}", self.g)));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be finite, got {}", self.delta)));
        }
        Ok(())
    }

    pub fn with_n(self, n: u32) -> Self {
        JcmParams { n, ..self }
    }

    /// Resonant Rabi frequency of the manifold, `g sqrt(2n + 1)`.
    pub fn rabi_frequency(&self) -> f64 {
        self.g * (2.0 * f64::from(self.n) + 1.0).sqrt()
    }
}

/// Uniform sampling of `[t_start, t_end]` with `steps` points.
///
/// A single-step grid is just `t_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_end <= t_start {
            return Err(Error::InvalidParameter(format!(
                "time grid needs finite t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidParameter("time grid needs at least one step".into()));
        }
        Ok(TimeGrid { t_start, t_end, steps })
    }

    pub fn spacing(&self) -> f64 {
        if self.steps < 2 {
            0.0
        } else {
            (self.t_end - self.t_start) / (self.steps - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps && self.steps > 1 {
            self.t_end
        } else {
            self.t_start + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

/// Time grid plus one probability column per level.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub p_upper: Vec<f64>,
    pub p_middle: Vec<f64>,
    pub p_lower: Vec<f64>,
}

impl PopulationSeries {
    pub fn with_capacity(n: usize) -> Self {
        PopulationSeries {
            times: Vec::with_capacity(n),
            p_upper: Vec::with_capacity(n),
            p_middle: Vec::with_capacity(n),
            p_lower: Vec::with_capacity(n),
        }
    }

    pub fn from_rows(rows: impl IntoIterator<Item = (f64, Populations)>) -> Self {
        let mut s = PopulationSeries::default();
        for (t, p) in rows {
            s.push(t, p);
        }
        s
    }

    pub fn push(&mut self, t: f64, p: Populations) {
        self.times.push(t);
        self.p_upper.push(p.upper);
        self.p_middle.push(p.middle);
        self.p_lower.push(p.lower);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row(&self, i: usize) -> Populations {
        Populations::new(self.p_upper[i], self.p_middle[i], self.p_lower[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, Populations)> + '_ {
        (0..self.len()).map(move |i| (self.times[i], self.row(i)))
    }

    pub fn column(&self, level: AtomicLevel) -> &[f64] {
        match level {
            AtomicLevel::Upper => &self.p_upper,
            AtomicLevel::Middle => &self.p_middle,
            AtomicLevel::Lower => &self.p_lower,
        }
    }

    /// Largest `|sum_i p_i - 1|` over all rows.
    pub fn max_normalization_error(&self) -> f64 {
        self.rows().map(|(_, p)| (p.sum() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Largest absolute difference between matching probability entries.
    /// Both series must share the same length.
    pub fn max_abs_diff(&self, other: &PopulationSeries) -> f64 {
        assert_eq!(self.len(), other.len(), "series lengths differ");
        self.rows()
            .zip(other.rows())
            .map(|((_, a), (_, b))| a.max_abs_diff(&b))
            .fold(0.0, f64::max)
    }

    /// Copy with every probability clamped into `[0, 1]`. Only used when
    /// formatting output.
    pub fn clamped(&self) -> PopulationSeries {
        let clamp = |v: &Vec<f64>| v.iter().map(|p| p.clamp(0.0, 1.0)).collect();
        PopulationSeries {
            times: self.times.clone(),
            p_upper: clamp(&self.p_upper),
            p_middle: clamp(&self.p_middle),
            p_lower: clamp(&self.p_lower),
        }
    }
}
