//! Coherent-state averaging of the manifold populations and collapse/revival
//! diagnostics.
//!
//! The averaged population of a level is `sum_n P_n |C^{(n)}(t)|^2` where
//! `P_n` is the Poisson weight of mean `nbar` and `n` labels the manifold by
//! the photon number of its middle bare state `|n, 0>`.
//!
//! For an upper-level start the `n = 0` manifold has no `|n-1, +>` state. Its
//! weight `e^{-nbar}` is assigned to an atom frozen in the upper level, which
//! keeps the total probability at one without inventing dynamics.

use std::collections::VecDeque;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::jcm::{resonant_populations, JcmCase};
use crate::state::{AtomicLevel, PopulationSeries, Populations, TimeGrid};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Truncated Poisson photon-number distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentField {
    pub nbar: f64,
    /// Largest photon index kept; `weights.len() == truncation + 1`.
    pub truncation: usize,
    pub weights: Vec<f64>,
}

impl CoherentField {
    /// Mass of the omitted tail, `1 - sum(weights)`.
    pub fn tail_mass(&self) -> f64 {
        1.0 - neumaier_sum(self.weights.iter().copied())
    }

    /// Weights up to a fixed `truncation`, with no tail check.
    pub fn with_truncation(nbar: f64, truncation: usize) -> Result<Self> {
        check_nbar(nbar)?;
        Ok(CoherentField { nbar, truncation, weights: poisson_pmf_upto(nbar, truncation) })
    }
}

/// `ceil(nbar + 10 sqrt(nbar)) + 10`.
pub fn default_truncation(nbar: f64) -> usize {
    (nbar + 10.0 * nbar.sqrt()).ceil() as usize + 10
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean photon number must be finite and >= 0, got {nbar}")));
    }
    Ok(())
}

// P_n = exp(n ln nbar - nbar - ln n!), evaluated in log space
fn poisson_pmf_upto(nbar: f64, n_max: usize) -> Vec<f64> {
    if nbar == 0.0 {
        let mut w = vec![0.0; n_max + 1];
        w[0] = 1.0;
        return w;
    }
    let ln_nbar = nbar.ln();
    (0..=n_max)
        .map(|n| {
            let n = n as f64;
            (n * ln_nbar - nbar - ln_gamma(n + 1.0)).exp()
        })
        .collect()
}

/// Poisson weights of mean `nbar`, truncated once the omitted tail mass is
/// below `tail_tol`.
pub fn poisson_weights(nbar: f64, tail_tol: f64) -> Result<CoherentField> {
    check_nbar(nbar)?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
    }
    if nbar == 0.0 {
        return Ok(CoherentField { nbar, truncation: 0, weights: vec![1.0] });
    }
    let mut n_max = default_truncation(nbar);
    let step = (nbar.sqrt().ceil() as usize).max(10);
    let limit = n_max * 4 + 1000;
    loop {
        let field = CoherentField { nbar, truncation: n_max, weights: poisson_pmf_upto(nbar, n_max) };
        let tail = field.tail_mass();
        if tail < tail_tol {
            return Ok(field);
        }
        if n_max >= limit {
            return Err(Error::Truncation { tail, tol: tail_tol, n_max });
        }
        n_max += step;
    }
}

/// Neumaier compensated sum, accumulated in iteration order.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

// the field-free upper-level start of the n = 0 manifold
fn manifold_populations(n: usize, g: f64, case: JcmCase, t: f64) -> Populations {
    if case == JcmCase::CaseVI && n == 0 {
        return Populations::new(1.0, 0.0, 0.0);
    }
    let rabi = g * (2.0 * n as f64 + 1.0).sqrt();
    resonant_populations(n as u32, rabi * t, case)
}

/// Poisson-weighted populations at one instant. The sum runs over ascending
/// `n` with compensated accumulation.
pub fn averaged_at(field: &CoherentField, g: f64, case: JcmCase, t: f64) -> Populations {
    let terms = || {
        field
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(move |(n, &w)| (w, manifold_populations(n, g, case, t)))
    };
    Populations::new(
        neumaier_sum(terms().map(|(w, p)| w * p.upper)),
        neumaier_sum(terms().map(|(w, p)| w * p.middle)),
        neumaier_sum(terms().map(|(w, p)| w * p.lower)),
    )
}

/// Coherent-state averaged populations over `grid` for a resonant coupling
/// `g`. `delta` must be zero.
pub fn averaged_populations(
    field: &CoherentField,
    g: f64,
    delta: f64,
    case: JcmCase,
    grid: &TimeGrid,
) -> Result<PopulationSeries> {
    if delta != 0.0 {
        return Err(Error::Domain(format!("coherent averaging needs resonance, got delta = {delta}")));
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter(format!("g must be finite and > 0, got {g}")));
    }
    if field.weights.len() != field.truncation + 1 {
        return Err(Error::InvalidParameter("weights do not match the truncation index".into()));
    }
    // parallel over time points; each point sums over n in a fixed order
    let rows: Vec<(f64, Populations)> = (0..grid.steps)
        .into_par_iter()
        .map(|i| {
            let t = grid.point(i);
            (t, averaged_at(field, g, case, t))
        })
        .collect();
    Ok(PopulationSeries::from_rows(rows))
}

/// `sum_n P_n / (2n + 1)`, the bound on the middle-start asymmetry
/// `|<P+> - <P->|`.
pub fn asymmetry_bound(field: &CoherentField) -> f64 {
    neumaier_sum(field.weights.iter().enumerate().map(|(n, w)| w / (2.0 * n as f64 + 1.0)))
}

/// Nominal Rabi period `2 pi / (g sqrt(2 nbar + 1))`.
pub fn nominal_rabi_period(g: f64, nbar: f64) -> f64 {
    std::f64::consts::TAU / (g * (2.0 * nbar + 1.0).sqrt())
}

/// Leading-order revival time `2 pi sqrt(2 nbar + 1) / g`, the inverse
/// spacing of neighbouring manifold frequencies.
pub fn nominal_revival_time(g: f64, nbar: f64) -> f64 {
    std::f64::consts::TAU * (2.0 * nbar + 1.0).sqrt() / g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalReport {
    /// Level whose column was analysed.
    pub level: AtomicLevel,
    pub collapse_time_estimate: f64,
    pub first_revival_time: f64,
    pub revival_peak_height: f64,
    /// Envelope over the first window, the reference for the thresholds.
    pub initial_amplitude: f64,
}

/// Fraction of the initial envelope below which the oscillation counts as
/// collapsed.
pub const COLLAPSE_FRACTION: f64 = 0.1;

/// Collapse and revival times of the dominant oscillation in `series`.
///
/// The envelope at `t` is `max - min` of a column over `[t, t + window]`;
/// times are reported at window centres. The analysed column is the one with
/// the largest initial envelope. Collapse is the first time the envelope
/// drops below 10% of its initial value; the revival is the largest envelope
/// after that, which must climb back above the same threshold.
pub fn revival_report(series: &PopulationSeries, window: f64) -> Result<RevivalReport> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidParameter(format!("envelope window must be > 0, got {window}")));
    }
    if series.len() < 2 {
        return Err(Error::NoOscillation);
    }
    let dt = series.times[1] - series.times[0];
    let width = ((window / dt).round() as usize).max(1);
    if width >= series.len() {
        return Err(Error::InvalidParameter("series is shorter than one envelope window".into()));
    }

    let (level, envelope) = AtomicLevel::ALL
        .iter()
        .map(|&level| (level, rolling_range(series.column(level), width)))
        .max_by(|a, b| a.1[0].total_cmp(&b.1[0]))
        .expect("three levels");
    let initial_amplitude = envelope[0];
    if initial_amplitude < 1e-9 {
        return Err(Error::NoOscillation);
    }
    let threshold = COLLAPSE_FRACTION * initial_amplitude;
    let centre = |i: usize| series.times[i] + 0.5 * width as f64 * dt;

    let collapse = envelope.iter().position(|&e| e < threshold).ok_or(Error::NoCollapse)?;
    let collapse_time = centre(collapse);
    let (peak, &height) = envelope[collapse..]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, h)| (i + collapse, h))
        .expect("non-empty tail");
    if height < threshold {
        return Err(Error::NoRevival { collapse_time });
    }
    Ok(RevivalReport {
        level,
        collapse_time_estimate: collapse_time,
        first_revival_time: centre(peak),
        revival_peak_height: height,
        initial_amplitude,
    })
}

/// `max - min` over each window `values[i..=i + width]`, for every start
/// index whose window fits.
fn rolling_range(values: &[f64], width: usize) -> Vec<f64> {
    let n_out = values.len() - width;
    let mut max_q: VecDeque<usize> = VecDeque::new();
    let mut min_q: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(n_out);
    for (j, &v) in values.iter().enumerate() {
        while max_q.back().is_some_and(|&k| values[k] <= v) {
            max_q.pop_back();
        }
        max_q.push_back(j);
        while min_q.back().is_some_and(|&k| values[k] >= v) {
            min_q.pop_back();
        }
        min_q.push_back(j);
        if j >= width {
            let start = j - width;
            while max_q.front().is_some_and(|&k| k < start) {
                max_q.pop_front();
            }
            while min_q.front().is_some_and(|&k| k < start) {
                min_q.pop_front();
            }
            out.push(values[max_q[0]] - values[min_q[0]]);
        }
    }
    debug_assert_eq!(out.len(), n_out);
    out
}
