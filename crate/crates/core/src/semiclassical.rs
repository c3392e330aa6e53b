//! Closed-form level populations of the cascade atom driven by a classical,
//! monochromatic field in the rotating-wave approximation.
//!
//! The Hamiltonian is `omega0 I_z + (omega1 / sqrt 2) (I+ e^{-i omega t} + h.c.)`.
//! With `delta = omega - omega0` the generalized Rabi frequency is
//! `Omega = sqrt(delta^2 + omega1^2)` and every population is a trigonometric
//! polynomial in `Omega t / 2`.

use rayon::prelude::*;

use crate::state::{AtomicLevel, PopulationSeries, Populations, SemiclassicalParams, TimeGrid};

/// Initial condition of the classically driven atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemiclassicalCase {
    /// Atom starts in the lower level.
    CaseI,
    /// Atom starts in the middle level.
    CaseII,
    /// Atom starts in the upper level.
    CaseIII,
}

impl SemiclassicalCase {
    pub const ALL: [SemiclassicalCase; 3] =
        [SemiclassicalCase::CaseI, SemiclassicalCase::CaseII, SemiclassicalCase::CaseIII];

    pub fn from_initial(level: AtomicLevel) -> Self {
        match level {
            AtomicLevel::Lower => SemiclassicalCase::CaseI,
            AtomicLevel::Middle => SemiclassicalCase::CaseII,
            AtomicLevel::Upper => SemiclassicalCase::CaseIII,
        }
    }

    pub fn initial_level(self) -> AtomicLevel {
        match self {
            SemiclassicalCase::CaseI => AtomicLevel::Lower,
            SemiclassicalCase::CaseII => AtomicLevel::Middle,
            SemiclassicalCase::CaseIII => AtomicLevel::Upper,
        }
    }
}

/// `Omega = sqrt((omega - omega0)^2 + omega1^2)`.
pub fn generalized_rabi(params: &SemiclassicalParams) -> f64 {
    params.detuning().hypot(params.omega1)
}

/// Populations at time `t` for the given initial level.
pub fn populations(params: &SemiclassicalParams, case: SemiclassicalCase, t: f64) -> Populations {
    let big_omega = generalized_rabi(params);
    let delta = params.detuning();
    let w1_sq = params.omega1 * params.omega1;
    let om_sq = big_omega * big_omega;
    let om_4 = om_sq * om_sq;

    let s_half = (big_omega * t / 2.0).sin();
    let sin2_half = s_half * s_half;
    let sin4_half = sin2_half * sin2_half;
    let sin_full = (big_omega * t).sin();
    let cos_full = (big_omega * t).cos();

    // population that leaves the start level for the far end of the ladder
    let far = w1_sq * w1_sq / om_4 * sin4_half;
    // middle level for an edge start, and each edge level for a middle start
    let adjacent = w1_sq / (2.0 * om_4) * (4.0 * delta * delta * sin4_half + om_sq * sin_full * sin_full);
    // population remaining in the edge start level
    let stay_edge = {
        let a = w1_sq * sin2_half + om_sq * cos_full;
        (a * a + delta * delta * om_sq * sin_full * sin_full) / om_4
    };

    match case {
        SemiclassicalCase::CaseI => Populations::new(far, adjacent, stay_edge),
        SemiclassicalCase::CaseII => {
            let d2 = delta * delta;
            let middle = 4.0 * d2 * d2 / om_4 * sin4_half
                + 4.0 * d2 / om_sq * sin2_half * cos_full
                + cos_full * cos_full;
            Populations::new(adjacent, middle, adjacent)
        }
        SemiclassicalCase::CaseIII => Populations::new(stay_edge, adjacent, far),
    }
}

/// `populations` sampled on every point of `grid`.
pub fn population_series(params: &SemiclassicalParams, case: SemiclassicalCase, grid: &TimeGrid) -> PopulationSeries {
    let rows: Vec<(f64, Populations)> = (0..grid.steps)
        .into_par_iter()
        .map(|i| {
            let t = grid.point(i);
            (t, populations(params, case, t))
        })
        .collect();
    PopulationSeries::from_rows(rows)
}
