//! One excitation manifold of the cascade Jaynes-Cummings model.
//!
//! The interaction Hamiltonian couples the bare product states
//! `|n+1, ->`, `|n, 0>`, `|n-1, +>` (field photon number, atomic level), and
//! matrices in this module use that *manifold order*. Note that it is the
//! reverse of the `(upper, middle, lower)` order of [`ThreeLevelAmplitudes`].
//!
//! At resonance the manifold is diagonalized in closed form by an Euler
//! rotation `T` whose rows are the dressed states for the eigenvalues
//! `(+Omega_n, 0, -Omega_n)`, `Omega_n = g sqrt(2n + 1)`. Detuned manifolds are
//! diagonalized numerically.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, symmetric_eigen, Mat3};
use crate::state::{
    AtomicLevel, JcmParams, PopulationSeries, Populations, ThreeLevelAmplitudes, TimeGrid, DEFAULT_NORM_TOL,
};

/// Initial atom-field condition with the field in a number state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JcmCase {
    /// Atom in the lower level, combined state `|n+1, ->`.
    CaseIV,
    /// Atom in the middle level, combined state `|n, 0>`.
    CaseV,
    /// Atom in the upper level, combined state `|n-1, +>`; needs `n >= 1`.
    CaseVI,
}

impl JcmCase {
    pub const ALL: [JcmCase; 3] = [JcmCase::CaseIV, JcmCase::CaseV, JcmCase::CaseVI];

    pub fn from_initial(level: AtomicLevel) -> Self {
        match level {
            AtomicLevel::Lower => JcmCase::CaseIV,
            AtomicLevel::Middle => JcmCase::CaseV,
            AtomicLevel::Upper => JcmCase::CaseVI,
        }
    }

    pub fn initial_level(self) -> AtomicLevel {
        match self {
            JcmCase::CaseIV => AtomicLevel::Lower,
            JcmCase::CaseV => AtomicLevel::Middle,
            JcmCase::CaseVI => AtomicLevel::Upper,
        }
    }

    fn check_photons(self, n: u32) -> Result<()> {
        if self == JcmCase::CaseVI && n == 0 {
            Err(Error::Domain("an upper-level start needs n >= 1: the bare state |n-1, +> does not exist for n = 0".into()))
        } else {
            Ok(())
        }
    }
}

/// Atomic `(upper, middle, lower)` amplitudes to manifold order.
pub fn to_manifold_order(state: &ThreeLevelAmplitudes) -> [C64; 3] {
    [state.c_lower, state.c_middle, state.c_upper]
}

/// Manifold-order amplitudes back to atomic levels.
pub fn from_manifold_order(c: [C64; 3]) -> ThreeLevelAmplitudes {
    ThreeLevelAmplitudes::new(c[2], c[1], c[0])
}

/// Interaction Hamiltonian of one manifold, in manifold order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldHamiltonian {
    pub matrix: Mat3,
    pub n: u32,
}

pub fn manifold_hamiltonian(params: &JcmParams) -> ManifoldHamiltonian {
    let n = f64::from(params.n);
    let upper_coupling = params.g * (n + 1.0).sqrt();
    let lower_coupling = params.g * n.sqrt();
    let d = params.delta;
    ManifoldHamiltonian {
        matrix: [
            [-d, upper_coupling, 0.0],
            [upper_coupling, 0.0, lower_coupling],
            [0.0, lower_coupling, d],
        ],
        n: params.n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Orthogonal matrix whose rows are the dressed states, together with its
/// Euler angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerMatrix {
    pub entries: Mat3,
    pub angles: EulerAngles,
}

impl EulerMatrix {
    /// Builds the rotation from Euler angles.
    pub fn from_angles(angles: EulerAngles) -> Self {
        let (sps, cps) = angles.psi.sin_cos();
        let (sth, cth) = angles.theta.sin_cos();
        let (sph, cph) = angles.phi.sin_cos();
        let entries = [
            [cps * cph - cth * sph * sps, cps * sph + cth * cph * sps, sps * sth],
            [-sps * cph - cth * sph * cps, -sps * sph + cth * cph * cps, cps * sth],
            [sth * sph, -sth * cph, cth],
        ];
        EulerMatrix { entries, angles }
    }

    /// Reads the Euler angles back out of a proper rotation matrix. The
    /// third row and column fix all three angles.
    pub fn from_entries(entries: Mat3) -> Self {
        let theta = entries[2][2].clamp(-1.0, 1.0).acos();
        let phi = entries[2][0].atan2(-entries[2][1]);
        let psi = entries[0][2].atan2(entries[1][2]);
        EulerMatrix { entries, angles: EulerAngles { psi, theta, phi } }
    }

    /// Matrix rebuilt from the stored angles.
    pub fn reconstruct(&self) -> Mat3 {
        EulerMatrix::from_angles(self.angles).entries
    }

    pub fn transpose(&self) -> Mat3 {
        crate::linalg::transpose(&self.entries)
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.entries)
    }
}

/// Closed-form resonant Euler matrix for manifold `n`.
pub fn euler_matrix(n: u32) -> EulerMatrix {
    let n = f64::from(n);
    let four_n_2 = 4.0 * n + 2.0;
    let two_n_1 = 2.0 * n + 1.0;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let a11 = ((n + 1.0) / four_n_2).sqrt();
    let a13 = (n / four_n_2).sqrt();
    let entries = [
        [a11, h, a13],
        [-(n / two_n_1).sqrt(), 0.0, ((n + 1.0) / two_n_1).sqrt()],
        [a11, -h, a13],
    ];
    // sin(theta) = sqrt((3n+2)/(4n+2)), sin(phi) = sqrt((n+1)/(3n+2)),
    // sin(psi) = sqrt(n/(3n+2)); atan2 keeps full precision near pi/2
    let angles = EulerAngles {
        theta: (3.0 * n + 2.0).sqrt().atan2(n.sqrt()),
        phi: (n + 1.0).sqrt().atan2(two_n_1.sqrt()),
        psi: n.sqrt().atan2((2.0 * n + 2.0).sqrt()),
    };
    EulerMatrix { entries, angles }
}

/// Eigenvalues of one manifold in descending order and the matching dressed
/// states as rows of `t_matrix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSpectrum {
    pub lambda_plus: f64,
    pub lambda_zero: f64,
    pub lambda_minus: f64,
    pub t_matrix: EulerMatrix,
}

impl DressedSpectrum {
    pub fn eigenvalues(&self) -> [f64; 3] {
        [self.lambda_plus, self.lambda_zero, self.lambda_minus]
    }
}

/// Eigen-decomposition of the manifold Hamiltonian.
///
/// At `delta == 0` the closed forms are returned unchanged. Otherwise the
/// matrix is diagonalized numerically and rows are sign-fixed to follow the
/// resonant convention: rows 1 and 3 have a positive first entry, row 2 a
/// positive last entry (falling back to a negative first entry when the last
/// one vanishes).
pub fn dressed_spectrum(params: &JcmParams) -> DressedSpectrum {
    if params.delta == 0.0 {
        let omega_n = params.rabi_frequency();
        return DressedSpectrum {
            lambda_plus: omega_n,
            lambda_zero: 0.0,
            lambda_minus: -omega_n,
            t_matrix: euler_matrix(params.n),
        };
    }

    let h = manifold_hamiltonian(params).matrix;
    let (values, vectors) = symmetric_eigen(&h);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut rows = [[0.0; 3]; 3];
    for (slot, &k) in order.iter().enumerate() {
        rows[slot] = vectors[k];
    }
    let significant = |x: f64| x.abs() > 1e-14;
    for (slot, row) in rows.iter_mut().enumerate() {
        let flip = if slot == 1 {
            if significant(row[2]) {
                row[2] < 0.0
            } else {
                row.iter().copied().find(|&x| significant(x)).is_some_and(|x| x > 0.0)
            }
        } else {
            row.iter().copied().find(|&x| significant(x)).is_some_and(|x| x < 0.0)
        };
        if flip {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }

    DressedSpectrum {
        lambda_plus: values[order[0]],
        lambda_zero: values[order[1]],
        lambda_minus: values[order[2]],
        t_matrix: EulerMatrix::from_entries(rows),
    }
}

/// Closed-form atomic populations for a resonant manifold with the atom
/// starting in a bare level.
pub fn evolve_closed_form(params: &JcmParams, case: JcmCase, t: f64) -> Result<Populations> {
    if params.delta != 0.0 {
        return Err(Error::Domain(format!(
            "closed forms hold only at resonance (delta = {}); use evolve_general",
            params.delta
        )));
    }
    case.check_photons(params.n)?;
    Ok(resonant_populations(params.n, params.rabi_frequency() * t, case))
}

// populations as a function of the accumulated Rabi phase Omega_n t
pub(crate) fn resonant_populations(n: u32, rabi_phase: f64, case: JcmCase) -> Populations {
    let n = f64::from(n);
    let two_n_1 = 2.0 * n + 1.0;
    let denom = two_n_1 * two_n_1;
    let s_half = (rabi_phase / 2.0).sin();
    let c_half = (rabi_phase / 2.0).cos();
    let sin2_half = s_half * s_half;
    let sin_full = rabi_phase.sin();
    let sin2_full = sin_full * sin_full;

    let far = 4.0 * n * (n + 1.0) / denom * sin2_half * sin2_half;
    match case {
        JcmCase::CaseIV => Populations::new(
            far,
            (n + 1.0) / two_n_1 * sin2_full,
            1.0 - 4.0 * (n * (n + 1.0) / denom + (n + 1.0) * (n + 1.0) / denom * c_half * c_half) * sin2_half,
        ),
        JcmCase::CaseV => Populations::new(
            n / two_n_1 * sin2_full,
            rabi_phase.cos().powi(2),
            (n + 1.0) / two_n_1 * sin2_full,
        ),
        JcmCase::CaseVI => Populations::new(
            1.0 - 4.0 * (n * (n + 1.0) / denom + n * n / denom * c_half * c_half) * sin2_half,
            n / two_n_1 * sin2_full,
            far,
        ),
    }
}

/// Propagates arbitrary atomic amplitudes through one manifold with
/// `T^T diag(e^{-i lambda t}) T`.
///
/// At `n = 0` the upper level has no partner state, so a nonzero upper
/// amplitude is rejected.
pub fn evolve_general(params: &JcmParams, initial: &ThreeLevelAmplitudes, t: f64) -> Result<ThreeLevelAmplitudes> {
    initial.ensure_physical(DEFAULT_NORM_TOL)?;
    if params.n == 0 && initial.c_upper.norm_sqr() > 0.0 {
        return Err(Error::Domain("upper-level amplitude needs n >= 1".into()));
    }
    if t == 0.0 {
        return Ok(*initial);
    }
    let spectrum = dressed_spectrum(params);
    Ok(propagate(&spectrum, initial, t))
}

fn propagate(spectrum: &DressedSpectrum, initial: &ThreeLevelAmplitudes, t: f64) -> ThreeLevelAmplitudes {
    let tm = &spectrum.t_matrix.entries;
    let c0 = to_manifold_order(initial);
    // dressed-basis amplitudes, each advanced by its own phase
    let dressed: Vec<C64> = spectrum
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let proj: C64 = (0..3).map(|j| c0[j] * tm[k][j]).sum();
            proj * C64::from_polar(1.0, -lambda * t)
        })
        .collect();
    let mut out = [C64::new(0.0, 0.0); 3];
    for (i, x) in out.iter_mut().enumerate() {
        *x = (0..3).map(|k| dressed[k] * tm[k][i]).sum();
    }
    from_manifold_order(out)
}

/// Closed-form populations on every grid point.
pub fn closed_form_series(params: &JcmParams, case: JcmCase, grid: &TimeGrid) -> Result<PopulationSeries> {
    // validate once up front
    evolve_closed_form(params, case, grid.t_start)?;
    let rows: Vec<(f64, Populations)> = (0..grid.steps)
        .into_par_iter()
        .map(|i| {
            let t = grid.point(i);
            (t, resonant_populations(params.n, params.rabi_frequency() * t, case))
        })
        .collect();
    Ok(PopulationSeries::from_rows(rows))
}

/// Populations from [`evolve_general`] on every grid point.
pub fn general_series(params: &JcmParams, initial: &ThreeLevelAmplitudes, grid: &TimeGrid) -> Result<PopulationSeries> {
    evolve_general(params, initial, 0.0)?;
    let spectrum = dressed_spectrum(params);
    let rows: Vec<(f64, Populations)> = (0..grid.steps)
        .into_par_iter()
        .map(|i| {
            let t = grid.point(i);
            (t, propagate(&spectrum, initial, t).populations())
        })
        .collect();
    Ok(PopulationSeries::from_rows(rows))
}
