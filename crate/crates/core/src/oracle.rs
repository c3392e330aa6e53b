//! Brute-force propagators used to validate the closed forms.
//!
//! Nothing here reuses the closed-form machinery: the semiclassical oracle
//! integrates the lab-frame amplitude equations directly with RK4 (or
//! exponentiates the constant rotating-frame generator), and the manifold
//! oracle builds its own Hamiltonian and diagonalizes it with `nalgebra`.

use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::{JcmParams, SemiclassicalParams, ThreeLevelAmplitudes};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Fixed-step RK4 on the lab-frame equations, with step doubling.
    Rk4,
    /// Exact exponential of the rotating-frame generator.
    SpectralExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Initial RK4 step; halved until step doubling meets `step_tol`.
    pub dt: f64,
    pub method: Method,
    /// Largest allowed change of any sampled amplitude when `dt` is halved.
    pub step_tol: f64,
    pub max_halvings: u32,
    /// Largest allowed drift of `|psi|^2` over the run.
    pub norm_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt: 1e-2, method: Method::Rk4, step_tol: 1e-10, max_halvings: 14, norm_tol: 1e-8 }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64) -> Self {
        IntegratorConfig { dt, ..Default::default() }
    }

    pub fn spectral() -> Self {
        IntegratorConfig { method: Method::SpectralExponential, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.step_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("step_tol must be > 0, got {}", self.step_tol)));
        }
        Ok(())
    }
}

/// Amplitudes at `t_end`, starting from `initial` at `t = 0`.
pub fn integrate_semiclassical(
    params: &SemiclassicalParams,
    initial: &ThreeLevelAmplitudes,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<ThreeLevelAmplitudes> {
    Ok(semiclassical_trajectory(params, initial, &[t_end], cfg)?[0])
}

/// Amplitudes at each of `times` (ascending, non-negative), starting from
/// `initial` at `t = 0`.
pub fn semiclassical_trajectory(
    params: &SemiclassicalParams,
    initial: &ThreeLevelAmplitudes,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<ThreeLevelAmplitudes>> {
    cfg.validate()?;
    check_times(times)?;
    match cfg.method {
        Method::SpectralExponential => Ok(times.iter().map(|&t| rotating_frame_exponential(params, initial, t)).collect()),
        Method::Rk4 => {
            let mut dt = cfg.dt;
            let mut coarse = rk4_trajectory(params, initial, times, dt);
            let mut halvings = 0;
            loop {
                let fine = rk4_trajectory(params, initial, times, dt / 2.0);
                let difference = coarse.iter().zip(&fine).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
                if difference < cfg.step_tol {
                    let n0 = initial.norm_squared();
                    let drift = fine.iter().map(|s| (s.norm_squared() - n0).abs()).fold(0.0, f64::max);
                    if drift > cfg.norm_tol {
                        return Err(Error::StepControl { difference: drift, tol: cfg.norm_tol, dt: dt / 2.0 });
                    }
                    return Ok(fine);
                }
                if halvings == cfg.max_halvings {
                    return Err(Error::StepControl { difference, tol: cfg.step_tol, dt });
                }
                halvings += 1;
                dt /= 2.0;
                coarse = fine;
            }
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !(t.is_finite() && t >= prev) {
            return Err(Error::InvalidParameter(format!("sample times must be finite, >= 0 and ascending; got {t}")));
        }
        prev = t;
    }
    Ok(())
}

// d/dt C = -i H(t) C for the lab-frame Hamiltonian, amplitudes (upper, middle, lower)
fn lab_frame_rhs(params: &SemiclassicalParams, t: f64, c: &[C64; 3]) -> [C64; 3] {
    let coupling = params.omega1 / std::f64::consts::SQRT_2;
    let down = C64::from_polar(coupling, -params.omega * t);
    let up = down.conj();
    [
        -I * (params.omega0 * c[0] + down * c[1]),
        -I * (up * c[0] + down * c[2]),
        -I * (up * c[1] - params.omega0 * c[2]),
    ]
}

fn rk4_step(params: &SemiclassicalParams, t: f64, c: &[C64; 3], h: f64) -> [C64; 3] {
    let axpy = |a: &[C64; 3], s: f64, k: &[C64; 3]| [a[0] + k[0] * s, a[1] + k[1] * s, a[2] + k[2] * s];
    let k1 = lab_frame_rhs(params, t, c);
    let k2 = lab_frame_rhs(params, t + h / 2.0, &axpy(c, h / 2.0, &k1));
    let k3 = lab_frame_rhs(params, t + h / 2.0, &axpy(c, h / 2.0, &k2));
    let k4 = lab_frame_rhs(params, t + h, &axpy(c, h, &k3));
    let mut out = *c;
    for i in 0..3 {
        out[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
    }
    out
}

/// Plain fixed-step RK4 of the lab-frame equations, without step control.
/// Each interval between samples is split into equal steps no longer than
/// `dt`.
pub fn rk4_trajectory(
    params: &SemiclassicalParams,
    initial: &ThreeLevelAmplitudes,
    times: &[f64],
    dt: f64,
) -> Vec<ThreeLevelAmplitudes> {
    let mut c = initial.to_array();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for k in 0..steps {
                c = rk4_step(params, t + k as f64 * h, &c, h);
            }
            t = target;
        }
        out.push(ThreeLevelAmplitudes::from_array(c));
    }
    out
}

/// Exact propagation in the frame rotating at the drive frequency, mapped
/// back to lab-frame amplitudes.
pub fn rotating_frame_exponential(
    params: &SemiclassicalParams,
    initial: &ThreeLevelAmplitudes,
    t: f64,
) -> ThreeLevelAmplitudes {
    let c = params.omega1 / std::f64::consts::SQRT_2;
    let d = params.omega0 - params.omega;
    #[rustfmt::skip]
    let generator = Matrix3::new(
        d,   c,   0.0,
        c,   0.0, c,
        0.0, c,   -d,
    );
    // C+ = e^{-i w t} a+, C0 = a0, C- = e^{i w t} a-, and a(0) = C(0)
    let a = spectral_propagate(&generator, initial.to_array(), t);
    ThreeLevelAmplitudes::new(
        a[0] * C64::from_polar(1.0, -params.omega * t),
        a[1],
        a[2] * C64::from_polar(1.0, params.omega * t),
    )
}

// exp(-i H t) v with H real symmetric
fn spectral_propagate(h: &Matrix3<f64>, v: [C64; 3], t: f64) -> [C64; 3] {
    let eig = SymmetricEigen::new(*h);
    let vecs = eig.eigenvectors;
    let mut out = [C64::new(0.0, 0.0); 3];
    for k in 0..3 {
        let proj: C64 = (0..3).map(|j| v[j] * vecs[(j, k)]).sum();
        let phase = C64::from_polar(1.0, -eig.eigenvalues[k] * t);
        for i in 0..3 {
            out[i] += proj * phase * vecs[(i, k)];
        }
    }
    out
}

/// Manifold evolution under the time-independent interaction Hamiltonian by
/// exact spectral exponential. Amplitudes are in atomic order; the manifold
/// at `n = 0` simply leaves a decoupled upper amplitude to its phase.
pub fn integrate_jcm(params: &JcmParams, initial: &ThreeLevelAmplitudes, t_end: f64) -> ThreeLevelAmplitudes {
    if t_end == 0.0 {
        return *initial;
    }
    let n = f64::from(params.n);
    let a = params.g * (n + 1.0).sqrt();
    let b = params.g * n.sqrt();
    let d = params.delta;
    // basis |n+1,->, |n,0>, |n-1,+>
    #[rustfmt::skip]
    let h = Matrix3::new(
        -d,  a,   0.0,
        a,   0.0, b,
        0.0, b,   d,
    );
    let v = [initial.c_lower, initial.c_middle, initial.c_upper];
    let out = spectral_propagate(&h, v, t_end);
    ThreeLevelAmplitudes::new(out[2], out[1], out[0])
}
