//! Constant-velocity Kalman filter over a 6-dimensional `[position; velocity]`
//! state with full-state measurements.

use alloc::vec::Vec;

use crate::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat6 = [[f64; 6]; 6];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KinematicState {
    pub position: Vec3,
    pub velocity: Vec3,
}

impl KinematicState {
    pub fn new(position: Vec3, velocity: Vec3) -> Self {
        Self { position, velocity }
    }

    pub fn to_vector(&self) -> [f64; 6] {
        let (p, v) = (self.position, self.velocity);
        [p[0], p[1], p[2], v[0], v[1], v[2]]
    }

    pub fn from_vector(x: &[f64; 6]) -> Self {
        Self { position: [x[0], x[1], x[2]], velocity: [x[3], x[4], x[5]] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Noise model and sampling interval. Standard deviations are per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub dt: f64,
    pub sigma_acc: Vec3,
    pub sigma_gps: Vec3,
    pub sigma_vel: Vec3,
}

impl FilterConfig {
    /// Horizontal axes get the given deviations, the altitude axis none.
    pub fn planar(dt: f64, sigma_acc: f64, sigma_gps: f64, sigma_vel: f64) -> Self {
        Self {
            dt,
            sigma_acc: [sigma_acc, sigma_acc, 0.0],
            sigma_gps: [sigma_gps, sigma_gps, 0.0],
            sigma_vel: [sigma_vel, sigma_vel, 0.0],
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("filter dt must be > 0"));
        }
        let sigmas = self.sigma_acc.iter().chain(&self.sigma_gps).chain(&self.sigma_vel);
        if sigmas.into_iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::invalid("filter standard deviations must be finite and >= 0"));
        }
        Ok(())
    }

    /// Measurement covariance `diag(sigma_gps^2, sigma_vel^2)`.
    pub fn measurement_covariance(&self) -> Mat6 {
        let mut r = zeros();
        for axis in 0..3 {
            r[axis][axis] = self.sigma_gps[axis] * self.sigma_gps[axis];
            r[axis + 3][axis + 3] = self.sigma_vel[axis] * self.sigma_vel[axis];
        }
        r
    }

    /// Process noise: `diag(dt^4/4, dt^2) * sigma_acc^2` per axis.
    pub fn process_noise(&self) -> Mat6 {
        let dt2 = self.dt * self.dt;
        let mut q = zeros();
        for axis in 0..3 {
            let var = self.sigma_acc[axis] * self.sigma_acc[axis];
            q[axis][axis] = 0.25 * dt2 * dt2 * var;
            q[axis + 3][axis + 3] = dt2 * var;
        }
        q
    }
}

/// `[[I, I dt], [0, I]]`.
pub fn transition_matrix(dt: f64) -> Mat6 {
    let mut f = identity();
    for axis in 0..3 {
        f[axis][axis + 3] = dt;
    }
    f
}

/// Input matrix mapping acceleration into the state: `[I dt^2/2; I dt]`.
pub fn control_matrix(dt: f64) -> [[f64; 3]; 6] {
    let mut b = [[0.0; 3]; 6];
    for axis in 0..3 {
        b[axis][axis] = 0.5 * dt * dt;
        b[axis + 3][axis] = dt;
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub z: [f64; 6],
}

impl Measurement {
    pub fn new(position: Vec3, velocity: Vec3) -> Self {
        Self { z: KinematicState::new(position, velocity).to_vector() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub estimate: KinematicState,
    pub covariance: Mat6,
}

impl FilterState {
    /// Prior centred on a measurement with the measurement covariance.
    pub fn from_measurement(z: &Measurement, cfg: &FilterConfig) -> Result<Self> {
        cfg.validate()?;
        if z.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("measurement must be finite"));
        }
        Ok(Self { estimate: KinematicState::from_vector(&z.z), covariance: cfg.measurement_covariance() })
    }

    fn check(&self) -> Result<()> {
        if !self.estimate.is_finite() || self.covariance.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("filter state must be finite"));
        }
        Ok(())
    }
}

/// Time update: `x = F x + B a`, `P = F P F^T + Q`.
pub fn predict(state: &FilterState, accel: Vec3, cfg: &FilterConfig) -> Result<FilterState> {
    cfg.validate()?;
    state.check()?;
    if accel.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("acceleration must be finite"));
    }
    let f = transition_matrix(cfg.dt);
    let b = control_matrix(cfg.dt);
    let x = state.estimate.to_vector();
    let mut next = mat_vec(&f, &x);
    for (row, value) in next.iter_mut().enumerate() {
        *value += (0..3).map(|k| b[row][k] * accel[k]).sum::<f64>();
    }
    let mut p = add(&mat_mul(&mat_mul(&f, &state.covariance), &transpose(&f)), &cfg.process_noise());
    symmetrize(&mut p);
    Ok(FilterState { estimate: KinematicState::from_vector(&next), covariance: p })
}

/// Measurement update with `H = I`.
///
/// Components whose prior and measurement variances are both exactly zero
/// take the measured value: the model calls the measurement exact.
pub fn update(state: &FilterState, z: &Measurement, cfg: &FilterConfig) -> Result<FilterState> {
    cfg.validate()?;
    state.check()?;
    if z.z.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("measurement must be finite"));
    }
    let p = &state.covariance;
    let r = cfg.measurement_covariance();
    let s = add(p, &r);

    if (0..6).any(|i| s[i][i] < 0.0) {
        return Err(Error::NumericalFailure { what: "innovation covariance is indefinite", partial: f64::NAN });
    }
    let active: Vec<usize> = (0..6).filter(|&i| s[i][i] > 0.0).collect();
    let n = active.len();
    let mut s_sub = [[0.0; 6]; 6];
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            s_sub[a][b] = s[i][j];
        }
    }
    let chol = cholesky(&s_sub, n).ok_or(Error::NumericalFailure {
        what: "innovation covariance factorization",
        partial: f64::NAN,
    })?;

    // K = P S^+ restricted to the active components; solve S K^T = P^T row by row.
    let mut gain = zeros();
    for row in 0..6 {
        let mut rhs = [0.0; 6];
        for (a, &j) in active.iter().enumerate() {
            rhs[a] = p[row][j];
        }
        let sol = cholesky_solve(&chol, n, &rhs);
        for (a, &j) in active.iter().enumerate() {
            gain[row][j] = sol[a];
        }
    }

    let x = state.estimate.to_vector();
    let mut innovation = [0.0; 6];
    for i in 0..6 {
        innovation[i] = z.z[i] - x[i];
    }
    let correction = mat_vec(&gain, &innovation);
    let mut posterior = x;
    for i in 0..6 {
        posterior[i] += correction[i];
    }
    for i in (0..6).filter(|&i| s[i][i] == 0.0) {
        posterior[i] = z.z[i];
    }

    // Joseph form keeps P symmetric positive semi-definite.
    let mut i_minus_k = identity();
    for i in 0..6 {
        for j in 0..6 {
            i_minus_k[i][j] -= gain[i][j];
        }
    }
    let left = mat_mul(&mat_mul(&i_minus_k, p), &transpose(&i_minus_k));
    let noise = mat_mul(&mat_mul(&gain, &r), &transpose(&gain));
    let mut cov = add(&left, &noise);
    symmetrize(&mut cov);
    Ok(FilterState { estimate: KinematicState::from_vector(&posterior), covariance: cov })
}

/// Runs the filter over a measurement stream, predicting between samples.
///
/// The prior is built from the first measurement. `accels`, when given,
/// supplies the acceleration applied over each interval (entry `k` drives the
/// prediction into sample `k`); otherwise accelerations are taken as zero.
pub fn estimate_track(
    measurements: &[Measurement],
    cfg: &FilterConfig,
    accels: Option<&[Vec3]>,
) -> Result<Vec<FilterState>> {
    let first = measurements.first().ok_or_else(|| Error::invalid("empty measurement stream"))?;
    if let Some(a) = accels {
        if a.len() != measurements.len() {
            return Err(Error::invalid("acceleration inputs must match the measurement stream length"));
        }
    }
    let mut state = FilterState::from_measurement(first, cfg)?;
    let mut out = Vec::with_capacity(measurements.len());
    for (k, z) in measurements.iter().enumerate() {
        if k > 0 {
            let a = accels.map_or([0.0; 3], |a| a[k]);
            state = predict(&state, a, cfg)?;
        }
        state = update(&state, z, cfg)?;
        out.push(state);
    }
    Ok(out)
}

pub fn trace(m: &Mat6) -> f64 {
    (0..6).map(|i| m[i][i]).sum()
}

fn zeros() -> Mat6 {
    [[0.0; 6]; 6]
}

fn identity() -> Mat6 {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat_mul(a: &Mat6, b: &Mat6) -> Mat6 {
    let mut c = zeros();
    for i in 0..6 {
        for k in 0..6 {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..6 {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn mat_vec(a: &Mat6, x: &[f64; 6]) -> [f64; 6] {
    let mut y = [0.0; 6];
    for i in 0..6 {
        y[i] = (0..6).map(|j| a[i][j] * x[j]).sum();
    }
    y
}

fn transpose(a: &Mat6) -> Mat6 {
    let mut t = zeros();
    for i in 0..6 {
        for j in 0..6 {
            t[j][i] = a[i][j];
        }
    }
    t
}

fn add(a: &Mat6, b: &Mat6) -> Mat6 {
    let mut c = *a;
    for i in 0..6 {
        for j in 0..6 {
            c[i][j] += b[i][j];
        }
    }
    c
}

fn symmetrize(m: &mut Mat6) {
    for i in 0..6 {
        for j in (i + 1)..6 {
            let v = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
}

/// Lower Cholesky factor of the leading `n x n` block.
fn cholesky(a: &Mat6, n: usize) -> Option<Mat6> {
    let mut l = zeros();
    for j in 0..n {
        let mut diag = a[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let d = libm::sqrt(diag);
        l[j][j] = d;
        for i in (j + 1)..n {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / d;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Mat6, n: usize, b: &[f64; 6]) -> [f64; 6] {
    let mut y = [0.0; 6];
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i][k] * y[k];
        }
        y[i] = v / l[i][i];
    }
    let mut x = [0.0; 6];
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l[k][i] * x[k];
        }
        x[i] = v / l[i][i];
    }
    x
}
