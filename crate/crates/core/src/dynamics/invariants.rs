//! Invariants of each homoclinic trajectory: action, tail prefactors, Jacobian
//! limits, amplitude and delay.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{DynamicsError, Result};
use super::flow::{field8, PhasePoint, Trajectory};
use super::homoclinic::Homoclinic;
use super::ode::single_step;
use super::potential::PotentialSpec;
use crate::numerics::{complex_pow, limit_extrapolate, Extrapolated};
use crate::real::{c, cr, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicDatum<T> {
    pub index: usize,
    pub action_a: T,
    pub amplitude_b: Complex<T>,
    pub time_t: T,
    pub maslov_nu: i32,
    pub g_plus: [T; 2],
    pub g_minus: [T; 2],
    pub m_plus: T,
    pub m_minus: T,
    pub w_integral: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantDiagnostics<T> {
    pub fit_residual: T,
    pub m_plus_error: T,
    pub m_minus_error: T,
    pub collinearity_angle: T,
    pub energy_error: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InvariantOptions<T> {
    /// Outer radius of the tail windows used for fitting and for the Jacobian limits.
    pub r_fit: T,
    /// Inner radius of the tail windows.
    pub r_inner: T,
    pub fit_tol: T,
    /// Relative accuracy of the integration that produced the orbit.
    pub noise_rtol: T,
}

impl<T: Real> Default for InvariantOptions<T> {
    fn default() -> Self {
        Self { r_fit: T::lit(2e-2), r_inner: T::lit(1e-3), fit_tol: T::lit(1e-4), noise_rtol: T::lit(1e-12) }
    }
}

/// `∫ f dt` of a sampled function with its first two derivatives at every node.
fn hermite5<T: Real>(times: &[T], f: &[[T; 3]]) -> T {
    let mut total = T::zero();
    let (c2, c3) = (T::lit(0.1), T::lit(1.0 / 120.0));
    for i in 0..times.len().saturating_sub(1) {
        let h = times[i + 1] - times[i];
        let (a, b) = (f[i], f[i + 1]);
        total += h * T::lit(0.5) * (a[0] + b[0]) + h * h * c2 * (a[1] - b[1]) + h * h * h * c3 * (a[2] + b[2]);
    }
    total
}

fn dot<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

fn mat_vec<T: Real>(m: [[T; 2]; 2], v: [T; 2]) -> [T; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Quadratic-model action of the segment between the origin and `x`.
fn tail_action<T: Real>(spec: &PotentialSpec<T>, x: [T; 2]) -> T {
    (spec.lambda1 * x[0] * x[0] + spec.lambda2 * x[1] * x[1]) / T::lit(4.0)
}

/// `∫ xi · dx` along the sampled orbit plus the two segments inside the first and last node.
pub fn compute_action<T: Real>(spec: &PotentialSpec<T>, traj: &Trajectory<T>) -> T {
    if traj.len() < 2 {
        return T::zero();
    }
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let samples: Vec<[T; 3]> = traj
        .states
        .iter()
        .map(|p| {
            let j = spec.potential_jet(p.x);
            let xi_dot = [-j.g[0], -j.g[1]];
            let xi_ddot = mat_vec(j.h, [-two * p.xi[0], -two * p.xi[1]]);
            [
                two * dot(p.xi, p.xi),
                four * dot(p.xi, xi_dot),
                four * (dot(xi_dot, xi_dot) + dot(p.xi, xi_ddot)),
            ]
        })
        .collect();
    let first = traj.states[0].x;
    let last = traj.states[traj.len() - 1].x;
    hermite5(&traj.times, &samples) + tail_action(spec, first) + tail_action(spec, last)
}

/// `∫ W(x(t)) dt` along the sampled orbit.
pub fn w_integral<T: Real>(spec: &PotentialSpec<T>, traj: &Trajectory<T>) -> T {
    if spec.w_shape.is_none() || traj.len() < 2 {
        return T::zero();
    }
    let two = T::lit(2.0);
    let samples: Vec<[T; 3]> = traj
        .states
        .iter()
        .map(|p| {
            let w = spec.perturbation_jet(p.x);
            let gv = spec.potential_jet(p.x).g;
            let xd = [two * p.xi[0], two * p.xi[1]];
            let xdd = [-two * gv[0], -two * gv[1]];
            [w.v, dot(w.g, xd), dot(xd, mat_vec(w.h, xd)) + dot(w.g, xdd)]
        })
        .collect();
    hermite5(&traj.times, &samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFit<T> {
    pub g_plus: [T; 2],
    pub g_minus: [T; 2],
    pub residual: T,
}

/// Least squares for a tall system by Householder QR on column-scaled data.
fn lstsq<T: Real>(cols: &[Vec<T>], rhs: &[T]) -> Vec<T> {
    let m = rhs.len();
    let n = cols.len();
    let scale: Vec<T> = cols
        .iter()
        .map(|c| {
            let s = c.iter().fold(T::zero(), |a, v| a + *v * *v).sqrt();
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect();
    let mut a: Vec<Vec<T>> = cols.iter().zip(&scale).map(|(c, s)| c.iter().map(|v| *v / *s).collect()).collect();
    let mut b = rhs.to_vec();
    for k in 0..n.min(m) {
        let norm = (k..m).fold(T::zero(), |acc, i| acc + a[k][i] * a[k][i]).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[k][i]).collect();
        v[0] -= alpha;
        let vv = v.iter().fold(T::zero(), |acc, x| acc + *x * *x);
        if vv == T::zero() {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let d = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * col[i]);
            let f = T::lit(2.0) * d / vv;
            for i in k..m {
                col[i] -= f * v[i - k];
            }
        }
        let d = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * b[i]);
        let f = T::lit(2.0) * d / vv;
        for i in k..m {
            b[i] -= f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n.min(m)).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[j][k] * x[j];
        }
        x[k] = if a[k][k] != T::zero() { s / a[k][k] } else { T::zero() };
    }
    x.iter().zip(&scale).map(|(v, s)| *v / *s).collect()
}

/// Fits `x(t) = sum c_j exp(±rate_j (t - t_ref))` per component; returns `(g, sum r^2, sum x^2)`.
fn fit_tail<T: Real>(
    times: &[T],
    xs: &[[T; 2]],
    rates: [&[T]; 2],
    sign: T,
    lambda1: T,
) -> Option<([T; 2], T, T)> {
    let needed = rates[0].len().max(rates[1].len()) + 2;
    if times.len() < needed {
        return None;
    }
    let t_ref = times[times.len() / 2];
    let mut g = [T::zero(); 2];
    let (mut rr, mut xx) = (T::zero(), T::zero());
    for comp in 0..2 {
        let cols: Vec<Vec<T>> = rates[comp]
            .iter()
            .map(|&k| times.iter().map(|&t| (sign * k * (t - t_ref)).exp()).collect())
            .collect();
        let rhs: Vec<T> = xs.iter().map(|x| x[comp]).collect();
        let coef = lstsq(&cols, &rhs);
        for (i, &b) in rhs.iter().enumerate() {
            let model = cols.iter().zip(&coef).fold(T::zero(), |acc, (c, k)| acc + c[i] * *k);
            rr += (b - model) * (b - model);
            xx += b * b;
        }
        g[comp] = coef[0] * (-sign * lambda1 * t_ref).exp();
    }
    Some((g, rr, xx))
}

/// Prefactors of `x(t) ~ g_± exp(±λ₁ t)` on the two tails of `traj`, fitted on nodes with
/// `r_inner <= |x| <= r_fit`.
pub fn fit_g_vectors<T: Real>(spec: &PotentialSpec<T>, traj: &Trajectory<T>, opts: &InvariantOptions<T>) -> Result<GFit<T>> {
    let (l1, l2) = (spec.lambda1, spec.lambda2);
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let r1 = [l1, three * l1, l1 + two * l2];
    let r2 = [l1, l2, l2 + two * l1, three * l2];
    // the returning tail also carries the small departure along the outgoing directions
    let r1m = [l1, three * l1, l1 + two * l2, -l1];
    let r2m = [l1, l2, l2 + two * l1, three * l2, -l2];
    let in_window = |p: &PhasePoint<T>| {
        let r = p.radius();
        r >= opts.r_inner * T::lit(0.999_999) && r <= opts.r_fit
    };
    let lead: Vec<usize> = (0..traj.len()).take_while(|&i| traj.states[i].radius() <= opts.r_fit).filter(|&i| in_window(&traj.states[i])).collect();
    let trail: Vec<usize> = (0..traj.len())
        .rev()
        .take_while(|&i| traj.states[i].radius() <= opts.r_fit)
        .filter(|&i| in_window(&traj.states[i]))
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let pick = |idx: &[usize]| -> (Vec<T>, Vec<[T; 2]>) { (idx.iter().map(|&i| traj.times[i]).collect(), idx.iter().map(|&i| traj.states[i].x).collect()) };
    let too_short = || DynamicsError::TailTooShort { radius: opts.r_fit.to_f64().unwrap_or(f64::NAN) };
    let (tp, xp) = pick(&lead);
    let (tm, xm) = pick(&trail);
    let (gp, rp, sp) = fit_tail(&tp, &xp, [&r1, &r2], T::one(), l1).ok_or_else(too_short)?;
    let (gm, rm, sm) = fit_tail(&tm, &xm, [&r1m, &r2m], -T::one(), l1).ok_or_else(too_short)?;
    let residual = ((rp + rm) / (sp + sm)).sqrt();
    if !(residual <= opts.fit_tol) {
        return Err(DynamicsError::FitResidualTooLarge {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            limit: opts.fit_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(GFit { g_plus: gp, g_minus: gm, residual })
}

/// Angle between `g` and the first basis vector, modulo orientation.
pub fn collinearity_angle<T: Real>(g: [T; 2]) -> T {
    g[1].abs().atan2(g[0].abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLimits<T> {
    pub m_plus: Extrapolated<T>,
    pub m_minus: Extrapolated<T>,
}

/// Flow state and tangent at time `t` within the shot recorded in `h`.
fn state_at<T: Real>(spec: &PotentialSpec<T>, h: &Homoclinic<T>, t: T) -> [T; 8] {
    let times = &h.full.times;
    let i = match times.iter().position(|&s| s > t) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => times.len() - 1,
    };
    let mut y = [T::zero(); 8];
    y[..4].copy_from_slice(&h.full.states[i].to_array());
    y[4..].copy_from_slice(&h.tangents[i].to_array());
    let dt = t - times[i];
    if dt == T::zero() {
        return y;
    }
    let f = field8(spec);
    let n = (dt.abs() / T::lit(2e-3)).ceil().to_usize().unwrap_or(1).max(1);
    let sub = dt / T::from_usize_lossy(n);
    for _ in 0..n {
        y = single_step(&f, &y, sub);
    }
    y
}

fn scaled_det<T: Real>(y: &[T; 8]) -> T {
    let two = T::lit(2.0);
    (two * y[2] * y[5] - two * y[3] * y[4]).abs().sqrt()
}

fn radius8<T: Real>(y: &[T; 8]) -> T {
    y[0].hypot(y[1])
}

/// Limits of the scaled Jacobian determinant of the outgoing-manifold parametrization at
/// both ends of the orbit.
pub fn compute_m_limits<T: Real>(spec: &PotentialSpec<T>, h: &Homoclinic<T>, opts: &InvariantOptions<T>) -> Result<MLimits<T>> {
    let (l1, l2) = (spec.lambda1, spec.lambda2);
    let half = T::lit(0.5);
    let step = T::LN_2() / (T::lit(2.0) * l1);
    let t0 = h.full.times[0];
    let t1 = h.full.times[h.full.len() - 1];
    let noise = T::lit(100.0) * opts.noise_rtol;
    // samples ordered from the outer edge of the tail towards the origin, cut once
    // consecutive values agree to integration accuracy
    let collect = |start: T, dir: T, rate: T| {
        let mut raw: Vec<(T, T)> = Vec::new();
        let mut k = 0i64;
        loop {
            let s = start + dir * step * T::from_i64_lossy(k);
            if s < t0 || s > t1 {
                break;
            }
            let y = state_at(spec, h, s);
            if radius8(&y) > opts.r_fit {
                break;
            }
            raw.push((s, scaled_det(&y) * (-s * rate * half).exp()));
            k += 1;
        }
        raw.reverse();
        let mut out: Vec<(T, T)> = Vec::new();
        for (s, v) in raw {
            let settled = out.len() >= 4 && out.last().is_some_and(|&(_, p)| (v - p).abs() <= noise * v.abs());
            out.push((s, v));
            if settled {
                break;
            }
        }
        out
    };
    let plus = collect(t0, T::one(), l1 + l2);
    let minus = collect(t1, -T::one(), l2 - l1);
    let mut m_plus = limit_extrapolate(&plus)?;
    let mut m_minus = limit_extrapolate(&minus)?;
    // the returning orbit sits off the incoming manifold by the match distance at the link radius
    let link = h.full.states[h.full.len() - 1].radius();
    let offset = if link > T::zero() { h.match_distance / link } else { T::zero() };
    m_plus.error = m_plus.error.max(noise * m_plus.value.abs());
    m_minus.error = m_minus.error.max((noise + offset) * m_minus.value.abs());
    for m in [&m_plus, &m_minus] {
        if !(m.value > T::zero()) {
            return Err(DynamicsError::NonPositive { value: m.value.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok(MLimits { m_plus, m_minus })
}

/// `B = sqrt(λ₁/2π) (M⁺/M⁻) e^{-iπ(ν+1/2)/2} |g₋| (iλ₁|g₊||g₋|)^{-(λ₁+λ₂)/(2λ₁)}`.
pub fn amplitude_b<T: Real>(lambda1: T, lambda2: T, m_plus: T, m_minus: T, nu: i32, g_plus: T, g_minus: T) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let pre = (lambda1 / (T::lit(2.0) * T::PI())).sqrt() * (m_plus / m_minus) * g_minus;
    let phase = -T::FRAC_PI_2() * (T::from_i64_lossy(nu as i64) + half);
    let base = c(T::zero(), lambda1 * g_plus * g_minus);
    let power = complex_pow(base, cr(-(lambda1 + lambda2) / (T::lit(2.0) * lambda1)))?;
    Ok(Complex::from_polar(pre, phase) * power)
}

/// `T = ln(λ₁|g₊||g₋|)/λ₁`.
pub fn delay_t<T: Real>(lambda1: T, g_plus: T, g_minus: T) -> T {
    (lambda1 * g_plus * g_minus).ln() / lambda1
}

fn norm2<T: Real>(g: [T; 2]) -> T {
    g[0].hypot(g[1])
}

pub fn assemble_invariants_with<T: Real>(
    spec: &PotentialSpec<T>,
    homoclinics: &[Homoclinic<T>],
    maslov: &[i32],
    opts: &InvariantOptions<T>,
) -> Result<Vec<(HomoclinicDatum<T>, InvariantDiagnostics<T>)>> {
    if maslov.len() != homoclinics.len() {
        return Err(DynamicsError::MaslovCount { expected: homoclinics.len(), got: maslov.len() });
    }
    homoclinics
        .iter()
        .zip(maslov)
        .enumerate()
        .map(|(i, (h, &nu))| {
            let fit = fit_g_vectors(spec, &h.trajectory, opts)?;
            let m = compute_m_limits(spec, h, opts)?;
            let (gp, gm) = (norm2(fit.g_plus), norm2(fit.g_minus));
            let datum = HomoclinicDatum {
                index: i + 1,
                action_a: compute_action(spec, &h.trajectory),
                amplitude_b: amplitude_b(spec.lambda1, spec.lambda2, m.m_plus.value, m.m_minus.value, nu, gp, gm)?,
                time_t: delay_t(spec.lambda1, gp, gm),
                maslov_nu: nu,
                g_plus: fit.g_plus,
                g_minus: fit.g_minus,
                m_plus: m.m_plus.value,
                m_minus: m.m_minus.value,
                w_integral: w_integral(spec, &h.trajectory),
            };
            let diag = InvariantDiagnostics {
                fit_residual: fit.residual,
                m_plus_error: m.m_plus.error,
                m_minus_error: m.m_minus.error,
                collinearity_angle: collinearity_angle(fit.g_plus).max(collinearity_angle(fit.g_minus)),
                energy_error: h.trajectory.max_energy_error(spec),
            };
            Ok((datum, diag))
        })
        .collect()
}

pub fn assemble_invariants<T: Real>(
    spec: &PotentialSpec<T>,
    homoclinics: &[Homoclinic<T>],
    maslov: &[i32],
    opts: &InvariantOptions<T>,
) -> Result<Vec<HomoclinicDatum<T>>> {
    Ok(assemble_invariants_with(spec, homoclinics, maslov, opts)?.into_iter().map(|(d, _)| d).collect())
}
