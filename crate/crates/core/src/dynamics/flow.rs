//! Hamiltonian flow of `p(x, xi) = |xi|^2 + V(x)` and its linearization.

use serde::{Deserialize, Serialize};

use super::error::{DynamicsError, Result};
use super::ode::{Dopri5, OdeOptions};
use super::potential::{symbol, PotentialSpec};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub x: [T; 2],
    pub xi: [T; 2],
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x: [T; 2], xi: [T; 2]) -> Self {
        Self { x, xi }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.x[0], self.x[1], self.xi[0], self.xi[1]]
    }

    pub fn from_slice(s: &[T]) -> Self {
        Self { x: [s[0], s[1]], xi: [s[2], s[3]] }
    }

    pub fn radius(&self) -> T {
        self.x[0].hypot(self.x[1])
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.xi.iter()).all(|v| v.is_finite())
    }
}

/// Sampled solution of Hamilton's equations. `rates[i]` is the field at `states[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<PhasePoint<T>>,
    pub rates: Vec<PhasePoint<T>>,
    pub energy: T,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_error(&self, spec: &PotentialSpec<T>) -> T {
        self.states
            .iter()
            .map(|p| (symbol(spec, p.x, p.xi) - self.energy).abs())
            .fold(T::zero(), T::max)
    }

    /// Reflection `x2 -> -x2`, `xi2 -> -xi2`.
    pub fn mirrored(&self) -> Self {
        let flip = |p: &PhasePoint<T>| PhasePoint::new([p.x[0], -p.x[1]], [p.xi[0], -p.xi[1]]);
        Self {
            times: self.times.clone(),
            states: self.states.iter().map(flip).collect(),
            rates: self.rates.iter().map(flip).collect(),
            energy: self.energy,
        }
    }

    /// Writes `t,x1,x2,xi1,xi2` rows with a header.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x1,x2,xi1,xi2")?;
        for (t, p) in self.times.iter().zip(&self.states) {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", t, p.x[0], p.x[1], p.xi[0], p.xi[1])?;
        }
        Ok(())
    }
}

pub fn hamiltonian_field<T: Real>(spec: &PotentialSpec<T>, p: PhasePoint<T>) -> PhasePoint<T> {
    let g = spec.potential_jet(p.x).g;
    let two = T::lit(2.0);
    PhasePoint::new([two * p.xi[0], two * p.xi[1]], [-g[0], -g[1]])
}

pub(crate) fn field4<T: Real>(spec: &PotentialSpec<T>) -> impl Fn(&[T; 4]) -> [T; 4] + '_ {
    move |y| hamiltonian_field(spec, PhasePoint::from_slice(y)).to_array()
}

/// Flow together with one tangent vector `(dx, dxi)` in components 4..8.
pub(crate) fn field8<T: Real>(spec: &PotentialSpec<T>) -> impl Fn(&[T; 8]) -> [T; 8] + '_ {
    move |y| {
        let j = spec.potential_jet([y[0], y[1]]);
        let two = T::lit(2.0);
        [
            two * y[2],
            two * y[3],
            -j.g[0],
            -j.g[1],
            two * y[6],
            two * y[7],
            -(j.h[0][0] * y[4] + j.h[0][1] * y[5]),
            -(j.h[1][0] * y[4] + j.h[1][1] * y[5]),
        ]
    }
}

/// Jacobian of the field at a point, rows `d(x1', x2', xi1', xi2')`.
pub fn linearization<T: Real>(spec: &PotentialSpec<T>, x: [T; 2]) -> [[T; 4]; 4] {
    let h = spec.potential_jet(x).h;
    let (z, two) = (T::zero(), T::lit(2.0));
    [
        [z, z, two, z],
        [z, z, z, two],
        [-h[0][0], -h[0][1], z, z],
        [-h[1][0], -h[1][1], z, z],
    ]
}

pub(crate) fn flow_options<T: Real>(tol: T) -> OdeOptions<T> {
    OdeOptions { rtol: tol, atol: tol * T::lit(1e-4), ..OdeOptions::default() }
}

/// Integrates from `start` over `t_span` (negative for backward time), recording every accepted step.
pub fn integrate_flow<T: Real>(spec: &PotentialSpec<T>, start: PhasePoint<T>, t_span: T, tol: T) -> Result<Trajectory<T>> {
    integrate_flow_with(spec, start, t_span, flow_options(tol))
}

pub fn integrate_flow_with<T: Real>(
    spec: &PotentialSpec<T>,
    start: PhasePoint<T>,
    t_span: T,
    opts: OdeOptions<T>,
) -> Result<Trajectory<T>> {
    let f = field4(spec);
    let mut solver = Dopri5::new(&f, T::zero(), start.to_array(), t_span >= T::zero(), opts);
    let mut traj = Trajectory {
        times: vec![T::zero()],
        states: vec![start],
        rates: vec![PhasePoint::from_slice(&solver.dy)],
        energy: symbol(spec, start.x, start.xi),
    };
    while solver.t != t_span {
        solver.step(&f, t_span)?;
        traj.times.push(solver.t);
        traj.states.push(PhasePoint::from_slice(&solver.y));
        traj.rates.push(PhasePoint::from_slice(&solver.dy));
    }
    if t_span < T::zero() {
        traj.times.reverse();
        traj.states.reverse();
        traj.rates.reverse();
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldSide {
    /// Outgoing manifold, `xi = grad phi_+`.
    Plus,
    /// Incoming manifold, `xi = grad phi_-`.
    Minus,
}

pub const DEFAULT_SEED_RADIUS: f64 = 1e-4;

/// Point of the quadratic approximation of the stable/unstable manifold above `offset`.
pub fn local_manifold_seed<T: Real>(
    spec: &PotentialSpec<T>,
    side: ManifoldSide,
    offset: [T; 2],
    seed_radius: T,
) -> Result<PhasePoint<T>> {
    let norm = offset[0].hypot(offset[1]);
    if !(norm <= seed_radius) {
        return Err(DynamicsError::OffsetTooLarge {
            norm: norm.to_f64().unwrap_or(f64::NAN),
            limit: seed_radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    let s = match side {
        ManifoldSide::Plus => T::one(),
        ManifoldSide::Minus => -T::one(),
    };
    let half = T::lit(0.5);
    Ok(PhasePoint::new(offset, [s * half * spec.lambda1 * offset[0], s * half * spec.lambda2 * offset[1]]))
}

/// Distance of `p` from the quadratic model of the incoming manifold.
pub fn incoming_mismatch<T: Real>(spec: &PotentialSpec<T>, p: &PhasePoint<T>) -> T {
    let half = T::lit(0.5);
    let d1 = p.xi[0] + half * spec.lambda1 * p.x[0];
    let d2 = p.xi[1] + half * spec.lambda2 * p.x[1];
    d1.hypot(d2)
}
