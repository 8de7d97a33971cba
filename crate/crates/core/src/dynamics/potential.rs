//! The model potential `V = V1(x1) V2(x2) + V_ref(x)` and the perturbation `W`.

use serde::{Deserialize, Serialize};

use super::error::{DynamicsError, Result};
use super::jet::Jet;
use crate::real::Real;

/// Single barrier `height * exp(d (1 - 1/(1 - (x/R)^2)))` supported on `|x| < R`.
///
/// The curvature constant `d` is tied to the hyperbolic rate, so only the
/// cutoff radius is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierShape<T> {
    pub radius: T,
}

/// Ring-sector reflector centred at `(a - ring_radius, 0)`, peaking on the arc
/// through `(a, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CroissantShape<T> {
    pub a: T,
    pub ring_radius: T,
    pub radial_width: T,
    /// Half-angle of the flat part of the angular profile.
    pub aperture: T,
    /// Angular length of the smooth falloff beyond `aperture`.
    pub taper: T,
    pub height: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpShape<T> {
    pub center: [T; 2],
    pub radius: T,
    pub amplitude: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec<T> {
    pub lambda1: T,
    pub lambda2: T,
    pub e0: T,
    pub v1_shape: BarrierShape<T>,
    pub v2_shape: BarrierShape<T>,
    #[serde(default)]
    pub vref_shape: Option<CroissantShape<T>>,
    #[serde(default)]
    pub w_shape: Option<BumpShape<T>>,
    #[serde(default = "default_true")]
    pub symmetric: bool,
}

fn default_true() -> bool {
    true
}

/// `exp(d (1 - 1/(1 - u^2)))` for `|u| < 1`, zero otherwise. Equals `1 - d u^2 + O(u^4)`.
pub fn bump_jet<T: Real>(u: Jet<T>, d: T) -> Jet<T> {
    let q = Jet::constant(T::one()) - u * u;
    if q.v <= T::zero() || d * (T::one() / q.v - T::one()) > T::lit(650.0) {
        return Jet::zero();
    }
    (Jet::constant(d) - q.recip().scale(d)).exp()
}

fn psi<T: Real>(v: Jet<T>) -> Jet<T> {
    if v.v <= T::zero() || T::one() / v.v > T::lit(650.0) {
        Jet::zero()
    } else {
        (-v.recip()).exp()
    }
}

/// Smooth step equal to 1 for `v <= 0` and 0 for `v >= 1`.
pub fn smooth_step_down_jet<T: Real>(v: Jet<T>) -> Jet<T> {
    if v.v <= T::zero() {
        return Jet::constant(T::one());
    }
    if v.v >= T::one() {
        return Jet::zero();
    }
    let a = psi(Jet::constant(T::one()) - v);
    let b = psi(v);
    a / (a + b)
}

fn bump_value<T: Real>(u: T, d: T) -> T {
    bump_jet(Jet::constant(u), d).v
}

impl<T: Real> BarrierShape<T> {
    fn curvature(&self, lambda: T, e0: T) -> T {
        lambda * lambda * self.radius * self.radius / (T::lit(4.0) * e0)
    }
}

impl<T: Real> CroissantShape<T> {
    pub fn ring_center(&self) -> [T; 2] {
        [self.a - self.ring_radius, T::zero()]
    }

    pub fn jet(&self, x: Jet<T>, y: Jet<T>) -> Jet<T> {
        let c = self.ring_center();
        let dx = x.add_const(-c[0]);
        let rho2 = dx * dx + y * y;
        let (rin, rout) = (self.ring_radius - self.radial_width, self.ring_radius + self.radial_width);
        if rho2.v <= rin * rin || rho2.v >= rout * rout {
            return Jet::zero();
        }
        let rho = rho2.sqrt();
        let radial = bump_jet(rho.add_const(-self.ring_radius).scale(T::one() / self.radial_width), T::one());
        if radial.v == T::zero() {
            return Jet::zero();
        }
        let theta = Jet::atan2(y, dx);
        let abs_theta = if theta.v < T::zero() { -theta } else { theta };
        let angular = smooth_step_down_jet(abs_theta.add_const(-self.aperture).scale(T::one() / self.taper));
        (radial * angular).scale(self.height)
    }

    /// Whether a disc intersects the closed annular sector carrying the support.
    fn may_meet_disc(&self, center: [T; 2], radius: T) -> bool {
        let c = self.ring_center();
        let d = ((center[0] - c[0]).powi(2) + (center[1] - c[1]).powi(2)).sqrt();
        let (rin, rout) = (self.ring_radius - self.radial_width, self.ring_radius + self.radial_width);
        if d + radius <= rin || d - radius >= rout {
            return false;
        }
        if d > radius {
            let theta = (center[1] - c[1]).atan2(center[0] - c[0]).abs();
            let spread = (radius / d).asin();
            if theta - spread >= self.aperture + self.taper {
                return false;
            }
        }
        true
    }
}

impl<T: Real> BumpShape<T> {
    pub fn jet(&self, x: Jet<T>, y: Jet<T>) -> Jet<T> {
        if self.amplitude == T::zero() {
            return Jet::zero();
        }
        let inv = T::one() / self.radius;
        let dx = x.add_const(-self.center[0]).scale(inv);
        let dy = y.add_const(-self.center[1]).scale(inv);
        let r2 = dx * dx + dy * dy;
        if r2.v >= T::one() {
            return Jet::zero();
        }
        let q = Jet::constant(T::one()) - r2;
        if T::one() / q.v - T::one() > T::lit(650.0) {
            return Jet::zero();
        }
        (Jet::constant(T::one()) - q.recip()).exp().scale(self.amplitude)
    }
}

impl<T: Real> PotentialSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(DynamicsError::InvalidSpec(m.to_string()));
        let finite = [self.lambda1, self.lambda2, self.e0, self.v1_shape.radius, self.v2_shape.radius];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite parameter");
        }
        if !(self.lambda1 > T::zero() && self.lambda1 < self.lambda2) {
            return bad("rates must satisfy 0 < lambda1 < lambda2");
        }
        if self.e0 <= T::zero() {
            return bad("E0 must be positive");
        }
        if self.v1_shape.radius <= T::zero() || self.v2_shape.radius <= T::zero() {
            return bad("barrier radii must be positive");
        }
        if let Some(c) = &self.vref_shape {
            if !(c.ring_radius > c.radial_width && c.radial_width > T::zero()) {
                return bad("reflector needs 0 < radial_width < ring_radius");
            }
            if !(c.aperture > T::zero() && c.taper > T::zero()) {
                return bad("reflector aperture and taper must be positive");
            }
            if c.aperture + c.taper >= T::PI() {
                return bad("reflector sector must not close into a ring");
            }
            if c.height <= self.e0 {
                return bad("reflector height must exceed E0");
            }
        }
        if let Some(w) = &self.w_shape {
            if w.radius <= T::zero() || w.amplitude < T::zero() {
                return bad("W needs positive radius and non-negative amplitude");
            }
            let (r1, r2) = (self.v1_shape.radius, self.v2_shape.radius);
            let gap_x = ((w.center[0]).abs() - r1).max(T::zero());
            let gap_y = ((w.center[1]).abs() - r2).max(T::zero());
            if (gap_x * gap_x + gap_y * gap_y).sqrt() <= w.radius {
                return bad("supp W meets supp V_top");
            }
            if let Some(c) = &self.vref_shape {
                if c.may_meet_disc(w.center, w.radius) {
                    return bad("supp W meets supp V_ref");
                }
            }
        }
        Ok(())
    }

    pub fn v_top_jet(&self, x: Jet<T>, y: Jet<T>) -> Jet<T> {
        let d1 = self.v1_shape.curvature(self.lambda1, self.e0);
        let d2 = self.v2_shape.curvature(self.lambda2, self.e0);
        let v1 = bump_jet(x.scale(T::one() / self.v1_shape.radius), d1);
        if v1.v == T::zero() {
            return Jet::zero();
        }
        let v2 = bump_jet(y.scale(T::one() / self.v2_shape.radius), d2);
        (v1 * v2).scale(self.e0)
    }

    pub fn potential_jet(&self, x: [T; 2]) -> Jet<T> {
        let (jx, jy) = (Jet::variable(0, x[0]), Jet::variable(1, x[1]));
        let mut v = self.v_top_jet(jx, jy);
        if let Some(c) = &self.vref_shape {
            v = v + c.jet(jx, jy);
        }
        v
    }

    pub fn perturbation_jet(&self, x: [T; 2]) -> Jet<T> {
        match &self.w_shape {
            Some(w) => w.jet(Jet::variable(0, x[0]), Jet::variable(1, x[1])),
            None => Jet::zero(),
        }
    }

    pub fn v1(&self, x1: T) -> T {
        self.e0 * bump_value(x1 / self.v1_shape.radius, self.v1_shape.curvature(self.lambda1, self.e0))
    }

    pub fn v2(&self, x2: T) -> T {
        bump_value(x2 / self.v2_shape.radius, self.v2_shape.curvature(self.lambda2, self.e0))
    }

    /// Smallest radius about the origin outside which `V` may be non-zero only through `V_ref`.
    pub fn top_radius(&self) -> T {
        self.v1_shape.radius.hypot(self.v2_shape.radius)
    }

    /// Radius of a disc containing the supports of `V` and `W`.
    pub fn support_radius(&self) -> T {
        let mut r = self.top_radius();
        if let Some(c) = &self.vref_shape {
            let cc = c.ring_center();
            r = r.max(cc[0].abs() + c.ring_radius + c.radial_width);
        }
        if let Some(w) = &self.w_shape {
            r = r.max(w.center[0].hypot(w.center[1]) + w.radius);
        }
        r
    }

    /// Same geometry with the reflector removed.
    pub fn without_reflector(&self) -> Self {
        Self { vref_shape: None, ..self.clone() }
    }

    /// Same geometry with the perturbation removed.
    pub fn without_perturbation(&self) -> Self {
        Self { w_shape: None, ..self.clone() }
    }
}

impl PotentialSpec<f64> {
    /// Symmetric configuration with three homoclinic trajectories; `W` sits on the upper one.
    pub fn reference() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1.7,
            e0: 1.0,
            v1_shape: BarrierShape { radius: 2.0 },
            v2_shape: BarrierShape { radius: 1.2 },
            vref_shape: Some(CroissantShape {
                a: 6.0,
                ring_radius: 5.7,
                radial_width: 0.6,
                aperture: 0.7,
                taper: 0.25,
                height: 2.0,
            }),
            w_shape: Some(BumpShape { center: [3.444, 1.645], radius: 0.3, amplitude: 1.0 }),
            symmetric: true,
        }
    }
}

pub fn eval_potential<T: Real>(spec: &PotentialSpec<T>, x: [T; 2]) -> T {
    spec.potential_jet(x).v
}

pub fn eval_gradient<T: Real>(spec: &PotentialSpec<T>, x: [T; 2]) -> [T; 2] {
    spec.potential_jet(x).g
}

pub fn eval_hessian<T: Real>(spec: &PotentialSpec<T>, x: [T; 2]) -> [[T; 2]; 2] {
    spec.potential_jet(x).h
}

/// The symbol `|xi|^2 + V(x)`.
pub fn symbol<T: Real>(spec: &PotentialSpec<T>, x: [T; 2], xi: [T; 2]) -> T {
    xi[0] * xi[0] + xi[1] * xi[1] + eval_potential(spec, x)
}
