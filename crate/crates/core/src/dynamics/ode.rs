//! Dormand–Prince 5(4) with FSAL, step-size control and single fixed steps
//! for event refinement.

use super::error::{DynamicsError, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub initial_step: T,
    pub min_step: T,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-14),
            max_step: T::lit(0.05),
            initial_step: T::lit(1e-3),
            min_step: T::lit(1e-14),
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator state for `y' = f(y)` (autonomous).
#[derive(Debug, Clone)]
pub struct Dopri5<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub dy: [T; N],
    h: T,
    dir: T,
    opts: OdeOptions<T>,
    control: usize,
}

/// One trial step: returns the new state, its derivative and the embedded error vector.
fn trial<T: Real, const N: usize, F: Fn(&[T; N]) -> [T; N]>(
    f: &F,
    y: &[T; N],
    dy: &[T; N],
    h: T,
) -> ([T; N], [T; N], [T; N]) {
    let mut k = [[T::zero(); N]; 7];
    k[0] = *dy;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = T::lit(A[s][j]);
            if a != T::zero() {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        if s == 6 {
            k[6] = f(&ys);
            let mut err = [T::zero(); N];
            for i in 0..N {
                let mut e = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    e += T::lit(E[j]) * kj[i];
                }
                err[i] = h * e;
            }
            return (ys, k[6], err);
        }
        k[s] = f(&ys);
    }
    unreachable!()
}

impl<T: Real, const N: usize> Dopri5<T, N> {
    pub fn new<F: Fn(&[T; N]) -> [T; N]>(f: &F, t0: T, y0: [T; N], forward: bool, opts: OdeOptions<T>) -> Self {
        let dy = f(&y0);
        let dir = if forward { T::one() } else { -T::one() };
        Self { t: t0, y: y0, dy, h: opts.initial_step.min(opts.max_step), dir, opts, control: N }
    }

    /// Restricts error control to the leading `n` components, so that the
    /// remaining ones are carried along without influencing the step sequence.
    pub fn with_control_dims(mut self, n: usize) -> Self {
        self.control = n.clamp(1, N);
        self
    }

    fn error_norm(&self, ynew: &[T; N], err: &[T; N]) -> T {
        let ymax = self.y[..self.control].iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let floor = T::lit(1e-6) * ymax;
        let mut worst = T::zero();
        for i in 0..self.control {
            let sc = self.opts.atol + self.opts.rtol * self.y[i].abs().max(ynew[i].abs()).max(floor);
            worst = worst.max((err[i] / sc).abs());
        }
        worst
    }

    /// Advances by one accepted step, never past `t_limit` (in the direction of integration).
    pub fn step<F: Fn(&[T; N]) -> [T; N]>(&mut self, f: &F, t_limit: T) -> Result<()> {
        loop {
            let remaining = (t_limit - self.t) * self.dir;
            let mut h = self.h.min(self.opts.max_step);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let (ynew, dynew, err) = trial(f, &self.y, &self.dy, h * self.dir);
            let en = self.error_norm(&ynew, &err);
            if en.is_finite() && en <= T::one() && ynew[..self.control].iter().all(|v| v.is_finite()) {
                self.t = if last { t_limit } else { self.t + h * self.dir };
                self.y = ynew;
                self.dy = dynew;
                let fac = if en == T::zero() {
                    T::lit(5.0)
                } else {
                    (T::lit(0.9) * en.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
                };
                if !last || fac < T::one() {
                    self.h = (h * fac).min(self.opts.max_step);
                }
                return Ok(());
            }
            let fac = if en.is_finite() {
                (T::lit(0.9) * en.powf(T::lit(-0.2))).max(T::lit(0.1))
            } else {
                T::lit(0.1)
            };
            self.h = h * fac;
            if self.h < self.opts.min_step {
                return Err(DynamicsError::StepFailure {
                    t: self.t.to_f64().unwrap_or(f64::NAN),
                    h: self.h.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
}

/// A single uncontrolled fifth-order step of signed size `h` from `y`.
pub fn single_step<T: Real, const N: usize, F: Fn(&[T; N]) -> [T; N]>(f: &F, y: &[T; N], h: T) -> [T; N] {
    let dy = f(y);
    trial(f, y, &dy, h).0
}

/// Signed time `dt` in `[0, h_prev]` (scaled by direction) at which `g(state)` vanishes,
/// found by secant/bisection on exact single steps from the left state.
pub fn locate_event<T: Real, const N: usize, F, G>(f: &F, y_left: &[T; N], dt_total: T, g: G) -> (T, [T; N])
where
    F: Fn(&[T; N]) -> [T; N],
    G: Fn(&[T; N]) -> T,
{
    let (mut a, mut b) = (T::zero(), dt_total);
    let mut ga = g(y_left);
    let yb = single_step(f, y_left, b);
    let mut gb = g(&yb);
    let mut best = (b, yb);
    for it in 0..80 {
        let mut m = if (gb - ga) != T::zero() { a - ga * (b - a) / (gb - ga) } else { (a + b) * T::lit(0.5) };
        let lo = a.min(b);
        let hi = a.max(b);
        let span = hi - lo;
        if !(m > lo + T::lit(0.01) * span && m < hi - T::lit(0.01) * span) || it % 4 == 3 {
            m = (a + b) * T::lit(0.5);
        }
        let ym = single_step(f, y_left, m);
        let gm = g(&ym);
        best = (m, ym);
        if gm == T::zero() || span <= T::epsilon() * T::lit(4.0) * dt_total.abs().max(T::one()) {
            break;
        }
        if (gm < T::zero()) == (ga < T::zero()) {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    best
}
