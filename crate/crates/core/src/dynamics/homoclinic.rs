//! Shooting along the outgoing manifold for trajectories that return to the
//! origin along the incoming one.

use serde::{Deserialize, Serialize};

use super::error::{DynamicsError, Result};
use super::flow::{field8, incoming_mismatch, PhasePoint, Trajectory};
use super::ode::{locate_event, Dopri5, OdeOptions};
use super::potential::{symbol, PotentialSpec};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions<T> {
    pub n_shoot: usize,
    /// Distance from the origin of the first shooting point.
    pub shoot_radius: T,
    pub seed_radius: T,
    /// Shooting parameters are scanned over `[-y_max, y_max]`.
    pub y_max: T,
    pub r_link: T,
    /// Defaults to twice the support radius of the potential.
    pub r_escape: Option<T>,
    pub t_max: T,
    pub match_tol: T,
    pub transversality_tol: T,
    pub rtol: T,
    pub max_step: T,
    /// Scan both departure directions `x1 > 0` and `x1 < 0`.
    pub both_branches: bool,
    pub threads: usize,
}

impl<T: Real> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            n_shoot: 401,
            shoot_radius: T::lit(1e-5),
            seed_radius: T::lit(1e-4),
            y_max: T::lit(2.0),
            r_link: T::lit(1e-3),
            r_escape: None,
            t_max: T::lit(200.0),
            match_tol: T::lit(1e-8),
            transversality_tol: T::lit(1e-3),
            rtol: T::lit(1e-12),
            max_step: T::lit(0.05),
            both_branches: true,
            threads: 0,
        }
    }
}

impl<T: Real> SearchOptions<T> {
    pub fn ode(&self) -> OdeOptions<T> {
        OdeOptions { rtol: self.rtol, atol: self.rtol * T::lit(1e-4), max_step: self.max_step, ..OdeOptions::default() }
    }
}

/// A trajectory in `Λ₋ ∩ Λ₊` together with the data needed to recompute it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Homoclinic<T> {
    /// Part of the orbit outside the ball of radius `r_link`; time zero is the shooting point.
    pub trajectory: Trajectory<T>,
    /// Orbit from the shooting point to the inward crossing of `r_link`.
    pub full: Trajectory<T>,
    /// Derivative of `full` with respect to the shooting parameter.
    pub tangents: Vec<PhasePoint<T>>,
    pub branch: T,
    pub shoot_parameter: T,
    pub match_distance: T,
    /// Angle between the returning family and the incoming manifold.
    pub transversality: T,
    /// Polar angle of the point farthest from the origin.
    pub apex_angle: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicSearch<T> {
    pub homoclinics: Vec<Homoclinic<T>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Fate<T> {
    Escape,
    Timeout,
    /// Sign of the unstable transverse component when closest to the origin.
    Return { side: i8, linked: bool, mismatch: T },
}

pub(crate) struct Shot<T> {
    fate: Fate<T>,
    pub(crate) full: Trajectory<T>,
    pub(crate) tangents: Vec<PhasePoint<T>>,
    /// Index in `full` after which the orbit is outside `r_link` for the first time.
    exit_index: usize,
    exit_state: Option<(T, [T; 8])>,
}

pub(crate) fn shooting_state<T: Real>(spec: &PotentialSpec<T>, branch: T, y: T, opts: &SearchOptions<T>) -> [T; 8] {
    let r = opts.shoot_radius;
    let x2 = y * r.powf(spec.lambda2 / spec.lambda1);
    let x = [branch * r, x2];
    let half = T::lit(0.5);
    [
        x[0],
        x[1],
        half * spec.lambda1 * x[0],
        half * spec.lambda2 * x[1],
        T::zero(),
        T::one(),
        T::zero(),
        half * spec.lambda2,
    ]
}

fn unstable_component<T: Real>(spec: &PotentialSpec<T>, y: &[T; 8]) -> T {
    y[3] + T::lit(0.5) * spec.lambda2 * y[1]
}

fn sign<T: Real>(v: T) -> i8 {
    if v > T::zero() {
        1
    } else if v < T::zero() {
        -1
    } else {
        0
    }
}

fn push<T: Real>(full: &mut Trajectory<T>, tangents: &mut Vec<PhasePoint<T>>, t: T, y: &[T; 8], dy: &[T; 8]) {
    full.times.push(t);
    full.states.push(PhasePoint::from_slice(&y[..4]));
    full.rates.push(PhasePoint::from_slice(&dy[..4]));
    tangents.push(PhasePoint::from_slice(&y[4..]));
}

pub(crate) fn shoot<T: Real>(spec: &PotentialSpec<T>, branch: T, y: T, opts: &SearchOptions<T>, record: bool) -> Result<Shot<T>> {
    let f = field8(spec);
    let y0 = shooting_state(spec, branch, y, opts);
    let mut solver = Dopri5::new(&f, T::zero(), y0, true, opts.ode()).with_control_dims(4);
    let energy = symbol(spec, [y0[0], y0[1]], [y0[2], y0[3]]);
    let mut full = Trajectory { times: vec![], states: vec![], rates: vec![], energy };
    let mut tangents = vec![];
    if record {
        push(&mut full, &mut tangents, solver.t, &solver.y, &solver.dy);
    }
    let r_far = T::lit(0.5) * spec.v1_shape.radius.min(spec.v2_shape.radius);
    let r_escape = opts.r_escape.unwrap_or_else(|| T::lit(2.0) * spec.support_radius());
    let r2 = |s: &[T; 8]| s[0] * s[0] + s[1] * s[1];
    let rdot = |s: &[T; 8]| s[0] * s[2] + s[1] * s[3];
    let link2 = opts.r_link * opts.r_link;
    let mut far = false;
    let mut exit_index = 0;
    let mut exit_state = None;
    let fate = loop {
        if solver.t >= opts.t_max {
            break Fate::Timeout;
        }
        let (t_prev, y_prev) = (solver.t, solver.y);
        solver.step(&f, opts.t_max)?;
        let dt = solver.t - t_prev;
        if exit_state.is_none() && r2(&solver.y) > link2 {
            let (tau, ye) = locate_event(&f, &y_prev, dt, |s| r2(s) - link2);
            exit_state = Some((t_prev + tau, ye));
            exit_index = full.len();
        }
        if far && r2(&solver.y) <= link2 {
            let (tau, ye) = locate_event(&f, &y_prev, dt, |s| r2(s) - link2);
            let tl = t_prev + tau;
            if record {
                let dye = f(&ye);
                push(&mut full, &mut tangents, tl, &ye, &dye);
            }
            let p = PhasePoint::from_slice(&ye[..4]);
            break Fate::Return { side: sign(unstable_component(spec, &ye)), linked: true, mismatch: incoming_mismatch(spec, &p) };
        }
        if record {
            push(&mut full, &mut tangents, solver.t, &solver.y, &solver.dy);
        }
        let r = r2(&solver.y).sqrt();
        if !far && r > r_far {
            far = true;
        }
        if far {
            if r > r_escape {
                break Fate::Escape;
            }
            if rdot(&y_prev) < T::zero() && rdot(&solver.y) >= T::zero() {
                let p = PhasePoint::from_slice(&solver.y[..4]);
                break Fate::Return { side: sign(unstable_component(spec, &solver.y)), linked: false, mismatch: incoming_mismatch(spec, &p) };
            }
        }
    };
    Ok(Shot { fate, full, tangents, exit_index, exit_state })
}

fn side_of<T: Real>(f: &Fate<T>) -> Option<i8> {
    match f {
        Fate::Return { side, .. } => Some(*side),
        _ => None,
    }
}

/// Refines a sign change of the return side between `a` and `b` by bisection.
fn bisect<T: Real>(spec: &PotentialSpec<T>, branch: T, mut a: T, mut b: T, sa: i8, opts: &SearchOptions<T>) -> Result<Option<T>> {
    let mut best: Option<(T, T)> = None;
    let consider = |y: T, fate: &Fate<T>, best: &mut Option<(T, T)>| {
        if let Fate::Return { linked: true, mismatch, .. } = fate {
            if best.map_or(true, |(_, m)| *mismatch < m) {
                *best = Some((y, *mismatch));
            }
        }
    };
    for _ in 0..200 {
        let m = (a + b) * T::lit(0.5);
        if m == a || m == b {
            break;
        }
        let fate = shoot(spec, branch, m, opts, false)?.fate;
        consider(m, &fate, &mut best);
        match side_of(&fate) {
            Some(0) => return Ok(Some(m)),
            Some(s) if s == sa => a = m,
            Some(_) => b = m,
            None => return Ok(None),
        }
    }
    Ok(best.map(|(y, _)| y))
}

fn transversality<T: Real>(spec: &PotentialSpec<T>, rate: &PhasePoint<T>, tangent: &PhasePoint<T>) -> T {
    let half = T::lit(0.5);
    let n1 = tangent.xi[0] + half * spec.lambda1 * tangent.x[0];
    let n2 = tangent.xi[1] + half * spec.lambda2 * tangent.x[1];
    let d = tangent.to_array();
    let fv = rate.to_array();
    let ff: T = fv.iter().map(|v| *v * *v).fold(T::zero(), |a, b| a + b);
    let df: T = d.iter().zip(&fv).map(|(a, b)| *a * *b).fold(T::zero(), |a, b| a + b);
    let perp: T = d
        .iter()
        .zip(&fv)
        .map(|(a, b)| {
            let c = *a - df / ff * *b;
            c * c
        })
        .fold(T::zero(), |a, b| a + b)
        .sqrt();
    n1.hypot(n2).atan2(perp)
}

fn build<T: Real>(spec: &PotentialSpec<T>, branch: T, y: T, opts: &SearchOptions<T>) -> Result<Option<Homoclinic<T>>> {
    let shot = shoot(spec, branch, y, opts, true)?;
    let Fate::Return { linked: true, mismatch, .. } = shot.fate else {
        return Ok(None);
    };
    let Some((te, ye)) = shot.exit_state else {
        return Ok(None);
    };
    let f = field8(spec);
    let mut trajectory = Trajectory { times: vec![te], states: vec![PhasePoint::from_slice(&ye[..4])], rates: vec![PhasePoint::from_slice(&f(&ye)[..4])], energy: shot.full.energy };
    trajectory.times.extend_from_slice(&shot.full.times[shot.exit_index..]);
    trajectory.states.extend_from_slice(&shot.full.states[shot.exit_index..]);
    trajectory.rates.extend_from_slice(&shot.full.rates[shot.exit_index..]);
    let last = shot.full.len() - 1;
    let trans = transversality(spec, &shot.full.rates[last], &shot.tangents[last]);
    let apex = trajectory
        .states
        .iter()
        .max_by(|p, q| p.radius().partial_cmp(&q.radius()).unwrap_or(std::cmp::Ordering::Equal))
        .map(|p| p.x[1].atan2(p.x[0]))
        .unwrap_or_else(T::zero);
    Ok(Some(Homoclinic {
        trajectory,
        full: shot.full,
        tangents: shot.tangents,
        branch,
        shoot_parameter: y,
        match_distance: mismatch,
        transversality: trans,
        apex_angle: apex,
    }))
}

fn scan<T: Real>(spec: &PotentialSpec<T>, branch: T, ys: &[T], opts: &SearchOptions<T>) -> Result<Vec<Fate<T>>> {
    let threads = if opts.threads == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        opts.threads
    };
    let chunk = ys.len().div_ceil(threads.max(1)).max(1);
    let results: Vec<Result<Vec<Fate<T>>>> = std::thread::scope(|s| {
        let handles: Vec<_> = ys
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(|&y| shoot(spec, branch, y, opts, false).map(|r| r.fate)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("shooting worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(ys.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Fate of every shot of the scanning grid, for diagnostics and plotting.
pub fn shooting_profile<T: Real>(spec: &PotentialSpec<T>, branch: T, ys: &[T], opts: &SearchOptions<T>) -> Result<Vec<Fate<T>>> {
    scan(spec, branch, ys, opts)
}

/// Locates the homoclinic trajectories of energy `E0`, ordered by branch and then by
/// decreasing apex angle.
pub fn find_homoclinics<T: Real>(spec: &PotentialSpec<T>, opts: &SearchOptions<T>) -> Result<HomoclinicSearch<T>> {
    spec.validate()?;
    if opts.n_shoot < 100 {
        return Err(DynamicsError::InvalidSpec(format!("n_shoot = {} is below 100", opts.n_shoot)));
    }
    if opts.shoot_radius > opts.seed_radius {
        return Err(DynamicsError::OffsetTooLarge {
            norm: opts.shoot_radius.to_f64().unwrap_or(f64::NAN),
            limit: opts.seed_radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = opts.n_shoot;
    let denom = T::from_usize_lossy(n - 1);
    let ys: Vec<T> = (0..n)
        .map(|i| opts.y_max * T::from_i64_lossy(2 * i as i64 - (n as i64 - 1)) / denom)
        .collect();
    let branches: &[f64] = if opts.both_branches { &[1.0, -1.0] } else { &[1.0] };
    let mut found = Vec::new();
    let mut warnings = Vec::new();
    for &b in branches {
        let branch = T::lit(b);
        let fates = scan(spec, branch, &ys, opts)?;
        let mut candidates = Vec::new();
        for i in 0..n {
            if side_of(&fates[i]) == Some(0) {
                candidates.push(ys[i]);
            }
            if i + 1 < n {
                if let (Some(sa), Some(sb)) = (side_of(&fates[i]), side_of(&fates[i + 1])) {
                    if sa != 0 && sb != 0 && sa != sb {
                        if let Some(y) = bisect(spec, branch, ys[i], ys[i + 1], sa, opts)? {
                            candidates.push(y);
                        }
                    }
                }
            }
        }
        for y in candidates {
            let Some(h) = build(spec, branch, y, opts)? else {
                continue;
            };
            if h.match_distance >= opts.match_tol {
                warnings.push(format!(
                    "rejected return at y = {:e}: mismatch {:e} above {:e}",
                    y.to_f64().unwrap_or(f64::NAN),
                    h.match_distance.to_f64().unwrap_or(f64::NAN),
                    opts.match_tol.to_f64().unwrap_or(f64::NAN)
                ));
                continue;
            }
            if h.transversality < opts.transversality_tol {
                warnings.push(format!(
                    "tangency: transversality {:e} rad below {:e} at y = {:e}",
                    h.transversality.to_f64().unwrap_or(f64::NAN),
                    opts.transversality_tol.to_f64().unwrap_or(f64::NAN),
                    y.to_f64().unwrap_or(f64::NAN)
                ));
            }
            found.push(h);
        }
    }
    if found.is_empty() {
        return Err(DynamicsError::NoneFound);
    }
    found.sort_by(|a, b| {
        b.branch
            .partial_cmp(&a.branch)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.apex_angle.partial_cmp(&a.apex_angle).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(HomoclinicSearch { homoclinics: found, warnings })
}
