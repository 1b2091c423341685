//! Shooting on the series coefficient `a` of `f = pi + a r^n + ...`.
//!
//! Two modes:
//! - *anchor*: `kappa = 0, mk = 0`. The equation is scale free and every
//!   `a < 0` decays, so the branch is selected by the half-height radius
//!   `f(r_half) = pi/2` (Illinois iteration on `a`).
//! - *bisection*: otherwise. Trials are classified as overshoot (`f < 0`)
//!   or undershoot (`f` turns upward while positive) and the bracket is
//!   bisected to ulp width. The far field is then continued with the
//!   linearised decaying solution from the last radius where both bracket
//!   ends still agree, because the growing mode cannot be held off to large
//!   `r` in double precision.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{
    ode_rhs, ode_rhs_sc, residual_of, series_b_power, series_start, CoreModel, OdeParams, Profile,
    Provenance, RadialGrid, SeriesCoeffs, TailModel, DEFAULT_TOL_BC, DEFAULT_TOL_RES,
};
use crate::error::{Error, Result};
use crate::field::Coupling;
use crate::numeric::ode::{Dopri5, StepFailure};

/// Relative agreement of the bracket ends required to keep a node.
const SPLICE_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShootMode {
    Anchor,
    Bisection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootOptions {
    pub grid: RadialGrid,
    /// Interval for the series coefficient `a` (both ends negative).
    pub bracket: (f64, f64),
    pub tol_bc: f64,
    pub tol_res: f64,
    /// Half-height radius selecting the scale in anchor mode.
    pub r_half: f64,
    pub max_iter: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl ShootOptions {
    pub const DEFAULT_BRACKET: (f64, f64) = (-50.0, -1e-3);

    pub fn new(grid: RadialGrid) -> Self {
        Self {
            grid,
            bracket: Self::DEFAULT_BRACKET,
            tol_bc: DEFAULT_TOL_BC,
            tol_res: DEFAULT_TOL_RES,
            r_half: 1.0,
            max_iter: 200,
            rtol: 1e-12,
            atol: 1e-15,
        }
    }

    /// Select the anchor so that the result is the exact family member `K`.
    pub fn with_family_constant(mut self, k_fam: f64, n: u32) -> Self {
        self.r_half = k_fam.powf(-1.0 / (2.0 * n as f64));
        self
    }
}

/// Diagnostics recorded with a shot profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub mode: ShootMode,
    /// Converged series coefficient.
    pub a: f64,
    pub iterations: usize,
    pub residual: f64,
    pub f_rmax: f64,
    pub bracket: (f64, f64),
    /// Radius beyond which the linearised tail replaces the integration.
    pub splice_radius: Option<f64>,
    pub monotone: bool,
    pub warnings: Vec<String>,
}

/// Shoot with default tolerances and the given bracket.
pub fn shoot(c: &Coupling, grid: &RadialGrid, a_bracket: (f64, f64)) -> Result<Profile> {
    let mut opts = ShootOptions::new(grid.clone());
    opts.bracket = a_bracket;
    shoot_with(c, &opts)
}

pub fn shoot_with(c: &Coupling, opts: &ShootOptions) -> Result<Profile> {
    let (lo, hi) = (
        opts.bracket.0.min(opts.bracket.1),
        opts.bracket.0.max(opts.bracket.1),
    );
    if !(hi < 0.0 && lo.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bracket [{lo}, {hi}] must lie in a < 0"
        )));
    }
    let solver = Shooter {
        params: OdeParams::from_coupling(c),
        grid: &opts.grid,
        rtol: opts.rtol,
        atol: opts.atol,
    };
    if c.kappa == 0.0 && c.mk == 0.0 {
        anchor_solve(&solver, c, opts, (lo, hi))
    } else {
        bisection_solve(&solver, c, opts, (lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Overshoot,
    Undershoot,
    /// Reached `r_max` without an event and within `tol_bc` of zero.
    Accepted,
}

struct Trajectory {
    f: Vec<f64>,
    fp: Vec<f64>,
    outcome: Outcome,
}

impl Trajectory {
    fn clone_shallow(&self) -> Self {
        Trajectory {
            f: Vec::new(),
            fp: Vec::new(),
            outcome: self.outcome,
        }
    }
}

struct Shooter<'a> {
    params: OdeParams,
    grid: &'a RadialGrid,
    rtol: f64,
    atol: f64,
}

impl Shooter<'_> {
    /// `(u, u')` at `r0`, with `u = f - pi`.
    fn seed(&self, a: f64) -> Result<[f64; 2]> {
        let n = self.params.n;
        let b = self.params.series_b(a);
        series_start(
            &SeriesCoeffs {
                a,
                b,
                amplitude: None,
            },
            n,
            self.grid.r0(),
        )?;
        let core = CoreModel::Series {
            limit: 0.0,
            a,
            b,
            b_power: series_b_power(n),
        };
        let (u, up) = core.eval(n, self.grid.r0());
        Ok([u, up])
    }

    fn stepper(&self) -> Dopri5 {
        Dopri5::new(self.rtol, self.atol)
    }

    /// Advance `(u, u')` near the core, where `f = pi + u` would lose the
    /// digits of `u` to rounding.
    fn step_offset(
        &self,
        ode: &mut Dopri5,
        a: f64,
        r: f64,
        y: [f64; 2],
        r_next: f64,
    ) -> Result<[f64; 2]> {
        let p = self.params;
        let mut rhs = |r: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
            let (su, cu) = y[0].sin_cos();
            Ok([y[1], ode_rhs_sc(r, -su, -cu, y[1], &p)?])
        };
        let y = ode
            .advance(&mut rhs, r, y, r_next)
            .map_err(|e| lift(e, a))?;
        if (PI + y[0]).abs() > 2.0 * PI {
            return Err(Error::Divergence { a, r: r_next });
        }
        Ok(y)
    }

    /// Advance `(f, f')` directly (far field).
    fn step_direct(
        &self,
        ode: &mut Dopri5,
        a: f64,
        r: f64,
        y: [f64; 2],
        r_next: f64,
    ) -> Result<[f64; 2]> {
        let p = self.params;
        let mut rhs =
            |r: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], ode_rhs(r, y[0], y[1], &p)?]) };
        let y = ode
            .advance(&mut rhs, r, y, r_next)
            .map_err(|e| lift(e, a))?;
        if y[0].abs() > 2.0 * PI {
            return Err(Error::Divergence { a, r: r_next });
        }
        Ok(y)
    }

    /// `f(r_target)` for seed `a`.
    fn value_at(&self, a: f64, r_target: f64) -> Result<f64> {
        let mut ode = self.stepper();
        let y = self.step_offset(&mut ode, a, self.grid.r0(), self.seed(a)?, r_target)?;
        Ok(PI + y[0])
    }

    /// Integrate node to node; with `classify`, stop at the first event.
    fn trajectory(&self, a: f64, classify: bool, tol_bc: f64) -> Result<Trajectory> {
        let nodes = self.grid.nodes();
        let mut ode = self.stepper();
        let mut y = self.seed(a)?;
        let mut f = Vec::with_capacity(nodes.len());
        let mut fp = Vec::with_capacity(nodes.len());
        f.push(PI + y[0]);
        fp.push(y[1]);
        for w in nodes.windows(2) {
            y = self.step_offset(&mut ode, a, w[0], y, w[1])?;
            let fv = PI + y[0];
            f.push(fv);
            fp.push(y[1]);
            if classify {
                if fv < 0.0 {
                    return Ok(Trajectory {
                        f,
                        fp,
                        outcome: Outcome::Overshoot,
                    });
                }
                if y[1] > 0.0 {
                    return Ok(Trajectory {
                        f,
                        fp,
                        outcome: Outcome::Undershoot,
                    });
                }
            }
        }
        let outcome = if f[f.len() - 1].abs() < tol_bc {
            Outcome::Accepted
        } else {
            Outcome::Undershoot
        };
        Ok(Trajectory { f, fp, outcome })
    }

    /// Integrate inward from `r_max`, starting on `tail`, down to node `stop`.
    /// Returns nodal `(f, f')` for indices `stop..` in increasing order.
    fn inward(&self, a: f64, tail: &TailModel, stop: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let nodes = self.grid.nodes();
        let last = nodes.len() - 1;
        let (f0, d0) = tail.eval(self.params.n, nodes[last]);
        let mut y = [f0, d0];
        let mut f = vec![0.0; last + 1 - stop];
        let mut fp = vec![0.0; last + 1 - stop];
        f[last - stop] = f0;
        fp[last - stop] = d0;
        let mut ode = self.stepper();
        for i in (stop..last).rev() {
            y = self.step_direct(&mut ode, a, nodes[i + 1], y, nodes[i])?;
            f[i - stop] = y[0];
            fp[i - stop] = y[1];
        }
        Ok((f, fp))
    }

    /// Far-field continuation through node `keep`: the decaying solution of
    /// the full equation, found by integrating inward from an asymptotic
    /// initial state whose amplitude is matched to `f_keep`.
    fn decaying_tail(
        &self,
        a: f64,
        mk: f64,
        keep: usize,
        f_keep: f64,
    ) -> Result<(TailModel, Vec<f64>, Vec<f64>)> {
        let n = self.params.n;
        let nodes = self.grid.nodes();
        let rmax = self.grid.rmax();
        let model = |amp: f64| {
            if mk > 0.0 {
                TailModel::Bessel {
                    amplitude: amp,
                    mass: mk,
                }
            } else {
                TailModel::PowerLaw { amplitude: amp }
            }
        };
        let amp_of = |t: TailModel| match t {
            TailModel::Bessel { amplitude, .. } | TailModel::PowerLaw { amplitude } => amplitude,
            TailModel::Flat { .. } => 0.0,
        };
        // linear guess from the asymptote through the splice node
        let guess = if mk > 0.0 {
            TailModel::bessel_through(n, mk, nodes[keep], f_keep)
        } else {
            TailModel::power_law_through(n, nodes[keep], f_keep)?
        };
        let mut b0 = amp_of(guess);
        let mut b1 = b0 * (1.0 + 1e-3);
        let mut g0 = self.inward(a, &model(b0), keep)?.0[0] - f_keep;
        let mut g1 = self.inward(a, &model(b1), keep)?.0[0] - f_keep;
        for _ in 0..40 {
            if g1 == 0.0 || g1 == g0 {
                break;
            }
            let b2 = b1 - g1 * (b1 - b0) / (g1 - g0);
            b0 = b1;
            g0 = g1;
            b1 = b2;
            g1 = self.inward(a, &model(b1), keep)?.0[0] - f_keep;
            if (b1 - b0).abs() <= 1e-15 * b1.abs() {
                break;
            }
        }
        let tail = model(b1);
        let (f, fp) = self.inward(a, &tail, keep)?;
        if mk == 0.0 {
            // the power-law asymptote is only good to O(A^5 r^-5n): re-anchor
            let tail = TailModel::power_law_through(n, rmax, f[f.len() - 1])?;
            return Ok((tail, f, fp));
        }
        Ok((tail, f, fp))
    }
}

fn lift(e: StepFailure<Error>, a: f64) -> Error {
    match e {
        StepFailure::Rhs(e) => e,
        StepFailure::StepUnderflow { t } | StepFailure::NonFinite { t } => {
            Error::Divergence { a, r: t }
        }
    }
}

fn anchor_solve(
    s: &Shooter,
    c: &Coupling,
    opts: &ShootOptions,
    (lo, hi): (f64, f64),
) -> Result<Profile> {
    let r_half = opts.r_half;
    if !(r_half > s.grid.r0() && r_half.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "anchor radius {r_half} must exceed r0 = {}",
            s.grid.r0()
        )));
    }
    // f(r_half) decreases as a becomes more negative.
    let g = |a: f64| s.value_at(a, r_half).map(|f| f - FRAC_PI_2);
    let (mut a0, mut a1) = (lo, hi);
    let (mut g0, mut g1) = (g(a0)?, g(a1)?);
    if g0.signum() == g1.signum() {
        let outcome = if g0 > 0.0 {
            "stay above pi/2"
        } else {
            "fall below pi/2"
        };
        return Err(Error::Bracket {
            a_lo: lo,
            a_hi: hi,
            outcome: format!("{outcome} at r_half = {r_half}"),
        });
    }
    let mut iterations = 0;
    let mut side = 0i8;
    let mut a = a0;
    while iterations < opts.max_iter {
        iterations += 1;
        // Illinois-modified regula falsi
        a = (a0 * g1 - a1 * g0) / (g1 - g0);
        if !(a > a0.min(a1) && a < a0.max(a1)) {
            a = 0.5 * (a0 + a1);
        }
        let ga = g(a)?;
        if ga == 0.0 || (a1 - a0).abs() <= 4.0 * f64::EPSILON * a.abs() || ga.abs() < 1e-15 {
            break;
        }
        if ga.signum() == g1.signum() {
            a1 = a;
            g1 = ga;
            if side == -1 {
                g0 *= 0.5;
            }
            side = -1;
        } else {
            a0 = a;
            g0 = ga;
            if side == 1 {
                g1 *= 0.5;
            }
            side = 1;
        }
    }
    let traj = s.trajectory(a, false, opts.tol_bc)?;
    let n = c.n;
    let rmax = s.grid.rmax();
    let tail = TailModel::power_law_through(n, rmax, traj.f[traj.f.len() - 1])?;
    let core = CoreModel::Series {
        limit: PI,
        a,
        b: s.params.series_b(a),
        b_power: series_b_power(n),
    };
    finish(
        s,
        c,
        opts,
        traj.f,
        traj.fp,
        core,
        tail,
        Some(a * a / 4.0),
        SolveInfo {
            mode: ShootMode::Anchor,
            a,
            iterations,
            residual: f64::NAN,
            f_rmax: f64::NAN,
            bracket: (lo, hi),
            splice_radius: None,
            monotone: true,
            warnings: Vec::new(),
        },
    )
}

fn bisection_solve(
    s: &Shooter,
    c: &Coupling,
    opts: &ShootOptions,
    (lo, hi): (f64, f64),
) -> Result<Profile> {
    let classify = |a: f64| s.trajectory(a, true, opts.tol_bc);
    // Small |a| (hi end) is expected to undershoot, large |a| to overshoot.
    let mut t_small = classify(hi)?;
    let mut t_large = classify(lo)?;
    let (mut a_small, mut a_large) = (hi, lo);
    let mut iterations = 2;
    let mut accepted: Option<(f64, Trajectory)> = None;
    if t_small.outcome == Outcome::Accepted {
        accepted = Some((hi, t_small));
        t_small = t_large.clone_shallow();
    } else if t_large.outcome == Outcome::Accepted {
        accepted = Some((lo, t_large));
        t_large = t_small.clone_shallow();
    } else if t_small.outcome == t_large.outcome {
        let outcome = match t_small.outcome {
            Outcome::Overshoot => "overshoot",
            _ => "undershoot",
        };
        return Err(Error::Bracket {
            a_lo: lo,
            a_hi: hi,
            outcome: outcome.into(),
        });
    } else if t_small.outcome == Outcome::Overshoot {
        std::mem::swap(&mut t_small, &mut t_large);
        std::mem::swap(&mut a_small, &mut a_large);
    }
    while accepted.is_none() && iterations < opts.max_iter {
        let mid = 0.5 * (a_small + a_large);
        if mid == a_small || mid == a_large {
            break;
        }
        iterations += 1;
        let t = classify(mid)?;
        match t.outcome {
            Outcome::Accepted => accepted = Some((mid, t)),
            Outcome::Undershoot => {
                t_small = t;
                a_small = mid;
            }
            Outcome::Overshoot => {
                t_large = t;
                a_large = mid;
            }
        }
    }

    let nodes = s.grid.nodes();
    let n = c.n;
    let mut warnings = Vec::new();
    let (a, mut f, mut fp, splice) = if let Some((a, t)) = accepted {
        (a, t.f, t.fp, None)
    } else {
        // Keep the part where both bracket ends agree.
        let len = t_small.f.len().min(t_large.f.len());
        let mut keep = 0;
        for i in 0..len {
            let (u, v) = (t_small.f[i], t_large.f[i]);
            if u <= 0.0 || v <= 0.0 || (u - v).abs() > SPLICE_AGREEMENT * u.abs().max(v.abs()) {
                break;
            }
            keep = i;
        }
        if keep < 8 {
            return Err(Error::NotConverged(format!(
                "bracket ends separate at r = {:.3e}; no usable profile",
                nodes[keep]
            )));
        }
        let f: Vec<f64> = (0..=keep)
            .map(|i| 0.5 * (t_small.f[i] + t_large.f[i]))
            .collect();
        let fp: Vec<f64> = (0..=keep)
            .map(|i| 0.5 * (t_small.fp[i] + t_large.fp[i]))
            .collect();
        (0.5 * (a_small + a_large), f, fp, Some(keep))
    };

    let tail = match splice {
        Some(keep) if keep + 1 < nodes.len() => {
            let (tail, f_in, fp_in) = s.decaying_tail(a, c.mk, keep, f[keep])?;
            let jump = (fp_in[0] - fp[keep]).abs();
            if jump > 1e-8 * fp[keep].abs() {
                warnings.push(format!(
                    "inner and outer slopes differ by {jump:.2e} at the splice radius {:.4}",
                    nodes[keep]
                ));
            }
            f.extend_from_slice(&f_in[1..]);
            fp.extend_from_slice(&fp_in[1..]);
            tail
        }
        _ => {
            let last = f.len() - 1;
            if c.mk > 0.0 {
                TailModel::bessel_through(n, c.mk, nodes[last], f[last])
            } else {
                TailModel::power_law_through(n, nodes[last], f[last])?
            }
        }
    };
    if c.mk == 0.0 {
        warnings.push(
            "untwisted Skyrme coupling: no localized solution is expected (Derrick scaling); \
             the profile is the finite-box separatrix"
                .to_string(),
        );
    }
    let core = CoreModel::Series {
        limit: PI,
        a,
        b: s.params.series_b(a),
        b_power: series_b_power(n),
    };
    finish(
        s,
        c,
        opts,
        f,
        fp,
        core,
        tail,
        None,
        SolveInfo {
            mode: ShootMode::Bisection,
            a,
            iterations,
            residual: f64::NAN,
            f_rmax: f64::NAN,
            bracket: (lo, hi),
            splice_radius: splice.map(|i| nodes[i]),
            monotone: true,
            warnings,
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    s: &Shooter,
    c: &Coupling,
    opts: &ShootOptions,
    f: Vec<f64>,
    fp: Vec<f64>,
    core: CoreModel,
    tail: TailModel,
    family_constant: Option<f64>,
    mut info: SolveInfo,
) -> Result<Profile> {
    let residual = residual_of(s.grid.nodes(), &f, &fp, &s.params)?;
    let f_rmax = f[f.len() - 1];
    info.residual = residual;
    info.f_rmax = f_rmax;
    info.monotone = f.windows(2).all(|w| w[1] < w[0]);
    if !info.monotone {
        info.warnings
            .push("profile is not strictly decreasing".into());
    }
    if !(residual < opts.tol_res) {
        return Err(Error::NotConverged(format!(
            "ODE residual {residual:.3e} exceeds tol_res {:.1e} (a = {})",
            opts.tol_res, info.a
        )));
    }
    // Massive tails must actually reach the vacuum inside the box; power-law
    // tails are continued by their asymptote instead.
    if matches!(tail, TailModel::Bessel { .. }) && !(f_rmax.abs() < opts.tol_bc) {
        return Err(Error::NotConverged(format!(
            "|f(r_max)| = {:.3e} exceeds tol_bc {:.1e}",
            f_rmax.abs(),
            opts.tol_bc
        )));
    }
    Ok(Profile::from_parts(
        s.grid.clone(),
        f,
        fp,
        *c,
        Provenance::Shooting,
        family_constant,
        core,
        tail,
        Some(info),
    ))
}
