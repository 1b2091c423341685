//! Radial profiles `f(r)`: the closed-form sigma-model vortex family and
//! numerically shot solutions of the twisted Skyrme-string equation.
//!
//! A [`Profile`] stores `f` and `f'` on a [`RadialGrid`] together with a core
//! model (small-r series) and a tail model (far-field asymptote), so that it
//! can be sampled on all of `[0, inf)`.

mod io;
mod shoot;

pub use io::{
    read_profile, read_profile_csv, sidecar_path, write_profile, write_profile_with, GridSpec,
    ProfileSidecar, Tolerances,
};
pub use shoot::{shoot, shoot_with, ShootMode, ShootOptions, SolveInfo};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Coupling;
use crate::numeric::bessel::bessel_k_scaled;
use crate::numeric::fd::derivative_on_nodes;
use crate::numeric::quad::{simpson_with_error, AdaptiveGauss};

pub const DEFAULT_R0: f64 = 1e-4;
pub const DEFAULT_RMAX: f64 = 40.0;
pub const DEFAULT_NODES: usize = 4001;
pub const DEFAULT_TOL_BC: f64 = 1e-6;
pub const DEFAULT_TOL_RES: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScheme {
    Uniform,
    Log,
}

/// Strictly increasing positive radii, evenly spaced in `r` or in `ln r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    scheme: GridScheme,
}

impl RadialGrid {
    /// At least 64 intervals.
    pub const MIN_NODES: usize = 65;

    pub fn new(scheme: GridScheme, r0: f64, rmax: f64, nodes: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid r0 must be > 0, got {r0}"
            )));
        }
        if !(rmax > r0 && rmax.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid r_max = {rmax} must exceed r0 = {r0}"
            )));
        }
        if nodes < Self::MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} nodes, got {nodes}",
                Self::MIN_NODES
            )));
        }
        let last = (nodes - 1) as f64;
        let mut v: Vec<f64> = match scheme {
            GridScheme::Uniform => {
                let h = (rmax - r0) / last;
                (0..nodes).map(|i| r0 + h * i as f64).collect()
            }
            GridScheme::Log => {
                let (l0, l1) = (r0.ln(), rmax.ln());
                let du = (l1 - l0) / last;
                (0..nodes).map(|i| (l0 + du * i as f64).exp()).collect()
            }
        };
        v[0] = r0;
        v[nodes - 1] = rmax;
        Ok(Self { nodes: v, scheme })
    }

    pub fn log(r0: f64, rmax: f64, nodes: usize) -> Result<Self> {
        Self::new(GridScheme::Log, r0, rmax, nodes)
    }

    pub fn uniform(r0: f64, rmax: f64, nodes: usize) -> Result<Self> {
        Self::new(GridScheme::Uniform, r0, rmax, nodes)
    }

    /// Rebuild a grid from explicit nodes (e.g. read back from CSV). The
    /// spacing must be consistent with `scheme` to relative 1e-9.
    pub fn from_nodes(nodes: Vec<f64>, scheme: GridScheme) -> Result<Self> {
        if nodes.len() < Self::MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} nodes, got {}",
                Self::MIN_NODES,
                nodes.len()
            )));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "grid nodes must be positive and strictly increasing".into(),
            ));
        }
        let map = |r: f64| match scheme {
            GridScheme::Uniform => r,
            GridScheme::Log => r.ln(),
        };
        let n = nodes.len();
        let h = (map(nodes[n - 1]) - map(nodes[0])) / (n - 1) as f64;
        let scale = map(nodes[n - 1]).abs().max(map(nodes[0]).abs()).max(h);
        for w in nodes.windows(2) {
            if ((map(w[1]) - map(w[0])) - h).abs() > 1e-9 * scale {
                return Err(Error::InvalidArgument(format!(
                    "grid nodes are not {scheme:?}-spaced"
                )));
            }
        }
        Ok(Self { nodes, scheme })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn r0(&self) -> f64 {
        self.nodes[0]
    }

    pub fn rmax(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Spacing of the Simpson variable (`r` or `ln r`).
    pub fn step(&self) -> f64 {
        let n = self.nodes.len();
        match self.scheme {
            GridScheme::Uniform => (self.rmax() - self.r0()) / (n - 1) as f64,
            GridScheme::Log => (self.rmax().ln() - self.r0().ln()) / (n - 1) as f64,
        }
    }

    /// Finest spacing in `r`.
    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Index `i` with `nodes[i] <= r <= nodes[i + 1]`, clamped to the grid.
    fn interval(&self, r: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= r);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// Simpson integral of nodal values `g(r_i)` over `[r0, r_max]`, with a
    /// Richardson error estimate.
    pub fn simpson(&self, values: &[f64]) -> (f64, f64) {
        match self.scheme {
            GridScheme::Uniform => simpson_with_error(values, self.step()),
            GridScheme::Log => {
                let w: Vec<f64> = values.iter().zip(&self.nodes).map(|(v, r)| v * r).collect();
                simpson_with_error(&w, self.step())
            }
        }
    }
}

/// Small-r behaviour `f = limit + a r^n + b r^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoreModel {
    Series {
        limit: f64,
        a: f64,
        b: f64,
        b_power: i32,
    },
}

impl CoreModel {
    pub fn limit(&self) -> f64 {
        match *self {
            CoreModel::Series { limit, .. } => limit,
        }
    }

    pub fn eval(&self, n: u32, r: f64) -> (f64, f64) {
        match *self {
            CoreModel::Series {
                limit,
                a,
                b,
                b_power,
            } => {
                let ni = n as i32;
                let f = limit + a * r.powi(ni) + b * r.powi(b_power);
                let fp = a * ni as f64 * r.powi(ni - 1) + b * b_power as f64 * r.powi(b_power - 1);
                (f, fp)
            }
        }
    }

    fn rescaled(&self, n: u32, q: f64) -> Self {
        match *self {
            CoreModel::Series {
                limit,
                a,
                b,
                b_power,
            } => CoreModel::Series {
                limit,
                a: a * q.powi(n as i32),
                b: b * q.powi(b_power),
                b_power,
            },
        }
    }
}

/// Far-field behaviour beyond `r_max`. Each model is anchored to pass
/// through the last grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// `A r^-n - A^3 r^-3n / 12`, the untwisted asymptote.
    PowerLaw { amplitude: f64 },
    /// `B K_n(mass r)`, the linearised massive (twisted) far field.
    Bessel { amplitude: f64, mass: f64 },
    /// `f = value`.
    Flat { value: f64 },
}

impl TailModel {
    pub fn limit(&self) -> f64 {
        match *self {
            TailModel::Flat { value } => value,
            _ => 0.0,
        }
    }

    pub fn eval(&self, n: u32, r: f64) -> (f64, f64) {
        let nf = n as f64;
        match *self {
            TailModel::PowerLaw { amplitude: a } => {
                let x = a * r.powi(-(n as i32));
                let f = x - x * x * x / 12.0;
                let fp = -nf * x / r + nf * x * x * x / (4.0 * r);
                (f, fp)
            }
            TailModel::Bessel { amplitude, mass } => {
                let x = mass * r;
                let (k, kp) = bessel_k_scaled(n, x);
                let e = (-x).exp();
                (amplitude * k * e, amplitude * mass * kp * e)
            }
            TailModel::Flat { value } => (value, 0.0),
        }
    }

    /// Power-law tail through `(r, f)`.
    pub fn power_law_through(n: u32, r: f64, f: f64) -> Result<Self> {
        // x - x^3/12 = f, with x = A r^-n; the branch through the origin
        // exists for |f| < 4/3.
        if f.abs() >= 4.0 / 3.0 {
            return Err(Error::InvalidArgument(format!(
                "cannot attach a power-law tail to f = {f} at r = {r}"
            )));
        }
        let mut x = f;
        for _ in 0..60 {
            let g = x - x * x * x / 12.0 - f;
            let dx = g / (1.0 - x * x / 4.0);
            x -= dx;
            if dx.abs() <= 1e-17 * x.abs().max(1e-300) {
                break;
            }
        }
        Ok(TailModel::PowerLaw {
            amplitude: x * r.powi(n as i32),
        })
    }

    /// Decaying Bessel tail through `(r, f)`.
    pub fn bessel_through(n: u32, mass: f64, r: f64, f: f64) -> Self {
        let x = mass * r;
        let (k, _) = bessel_k_scaled(n, x);
        TailModel::Bessel {
            amplitude: f / (k * (-x).exp()),
            mass,
        }
    }
}

/// Leading small-r coefficients and the far-field amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoeffs {
    pub a: f64,
    pub b: f64,
    /// Power-law amplitude `A`, when the tail is of that form.
    pub amplitude: Option<f64>,
}

/// Power of the second series term: `r^3` for `n = 1`, `r^(3n-2)` otherwise.
pub fn series_b_power(n: u32) -> i32 {
    if n == 1 {
        3
    } else {
        3 * n as i32 - 2
    }
}

/// Truncated series `f = pi + a r^n + b r^p` and its slope at `r0`.
pub fn series_start(coeffs: &SeriesCoeffs, n: u32, r0: f64) -> Result<(f64, f64)> {
    let size = coeffs.a.abs() * r0.powi(n as i32);
    if !(r0 > 0.0) || !(size < 0.1) {
        return Err(Error::SeriesRange { r0, size });
    }
    let core = CoreModel::Series {
        limit: PI,
        a: coeffs.a,
        b: coeffs.b,
        b_power: series_b_power(n),
    };
    Ok(core.eval(n, r0))
}

/// Coefficients of the twisted equation in the form used by [`ode_rhs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeParams {
    /// `4 lambda^2 kappa n^2`
    pub epsilon: f64,
    /// `4 lambda^2 kappa (mk)^2`
    pub zeta: f64,
    pub n: u32,
    /// `(mk)^2`, supplied explicitly so that `epsilon = 0` stays regular.
    pub mk2: f64,
}

impl OdeParams {
    pub fn from_coupling(c: &Coupling) -> Self {
        let l2k = 4.0 * c.lambda * c.lambda * c.kappa;
        let n = c.n as f64;
        Self {
            epsilon: l2k * n * n,
            zeta: l2k * c.mk * c.mk,
            n: c.n,
            mk2: c.mk * c.mk,
        }
    }

    /// Second series coefficient for a given slope coefficient `a`.
    pub fn series_b(&self, a: f64) -> f64 {
        let (eps, zeta, mk2) = (self.epsilon, self.zeta, self.mk2);
        match self.n {
            1 => {
                (mk2 * a - 2.0 / 3.0 * a.powi(3) + eps / 3.0 * a.powi(5) - 2.0 * zeta * a.powi(3))
                    / (8.0 * (1.0 + eps * a * a))
            }
            2 => (mk2 * a - 4.0 * eps * a.powi(3)) / 12.0,
            n => {
                let nf = n as f64;
                -eps * a.powi(3) * nf / (2.0 * (2.0 * nf - 1.0))
            }
        }
    }
}

/// `f''` of the twisted string equation
///
/// `f'' = [-(eps + zeta r^2) s c f'^2 - (r^2 + (zeta r^2 - eps) s^2) f'/r
///         + (n^2 + mk^2 r^2) s c] / (r^2 + (eps + zeta r^2) s^2)`
///
/// with `s = sin f`, `c = cos f`.
pub fn ode_rhs(r: f64, f: f64, fp: f64, p: &OdeParams) -> Result<f64> {
    let (s, c) = f.sin_cos();
    ode_rhs_sc(r, s, c, fp, p)
}

/// [`ode_rhs`] with `sin f`, `cos f` supplied, so callers near `f = pi`
/// can pass them without cancellation.
pub fn ode_rhs_sc(r: f64, s: f64, c: f64, fp: f64, p: &OdeParams) -> Result<f64> {
    let s2 = s * s;
    let r2 = r * r;
    let zr2 = p.zeta * r2;
    let den = r2 + (p.epsilon + zr2) * s2;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::SingularOde { r });
    }
    let n2 = (p.n as f64).powi(2);
    let num = -(p.epsilon + zr2) * s * c * fp * fp - (r2 + (zr2 - p.epsilon) * s2) * fp / r
        + (n2 + p.mk2 * r2) * s * c;
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form sigma-model vortex.
    Exact,
    /// Numerical solution of the string equation.
    Shooting,
    /// Supplied by the caller (perturbed or test configurations).
    Sampled,
}

/// A radial profile on a grid, with core and tail extensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: RadialGrid,
    f: Vec<f64>,
    fp: Vec<f64>,
    coupling: Coupling,
    provenance: Provenance,
    family_constant: Option<f64>,
    core: CoreModel,
    tail: TailModel,
    solve: Option<SolveInfo>,
}

/// Closed-form vortex `f = 2 atan(1/(sqrt(K) r^n))`, i.e.
/// `cos f = (K r^2n - 1)/(K r^2n + 1)`.
fn exact_value(k: f64, n: u32, r: f64) -> (f64, f64) {
    let x = k.sqrt() * r.powi(n as i32);
    let f = 2.0 * 1.0_f64.atan2(x);
    let fp = -2.0 * n as f64 * k.sqrt() * r.powi(n as i32 - 1) / (1.0 + x * x);
    (f, fp)
}

/// The scale family of untwisted sigma-model vortices.
pub fn exact_sigma_profile(k_fam: f64, n: u32, grid: &RadialGrid) -> Result<Profile> {
    if !(k_fam > 0.0 && k_fam.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "family constant K must be > 0, got {k_fam}"
        )));
    }
    let coupling = Coupling::sigma(n)?;
    let (f, fp): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .map(|&r| exact_value(k_fam, n, r))
        .unzip();
    let sk = k_fam.sqrt();
    let core = CoreModel::Series {
        limit: PI,
        a: -2.0 * sk,
        b: if n == 1 { 2.0 / 3.0 * k_fam * sk } else { 0.0 },
        b_power: series_b_power(n),
    };
    let tail = TailModel::PowerLaw {
        amplitude: 2.0 / sk,
    };
    Ok(Profile {
        grid: grid.clone(),
        f,
        fp,
        coupling,
        provenance: Provenance::Exact,
        family_constant: Some(k_fam),
        core,
        tail,
        solve: None,
    })
}

impl Profile {
    /// Wrap caller-supplied nodal values. The core series is extrapolated
    /// from the first node and the tail chosen from the coupling: massive
    /// for `mk > 0`, power law otherwise, flat when the profile ends flat.
    pub fn from_samples(
        grid: RadialGrid,
        f: Vec<f64>,
        fp: Vec<f64>,
        coupling: Coupling,
    ) -> Result<Self> {
        if f.len() != grid.len() || fp.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "profile arrays have {} / {} entries for {} grid nodes",
                f.len(),
                fp.len(),
                grid.len()
            )));
        }
        if f.iter().chain(&fp).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "profile values must be finite".into(),
            ));
        }
        let n = coupling.n;
        let r0 = grid.r0();
        let a = fp[0] / (n as f64 * r0.powi(n as i32 - 1));
        let core = CoreModel::Series {
            limit: f[0] - a * r0.powi(n as i32),
            a,
            b: 0.0,
            b_power: series_b_power(n),
        };
        let last = grid.len() - 1;
        let tail = infer_tail(&coupling, grid.rmax(), f[last], fp[last])?;
        Ok(Self {
            grid,
            f,
            fp,
            coupling,
            provenance: Provenance::Sampled,
            family_constant: None,
            core,
            tail,
            solve: None,
        })
    }

    /// Assemble a profile from all of its parts (used by file I/O and the solver).
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        grid: RadialGrid,
        f: Vec<f64>,
        fp: Vec<f64>,
        coupling: Coupling,
        provenance: Provenance,
        family_constant: Option<f64>,
        core: CoreModel,
        tail: TailModel,
        solve: Option<SolveInfo>,
    ) -> Self {
        Self {
            grid,
            f,
            fp,
            coupling,
            provenance,
            family_constant,
            core,
            tail,
            solve,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }
    pub fn r(&self) -> &[f64] {
        self.grid.nodes()
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn fprime(&self) -> &[f64] {
        &self.fp
    }
    pub fn n(&self) -> u32 {
        self.coupling.n
    }
    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn family_constant(&self) -> Option<f64> {
        self.family_constant
    }
    pub fn core(&self) -> &CoreModel {
        &self.core
    }
    pub fn tail(&self) -> &TailModel {
        &self.tail
    }
    pub fn solve_info(&self) -> Option<&SolveInfo> {
        self.solve.as_ref()
    }

    /// `lim_{r -> 0} f`.
    pub fn core_limit(&self) -> f64 {
        self.core.limit()
    }

    /// `lim_{r -> inf} f`.
    pub fn tail_limit(&self) -> f64 {
        self.tail.limit()
    }

    /// Leading series coefficients with the tail amplitude when power-law.
    pub fn series_coeffs(&self) -> SeriesCoeffs {
        let CoreModel::Series { a, b, .. } = self.core;
        let amplitude = match self.tail {
            TailModel::PowerLaw { amplitude } => Some(amplitude),
            _ => None,
        };
        SeriesCoeffs { a, b, amplitude }
    }

    /// Whether `sin f` vanishes at both ends, i.e. the field is constant on
    /// the core axis and at spatial infinity.
    pub fn boundary_valid(&self) -> bool {
        self.core_limit().sin().abs() <= 1e-6 && self.tail_limit().sin().abs() <= 1e-6
    }

    /// Strictly decreasing over the grid.
    pub fn is_monotone(&self) -> bool {
        self.f.windows(2).all(|w| w[1] < w[0])
    }

    /// `(f, f')` at any `r >= 0`: closed form for exact profiles, otherwise
    /// core series below the grid, cubic Hermite on it, tail model above.
    pub fn sample(&self, r: f64) -> (f64, f64) {
        let r = r.max(0.0);
        if let (Provenance::Exact, Some(k)) = (self.provenance, self.family_constant) {
            return exact_value(k, self.n(), r);
        }
        if r < self.grid.r0() {
            return self.core.eval(self.n(), r);
        }
        if r > self.grid.rmax() {
            return self.tail.eval(self.n(), r);
        }
        self.hermite(r)
    }

    /// Like [`Profile::sample`] but rejects radii outside the grid.
    pub fn sample_in_grid(&self, r: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.grid.r0(), self.grid.rmax());
        if !(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange { r, lo, hi });
        }
        Ok(self.sample(r.clamp(lo, hi)))
    }

    fn hermite(&self, r: f64) -> (f64, f64) {
        let nodes = self.grid.nodes();
        let i = self.grid.interval(r);
        let (r0, r1) = (nodes[i], nodes[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (f0, f1, d0, d1) = (self.f[i], self.f[i + 1], self.fp[i] * h, self.fp[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * d1;
        let df = (6.0 * t2 - 6.0 * t) * f0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * f1
            + (3.0 * t2 - 2.0 * t) * d1;
        (f, df / h)
    }

    /// `r |f''_FD - f''_rhs|` maximised over the nodes, where `f''_FD` is a
    /// 7-point finite-difference derivative of the stored `f'`.
    pub fn residual(&self) -> Result<f64> {
        residual_of(
            self.grid.nodes(),
            &self.f,
            &self.fp,
            &OdeParams::from_coupling(&self.coupling),
        )
    }

    /// The profile `f(q r)` on the same grid.
    pub fn rescaled(&self, q: f64) -> Result<Profile> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale q must be > 0, got {q}"
            )));
        }
        let n = self.n();
        if let (Provenance::Exact, Some(k)) = (self.provenance, self.family_constant) {
            let mut p = exact_sigma_profile(k * q.powi(2 * n as i32), n, &self.grid)?;
            p.coupling = self.coupling;
            return Ok(p);
        }
        let (f, fp): (Vec<f64>, Vec<f64>) = self
            .grid
            .nodes()
            .iter()
            .map(|&r| {
                let (f, d) = self.sample(q * r);
                (f, q * d)
            })
            .unzip();
        let last = f.len() - 1;
        let rmax = self.grid.rmax();
        let tail = match self.tail {
            TailModel::PowerLaw { .. } => TailModel::power_law_through(n, rmax, f[last])?,
            TailModel::Bessel { mass, .. } => TailModel::bessel_through(n, mass * q, rmax, f[last]),
            TailModel::Flat { value } => TailModel::Flat { value },
        };
        Ok(Profile {
            grid: self.grid.clone(),
            f,
            fp,
            coupling: self.coupling,
            provenance: self.provenance,
            family_constant: self.family_constant.map(|k| k * q.powi(2 * n as i32)),
            core: self.core.rescaled(n, q),
            tail,
            solve: self.solve.clone(),
        })
    }

    /// `int_0^inf g(r, f, f') dr`: Gauss-Legendre on the core, Simpson over
    /// the grid, Gauss-Legendre with `r = R/t` over the tail.
    pub fn integrate<G: Fn(f64, f64, f64) -> f64>(&self, g: G) -> RadialIntegral {
        let quad = AdaptiveGauss::default();
        let at = |r: f64| {
            let (f, d) = self.sample(r);
            g(r, f, d)
        };
        let (core, core_err) = quad.integrate(&at, 0.0, self.grid.r0(), 1e-15);
        let values: Vec<f64> = self
            .grid
            .nodes()
            .iter()
            .zip(self.f.iter().zip(&self.fp))
            .map(|(&r, (&f, &d))| g(r, f, d))
            .collect();
        let (interior, interior_err) = self.grid.simpson(&values);
        let (tail, tail_err) = quad.integrate_to_infinity(&at, self.grid.rmax(), 1e-14);
        RadialIntegral {
            core,
            interior,
            tail,
            error: core_err + interior_err + tail_err,
        }
    }
}

/// Pieces of a radial integral over `[0, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialIntegral {
    pub core: f64,
    pub interior: f64,
    pub tail: f64,
    pub error: f64,
}

impl RadialIntegral {
    pub fn total(&self) -> f64 {
        self.core + self.interior + self.tail
    }
}

fn infer_tail(c: &Coupling, rmax: f64, f: f64, fp: f64) -> Result<TailModel> {
    if fp == 0.0 {
        return Ok(TailModel::Flat { value: f });
    }
    if c.mk > 0.0 {
        return Ok(TailModel::bessel_through(c.n, c.mk, rmax, f));
    }
    TailModel::power_law_through(c.n, rmax, f).or(Ok(TailModel::Flat { value: f }))
}

pub(crate) fn residual_of(r: &[f64], f: &[f64], fp: &[f64], p: &OdeParams) -> Result<f64> {
    let fpp = derivative_on_nodes(r, fp, 7);
    let mut worst: f64 = 0.0;
    for i in 0..r.len() {
        let rhs = ode_rhs(r[i], f[i], fp[i], p)?;
        worst = worst.max(r[i] * (fpp[i] - rhs).abs());
    }
    Ok(worst)
}

/// Outcome of [`asymptotic_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AsymptoticFit {
    /// Least-squares amplitude of `A r^-n - A^3 r^-3n / 12`.
    PowerLaw {
        amplitude: f64,
        rms_residual: f64,
        points: usize,
        warning: Option<String>,
    },
    /// Slope of `ln(f sqrt r)` against `r`, compared with `mk`.
    Exponential {
        rate: f64,
        mk: f64,
        rms_residual: f64,
        points: usize,
        warning: Option<String>,
    },
}

/// Fit the far field of `profile` on nodes with `r > 10`.
pub fn asymptotic_check(profile: &Profile, c: &Coupling) -> AsymptoticFit {
    let r = profile.r();
    let f = profile.f();
    let mut idx: Vec<usize> = (0..r.len()).filter(|&i| r[i] > 10.0).collect();
    let mut warning = None;
    if idx.len() < 8 {
        let start = r.len() - r.len() / 5;
        idx = (start..r.len()).collect();
        warning = Some(format!(
            "grid ends at r = {:.3}; fit uses the last 20% of nodes and may not be asymptotic",
            profile.grid().rmax()
        ));
    }
    let n = c.n as i32;
    if c.mk > 0.0 {
        let pts: Vec<(f64, f64)> = idx
            .iter()
            .filter(|&&i| f[i] > 0.0)
            .map(|&i| (r[i], (f[i] * r[i].sqrt()).ln()))
            .collect();
        let (slope, rms) = linear_fit(&pts);
        return AsymptoticFit::Exponential {
            rate: -slope,
            mk: c.mk,
            rms_residual: rms,
            points: pts.len(),
            warning,
        };
    }
    // Gauss-Newton on the single amplitude.
    let model = |a: f64, r: f64| {
        let x = a * r.powi(-n);
        (x - x * x * x / 12.0, r.powi(-n) * (1.0 - x * x / 4.0))
    };
    let mut a = {
        let (num, den) = idx.iter().fold((0.0, 0.0), |(p, q), &i| {
            let b = r[i].powi(-n);
            (p + f[i] * b, q + b * b)
        });
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    };
    for _ in 0..50 {
        let (mut jr, mut jj) = (0.0, 0.0);
        for &i in &idx {
            let (m, d) = model(a, r[i]);
            jr += d * (f[i] - m);
            jj += d * d;
        }
        if jj == 0.0 {
            break;
        }
        let step = jr / jj;
        a += step;
        if step.abs() <= 1e-15 * a.abs() {
            break;
        }
    }
    let rms = (idx
        .iter()
        .map(|&i| (f[i] - model(a, r[i]).0).powi(2))
        .sum::<f64>()
        / idx.len().max(1) as f64)
        .sqrt();
    AsymptoticFit::PowerLaw {
        amplitude: a,
        rms_residual: rms,
        points: idx.len(),
        warning,
    }
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2))
    });
    let slope = sxy / sxx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    (slope, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn default_grid() -> RadialGrid {
        RadialGrid::log(DEFAULT_R0, DEFAULT_RMAX, DEFAULT_NODES).unwrap()
    }

    #[test]
    fn grid_construction_and_validation() {
        let g = RadialGrid::log(1e-4, 40.0, 101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g.r0(), 1e-4);
        assert_eq!(g.rmax(), 40.0);
        assert!(RadialGrid::log(0.0, 1.0, 101).is_err());
        assert!(RadialGrid::log(1.0, 0.5, 101).is_err());
        assert!(RadialGrid::uniform(0.1, 1.0, 64).is_err());
        let again = RadialGrid::from_nodes(g.nodes().to_vec(), GridScheme::Log).unwrap();
        assert_eq!(again, g);
        assert!(RadialGrid::from_nodes(g.nodes().to_vec(), GridScheme::Uniform).is_err());
    }

    #[test]
    fn exact_profile_examples() {
        let g = RadialGrid::uniform(0.5, 4.0, 71).unwrap();
        let p = exact_sigma_profile(1.0, 1, &g).unwrap();
        let (f1, d1) = p.sample(1.0);
        assert!((f1 - FRAC_PI_2).abs() < 1e-15);
        assert!((d1 + 1.0).abs() < 1e-15);
        let (f2, _) = p.sample(2.0);
        assert!((f2.cos() - 0.6).abs() < 1e-15);
        assert!((f2 - 0.927295218001612).abs() < 1e-12);
        assert!(exact_sigma_profile(0.0, 1, &g).is_err());
    }

    #[test]
    fn exact_profile_is_pi_minus_two_arctan() {
        let g = default_grid();
        let p = exact_sigma_profile(1.0, 1, &g).unwrap();
        for (&r, &f) in p.r().iter().zip(p.f()) {
            assert!((f - (PI - 2.0 * r.atan())).abs() < 1e-14);
        }
    }

    #[test]
    fn ode_rhs_examples() {
        let p = OdeParams {
            epsilon: 0.0,
            zeta: 0.0,
            n: 1,
            mk2: 0.0,
        };
        assert!((ode_rhs(1.0, FRAC_PI_2, -1.0, &p).unwrap() - 1.0).abs() < 1e-15);
        let q = OdeParams {
            epsilon: 0.4,
            zeta: 0.1,
            n: 2,
            mk2: 0.25,
        };
        assert!(ode_rhs(3.0, PI, 0.0, &q).unwrap().abs() < 1e-15);
    }

    #[test]
    fn ode_rhs_singular_denominator() {
        let p = OdeParams {
            epsilon: -1.0,
            zeta: 0.0,
            n: 1,
            mk2: 0.0,
        };
        assert!(matches!(
            ode_rhs(1.0, FRAC_PI_2, 0.0, &p),
            Err(Error::SingularOde { .. })
        ));
    }

    #[test]
    fn ode_rhs_matches_exact_second_derivative() {
        let p = OdeParams {
            epsilon: 0.0,
            zeta: 0.0,
            n: 1,
            mk2: 0.0,
        };
        for i in 0..=200 {
            let r = 0.1 + (10.0 - 0.1) * i as f64 / 200.0;
            let f = PI - 2.0 * r.atan();
            let fp = -2.0 / (1.0 + r * r);
            let fpp = 4.0 * r / (1.0 + r * r).powi(2);
            assert!((ode_rhs(r, f, fp, &p).unwrap() - fpp).abs() <= 1e-10);
        }
    }

    #[test]
    fn series_start_examples() {
        let c = SeriesCoeffs {
            a: -2.0,
            b: 0.0,
            amplitude: None,
        };
        let (f, fp) = series_start(&c, 1, 1e-3).unwrap();
        assert!((f - (PI - 2e-3)).abs() < 1e-15);
        assert!((fp + 2.0).abs() < 1e-15);
        let c2 = SeriesCoeffs {
            a: -1.0,
            b: 0.0,
            amplitude: None,
        };
        let (f, _) = series_start(&c2, 2, 1e-2).unwrap();
        assert!((f - (PI - 1e-4)).abs() < 1e-15);
        let (f, _) = series_start(&c, 1, 1e-12).unwrap();
        assert!((f - PI).abs() < 1e-11);
        assert!(matches!(
            series_start(&c, 1, 0.1),
            Err(Error::SeriesRange { .. })
        ));
    }

    #[test]
    fn series_b_reproduces_exact_family() {
        let p = OdeParams {
            epsilon: 0.0,
            zeta: 0.0,
            n: 1,
            mk2: 0.0,
        };
        for k in [0.25_f64, 1.0, 4.0] {
            let a = -2.0 * k.sqrt();
            assert!((p.series_b(a) - 2.0 / 3.0 * k.powf(1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_residual_is_small() {
        let g = default_grid();
        for n in 1..=3 {
            for k in [0.25, 1.0, 4.0] {
                let p = exact_sigma_profile(k, n, &g).unwrap();
                let res = p.residual().unwrap();
                assert!(res <= 1e-9, "n={n} K={k} residual {res:e}");
            }
        }
    }

    #[test]
    fn exact_trig_matches_closed_form() {
        let g = default_grid();
        let p = exact_sigma_profile(4.0, 2, &g).unwrap();
        for (&r, &f) in p.r().iter().zip(p.f()) {
            let x = 4.0 * r.powi(4);
            assert!((f.cos() - (x - 1.0) / (x + 1.0)).abs() <= 1e-12);
            assert!((f.sin() - 2.0 * 2.0 * r * r / (x + 1.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn hermite_sampling_between_nodes() {
        let g = RadialGrid::log(1e-4, 40.0, 2001).unwrap();
        let e = exact_sigma_profile(1.0, 1, &g).unwrap();
        let s =
            Profile::from_samples(g, e.f().to_vec(), e.fprime().to_vec(), *e.coupling()).unwrap();
        for r in [1e-3, 0.37, 1.0, 5.5, 33.3] {
            let (f, d) = s.sample(r);
            let (fe, de) = e.sample(r);
            assert!((f - fe).abs() < 1e-9, "r={r}");
            assert!((d - de).abs() < 1e-6, "r={r}");
        }
        // tails
        let (f, _) = s.sample(80.0);
        assert!((f - e.sample(80.0).0).abs() < 1e-6);
        let (f, _) = s.sample(1e-6);
        assert!((f - e.sample(1e-6).0).abs() < 1e-10);
        assert!(s.boundary_valid());
    }

    #[test]
    fn power_law_tail_anchor() {
        let t = TailModel::power_law_through(1, 40.0, 0.05).unwrap();
        assert!((t.eval(1, 40.0).0 - 0.05).abs() < 1e-17);
        assert!(TailModel::power_law_through(1, 1.0, 2.0).is_err());
        let b = TailModel::bessel_through(1, 0.5, 20.0, 1e-4);
        assert!((b.eval(1, 20.0).0 - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn rescaled_exact_profile() {
        let g = default_grid();
        let p = exact_sigma_profile(1.0, 2, &g).unwrap();
        let q = p.rescaled(2.0).unwrap();
        assert_eq!(q.family_constant(), Some(16.0));
        let (f, d) = q.sample(0.5);
        let (f1, d1) = p.sample(1.0);
        assert!((f - f1).abs() < 1e-15 && (d - 2.0 * d1).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_amplitudes() {
        let g = default_grid();
        for (k, expect) in [(1.0, 2.0), (4.0, 1.0)] {
            let p = exact_sigma_profile(k, 1, &g).unwrap();
            match asymptotic_check(&p, p.coupling()) {
                AsymptoticFit::PowerLaw {
                    amplitude, warning, ..
                } => {
                    assert!((amplitude - expect).abs() < 0.01 * expect);
                    assert!(warning.is_none());
                }
                other => panic!("{other:?}"),
            }
        }
        let c = Coupling::sigma(1).unwrap();
        let zero =
            Profile::from_samples(g.clone(), vec![0.0; g.len()], vec![0.0; g.len()], c).unwrap();
        match asymptotic_check(&zero, &c) {
            AsymptoticFit::PowerLaw { amplitude, .. } => assert_eq!(amplitude, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_grid_fit_warns() {
        let g = RadialGrid::log(1e-3, 5.0, 201).unwrap();
        let p = exact_sigma_profile(1.0, 1, &g).unwrap();
        match asymptotic_check(&p, p.coupling()) {
            AsymptoticFit::PowerLaw { warning, .. } => assert!(warning.is_some()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn integrate_energy_tail_closed_form() {
        // int_R^inf sigma r dr for the exact family equals 2n/(K R^2n + 1)
        let g = default_grid();
        let (k, n) = (1.0, 1u32);
        let p = exact_sigma_profile(k, n, &g).unwrap();
        let nf = n as f64;
        let res = p.integrate(|r, f, d| 0.5 * (d * d + f.sin().powi(2) * nf * nf / (r * r)) * r);
        let rmax = g.rmax();
        let expect = 2.0 * nf / (k * rmax.powi(2 * n as i32) + 1.0);
        assert!(
            (res.tail - expect).abs() < 1e-12,
            "{} vs {expect}",
            res.tail
        );
        assert!((res.total() - 2.0 * nf).abs() < 1e-8);
    }
}
