//! The hedgehog / twisted ansatz on the unit sphere and the alternating-symbol
//! algebra behind every charge integrand.
//!
//! The field is `phi = (sin f sin g, sin f cos g, cos f)` with radial profile
//! `f(r)` and phase `g = n theta + mk z - chi`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;

pub type Vec3 = Vector3<f64>;

/// Physical parameters of the string.
///
/// `kappa` is the magnitude of the (negative) Skyrme coupling; formulas that
/// are usually written with the signed coupling use `-kappa` in its place.
/// The twist enters only as the product `mk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CouplingFields")]
pub struct Coupling {
    pub n: u32,
    pub mk: f64,
    pub chi: f64,
    pub lambda: f64,
    pub kappa: f64,
}

#[derive(Deserialize)]
struct CouplingFields {
    n: u32,
    #[serde(default)]
    mk: f64,
    #[serde(default)]
    chi: f64,
    #[serde(default = "one")]
    lambda: f64,
    #[serde(default)]
    kappa: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<CouplingFields> for Coupling {
    type Error = Error;
    fn try_from(v: CouplingFields) -> Result<Self> {
        Coupling::new(v.n, v.mk, v.chi, v.lambda, v.kappa)
    }
}

impl Coupling {
    pub fn new(n: u32, mk: f64, chi: f64, lambda: f64, kappa: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!(
                "winding number n must be >= 1, got {n}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be >= 0, got {kappa}"
            )));
        }
        if !(mk >= 0.0 && mk.is_finite()) {
            return Err(Error::InvalidArgument(format!("mk must be >= 0, got {mk}")));
        }
        if !chi.is_finite() {
            return Err(Error::InvalidArgument("chi must be finite".into()));
        }
        Ok(Self {
            n,
            mk,
            chi,
            lambda,
            kappa,
        })
    }

    /// Pure sigma-model vortex: no twist, no Skyrme term, `lambda = 1`.
    pub fn sigma(n: u32) -> Result<Self> {
        Self::new(n, 0.0, 0.0, 1.0, 0.0)
    }

    pub fn with_mk(self, mk: f64) -> Result<Self> {
        Self::new(self.n, mk, self.chi, self.lambda, self.kappa)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.n, self.mk, self.chi, self.lambda, kappa)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.n, self.mk, self.chi, lambda, self.kappa)
    }

    pub fn with_chi(self, chi: f64) -> Result<Self> {
        Self::new(self.n, self.mk, chi, self.lambda, self.kappa)
    }

    /// Phase `g = n theta + mk z - chi`.
    pub fn phase(&self, theta: f64, z: f64) -> f64 {
        self.n as f64 * theta + self.mk * z - self.chi
    }
}

/// A point on the target sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitField3(Vec3);

impl UnitField3 {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(v: Vec3) -> Result<Self> {
        let dev = (v.norm_squared() - 1.0).abs();
        if dev > Self::NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "field vector is not unit: |phi|^2 - 1 = {dev:e}"
            )));
        }
        Ok(Self(v))
    }

    /// Project an arbitrary nonzero vector onto the sphere.
    pub fn normalize(v: Vec3) -> Self {
        Self(v / v.norm())
    }

    pub fn north() -> Self {
        Self(Vec3::z())
    }

    pub fn as_vec(&self) -> &Vec3 {
        &self.0
    }

    pub fn into_vec(self) -> Vec3 {
        self.0
    }
}

/// Tangent frame of the ansatz: `W = d phi / d f`, `V = d phi / d g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVectors {
    pub w: Vec3,
    pub v: Vec3,
}

/// How the polar angle is measured in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AzimuthConvention {
    /// `theta = atan2(x, y)`, so `d_x theta = y/r^2`, `d_y theta = -x/r^2`.
    /// With `f(0) = pi`, `f(inf) = 0` this orientation gives `T = -n`.
    #[default]
    FromY,
    /// `theta = atan2(y, x)`, so `d_x theta = -y/r^2`, `d_y theta = x/r^2`.
    /// The field strength and gauge potential of the Hopf pipeline are
    /// written in this orientation.
    FromX,
}

impl AzimuthConvention {
    pub fn tag(self) -> &'static str {
        match self {
            AzimuthConvention::FromY => "theta=atan2(x,y)",
            AzimuthConvention::FromX => "theta=atan2(y,x)",
        }
    }
}

/// Cartesian evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn theta(&self, conv: AzimuthConvention) -> f64 {
        match conv {
            AzimuthConvention::FromY => self.x.atan2(self.y),
            AzimuthConvention::FromX => self.y.atan2(self.x),
        }
    }

    /// `(d_x r, d_y r, d_z r)`.
    pub fn grad_r(&self) -> Vec3 {
        let r = self.r();
        Vec3::new(self.x / r, self.y / r, 0.0)
    }

    /// `(d_x theta, d_y theta, d_z theta)` in the chosen orientation.
    pub fn grad_theta(&self, conv: AzimuthConvention) -> Vec3 {
        let r2 = self.x * self.x + self.y * self.y;
        match conv {
            AzimuthConvention::FromY => Vec3::new(self.y / r2, -self.x / r2, 0.0),
            AzimuthConvention::FromX => Vec3::new(-self.y / r2, self.x / r2, 0.0),
        }
    }
}

/// Alternating symbol on indices `1..=3`.
pub fn levi_civita(a: usize, b: usize, c: usize) -> Result<i8> {
    for i in [a, b, c] {
        if !(1..=3).contains(&i) {
            return Err(Error::InvalidIndex(i));
        }
    }
    if a == b || b == c || c == a {
        return Ok(0);
    }
    // (1,2,3) and its cyclic shifts are even
    Ok(if (b + 3 - a) % 3 == 1 { 1 } else { -1 })
}

pub fn eval_phi(f: f64, g: f64) -> UnitField3 {
    let (sf, cf) = f.sin_cos();
    let (sg, cg) = g.sin_cos();
    UnitField3(Vec3::new(sf * sg, sf * cg, cf))
}

pub fn frame_vectors(f: f64, g: f64) -> FrameVectors {
    let (sf, cf) = f.sin_cos();
    let (sg, cg) = g.sin_cos();
    FrameVectors {
        w: Vec3::new(cf * sg, cf * cg, -sf),
        v: Vec3::new(sf * cg, -sf * sg, 0.0),
    }
}

/// `eps^{abc} u_a v_b w_c`.
pub fn triple_product(u: &Vec3, v: &Vec3, w: &Vec3) -> f64 {
    // (u x v).w: the commutative products make a repeated pair cancel exactly
    u.cross(v).dot(w)
}

/// Cartesian partials `(d_x phi, d_y phi, d_z phi)` of the ansatz at `p`,
/// in the default orientation.
pub fn phi_partials(p: &PlanePoint, profile: &Profile, c: &Coupling) -> Result<[Vec3; 3]> {
    phi_partials_with(p, profile, c, AzimuthConvention::default())
}

pub fn phi_partials_with(
    p: &PlanePoint,
    profile: &Profile,
    c: &Coupling,
    conv: AzimuthConvention,
) -> Result<[Vec3; 3]> {
    let r = p.r();
    let (f, fp) = profile.sample_in_grid(r)?;
    let g = c.phase(p.theta(conv), p.z);
    let frame = frame_vectors(f, g);
    let dr = p.grad_r();
    let dtheta = p.grad_theta(conv);
    let n = c.n as f64;
    let dz = Vec3::z();
    let mut out = [Vec3::zeros(); 3];
    for (a, o) in out.iter_mut().enumerate() {
        let dg = n * dtheta[a] + c.mk * dz[a];
        *o = frame.w * (fp * dr[a]) + frame.v * dg;
    }
    Ok(out)
}

/// The ansatz as a sampler of the plane at height `z`, for use with the
/// general charge quadrature. Radii outside the grid use the profile's core
/// series and tail model.
pub fn ansatz_sampler<'a>(
    profile: &'a Profile,
    c: &'a Coupling,
    conv: AzimuthConvention,
    z: f64,
) -> impl Fn(f64, f64) -> UnitField3 + Sync + 'a {
    move |x, y| {
        let p = PlanePoint::new(x, y, z);
        let (f, _) = profile.sample(p.r());
        eval_phi(f, c.phase(p.theta(conv), z))
    }
}
