//! Topological charge, field strength, gauge potential and Hopf charge.
//!
//! `T` is evaluated in the default orientation (`theta = atan2(x, y)`), where
//! it equals `-n`. `F_ab`, `A_c` and the Hopf density are written in the
//! `theta = atan2(y, x)` orientation, in which `F_xy = -f' sin f n / r`; both
//! choices are recorded in [`ChargeReport::convention`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AzimuthConvention, Coupling, PlanePoint, UnitField3, Vec3};
use crate::profile::Profile;

/// Axisymmetric `T` with its quadrature cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisymCharge {
    /// Quadrature value (reported as `T`).
    pub t: f64,
    /// `(n/2)(cos f(0) - cos f(inf))`.
    pub t_boundary: f64,
    /// `|T_boundary - T| + Simpson error estimate`.
    pub error: f64,
}

fn require_boundaries(profile: &Profile) -> Result<()> {
    if !profile.boundary_valid() {
        return Err(Error::ChargeUndefined(format!(
            "profile limits f(0) = {}, f(inf) = {} are not both multiples of pi",
            profile.core_limit(),
            profile.tail_limit()
        )));
    }
    Ok(())
}

/// `int_0^inf sin f f' dr`: Simpson over the grid, the two ends in closed
/// form (the integrand is `-d(cos f)/dr`). Returns `(value, closed form, error)`.
fn sin_f_fprime_integral(profile: &Profile) -> (f64, f64, f64) {
    let values: Vec<f64> = profile
        .f()
        .iter()
        .zip(profile.fprime())
        .map(|(f, d)| f.sin() * d)
        .collect();
    let (interior, err) = profile.grid().simpson(&values);
    let f = profile.f();
    let (c0, cinf) = (profile.core_limit().cos(), profile.tail_limit().cos());
    let core = c0 - f[0].cos();
    let tail = f[f.len() - 1].cos() - cinf;
    (core + interior + tail, c0 - cinf, err)
}

/// `T = (n/2) int sin f f' dr` for the axisymmetric ansatz.
pub fn topo_charge_axisym(profile: &Profile, n: u32) -> Result<AxisymCharge> {
    require_boundaries(profile)?;
    let half_n = 0.5 * n as f64;
    let (quad, closed, err) = sin_f_fprime_integral(profile);
    let t = half_n * quad;
    let t_boundary = half_n * closed;
    Ok(AxisymCharge {
        t,
        t_boundary,
        error: (t - t_boundary).abs() + half_n * err,
    })
}

/// Polar cell grid for [`topo_charge_general`]: cell-centred midpoints in
/// `ln r` over `[r_in, r_out]` and in angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarQuadrature {
    pub r_in: f64,
    pub r_out: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for PolarQuadrature {
    fn default() -> Self {
        Self {
            r_in: 1e-3,
            r_out: 40.0,
            n_r: 512,
            n_theta: 512,
        }
    }
}

impl PolarQuadrature {
    pub fn square(n: usize) -> Self {
        Self {
            n_r: n,
            n_theta: n,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_in > 0.0 && self.r_out > self.r_in && self.r_out.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "quadrature radii must satisfy 0 < r_in < r_out, got [{}, {}]",
                self.r_in, self.r_out
            )));
        }
        if self.n_r < 4 || self.n_theta < 8 {
            return Err(Error::InvalidArgument(format!(
                "quadrature grid {}x{} is too coarse",
                self.n_r, self.n_theta
            )));
        }
        Ok(())
    }
}

/// Result of the 2-D charge quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralCharge {
    pub t: f64,
    /// Annulus contribution.
    pub interior: f64,
    /// Disk `r < r_in`, from the solid angle of its boundary image.
    pub inner: f64,
    /// Region `r > r_out`, likewise.
    pub outer: f64,
    pub warning: Option<String>,
}

/// Signed solid angle of the spherical triangle `(p, a, b)`.
fn triangle_solid_angle(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let num = p.dot(&a.cross(b));
    let den = 1.0 + p.dot(a) + p.dot(b) + a.dot(b);
    2.0 * num.atan2(den)
}

/// Solid angle enclosed by a closed loop on the sphere, fanned from the
/// normalised mean of its points. Also returns the largest angular distance
/// of a loop point from that centre.
fn loop_solid_angle(points: &[Vec3]) -> (f64, f64) {
    let mean: Vec3 = points.iter().sum::<Vec3>() / points.len() as f64;
    let norm = mean.norm();
    if norm < 1e-12 {
        return (0.0, PI);
    }
    let p = mean / norm;
    let mut omega = 0.0;
    let mut spread: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        let b = &points[(i + 1) % points.len()];
        omega += triangle_solid_angle(&p, a, b);
        spread = spread.max(p.dot(a).clamp(-1.0, 1.0).acos());
    }
    (omega, spread)
}

/// `T = (1/4 pi) int phi . (d_x phi x d_y phi) dx dy` for an arbitrary field.
///
/// Partials are central differences at a step of 1/8 of the finest cell
/// spacing. The disk inside `r_in` and the region beyond `r_out` are
/// compensated with the solid angles swept by the images of their boundary
/// circles, so the field only needs to be continuous there.
pub fn topo_charge_general<S>(field: &S, quad: &PolarQuadrature) -> Result<GeneralCharge>
where
    S: Fn(f64, f64) -> UnitField3 + Sync,
{
    quad.validate()?;
    let (l0, l1) = (quad.r_in.ln(), quad.r_out.ln());
    let du = (l1 - l0) / quad.n_r as f64;
    let dpsi = 2.0 * PI / quad.n_theta as f64;
    let h = (quad.r_in * (du.exp() - 1.0)).min(quad.r_in * dpsi) / 8.0;
    let rows: Vec<f64> = (0..quad.n_r)
        .into_par_iter()
        .map(|i| {
            let r = (l0 + (i as f64 + 0.5) * du).exp();
            let mut row = 0.0;
            for j in 0..quad.n_theta {
                let psi = (j as f64 + 0.5) * dpsi;
                let (x, y) = (r * psi.cos(), r * psi.sin());
                let phi = *field(x, y).as_vec();
                let dx = (field(x + h, y).into_vec() - field(x - h, y).into_vec()) / (2.0 * h);
                let dy = (field(x, y + h).into_vec() - field(x, y - h).into_vec()) / (2.0 * h);
                row += phi.dot(&dx.cross(&dy));
            }
            row * r * r
        })
        .collect();
    let interior = rows.iter().sum::<f64>() * du * dpsi / (4.0 * PI);

    let ring = |r: f64| -> Vec<Vec3> {
        (0..quad.n_theta)
            .map(|j| {
                let psi = j as f64 * dpsi;
                field(r * psi.cos(), r * psi.sin()).into_vec()
            })
            .collect()
    };
    let (om_in, _) = loop_solid_angle(&ring(quad.r_in));
    let (om_out, spread) = loop_solid_angle(&ring(quad.r_out));
    let inner = om_in / (4.0 * PI);
    // the exterior is bounded by the outer circle with reversed orientation
    let outer = -om_out / (4.0 * PI);
    let warning = (spread > 0.5).then(|| {
        format!(
            "field is far from constant at r = {} (boundary image spans {spread:.3} rad); \
             partial sum {interior:.6} may not converge",
            quad.r_out
        )
    });
    Ok(GeneralCharge {
        t: interior + inner + outer,
        interior,
        inner,
        outer,
        warning,
    })
}

/// `K(r) = (cos f - cos f(0)) / r^2`, i.e. `(1 + cos f)/r^2` for a vortex.
/// Inside the grid start it takes its series limit.
pub fn k_function(profile: &Profile, r: f64) -> f64 {
    let f0 = profile.core_limit();
    if r <= profile.grid().r0() {
        if profile.n() == 1 {
            let a = profile.series_coeffs().a;
            return -f0.cos() * a * a / 2.0;
        }
        return 0.0;
    }
    let (f, _) = profile.sample(r);
    -2.0 * (0.5 * (f + f0)).sin() * (0.5 * (f - f0)).sin() / (r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugePotential {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GaugePotential {
    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `A = (-n K y, n K x, mk cos f)`.
pub fn gauge_potential(profile: &Profile, c: &Coupling, p: &PlanePoint) -> GaugePotential {
    let r = p.r();
    let k = k_function(profile, r);
    let (f, _) = profile.sample(r);
    let n = c.n as f64;
    GaugePotential {
        x: -n * k * p.y,
        y: n * k * p.x,
        z: c.mk * f.cos(),
    }
}

/// Antisymmetric `F_ab` at a point, indices `(x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldStrength {
    pub f: [[f64; 3]; 3],
    pub point: PlanePoint,
}

impl FieldStrength {
    fn from_upper(xy: f64, xz: f64, yz: f64, point: PlanePoint) -> Self {
        Self {
            f: [[0.0, xy, xz], [-xy, 0.0, yz], [-xz, -yz, 0.0]],
            point,
        }
    }

    pub fn xy(&self) -> f64 {
        self.f[0][1]
    }
    pub fn xz(&self) -> f64 {
        self.f[0][2]
    }
    pub fn yz(&self) -> f64 {
        self.f[1][2]
    }
}

/// `F_xy = -f' sin f n / r`, `F_az = -mk sin f f' x_a / r`.
pub fn field_strength(profile: &Profile, c: &Coupling, p: &PlanePoint) -> Result<FieldStrength> {
    let r = p.r();
    if !(r > 0.0) {
        return Err(Error::SingularPoint(
            "field strength is not defined on the string axis r = 0".into(),
        ));
    }
    let (f, fp) = profile.sample(r);
    let s = f.sin();
    let n = c.n as f64;
    let twist = -c.mk * s * fp / r;
    Ok(FieldStrength::from_upper(
        -fp * s * n / r,
        twist * p.x,
        twist * p.y,
        *p,
    ))
}

/// The same two-form as the pullback `phi . (d_a phi x d_b phi)` of the
/// ansatz, in the orientation used for `F`.
pub fn pullback_field_strength(
    profile: &Profile,
    c: &Coupling,
    p: &PlanePoint,
) -> Result<FieldStrength> {
    let d = crate::field::phi_partials_with(p, profile, c, AzimuthConvention::FromX)?;
    let (f, _) = profile.sample(p.r());
    let phi = crate::field::eval_phi(f, c.phase(p.theta(AzimuthConvention::FromX), p.z)).into_vec();
    let comp = |a: usize, b: usize| phi.dot(&d[a].cross(&d[b]));
    Ok(FieldStrength::from_upper(
        comp(0, 1),
        comp(0, 2),
        comp(1, 2),
        *p,
    ))
}

/// `max_ab |F_ab - (d_a A_b - d_b A_a)|` with central differences of step `h`.
pub fn verify_curl(profile: &Profile, c: &Coupling, p: &PlanePoint, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(p.r() > 2.0 * h) {
        return Err(Error::InvalidArgument(format!(
            "curl check needs h > 0 and r > 2h (r = {}, h = {h})",
            p.r()
        )));
    }
    let fs = field_strength(profile, c, p)?;
    let shifted = |axis: usize, sign: f64| {
        let mut q = *p;
        match axis {
            0 => q.x += sign * h,
            1 => q.y += sign * h,
            _ => q.z += sign * h,
        }
        gauge_potential(profile, c, &q).as_array()
    };
    // dA[a][b] = d_a A_b
    let mut da = [[0.0; 3]; 3];
    for (a, row) in da.iter_mut().enumerate() {
        let (plus, minus) = (shifted(a, 1.0), shifted(a, -1.0));
        for b in 0..3 {
            row[b] = (plus[b] - minus[b]) / (2.0 * h);
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            worst = worst.max((fs.f[a][b] - (da[a][b] - da[b][a])).abs());
        }
    }
    Ok(worst)
}

/// `eps^{abc} F_ab A_c = 2 mk n f' sin f / r`.
pub fn hopf_density(profile: &Profile, c: &Coupling, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::SingularPoint("Hopf density at r = 0".into()));
    }
    let (f, fp) = profile.sample(r);
    Ok(2.0 * c.mk * c.n as f64 * fp * f.sin() / r)
}

/// `eps^{abc} F_ab A_c` contracted from [`field_strength`] and [`gauge_potential`].
pub fn hopf_density_assembled(profile: &Profile, c: &Coupling, p: &PlanePoint) -> Result<f64> {
    let fs = field_strength(profile, c, p)?;
    let a = gauge_potential(profile, c, p).as_array();
    let mut sum = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = crate::field::levi_civita(i + 1, j + 1, k + 1)? as f64;
                if e != 0.0 {
                    sum += e * fs.f[i][j] * a[k];
                }
            }
        }
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfCharge {
    /// Quadrature value over the slab of height `delta_z`.
    pub c: f64,
    pub per_length: f64,
    /// `-(mk n / pi)(cos f(inf) - cos f(0)) delta_z`.
    pub c_boundary: f64,
    pub error: f64,
}

/// `C = (1/4 pi^2) int eps^{abc} F_ab A_c d^3x` over a slab of height `delta_z`.
pub fn hopf_charge(profile: &Profile, c: &Coupling, delta_z: f64) -> Result<HopfCharge> {
    if !(delta_z > 0.0 && delta_z.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta_z must be a positive length, got {delta_z}"
        )));
    }
    require_boundaries(profile)?;
    let scale = c.mk * c.n as f64 * delta_z / PI;
    let (quad, closed, err) = sin_f_fprime_integral(profile);
    // `+ 0.0` keeps the untwisted charge from printing as -0
    let value = scale * quad + 0.0;
    let boundary = scale * closed + 0.0;
    Ok(HopfCharge {
        c: value,
        per_length: value / delta_z,
        c_boundary: boundary,
        error: (value - boundary).abs() + scale.abs() * err,
    })
}

/// How the two azimuth orientations enter a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionInfo {
    pub topological: String,
    pub hopf: String,
}

impl Default for ConventionInfo {
    fn default() -> Self {
        Self {
            topological: AzimuthConvention::FromY.tag().into(),
            hopf: AzimuthConvention::FromX.tag().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_abs")]
    pub t_abs: f64,
    #[serde(rename = "T_err")]
    pub t_err: f64,
    #[serde(rename = "T_general", skip_serializing_if = "Option::is_none")]
    pub t_general: Option<f64>,
    pub hopf_per_length: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_err")]
    pub c_err: f64,
    pub delta_z: f64,
    pub coupling: Coupling,
    pub convention: ConventionInfo,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// All charges of `profile` under coupling `c`; `general` additionally runs
/// the 2-D quadrature on the ansatz field.
pub fn charge_report(
    profile: &Profile,
    c: &Coupling,
    delta_z: f64,
    general: Option<&PolarQuadrature>,
) -> Result<ChargeReport> {
    let t = topo_charge_axisym(profile, c.n)?;
    let hopf = hopf_charge(profile, c, delta_z)?;
    let mut warnings = Vec::new();
    let t_general = match general {
        Some(q) => {
            let sampler = crate::field::ansatz_sampler(profile, c, AzimuthConvention::FromY, 0.0);
            let g = topo_charge_general(&sampler, q)?;
            warnings.extend(g.warning);
            Some(g.t)
        }
        None => None,
    };
    Ok(ChargeReport {
        t: t.t,
        t_abs: t.t.abs(),
        t_err: t.error,
        t_general,
        hopf_per_length: hopf.per_length,
        c: hopf.c,
        c_err: hopf.error,
        delta_z,
        coupling: *c,
        convention: ConventionInfo::default(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ansatz_sampler, UnitField3};
    use crate::profile::{exact_sigma_profile, RadialGrid};

    fn grid() -> RadialGrid {
        RadialGrid::log(1e-4, 40.0, 4001).unwrap()
    }

    fn exact(k: f64, n: u32) -> Profile {
        exact_sigma_profile(k, n, &grid()).unwrap()
    }

    fn constant_zero() -> Profile {
        let g = grid();
        let c = Coupling::sigma(1).unwrap();
        Profile::from_samples(g.clone(), vec![0.0; g.len()], vec![0.0; g.len()], c).unwrap()
    }

    #[test]
    fn axisym_charge_examples() {
        for n in [1, 3] {
            let t = topo_charge_axisym(&exact(1.0, n), n).unwrap();
            assert!((t.t + n as f64).abs() <= 1e-9, "n={n}: {t:?}");
            assert!(t.error <= 1e-8);
        }
        let t = topo_charge_axisym(&constant_zero(), 1).unwrap();
        assert_eq!(t.t, 0.0);
    }

    #[test]
    fn charge_needs_valid_boundaries() {
        let g = grid();
        let c = Coupling::sigma(1).unwrap();
        let half =
            Profile::from_samples(g.clone(), vec![1.0; g.len()], vec![0.0; g.len()], c).unwrap();
        assert!(matches!(
            topo_charge_axisym(&half, 1),
            Err(Error::ChargeUndefined(_))
        ));
        assert!(matches!(
            hopf_charge(&half, &c, 1.0),
            Err(Error::ChargeUndefined(_))
        ));
    }

    #[test]
    fn general_charge_of_uniform_field() {
        let north = |_x: f64, _y: f64| UnitField3::north();
        let g = topo_charge_general(&north, &PolarQuadrature::square(64)).unwrap();
        assert_eq!(g.t, 0.0);
    }

    #[test]
    fn general_charge_of_vortex_coarse() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap();
        let s = ansatz_sampler(&p, &c, AzimuthConvention::FromY, 0.0);
        let g = topo_charge_general(&s, &PolarQuadrature::square(128)).unwrap();
        assert!((g.t + 1.0).abs() < 1e-4, "{g:?}");
        assert!(g.warning.is_none());
    }

    #[test]
    fn k_function_examples() {
        let p = exact(1.0, 1);
        assert!((k_function(&p, 1.0) - 1.0).abs() < 1e-14);
        assert!((k_function(&p, 0.0) - 2.0).abs() < 1e-14);
        assert!((k_function(&p, 1e-5) - 2.0).abs() < 1e-8);
        let far = k_function(&p, 1e3);
        assert!((far - 2.0e-6).abs() < 1e-10);
        assert_eq!(k_function(&exact(1.0, 2), 0.0), 0.0);
    }

    #[test]
    fn gauge_potential_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap().with_mk(1.0).unwrap();
        let a = gauge_potential(&p, &c, &PlanePoint::new(1.0, 0.0, 0.0));
        assert!(a.x.abs() < 1e-15 && (a.y - 1.0).abs() < 1e-14 && a.z.abs() < 1e-15);
        let far = gauge_potential(&p, &c, &PlanePoint::new(1e4, 0.0, 0.0));
        assert!((far.z - 1.0).abs() < 1e-7 && far.y.abs() < 1e-3);
        let c0 = Coupling::sigma(1).unwrap();
        assert_eq!(
            gauge_potential(&p, &c0, &PlanePoint::new(0.3, 0.2, 0.0)).z,
            0.0
        );
    }

    #[test]
    fn field_strength_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap();
        let fs = field_strength(&p, &c, &PlanePoint::new(1.0, 0.0, 0.0)).unwrap();
        assert!((fs.xy() - 1.0).abs() < 1e-14);
        assert_eq!(fs.xz(), 0.0);
        assert_eq!(fs.yz(), 0.0);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(fs.f[a][b], -fs.f[b][a]);
            }
        }
        assert!(matches!(
            field_strength(&p, &c, &PlanePoint::new(0.0, 0.0, 1.0)),
            Err(Error::SingularPoint(_))
        ));
    }

    #[test]
    fn field_strength_is_the_pullback() {
        let p = exact(1.0, 2);
        let c = Coupling::new(2, 0.7, 0.3, 1.0, 0.0).unwrap();
        for pt in [
            PlanePoint::new(0.4, -1.1, 0.2),
            PlanePoint::new(2.0, 0.5, -3.0),
        ] {
            let a = field_strength(&p, &c, &pt).unwrap();
            let b = pullback_field_strength(&p, &c, &pt).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((a.f[i][j] - b.f[i][j]).abs() < 1e-12, "{i}{j}");
                }
            }
        }
    }

    #[test]
    fn curl_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap().with_mk(1.0).unwrap();
        assert!(verify_curl(&p, &c, &PlanePoint::new(1.3, 0.7, 0.0), 1e-4).unwrap() <= 1e-6);
        let c0 = Coupling::sigma(1).unwrap();
        assert!(verify_curl(&p, &c0, &PlanePoint::new(2.0, 0.0, 0.0), 1e-4).unwrap() <= 1e-6);
        let z = constant_zero();
        assert!(verify_curl(&z, &c, &PlanePoint::new(1.0, 1.0, 0.0), 1e-4).unwrap() <= 1e-10);
    }

    #[test]
    fn hopf_density_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap().with_mk(1.0).unwrap();
        assert!((hopf_density(&p, &c, 1.0).unwrap() + 2.0).abs() < 1e-14);
        let c0 = Coupling::sigma(1).unwrap();
        assert_eq!(hopf_density(&p, &c0, 1.0).unwrap(), 0.0);
        let pt = PlanePoint::new(0.6, 0.8, 0.0);
        let assembled = hopf_density_assembled(&p, &c, &pt).unwrap();
        assert!((assembled - hopf_density(&p, &c, 1.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn hopf_charge_examples() {
        let c = Coupling::sigma(1).unwrap().with_mk(1.0).unwrap();
        let h = hopf_charge(&exact(1.0, 1), &c, 1.0).unwrap();
        assert!((h.c + 2.0 / PI).abs() <= 1e-8, "{h:?}");
        let c2 = Coupling::new(2, 3.0, 0.0, 1.0, 0.0).unwrap();
        let h = hopf_charge(&exact(1.0, 2), &c2, PI).unwrap();
        assert!((h.c + 12.0).abs() <= 1e-8, "{h:?}");
        let h = hopf_charge(&exact(1.0, 1), &Coupling::sigma(1).unwrap(), 5.0).unwrap();
        assert_eq!(h.c, 0.0);
        assert!(matches!(
            hopf_charge(&exact(1.0, 1), &c, 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn report_keys() {
        let c = Coupling::sigma(1).unwrap().with_mk(1.0).unwrap();
        let r = charge_report(&exact(1.0, 1), &c, 1.0, None).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "T",
            "T_abs",
            "T_err",
            "hopf_per_length",
            "C",
            "delta_z",
            "coupling",
            "convention",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("T_general").is_none());
    }
}
