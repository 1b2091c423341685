//! Static energy density, energy per unit length and Derrick scaling.
//!
//! The density splits into four pieces by how they respond to `f(r) -> f(qr)`:
//!
//! | term | integrand (times `r`) | scaling |
//! |------|-----------------------|---------|
//! | sigma, planar | `(f'^2 + s^2 n^2/r^2) / 2 lambda^2` | `1` |
//! | Skyrme, planar | `2 kappa s^2 f'^2 n^2/r^2` | `q^2` |
//! | sigma, twist | `s^2 mk^2 / 2 lambda^2` | `q^-2` |
//! | Skyrme, twist | `2 kappa s^2 f'^2 mk^2` | `1` |

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Coupling;
use crate::profile::{Profile, TailModel};

/// `sigma = (1/2 lambda^2)[f'^2 + s^2 h] + 2 kappa s^2 f'^2 h`, `h = n^2/r^2 + mk^2`.
pub fn energy_density(profile: &Profile, c: &Coupling, r: f64) -> f64 {
    let (f, fp) = profile.sample(r);
    density_at(c, r, f, fp)
}

fn density_at(c: &Coupling, r: f64, f: f64, fp: f64) -> f64 {
    terms_at(c, r, f, fp).iter().sum::<f64>() / r
}

/// The four term integrands `sigma_i * r`, in table order.
fn terms_at(c: &Coupling, r: f64, f: f64, fp: f64) -> [f64; 4] {
    let s2 = f.sin().powi(2);
    let n2 = (c.n as f64).powi(2);
    let mk2 = c.mk * c.mk;
    let inv = 0.5 / (c.lambda * c.lambda);
    let sk = 2.0 * c.kappa * s2 * fp * fp;
    if r == 0.0 {
        // finite limits only matter for n = 1
        return [0.0; 4];
    }
    [
        inv * (fp * fp + s2 * n2 / (r * r)) * r,
        sk * n2 / r,
        inv * s2 * mk2 * r,
        sk * mk2 * r,
    ]
}

/// `int sigma_i r dr` for each term, with the summed error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub sigma_planar: f64,
    pub skyrme_planar: f64,
    pub sigma_twist: f64,
    pub skyrme_twist: f64,
    pub error: f64,
}

impl EnergyTerms {
    /// `mu_q = 2 pi (I1 + q^2 I2 + q^-2 I3 + I4)`.
    pub fn mu_at(&self, q: f64) -> f64 {
        2.0 * PI
            * (self.sigma_planar
                + q * q * self.skyrme_planar
                + self.sigma_twist / (q * q)
                + self.skyrme_twist)
    }

    pub fn mu(&self) -> f64 {
        self.mu_at(1.0)
    }

    /// `d mu_q / dq` at `q = 1`.
    pub fn slope(&self) -> f64 {
        4.0 * PI * (self.skyrme_planar - self.sigma_twist)
    }
}

pub fn energy_terms(profile: &Profile, c: &Coupling) -> Result<EnergyTerms> {
    if profile.tail_limit().sin().abs() > 1e-6 {
        return Err(Error::Divergent(format!(
            "sin f does not vanish at infinity (f -> {}); the energy per length is infinite",
            profile.tail_limit()
        )));
    }
    if c.mk > 0.0 && matches!(profile.tail(), TailModel::PowerLaw { .. }) {
        return Err(Error::Divergent(
            "twisted energy needs an exponentially decaying profile: the (mk)^2 sin^2 f term is \
             not integrable against the untwisted power-law tail"
                .into(),
        ));
    }
    let mut out = [0.0; 4];
    let mut error = 0.0;
    for (i, slot) in out.iter_mut().enumerate() {
        let part = profile.integrate(|r, f, fp| terms_at(c, r, f, fp)[i]);
        *slot = part.total();
        error += part.error;
    }
    Ok(EnergyTerms {
        sigma_planar: out[0],
        skyrme_planar: out[1],
        sigma_twist: out[2],
        skyrme_twist: out[3],
        error,
    })
}

/// `mu = 2 pi int sigma r dr`.
pub fn energy_per_length(profile: &Profile, c: &Coupling) -> Result<f64> {
    Ok(energy_terms(profile, c)?.mu())
}

/// `mu_q` over the fixed profile, rescaling each term analytically.
pub fn derrick_scan(profile: &Profile, c: &Coupling, qs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(q) = qs.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "scan factors must be > 0, got {q}"
        )));
    }
    let terms = energy_terms(profile, c)?;
    Ok(qs.iter().map(|&q| (q, terms.mu_at(q))).collect())
}

/// `mu_q` computed by resampling the profile as `f(qr)` and integrating again.
pub fn derrick_scan_resampled(
    profile: &Profile,
    c: &Coupling,
    qs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    qs.iter()
        .map(|&q| Ok((q, energy_per_length(&profile.rescaled(q)?, c)?)))
        .collect()
}

/// `d mu_q/dq` at `q = 1` for the untwisted string:
/// `4 kappa int int (n^2/r^2) sin^2 f f'^2 r dr dtheta`.
pub fn derrick_derivative(profile: &Profile, c: &Coupling) -> Result<f64> {
    if c.mk != 0.0 {
        return Err(Error::Unsupported(
            "the Derrick derivative is defined for the untwisted string (mk = 0)".into(),
        ));
    }
    let part = profile.integrate(|r, f, fp| terms_at(c, r, f, fp)[1]);
    Ok(4.0 * PI * part.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub q: f64,
    pub mu_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub mu: f64,
    pub mu_err: f64,
    /// `d mu_q/dq` at `q = 1` from the term scaling (equals
    /// [`derrick_derivative`] when `mk = 0`).
    pub derrick_slope: Option<f64>,
    pub derrick_scan: Vec<ScanPoint>,
    pub terms: EnergyTerms,
    pub coupling: Coupling,
    #[serde(skip)]
    pub density: Vec<(f64, f64)>,
}

/// Energy report with optional Derrick scan over `qs`.
pub fn energy_report(
    profile: &Profile,
    c: &Coupling,
    derrick: Option<&[f64]>,
) -> Result<EnergyReport> {
    let terms = energy_terms(profile, c)?;
    let density = profile
        .r()
        .iter()
        .zip(profile.f().iter().zip(profile.fprime()))
        .map(|(&r, (&f, &d))| (r, density_at(c, r, f, d)))
        .collect();
    let (derrick_slope, derrick_scan) = match derrick {
        Some(qs) => {
            let scan = derrick_scan(profile, c, qs)?;
            (
                Some(terms.slope()),
                scan.into_iter()
                    .map(|(q, mu_q)| ScanPoint { q, mu_q })
                    .collect(),
            )
        }
        None => (None, Vec::new()),
    };
    Ok(EnergyReport {
        mu: terms.mu(),
        mu_err: 2.0 * PI * terms.error,
        derrick_slope,
        derrick_scan,
        terms,
        coupling: *c,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{exact_sigma_profile, RadialGrid};

    fn exact(k: f64, n: u32) -> Profile {
        exact_sigma_profile(k, n, &RadialGrid::log(1e-4, 40.0, 4001).unwrap()).unwrap()
    }

    #[test]
    fn density_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap();
        assert!((energy_density(&p, &c, 1.0) - 1.0).abs() < 1e-14);
        let g = p.grid().clone();
        let zero =
            Profile::from_samples(g.clone(), vec![0.0; g.len()], vec![0.0; g.len()], c).unwrap();
        assert_eq!(energy_density(&zero, &c, 0.5), 0.0);
    }

    #[test]
    fn density_matches_closed_form() {
        for n in 1..=3 {
            for k in [0.25, 1.0, 4.0] {
                let p = exact(k, n);
                let c = Coupling::sigma(n).unwrap();
                for &r in p.r() {
                    let x = k * r.powi(2 * n as i32);
                    let expect =
                        4.0 * k * (n * n) as f64 * r.powi(2 * n as i32 - 2) / (x + 1.0).powi(2);
                    assert!((energy_density(&p, &c, r) - expect).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn mu_examples() {
        let c1 = Coupling::sigma(1).unwrap();
        let mu = energy_per_length(&exact(1.0, 1), &c1).unwrap();
        assert!((mu - 4.0 * PI).abs() < 1e-4);
        let c2 = Coupling::sigma(2).unwrap();
        let mu = energy_per_length(&exact(1.0, 2), &c2).unwrap();
        assert!((mu - 8.0 * PI).abs() < 1e-4);
        let a = energy_per_length(&exact(0.25, 1), &c1).unwrap();
        let b = energy_per_length(&exact(4.0, 1), &c1).unwrap();
        assert!((a - b).abs() <= 1e-6, "{a} {b}");
    }

    #[test]
    fn twisted_energy_on_power_law_tail_is_divergent() {
        let c = Coupling::sigma(1).unwrap().with_mk(0.5).unwrap();
        assert!(matches!(
            energy_per_length(&exact(1.0, 1), &c),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn derrick_examples() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap();
        let scan = derrick_scan(&p, &c, &[0.5, 1.0, 2.0]).unwrap();
        for w in scan.windows(2) {
            assert!((w[0].1 - w[1].1).abs() <= 1e-8);
        }
        assert_eq!(scan[1].1, energy_per_length(&p, &c).unwrap());
        assert!(derrick_derivative(&p, &c).unwrap().abs() <= 1e-8);

        let ck = c.with_kappa(0.1).unwrap();
        let slope = derrick_derivative(&p, &ck).unwrap();
        assert!(slope > 0.0);
        let h = 1e-3;
        let s = derrick_scan(&p, &ck, &[1.0 - h, 1.0 + h]).unwrap();
        let fd = (s[1].1 - s[0].1) / (2.0 * h);
        assert!((fd - slope).abs() <= 1e-5 * slope);
        let s = derrick_scan(&p, &ck, &[0.99, 1.0, 1.01]).unwrap();
        assert!(s[0].1 < s[1].1 && s[1].1 < s[2].1);

        let twisted = ck.with_mk(0.5).unwrap();
        assert!(matches!(
            derrick_derivative(&p, &twisted),
            Err(Error::Unsupported(_))
        ));
        assert!(derrick_scan(&p, &c, &[0.0]).is_err());
    }

    #[test]
    fn analytic_and_resampled_scans_agree() {
        let p = exact(1.0, 1);
        let c = Coupling::sigma(1).unwrap().with_kappa(0.1).unwrap();
        let qs = [0.5, 1.0, 2.0];
        let a = derrick_scan(&p, &c, &qs).unwrap();
        let b = derrick_scan_resampled(&p, &c, &qs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.1 - y.1).abs() <= 1e-8 * x.1, "{x:?} {y:?}");
        }
    }
}
