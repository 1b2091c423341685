//! Dormand-Prince 5(4) with embedded error control.

/// Failure modes of a single `advance` call.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure<E> {
    /// The right-hand side rejected the state.
    Rhs(E),
    /// Step size collapsed below the resolvable limit at `t`.
    StepUnderflow { t: f64 },
    /// Non-finite state produced at `t`.
    NonFinite { t: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive integrator state. The step size is carried across calls so that
/// node-to-node integration on a fine grid does not restart from scratch.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    h: Option<f64>,
    pub steps: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            h: None,
            steps: 0,
            rejected: 0,
        }
    }

    /// Integrate `y' = rhs(t, y)` from `t` to `t_end` (forward or backward).
    pub fn advance<const N: usize, E2, F>(
        &mut self,
        rhs: &mut F,
        mut t: f64,
        mut y: [f64; N],
        t_end: f64,
    ) -> Result<[f64; N], StepFailure<E2>>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N], E2>,
    {
        let span = t_end - t;
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        let mut h = self
            .h
            .map(|h| h.abs())
            .unwrap_or(1e-3 * span.abs())
            .min(span.abs());
        let mut k = [[0.0; N]; 7];
        k[0] = rhs(t, &y).map_err(StepFailure::Rhs)?;

        loop {
            let remaining = (t_end - t).abs();
            if remaining <= 1e-15 * t_end.abs().max(1e-300) {
                break;
            }
            let last = h >= remaining;
            let step = if last { remaining } else { h } * dir;
            if step.abs() <= 1e-15 * t.abs().max(1e-300) {
                return Err(StepFailure::StepUnderflow { t });
            }

            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().take(s).enumerate() {
                        acc += A[s][j] * kj[i];
                    }
                    *yi += step * acc;
                }
                k[s] = rhs(t + C[s] * step, &ys).map_err(StepFailure::Rhs)?;
            }
            let mut y_new = y;
            let mut err = 0.0f64;
            for i in 0..N {
                let mut acc = 0.0;
                let mut eacc = 0.0;
                for s in 0..6 {
                    acc += A[6][s] * k[s][i];
                }
                for s in 0..7 {
                    eacc += E[s] * k[s][i];
                }
                y_new[i] = y[i] + step * acc;
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((step * eacc / scale).abs());
            }
            if !y_new.iter().all(|v| v.is_finite()) || !err.is_finite() {
                // shrink and retry; give up if the step is already tiny
                h *= 0.25;
                self.rejected += 1;
                if h <= 1e-14 * t.abs().max(1e-300) {
                    return Err(StepFailure::NonFinite { t });
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { t_end } else { t + step };
                y = y_new;
                // FSAL: the 7th stage is the derivative at the new point
                k[0] = k[6];
                self.steps += 1;
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    h = step.abs() * factor;
                } else {
                    self.h = Some(h.max(step.abs() * factor.min(1.0)));
                    return Ok(y);
                }
            } else {
                self.rejected += 1;
                h = step.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        self.h = Some(h);
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let mut integ = Dopri5::new(1e-12, 1e-14);
        let mut rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2], ()> { Ok([y[1], -y[0]]) };
        let y = integ
            .advance(&mut rhs, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI)
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10, "{y:?}");
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn many_short_segments_match_one_long() {
        let mut rhs = |t: f64, y: &[f64; 1]| -> Result<[f64; 1], ()> { Ok([-2.0 * t * y[0]]) };
        let mut integ = Dopri5::new(1e-12, 1e-15);
        let mut y = [1.0];
        let mut t = 0.0;
        for i in 1..=300 {
            let t1 = i as f64 * 0.01;
            y = integ.advance(&mut rhs, t, y, t1).unwrap();
            t = t1;
        }
        assert!((y[0] - (-9.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn backward_integration() {
        let mut rhs = |_t: f64, y: &[f64; 1]| -> Result<[f64; 1], ()> { Ok([y[0]]) };
        let mut integ = Dopri5::new(1e-12, 1e-15);
        let y = integ.advance(&mut rhs, 1.0, [1.0f64.exp()], 0.0).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn rhs_error_is_propagated() {
        let mut rhs = |t: f64, y: &[f64; 1]| -> Result<[f64; 1], &'static str> {
            if t > 0.5 {
                Err("boom")
            } else {
                Ok([y[0]])
            }
        };
        let mut integ = Dopri5::new(1e-10, 1e-12);
        let out = integ.advance(&mut rhs, 0.0, [1.0], 1.0);
        assert_eq!(out, Err(StepFailure::Rhs("boom")));
    }
}
