//! Quadrature rules.

/// Composite Simpson over equally spaced samples with spacing `h`.
///
/// An odd number of intervals is finished with the 3/8 rule on the last
/// three intervals. Fewer than two samples integrate to zero.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, None)
            } else {
                (n - 4, Some(n - 4))
            };
            let mut acc = values[0] + values[even_end];
            for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = acc * h / 3.0;
            if let Some(s) = tail {
                total += 3.0 * h / 8.0
                    * (values[s] + 3.0 * values[s + 1] + 3.0 * values[s + 2] + values[s + 3]);
            }
            total
        }
    }
}

/// Simpson with a Richardson error estimate from the every-other-node rule.
pub fn simpson_with_error(values: &[f64], h: f64) -> (f64, f64) {
    let fine = simpson(values, h);
    if values.len() < 9 {
        return (fine, f64::NAN);
    }
    let coarse_vals: Vec<f64> = if (values.len() - 1).is_multiple_of(2) {
        values.iter().step_by(2).copied().collect()
    } else {
        // drop the last sample so the coarse rule spans the same range as
        // the even-interval part of the fine rule
        return (fine, (fine - simpson(&values[..values.len() - 1], h)).abs());
    };
    let coarse = simpson(&coarse_vals, 2.0 * h);
    (fine, (fine - coarse).abs() / 15.0)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            dp = order as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Adaptive Gauss-Legendre quadrature by interval bisection.
///
/// Each panel is compared against the sum over its two halves; panels are
/// split until the difference falls below `tol` (scaled by panel width).
/// Only interior points are evaluated, so integrable endpoint limits that
/// cannot be evaluated directly (`0/0`) are harmless.
pub struct AdaptiveGauss {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub max_depth: u32,
}

impl Default for AdaptiveGauss {
    fn default() -> Self {
        let (nodes, weights) = gauss_legendre(10);
        Self {
            nodes,
            weights,
            max_depth: 30,
        }
    }
}

impl AdaptiveGauss {
    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Returns `(value, error_estimate)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
        if a == b {
            return (0.0, 0.0);
        }
        let whole = self.panel(f, a, b);
        self.recurse(f, a, b, whole, tol, 0)
    }

    fn recurse<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> (f64, f64) {
        let mid = 0.5 * (a + b);
        let left = self.panel(f, a, mid);
        let right = self.panel(f, mid, b);
        let diff = (left + right - whole).abs();
        if diff <= tol || depth >= self.max_depth {
            return (left + right, diff);
        }
        let (l, el) = self.recurse(f, a, mid, left, 0.5 * tol, depth + 1);
        let (r, er) = self.recurse(f, mid, b, right, 0.5 * tol, depth + 1);
        (l + r, el + er)
    }

    /// Integral over `[start, inf)` through the substitution `r = start / t`.
    ///
    /// `start` must be positive. The integrand must decay faster than `1/r`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        start: f64,
        tol: f64,
    ) -> (f64, f64) {
        let g = |t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let r = start / t;
            let v = f(r) * start / (t * t);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        self.integrate(&g, 0.0, 1.0, tol)
    }
}
