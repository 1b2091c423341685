//! Finite-difference weights on arbitrary stencils (Fornberg's recursion).

/// Weights `w[k][j]` such that `f^{(k)}(x0) ~ sum_j w[k][j] f(x_j)` for
/// derivative orders `k = 0..=max_order`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First derivative of tabulated `values` at every node of `xs`, using
/// `width`-point stencils (centred where possible, one-sided at the ends).
pub fn derivative_on_nodes(xs: &[f64], values: &[f64], width: usize) -> Vec<f64> {
    let n = xs.len();
    let width = width.min(n);
    let half = width / 2;
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - width);
            let stencil = &xs[start..start + width];
            let w = fornberg_weights(xs[i], stencil, 1);
            w[1].iter()
                .zip(&values[start..start + width])
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect()
}
