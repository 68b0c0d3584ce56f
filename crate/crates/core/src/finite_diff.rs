//! Tensor-product central difference stencils in chart coordinates.

use crate::error::Result;
use crate::multiindex::MultiIndex;

/// Approximates `D^β f(v)` with step `h`.
///
/// Each axis `j` uses the `β_j`-th central difference with nodes at
/// `v_j + (β_j/2 - l) h`, `l = 0..=β_j`, so odd orders sample half-steps.
/// The truncation error is `O(h²)` for smooth `f`.
pub fn central_difference<F>(mut f: F, v: &[f64], beta: &MultiIndex, h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut acc = 0.0;
    for (w, x) in stencil(v, beta, h) {
        acc += w * f(&x)?;
    }
    Ok(acc)
}

/// [`central_difference`] for a vector-valued `f`, one stencil pass for all
/// components.
pub fn central_difference_vec<F>(mut f: F, v: &[f64], beta: &MultiIndex, h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut acc: Vec<f64> = Vec::new();
    for (w, x) in stencil(v, beta, h) {
        let y = f(&x)?;
        if acc.is_empty() {
            acc = vec![0.0; y.len()];
        }
        for (a, b) in acc.iter_mut().zip(y) {
            *a += w * b;
        }
    }
    Ok(acc)
}

/// Sample points and weights of the stencil, weights already divided by
/// `h^|β|`.
pub fn stencil(v: &[f64], beta: &MultiIndex, h: f64) -> Vec<(f64, Vec<f64>)> {
    let axis_stencils: Vec<Vec<(f64, f64)>> = beta
        .components()
        .iter()
        .map(|&p| {
            (0..=p)
                .map(|l| {
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    (sign * binomial(p, l), (0.5 * f64::from(p) - f64::from(l)) * h)
                })
                .collect()
        })
        .collect();
    let scale = h.powi(beta.order() as i32);

    let mut out = Vec::new();
    let mut counters = vec![0usize; v.len()];
    loop {
        let mut weight = 1.0;
        let mut x = v.to_vec();
        for (j, stencil) in axis_stencils.iter().enumerate() {
            let (c, offset) = stencil[counters[j]];
            weight *= c;
            x[j] = v[j] + offset;
        }
        out.push((weight / scale, x));

        // Odometer increment over the tensor stencil.
        let mut j = 0;
        loop {
            if j == counters.len() {
                return out;
            }
            counters[j] += 1;
            if counters[j] < axis_stencils[j].len() {
                break;
            }
            counters[j] = 0;
            j += 1;
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}
