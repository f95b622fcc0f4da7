//! Hyperboloid model kernels. Ambient vectors carry the time coordinate first;
//! the Minkowski form is `<a, b> = -a0 b0 + sum_i ai bi`.

use crate::error::{Error, Result};

pub(crate) fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(p, q)| p * q).sum::<f64>()
}

pub(crate) fn lift(spatial: &[f64]) -> Vec<f64> {
    let n2: f64 = spatial.iter().map(|v| v * v).sum();
    let mut out = Vec::with_capacity(spatial.len() + 1);
    out.push((1.0 + n2).sqrt());
    out.extend_from_slice(spatial);
    out
}

/// Re-projects onto the upper sheet by recomputing the time coordinate.
pub(crate) fn renormalize(a: &mut [f64]) {
    let n2: f64 = a[1..].iter().map(|v| v * v).sum();
    a[0] = (1.0 + n2).sqrt();
}

pub(crate) fn check_on_sheet(a: &[f64]) -> Result<()> {
    if a[0] <= 0.0 {
        return Err(Error::invalid("hyperboloid point must lie on the upper sheet (time > 0)"));
    }
    let norm = minkowski(a, a);
    let scale = a[0] * a[0];
    if (norm + 1.0).abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::invalid(format!(
            "hyperboloid point has Minkowski norm {norm}, expected -1"
        )));
    }
    Ok(())
}

/// `d = 2 asinh(|x - y|_M / 2)`, which equals `arccosh(-<x, y>)` on the sheet
/// but keeps full relative precision for nearby points.
pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    let dt = x[0] - y[0];
    let chord2 = -dt * dt + x[1..].iter().zip(&y[1..]).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
    2.0 * (chord2.max(0.0).sqrt() / 2.0).asinh()
}

pub(crate) fn geodesic(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    let d = dist(x, y);
    let mut out: Vec<f64> = if d < 1e-300 {
        x.to_vec()
    } else if d < 1e-6 {
        // sinh ratios degenerate to linear weights
        x.iter().zip(y).map(|(p, q)| (1.0 - t) * p + t * q).collect()
    } else {
        let s = d.sinh();
        let a = ((1.0 - t) * d).sinh() / s;
        let b = (t * d).sinh() / s;
        x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()
    };
    renormalize(&mut out);
    out
}

/// Orthonormal basis (in the Minkowski form) of the tangent space at `x`.
pub(crate) fn tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len() - 1;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 1..=n {
        // project e_i onto x^perp: w = e_i + <x, e_i> x
        let mut w: Vec<f64> = x.iter().map(|v| x[i] * v).collect();
        w[i] += 1.0;
        for b in &basis {
            let c = minkowski(&w, b);
            for (wk, bk) in w.iter_mut().zip(b) {
                *wk -= c * bk;
            }
        }
        let norm = minkowski(&w, &w).max(0.0).sqrt();
        for wk in &mut w {
            *wk /= norm;
        }
        basis.push(w);
    }
    basis
}

/// Exponential map at `x` of the tangent vector `v` (ambient coordinates).
pub(crate) fn exp(x: &[f64], v: &[f64]) -> Vec<f64> {
    let n = minkowski(v, v).max(0.0).sqrt();
    let mut out: Vec<f64> = if n < 1e-300 {
        x.to_vec()
    } else {
        let (c, s) = (n.cosh(), n.sinh() / n);
        x.iter().zip(v).map(|(p, q)| c * p + s * q).collect()
    };
    renormalize(&mut out);
    out
}
