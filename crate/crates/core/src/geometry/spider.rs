//! Spider (star tree) kernels on `(ray, radius)` pairs.

pub(crate) fn dist((i, a): (usize, f64), (j, b): (usize, f64)) -> f64 {
    if i == j || a == 0.0 || b == 0.0 {
        (a - b).abs()
    } else {
        a + b
    }
}

pub(crate) fn geodesic((i, a): (usize, f64), (j, b): (usize, f64), t: f64) -> (usize, f64) {
    if a == 0.0 {
        return (j, t * b);
    }
    if b == 0.0 || i == j {
        return (i, (1.0 - t) * a + t * b);
    }
    // path through the hub, arclength s from the start
    let s = t * (a + b);
    if s <= a {
        (i, a - s)
    } else {
        (j, s - a)
    }
}

/// The point at arclength `s` from `(i, a)` on the geodesic heading to the
/// far end of ray `k`.
pub(crate) fn toward((i, a): (usize, f64), k: usize, s: f64) -> (usize, f64) {
    if a == 0.0 || i == k {
        (k, a + s)
    } else if s <= a {
        (i, a - s)
    } else {
        (k, s - a)
    }
}
