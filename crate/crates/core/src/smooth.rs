//! Smooth cutoff functions.

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn dpsi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp() / (t * t)
    } else {
        0.0
    }
}

/// `C^∞` cutoff: 1 on `z ≤ 1`, 0 on `z ≥ 2`, monotone in between.
pub fn cutoff(z: f64) -> f64 {
    if z <= 1.0 {
        return 1.0;
    }
    if z >= 2.0 {
        return 0.0;
    }
    let t = z - 1.0;
    let (a, b) = (psi(1.0 - t), psi(t));
    a / (a + b)
}

/// Derivative of [`cutoff`].
pub fn cutoff_derivative(z: f64) -> f64 {
    if z <= 1.0 || z >= 2.0 {
        return 0.0;
    }
    let t = z - 1.0;
    let (a, b) = (psi(1.0 - t), psi(t));
    let (da, db) = (-dpsi(1.0 - t), dpsi(t));
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}
