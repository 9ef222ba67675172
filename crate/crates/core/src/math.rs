// Float helpers; `core` has no transcendental functions.

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `x^(1/p)` for `x ≥ 0`.
#[inline]
pub(crate) fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else {
        libm::pow(x, 1.0 / p)
    }
}

/// `(Σ |x_i|^p)^(1/p)`.
pub(crate) fn p_norm(xs: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    if p == 2.0 {
        return sqrt(xs.into_iter().map(|x| x * x).sum());
    }
    root(xs.into_iter().map(|x| powf(x.abs(), p)).sum(), p)
}

pub(crate) fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| m.max(x.abs()))
}
