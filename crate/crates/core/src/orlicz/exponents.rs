use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::math::powf;

/// Hölder conjugate `x* = x/(x-1)`; `∞` for `x = 1`.
pub fn conjugate_exponent(x: f64) -> f64 {
    if x == 1.0 {
        f64::INFINITY
    } else {
        x / (x - 1.0)
    }
}

/// `C_x = x^{1/x} (x*)^{1/x*}`, the constant with `(t^x)^{*-1}(s) = C_x s^{1/x*}`.
pub fn c_const(x: f64) -> f64 {
    if x == 1.0 {
        return 1.0;
    }
    let xc = conjugate_exponent(x);
    powf(x, 1.0 / x) * powf(xc, 1.0 / xc)
}

/// The exponent pair `(p, r)` together with their conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    p: f64,
    r: f64,
}

impl Exponents {
    /// Requires `p ≥ 1` and `r > 1`; no ordering between them is imposed here.
    pub fn new(p: f64, r: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(domain!("exponent p = {p} must be ≥ 1"));
        }
        if !(r.is_finite() && r > 1.0) {
            return Err(domain!("exponent r = {r} must be > 1"));
        }
        Ok(Exponents { p, r })
    }

    /// The embedding range: `1 < p < r < 2`.
    pub fn embedding(p: f64, r: f64) -> Result<Self> {
        let e = Self::new(p, r)?;
        if !(1.0 < p && p < r && r < 2.0) {
            return Err(domain!("need 1 < p < r < 2, got p = {p}, r = {r}"));
        }
        Ok(e)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p_conj(&self) -> f64 {
        conjugate_exponent(self.p)
    }

    pub fn r_conj(&self) -> f64 {
        conjugate_exponent(self.r)
    }

    /// `1/p* = 1 - 1/p` (zero for `p = 1`).
    pub fn inv_p_conj(&self) -> f64 {
        1.0 - 1.0 / self.p
    }

    pub fn inv_r_conj(&self) -> f64 {
        1.0 - 1.0 / self.r
    }

    pub fn c_r(&self) -> f64 {
        c_const(self.r)
    }

    pub fn c_p(&self) -> f64 {
        c_const(self.p)
    }
}
