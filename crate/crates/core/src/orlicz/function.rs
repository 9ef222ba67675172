use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{powf, root};

/// Relative slack accepted when validating slope monotonicity. Grids built
/// from prefix sums can lose convexity by a few ulps at ties.
const CONVEX_TOL: f64 = 1e-9;

/// Behaviour of a piecewise-affine function past its last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Affine continuation with the given slope.
    Slope(f64),
    /// `+∞` past the last breakpoint. Conjugates of functions with a finite
    /// terminal slope take this form.
    Bounded,
}

/// A convex nondecreasing piecewise-affine function on `[0, ∞)` with value
/// zero at the origin.
///
/// Conjugates of Orlicz functions may vanish near zero or have a bounded
/// domain, so both are representable here; [`PiecewiseAffine::is_strictly_positive`]
/// tells the two situations apart.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    breakpoints: Vec<(f64, f64)>,
    tail: Tail,
}

impl PiecewiseAffine {
    pub fn new(breakpoints: Vec<(f64, f64)>, tail: Tail) -> Result<Self> {
        let Some(&(t0, v0)) = breakpoints.first() else {
            return Err(domain!("breakpoint list is empty"));
        };
        if t0 != 0.0 || v0 != 0.0 {
            return Err(domain!("first breakpoint must be (0, 0), got ({t0}, {v0})"));
        }
        if breakpoints.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(domain!("breakpoints must be finite"));
        }
        let mut prev_slope = 0.0f64;
        for (k, w) in breakpoints.windows(2).enumerate() {
            let ((ta, va), (tb, vb)) = (w[0], w[1]);
            if tb <= ta {
                return Err(domain!("abscissae must increase strictly at index {}", k + 1));
            }
            let s = (vb - va) / (tb - ta);
            if s < -CONVEX_TOL * va.abs().max(vb.abs()).max(f64::MIN_POSITIVE) {
                return Err(domain!("function decreases on segment {k}"));
            }
            if k > 0 && s < prev_slope - CONVEX_TOL * prev_slope.abs() {
                return Err(domain!(
                    "not convex: slope {s} after {prev_slope} at breakpoint {}",
                    k
                ));
            }
            prev_slope = s.max(prev_slope);
        }
        match tail {
            Tail::Slope(s) => {
                if !s.is_finite() || s < 0.0 {
                    return Err(domain!("terminal slope must be finite and ≥ 0, got {s}"));
                }
                if s < prev_slope - CONVEX_TOL * prev_slope.abs() {
                    return Err(domain!("terminal slope {s} below last slope {prev_slope}"));
                }
                let last_v = breakpoints[breakpoints.len() - 1].1;
                if s == 0.0 && last_v == 0.0 {
                    return Err(domain!("function is identically zero"));
                }
            }
            Tail::Bounded => {
                if breakpoints.len() < 2 {
                    return Err(domain!("bounded representation needs at least two breakpoints"));
                }
            }
        }
        Ok(PiecewiseAffine { breakpoints, tail })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    fn last(&self) -> (f64, f64) {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    /// Right end of the domain where the function is finite.
    pub fn domain_end(&self) -> f64 {
        match self.tail {
            Tail::Slope(_) => f64::INFINITY,
            Tail::Bounded => self.last().0,
        }
    }

    /// Supremum of the finite values.
    pub fn range_end(&self) -> f64 {
        match self.tail {
            Tail::Slope(s) if s > 0.0 => f64::INFINITY,
            _ => self.last().1,
        }
    }

    /// Interior segment slopes, in order.
    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// True when `f(t) > 0` for every `t > 0` in the domain.
    pub fn is_strictly_positive(&self) -> bool {
        match self.breakpoints.get(1) {
            Some(&(_, v1)) => v1 > 0.0,
            None => matches!(self.tail, Tail::Slope(s) if s > 0.0),
        }
    }

    fn value(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        let (tk, vk) = self.last();
        if t >= tk {
            return match self.tail {
                Tail::Slope(s) => vk + s * (t - tk),
                Tail::Bounded if t == tk => vk,
                Tail::Bounded => f64::INFINITY,
            };
        }
        // first index with abscissa > t; at least 1 since bp[0].0 = 0 ≤ t
        let k = bp.partition_point(|&(tb, _)| tb <= t);
        let (ta, va) = bp[k - 1];
        let (tb, vb) = bp[k];
        va + (vb - va) * (t - ta) / (tb - ta)
    }

    fn solve(&self, v: f64) -> Option<f64> {
        if v <= 0.0 {
            return Some(0.0);
        }
        let bp = &self.breakpoints;
        let k = bp.partition_point(|&(_, vb)| vb < v);
        if k < bp.len() {
            let (ta, va) = bp[k - 1];
            let (tb, vb) = bp[k];
            return Some(ta + (v - va) * (tb - ta) / (vb - va));
        }
        let (tk, vk) = self.last();
        match self.tail {
            Tail::Slope(s) if s > 0.0 => Some(tk + (v - vk) / s),
            _ => None,
        }
    }

    /// Exact Legendre transform `x ↦ sup_t (xt − f(t))`.
    ///
    /// Slopes of `f` become abscissae of the conjugate and abscissae of `f`
    /// become its slopes. A finite terminal slope `S` turns into a bounded
    /// domain `[0, S]`, and a bounded domain `[0, T]` into terminal slope `T`.
    pub fn conjugate(&self) -> PiecewiseAffine {
        let bp = &self.breakpoints;
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(bp.len() + 1);
        out.push((0.0, 0.0));
        // On [s_{k-1}, s_k] the supremum sits at t_k, giving x t_k - v_k.
        for k in 0..bp.len() - 1 {
            let (ta, va) = bp[k];
            let (tb, vb) = bp[k + 1];
            let s = (vb - va) / (tb - ta);
            push_merged(&mut out, s, s * ta - va);
        }
        let (tk, vk) = self.last();
        let tail = match self.tail {
            Tail::Slope(s) => {
                push_merged(&mut out, s, s * tk - vk);
                if out.len() < 2 {
                    // f was linear with slope s = 0, excluded by validation
                    out.push((s, 0.0));
                }
                Tail::Bounded
            }
            Tail::Bounded => Tail::Slope(tk),
        };
        PiecewiseAffine {
            breakpoints: out,
            tail,
        }
    }
}

/// Appends a conjugate breakpoint unless it coincides with (or, through
/// rounding, precedes) the previous abscissa.
fn push_merged(out: &mut Vec<(f64, f64)>, x: f64, value: f64) {
    let (last_x, _) = out[out.len() - 1];
    if x > last_x + 1e-13 * x.abs() {
        out.push((x, value.max(0.0)));
    }
}

/// An Orlicz function: convex, nondecreasing, zero at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub enum OrliczFunction {
    /// `scale · t^p`, `p ≥ 1`.
    Power { p: f64, scale: f64 },
    PiecewiseAffine(PiecewiseAffine),
}

impl OrliczFunction {
    /// `t^p`.
    pub fn power(p: f64) -> Result<Self> {
        Self::scaled_power(p, 1.0)
    }

    pub fn scaled_power(p: f64, scale: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(domain!("power exponent must be ≥ 1, got {p}"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(domain!("power scale must be > 0, got {scale}"));
        }
        Ok(OrliczFunction::Power { p, scale })
    }

    pub fn piecewise(breakpoints: Vec<(f64, f64)>, tail: Tail) -> Result<Self> {
        PiecewiseAffine::new(breakpoints, tail).map(OrliczFunction::PiecewiseAffine)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain!("argument must be ≥ 0, got {t}"));
        }
        Ok(self.value(t))
    }

    /// The unique `t` with `f(t) = v` (and `0` for `v = 0`).
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(domain!("inverse argument must be ≥ 0, got {v}"));
        }
        match self {
            OrliczFunction::Power { p, scale } => Ok(root(v / scale, *p)),
            OrliczFunction::PiecewiseAffine(f) => f.solve(v).ok_or_else(|| {
                Error::Range(alloc::format!(
                    "{v} exceeds the range sup {} of a bounded representation",
                    f.range_end()
                ))
            }),
        }
    }

    /// Legendre conjugate `M*(x) = sup_t (xt − M(t))`, exact.
    ///
    /// For `t^p`, `p > 1`, this is the raw transform `(p−1) p^{−p*} s^{p*}`
    /// (scaled appropriately), whose inverse is `C_p s^{1/p*}`.
    pub fn conjugate(&self) -> OrliczFunction {
        match self {
            OrliczFunction::Power { p, scale } if *p == 1.0 => OrliczFunction::PiecewiseAffine(
                PiecewiseAffine {
                    breakpoints: alloc::vec![(0.0, 0.0), (*scale, 0.0)],
                    tail: Tail::Bounded,
                },
            ),
            OrliczFunction::Power { p, scale } => {
                let q = p / (p - 1.0);
                let coeff = (p - 1.0) / p * powf(scale * p, -1.0 / (p - 1.0));
                OrliczFunction::Power { p: q, scale: coeff }
            }
            OrliczFunction::PiecewiseAffine(f) => OrliczFunction::PiecewiseAffine(f.conjugate()),
        }
    }

    /// `(1/r)^{1/r} (1/r*)^{1/r*} s^{r*}`, an alternative normalisation of the
    /// conjugate of `t^r` that appears in the literature. It is not the
    /// Legendre transform and nothing downstream uses it; see
    /// [`OrliczFunction::conjugate`].
    pub fn normalized_power_conjugate(r: f64) -> Result<Self> {
        if !(r > 1.0) {
            return Err(domain!("need r > 1, got {r}"));
        }
        let rc = r / (r - 1.0);
        Self::scaled_power(rc, powf(1.0 / r, 1.0 / r) * powf(1.0 / rc, 1.0 / rc))
    }

    /// See [`PiecewiseAffine::is_strictly_positive`]; always true for powers.
    pub fn is_strictly_positive(&self) -> bool {
        match self {
            OrliczFunction::Power { .. } => true,
            OrliczFunction::PiecewiseAffine(f) => f.is_strictly_positive(),
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseAffine> {
        match self {
            OrliczFunction::PiecewiseAffine(f) => Some(f),
            _ => None,
        }
    }

    /// Abscissae where the function is not smooth (empty for powers).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            OrliczFunction::Power { .. } => Vec::new(),
            OrliczFunction::PiecewiseAffine(f) => f.breakpoints.iter().map(|b| b.0).collect(),
        }
    }

    pub fn range_end(&self) -> f64 {
        match self {
            OrliczFunction::Power { .. } => f64::INFINITY,
            OrliczFunction::PiecewiseAffine(f) => f.range_end(),
        }
    }
}

/// The two operations the Luxemburg functional needs.
pub trait YoungFunction {
    /// `f(t)` for `t ≥ 0`; `+∞` outside a bounded domain.
    fn value(&self, t: f64) -> f64;

    /// `sup{t : f(t) ≤ v}` for `v > 0`, and `0` for `v = 0`. Agrees with the
    /// strict inverse wherever that exists and saturates at the domain end
    /// otherwise.
    fn inverse_saturating(&self, v: f64) -> f64;
}

impl YoungFunction for OrliczFunction {
    fn value(&self, t: f64) -> f64 {
        match self {
            OrliczFunction::Power { p, scale } if *p == 1.0 => scale * t,
            OrliczFunction::Power { p, scale } => scale * powf(t, *p),
            OrliczFunction::PiecewiseAffine(f) => f.value(t),
        }
    }

    fn inverse_saturating(&self, v: f64) -> f64 {
        match self {
            OrliczFunction::Power { p, scale } => root(v.max(0.0) / scale, *p),
            OrliczFunction::PiecewiseAffine(f) => f.solve(v).unwrap_or_else(|| f.domain_end()),
        }
    }
}

impl<T: YoungFunction + ?Sized> YoungFunction for &T {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }

    fn inverse_saturating(&self, v: f64) -> f64 {
        (**self).inverse_saturating(v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Repr {
    Power {
        p: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    Pwa {
        breakpoints: Vec<[f64; 2]>,
        /// `null` marks a bounded domain.
        terminal_slope: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

impl TryFrom<Repr> for OrliczFunction {
    type Error = Error;

    fn try_from(r: Repr) -> Result<Self> {
        match r {
            Repr::Power { p, scale } => OrliczFunction::scaled_power(p, scale),
            Repr::Pwa {
                breakpoints,
                terminal_slope,
            } => OrliczFunction::piecewise(
                breakpoints.into_iter().map(|[t, v]| (t, v)).collect(),
                terminal_slope.map_or(Tail::Bounded, Tail::Slope),
            ),
        }
    }
}

impl From<OrliczFunction> for Repr {
    fn from(f: OrliczFunction) -> Repr {
        match f {
            OrliczFunction::Power { p, scale } => Repr::Power { p, scale },
            OrliczFunction::PiecewiseAffine(f) => Repr::Pwa {
                breakpoints: f.breakpoints.iter().map(|&(t, v)| [t, v]).collect(),
                terminal_slope: match f.tail {
                    Tail::Slope(s) => Some(s),
                    Tail::Bounded => None,
                },
            },
        }
    }
}

impl core::fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OrliczFunction::Power { p, scale } if *scale == 1.0 => write!(f, "t^{p}"),
            OrliczFunction::Power { p, scale } => write!(f, "{scale}·t^{p}"),
            OrliczFunction::PiecewiseAffine(pw) => {
                write!(f, "pwa[{} breakpoints", pw.breakpoints.len())?;
                match pw.tail {
                    Tail::Slope(s) => write!(f, ", slope {s}]"),
                    Tail::Bounded => write!(f, ", bounded at {}]", pw.domain_end()),
                }
            }
        }
    }
}

impl From<PiecewiseAffine> for OrliczFunction {
    fn from(f: PiecewiseAffine) -> Self {
        OrliczFunction::PiecewiseAffine(f)
    }
}

/// `"power:2"`, `"power:1.5:0.25"` (with scale); used by command-line parsers.
impl core::str::FromStr for OrliczFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        match parts.next() {
            Some("power") => {
                let p = parse_f64(parts.next())?;
                let scale = match parts.next() {
                    Some(c) => parse_f64(Some(c))?,
                    None => 1.0,
                };
                OrliczFunction::scaled_power(p, scale)
            }
            _ => Err(domain!("unrecognised function spec {s:?}; expected power:<p>[:<scale>]")),
        }
    }
}

fn parse_f64(s: Option<&str>) -> Result<f64> {
    let s = s.ok_or_else(|| domain!("missing number"))?;
    s.trim()
        .parse()
        .map_err(|_| Error::Domain("bad number ".to_string() + s))
}
