//! Certified evaluation of the Riemann zeta function, the Khintchin
//! constant, the almost-sure scaling exponent, and the two Gauss-measure
//! integrals behind it.
//!
//! Every value carries a `tail_bound` that covers the truncation of the
//! defining series plus floating-point slack, using the integral comparison
//! test sharpened by midpoint convexity.

use crate::error::{Error, Result};

/// A value together with a certified bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundedValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl TailBoundedValue {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }

    pub fn lower(&self) -> f64 {
        self.value - self.tail_bound
    }
}

/// Kahan-compensated sum of an iterator of f64 terms.
fn kahan_sum(terms: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut count = 0usize;
    for t in terms {
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        count += 1;
    }
    (sum, count)
}

/// Certified enclosure of the zeta tail `sum_{k > m} k^{-s}` for `s > 1`.
///
/// Uses `f(k) <= int_{k-1/2}^{k+1/2} f` for convex `f`, so the tail lies in
/// `[I - E, I]` with `I = (m+1/2)^{1-s}/(s-1)` and `E` bounded through
/// `f''`.
pub fn zeta_tail(s: f64, m: u64) -> TailBoundedValue {
    debug_assert!(s > 1.0 && m >= 1);
    let mf = m as f64 + 0.5;
    let integral = mf.powf(1.0 - s) / (s - 1.0);
    // sum of midpoint-rule cell errors, bounded via the decreasing f''
    let e_max = (s * (s + 1.0) * mf.powf(-s - 2.0) + s * mf.powf(-s - 1.0)) / 24.0;
    let slack = 4.0 * f64::EPSILON * integral;
    TailBoundedValue {
        value: integral - 0.5 * e_max,
        tail_bound: 0.5 * e_max + slack,
    }
}

/// Riemann zeta on `(1, inf)` with a certified truncation bound `<= tol`.
pub fn zeta(s: f64, tol: f64) -> Result<TailBoundedValue> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::ZetaDomain(s));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("zeta tolerance must be > 0".into()));
    }
    // pick the cut so the midpoint-corrected tail enclosure fits in tol
    let mut m = ((s / (12.0 * tol)).powf(1.0 / (s + 1.0)).ceil() as u64).clamp(8, 50_000_000);
    for _ in 0..40 {
        let tail = zeta_tail(s, m);
        let (partial, terms) = kahan_sum((1..=m).map(|k| (k as f64).powf(-s)));
        let float_slack = 2.0 * f64::EPSILON * partial * (terms as f64).log2().max(1.0);
        let bound = tail.tail_bound + float_slack;
        if bound <= tol {
            return Ok(TailBoundedValue {
                value: partial + tail.value,
                tail_bound: bound,
            });
        }
        if m >= 50_000_000 {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                achieved: bound,
            });
        }
        m = (m * 2).min(50_000_000);
    }
    unreachable!("zeta cut growth loop is bounded");
}

/// Natural log of the Khintchin constant with a certified enclosure of
/// half-width `<= tol`.
///
/// `ln K_0 = (1/ln 2) * sum_{k>=2} ln k * ln(1 + 1/(k(k+2)))`. The tail is
/// reduced, via `1/(k(k+2)) = (1/k - 1/(k+2))/2`, to zeta tails at s = 2, 3,
/// 4, each certified by [`zeta_tail`].
pub fn ln_khintchin(tol: f64) -> Result<TailBoundedValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("khintchin tolerance must be > 0".into()));
    }
    let ln2 = std::f64::consts::LN_2;
    // doubling search on the cut using the analytic width estimate
    let mut m = 1u64 << 10;
    while m < (1u64 << 26) && (m as f64).ln() / (m as f64 * m as f64) > 0.2 * tol * ln2 {
        m *= 2;
    }
    let enclose = |m: u64| -> TailBoundedValue {
        let (partial, terms) = kahan_sum((2..=m).map(|k| {
            let kf = k as f64;
            kf.ln() * (1.0 / (kf * (kf + 2.0))).ln_1p()
        }));
        // tail sum of ln k / (k(k+2)), exact up to zeta tails:
        //   sum_{k>m} ln k (1/k - 1/(k+2))/2
        // = [ln(m+1)/(m+1) + ln(m+2)/(m+2) + sum_{j>m+2} (ln j - ln(j-2))/j] / 2
        // with (ln j - ln(j-2))/j in [2/j^2 + 2/j^3, 2/j^2 + 2/j^3 + (8/3)/(j^4 (1-2/j))]
        let mp = m + 2;
        let t2 = zeta_tail(2.0, mp);
        let t3 = zeta_tail(3.0, mp);
        let t4 = zeta_tail(4.0, mp);
        let head = ((m + 1) as f64).ln() / (m + 1) as f64 + (mp as f64).ln() / mp as f64;
        let d_up = 2.0 * t2.upper() + 2.0 * t3.upper()
            + (8.0 / 3.0) * t4.upper() / (1.0 - 2.0 / (mp as f64 + 1.0));
        let d_lo = 2.0 * t2.lower() + 2.0 * t3.lower();
        let s_up = 0.5 * (head + d_up);
        let s_lo = 0.5 * (head + d_lo);
        // ln(1+y) >= y (1 - y/2) converts the linearized tail to a lower bound
        let y_max = 1.0 / ((m as f64 + 1.0) * (m as f64 + 3.0));
        let tail_lo = s_lo * (1.0 - 0.5 * y_max);
        let float_slack = 2.0 * f64::EPSILON * partial * (terms as f64).log2().max(1.0);
        let lo = (partial + tail_lo) / ln2 - float_slack;
        let up = (partial + s_up) / ln2 + float_slack;
        TailBoundedValue {
            value: 0.5 * (lo + up),
            tail_bound: 0.5 * (up - lo),
        }
    };
    // two truncation levels must agree within tol
    let coarse = enclose(m);
    let fine = enclose(2 * m);
    if (coarse.value - fine.value).abs() > tol.max(coarse.tail_bound + fine.tail_bound) {
        return Err(Error::Domain(format!(
            "khintchin truncation levels disagree: {} vs {}",
            coarse.value, fine.value
        )));
    }
    if fine.tail_bound > tol {
        return Err(Error::ToleranceUnreachable {
            requested: tol,
            achieved: fine.tail_bound,
        });
    }
    Ok(fine)
}

/// The Khintchin constant `K_0 = prod_k (1 + 1/(k(k+2)))^(ln k / ln 2)` with
/// certified truncation bound `<= tol`.
pub fn khintchin_constant(tol: f64) -> Result<TailBoundedValue> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("khintchin tolerance must be > 0".into()));
    }
    // relative bound on ln K becomes an absolute bound on K near K ~ 2.69
    let ln_k = ln_khintchin(tol / 3.0)?;
    let value = ln_k.value.exp();
    let tail_bound = value * (ln_k.tail_bound.exp() - 1.0) + 4.0 * f64::EPSILON * value;
    Ok(TailBoundedValue { value, tail_bound })
}

/// The almost-sure arithmetic-geometric scaling exponent
/// `alpha_0 = 12 ln 2 ln K_0 / pi^2`, accurate to `tol`.
pub fn alpha0(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("alpha0 tolerance must be > 0".into()));
    }
    let c = 12.0 * std::f64::consts::LN_2 / (std::f64::consts::PI * std::f64::consts::PI);
    let ln_k = ln_khintchin(0.5 * tol / c)?;
    Ok(c * ln_k.value)
}

/// The two Gauss-measure integrals of the digit and geometric potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussIntegrals {
    /// `int psi d(gauss) = -2 ln K_0`.
    pub int_psi: f64,
    /// `int phi d(gauss) = -pi^2 / (6 ln 2)`.
    pub int_phi: f64,
}

pub fn gauss_integrals() -> GaussIntegrals {
    let ln_k = ln_khintchin(1e-12).expect("fixed tolerance is reachable");
    GaussIntegrals {
        int_psi: -2.0 * ln_k.value,
        int_phi: -(std::f64::consts::PI * std::f64::consts::PI)
            / (6.0 * std::f64::consts::LN_2),
    }
}
