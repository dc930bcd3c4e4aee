//! Free energy `t(beta)`, its derivative, the multifractal spectrum
//! `f(alpha)` via the Legendre transform, restricted dimensions `dim I_q`,
//! and the boundary asymptotics.
//!
//! Root-finding on the pressure is hardened by the uniform derivative bound
//! `dP/dt <= -2 ln(1/x_q) < 0` (golden-mean bound for the full system),
//! which converts a pressure residual into an error bound on `t`.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::cf::surd_fixed_point;
use crate::operator::{pressure_via_operator_deg, DEFAULT_DEGREE};
use crate::pressure::AlphabetSpec;
use crate::special::{zeta, zeta_tail};

pub const DEFAULT_TRUNCATION: u64 = 10_000;
pub const DEFAULT_T_TOL: f64 = 1e-9;

/// One solved point of the free energy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergySample {
    pub beta: f64,
    pub t: f64,
    /// `|P(t, beta)|` at the accepted root.
    pub residual: f64,
    /// `t'(beta)` from the pressure partials at the root (implicit function
    /// theorem); always negative.
    pub derivative: f64,
    pub alphabet: AlphabetSpec,
}

#[derive(Clone, Copy)]
struct CacheEntry {
    t: f64,
    residual: f64,
    derivative: Option<f64>,
}

/// Memoizing solver of `P(t(beta), beta) = 0` over a fixed alphabet.
///
/// Every solve runs from the same canonical bracket, so cached values are
/// identical to freshly computed ones and results do not depend on the
/// evaluation schedule.
pub struct FreeEnergySolver {
    alphabet: AlphabetSpec,
    degree: usize,
    tol: f64,
    cache: Mutex<HashMap<u64, CacheEntry>>,
}

impl FreeEnergySolver {
    pub fn new(alphabet: AlphabetSpec, degree: usize, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Precondition("solver tolerance must be > 0".into()));
        }
        Ok(FreeEnergySolver {
            alphabet,
            degree,
            tol,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_defaults() -> Self {
        FreeEnergySolver::new(
            AlphabetSpec::full(DEFAULT_TRUNCATION).expect("valid alphabet"),
            DEFAULT_DEGREE,
            DEFAULT_T_TOL,
        )
        .expect("valid defaults")
    }

    pub fn alphabet(&self) -> AlphabetSpec {
        self.alphabet
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Uniform bound `|dP/dt| >= 2 ln(1/x_q)`; `2 ln(golden mean)` for the
    /// full system.
    pub fn derivative_bound(&self) -> f64 {
        -2.0 * surd_fixed_point(self.alphabet.min_digit()).ln()
    }

    /// Pressure of the truncated system at `(t, beta)`.
    pub fn pressure_at(&self, t: f64, beta: f64) -> Result<f64> {
        let est = pressure_via_operator_deg(t, beta, self.alphabet, 1e-13, self.degree)?;
        Ok(est.value.finite().expect("operator pressure is finite"))
    }

    /// `t(beta)` without the derivative field (cache-backed).
    pub fn t_value(&self, beta: f64) -> Result<f64> {
        if let Some(e) = self.cache.lock().unwrap().get(&beta.to_bits()) {
            return Ok(e.t);
        }
        let (t, residual) = self.solve_root(beta)?;
        self.cache
            .lock()
            .unwrap()
            .entry(beta.to_bits())
            .or_insert(CacheEntry {
                t,
                residual,
                derivative: None,
            });
        Ok(t)
    }

    /// Full free-energy sample at `beta`, including the derivative estimate.
    pub fn solve(&self, beta: f64) -> Result<FreeEnergySample> {
        self.t_value(beta)?;
        let entry = *self
            .cache
            .lock()
            .unwrap()
            .get(&beta.to_bits())
            .expect("just inserted");
        let derivative = match entry.derivative {
            Some(d) => d,
            None => {
                let d = self.derivative_from_partials(entry.t, beta)?;
                self.cache
                    .lock()
                    .unwrap()
                    .get_mut(&beta.to_bits())
                    .expect("present")
                    .derivative = Some(d);
                d
            }
        };
        Ok(FreeEnergySample {
            beta,
            t: entry.t,
            residual: entry.residual,
            derivative,
            alphabet: self.alphabet,
        })
    }

    /// Central finite difference `(t(beta+h) - t(beta-h)) / 2h` with the
    /// step scaled by `max(1, |beta|)`.
    pub fn t_prime(&self, beta: f64, h: f64) -> Result<f64> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::Precondition("finite-difference step must be > 0".into()));
        }
        let step = h * beta.abs().max(1.0);
        let plus = self.t_value(beta + step)?;
        let minus = self.t_value(beta - step)?;
        Ok((plus - minus) / (2.0 * step))
    }

    fn derivative_from_partials(&self, t: f64, beta: f64) -> Result<f64> {
        let hb = 1e-4 * beta.abs().max(1.0);
        let ht = 1e-4 * t.abs().max(1.0);
        let dpdb = (self.pressure_at(t, beta + hb)? - self.pressure_at(t, beta - hb)?) / (2.0 * hb);
        let dpdt = (self.pressure_at(t + ht, beta)? - self.pressure_at(t - ht, beta)?) / (2.0 * ht);
        Ok(-dpdb / dpdt)
    }

    /// Canonical bracket and Illinois iteration; returns `(t, |P|)` with
    /// `|P| <= tol * derivative_bound`, so `|t - t*| <= tol`.
    fn solve_root(&self, beta: f64) -> Result<(f64, f64)> {
        let p_tol = self.tol * self.derivative_bound() * 0.9;
        // the root satisfies t* > max(0, 1/2 - beta)
        let mut lo = (0.5 - beta).max(0.0);
        let mut f_lo = self.pressure_at(lo, beta)?;
        let mut expand = 0.25;
        while f_lo <= 0.0 {
            // undersized truncation can push the finite-system root below the
            // finiteness line; widen downward
            lo -= expand;
            expand *= 2.0;
            if expand > 1e6 {
                return Err(Error::Bracketing(format!(
                    "pressure never positive above t = {lo} at beta = {beta}"
                )));
            }
            f_lo = self.pressure_at(lo, beta)?;
        }
        if f_lo.abs() <= p_tol {
            return Ok((lo, f_lo.abs()));
        }
        let mut hi = lo + 1.0;
        let mut f_hi = self.pressure_at(hi, beta)?;
        let mut step = 1.0;
        while f_hi > 0.0 {
            if f_hi.abs() <= p_tol {
                return Ok((hi, f_hi.abs()));
            }
            step *= 2.0;
            hi += step;
            if step > 1e9 {
                return Err(Error::Bracketing(format!(
                    "pressure never negative below t = {hi} at beta = {beta} \
                     (P({lo}) = {f_lo:.3e}, P({hi}) = {f_hi:.3e})"
                )));
            }
            f_hi = self.pressure_at(hi, beta)?;
        }
        illinois(
            |t| self.pressure_at(t, beta),
            lo,
            f_lo,
            hi,
            f_hi,
            p_tol,
            0.0,
            200,
        )
    }
}

/// Illinois-damped regula falsi for a strictly decreasing function with
/// `f(lo) > 0 > f(hi)`. Stops on `|f| <= f_tol` or bracket width `<= x_tol`.
#[allow(clippy::too_many_arguments)]
fn illinois(
    mut eval: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    mut f_hi: f64,
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    let mut side = 0i8;
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..max_iter {
        let denom = f_lo - f_hi;
        let mut x = if denom != 0.0 {
            (lo * (-f_hi) + hi * f_lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = eval(x)?;
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        if fx.abs() <= f_tol {
            return Ok((x, fx.abs()));
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
        if hi - lo <= x_tol.max(4.0 * f64::EPSILON * hi.abs().max(1.0)) {
            return Ok(best);
        }
    }
    Err(Error::ToleranceUnreachable {
        requested: f_tol,
        achieved: best.1,
    })
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

/// How a spectrum value was attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSet {
    /// `alpha` outside `[0,1]`: the level set is empty and `f = 0` by fiat.
    Empty,
    /// `alpha = 0`: nonempty level set of zero dimension.
    LeftEndpoint,
    /// `alpha = 1`: dimension exactly 1/2.
    RightEndpoint,
    /// Interior point solved through the Legendre transform.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub alpha: f64,
    /// Legendre parameter solving `t'(beta) = -alpha` (NaN at endpoints).
    pub beta: f64,
    /// `t(beta)` (NaN at endpoints).
    pub t: f64,
    /// `max(t(beta) + beta * alpha, 0)`.
    pub f: f64,
    /// Heuristic error estimate for `f`.
    pub error: f64,
    pub kind: LevelSet,
}

/// Spectrum solver wrapping a [`FreeEnergySolver`]; inverts `-t'` by
/// monotone bracketing grown geometrically from `beta = 0`.
pub struct SpectrumSolver {
    pub fe: FreeEnergySolver,
    /// Step for the central `t'` differences.
    pub fd_step: f64,
    /// Bisection tolerance on `beta` (f is second-order flat there).
    pub beta_tol: f64,
    /// Search cap on `|beta|` before reporting unreachability.
    pub beta_cap: f64,
}

impl SpectrumSolver {
    pub fn new(fe: FreeEnergySolver) -> Self {
        SpectrumSolver {
            fe,
            fd_step: 1e-4,
            beta_tol: 1e-6,
            beta_cap: 48.0,
        }
    }

    pub fn with_defaults() -> Self {
        SpectrumSolver::new(FreeEnergySolver::with_defaults())
    }

    /// One spectrum point. Interior `alpha` solves `t'(beta) = -alpha`;
    /// `alpha` in `{0, 1}` returns the proven endpoint values; `alpha`
    /// outside `[0,1]` returns `f = 0` flagged as an empty level set.
    pub fn point(&self, alpha: f64) -> Result<SpectrumPoint> {
        if !(0.0..=1.0).contains(&alpha) {
            return Ok(SpectrumPoint {
                alpha,
                beta: f64::NAN,
                t: f64::NAN,
                f: 0.0,
                error: 0.0,
                kind: LevelSet::Empty,
            });
        }
        if alpha == 0.0 {
            return Ok(SpectrumPoint {
                alpha,
                beta: f64::NAN,
                t: f64::NAN,
                f: 0.0,
                error: 0.0,
                kind: LevelSet::LeftEndpoint,
            });
        }
        if alpha == 1.0 {
            return Ok(SpectrumPoint {
                alpha,
                beta: f64::NAN,
                t: f64::NAN,
                f: 0.5,
                error: 0.0,
                kind: LevelSet::RightEndpoint,
            });
        }
        match self.interior_point(&self.fe, alpha) {
            Err(Error::AlphaUnreachable { .. }) => {
                // alpha near 1 asks for heavy digits: raise the truncation
                // and retry on a fresh solver before giving up
                let base = self.fe.alphabet().truncation();
                let mut last = None;
                for factor in [8u64, 64] {
                    let truncation = (base.saturating_mul(factor)).min(1_000_000);
                    let fe = FreeEnergySolver::new(
                        AlphabetSpec::new(self.fe.alphabet().min_digit(), truncation)?,
                        DEFAULT_DEGREE,
                        self.fe.tol(),
                    )?;
                    match self.interior_point(&fe, alpha) {
                        Err(Error::AlphaUnreachable { alpha, min, max }) => {
                            last = Some(Error::AlphaUnreachable { alpha, min, max })
                        }
                        other => return other,
                    }
                }
                Err(last.expect("retry ladder ran"))
            }
            other => other,
        }
    }

    fn interior_point(&self, fe: &FreeEnergySolver, alpha: f64) -> Result<SpectrumPoint> {
        let (beta, _) = self.invert_slope_on(fe, alpha)?;
        let t = fe.t_value(beta)?;
        let f = (t + beta * alpha).max(0.0);
        let error = fe.tol() * (1.0 + beta.abs()) + self.beta_tol * self.beta_tol;
        Ok(SpectrumPoint {
            alpha,
            beta,
            t,
            f,
            error,
            kind: LevelSet::Interior,
        })
    }

    /// Solve `g(beta) = t'(beta) + alpha = 0` (g strictly increasing).
    fn invert_slope_on(&self, fe: &FreeEnergySolver, alpha: f64) -> Result<(f64, f64)> {
        let g = |beta: f64| -> Result<f64> { Ok(fe.t_prime(beta, self.fd_step)? + alpha) };
        let g0 = g(0.0)?;
        if g0 == 0.0 {
            return Ok((0.0, 0.0));
        }
        let (mut lo, mut f_lo, mut hi, mut f_hi);
        if g0 > 0.0 {
            // root on the negative side
            hi = 0.0;
            f_hi = g0;
            let mut step = 0.5;
            lo = -step;
            loop {
                f_lo = g(lo)?;
                if f_lo < 0.0 {
                    break;
                }
                hi = lo;
                f_hi = f_lo;
                step *= 2.0;
                lo -= step;
                if lo < -self.beta_cap {
                    let max = -fe.t_prime(hi, self.fd_step)?;
                    return Err(Error::AlphaUnreachable {
                        alpha,
                        min: 0.0,
                        max,
                    });
                }
            }
        } else {
            lo = 0.0;
            f_lo = g0;
            let mut step = 0.5;
            hi = step;
            loop {
                f_hi = g(hi)?;
                if f_hi > 0.0 {
                    break;
                }
                lo = hi;
                f_lo = f_hi;
                step *= 2.0;
                hi += step;
                if hi > self.beta_cap {
                    let min = -fe.t_prime(lo, self.fd_step)?;
                    return Err(Error::AlphaUnreachable {
                        alpha,
                        min,
                        max: 1.0,
                    });
                }
            }
        }
        // reuse the decreasing-function Illinois on -g
        let (beta, res) = illinois(
            |b| g(b).map(|v| -v),
            lo,
            -f_lo,
            hi,
            -f_hi,
            0.0,
            self.beta_tol,
            120,
        )?;
        Ok((beta, res))
    }

    /// Pointwise spectrum over a grid; per-point failures are collected, not
    /// fatal. Rows come back in grid order.
    pub fn curve(&self, grid: &[f64]) -> Vec<SpectrumRow> {
        grid.par_iter()
            .map(|&alpha| SpectrumRow {
                alpha,
                point: self.point(alpha),
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub point: Result<SpectrumPoint>,
}

// ---------------------------------------------------------------------------
// restricted dimensions
// ---------------------------------------------------------------------------

/// Certified depth-1 bracket around `dim I_q`: since
/// `prod a_k <= q_n <= prod (a_k + 1)`, the restricted pressure at depth one
/// is sandwiched between two series, and `t_q(0)` lies between the roots in
/// `t` of `sum_{k >= q+1} k^{-2t} = 1` (lower) and
/// `sum_{k >= q} k^{-2t} = 1` (upper).
pub fn dim_iq_bracket(q: u64) -> Result<(f64, f64)> {
    if q < 2 {
        return Err(Error::Precondition("depth-1 bracket needs q >= 2".into()));
    }
    let hi = restricted_series_root(q)?;
    let lo = restricted_series_root(q + 1)?;
    Ok((lo - 1e-10, hi + 1e-10))
}

/// Root in `t` of `ln sum_{k >= q} k^{-2t} = 0`.
fn restricted_series_root(q: u64) -> Result<f64> {
    let cut = (8 * q).max(32_768);
    let ln_series = |t: f64| -> Result<f64> {
        let s = 2.0 * t;
        let partial: f64 = (q..=cut).map(|k| (k as f64).powf(-s)).sum();
        Ok((partial + zeta_tail(s, cut).value).ln())
    };
    let lo = 0.5 + 1e-9;
    let f_lo = ln_series(lo)?;
    if f_lo <= 0.0 {
        return Err(Error::Bracketing(format!(
            "restricted series below 1 already at t = {lo}"
        )));
    }
    let mut hi = 1.0;
    let mut f_hi = ln_series(hi)?;
    let mut step = 0.5;
    while f_hi > 0.0 {
        step *= 2.0;
        hi += step;
        if hi > 64.0 {
            return Err(Error::Bracketing("restricted series root above t = 64".into()));
        }
        f_hi = ln_series(hi)?;
    }
    let (root, _) = illinois(ln_series, lo, f_lo, hi, f_hi, 1e-13, 0.0, 200)?;
    Ok(root)
}

const DIM_BRANCH_CAP: u64 = 6_000_000;

/// Hausdorff dimension of `I_q` (digits all `>= q`) to accuracy `tol`:
/// the root `t_q(0)` of the restricted pressure.
///
/// Large `q` is resolved by the certified depth-1 bracket alone; small `q`
/// falls back to the restricted transfer operator with the truncation raised
/// until its certified effect on the root is below `tol`.
pub fn dim_iq(q: u64, tol: f64) -> Result<f64> {
    if q < 1 {
        return Err(Error::Precondition("q must be >= 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("tolerance must be > 0".into()));
    }
    if q == 1 {
        // the full system has dimension 1: solve t(0) with the truncation
        // sized so the certified tail effect stays below tol
        let needed = (5.0 / tol) as u64;
        let m = needed.clamp(DEFAULT_TRUNCATION, DIM_BRANCH_CAP);
        let solver = FreeEnergySolver::new(
            AlphabetSpec::full(m)?,
            DEFAULT_DEGREE,
            (tol * 0.2).max(1e-11),
        )?;
        let sample = solver.solve(0.0)?;
        if needed > DIM_BRANCH_CAP {
            let est = pressure_via_operator_deg(sample.t, 0.0, solver.alphabet(), 1e-13, DEFAULT_DEGREE)?;
            let achieved = (est.upper - est.value.finite().unwrap()) / solver.derivative_bound();
            if achieved > tol {
                return Err(Error::ToleranceUnreachable {
                    requested: tol,
                    achieved,
                });
            }
        }
        return Ok(sample.t);
    }
    let (lo, hi) = dim_iq_bracket(q)?;
    if hi - lo <= 2.0 * tol {
        return Ok(0.5 * (lo + hi));
    }
    dim_iq_operator(q, tol, lo, hi)
}

fn dim_iq_operator(q: u64, tol: f64, bracket_lo: f64, bracket_hi: f64) -> Result<f64> {
    let slope = -2.0 * surd_fixed_point(q).ln();
    let p_tol = tol * slope * 0.3;
    let res_t = 0.3 * tol;
    let mut truncation = (q * 256).max(8192);
    loop {
        let branches = truncation - q + 1;
        let alphabet = AlphabetSpec::new(q, truncation)?;
        let pressure = |t: f64| -> Result<f64> {
            Ok(pressure_via_operator_deg(t, 0.0, alphabet, 1e-13, DEFAULT_DEGREE)?
                .value
                .finite()
                .expect("finite"))
        };
        // the depth-1 bracket holds for the untruncated system; the truncated
        // root can sit slightly below it
        let mut lo = bracket_lo - 0.05;
        let mut f_lo = pressure(lo)?;
        while f_lo <= 0.0 && lo > 0.5 {
            lo = 0.5 + 0.5 * (lo - 0.5);
            f_lo = pressure(lo)?;
        }
        if f_lo <= 0.0 {
            return Err(Error::Bracketing(format!(
                "restricted pressure not positive near t = {lo} for q = {q}"
            )));
        }
        let hi = bracket_hi + 0.05;
        let f_hi = pressure(hi)?;
        if f_hi >= 0.0 {
            return Err(Error::Bracketing(format!(
                "restricted pressure not negative at t = {hi} for q = {q}"
            )));
        }
        let (root, _) = illinois(pressure, lo, f_lo, hi, f_hi, p_tol, 0.0, 200)?;
        let est = pressure_via_operator_deg(root, 0.0, alphabet, 1e-13, DEFAULT_DEGREE)?;
        let tail_effect = (est.upper - est.value.finite().unwrap()) / slope;
        // the true root lies both in [root - res, root + tail + res] (the
        // truncation only lowers the computed root) and in the depth-1
        // bracket; intersect so each side sharpens the other
        let i_lo = (root - res_t).max(bracket_lo);
        let i_hi = (root + tail_effect + res_t).min(bracket_hi);
        if i_lo <= i_hi && i_hi - i_lo <= 2.0 * tol {
            return Ok(0.5 * (i_lo + i_hi));
        }
        if branches >= DIM_BRANCH_CAP {
            return Err(Error::ToleranceUnreachable {
                requested: tol,
                achieved: 0.5 * (i_hi - i_lo).abs().max(res_t),
            });
        }
        truncation = (truncation * 4).min(q + DIM_BRANCH_CAP - 1);
    }
}

/// `(dim I_q - 1/2) ln q / ln ln q`, the desk-scale proxy for the Ramharter
/// asymptotic constant 1/2.
pub fn ramharter_ratio(q: u64) -> Result<f64> {
    if q < 3 {
        return Err(Error::Precondition(
            "ramharter ratio needs q >= 3 (ln ln q > 0)".into(),
        ));
    }
    let lnq = (q as f64).ln();
    let lnlnq = lnq.ln();
    let tol = (2e-3 * lnlnq / lnq).clamp(1e-6, 1e-3);
    let dim = dim_iq(q, tol)?;
    Ok((dim - 0.5) * lnq / lnlnq)
}

// ---------------------------------------------------------------------------
// tail-sum verification
// ---------------------------------------------------------------------------

/// Verification record for the two tail conditions behind the
/// `t(beta) -> 1/2 - beta` asymptotic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonLemmaReport {
    pub epsilon: f64,
    /// `N(eps) = (eps/3)^(-2/eps)`.
    pub n_cutoff: f64,
    /// `beta(eps) = (3/ln 2) ln(eps) (eps/3)^(-4/eps)` (very negative).
    pub beta_eps: f64,
    /// Upper bound on the tail double sum (condition A).
    pub sum_a: f64,
    /// The finite double sum with the `(1 + 1/(k(l+1)))^(2 beta)` factor
    /// (condition B), exact when the pair budget allows.
    pub sum_b: f64,
    /// Whether `sum_b` was summed exactly or through the sup-factor bound.
    pub sum_b_exact: bool,
    pub pass: bool,
}

const AXIS_BUDGET: f64 = 1e8;
const PAIR_BUDGET: u128 = 1_000_000_000;

/// Check conditions (A) and (B) at cutoff `N(eps)`: both sums below 1/2.
pub fn verify_epsilon_lemma(epsilon: f64) -> Result<EpsilonLemmaReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Precondition(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let n_cutoff = (epsilon / 3.0).powf(-2.0 / epsilon);
    if n_cutoff.is_nan() || n_cutoff > AXIS_BUDGET {
        return Err(Error::SummationBudget(format!(
            "N(eps) = {n_cutoff:.3e} exceeds the {AXIS_BUDGET:.0e}-term axis budget \
             (reachable roughly for eps >= 0.26)"
        )));
    }
    let n = n_cutoff.floor() as u64;
    let beta_eps = 3.0 / std::f64::consts::LN_2 * epsilon.ln() * (n_cutoff * n_cutoff);
    let s = 1.0 + epsilon;

    // (A): tail majorization 2 (sum_{k>N} k^-s)(sum_l l^-s), certified upward
    let sum_a = 2.0 * zeta_tail(s, n).upper() * zeta(s, 1e-8)?.upper();

    // (B): finite double sum over k, l <= N with the pair factor in log space
    let two_beta = 2.0 * beta_eps;
    let pairs = (n as u128) * (n as u128);
    let (sum_b, sum_b_exact) = if pairs <= PAIR_BUDGET {
        let ln_k: Vec<f64> = (1..=n).map(|k| (k as f64).ln()).collect();
        let rows: Vec<f64> = (1..=n)
            .into_par_iter()
            .map(|k| {
                let kf = k as f64;
                let lk = ln_k[(k - 1) as usize];
                let mut row = 0.0;
                for l in 1..=n {
                    let arg = -s * (lk + ln_k[(l - 1) as usize])
                        + two_beta * (1.0 / (kf * (l as f64 + 1.0))).ln_1p();
                    row += arg.exp();
                }
                row
            })
            .collect();
        (rows.iter().sum::<f64>(), true)
    } else {
        // sup of the pair factor over the grid sits at k = l = N
        let sup_factor = (two_beta * (1.0 / (n as f64 * (n as f64 + 1.0))).ln_1p()).exp();
        let axis: f64 = (1..=n)
            .into_par_iter()
            .map(|k| (k as f64).powf(-s))
            .sum();
        (sup_factor * axis * axis, false)
    };

    Ok(EpsilonLemmaReport {
        epsilon,
        n_cutoff,
        beta_eps,
        sum_a,
        sum_b,
        sum_b_exact,
        pass: sum_a < 0.5 && sum_b < 0.5,
    })
}

// ---------------------------------------------------------------------------
// boundary asymptotics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRow {
    pub delta: f64,
    pub alpha: f64,
    pub f: f64,
    /// `(f(1-delta) - 1/2) ln(1/delta) / ln ln(1/delta)`.
    pub ratio: f64,
    pub in_band: bool,
}

#[derive(Debug)]
pub struct BoundaryReport {
    /// Acceptance band for the ratio (wide enough to absorb pre-asymptotic
    /// and truncation effects).
    pub band: (f64, f64),
    pub rows: Vec<(f64, Result<BoundaryRow>)>,
}

pub const BOUNDARY_BAND: (f64, f64) = (0.1, 4.0);

/// Ratio test of the `f(1-delta) = 1/2 + Theta(ln ln / ln)` boundary law on
/// a grid of deltas in (0, 1/2); per-point failures are collected.
pub fn boundary_asymptotic_check(solver: &SpectrumSolver, deltas: &[f64]) -> BoundaryReport {
    let rows = deltas
        .par_iter()
        .map(|&delta| {
            let row = boundary_row(solver, delta);
            (delta, row)
        })
        .collect();
    BoundaryReport {
        band: BOUNDARY_BAND,
        rows,
    }
}

fn boundary_row(solver: &SpectrumSolver, delta: f64) -> Result<BoundaryRow> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Precondition(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    let log_inv = (1.0 / delta).ln();
    let loglog = log_inv.ln();
    if loglog <= 0.0 {
        return Err(Error::Domain(format!(
            "delta = {delta} too large for the log-log ratio (needs delta < 1/e)"
        )));
    }
    let point = solver.point(1.0 - delta)?;
    let ratio = (point.f - 0.5) * log_inv / loglog;
    Ok(BoundaryRow {
        delta,
        alpha: 1.0 - delta,
        f: point.f,
        ratio,
        in_band: BOUNDARY_BAND.0 < ratio && ratio < BOUNDARY_BAND.1,
    })
}

// ---------------------------------------------------------------------------
// free-function entry points with default configuration
// ---------------------------------------------------------------------------

/// `t(beta)` over the default full alphabet.
pub fn solve_t(beta: f64, alphabet: AlphabetSpec, tol: f64) -> Result<FreeEnergySample> {
    FreeEnergySolver::new(alphabet, DEFAULT_DEGREE, tol)?.solve(beta)
}

/// Central-difference `t'(beta)` over the given alphabet.
pub fn t_prime(beta: f64, alphabet: AlphabetSpec, h: f64) -> Result<f64> {
    FreeEnergySolver::new(alphabet, DEFAULT_DEGREE, DEFAULT_T_TOL)?.t_prime(beta, h)
}

/// One spectrum point at default configuration.
pub fn spectrum_point(alpha: f64, tol: f64) -> Result<SpectrumPoint> {
    let fe = FreeEnergySolver::new(
        AlphabetSpec::full(DEFAULT_TRUNCATION)?,
        DEFAULT_DEGREE,
        tol.min(DEFAULT_T_TOL),
    )?;
    SpectrumSolver::new(fe).point(alpha)
}

/// Pointwise spectrum over a grid at default configuration.
pub fn spectrum_curve(grid: &[f64]) -> Vec<SpectrumRow> {
    SpectrumSolver::with_defaults().curve(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(m: u64) -> AlphabetSpec {
        AlphabetSpec::full(m).unwrap()
    }

    #[test]
    fn full_system_dimension_is_one() {
        let s = solve_t(0.0, full(10_000), 1e-9).unwrap();
        assert!((s.t - 1.0).abs() < 1e-3, "t(0) = {}", s.t);
        assert!(s.residual <= 1e-9 * 2.0 * 0.9624236501192069);
        assert!(s.derivative < 0.0);
    }

    #[test]
    fn free_energy_at_beta_five_matches_the_proof_bound() {
        // t(5) <= P(0,5) / (2 ln gamma) = ln zeta(10) / (2 ln gamma)
        let s = solve_t(5.0, full(2_000), 1e-10).unwrap();
        assert!(s.t > 0.0);
        assert!(s.t <= 1.04e-3, "t(5) = {}", s.t);
    }

    #[test]
    fn free_energy_stays_above_the_finiteness_line() {
        let solver = FreeEnergySolver::new(full(10_000), DEFAULT_DEGREE, 1e-9).unwrap();
        for beta in [-0.4, 0.0, 0.7, 2.0] {
            let t = solver.t_value(beta).unwrap();
            assert!(t > 0.5 - beta, "beta={beta}: t={t}");
        }
    }

    #[test]
    fn derivative_is_negative_and_slope_increases() {
        let solver = FreeEnergySolver::new(full(4_000), DEFAULT_DEGREE, 1e-10).unwrap();
        let d_low = solver.t_prime(-0.25, 1e-4).unwrap();
        let d_mid = solver.t_prime(0.0, 1e-4).unwrap();
        let d_high = solver.t_prime(0.75, 1e-4).unwrap();
        assert!(d_low < 0.0 && d_mid < 0.0 && d_high < 0.0);
        // strict convexity of t: t' strictly increasing
        assert!(d_low < d_mid && d_mid < d_high);
    }

    #[test]
    fn implicit_derivative_agrees_with_finite_differences() {
        let solver = FreeEnergySolver::new(full(4_000), DEFAULT_DEGREE, 1e-10).unwrap();
        let sample = solver.solve(0.5).unwrap();
        let fd = solver.t_prime(0.5, 1e-4).unwrap();
        assert!(
            (sample.derivative - fd).abs() < 5e-4,
            "{} vs {fd}",
            sample.derivative
        );
    }

    #[test]
    fn spectrum_outside_unit_interval_is_empty() {
        let p = spectrum_point(1.5, 1e-8).unwrap();
        assert_eq!(p.kind, LevelSet::Empty);
        assert_eq!(p.f, 0.0);
        let p = spectrum_point(-0.2, 1e-8).unwrap();
        assert_eq!(p.kind, LevelSet::Empty);
    }

    #[test]
    fn spectrum_endpoints_take_proven_values() {
        let p0 = spectrum_point(0.0, 1e-8).unwrap();
        assert_eq!((p0.f, p0.kind), (0.0, LevelSet::LeftEndpoint));
        let p1 = spectrum_point(1.0, 1e-8).unwrap();
        assert_eq!((p1.f, p1.kind), (0.5, LevelSet::RightEndpoint));
    }

    #[test]
    fn interior_spectrum_point_on_the_increasing_branch() {
        // alpha = 0.5 < alpha_0: positive beta, f strictly between 0 and 1
        let fe = FreeEnergySolver::new(full(3_000), DEFAULT_DEGREE, 1e-9).unwrap();
        let p = SpectrumSolver::new(fe).point(0.5).unwrap();
        assert_eq!(p.kind, LevelSet::Interior);
        assert!(p.beta > 0.0);
        assert!(p.f > 0.4 && p.f < 1.0, "f = {}", p.f);
        // Legendre consistency: f = t + beta alpha by construction
        assert!((p.f - (p.t + p.beta * p.alpha)).abs() < 1e-12);
    }

    #[test]
    fn dim_iq_full_system() {
        let d = dim_iq(1, 1e-3).unwrap();
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn dim_iq_bracket_is_tight_for_large_q() {
        // mpmath roots: q=1000 bracket [0.60975179, 0.60976136]
        let (lo, hi) = dim_iq_bracket(1000).unwrap();
        assert!(lo < hi && hi - lo < 2e-5);
        assert!((lo - 0.609_751_789_467_935_8).abs() < 1e-6);
        assert!((hi - 0.609_761_364_081_011_1).abs() < 1e-6);
        let d = dim_iq(1000, 1e-3).unwrap();
        assert!(d > lo - 1e-9 && d < hi + 1e-9);
    }

    #[test]
    fn dim_iq_is_strictly_decreasing_on_powers_of_two() {
        let mut prev = f64::INFINITY;
        for q in [2u64, 4, 8, 16] {
            let d = dim_iq(q, 5e-3).unwrap();
            assert!(d > 0.5 && d <= 1.0, "q={q}: {d}");
            assert!(d < prev, "q={q}: {d} !< {prev}");
            prev = d;
        }
    }

    #[test]
    fn ramharter_needs_q_at_least_three() {
        assert!(matches!(ramharter_ratio(2), Err(Error::Precondition(_))));
    }

    #[test]
    fn ramharter_ratio_at_one_thousand() {
        // bracket midpoint gives (dim - 1/2) ln q / ln ln q ~ 0.3923 (mpmath)
        let r = ramharter_ratio(1000).unwrap();
        assert!((r - 0.392_297).abs() < 2e-3, "ratio = {r}");
        assert!((0.3..=0.8).contains(&r));
    }

    #[test]
    fn epsilon_lemma_passes_at_045() {
        let r = verify_epsilon_lemma(0.45).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.sum_b_exact);
        assert!(r.sum_a < 0.5 && r.sum_b < 0.5);
        assert!(r.beta_eps < 0.0);
        // N(0.45) = (0.15)^(-2/0.45) ~ 4590
        assert!((r.n_cutoff - 4590.0).abs() < 1.0);
    }

    #[test]
    fn epsilon_lemma_rejects_out_of_range() {
        assert!(matches!(
            verify_epsilon_lemma(0.6),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_epsilon_lemma(0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn epsilon_lemma_budget_cuts_off_small_epsilon() {
        assert!(matches!(
            verify_epsilon_lemma(0.2),
            Err(Error::SummationBudget(_))
        ));
    }

    #[test]
    fn root_certificate_survives_degree_doubling() {
        // re-solving with twice the collocation degree moves t by <= 2 tol
        let tol = 1e-9;
        let coarse = FreeEnergySolver::new(full(2_000), DEFAULT_DEGREE, tol).unwrap();
        let fine = FreeEnergySolver::new(full(2_000), 2 * DEFAULT_DEGREE, tol).unwrap();
        for beta in [0.0, 0.8] {
            let a = coarse.t_value(beta).unwrap();
            let b = fine.t_value(beta).unwrap();
            assert!((a - b).abs() <= 2.0 * tol, "beta={beta}: {a} vs {b}");
        }
    }

    #[test]
    fn legendre_transform_agrees_with_grid_infimum() {
        // independent oracle: f(alpha) = inf over beta of t(beta) + beta alpha,
        // scanned on a grid
        let fe = FreeEnergySolver::new(full(2_000), DEFAULT_DEGREE, 1e-10).unwrap();
        let solver = SpectrumSolver::new(fe);
        let alpha = 0.6;
        let p = solver.point(alpha).unwrap();
        let mut inf = f64::INFINITY;
        for i in 0..=160 {
            let beta = -1.0 + 0.025 * i as f64;
            inf = inf.min(solver.fe.t_value(beta).unwrap() + beta * alpha);
        }
        // grid resolution h = 0.025 costs ~ t'' h^2 / 2
        assert!(inf >= p.f - 1e-12, "grid infimum {inf} below f = {}", p.f);
        assert!(inf - p.f < 2e-4, "grid infimum {inf} far above f = {}", p.f);
    }

    #[test]
    fn spectrum_beta_inverts_the_derivative() {
        // duality: t'(beta(alpha)) = -alpha at the returned parameter
        let fe = FreeEnergySolver::new(full(2_000), DEFAULT_DEGREE, 1e-10).unwrap();
        let solver = SpectrumSolver::new(fe);
        let alpha = 0.7;
        let p = solver.point(alpha).unwrap();
        let slope = solver.fe.t_prime(p.beta, 1e-4).unwrap();
        assert!((slope + alpha).abs() < 1e-4, "t'({}) = {slope}", p.beta);
    }

    #[test]
    fn restricted_pressure_obeys_the_depth_one_sandwich() {
        // ln sum_{k>=q+1} k^{-2t} <= P_q(t,0) <= ln sum_{k>=q} k^{-2t}
        let q = 5u64;
        let t = 0.72;
        let series = |start: u64| -> f64 {
            let cut = 200_000u64;
            let partial: f64 = (start..=cut).map(|k| (k as f64).powf(-2.0 * t)).sum();
            (partial + zeta_tail(2.0 * t, cut).value).ln()
        };
        let p_q = pressure_via_operator_deg(
            t,
            0.0,
            AlphabetSpec::new(q, 400_000).unwrap(),
            1e-13,
            DEFAULT_DEGREE,
        )
        .unwrap();
        let v = p_q.value.finite().unwrap();
        assert!(series(q + 1) <= v + 1e-6, "lower {} vs {v}", series(q + 1));
        assert!(v - 1e-3 <= series(q), "upper {} vs {v}", series(q));
    }

    #[test]
    fn dim_iq_excess_matches_the_asymptotic_scale() {
        // at q = 100 the excess over 1/2 is within a factor 2 of
        // (1/2) ln ln q / ln q = 0.1658
        let d = dim_iq(100, 1e-3).unwrap();
        let excess = d - 0.5;
        let scale = 0.5 * (100f64).ln().ln() / (100f64).ln();
        assert!(excess >= 0.5 * scale && excess <= 2.0 * scale, "excess {excess}");
    }

    #[test]
    fn unreachable_alpha_reports_the_attained_range() {
        // a tight beta cap pins the reachable range well below alpha = 0.93;
        // the truncation retry ladder cannot lift it and the error carries
        // the attained maximum
        let fe = FreeEnergySolver::new(full(2_000), DEFAULT_DEGREE, 1e-9).unwrap();
        let mut solver = SpectrumSolver::new(fe);
        solver.beta_cap = 0.5;
        match solver.point(0.93) {
            Err(Error::AlphaUnreachable { alpha, max, .. }) => {
                assert_eq!(alpha, 0.93);
                assert!(max > 0.88 && max < 0.92, "max = {max}");
            }
            other => panic!("expected unreachable alpha, got {other:?}"),
        }
    }

    #[test]
    fn boundary_check_rejects_large_delta() {
        let solver = SpectrumSolver::new(
            FreeEnergySolver::new(full(100), DEFAULT_DEGREE, 1e-8).unwrap(),
        );
        let report = boundary_asymptotic_check(&solver, &[0.6]);
        assert!(report.rows[0].1.is_err());
    }
}
