//! The weighted transfer operator of the (restricted) Gauss system,
//!
//! `(L f)(x) = sum_{a=q}^{M} (a+x)^{-2t} a^{-2beta} f(1/(a+x))`,
//!
//! discretized by polynomial collocation at Chebyshev-Lobatto nodes on
//! `[0, 1/q]`. The branch maps are analytic, so the node values of an
//! eigenfunction converge geometrically in the degree; the leading
//! eigenvalue is extracted by power iteration and `ln lambda` approximates
//! the pressure, with the alphabet-truncation effect reported as a
//! certified upward bound.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pressure::{AlphabetSpec, PressureEstimate, PressureMethod, PressureValue};
use crate::special::zeta_tail;

pub const DEFAULT_DEGREE: usize = 16;
pub const MAX_POWER_ITERATIONS: u64 = 100_000;

/// One operator discretization request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub t: f64,
    pub beta: f64,
    pub alphabet: AlphabetSpec,
    /// Polynomial collocation degree (>= 4).
    pub degree: usize,
}

impl OperatorSpec {
    pub fn new(t: f64, beta: f64, alphabet: AlphabetSpec, degree: usize) -> Result<Self> {
        if degree < 4 {
            return Err(Error::Precondition(format!(
                "collocation degree must be >= 4 (got {degree})"
            )));
        }
        Ok(OperatorSpec {
            t,
            beta,
            alphabet,
            degree,
        })
    }

    /// Collocation domain `[0, 1/min_digit]`; the attractor of the
    /// restricted system and all branch images live inside it.
    pub fn domain(&self) -> (f64, f64) {
        (0.0, 1.0 / self.alphabet.min_digit() as f64)
    }
}

/// Leading eigendata of a discretized operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub log_lambda: f64,
    /// Collocation nodes, descending from the right edge of the domain to 0.
    pub nodes: Vec<f64>,
    /// Eigenfunction samples at the nodes, sup-normalized to 1; all > 0.
    pub eigenfunction: Vec<f64>,
    /// `||L f - lambda f||_inf / ||f||_inf` at the returned samples.
    pub residual: f64,
    /// Certified upward effect of the alphabet truncation on `ln lambda`
    /// (infinite when the untruncated branch weights diverge).
    pub tail_bound: f64,
}

/// Chebyshev-Lobatto points on `[lo, hi]`, descending.
pub fn chebyshev_nodes(degree: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..=degree)
        .map(|k| {
            let c = (std::f64::consts::PI * k as f64 / degree as f64).cos();
            lo + (hi - lo) * 0.5 * (c + 1.0)
        })
        .collect()
}

fn barycentric_weights(degree: usize) -> Vec<f64> {
    (0..=degree)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == degree {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect()
}

/// Values of all Lagrange cardinal polynomials at `y` (barycentric form).
fn cardinal_row(nodes: &[f64], weights: &[f64], y: f64, out: &mut [f64]) {
    for (i, &x) in nodes.iter().enumerate() {
        if y == x {
            out.fill(0.0);
            out[i] = 1.0;
            return;
        }
    }
    let mut denom = 0.0;
    for i in 0..nodes.len() {
        let c = weights[i] / (y - nodes[i]);
        out[i] = c;
        denom += c;
    }
    for v in out.iter_mut() {
        *v /= denom;
    }
}

/// Interpolate samples `f` (on `nodes`) at `y`.
fn interpolate(nodes: &[f64], weights: &[f64], f: &[f64], y: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..nodes.len() {
        if y == nodes[i] {
            return f[i];
        }
        let c = weights[i] / (y - nodes[i]);
        num += c * f[i];
        den += c;
    }
    num / den
}

/// Dense collocation matrix of the operator: row j maps samples to
/// `(L f)(x_j)`. Assembled blockwise in parallel with a fixed fold order.
fn assemble(spec: &OperatorSpec) -> (Vec<f64>, Vec<f64>) {
    let n = spec.degree + 1;
    let (lo, hi) = spec.domain();
    let nodes = chebyshev_nodes(spec.degree, lo, hi);
    let weights = barycentric_weights(spec.degree);
    let digits: Vec<u64> = spec.alphabet.digits().collect();
    const BLOCK: usize = 8192;

    let blocks: Vec<Vec<f64>> = digits
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut a_mat = vec![0.0f64; n * n];
            let mut row = vec![0.0f64; n];
            for &a in chunk {
                let af = a as f64;
                let ln_a = af.ln();
                for (j, &x) in nodes.iter().enumerate() {
                    let ax = af + x;
                    let w = (-2.0 * spec.t * ax.ln() - 2.0 * spec.beta * ln_a).exp();
                    cardinal_row(&nodes, &weights, 1.0 / ax, &mut row);
                    let dst = &mut a_mat[j * n..(j + 1) * n];
                    for m in 0..n {
                        dst[m] += w * row[m];
                    }
                }
            }
            a_mat
        })
        .collect();

    let mut a_mat = vec![0.0f64; n * n];
    for block in blocks {
        for (dst, src) in a_mat.iter_mut().zip(block) {
            *dst += src;
        }
    }
    (nodes, a_mat)
}

/// Apply the operator once to function samples given at the collocation
/// nodes of `spec` (descending Chebyshev-Lobatto points on the domain).
pub fn apply(spec: &OperatorSpec, f: &[f64]) -> Result<Vec<f64>> {
    let n = spec.degree + 1;
    if f.len() != n {
        return Err(Error::SampleLength {
            got: f.len(),
            expected: n,
        });
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSamples);
    }
    let (lo, hi) = spec.domain();
    let nodes = chebyshev_nodes(spec.degree, lo, hi);
    let weights = barycentric_weights(spec.degree);
    let out: Vec<f64> = nodes
        .par_iter()
        .map(|&x| {
            let mut acc = 0.0;
            for a in spec.alphabet.digits() {
                let af = a as f64;
                let ax = af + x;
                let w = (-2.0 * spec.t * ax.ln() - 2.0 * spec.beta * af.ln()).exp();
                acc += w * interpolate(&nodes, &weights, f, 1.0 / ax);
            }
            acc
        })
        .collect();
    Ok(out)
}

/// Certified upper bound on the dropped branch weights
/// `sup_x sum_{a > M} (a+x)^{-2t} a^{-2beta}` over the domain, infinite when
/// the series diverges.
fn truncation_weight_bound(spec: &OperatorSpec) -> f64 {
    let s = 2.0 * (spec.t + spec.beta);
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let m = spec.alphabet.truncation();
    let base = zeta_tail(s, m).upper();
    if spec.t >= 0.0 {
        // (a+x)^{-2t} <= a^{-2t}
        base
    } else {
        // (a+x)^{-2t} <= a^{-2t} (1 + hi/(M+1))^{-2t}
        let (_, hi) = spec.domain();
        base * (1.0 + hi / (m as f64 + 1.0)).powf(-2.0 * spec.t)
    }
}

/// Leading eigenvalue by power iteration with sup-norm normalization,
/// deterministic start at `f == 1`.
///
/// Iterates until the sup-norm residual on the normalized iterate falls
/// below `tol` relative to `lambda` (the meaningful scale when the
/// eigenvalue itself is far from 1).
pub fn leading_eigenvalue(spec: &OperatorSpec, tol: f64) -> Result<EigenResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition("eigen tolerance must be > 0".into()));
    }
    let n = spec.degree + 1;
    let (nodes, a_mat) = assemble(spec);
    let mut v = vec![1.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut lambda = 1.0f64;
    let mut residual = f64::INFINITY;
    let mut iterations = 0u64;
    while iterations < MAX_POWER_ITERATIONS {
        iterations += 1;
        matvec(&a_mat, &v, &mut w);
        // v is sup-normalized with some v_j = 1; read lambda off that node
        let (mut jmax, mut vmax) = (0usize, 0.0f64);
        for (j, &vj) in v.iter().enumerate() {
            if vj.abs() > vmax {
                vmax = vj.abs();
                jmax = j;
            }
        }
        lambda = w[jmax] / v[jmax];
        residual = v
            .iter()
            .zip(w.iter())
            .map(|(&vj, &wj)| (wj - lambda * vj).abs())
            .fold(0.0, f64::max);
        let wmax = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if !wmax.is_finite() || wmax == 0.0 {
            return Err(Error::NoConvergence {
                iterations,
                residual: f64::NAN,
            });
        }
        for (vj, &wj) in v.iter_mut().zip(w.iter()) {
            *vj = wj / wmax;
        }
        if residual <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    if residual > tol * lambda.abs() {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    if v.iter().any(|&x| x <= 0.0) || lambda <= 0.0 {
        return Err(Error::Domain(
            "leading eigenfunction is not strictly positive; raise the degree".into(),
        ));
    }
    let inf_h = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_weight = truncation_weight_bound(spec);
    let tail_bound = ((residual + tail_weight) / (inf_h * lambda)).ln_1p();
    Ok(EigenResult {
        log_lambda: lambda.ln(),
        nodes,
        eigenfunction: v,
        residual,
        tail_bound,
    })
}

fn matvec(a_mat: &[f64], v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for j in 0..n {
        let row = &a_mat[j * n..(j + 1) * n];
        out[j] = row.iter().zip(v.iter()).map(|(&a, &x)| a * x).sum();
    }
}

/// Pressure of the truncated system as `ln lambda`, with the bracket widened
/// by the residual and the certified truncation tail.
pub fn pressure_via_operator(
    t: f64,
    beta: f64,
    alphabet: AlphabetSpec,
    tol: f64,
) -> Result<PressureEstimate> {
    pressure_via_operator_deg(t, beta, alphabet, tol, DEFAULT_DEGREE)
}

pub fn pressure_via_operator_deg(
    t: f64,
    beta: f64,
    alphabet: AlphabetSpec,
    tol: f64,
    degree: usize,
) -> Result<PressureEstimate> {
    let spec = OperatorSpec::new(t, beta, alphabet, degree)?;
    let eigen_tol = tol.clamp(1e-15, 1e-12);
    let eig = leading_eigenvalue(&spec, eigen_tol)?;
    let lambda = eig.log_lambda.exp();
    let inf_h = eig
        .eigenfunction
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let down = (eig.residual / (inf_h * lambda)).ln_1p();
    Ok(PressureEstimate {
        value: PressureValue::Finite(eig.log_lambda),
        lower: eig.log_lambda - down,
        upper: eig.log_lambda + eig.tail_bound,
        method: PressureMethod::Operator,
        resolution: degree as u32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(m: u64) -> AlphabetSpec {
        AlphabetSpec::full(m).unwrap()
    }

    #[test]
    fn constant_function_maps_to_partial_zeta() {
        // t=0, beta=1, f == 1: (Lf)(x) = sum a^{-2}, constant in x
        let spec = OperatorSpec::new(0.0, 1.0, full(1_000_000), 8).unwrap();
        let out = apply(&spec, &[1.0; 9]).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        for &v in &out {
            assert!((v - zeta2).abs() < 2e-6, "got {v}");
        }
    }

    #[test]
    fn gauss_density_is_a_fixed_point_at_t_one() {
        // t=1, beta=0, f = 1/(1+x): telescoping gives Lf = f - 1/(M+1+x)
        let m = 1_000_000;
        let spec = OperatorSpec::new(1.0, 0.0, full(m), 12).unwrap();
        let (lo, hi) = spec.domain();
        let nodes = chebyshev_nodes(12, lo, hi);
        let f: Vec<f64> = nodes.iter().map(|&x| 1.0 / (1.0 + x)).collect();
        let out = apply(&spec, &f).unwrap();
        for (x, (&fi, &oi)) in nodes.iter().zip(f.iter().zip(out.iter())) {
            assert!((oi - fi).abs() < 2.0 / m as f64, "at x={x}: {oi} vs {fi}");
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let spec = OperatorSpec::new(0.7, 0.3, full(50), 6).unwrap();
        let out = apply(&spec, &[0.0; 7]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_rejects_bad_samples() {
        let spec = OperatorSpec::new(0.7, 0.3, full(50), 6).unwrap();
        assert!(matches!(
            apply(&spec, &[1.0; 3]),
            Err(Error::SampleLength { .. })
        ));
        assert!(matches!(
            apply(&spec, &[f64::NAN; 7]),
            Err(Error::NonFiniteSamples)
        ));
    }

    #[test]
    fn eigenvalue_at_t_one_is_log_one() {
        // Gauss fixed point: log lambda = 0 within 1e-6 + the truncation tail
        let eig = leading_eigenvalue(
            &OperatorSpec::new(1.0, 0.0, full(10_000), DEFAULT_DEGREE).unwrap(),
            1e-13,
        )
        .unwrap();
        assert!(
            eig.log_lambda <= 1e-6 && eig.log_lambda + eig.tail_bound >= -1e-6,
            "log lambda = {}, tail {}",
            eig.log_lambda,
            eig.tail_bound
        );
        assert!(eig.eigenfunction.iter().all(|&v| v > 0.0));
        assert!(eig.residual <= 1e-13);
    }

    #[test]
    fn eigenvalue_at_t_zero_is_exact_partial_sum() {
        // constant eigenfunction: lambda = sum_{a<=M} a^{-2}
        let m = 10_000u64;
        let eig = leading_eigenvalue(
            &OperatorSpec::new(0.0, 1.0, full(m), DEFAULT_DEGREE).unwrap(),
            1e-14,
        )
        .unwrap();
        let direct: f64 = (1..=m).map(|a| (a as f64).powi(-2)).sum();
        assert!((eig.log_lambda - direct.ln()).abs() < 1e-12);
    }

    #[test]
    fn degree_self_consistency() {
        let alphabet = full(2_000);
        let a = pressure_via_operator_deg(0.8, 0.1, alphabet, 1e-13, 8).unwrap();
        let b = pressure_via_operator_deg(0.8, 0.1, alphabet, 1e-13, 16).unwrap();
        let (va, vb) = (a.value.finite().unwrap(), b.value.finite().unwrap());
        assert!((va - vb).abs() < 1e-8, "{va} vs {vb}");
    }

    #[test]
    fn truncation_is_monotone_in_m() {
        // adding positive branch weights can only raise the eigenvalue
        let mut prev = f64::NEG_INFINITY;
        for m in [100u64, 1_000, 10_000] {
            let est = pressure_via_operator(0.6, 0.2, full(m), 1e-13).unwrap();
            let v = est.value.finite().unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn restricted_alphabet_uses_its_own_domain() {
        let spec = OperatorSpec::new(0.7, 0.0, AlphabetSpec::new(4, 4000).unwrap(), 12).unwrap();
        let (lo, hi) = spec.domain();
        assert_eq!((lo, hi), (0.0, 0.25));
        let eig = leading_eigenvalue(&spec, 1e-13).unwrap();
        assert!(eig.log_lambda.is_finite());
        assert!(eig.eigenfunction.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn positivity_is_preserved_along_the_iteration() {
        let spec = OperatorSpec::new(0.9, 0.05, full(500), 10).unwrap();
        let mut f = vec![1.0; 11];
        for _ in 0..5 {
            f = apply(&spec, &f).unwrap();
            assert!(f.iter().all(|&v| v > 0.0));
            let sup = f.iter().cloned().fold(0.0f64, f64::max);
            for v in f.iter_mut() {
                *v /= sup;
            }
        }
    }
}
