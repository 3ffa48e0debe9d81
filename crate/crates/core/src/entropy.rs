//! Rényi and von Neumann entropies, the traced characteristic-polynomial
//! identity, and recovery of Schmidt coefficients from power sums.
//!
//! All logarithms are natural.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, real_eigenvalues_complex};
use crate::tensor::Tensor;

/// Negative eigenvalues down to this value are treated as round-off and clamped.
pub const CLAMP_TOL: f64 = 1e-12;
/// Allowed deviation of the total probability from 1.
pub const NORM_TOL: f64 = 1e-9;
/// Largest matrix or polynomial degree handled by the polynomial routines.
pub const MAX_POLY_DEGREE: usize = 8;

const IMAG_TOL: f64 = 1e-8;
const DISCRIMINANT_TOL: f64 = 1e-10;

/// Probabilities `p_i`, non-negative and summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    probs: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if *p < -CLAMP_TOL {
                return Err(Error::Validation {
                    quantity: "eigenvalue",
                    value: *p,
                    reason: format!("below -{CLAMP_TOL:e}"),
                });
            }
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation {
                quantity: "trace",
                value: total,
                reason: format!("probabilities must sum to 1 within {NORM_TOL:e}"),
            });
        }
        Ok(Self { probs })
    }

    /// Eigenvalues of a density operator, sorted non-increasing.
    pub fn from_density(rho: &Tensor) -> Result<Self> {
        Self::new(hermitian_eigenvalues(rho)?)
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `sum_i p_i^alpha` over non-zero entries.
    pub fn power_sum(&self, alpha: f64) -> f64 {
        self.probs.iter().filter(|&&p| p > 0.0).map(|p| p.powf(alpha)).sum()
    }
}

/// `S_alpha = ln(sum p_i^alpha) / (1 - alpha)`.
pub fn renyi(spectrum: &Spectrum, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Rényi order must be positive, got {alpha}"
        )));
    }
    if alpha == 1.0 {
        return Err(Error::InvalidArgument(
            "Rényi order 1 is the von Neumann entropy".into(),
        ));
    }
    Ok(spectrum.power_sum(alpha).ln() / (1.0 - alpha))
}

/// `-sum p_i ln p_i`, with `0 ln 0 = 0`.
pub fn von_neumann(spectrum: &Spectrum) -> f64 {
    -spectrum
        .probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Rényi entropy of integer order from the value of the cyclic invariant
/// `Tr(rho_A^alpha)`.
pub fn renyi_from_invariant(value: f64, alpha: usize) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::InvalidArgument(format!(
            "integer Rényi order must be at least 2, got {alpha}"
        )));
    }
    if !value.is_finite() {
        return Err(Error::NonFinite);
    }
    if value <= 0.0 {
        return Err(Error::Validation {
            quantity: "invariant",
            value,
            reason: "must be positive".into(),
        });
    }
    Ok(value.ln() / (1.0 - alpha as f64))
}

/// `Tr(rho^j)` for `j = 1..=max`, real parts.
pub fn trace_powers(rho: &Tensor, max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(max);
    let mut power = rho.clone();
    for j in 1..=max {
        if j > 1 {
            power = power.matmul(rho)?;
        }
        out.push(power.trace()?.re);
    }
    Ok(out)
}

/// Coefficients of the monic characteristic polynomial
/// `x^d + c_1 x^{d-1} + .. + c_d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharPolyCoeffs {
    pub coeffs: Vec<f64>,
}

impl CharPolyCoeffs {
    /// Faddeev-LeVerrier recursion.
    pub fn of(rho: &Tensor) -> Result<Self> {
        let d = square_dim(rho)?;
        let identity = Tensor::identity_matrix(d);
        let mut coeffs = Vec::with_capacity(d);
        let mut m = identity.clone();
        for k in 1..=d {
            let am = rho.matmul(&m)?;
            let c = -am.trace()?.re / k as f64;
            coeffs.push(c);
            m = am.add(&identity.scale(c.into()))?;
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients of `Tr(rho^d) + a Tr(rho^{d-1}) + .. + const = 0` with the
    /// `Tr(rho)` term folded into the constant using `trace`.
    pub fn folded(&self, trace: f64) -> Vec<f64> {
        let d = self.degree();
        let mut out: Vec<f64> = self.coeffs[..d.saturating_sub(2)].to_vec();
        let constant = match d {
            1 => self.coeffs[0],
            _ => self.coeffs[d - 2] * trace + d as f64 * self.coeffs[d - 1],
        };
        out.push(constant);
        out
    }
}

/// Traced Cayley-Hamilton identity checked two ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharPolyRelation {
    pub coeffs: CharPolyCoeffs,
    /// `a, b, .., const` of the folded identity.
    pub folded: Vec<f64>,
    /// Residual of `Tr(rho^d) + a Tr(rho^{d-1}) + .. + const`.
    pub traced_residual: f64,
    /// Same identity with `Tr(rho^j)` replaced by `exp(-(j-1) S_j)` from the spectrum.
    pub entropy_residual: f64,
}

pub fn char_poly_relation(rho: &Tensor) -> Result<CharPolyRelation> {
    let d = square_dim(rho)?;
    if d > MAX_POLY_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} exceeds {MAX_POLY_DEGREE}"
        )));
    }
    let coeffs = CharPolyCoeffs::of(rho)?;
    let traces = trace_powers(rho, d)?;
    let folded = coeffs.folded(traces[0]);

    let spectrum = Spectrum::from_density(rho)?;
    let mut from_entropy = vec![1.0];
    for j in 2..=d {
        let s = renyi(&spectrum, j as f64)?;
        from_entropy.push((-(j as f64 - 1.0) * s).exp());
    }
    let residual = |tr: &[f64]| -> f64 {
        if d == 1 {
            return tr[0] + folded[0];
        }
        let mut r = tr[d - 1];
        for (i, a) in folded[..d - 2].iter().enumerate() {
            r += a * tr[d - 2 - i];
        }
        r + folded[d - 2]
    };
    Ok(CharPolyRelation {
        traced_residual: residual(&traces).abs(),
        entropy_residual: residual(&from_entropy).abs(),
        coeffs,
        folded,
    })
}

fn square_dim(rho: &Tensor) -> Result<usize> {
    if rho.rank() != 2 || rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::Shape(format!(
            "expected a square matrix, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(rho.nrows())
}

/// Elementary symmetric polynomials `e_1..e_d` from power sums `p_1..p_d`.
pub fn elementary_from_power_sums(p: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for k in 1..=p.len() {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * p[i - 1];
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    e
}

/// Schmidt coefficients `sigma_i`, sorted non-increasing, from
/// `J_k = sum_i sigma_i^{2k}` for `k = 1..=d`.
pub fn schmidt_from_jk(jvals: &[f64]) -> Result<Vec<f64>> {
    let d = jvals.len();
    if d == 0 || d > MAX_POLY_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "need 1..={MAX_POLY_DEGREE} power sums, got {d}"
        )));
    }
    if jvals.iter().any(|j| !j.is_finite()) {
        return Err(Error::NonFinite);
    }
    if jvals.iter().any(|&j| j < -DISCRIMINANT_TOL) {
        return Err(inconsistent("power sums must be non-negative"));
    }
    let squares = match d {
        1 => vec![jvals[0].max(0.0)],
        2 => two_level(jvals[0], jvals[1])?,
        _ => roots_from_power_sums(jvals)?,
    };
    let mut sigma: Vec<f64> = squares.iter().map(|x| x.sqrt()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

fn inconsistent(reason: &str) -> Error {
    Error::InvalidArgument(format!("inconsistent power sums: {reason}"))
}

fn two_level(j1: f64, j2: f64) -> Result<Vec<f64>> {
    let sq = j1 * j1;
    if j2 > sq + DISCRIMINANT_TOL || sq > 2.0 * j2 + DISCRIMINANT_TOL {
        return Err(inconsistent("J2 <= J1^2 <= 2 J2 violated"));
    }
    let root = (2.0 * j2 - sq).max(0.0).sqrt();
    Ok(vec![0.5 * (j1 + root), (0.5 * (j1 - root)).max(0.0)])
}

fn roots_from_power_sums(p: &[f64]) -> Result<Vec<f64>> {
    let d = p.len();
    let e = elementary_from_power_sums(p);
    // companion matrix of x^d - e1 x^{d-1} + e2 x^{d-2} - ..
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    for (k, ek) in e.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        companion[(d - 1 - k, d - 1)] = sign * ek;
    }
    let roots = real_eigenvalues_complex(&companion);
    let scale = p[0].abs().max(1.0);
    let mut xs: Vec<f64> = roots.iter().map(|z| z.re).collect();
    for x in xs.iter_mut() {
        if *x < -DISCRIMINANT_TOL * scale {
            return Err(inconsistent("negative squared coefficient"));
        }
        *x = x.max(0.0);
    }
    if roots.iter().any(|z| z.im.abs() > IMAG_TOL * scale) {
        // clustered roots split into conjugate pairs; keep them only if the
        // real parts still reproduce the power sums
        let reproduces = (1..=d).all(|k| {
            let pk: f64 = xs.iter().map(|x| x.powi(k as i32)).sum();
            (pk - p[k - 1]).abs() <= 1e-8 * scale.powi(k as i32)
        });
        if !reproduces {
            return Err(inconsistent("complex roots"));
        }
    }
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{partial_trace, random_density};
    use crate::C64;

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert_eq!(Spectrum::new(vec![1.0, -1e-13]).unwrap().probs(), &[1.0, 0.0]);
        assert!(Spectrum::new(vec![1.1, -0.1]).is_err());
        assert!(Spectrum::new(vec![0.4, 0.4]).is_err());
        assert!(Spectrum::new(vec![]).is_err());
    }

    #[test]
    fn renyi_basics() {
        let pure = Spectrum::new(vec![1.0, 0.0, 0.0]).unwrap();
        let uniform = Spectrum::uniform(4).unwrap();
        for alpha in [0.5, 2.0, 3.0, 7.5] {
            assert!(renyi(&pure, alpha).unwrap().abs() < 1e-15);
            assert!((renyi(&uniform, alpha).unwrap() - 4f64.ln()).abs() < 1e-12);
        }
        let p = 0.3;
        let s = Spectrum::new(vec![p, 1.0 - p]).unwrap();
        let direct = -(p * p + (1.0 - p) * (1.0 - p)).ln();
        assert!((renyi(&s, 2.0).unwrap() - direct).abs() < 1e-12);
        assert!(renyi(&s, 1.0).is_err());
        assert!(renyi(&s, 0.0).is_err());
        assert!(renyi(&s, -1.0).is_err());
    }

    #[test]
    fn von_neumann_limit() {
        assert_eq!(von_neumann(&Spectrum::new(vec![1.0, 0.0]).unwrap()), 0.0);
        assert!((von_neumann(&Spectrum::uniform(2).unwrap()) - 2f64.ln()).abs() < 1e-15);
        let s = Spectrum::new(vec![0.5, 0.3, 0.15, 0.05]).unwrap();
        let vn = von_neumann(&s);
        for alpha in [1.0 + 1e-5, 1.0 - 1e-5] {
            assert!((renyi(&s, alpha).unwrap() - vn).abs() < 1e-3);
        }
    }

    #[test]
    fn invariant_form() {
        assert_eq!(renyi_from_invariant(1.0, 3).unwrap(), 0.0);
        assert!((renyi_from_invariant(0.5, 2).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(renyi_from_invariant(0.0, 2).is_err());
        assert!(renyi_from_invariant(-0.1, 2).is_err());
        assert!(renyi_from_invariant(0.5, 1).is_err());
    }

    fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
        // coefficients of prod (x - r), leading 1 dropped
        let mut c = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= ci * r;
            }
            c = next;
        }
        c[1..].to_vec()
    }

    #[test]
    fn char_poly_matches_eigenvalue_product() {
        for seed in 0..10 {
            let rho = random_density(&[4], seed).unwrap();
            let ev = hermitian_eigenvalues(&rho).unwrap();
            let expected = poly_from_roots(&ev);
            let got = CharPolyCoeffs::of(&rho).unwrap();
            for (a, b) in got.coeffs.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
            let rel = char_poly_relation(&rho).unwrap();
            assert!(rel.traced_residual <= 1e-12);
            assert!(rel.entropy_residual <= 1e-10);
            assert!((rel.traced_residual - rel.entropy_residual).abs() <= 1e-10);
        }
    }

    #[test]
    fn char_poly_special_states() {
        let mixed = Tensor::identity_matrix(2).scale(C64::new(0.5, 0.0));
        let rel = char_poly_relation(&mixed).unwrap();
        assert_eq!(rel.coeffs.coeffs, vec![-1.0, 0.25]);
        assert!(rel.entropy_residual < 1e-15);

        let pure = Tensor::from_fn(vec![4, 4], |ix| C64::new(if ix == [0, 0] { 1.0 } else { 0.0 }, 0.0)).unwrap();
        let rel = char_poly_relation(&pure).unwrap();
        assert!(rel.traced_residual < 1e-15 && rel.entropy_residual < 1e-15);

        let reduced = partial_trace(&random_density(&[2, 2, 2], 3).unwrap(), &[2, 2, 2], &[0, 2]).unwrap();
        let rel = char_poly_relation(&reduced).unwrap();
        assert_eq!(rel.folded.len(), 3);
        assert!(rel.entropy_residual <= 1e-10);
        assert!(char_poly_relation(&random_density(&[9], 1).unwrap()).is_err());
    }

    fn jk(squares: &[f64]) -> Vec<f64> {
        (1..=squares.len())
            .map(|k| squares.iter().map(|x| x.powi(k as i32)).sum())
            .collect()
    }

    #[test]
    fn two_level_closed_form() {
        let bell = schmidt_from_jk(&[1.0, 0.5]).unwrap();
        assert!(bell.iter().all(|s| (s * s - 0.5).abs() < 1e-12));
        let product = schmidt_from_jk(&[1.0, 1.0]).unwrap();
        assert_eq!(product, vec![1.0, 0.0]);
        assert!(schmidt_from_jk(&[1.0, 1.2]).is_err());
        assert!(schmidt_from_jk(&[1.0, 0.4]).is_err());
    }

    #[test]
    fn round_trip_three_levels() {
        let squares = [0.6, 0.3, 0.1];
        let j = jk(&squares);
        let sigma = schmidt_from_jk(&j).unwrap();
        let back = jk(&sigma.iter().map(|s| s * s).collect::<Vec<_>>());
        for (a, b) in j.iter().zip(&back) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((sigma[0] - 0.6f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn clustered_roots() {
        for squares in [vec![1.0 / 3.0; 3], vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0, 0.0]] {
            let sigma = schmidt_from_jk(&jk(&squares)).unwrap();
            for (s, x) in sigma.iter().zip(&squares) {
                assert!((s * s - x).abs() < 1e-4);
            }
        }
        // power sums of no real multiset
        assert!(schmidt_from_jk(&[1.0, 0.2, 0.5]).is_err());
    }

    #[test]
    fn newton_identities() {
        let e = elementary_from_power_sums(&jk(&[1.0, 2.0, 3.0]));
        assert!((e[0] - 6.0).abs() < 1e-12 && (e[1] - 11.0).abs() < 1e-12 && (e[2] - 6.0).abs() < 1e-12);
    }
}
