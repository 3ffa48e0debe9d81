//! Complex singular value decomposition by one-sided Jacobi rotations.

use crate::error::{Error, Result};
use crate::tensor::{group_legs, LegSplit, Tensor, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 80;
const ORTH_TOL: f64 = 1e-15;

/// Full factorization `M = U Q diag(sigma) V` of an `r x c` matrix.
///
/// `U` is `r x r` unitary, `V` is `c x c` unitary, `sigma` has length
/// `min(r, c)` and is non-increasing. `Q` is the `r x c` dimension changer
/// with ones on its diagonal; it is only a non-square object when `r != c`.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: Tensor,
    pub sigma: Vec<f64>,
    pub v: Tensor,
}

impl SvdFactors {
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.ncols()
    }

    pub fn needs_dimension_changer(&self) -> bool {
        self.rows() != self.cols()
    }

    /// The rectangular 0/1 diagonal `Q`.
    pub fn dimension_changer(&self) -> Tensor {
        let (r, c) = (self.rows(), self.cols());
        Tensor::from_fn(vec![r, c], |ix| if ix[0] == ix[1] { ONE } else { ZERO }).expect("positive dims")
    }

    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        numerical_rank(&self.sigma, rel_tol)
    }

    /// Reassembles `U Q diag(sigma) V`.
    pub fn reconstruct(&self) -> Result<Tensor> {
        let c = self.cols();
        let mut sigma_c = self.sigma.clone();
        sigma_c.resize(c, 0.0);
        let diag = Tensor::from_fn(vec![c, c], |ix| {
            if ix[0] == ix[1] {
                C64::new(sigma_c[ix[0]], 0.0)
            } else {
                ZERO
            }
        })?;
        self.u.matmul(&self.dimension_changer())?.matmul(&diag)?.matmul(&self.v)
    }

    /// First `chi` columns of `U`.
    pub fn u_columns(&self, chi: usize) -> Tensor {
        let r = self.rows();
        Tensor::from_fn(vec![r, chi], |ix| self.u.get(&[ix[0], ix[1]])).expect("positive dims")
    }

    /// First `chi` rows of `V`.
    pub fn v_rows(&self, chi: usize) -> Tensor {
        let c = self.cols();
        Tensor::from_fn(vec![chi, c], |ix| self.v.get(&[ix[0], ix[1]])).expect("positive dims")
    }
}

pub(crate) fn numerical_rank(sigma: &[f64], rel_tol: f64) -> usize {
    let max = sigma.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Singular value decomposition of a tensor viewed as a matrix through `split`.
pub fn diagrammatic_svd(t: &Tensor, split: &LegSplit) -> Result<SvdFactors> {
    svd(&group_legs(t, split)?)
}

/// Singular value decomposition of a two-leg tensor.
pub fn svd(m: &Tensor) -> Result<SvdFactors> {
    if m.rank() != 2 {
        return Err(Error::Shape(format!("svd needs a matrix, got dims {:?}", m.dims())));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let (r, c) = (m.nrows(), m.ncols());
    if r >= c {
        let (u, sigma, w) = jacobi_tall(r, c, m.data())?;
        // M = U S W^H
        let v = Tensor::matrix(c, c, w)?.adjoint()?;
        Ok(SvdFactors {
            u: Tensor::matrix(r, r, u)?,
            sigma,
            v,
        })
    } else {
        // M^H = U' S W'^H  =>  M = W' S U'^H
        let mh = m.adjoint()?;
        let (u, sigma, w) = jacobi_tall(c, r, mh.data())?;
        let u_final = Tensor::matrix(r, r, w)?;
        let v_final = Tensor::matrix(c, c, u)?.adjoint()?;
        Ok(SvdFactors {
            u: u_final,
            sigma,
            v: v_final,
        })
    }
}

/// One-sided Jacobi on a tall `r x c` matrix (`r >= c`), row-major input.
///
/// Returns the full `r x r` left factor, the sorted singular values and the
/// `c x c` right rotation `W` (row-major) with `A W = U S`.
fn jacobi_tall(r: usize, c: usize, a: &[C64]) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    // column-major working copies
    let mut cols: Vec<Vec<C64>> = (0..c).map(|j| (0..r).map(|i| a[i * c + j]).collect()).collect();
    let mut w: Vec<Vec<C64>> = (0..c)
        .map(|j| (0..c).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();

    let mut converged = c < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= ORTH_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut cols, p, q, phase, cs, sn);
                rotate(&mut w, p, q, phase, cs, sn);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Numerical("Jacobi SVD did not converge".into()));
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);

    // Left basis: normalized columns, re-orthogonalized, then completed.
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(r);
    for (slot, &j) in order.iter().enumerate() {
        let s = sigma[slot];
        let candidate = if s > 0.0 && s > smax * 1e-300 {
            cols[j].iter().map(|x| x / s).collect()
        } else {
            Vec::new()
        };
        if !candidate.is_empty() {
            if let Some(v) = orthonormalize(&basis, candidate) {
                basis.push(v);
                continue;
            }
        }
        let fill = complete_one(&basis, r);
        basis.push(fill);
    }
    while basis.len() < r {
        let fill = complete_one(&basis, r);
        basis.push(fill);
    }

    let mut u = vec![ZERO; r * r];
    for (j, col) in basis.iter().enumerate() {
        for i in 0..r {
            u[i * r + j] = col[i];
        }
    }
    let mut w_out = vec![ZERO; c * c];
    for (slot, &j) in order.iter().enumerate() {
        for i in 0..c {
            w_out[i * c + slot] = w[j][i];
        }
    }
    Ok((u, sigma, w_out))
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, phase: C64, cs: f64, sn: f64) {
    let conj_phase = phase.conj();
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y * conj_phase;
        *x = xp * cs - yq * sn;
        *y = (xp * sn + yq * cs) * phase;
    }
}

/// Two passes of Gram-Schmidt against `basis`; `None` if `v` is (numerically)
/// inside its span.
fn orthonormalize(basis: &[Vec<C64>], mut v: Vec<C64>) -> Option<Vec<C64>> {
    let start: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if start == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
    }
    let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 * start {
        return None;
    }
    Some(v.into_iter().map(|x| x / norm).collect())
}

/// A unit vector orthogonal to `basis`, taken from the standard basis.
fn complete_one(basis: &[Vec<C64>], dim: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for k in 0..dim {
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        let mut v = e;
        for _ in 0..2 {
            for b in basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            return v.into_iter().map(|x| x / norm).collect();
        }
        if best.as_ref().is_none_or(|(n, _)| norm > *n) {
            best = Some((norm, v));
        }
    }
    let (norm, v) = best.expect("dimension is positive");
    v.into_iter().map(|x| x / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_error;

    fn check(m: &Tensor) -> SvdFactors {
        let f = svd(m).unwrap();
        assert!(unitarity_error(&f.u).unwrap() < 1e-10);
        assert!(unitarity_error(&f.v).unwrap() < 1e-10);
        assert!(f.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(f.sigma.iter().all(|&s| s >= 0.0));
        let err = f.reconstruct().unwrap().sub(m).unwrap().frobenius_norm();
        assert!(err < 1e-10, "reconstruction error {err}");
        f
    }

    #[test]
    fn identity_has_unit_sigma() {
        let f = check(&Tensor::identity_matrix(4));
        assert!(f.sigma.iter().all(|&s| (s - 1.0).abs() < 1e-14));
        let prod = f.u.matmul(&f.v).unwrap();
        assert!(prod.max_abs_diff(&Tensor::identity_matrix(4)) < 1e-12);
    }

    #[test]
    fn diagonal_sorted() {
        let m = Tensor::matrix(2, 2, vec![C64::new(3.0, 0.0), ZERO, ZERO, C64::new(4.0, 0.0)]).unwrap();
        let f = check(&m);
        assert!((f.sigma[0] - 4.0).abs() < 1e-14 && (f.sigma[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rectangular_and_rank_deficient() {
        let wide = Tensor::from_fn(vec![4, 6], |ix| {
            C64::new(
                ((ix[0] * 7 + ix[1] * 3) % 5) as f64 - 2.0,
                ((ix[0] + 2 * ix[1]) % 3) as f64,
            )
        })
        .unwrap();
        let f = check(&wide);
        assert!(f.needs_dimension_changer());
        assert_eq!(f.sigma.len(), 4);
        check(&wide.adjoint().unwrap());

        // rank one outer product
        let rank1 = Tensor::from_fn(vec![3, 5], |ix| {
            C64::new((ix[0] + 1) as f64, 0.0) * C64::new(1.0, ix[1] as f64)
        })
        .unwrap();
        let f = check(&rank1);
        assert_eq!(f.rank(1e-10), 1);

        let zero = Tensor::zeros(vec![3, 2]).unwrap();
        let f = check(&zero);
        assert_eq!(f.rank(1e-10), 0);
    }

    #[test]
    fn rejects_non_finite() {
        let m = Tensor::matrix(1, 2, vec![C64::new(f64::NAN, 0.0), ONE]).unwrap();
        assert!(matches!(svd(&m), Err(Error::NonFinite)));
    }
}
