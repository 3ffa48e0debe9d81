use serde::Serialize;

use super::svd::{diagrammatic_svd, numerical_rank};
use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::tensor::{LegSplit, Tensor, C64, ZERO};

/// `psi = sum_i sigma_i |left_i> (x) |right_i>` across a bipartition.
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Non-increasing, length `min(dim A, dim B)`.
    pub sigma: Vec<f64>,
    /// `dim A x m` matrix whose columns are the left Schmidt vectors.
    pub left_basis: Tensor,
    /// `m x dim B` matrix whose rows are the right Schmidt vectors.
    pub right_basis: Tensor,
    /// Number of coefficients above the rank tolerance.
    pub rank: usize,
}

impl SchmidtForm {
    /// Rebuilds the state as a `dim A x dim B` matrix.
    pub fn reconstruct_matrix(&self) -> Result<Tensor> {
        let m = self.sigma.len();
        let diag = Tensor::from_fn(vec![m, m], |ix| {
            if ix[0] == ix[1] {
                C64::new(self.sigma[ix[0]], 0.0)
            } else {
                ZERO
            }
        })?;
        self.left_basis.matmul(&diag)?.matmul(&self.right_basis)
    }

    /// Squared coefficients: the spectrum of either reduced density operator.
    pub fn probabilities(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }
}

pub fn schmidt(state: &Tensor, split: &LegSplit) -> Result<SchmidtForm> {
    if split.rows.is_empty() || split.cols.is_empty() {
        return Err(Error::InvalidArgument(
            "both sides of a bipartition need at least one leg".into(),
        ));
    }
    let f = diagrammatic_svd(state, split)?;
    let m = f.sigma.len();
    let rank = numerical_rank(&f.sigma, RANK_TOL);
    Ok(SchmidtForm {
        left_basis: f.u_columns(m),
        right_basis: f.v_rows(m),
        rank,
        sigma: f.sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// One term: the diagram splits into two disconnected halves.
    Separable,
    /// All nonzero coefficients equal.
    MaximallyEntangled,
    Generic,
}

/// Classifies a normalized Schmidt vector.
pub fn classify_topology(sigma: &[f64], tol: f64) -> Result<Topology> {
    let norm: f64 = sigma.iter().map(|s| s * s).sum();
    if (norm - 1.0).abs() > tol.max(f64::EPSILON * 16.0) {
        return Err(Error::InvalidArgument(format!(
            "Schmidt vector is not normalized (sum of squares {norm})"
        )));
    }
    let nonzero: Vec<f64> = sigma.iter().copied().filter(|&s| s > tol).collect();
    if nonzero.len() == 1 {
        return Ok(Topology::Separable);
    }
    let max = nonzero.iter().copied().fold(f64::MIN, f64::max);
    let min = nonzero.iter().copied().fold(f64::MAX, f64::min);
    if max - min <= tol {
        Ok(Topology::MaximallyEntangled)
    } else {
        Ok(Topology::Generic)
    }
}
