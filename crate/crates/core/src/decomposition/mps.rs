//! Open-boundary matrix product states by a left-to-right sweep of SVDs.
//!
//! Site tensors have legs `(left bond, physical, right bond)`. Chains produced
//! here are left-canonical: every site but the last is an isometry from its
//! `(left, physical)` legs onto its right bond. The singular values of each cut
//! are kept per bond and equal the Schmidt coefficients across that cut.

use serde::{Deserialize, Serialize};

use super::svd::{numerical_rank, svd};
use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::tensor::{contract, LegPairing, Tensor, C64, ONE};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TruncationPolicy {
    pub max_chi: Option<usize>,
    pub sigma_cutoff: Option<f64>,
}

impl TruncationPolicy {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn max_chi(chi: usize) -> Self {
        Self {
            max_chi: Some(chi),
            sigma_cutoff: None,
        }
    }

    pub fn cutoff(tol: f64) -> Self {
        Self {
            max_chi: None,
            sigma_cutoff: Some(tol),
        }
    }

    pub fn is_none(&self) -> bool {
        self.max_chi.is_none() && self.sigma_cutoff.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(chi) = self.max_chi {
            if chi < 1 {
                return Err(Error::InvalidArgument("max_chi must be at least 1".into()));
            }
        }
        if let Some(tol) = self.sigma_cutoff {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "sigma cutoff must be finite and >= 0, got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// How many of the (sorted) singular values survive. Never less than one.
    fn keep(&self, sigma: &[f64]) -> usize {
        let mut n = numerical_rank(sigma, RANK_TOL);
        if let Some(tol) = self.sigma_cutoff {
            n = n.min(sigma.iter().filter(|&&s| s > tol).count());
        }
        if let Some(chi) = self.max_chi {
            n = n.min(chi);
        }
        n.max(1)
    }
}

/// Discarded weight per bond, `1 - sum_kept / sum_all` of the squared
/// singular values, and their sum as an overall fidelity-loss bound.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TruncationReport {
    pub per_bond_loss: Vec<f64>,
    pub loss_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpsChain {
    sites: Vec<Tensor>,
    bond_sigmas: Vec<Vec<f64>>,
}

impl MpsChain {
    pub fn new(sites: Vec<Tensor>, bond_sigmas: Vec<Vec<f64>>) -> Result<Self> {
        let chain = Self { sites, bond_sigmas };
        chain.check()?;
        Ok(chain)
    }

    fn check(&self) -> Result<()> {
        let n = self.sites.len();
        if n == 0 {
            return Err(Error::Shape("chain has no sites".into()));
        }
        for (i, s) in self.sites.iter().enumerate() {
            if s.rank() != 3 {
                return Err(Error::Shape(format!("site {i} has {} legs, expected 3", s.rank())));
            }
        }
        if self.sites[0].dims()[0] != 1 || self.sites[n - 1].dims()[2] != 1 {
            return Err(Error::Shape("boundary bond dimensions must be 1".into()));
        }
        for i in 0..n - 1 {
            let (r, l) = (self.sites[i].dims()[2], self.sites[i + 1].dims()[0]);
            if r != l {
                return Err(Error::DimensionMismatch {
                    left: i,
                    left_dim: r,
                    right: i + 1,
                    right_dim: l,
                });
            }
        }
        if self.bond_sigmas.len() != n - 1 {
            return Err(Error::Shape(format!(
                "{} bond vectors for {} internal bonds",
                self.bond_sigmas.len(),
                n - 1
            )));
        }
        for (b, s) in self.bond_sigmas.iter().enumerate() {
            if s.len() != self.sites[b].dims()[2] {
                return Err(Error::Shape(format!(
                    "bond {b} carries {} singular values but has dimension {}",
                    s.len(),
                    self.sites[b].dims()[2]
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Tensor] {
        &self.sites
    }

    pub fn bond_sigmas(&self) -> &[Vec<f64>] {
        &self.bond_sigmas
    }

    pub fn phys_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dims()[1]).collect()
    }

    /// Bond dimensions including both boundary bonds (length `len() + 1`).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.sites[0].dims()[0]];
        dims.extend(self.sites.iter().map(|s| s.dims()[2]));
        dims
    }

    pub fn norm_sqr(&self) -> f64 {
        mps_overlap(self, self).map(|c| c.re).unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ChainFile {
            phys_dims: self.phys_dims(),
            bond_dims: self.bond_dims(),
            bond_sigmas: self.bond_sigmas.clone(),
            sites: self
                .sites
                .iter()
                .map(|s| SiteFile {
                    dims: s.dims().to_vec(),
                    data: s.data().iter().map(|c| [c.re, c.im]).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChainFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let sites = file
            .sites
            .into_iter()
            .map(|s| Tensor::new(s.dims, s.data.iter().map(|p| C64::new(p[0], p[1])).collect()))
            .collect::<Result<Vec<_>>>()?;
        let chain = Self::new(sites, file.bond_sigmas)?;
        if chain.phys_dims() != file.phys_dims || chain.bond_dims() != file.bond_dims {
            return Err(Error::Parse("declared dims disagree with site tensors".into()));
        }
        Ok(chain)
    }
}

#[derive(Serialize, Deserialize)]
struct SiteFile {
    dims: Vec<usize>,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ChainFile {
    phys_dims: Vec<usize>,
    bond_dims: Vec<usize>,
    bond_sigmas: Vec<Vec<f64>>,
    sites: Vec<SiteFile>,
}

fn diag_times(sigma: &[f64], rows: &Tensor) -> Tensor {
    let cols = rows.ncols();
    Tensor::from_fn(vec![sigma.len(), cols], |ix| rows.get(ix) * sigma[ix[0]]).expect("positive dims")
}

fn times_diag(cols: &Tensor, sigma: &[f64]) -> Tensor {
    let rows = cols.nrows();
    Tensor::from_fn(vec![rows, sigma.len()], |ix| cols.get(ix) * sigma[ix[1]]).expect("positive dims")
}

/// Factors a pure state into a left-canonical chain, one leg per site.
pub fn mps_factor(state: &Tensor, policy: &TruncationPolicy) -> Result<MpsChain> {
    mps_factor_with_report(state, policy).map(|(chain, _)| chain)
}

/// As [`mps_factor`], also reporting discarded weights when truncating.
pub fn mps_factor_with_report(state: &Tensor, policy: &TruncationPolicy) -> Result<(MpsChain, TruncationReport)> {
    policy.validate()?;
    let dims = state.dims().to_vec();
    let n = dims.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "factoring needs at least 2 legs, got {n}"
        )));
    }
    if !state.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut sites = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n - 1);
    let mut rest = state.clone();
    let mut chi = 1;
    for &d in &dims[..n - 1] {
        let rows = chi * d;
        let m = rest.reshape(vec![rows, rest.len() / rows])?;
        let f = svd(&m)?;
        let keep = numerical_rank(&f.sigma, RANK_TOL).max(1);
        sites.push(f.u_columns(keep).reshape(vec![chi, d, keep])?);
        let kept = f.sigma[..keep].to_vec();
        rest = diag_times(&kept, &f.v_rows(keep));
        sigmas.push(kept);
        chi = keep;
    }
    sites.push(rest.reshape(vec![chi, dims[n - 1], 1])?);
    let chain = MpsChain::new(sites, sigmas)?;
    if policy.is_none() {
        let report = TruncationReport {
            per_bond_loss: vec![0.0; n - 1],
            loss_bound: 0.0,
        };
        return Ok((chain, report));
    }
    mps_truncate(&chain, policy)
}

/// Contracts the chain into the full state tensor over the physical legs.
pub fn mps_reconstruct(chain: &MpsChain) -> Result<Tensor> {
    chain.check()?;
    let mut acc = chain.sites[0].clone();
    for site in &chain.sites[1..] {
        let last = acc.rank() - 1;
        acc = contract(&acc, site, &LegPairing::single(last, 0))?;
    }
    acc.reshape(chain.phys_dims())
}

/// Compresses a left-canonical chain bond by bond and renormalizes it to its
/// original norm. The returned chain is again left-canonical with refreshed
/// bond singular values.
pub fn mps_truncate(chain: &MpsChain, policy: &TruncationPolicy) -> Result<(MpsChain, TruncationReport)> {
    policy.validate()?;
    chain.check()?;
    let n = chain.len();
    let norm0 = chain.norm_sqr().sqrt();
    let mut sites = chain.sites.clone();
    let mut losses = vec![0.0; n.saturating_sub(1)];

    // right-to-left: truncate each bond against an orthonormal left part
    for i in (1..n).rev() {
        let (l, d, r) = (sites[i].dims()[0], sites[i].dims()[1], sites[i].dims()[2]);
        let f = svd(&sites[i].reshape(vec![l, d * r])?)?;
        let keep = policy.keep(&f.sigma);
        let total: f64 = f.sigma.iter().map(|s| s * s).sum();
        let kept: f64 = f.sigma[..keep].iter().map(|s| s * s).sum();
        losses[i - 1] = if total > 0.0 {
            (1.0 - kept / total).max(0.0)
        } else {
            0.0
        };
        sites[i] = f.v_rows(keep).reshape(vec![keep, d, r])?;
        let us = times_diag(&f.u_columns(keep), &f.sigma[..keep]);
        sites[i - 1] = contract(&sites[i - 1], &us, &LegPairing::single(2, 0))?;
    }

    // left-to-right: restore left-canonical form and read off bond values
    let mut sigmas = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n - 1 {
        let (l, d, r) = (sites[i].dims()[0], sites[i].dims()[1], sites[i].dims()[2]);
        let f = svd(&sites[i].reshape(vec![l * d, r])?)?;
        let keep = numerical_rank(&f.sigma, RANK_TOL).max(1);
        sites[i] = f.u_columns(keep).reshape(vec![l, d, keep])?;
        let sv = diag_times(&f.sigma[..keep], &f.v_rows(keep));
        sites[i + 1] = contract(&sv, &sites[i + 1], &LegPairing::single(1, 0))?;
        sigmas.push(f.sigma[..keep].to_vec());
    }

    let norm = sites[n - 1].frobenius_norm();
    if norm > 0.0 {
        let factor = norm0 / norm;
        sites[n - 1] = sites[n - 1].scale(C64::new(factor, 0.0));
        for s in &mut sigmas {
            s.iter_mut().for_each(|x| *x *= factor);
        }
    }
    let loss_bound = losses.iter().sum::<f64>().min(1.0);
    Ok((
        MpsChain::new(sites, sigmas)?,
        TruncationReport {
            per_bond_loss: losses,
            loss_bound,
        },
    ))
}

/// `<a|b>` computed site by site with transfer matrices.
pub fn mps_overlap(a: &MpsChain, b: &MpsChain) -> Result<C64> {
    if a.phys_dims() != b.phys_dims() {
        return Err(Error::Shape(format!(
            "physical dims {:?} and {:?} differ",
            a.phys_dims(),
            b.phys_dims()
        )));
    }
    let mut env = Tensor::matrix(1, 1, vec![ONE])?;
    for (sa, sb) in a.sites.iter().zip(&b.sites) {
        let t = contract(&env, sb, &LegPairing::single(1, 0))?;
        env = contract(&sa.conj(), &t, &LegPairing::new(vec![(0, 0), (1, 1)]))?;
    }
    Ok(env.data()[0])
}

/// `|<a|b>|^2 / (<a|a> <b|b>)` for dense states of equal shape.
pub fn fidelity(a: &Tensor, b: &Tensor) -> Result<f64> {
    let overlap = a.inner(b)?;
    let denom = a.norm_sqr() * b.norm_sqr();
    if denom == 0.0 {
        return Err(Error::InvalidArgument("fidelity of a zero state".into()));
    }
    Ok(overlap.norm_sqr() / denom)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryDirection {
    /// `(left, physical) -> right`: checks `A^dagger A = 1` on the right bond.
    Left,
    /// `left -> (physical, right)`: checks `A A^dagger = 1` on the left bond.
    Right,
}

/// Largest componentwise deviation of the site's Gram matrix from identity.
pub fn verify_isometry(site: &Tensor, direction: IsometryDirection) -> Result<f64> {
    if site.rank() != 3 {
        return Err(Error::Shape(format!(
            "site has dims {:?}, expected 3 legs",
            site.dims()
        )));
    }
    let (l, d, r) = (site.dims()[0], site.dims()[1], site.dims()[2]);
    let gram = match direction {
        IsometryDirection::Left => {
            let m = site.reshape(vec![l * d, r])?;
            m.adjoint()?.matmul(&m)?
        }
        IsometryDirection::Right => {
            let m = site.reshape(vec![l, d * r])?;
            m.matmul(&m.adjoint()?)?
        }
    };
    let size = gram.nrows();
    Ok(gram.max_abs_diff(&Tensor::identity_matrix(size)))
}
