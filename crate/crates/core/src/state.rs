//! Quantum state persistence, random inputs, density operators and partial traces.
//!
//! Pure states are tensors with one leg per subsystem. Density operators are
//! square matrices over the product of the subsystem dimensions, with the
//! subsystem dimensions carried alongside.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_error, qr_square, to_dmatrix};
use crate::tensor::{self, LegPairing, LegSplit, Tensor, C64, ONE};

/// Hermiticity and trace tolerance applied when loading density files.
pub const DENSITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    /// State vector with one leg per subsystem.
    Pure { dims: Vec<usize>, psi: Tensor },
    /// `D x D` operator, `D` the product of `dims`.
    Density { dims: Vec<usize>, rho: Tensor },
}

impl QuantumState {
    pub fn pure(psi: Tensor) -> Result<Self> {
        if psi.rank() == 0 {
            return Err(Error::Shape("a pure state needs at least one subsystem".into()));
        }
        Ok(Self::Pure {
            dims: psi.dims().to_vec(),
            psi,
        })
    }

    pub fn density(dims: Vec<usize>, rho: Tensor) -> Result<Self> {
        check_density_shape(&rho, &dims)?;
        Ok(Self::Density { dims, rho })
    }

    pub fn kind(&self) -> StateKind {
        match self {
            Self::Pure { .. } => StateKind::Pure,
            Self::Density { .. } => StateKind::Density,
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            Self::Pure { dims, .. } | Self::Density { dims, .. } => dims,
        }
    }

    /// Density operator of the state (`|psi><psi|` for pure states).
    pub fn to_density(&self) -> Tensor {
        match self {
            Self::Pure { psi, .. } => density_from_pure(psi),
            Self::Density { rho, .. } => rho.clone(),
        }
    }
}

fn check_density_shape(rho: &Tensor, dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if rho.dims() != [total, total] {
        return Err(Error::Shape(format!(
            "operator dims {:?} do not match subsystem dims {:?}",
            rho.dims(),
            dims
        )));
    }
    Ok(total)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FileData {
    Vector(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    kind: StateKind,
    dims: Vec<usize>,
    data: FileData,
}

fn pair(c: &C64) -> [f64; 2] {
    [c.re, c.im]
}

/// Serializes a state to the JSON state-file format.
pub fn state_to_json(state: &QuantumState) -> Result<String> {
    let data = match state {
        QuantumState::Pure { psi, .. } => FileData::Vector(psi.data().iter().map(pair).collect()),
        QuantumState::Density { rho, .. } => {
            let n = rho.nrows();
            FileData::Matrix(rho.data().chunks(n).map(|row| row.iter().map(pair).collect()).collect())
        }
    };
    let file = StateFile {
        kind: state.kind(),
        dims: state.dims().to_vec(),
        data,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a state file. Density operators are checked for Hermiticity and
/// unit trace unless `validate` is false.
pub fn parse_state(text: &str, validate: bool) -> Result<QuantumState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.dims.is_empty() || file.dims.contains(&0) {
        return Err(Error::Parse(format!("invalid dims {:?}", file.dims)));
    }
    let total: usize = file.dims.iter().product();
    let to_c = |p: &[f64; 2]| C64::new(p[0], p[1]);
    let state = match (file.kind, file.data) {
        (StateKind::Pure, FileData::Vector(v)) => {
            if v.len() != total {
                return Err(Error::Parse(format!(
                    "pure state has {} components but dims {:?} need {}",
                    v.len(),
                    file.dims,
                    total
                )));
            }
            let psi = Tensor::new(file.dims.clone(), v.iter().map(to_c).collect())?;
            QuantumState::Pure { dims: file.dims, psi }
        }
        (StateKind::Density, FileData::Matrix(rows)) => {
            if rows.len() != total || rows.iter().any(|r| r.len() != total) {
                return Err(Error::Parse(format!(
                    "density operator must be {total} x {total} for dims {:?}",
                    file.dims
                )));
            }
            let data = rows.iter().flat_map(|r| r.iter().map(to_c)).collect();
            let rho = Tensor::matrix(total, total, data)?;
            QuantumState::Density { dims: file.dims, rho }
        }
        (kind, _) => {
            return Err(Error::Parse(format!("data layout does not match kind {kind:?}")));
        }
    };
    if !match &state {
        QuantumState::Pure { psi, .. } => psi.is_finite(),
        QuantumState::Density { rho, .. } => rho.is_finite(),
    } {
        return Err(Error::NonFinite);
    }
    if validate {
        if let QuantumState::Density { rho, .. } = &state {
            validate_density(rho)?;
        }
    }
    Ok(state)
}

/// Checks Hermiticity and unit trace within [`DENSITY_TOL`].
pub fn validate_density(rho: &Tensor) -> Result<()> {
    let herm = hermiticity_error(rho)?;
    if herm > DENSITY_TOL {
        return Err(Error::Validation {
            quantity: "hermiticity",
            value: herm,
            reason: "operator is not Hermitian".into(),
        });
    }
    let tr = rho.trace()?;
    if (tr - ONE).norm() > DENSITY_TOL {
        return Err(Error::Validation {
            quantity: "trace",
            value: tr.re,
            reason: "density operator must have unit trace".into(),
        });
    }
    Ok(())
}

pub fn load_state(path: impl AsRef<Path>) -> Result<QuantumState> {
    load_state_with(path, true)
}

pub fn load_state_with(path: impl AsRef<Path>, validate: bool) -> Result<QuantumState> {
    parse_state(&fs::read_to_string(path)?, validate)
}

pub fn save_state(state: &QuantumState, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, state_to_json(state)?)?;
    Ok(())
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial seed derived from a base seed (splitmix64 step).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid subsystem dims {dims:?}")));
    }
    Ok(())
}

/// Normalized pure state with i.i.d. complex Gaussian components.
pub fn random_pure_state(dims: &[usize], seed: u64) -> Result<Tensor> {
    check_dims(dims)?;
    let mut rng = rng_from_seed(seed);
    random_pure_state_with(dims, &mut rng)
}

pub(crate) fn random_pure_state_with<R: Rng>(dims: &[usize], rng: &mut R) -> Result<Tensor> {
    let len: usize = dims.iter().product();
    let data: Vec<C64> = (0..len).map(|_| complex_gaussian(rng)).collect();
    let norm = data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Tensor::new(dims.to_vec(), data.into_iter().map(|c| c / norm).collect())
}

/// Random mixed density operator `G G^dagger / Tr(G G^dagger)` with a complex
/// Gaussian `G`.
pub fn random_density(dims: &[usize], seed: u64) -> Result<Tensor> {
    check_dims(dims)?;
    let total: usize = dims.iter().product();
    let mut rng = rng_from_seed(seed);
    let g = Tensor::matrix(
        total,
        total,
        (0..total * total).map(|_| complex_gaussian(&mut rng)).collect(),
    )?;
    let rho = g.matmul(&g.adjoint()?)?;
    let tr = rho.trace()?.re;
    Ok(rho.scale(C64::new(1.0 / tr, 0.0)))
}

/// Haar-random element of `U(d)`.
pub(crate) fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> Result<Tensor> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = Tensor::matrix(d, d, (0..d * d).map(|_| complex_gaussian(rng) * scale).collect())?;
    let (q, r_diag) = qr_square(&z)?;
    let phases: Vec<C64> = r_diag
        .iter()
        .map(|r| if r.norm() == 0.0 { ONE } else { r / r.norm() })
        .collect();
    Tensor::from_fn(vec![d, d], |ix| q.get(ix) * phases[ix[1]])
}

/// One Haar unitary per subsystem, each rescaled into `SU(d)`, with a single
/// global `U(1)` phase folded into the first factor.
pub fn random_local_unitary(dims: &[usize], seed: u64) -> Result<Vec<Tensor>> {
    check_dims(dims)?;
    let mut rng = rng_from_seed(seed);
    let mut factors = Vec::with_capacity(dims.len());
    for &d in dims {
        let u = haar_unitary(d, &mut rng)?;
        let det = to_dmatrix(&u)?.determinant();
        let fix = C64::from_polar(1.0, -det.arg() / d as f64);
        factors.push(u.scale(fix));
    }
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    factors[0] = factors[0].scale(C64::from_polar(1.0, theta));
    Ok(factors)
}

/// Kronecker product of the local factors.
pub fn local_operator(factors: &[Tensor]) -> Result<Tensor> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidArgument("no local factors".into()))?
        .clone();
    iter.try_fold(first, |acc, f| acc.kron(f))
}

/// `U rho U^dagger` for `U` the product of local factors.
pub fn conjugate_density(rho: &Tensor, factors: &[Tensor]) -> Result<Tensor> {
    let u = local_operator(factors)?;
    u.matmul(rho)?.matmul(&u.adjoint()?)
}

/// Applies the product of local factors to a pure state tensor.
pub fn apply_local_unitary(psi: &Tensor, factors: &[Tensor]) -> Result<Tensor> {
    let u = local_operator(factors)?;
    let v = psi.reshape(vec![psi.len(), 1])?;
    u.matmul(&v)?.reshape(psi.dims().to_vec())
}

/// `|psi><psi|` as a `D x D` matrix.
pub fn density_from_pure(psi: &Tensor) -> Tensor {
    let n = psi.len();
    let mut data = Vec::with_capacity(n * n);
    for a in psi.data() {
        data.extend(psi.data().iter().map(|b| a * b.conj()));
    }
    Tensor::matrix(n, n, data).expect("square")
}

/// Traces out every subsystem not in `keep`. Kept subsystems appear in
/// ascending order in the result.
pub fn partial_trace(rho: &Tensor, dims: &[usize], keep: &[usize]) -> Result<Tensor> {
    check_density_shape(rho, dims)?;
    let n = dims.len();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep set is empty".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    for w in kept.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidArgument(format!("subsystem {} listed twice", w[0])));
        }
    }
    if let Some(&bad) = kept.iter().find(|&&s| s >= n) {
        return Err(Error::InvalidArgument(format!(
            "subsystem {bad} out of range for {n} subsystems"
        )));
    }
    let mut legs = dims.to_vec();
    legs.extend_from_slice(dims);
    let t = rho.reshape(legs)?;
    let traced: Vec<(usize, usize)> = (0..n).filter(|s| !kept.contains(s)).map(|s| (s, n + s)).collect();
    let reduced = tensor::self_trace(&t, &LegPairing::new(traced))?;
    let m = kept.len();
    tensor::group_legs(&reduced, &LegSplit::at(2 * m, m))
}

/// Dimensions of the subsystems in `keep`, in ascending subsystem order.
pub fn kept_dims(dims: &[usize], keep: &[usize]) -> Vec<usize> {
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    kept.iter().filter(|&&s| s < dims.len()).map(|&s| dims[s]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, unitarity_error};

    fn bell() -> Tensor {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Tensor::new(
            vec![2, 2],
            vec![C64::new(s, 0.0), C64::default(), C64::default(), C64::new(s, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn pure_round_trip_exact() {
        let psi = random_pure_state(&[2, 2, 2], 7).unwrap();
        let state = QuantumState::pure(psi).unwrap();
        let back = parse_state(&state_to_json(&state).unwrap(), true).unwrap();
        assert_eq!(back, state);
    }

    #[test]
    fn density_round_trip_exact() {
        let rho = random_density(&[2, 3], 3).unwrap();
        let state = QuantumState::density(vec![2, 3], rho).unwrap();
        let back = parse_state(&state_to_json(&state).unwrap(), true).unwrap();
        assert_eq!(back, state);
    }

    #[test]
    fn bad_trace_names_trace() {
        let rho = Tensor::identity_matrix(2).scale(C64::new(0.45, 0.0));
        let text = state_to_json(&QuantumState::density(vec![2], rho).unwrap()).unwrap();
        let err = parse_state(&text, true).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
        assert!(parse_state(&text, false).is_ok());
    }

    #[test]
    fn malformed_dims() {
        let text = r#"{"kind":"pure","dims":[2,2],"data":[[1,0],[0,0],[0,0]]}"#;
        assert!(matches!(parse_state(text, true), Err(Error::Parse(_))));
        let text = r#"{"kind":"density","dims":[2],"data":[[1,0],[0,0]]}"#;
        assert!(matches!(parse_state(text, true), Err(Error::Parse(_))));
        assert!(matches!(parse_state("{not json", true), Err(Error::Parse(_))));
    }

    #[test]
    fn random_states() {
        let a = random_pure_state(&[2, 3], 11).unwrap();
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(a, random_pure_state(&[2, 3], 11).unwrap());
        assert_ne!(a, random_pure_state(&[2, 3], 12).unwrap());
    }

    #[test]
    fn single_qubit_population_moment() {
        let mut rng = rng_from_seed(99);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| random_pure_state_with(&[2], &mut rng).unwrap().data()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn local_unitaries() {
        let us = random_local_unitary(&[2, 3], 5).unwrap();
        for u in &us {
            assert!(unitarity_error(u).unwrap() < 1e-12);
        }
        let psi = random_pure_state(&[2, 3], 1).unwrap();
        let there = apply_local_unitary(&psi, &us).unwrap();
        let adj: Vec<Tensor> = us.iter().map(|u| u.adjoint().unwrap()).collect();
        let back = apply_local_unitary(&there, &adj).unwrap();
        assert!(back.max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn haar_phase_first_moment() {
        let n = 1000;
        let mut sum = C64::default();
        for seed in 0..n {
            let u = &random_local_unitary(&[2], seed).unwrap()[0];
            let z = u.get(&[0, 0]);
            sum += z / z.norm();
        }
        let mean = sum / n as f64;
        assert!(mean.norm() < 0.05, "{mean}");
    }

    #[test]
    fn partial_traces() {
        let rho = random_density(&[2, 3], 4).unwrap();
        let all = partial_trace(&rho, &[2, 3], &[0, 1]).unwrap();
        assert!(all.max_abs_diff(&rho) < 1e-15);

        let bell_rho = density_from_pure(&bell());
        let red = partial_trace(&bell_rho, &[2, 2], &[0]).unwrap();
        let ev = hermitian_eigenvalues(&red).unwrap();
        assert!((ev[0] - 0.5).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12);

        assert!(partial_trace(&rho, &[2, 3], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 3], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn complementary_spectra() {
        let psi = random_pure_state(&[2; 5], 21).unwrap();
        let rho = density_from_pure(&psi);
        let a = hermitian_eigenvalues(&partial_trace(&rho, &[2; 5], &[0, 1]).unwrap()).unwrap();
        let b = hermitian_eigenvalues(&partial_trace(&rho, &[2; 5], &[2, 3, 4]).unwrap()).unwrap();
        for (i, y) in b.iter().enumerate() {
            let x = a.get(i).copied().unwrap_or(0.0);
            assert!((x - y).abs() < 1e-10);
        }
        let tr = partial_trace(&rho, &[2; 5], &[3]).unwrap().trace().unwrap();
        assert!((tr - ONE).norm() < 1e-10);
    }
}
