//! Dense complex tensors and the wire-diagram primitives built on them.
//!
//! A [`Tensor`] is a flat row-major array of complex components with an
//! ordered list of leg dimensions. Upper and lower indices are not
//! distinguished: the metric is flat, so cups and caps only bend wires and
//! raising or lowering an index is a pure leg reordering.
//!
//! Every contraction goes through the same path: reorder legs, group them
//! into a matrix, multiply, and ungroup.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<C64>,
    labels: Option<Vec<String>>,
}

impl PartialEq for Tensor {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.data == other.data
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("Tensor");
        s.field("dims", &self.dims);
        if let Some(labels) = &self.labels {
            s.field("labels", labels);
        }
        if self.data.len() <= 16 {
            s.field("data", &self.data);
        } else {
            s.field("len", &self.data.len());
        }
        s.finish()
    }
}

impl Tensor {
    /// Builds a tensor from leg dimensions and row-major components.
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Shape(format!("leg {pos} has dimension 0")));
        }
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{} components supplied for dims {:?} (expected {})",
                data.len(),
                dims,
                expected
            )));
        }
        Ok(Self {
            dims,
            data,
            labels: None,
        })
    }

    pub fn scalar(value: C64) -> Self {
        Self {
            dims: Vec::new(),
            data: vec![value],
            labels: None,
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![ZERO; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index, in row-major order.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        let len: usize = dims.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            data.push(f(&idx));
            increment(&mut idx, &dims);
        }
        Self::new(dims, data)
    }

    /// Builds a `rows x cols` matrix (two-leg tensor) from row-major data.
    pub fn matrix(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn identity_matrix(d: usize) -> Self {
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            data[i * d + i] = ONE;
        }
        Self {
            dims: vec![d, d],
            data,
            labels: None,
        }
    }

    /// Attaches diagnostic leg labels. Labels never affect numerics.
    pub fn with_labels<S: Into<String>>(mut self, labels: Vec<S>) -> Result<Self> {
        if labels.len() != self.dims.len() {
            return Err(Error::Shape(format!(
                "{} labels for a tensor with {} legs",
                labels.len(),
                self.dims.len()
            )));
        }
        self.labels = Some(labels.into_iter().map(Into::into).collect());
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.dims.is_empty()
    }

    /// The single component of a zero-leg tensor.
    pub fn scalar_value(&self) -> Option<C64> {
        self.is_scalar().then(|| self.data[0])
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.dims)
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        idx.iter().zip(self.strides()).map(|(&i, s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scale(&self, factor: C64) -> Tensor {
        Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&c| c * factor).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "cannot add dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
            labels: self.labels.clone(),
        })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.add(&other.scale(-ONE))
    }

    /// Largest componentwise absolute difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `<self|other>` over all components.
    pub fn inner(&self, other: &Tensor) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::Shape(format!(
                "inner product of dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn reshape(&self, dims: Vec<usize>) -> Result<Tensor> {
        let len: usize = dims.iter().product();
        if len != self.data.len() {
            return Err(Error::Shape(format!("cannot reshape {:?} into {:?}", self.dims, dims)));
        }
        Tensor::new(dims, self.data.clone())
    }

    /// All legs grouped into one.
    pub fn vectorize(&self) -> Tensor {
        Tensor {
            dims: vec![self.data.len()],
            data: self.data.clone(),
            labels: None,
        }
    }

    pub fn conj(&self) -> Tensor {
        Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|c| c.conj()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.dims[0]
    }

    pub fn ncols(&self) -> usize {
        self.dims[1]
    }

    fn require_matrix(&self, what: &str) -> Result<()> {
        if self.dims.len() != 2 {
            return Err(Error::Shape(format!(
                "{what} needs a two-leg tensor, got dims {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    /// Matrix product of two two-leg tensors.
    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        self.require_matrix("matmul")?;
        other.require_matrix("matmul")?;
        if self.dims[1] != other.dims[0] {
            return Err(Error::DimensionMismatch {
                left: 1,
                left_dim: self.dims[1],
                right: 0,
                right_dim: other.dims[0],
            });
        }
        let (m, k, n) = (self.dims[0], self.dims[1], other.dims[1]);
        Tensor::new(vec![m, n], gemm(m, k, n, &self.data, &other.data))
    }

    /// Conjugate transpose of a two-leg tensor.
    pub fn adjoint(&self) -> Result<Tensor> {
        self.require_matrix("adjoint")?;
        let (r, c) = (self.dims[0], self.dims[1]);
        let mut data = vec![ZERO; r * c];
        for i in 0..r {
            for j in 0..c {
                data[j * r + i] = self.data[i * c + j].conj();
            }
        }
        Tensor::new(vec![c, r], data)
    }

    /// Sum of the diagonal of a square two-leg tensor.
    pub fn trace(&self) -> Result<C64> {
        self.require_matrix("trace")?;
        if self.dims[0] != self.dims[1] {
            return Err(Error::DimensionMismatch {
                left: 0,
                left_dim: self.dims[0],
                right: 1,
                right_dim: self.dims[1],
            });
        }
        let d = self.dims[0];
        Ok((0..d).map(|i| self.data[i * d + i]).sum())
    }

    /// Kronecker product of two matrices.
    pub fn kron(&self, other: &Tensor) -> Result<Tensor> {
        self.require_matrix("kron")?;
        other.require_matrix("kron")?;
        let (r1, c1) = (self.dims[0], self.dims[1]);
        let (r2, c2) = (other.dims[0], other.dims[1]);
        let t = tensor_product(self, other);
        // (r1, c1, r2, c2) -> (r1, r2, c1, c2)
        permute_legs(&t, &[0, 2, 1, 3])?.reshape(vec![r1 * r2, c1 * c2])
    }
}

pub(crate) fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Advances a row-major multi-index; wraps to all zeros after the last one.
pub(crate) fn increment(idx: &mut [usize], dims: &[usize]) {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < dims[pos] {
            return;
        }
        idx[pos] = 0;
    }
}

/// Row-major `m x k` times `k x n`.
pub(crate) fn gemm(m: usize, k: usize, n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == ZERO {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in row.iter_mut().zip(brow) {
                *o += aip * bv;
            }
        }
    }
    out
}

/// Pairs of legs to be joined, either between two tensors or within one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegPairing {
    pairs: Vec<(usize, usize)>,
}

impl LegPairing {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn single(left: usize, right: usize) -> Self {
        Self {
            pairs: vec![(left, right)],
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl From<Vec<(usize, usize)>> for LegPairing {
    fn from(pairs: Vec<(usize, usize)>) -> Self {
        Self::new(pairs)
    }
}

fn check_unique(legs: impl Iterator<Item = usize>, rank: usize) -> Result<Vec<bool>> {
    let mut seen = vec![false; rank];
    for leg in legs {
        if leg >= rank {
            return Err(Error::Shape(format!("leg {leg} out of range for rank {rank}")));
        }
        if seen[leg] {
            return Err(Error::DuplicateLeg(leg));
        }
        seen[leg] = true;
    }
    Ok(seen)
}

/// Joins the paired legs of `a` and `b` and sums over them.
///
/// The result carries the unpaired legs of `a` in order, then those of `b`.
pub fn contract(a: &Tensor, b: &Tensor, pairing: &LegPairing) -> Result<Tensor> {
    let used_a = check_unique(pairing.pairs.iter().map(|p| p.0), a.rank())?;
    let used_b = check_unique(pairing.pairs.iter().map(|p| p.1), b.rank())?;
    for &(la, lb) in &pairing.pairs {
        if a.dims[la] != b.dims[lb] {
            return Err(Error::DimensionMismatch {
                left: la,
                left_dim: a.dims[la],
                right: lb,
                right_dim: b.dims[lb],
            });
        }
    }
    let free_a: Vec<usize> = (0..a.rank()).filter(|&l| !used_a[l]).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|&l| !used_b[l]).collect();

    let mut order_a = free_a.clone();
    order_a.extend(pairing.pairs.iter().map(|p| p.0));
    let mut order_b: Vec<usize> = pairing.pairs.iter().map(|p| p.1).collect();
    order_b.extend(free_b.iter().copied());

    let m: usize = free_a.iter().map(|&l| a.dims[l]).product();
    let k: usize = pairing.pairs.iter().map(|p| a.dims[p.0]).product();
    let n: usize = free_b.iter().map(|&l| b.dims[l]).product();

    let pa = permute_legs(a, &order_a)?;
    let pb = permute_legs(b, &order_b)?;
    let data = gemm(m, k, n, &pa.data, &pb.data);

    let mut dims: Vec<usize> = free_a.iter().map(|&l| a.dims[l]).collect();
    dims.extend(free_b.iter().map(|&l| b.dims[l]));
    let mut out = Tensor::new(dims, data)?;
    if let (Some(la), Some(lb)) = (&a.labels, &b.labels) {
        let mut labels: Vec<String> = free_a.iter().map(|&l| la[l].clone()).collect();
        labels.extend(free_b.iter().map(|&l| lb[l].clone()));
        out.labels = Some(labels);
    }
    Ok(out)
}

/// Closes loops within one tensor by summing over each paired index.
pub fn self_trace(a: &Tensor, pairing: &LegPairing) -> Result<Tensor> {
    let used = check_unique(pairing.pairs.iter().flat_map(|&(x, y)| [x, y]), a.rank())?;
    for &(x, y) in &pairing.pairs {
        if a.dims[x] != a.dims[y] {
            return Err(Error::DimensionMismatch {
                left: x,
                left_dim: a.dims[x],
                right: y,
                right_dim: a.dims[y],
            });
        }
    }
    let free: Vec<usize> = (0..a.rank()).filter(|&l| !used[l]).collect();
    let mut order = free.clone();
    order.extend(pairing.pairs.iter().map(|p| p.0));
    order.extend(pairing.pairs.iter().map(|p| p.1));
    let permuted = permute_legs(a, &order)?;

    let f: usize = free.iter().map(|&l| a.dims[l]).product();
    let p: usize = pairing.pairs.iter().map(|q| a.dims[q.0]).product();
    let mut data = vec![ZERO; f];
    for (i, out) in data.iter_mut().enumerate() {
        let base = i * p * p;
        *out = (0..p).map(|j| permuted.data[base + j * p + j]).sum();
    }
    let dims = free.iter().map(|&l| a.dims[l]).collect();
    let mut out = Tensor::new(dims, data)?;
    if let Some(labels) = &a.labels {
        out.labels = Some(free.iter().map(|&l| labels[l].clone()).collect());
    }
    Ok(out)
}

/// Reorders legs: leg `j` of the result is leg `perm[j]` of `a`.
pub fn permute_legs(a: &Tensor, perm: &[usize]) -> Result<Tensor> {
    if perm.len() != a.rank() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of length {} for a tensor with {} legs",
            perm.len(),
            a.rank()
        )));
    }
    check_unique(perm.iter().copied(), a.rank()).map_err(|e| Error::InvalidPermutation(e.to_string()))?;
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok(a.clone());
    }
    let src_strides = a.strides();
    let dims: Vec<usize> = perm.iter().map(|&p| a.dims[p]).collect();
    let strides: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();
    let mut data = Vec::with_capacity(a.data.len());
    let mut idx = vec![0usize; dims.len()];
    let mut offset = 0usize;
    for _ in 0..a.data.len() {
        data.push(a.data[offset]);
        // odometer step with incremental source offset
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            offset += strides[pos];
            if idx[pos] < dims[pos] {
                break;
            }
            offset -= strides[pos] * dims[pos];
            idx[pos] = 0;
        }
    }
    let mut out = Tensor::new(dims, data)?;
    if let Some(labels) = &a.labels {
        out.labels = Some(perm.iter().map(|&p| labels[p].clone()).collect());
    }
    Ok(out)
}

/// Inverse of a leg permutation.
pub fn inverse_leg_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// A partition of a tensor's legs into row legs and column legs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegSplit {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl LegSplit {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self { rows, cols }
    }

    /// Legs `0..at` as rows, the rest as columns.
    pub fn at(rank: usize, at: usize) -> Self {
        Self {
            rows: (0..at).collect(),
            cols: (at..rank).collect(),
        }
    }

    fn order(&self, rank: usize) -> Result<Vec<usize>> {
        let order: Vec<usize> = self.rows.iter().chain(&self.cols).copied().collect();
        if order.len() != rank {
            return Err(Error::Shape(format!(
                "split {:?}|{:?} does not cover {rank} legs",
                self.rows, self.cols
            )));
        }
        check_unique(order.iter().copied(), rank)
            .map_err(|e| Error::Shape(format!("split is not a partition: {e}")))?;
        Ok(order)
    }
}

/// Groups legs into a matrix: rows are the combined `split.rows` legs,
/// columns the combined `split.cols` legs. An empty group has dimension 1.
pub fn group_legs(a: &Tensor, split: &LegSplit) -> Result<Tensor> {
    let order = split.order(a.rank())?;
    let rows: usize = split.rows.iter().map(|&l| a.dims[l]).product();
    let cols: usize = split.cols.iter().map(|&l| a.dims[l]).product();
    permute_legs(a, &order)?.reshape(vec![rows, cols])
}

/// Undoes [`group_legs`] given the original leg dimensions.
pub fn ungroup_legs(m: &Tensor, original_dims: &[usize], split: &LegSplit) -> Result<Tensor> {
    let order = split.order(original_dims.len())?;
    let permuted_dims: Vec<usize> = order.iter().map(|&l| original_dims[l]).collect();
    let t = m.reshape(permuted_dims)?;
    permute_legs(&t, &inverse_leg_permutation(&order))
}

/// Outer product: legs of `a` followed by legs of `b`.
pub fn tensor_product(a: &Tensor, b: &Tensor) -> Tensor {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let mut data = Vec::with_capacity(a.data.len() * b.data.len());
    for &x in &a.data {
        data.extend(b.data.iter().map(|&y| x * y));
    }
    Tensor {
        dims,
        data,
        labels: None,
    }
}

fn check_wire_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("wire dimension must be at least 1".into()));
    }
    Ok(())
}

/// The identity wire, a `d x d` Kronecker delta.
pub fn make_identity(d: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    Ok(Tensor::identity_matrix(d))
}

/// `sum_k |kk>`: two output legs joined by a bend.
pub fn make_cup(d: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    Ok(Tensor::identity_matrix(d))
}

/// `sum_k <kk|`: two input legs joined by a bend.
pub fn make_cap(d: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    Ok(Tensor::identity_matrix(d))
}

/// Crossing wires, `SWAP[i, j, k, l] = delta(i, l) delta(j, k)`.
pub fn make_swap(d: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    Tensor::from_fn(
        vec![d; 4],
        |ix| {
            if ix[0] == ix[3] && ix[1] == ix[2] {
                ONE
            } else {
                ZERO
            }
        },
    )
}

/// COPY tensor with `inputs` input legs and `outputs` output legs (inputs
/// first), all of dimension `d`: a component is 1 iff every index agrees.
pub fn make_copy(d: usize, inputs: usize, outputs: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    let legs = inputs + outputs;
    if legs == 0 {
        return Err(Error::InvalidArgument("COPY tensor needs at least one leg".into()));
    }
    let dims = vec![d; legs];
    let mut t = Tensor::zeros(dims)?;
    let stride: usize = strides_of(&t.dims).iter().sum();
    for k in 0..d {
        t.data[k * stride] = ONE;
    }
    Ok(t)
}

/// Standard basis vector `|k>` of dimension `d`.
pub fn basis_vector(d: usize, k: usize) -> Result<Tensor> {
    check_wire_dim(d)?;
    if k >= d {
        return Err(Error::InvalidArgument(format!(
            "basis index {k} out of range for dimension {d}"
        )));
    }
    let mut data = vec![ZERO; d];
    data[k] = ONE;
    Tensor::new(vec![d], data)
}
