//! Numerical evaluation of `Tr(T(sigma_1, .., sigma_n) rho^{(x)k})`.
//!
//! Two routes are provided. [`evaluate`] materializes `rho^{(x)k}` and the
//! permutation operator as dense matrices; it is the reference. [`evaluate_fast`]
//! never forms either: it contracts `k` copies of `rho` one at a time, joining
//! the legs of subsystem `i` of copy `m` to the legs of copy `sigma_i(m)`.
//!
//! Convention: `I = sum_x prod_m rho[(x^i_{sigma_i(m)})_i, (x^i_m)_i]`.

use super::perm::PermTuple;
use crate::decomposition::schmidt;
use crate::error::{Error, Result};
use crate::state::{conjugate_density, derive_seed, random_local_unitary};
use crate::tensor::{contract, self_trace, tensor_product, LegPairing, Tensor, C64, ONE, ZERO};

fn check_operator(t: &PermTuple, rho: &Tensor, dims: &[usize]) -> Result<usize> {
    if dims.len() != t.subsystems() {
        return Err(Error::Shape(format!(
            "label has {} subsystems but dims {:?} have {}",
            t.subsystems(),
            dims,
            dims.len()
        )));
    }
    check_rho(rho, dims)
}

fn check_rho(rho: &Tensor, dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if rho.dims() != [total, total] {
        return Err(Error::Shape(format!(
            "operator dims {:?} inconsistent with subsystem dims {:?}",
            rho.dims(),
            dims
        )));
    }
    Ok(total)
}

/// `rho^{(x)k}` as a `D^k x D^k` matrix, copies in order.
pub fn tensor_power(rho: &Tensor, k: usize) -> Result<Tensor> {
    let mut acc = Tensor::matrix(1, 1, vec![ONE])?;
    for _ in 0..k {
        acc = acc.kron(rho)?;
    }
    Ok(acc)
}

/// Dense permutation operator `T` on `(C^D)^{(x)k}` with
/// `(T v)[x] = v[y(x)]`, `y^i_m = x^i_{sigma_i(m)}`.
pub fn permutation_operator(t: &PermTuple, dims: &[usize]) -> Result<Tensor> {
    if dims.len() != t.subsystems() {
        return Err(Error::Shape(format!(
            "label has {} subsystems but {} dims given",
            t.subsystems(),
            dims.len()
        )));
    }
    let k = t.degree();
    let n = dims.len();
    // digits of the big index: copy-major, then subsystem
    let digit_dims: Vec<usize> = (0..k).flat_map(|_| dims.iter().copied()).collect();
    let size: usize = digit_dims.iter().product();
    let mut x = vec![0usize; k * n];
    let mut strides = vec![1usize; k * n];
    for p in (0..k * n - 1).rev() {
        strides[p] = strides[p + 1] * digit_dims[p + 1];
    }
    let mut ones = Vec::with_capacity(size);
    for row in 0..size {
        let mut col = 0;
        for m in 0..k {
            for (i, s) in t.sigmas().iter().enumerate() {
                col += x[s.apply(m) * n + i] * strides[m * n + i];
            }
        }
        ones.push((row, col));
        crate::tensor::increment(&mut x, &digit_dims);
    }
    let mut data = vec![ZERO; size * size];
    for (row, col) in ones {
        data[row * size + col] = ONE;
    }
    Tensor::new(vec![size, size], data)
}

/// `Tr(F rho^{(x)k})` for an arbitrary dense `D^k x D^k` operator `F`.
pub fn trace_with_operator(f: &Tensor, rho: &Tensor, k: usize) -> Result<C64> {
    let power = tensor_power(rho, k)?;
    if f.dims() != power.dims() {
        return Err(Error::Shape(format!(
            "operator dims {:?} do not match rho^k dims {:?}",
            f.dims(),
            power.dims()
        )));
    }
    let size = power.nrows();
    let (fd, pd) = (f.data(), power.data());
    let mut sum = ZERO;
    for a in 0..size {
        for b in 0..size {
            let fab = fd[a * size + b];
            if fab != ZERO {
                sum += fab * pd[b * size + a];
            }
        }
    }
    Ok(sum)
}

/// Reference evaluation through the materialized `rho^{(x)k}` and the dense
/// permutation operator.
pub fn evaluate(t: &PermTuple, rho: &Tensor, dims: &[usize]) -> Result<C64> {
    check_operator(t, rho, dims)?;
    let op = permutation_operator(t, dims)?;
    trace_with_operator(&op, rho, t.degree())
}

struct Labeled {
    tensor: Tensor,
    labels: Vec<usize>,
}

impl Labeled {
    /// Sums over legs that carry the same label.
    fn close_loops(self) -> Result<Labeled> {
        let mut pairs = Vec::new();
        for a in 0..self.labels.len() {
            for b in a + 1..self.labels.len() {
                if self.labels[a] == self.labels[b] {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.is_empty() {
            return Ok(self);
        }
        let closed: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let labels = (0..self.labels.len())
            .filter(|l| !closed.contains(l))
            .map(|l| self.labels[l])
            .collect();
        let tensor = self_trace(&self.tensor, &LegPairing::new(pairs))?;
        Ok(Labeled { tensor, labels })
    }

    fn join(self, other: Labeled) -> Result<Labeled> {
        let mut pairs = Vec::new();
        for (a, la) in self.labels.iter().enumerate() {
            if let Some(b) = other.labels.iter().position(|lb| lb == la) {
                pairs.push((a, b));
            }
        }
        let tensor = if pairs.is_empty() {
            tensor_product(&self.tensor, &other.tensor)
        } else {
            contract(&self.tensor, &other.tensor, &LegPairing::new(pairs.clone()))?
        };
        let mut labels: Vec<usize> = (0..self.labels.len())
            .filter(|a| !pairs.iter().any(|p| p.0 == *a))
            .map(|a| self.labels[a])
            .collect();
        labels.extend(
            (0..other.labels.len())
                .filter(|b| !pairs.iter().any(|p| p.1 == *b))
                .map(|b| other.labels[b]),
        );
        Ok(Labeled { tensor, labels })
    }
}

/// Copy order for the sweep: breadth-first along the diagram's links so that
/// each new copy shares as many wires as possible with what is already joined.
fn sweep_order(t: &PermTuple) -> Vec<usize> {
    let k = t.degree();
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    for start in 0..k {
        if placed[start] {
            continue;
        }
        placed[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(m) = queue.pop_front() {
            order.push(m);
            for s in t.sigmas() {
                for next in [s.apply(m), s.inverse().apply(m)] {
                    if !placed[next] {
                        placed[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    order
}

/// Contraction-network evaluation; never materializes `rho^{(x)k}`.
pub fn evaluate_fast(t: &PermTuple, rho: &Tensor, dims: &[usize]) -> Result<C64> {
    check_operator(t, rho, dims)?;
    let n = dims.len();
    let k = t.degree();
    let mut legs = dims.to_vec();
    legs.extend_from_slice(dims);
    let copy = rho.reshape(legs)?;
    // wire label of subsystem i between copies: i * k + m
    let mut acc: Option<Labeled> = None;
    for m in sweep_order(t) {
        let mut labels = Vec::with_capacity(2 * n);
        labels.extend(t.sigmas().iter().enumerate().map(|(i, s)| i * k + s.apply(m)));
        labels.extend((0..n).map(|i| i * k + m));
        let node = Labeled {
            tensor: copy.clone(),
            labels,
        }
        .close_loops()?;
        acc = Some(match acc {
            None => node,
            Some(prev) => prev.join(node)?,
        });
    }
    let done = acc.expect("k >= 1").close_loops()?;
    done.tensor
        .scalar_value()
        .ok_or_else(|| Error::Numerical("contraction left open legs".into()))
}

/// Product of the invariants of each connected piece of the diagram.
pub fn evaluate_by_components(t: &PermTuple, rho: &Tensor, dims: &[usize]) -> Result<C64> {
    super::canonical::component_tuples(t)
        .iter()
        .try_fold(ONE, |acc, c| Ok(acc * evaluate_fast(c, rho, dims)?))
}

/// Largest relative change of `f` under random local unitary conjugation.
pub fn verify_invariance_by<F>(f: F, rho: &Tensor, dims: &[usize], trials: usize, seed: u64) -> Result<f64>
where
    F: Fn(&Tensor) -> Result<C64>,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check_rho(rho, dims)?;
    let base = f(rho)?;
    let scale = base.norm().max(1e-300);
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let factors = random_local_unitary(dims, derive_seed(seed, trial as u64))?;
        let moved = conjugate_density(rho, &factors)?;
        worst = worst.max((f(&moved)? - base).norm() / scale);
    }
    Ok(worst)
}

pub fn verify_invariance(t: &PermTuple, rho: &Tensor, dims: &[usize], trials: usize, seed: u64) -> Result<f64> {
    check_operator(t, rho, dims)?;
    verify_invariance_by(|r| evaluate_fast(t, r, dims), rho, dims, trials, seed)
}

/// `J_k = sum_i sigma_i^{2k}` from the Schmidt coefficients across `split`.
pub fn pure_jk(state: &Tensor, split: &crate::tensor::LegSplit, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let form = schmidt(state, split)?;
    Ok(form.sigma.iter().map(|s| s.powi(2 * k as i32)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::{enumerate_invariants, is_real_guaranteed, Permutation};
    use crate::state::{density_from_pure, random_density, random_pure_state};
    use crate::tensor::LegSplit;

    fn t(s: &str) -> PermTuple {
        s.parse().unwrap()
    }

    fn close(a: C64, b: C64, rel: f64) -> bool {
        (a - b).norm() <= rel * a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn purity_and_mixed_qubit() {
        let rho = random_density(&[3], 1).unwrap();
        let tr2 = rho.matmul(&rho).unwrap().trace().unwrap();
        assert!(close(evaluate(&t("2; (12)"), &rho, &[3]).unwrap(), tr2, 1e-12));
        let mixed = Tensor::identity_matrix(2).scale(C64::new(0.5, 0.0));
        let v = evaluate_fast(&t("2; (12)"), &mixed, &[2]).unwrap();
        assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_tuple_is_trace_power() {
        let rho = random_density(&[2, 3], 2).unwrap().scale(C64::new(1.3, 0.2));
        let tr = rho.trace().unwrap();
        let v = evaluate_fast(&PermTuple::identity(3, 2).unwrap(), &rho, &[2, 3]).unwrap();
        assert!(close(v, tr * tr * tr, 1e-12));
    }

    #[test]
    fn full_cycle_is_trace_of_power() {
        let rho = random_density(&[3], 4).unwrap();
        let mut power = rho.clone();
        for k in 1..=5 {
            let v = evaluate_fast(&PermTuple::cyclic_on(k, &[true]).unwrap(), &rho, &[3]).unwrap();
            assert!(close(v, power.trace().unwrap(), 1e-12));
            power = power.matmul(&rho).unwrap();
        }
    }

    #[test]
    fn fast_matches_reference() {
        for (dims, seed) in [(vec![2, 2], 5u64), (vec![2, 3], 6), (vec![3], 7)] {
            let rho = random_density(&dims, seed).unwrap();
            for k in 1..=3 {
                for class in enumerate_invariants(dims.len(), k).unwrap() {
                    let a = evaluate(&class.representative, &rho, &dims).unwrap();
                    let b = evaluate_fast(&class.representative, &rho, &dims).unwrap();
                    assert!(close(a, b, 1e-10), "{} {a} {b}", class.representative);
                }
            }
        }
    }

    #[test]
    fn conjugation_invariance() {
        let rho = random_density(&[2, 2], 8).unwrap();
        for class in enumerate_invariants(2, 3).unwrap() {
            let base = evaluate_fast(&class.representative, &rho, &[2, 2]).unwrap();
            for tau in Permutation::all(3) {
                let moved = class.representative.conjugate(&tau);
                assert!(close(base, evaluate_fast(&moved, &rho, &[2, 2]).unwrap(), 1e-10));
            }
        }
    }

    #[test]
    fn disconnected_product_rule() {
        let rho = random_density(&[2, 2], 9).unwrap();
        for label in ["3; (12) | e", "4; (12) | (34)", "4; (12)(34) | e", "3; e | e"] {
            let tuple = t(label);
            let whole = evaluate_fast(&tuple, &rho, &[2, 2]).unwrap();
            let parts = evaluate_by_components(&tuple, &rho, &[2, 2]).unwrap();
            assert!(close(whole, parts, 1e-10), "{label}");
        }
        let single = random_density(&[3], 10).unwrap();
        let v = evaluate_fast(&t("3; (12)"), &single, &[3]).unwrap();
        let tr2 = single.matmul(&single).unwrap().trace().unwrap();
        assert!(close(v, tr2 * single.trace().unwrap(), 1e-12));
    }

    #[test]
    fn three_one_two_is_j1_j2() {
        let psi = random_pure_state(&[2, 3], 11).unwrap();
        let rho = density_from_pure(&psi);
        let v = evaluate_fast(&t("3; (123) | (12)"), &rho, &[2, 3]).unwrap();
        let split = LegSplit::at(2, 1);
        let j = pure_jk(&psi, &split, 1).unwrap() * pure_jk(&psi, &split, 2).unwrap();
        assert!((v - C64::new(j, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn jk_values() {
        let psi = random_pure_state(&[2, 2], 12).unwrap();
        let split = LegSplit::at(2, 1);
        assert!((pure_jk(&psi, &split, 1).unwrap() - 1.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Tensor::new(vec![2, 2], vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
        assert!((pure_jk(&bell, &split, 2).unwrap() - 0.5).abs() < 1e-12);
        let rho = density_from_pure(&psi);
        for k in 1..=4 {
            let label = PermTuple::cyclic_on(k, &[true, false]).unwrap();
            let v = evaluate_fast(&label, &rho, &[2, 2]).unwrap();
            assert!((v.re - pure_jk(&psi, &split, k).unwrap()).abs() < 1e-10);
        }
        assert!(pure_jk(&psi, &LegSplit::new(vec![0, 1], vec![]), 2).is_err());
        assert!(pure_jk(&psi, &split, 0).is_err());
    }

    #[test]
    fn realness_holds_numerically() {
        let classes = enumerate_invariants(2, 3).unwrap();
        for seed in 0..20 {
            let rho = random_density(&[2, 2], 100 + seed).unwrap();
            for class in classes.iter().filter(|c| c.real) {
                let v = evaluate_fast(&class.representative, &rho, &[2, 2]).unwrap();
                assert!(v.im.abs() <= 1e-10);
            }
        }
        assert!(is_real_guaranteed(&t("2; (12) | e")));
    }

    #[test]
    fn invariance_and_negative_control() {
        let rho = random_density(&[2, 2], 13).unwrap();
        let dev = verify_invariance(&PermTuple::identity(2, 2).unwrap(), &rho, &[2, 2], 5, 1).unwrap();
        assert!(dev <= 1e-12);
        for class in enumerate_invariants(2, 2).unwrap() {
            assert!(verify_invariance(&class.representative, &rho, &[2, 2], 10, 3).unwrap() <= 1e-9);
        }
        let f = crate::state::random_density(&[16], 77).unwrap();
        let dev = verify_invariance_by(|r| trace_with_operator(&f, r, 2), &rho, &[2, 2], 5, 1).unwrap();
        assert!(dev > 1e-6);
    }

    #[test]
    fn shape_errors() {
        let rho = random_density(&[2, 2], 1).unwrap();
        assert!(evaluate_fast(&t("2; (12)"), &rho, &[2, 2]).is_err());
        assert!(evaluate(&t("2; (12) | e"), &rho, &[2, 3]).is_err());
    }
}
