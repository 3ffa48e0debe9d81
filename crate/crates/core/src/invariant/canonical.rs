//! Canonical forms of permutation tuples under simultaneous conjugation.
//!
//! The canonical representative puts the first permutation in standard block
//! form (cycles as consecutive blocks, longest first) and then takes the
//! lexicographically smallest encoding of the remaining permutations over the
//! conjugations that keep the first one fixed.

use serde::Serialize;

use super::perm::{PermTuple, Permutation};
use crate::error::{Error, Result};

/// Largest degree accepted by [`enumerate_invariants`].
pub const MAX_DEGREE: usize = 6;

/// Upper bound on `(k!)^(n-1)` tuples scanned per cycle type.
const MAX_SCAN: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalClass {
    #[serde(serialize_with = "as_label")]
    pub representative: PermTuple,
    /// Number of tuples in the simultaneous-conjugation orbit.
    pub orbit_size: usize,
    /// Partition of the copies into connected pieces of the diagram.
    pub components: Vec<Vec<usize>>,
    pub real: bool,
}

fn as_label<S: serde::Serializer>(t: &PermTuple, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

/// Permutations commuting with `s`.
fn centralizer(s: &Permutation) -> Vec<Permutation> {
    Permutation::all(s.degree())
        .into_iter()
        .filter(|tau| s.conjugate_by(tau) == *s)
        .collect()
}

fn conjugated_tail(sigmas: &[Permutation], tau: &Permutation) -> Vec<usize> {
    sigmas
        .iter()
        .flat_map(|s| s.conjugate_by(tau).images().to_vec())
        .collect()
}

fn canonical_with(t: &PermTuple, centralizer: &[Permutation]) -> PermTuple {
    let first = &t.sigmas()[0];
    let tau0 = first.standardizing_conjugator();
    let standard = first.conjugate_by(&tau0);
    let moved: Vec<Permutation> = t.sigmas()[1..].iter().map(|s| s.conjugate_by(&tau0)).collect();
    let best = centralizer
        .iter()
        .min_by_key(|tau| conjugated_tail(&moved, tau))
        .expect("centralizer contains the identity");
    let mut sigmas = vec![standard];
    sigmas.extend(moved.iter().map(|s| s.conjugate_by(best)));
    PermTuple::new(t.degree(), sigmas).expect("conjugation preserves validity")
}

/// Canonical representative of the tuple's orbit.
pub fn canonicalize(t: &PermTuple) -> PermTuple {
    let standard = Permutation::standard_of_type(&t.sigmas()[0].cycle_type());
    canonical_with(t, &centralizer(&standard))
}

/// Whether two tuples label the same invariant diagram.
pub fn same_orbit(a: &PermTuple, b: &PermTuple) -> bool {
    a.degree() == b.degree() && a.subsystems() == b.subsystems() && canonicalize(a) == canonicalize(b)
}

/// Copies linked through any cycle of any permutation, as a partition sorted
/// by smallest element.
pub fn connected_components(t: &PermTuple) -> Vec<Vec<usize>> {
    let k = t.degree();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut y = x;
        while parent[y] != root {
            let next = parent[y];
            parent[y] = root;
            y = next;
        }
        root
    }
    for s in t.sigmas() {
        for m in 0..k {
            let (a, b) = (find(&mut parent, m), find(&mut parent, s.apply(m)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for m in 0..k {
        let root = find(&mut parent, m);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(m);
    }
    groups
}

/// Sub-tuples of each connected piece.
pub fn component_tuples(t: &PermTuple) -> Vec<PermTuple> {
    connected_components(t)
        .iter()
        .map(|c| t.restrict(c).expect("components are closed"))
        .collect()
}

/// True iff one `tau` conjugates every permutation to its inverse.
pub fn is_real_guaranteed(t: &PermTuple) -> bool {
    if t.sigmas().iter().all(|s| s.compose(s).is_identity()) {
        return true;
    }
    let inverse = t.inverse();
    Permutation::all(t.degree())
        .iter()
        .any(|tau| t.conjugate(tau) == inverse)
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Integer partitions of `k`, parts non-increasing.
fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// One canonical class per orbit of `S_k^n` under simultaneous conjugation,
/// sorted by canonical encoding.
pub fn enumerate_invariants(n: usize, k: usize) -> Result<Vec<CanonicalClass>> {
    if !(1..=MAX_DEGREE).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "degree k must be in 1..={MAX_DEGREE}, got {k}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("at least one subsystem is required".into()));
    }
    let kf = factorial(k);
    let tail_count = (0..n - 1)
        .try_fold(1usize, |acc, _| acc.checked_mul(kf))
        .filter(|&c| c <= MAX_SCAN);
    let Some(tail_count) = tail_count else {
        return Err(Error::InvalidArgument(format!(
            "(k!)^(n-1) too large to enumerate for n = {n}, k = {k}"
        )));
    };
    let all = Permutation::all(k);

    let mut classes = Vec::new();
    for lambda in partitions(k) {
        let standard = Permutation::standard_of_type(&lambda);
        let cent = centralizer(&standard);
        let class_size = kf / cent.len();
        let mut seen = vec![false; tail_count];
        for index in 0..tail_count {
            if seen[index] {
                continue;
            }
            let tail = decode_tail(index, n - 1, &all);
            let mut orbit = 0usize;
            for tau in &cent {
                let image: Vec<Permutation> = tail.iter().map(|s| s.conjugate_by(tau)).collect();
                let j = encode_tail(&image, kf);
                if !seen[j] {
                    seen[j] = true;
                    orbit += 1;
                }
            }
            let mut sigmas = vec![standard.clone()];
            sigmas.extend(tail);
            let t = PermTuple::new(k, sigmas)?;
            let representative = canonical_with(&t, &cent);
            classes.push(CanonicalClass {
                components: connected_components(&representative),
                real: is_real_guaranteed(&representative),
                representative,
                orbit_size: orbit * class_size,
            });
        }
    }
    classes.sort_by_key(|c| c.representative.encoding());
    Ok(classes)
}

fn decode_tail(mut index: usize, len: usize, all: &[Permutation]) -> Vec<Permutation> {
    let kf = all.len();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(all[index % kf].clone());
        index /= kf;
    }
    out
}

fn encode_tail(tail: &[Permutation], kf: usize) -> usize {
    tail.iter().rev().fold(0, |acc, s| acc * kf + s.rank())
}
