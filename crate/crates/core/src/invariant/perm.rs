//! Permutations of `{0, .., k-1}` in one-line notation, and tuples of them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bijection on `{0, .., k-1}`; `images[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 0..{k}"
                )));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            images: (0..k).collect(),
        }
    }

    /// The cycle `0 -> 1 -> .. -> k-1 -> 0`.
    pub fn full_cycle(k: usize) -> Self {
        Self {
            images: (0..k).map(|i| (i + 1) % k.max(1)).collect(),
        }
    }

    /// Builds a permutation of degree `k` from 0-based cycles.
    pub fn from_cycles(k: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut used = vec![false; k];
        for cycle in cycles {
            for (j, &x) in cycle.iter().enumerate() {
                if x >= k {
                    return Err(Error::InvalidPermutation(format!(
                        "element {} exceeds degree {k}",
                        x + 1
                    )));
                }
                if used[x] {
                    return Err(Error::InvalidPermutation(format!("element {} repeated", x + 1)));
                }
                used[x] = true;
                images[x] = cycle[(j + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    /// `tau ∘ self ∘ tau⁻¹`.
    pub fn conjugate_by(&self, tau: &Self) -> Self {
        let mut out = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            out[tau.images[i]] = tau.images[x];
        }
        Self { images: out }
    }

    /// All cycles including fixed points, each starting at its smallest
    /// element, ordered by smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.images.len();
        let mut seen = vec![false; k];
        let mut cycles = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Consecutive blocks `(0 1 ..)(..)` with the given non-increasing lengths.
    pub fn standard_of_type(cycle_type: &[usize]) -> Self {
        let k: usize = cycle_type.iter().sum();
        let mut images = vec![0; k];
        let mut start = 0;
        for &len in cycle_type {
            for j in 0..len {
                images[start + j] = start + (j + 1) % len;
            }
            start += len;
        }
        Self { images }
    }

    /// A `tau` with `tau ∘ self ∘ tau⁻¹` in standard block form: cycles are
    /// taken longest first, ties broken by smallest element.
    pub fn standardizing_conjugator(&self) -> Self {
        let mut cycles = self.cycles();
        cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        let mut tau = vec![0; self.images.len()];
        let mut pos = 0;
        for cycle in cycles {
            for x in cycle {
                tau[x] = pos;
                pos += 1;
            }
        }
        Self { images: tau }
    }

    /// Every permutation of degree `k`, in lexicographic order of one-line notation.
    pub fn all(k: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            out.push(Self {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..k)
                .rev()
                .find(|&j| current[j] > current[i - 1])
                .expect("successor exists");
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    /// Position in [`Permutation::all`].
    pub fn rank(&self) -> usize {
        let k = self.images.len();
        let mut rank = 0;
        for i in 0..k {
            let smaller = self.images[i + 1..].iter().filter(|&&x| x < self.images[i]).count();
            rank = rank * (k - i) + smaller;
        }
        rank
    }

    /// 1-based cycle notation without fixed points, or `e`.
    pub fn cycle_notation(&self) -> String {
        let wide = self.images.len() >= 10;
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| {
                let elems: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
                format!("({})", elems.join(if wide { "," } else { "" }))
            })
            .collect();
        if parts.is_empty() {
            "e".to_string()
        } else {
            parts.concat()
        }
    }

    /// Parses 1-based cycle notation (`e`, `(123)(45)`, `(1,10,3)`).
    pub fn parse_cycles(text: &str, k: usize) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "e" {
            return Ok(Self::identity(k));
        }
        if s.is_empty() {
            return Err(Error::Label("empty permutation term".into()));
        }
        let mut cycles = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Label(format!("expected '(' in {s:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| Error::Label(format!("unclosed cycle in {s:?}")))?;
            let inner = &body[..close];
            rest = &body[close + 1..];
            let elems: Vec<usize> = if inner.contains(',') {
                inner
                    .split(',')
                    .map(|p| {
                        p.parse::<usize>()
                            .map_err(|_| Error::Label(format!("bad element {p:?}")))
                    })
                    .collect::<Result<_>>()?
            } else {
                inner
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Label(format!("bad element {c:?}")))
                    })
                    .collect::<Result<_>>()?
            };
            if elems.is_empty() {
                return Err(Error::Label("empty cycle".into()));
            }
            if let Some(&bad) = elems.iter().find(|&&x| x == 0 || x > k) {
                return Err(Error::Label(format!("element {bad} outside 1..={k}")));
            }
            cycles.push(elems.into_iter().map(|x| x - 1).collect::<Vec<_>>());
        }
        Self::from_cycles(k, &cycles).map_err(|e| Error::Label(e.to_string()))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// Degree `k` and one permutation of the `k` copies per subsystem.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermTuple {
    k: usize,
    sigmas: Vec<Permutation>,
}

impl PermTuple {
    pub fn new(k: usize, sigmas: Vec<Permutation>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("degree k must be at least 1".into()));
        }
        if sigmas.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one subsystem permutation is required".into(),
            ));
        }
        if let Some(bad) = sigmas.iter().find(|s| s.degree() != k) {
            return Err(Error::InvalidPermutation(format!(
                "permutation of degree {} in a degree-{k} tuple",
                bad.degree()
            )));
        }
        Ok(Self { k, sigmas })
    }

    pub fn identity(k: usize, n: usize) -> Result<Self> {
        Self::new(k, vec![Permutation::identity(k); n])
    }

    /// `(12..k)` on the subsystems flagged in `cyclic`, identity elsewhere.
    pub fn cyclic_on(k: usize, cyclic: &[bool]) -> Result<Self> {
        let sigmas = cyclic
            .iter()
            .map(|&c| {
                if c {
                    Permutation::full_cycle(k)
                } else {
                    Permutation::identity(k)
                }
            })
            .collect();
        Self::new(k, sigmas)
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn subsystems(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigmas
    }

    /// Every `sigma_i` conjugated by the same `tau`.
    pub fn conjugate(&self, tau: &Permutation) -> Self {
        Self {
            k: self.k,
            sigmas: self.sigmas.iter().map(|s| s.conjugate_by(tau)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            k: self.k,
            sigmas: self.sigmas.iter().map(Permutation::inverse).collect(),
        }
    }

    /// Concatenated one-line notations.
    pub fn encoding(&self) -> Vec<usize> {
        self.sigmas.iter().flat_map(|s| s.images().iter().copied()).collect()
    }

    /// The sub-tuple on a set of copies closed under every `sigma_i`,
    /// relabeled to `0..copies.len()` in ascending order.
    pub fn restrict(&self, copies: &[usize]) -> Result<Self> {
        let mut sorted = copies.to_vec();
        sorted.sort_unstable();
        let mut pos = vec![usize::MAX; self.k];
        for (new, &old) in sorted.iter().enumerate() {
            pos[old] = new;
        }
        let sigmas = self
            .sigmas
            .iter()
            .map(|s| {
                let images = sorted
                    .iter()
                    .map(|&c| {
                        let p = pos[s.apply(c)];
                        if p == usize::MAX {
                            Err(Error::InvalidArgument("copy set is not closed under the tuple".into()))
                        } else {
                            Ok(p)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Permutation::new(images)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sorted.len(), sigmas)
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.sigmas.iter().map(Permutation::cycle_notation).collect();
        write!(f, "{}; {}", self.k, terms.join(" | "))
    }
}

impl FromStr for PermTuple {
    type Err = Error;

    /// `k; cycles | cycles | ...`, whitespace insignificant.
    fn from_str(s: &str) -> Result<Self> {
        let (deg, rest) = s
            .split_once(';')
            .ok_or_else(|| Error::Label(format!("missing ';' in {s:?}")))?;
        let deg: String = deg.chars().filter(|c| !c.is_whitespace()).collect();
        let k: usize = deg.parse().map_err(|_| Error::Label(format!("bad degree {deg:?}")))?;
        if k == 0 {
            return Err(Error::Label("degree must be at least 1".into()));
        }
        let sigmas = rest
            .split('|')
            .map(|term| Permutation::parse_cycles(term, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, sigmas).map_err(|e| Error::Label(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_round_trip() {
        let p = Permutation::parse_cycles("(123)", 3).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.cycle_notation(), "(123)");
        let q = Permutation::parse_cycles("(321)", 3).unwrap();
        assert_eq!(q, p.inverse());
        assert_eq!(q.cycle_notation(), "(132)");
        assert_eq!(
            Permutation::parse_cycles(" ( 1 2 ) ( 3 ) ", 3).unwrap().images(),
            &[1, 0, 2]
        );
        assert_eq!(
            Permutation::parse_cycles("(1,10)", 10).unwrap().cycle_notation(),
            "(1,10)"
        );
        assert!(Permutation::parse_cycles("(12)(2 3)", 3).is_err());
        assert!(Permutation::parse_cycles("(14)", 3).is_err());
        assert!(Permutation::parse_cycles("()", 3).is_err());
        assert!(Permutation::parse_cycles("12", 3).is_err());
    }

    #[test]
    fn label_grammar() {
        let t: PermTuple = "3; (123) | (12)".parse().unwrap();
        assert_eq!(t.degree(), 3);
        assert_eq!(t.subsystems(), 2);
        assert_eq!(t.to_string(), "3; (123) | (12)");
        let u: PermTuple = "  3;(123)|(1 2)  ".parse().unwrap();
        assert_eq!(t, u);
        assert_eq!("2; e".parse::<PermTuple>().unwrap().to_string(), "2; e");
        assert!("3 (123)".parse::<PermTuple>().is_err());
        assert!("x; e".parse::<PermTuple>().is_err());
        assert!("0; e".parse::<PermTuple>().is_err());
        assert!("2; (123)".parse::<PermTuple>().is_err());
    }

    #[test]
    fn conjugation() {
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        let tau = Permutation::new(vec![1, 0, 2]).unwrap();
        let c = s.conjugate_by(&tau);
        assert_eq!(c, tau.compose(&s).compose(&tau.inverse()));
        assert_eq!(c, s.inverse());
    }

    #[test]
    fn all_and_rank() {
        let all = Permutation::all(4);
        assert_eq!(all.len(), 24);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.rank(), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Permutation::all(0).len(), 1);
    }

    #[test]
    fn standard_form() {
        let p = Permutation::parse_cycles("(25)(143)", 6).unwrap();
        assert_eq!(p.cycle_type(), vec![3, 2, 1]);
        let tau = p.standardizing_conjugator();
        assert_eq!(p.conjugate_by(&tau), Permutation::standard_of_type(&[3, 2, 1]));
        assert_eq!(Permutation::standard_of_type(&[3, 2, 1]).cycle_notation(), "(123)(45)");
    }

    #[test]
    fn restrict_component() {
        let t: PermTuple = "3; (12) | e".parse().unwrap();
        assert_eq!(t.restrict(&[0, 1]).unwrap().to_string(), "2; (12) | e");
        assert_eq!(t.restrict(&[2]).unwrap().to_string(), "1; e | e");
        assert!(t.restrict(&[1, 2]).is_err());
    }
}
