//! Permutations of `{0, .., n-1}` and finite permutation groups closed by saturation.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

/// A permutation stored in one-line notation: `self.image(i)` is where `i` goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Panics if `images` is not a bijection of `0..images.len()`.
    pub fn new(images: Vec<usize>) -> Self {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            assert!(
                i < images.len() && !seen[i],
                "not a permutation: {images:?}"
            );
            seen[i] = true;
        }
        Perm(images)
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Perm(v)
    }

    /// The cycle `points[0] -> points[1] -> ... -> points[0]`.
    pub fn cycle(n: usize, points: &[usize]) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        for (k, &p) in points.iter().enumerate() {
            v[p] = points[(k + 1) % points.len()];
        }
        Perm::new(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j] = i;
        }
        Perm(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut lengths = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn sign(&self) -> i64 {
        let transpositions: usize = self.cycle_type().iter().map(|l| l - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm(current.clone()));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

/// A finite subgroup of `S_n`, stored as its full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Saturate the generators under composition. The identity is always included.
    pub fn generate(degree: usize, generators: &[Perm]) -> Self {
        let id = Perm::identity(degree);
        let mut elements: BTreeSet<Perm> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in generators {
                let h = s.compose(&g);
                if elements.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        PermGroup {
            degree,
            elements: elements.into_iter().collect(),
        }
    }

    /// Wrap an explicit element list without closing it; see [`PermGroup::is_closed`].
    pub fn from_elements(degree: usize, mut elements: Vec<Perm>) -> Self {
        elements.sort();
        elements.dedup();
        PermGroup { degree, elements }
    }

    pub fn symmetric(degree: usize) -> Self {
        PermGroup {
            degree,
            elements: all_perms(degree),
        }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::generate(degree, &[])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    /// Closed under composition (finite, so this makes it a subgroup).
    pub fn is_closed(&self) -> bool {
        let set: BTreeSet<&Perm> = self.elements.iter().collect();
        self.elements
            .iter()
            .all(|a| self.elements.iter().all(|b| set.contains(&a.compose(b))))
    }
}
