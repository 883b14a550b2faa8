//! Group elements acting on the points `0..degree`.
//!
//! All actions are right actions: `image(mul(a, b), x) == image(b, image(a, x))`.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// A faithful action of some group on `0..degree()`.
///
/// The action object carries whatever context the elements need (module
/// shape, degree, ...), so elements themselves can stay small.
pub trait Action: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn degree(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    /// `a` followed by `b`.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn image(&self, a: &Self::Elem, x: usize) -> usize;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^-1 b^-1 a b`.
    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }

    /// `b^-1 a b`.
    fn conjugate(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(b), a), b)
    }

    /// Smallest `k > 0` with `a^k = 1`.
    fn order_of(&self, a: &Self::Elem) -> u64 {
        let mut k = 1;
        let mut p = a.clone();
        while !self.is_identity(&p) {
            p = self.mul(&p, a);
            k += 1;
        }
        k
    }
}

/// A permutation of `0..n` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Builds a permutation from an image array, rejecting non-bijections.
    pub fn from_images(images: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            let i = i as usize;
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm(images))
    }

    /// Permutation from disjoint cycles on `0..n`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Self {
        let mut img: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                img[x as usize] = c[(k + 1) % c.len()];
            }
        }
        Perm(img)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }
}

/// The natural action of `Sym(n)` on `0..n`.
#[derive(Clone, Debug)]
pub struct PermAction {
    n: usize,
}

impl PermAction {
    pub fn new(n: usize) -> Self {
        PermAction { n }
    }
}

impl Action for PermAction {
    type Elem = Perm;

    fn degree(&self) -> usize {
        self.n
    }

    fn identity(&self) -> Perm {
        Perm::identity(self.n)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.then(b)
    }

    fn inv(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn image(&self, a: &Perm, x: usize) -> usize {
        a.apply(x)
    }

    fn is_identity(&self, a: &Perm) -> bool {
        a.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }
}
