//! Subgroups of index two.
//!
//! Every index-2 subgroup is the kernel of a homomorphism `G -> Z/2`, and such
//! a homomorphism is a sign assignment on the generators that kills every
//! relation of `G`. A deterministic Schreier–Sims run over generators tagged
//! with their parity vectors produces a complete set of relations (the
//! Schreier relations of the final chain present `G`), so the admissible sign
//! assignments are exactly the solutions of a linear system over F2.

use rand::Rng;

use crate::action::Action;
use crate::chain::StabChain;

/// Elements of `A` carrying a parity vector over the user generators.
#[derive(Clone, Debug)]
pub struct Tagged<A>(pub A);

impl<A: Action> Action for Tagged<A> {
    type Elem = (A::Elem, u128);

    fn degree(&self) -> usize {
        self.0.degree()
    }
    fn identity(&self) -> Self::Elem {
        (self.0.identity(), 0)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.0.mul(&a.0, &b.0), a.1 ^ b.1)
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        (self.0.inv(&a.0), a.1)
    }
    fn image(&self, a: &Self::Elem, x: usize) -> usize {
        self.0.image(&a.0, x)
    }
    fn is_identity(&self, a: &Self::Elem) -> bool {
        self.0.is_identity(&a.0)
    }
}

/// Basis (in echelon form, keyed by leading bit) of the F2-span of `vs`.
fn span_basis(vs: impl IntoIterator<Item = u128>) -> Vec<u128> {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in vs {
        for &b in &basis {
            let lead = 127 - b.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let lead = 127 - v.leading_zeros();
            for b in basis.iter_mut() {
                if *b >> lead & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// All `eps` in F2^k with `eps . r = 0` for every `r` in `rels`.
fn annihilator(rels: &[u128], k: usize) -> Vec<u128> {
    let basis = span_basis(rels.iter().copied());
    let pivots: Vec<u32> = basis.iter().map(|b| 127 - b.leading_zeros()).collect();
    let free: Vec<usize> = (0..k).filter(|&i| !pivots.contains(&(i as u32))).collect();
    // Reduced echelon form: each pivot row is e_p + (free part). A solution is
    // determined by its free coordinates: eps_p = sum over free f of row_p[f] eps_f.
    let mut sols = Vec::new();
    for &f in &free {
        let mut eps: u128 = 1 << f;
        for (b, &p) in basis.iter().zip(&pivots) {
            if b >> f & 1 == 1 {
                eps |= 1 << p;
            }
        }
        sols.push(eps);
    }
    sols
}

fn parity(eps: u128, tag: u128) -> bool {
    (eps & tag).count_ones() % 2 == 1
}

#[derive(Clone, Debug)]
pub struct Index2Subgroup<A: Action> {
    /// The defining sign assignment: bit `i` set iff generator `i` is odd.
    pub signs: u128,
    pub gens: Vec<A::Elem>,
    pub chain: StabChain<A>,
}

/// Relation parity vectors of `<gens>` (a spanning set of the relation space).
pub fn relation_parities<A: Action>(act: &A, gens: &[A::Elem]) -> Vec<u128> {
    assert!(gens.len() <= 128, "at most 128 generators are supported");
    let tagged = Tagged(act.clone());
    let tgens: Vec<(A::Elem, u128)> = gens.iter().enumerate().map(|(i, g)| (g.clone(), 1u128 << i)).collect();
    let mut rels: Vec<u128> = tgens.iter().filter(|g| act.is_identity(&g.0)).map(|g| g.1).collect();
    let mut basis: Vec<u128> = Vec::new();
    StabChain::new_observed(tagged, &tgens, &[], &mut |y: &(A::Elem, u128)| {
        if y.1 != 0 {
            rels.push(y.1);
            if rels.len() > 256 {
                basis = span_basis(basis.iter().copied().chain(rels.drain(..)));
            }
        }
    });
    span_basis(basis.into_iter().chain(rels))
}

/// Dimension of `Hom(G, Z/2)`.
pub fn hom_to_z2_rank<A: Action>(act: &A, gens: &[A::Elem]) -> usize {
    annihilator(&relation_parities(act, gens), gens.len()).len()
}

/// Every subgroup of index 2 in `G = <gens>`, each with a certified chain.
/// `order` is `|G|`.
pub fn index2_subgroups<A: Action, R: Rng>(
    act: &A,
    gens: &[A::Elem],
    order: u128,
    rng: &mut R,
) -> Vec<Index2Subgroup<A>> {
    let k = gens.len();
    let sols = annihilator(&relation_parities(act, gens), k);
    let r = sols.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << r) {
        let mut eps = 0u128;
        for (i, s) in sols.iter().enumerate() {
            if mask >> i & 1 == 1 {
                eps ^= s;
            }
        }
        let t_idx = (0..k).find(|&i| eps >> i & 1 == 1).expect("nonzero sign vector");
        let t = &gens[t_idx];
        let t_inv = act.inv(t);
        // Schreier generators for the transversal {1, t}.
        let mut hg: Vec<A::Elem> = Vec::new();
        for (i, s) in gens.iter().enumerate() {
            if parity(eps, 1 << i) {
                hg.push(act.mul(s, &t_inv));
                hg.push(act.mul(t, s));
            } else {
                hg.push(s.clone());
                hg.push(act.mul(&act.mul(t, s), &t_inv));
            }
        }
        hg.retain(|g| !act.is_identity(g));
        hg.dedup();
        let chain = StabChain::new_random(act.clone(), &hg, &[], rng, Some(order / 2));
        assert_eq!(chain.order() * 2, order, "kernel of a sign character has index 2");
        assert!(!chain.contains(t), "odd generator lies outside the kernel");
        out.push(Index2Subgroup { signs: eps, gens: hg, chain });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Perm, PermAction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn count(n: usize, gens: &[Perm]) -> usize {
        let act = PermAction::new(n);
        let order = StabChain::new(act.clone(), gens, &[]).order();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let subs = index2_subgroups(&act, gens, order, &mut rng);
        for h in &subs {
            for g in gens {
                for x in &h.gens {
                    assert!(h.chain.contains(&act.conjugate(x, g)));
                }
            }
        }
        subs.len()
    }

    #[test]
    fn cyclic_of_order_four_has_one() {
        assert_eq!(count(4, &[Perm::from_cycles(4, &[&[0, 1, 2, 3]])]), 1);
    }

    #[test]
    fn klein_four_group_has_three() {
        let a = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]);
        let b = Perm::from_cycles(4, &[&[0, 2], &[1, 3]]);
        assert_eq!(count(4, &[a.clone(), b.clone()]), 3);
        // Redundant generators must not create spurious subgroups.
        let ab = a.then(&b);
        assert_eq!(count(4, &[a, b, ab]), 3);
    }

    #[test]
    fn odd_order_and_perfect_groups_have_none() {
        assert_eq!(count(3, &[Perm::from_cycles(3, &[&[0, 1, 2]])]), 0);
        let a = Perm::from_cycles(5, &[&[0, 1, 2]]);
        let b = Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]]);
        assert_eq!(count(5, &[a, b]), 0);
    }

    #[test]
    fn symmetric_group_has_one() {
        let gens = [Perm::from_cycles(5, &[&[0, 1]]), Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])];
        assert_eq!(count(5, &gens), 1);
    }

    #[test]
    fn dihedral_of_order_eight_has_three() {
        let r = Perm::from_cycles(4, &[&[0, 1, 2, 3]]);
        let s = Perm::from_cycles(4, &[&[1, 3]]);
        assert_eq!(count(4, &[r, s]), 3);
    }
}
