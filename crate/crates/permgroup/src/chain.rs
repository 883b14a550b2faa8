//! Base and strong generating sets (stabilizer chains).
//!
//! Transversals are stored as Schreier trees; coset representatives are
//! rebuilt on demand, so the memory cost per level is one label per orbit
//! point regardless of how expensive elements are.

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::action::Action;

const ROOT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Level<E> {
    pub base: usize,
    /// Strong generators fixing all earlier base points.
    pub gens: Vec<E>,
    gen_inv: Vec<E>,
    /// Schreier tree: orbit point -> index of the generator that reached it.
    tree: FxHashMap<usize, u32>,
    orbit: Vec<usize>,
}

impl<E: Clone> Level<E> {
    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    pub fn contains(&self, x: usize) -> bool {
        self.tree.contains_key(&x)
    }
}

/// A stabilizer chain for the group generated by some elements of an [`Action`].
#[derive(Clone, Debug)]
pub struct StabChain<A: Action> {
    act: A,
    gens: Vec<A::Elem>,
    levels: Vec<Level<A::Elem>>,
}

impl<A: Action> StabChain<A> {
    /// Deterministic Schreier–Sims. `base_prefix` fixes the first base points.
    pub fn new(act: A, gens: &[A::Elem], base_prefix: &[usize]) -> Self {
        let mut chain = Self::skeleton(act, gens, base_prefix);
        chain.complete(&mut |_| {});
        chain
    }

    /// Randomized Schreier–Sims followed by the deterministic completion pass.
    ///
    /// When `known_order` is given and the partial chain reaches it, the chain
    /// is certified complete (the product of partial orbit lengths never
    /// exceeds the group order) and the deterministic pass is skipped.
    pub fn new_random<R: Rng>(
        act: A,
        gens: &[A::Elem],
        base_prefix: &[usize],
        rng: &mut R,
        known_order: Option<u128>,
    ) -> Self {
        let mut chain = Self::skeleton(act, gens, base_prefix);
        if chain.gens.is_empty() {
            return chain;
        }
        let mut pr = ProductReplacement::new(&chain.act, &chain.gens, rng);
        let mut quiet = 0;
        while quiet < 40 {
            if known_order.is_some_and(|t| chain.order() == t) {
                return chain;
            }
            let g = pr.next(&chain.act, rng);
            let (y, j) = chain.sift(&g, 0);
            if chain.act.is_identity(&y) {
                quiet += 1;
            } else {
                chain.install(y, 0, j);
                quiet = 0;
            }
        }
        if known_order.is_some_and(|t| chain.order() == t) {
            return chain;
        }
        chain.complete(&mut |_| {});
        chain
    }

    /// Deterministic Schreier–Sims that reports every Schreier generator
    /// sifting to the identity (as judged by [`Action::is_identity`]).
    pub fn new_observed(
        act: A,
        gens: &[A::Elem],
        base_prefix: &[usize],
        observer: &mut dyn FnMut(&A::Elem),
    ) -> Self {
        let mut chain = Self::skeleton(act, gens, base_prefix);
        chain.complete(observer);
        chain
    }

    fn skeleton(act: A, gens: &[A::Elem], base_prefix: &[usize]) -> Self {
        let gens: Vec<A::Elem> = gens.iter().filter(|g| !act.is_identity(g)).cloned().collect();
        let mut base: Vec<usize> = base_prefix.to_vec();
        for g in &gens {
            if base.iter().all(|&b| act.image(g, b) == b) {
                let moved = (0..act.degree()).find(|&x| act.image(g, x) != x).expect("non-identity element moves a point");
                base.push(moved);
            }
        }
        let mut chain = StabChain { act, gens: gens.clone(), levels: Vec::new() };
        for (i, &b) in base.iter().enumerate() {
            let lvl_gens: Vec<A::Elem> = gens
                .iter()
                .filter(|g| base[..i].iter().all(|&p| chain.act.image(g, p) == p))
                .cloned()
                .collect();
            chain.levels.push(chain.make_level(b, lvl_gens));
        }
        chain
    }

    fn make_level(&self, base: usize, gens: Vec<A::Elem>) -> Level<A::Elem> {
        let gen_inv = gens.iter().map(|g| self.act.inv(g)).collect();
        let mut lvl = Level { base, gens, gen_inv, tree: FxHashMap::default(), orbit: Vec::new() };
        Self::rebuild_tree(&self.act, &mut lvl);
        lvl
    }

    fn rebuild_tree(act: &A, lvl: &mut Level<A::Elem>) {
        lvl.tree.clear();
        lvl.orbit.clear();
        lvl.tree.insert(lvl.base, ROOT);
        lvl.orbit.push(lvl.base);
        let mut i = 0;
        while i < lvl.orbit.len() {
            let y = lvl.orbit[i];
            i += 1;
            for (k, g) in lvl.gens.iter().enumerate() {
                let z = act.image(g, y);
                if let std::collections::hash_map::Entry::Vacant(e) = lvl.tree.entry(z) {
                    e.insert(k as u32);
                    lvl.orbit.push(z);
                }
            }
        }
    }

    fn add_level_gen(&mut self, l: usize, g: A::Elem) {
        let inv = self.act.inv(&g);
        let lvl = &mut self.levels[l];
        lvl.gens.push(g);
        lvl.gen_inv.push(inv);
        Self::rebuild_tree(&self.act, lvl);
    }

    /// Adds the sift residue `y` (which fixes base points `0..j`) as a strong
    /// generator on levels `from..=j`, opening a new level if needed.
    fn install(&mut self, y: A::Elem, from: usize, j: usize) {
        if j == self.levels.len() {
            let moved = (0..self.act.degree()).find(|&x| self.act.image(&y, x) != x).expect("residue is not the identity");
            let lvl = self.make_level(moved, Vec::new());
            self.levels.push(lvl);
        }
        if from == 0 {
            self.gens.push(y.clone());
        }
        for l in from..=j {
            self.add_level_gen(l, y.clone());
        }
    }

    /// `u_x`, the coset representative carrying the level base point to `x`.
    pub fn coset_rep(&self, l: usize, x: usize) -> Option<A::Elem> {
        let lvl = &self.levels[l];
        let mut labels = Vec::new();
        let mut y = x;
        loop {
            let &k = lvl.tree.get(&y)?;
            if k == ROOT {
                break;
            }
            labels.push(k as usize);
            y = self.act.image(&lvl.gen_inv[k as usize], y);
        }
        let mut u = self.act.identity();
        for &k in labels.iter().rev() {
            u = self.act.mul(&u, &lvl.gens[k]);
        }
        Some(u)
    }

    /// `h * u_x^-1` where `x` is in the orbit of level `l`.
    fn strip(&self, l: usize, mut h: A::Elem, mut x: usize) -> A::Elem {
        let lvl = &self.levels[l];
        loop {
            let k = lvl.tree[&x];
            if k == ROOT {
                return h;
            }
            let k = k as usize;
            h = self.act.mul(&h, &lvl.gen_inv[k]);
            x = self.act.image(&lvl.gen_inv[k], x);
        }
    }

    /// Sifts `g` through levels `from..`. Returns the residue and the level
    /// where sifting stopped (`len()` when all levels were passed).
    pub fn sift(&self, g: &A::Elem, from: usize) -> (A::Elem, usize) {
        let mut h = g.clone();
        for l in from..self.levels.len() {
            let x = self.act.image(&h, self.levels[l].base);
            if !self.levels[l].contains(x) {
                return (h, l);
            }
            h = self.strip(l, h, x);
        }
        (h, self.levels.len())
    }

    fn complete(&mut self, observer: &mut dyn FnMut(&A::Elem)) {
        let mut i = self.levels.len() as isize - 1;
        'outer: while i >= 0 {
            let l = i as usize;
            let orbit = self.levels[l].orbit.clone();
            let ngens = self.levels[l].gens.len();
            for &x in &orbit {
                let ux = self.coset_rep(l, x).expect("orbit point");
                for k in 0..ngens {
                    let s = &self.levels[l].gens[k];
                    let xs = self.act.image(s, x);
                    let h = self.strip(l, self.act.mul(&ux, s), xs);
                    let (y, j) = self.sift(&h, l + 1);
                    if self.act.is_identity(&y) && j == self.levels.len() {
                        observer(&y);
                    } else {
                        self.install(y, l + 1, j);
                        i = j as isize;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    /// Adds a generator to an already complete chain and re-completes it.
    pub fn extend(&mut self, g: &A::Elem) -> bool {
        if self.contains(g) {
            return false;
        }
        let (y, j) = self.sift(g, 0);
        // y differs from g by an element of the group, so <gens, g> = <gens, y>.
        self.gens.push(g.clone());
        let _ = y;
        if j == self.levels.len() {
            let moved = (0..self.act.degree()).find(|&x| self.act.image(g, x) != x).expect("non-identity");
            let lvl = self.make_level(moved, Vec::new());
            self.levels.push(lvl);
        }
        // g must be added to every level whose base points it fixes.
        let mut top = 0;
        while top < self.levels.len() && self.levels[..top].iter().all(|lv| self.act.image(g, lv.base) == lv.base) {
            top += 1;
        }
        for l in 0..top {
            self.add_level_gen(l, g.clone());
        }
        self.complete(&mut |_| {});
        true
    }

    pub fn action(&self) -> &A {
        &self.act
    }

    pub fn generators(&self) -> &[A::Elem] {
        &self.gens
    }

    pub fn levels(&self) -> &[Level<A::Elem>] {
        &self.levels
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// All strong generators, without repetition.
    pub fn strong_generators(&self) -> Vec<A::Elem> {
        let mut out: Vec<A::Elem> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &A::Elem) -> bool {
        let (y, j) = self.sift(g, 0);
        j == self.levels.len() && self.act.is_identity(&y)
    }

    /// Orbit of a point under the whole group.
    pub fn orbit_of(&self, x: usize) -> Vec<usize> {
        crate::orbit::orbit(&self.act, &self.gens, x)
    }

    /// A chain for the same group whose base starts with `prefix`.
    pub fn with_base<R: Rng>(&self, prefix: &[usize], rng: &mut R) -> Self {
        let mut pre: Vec<usize> = prefix.to_vec();
        for b in self.base() {
            if !pre.contains(&b) {
                pre.push(b);
            }
        }
        let strong = self.strong_generators();
        let mut c = StabChain::new_random(self.act.clone(), &strong, &pre, rng, Some(self.order()));
        c.gens = self.gens.clone();
        c
    }

    /// An element carrying the first `images.len()` base points to `images`,
    /// if the group has one.
    pub fn element_mapping_base(&self, images: &[usize]) -> Option<A::Elem> {
        if images.len() > self.levels.len() {
            return None;
        }
        let mut targets = images.to_vec();
        let mut g = self.act.identity();
        for l in 0..images.len() {
            let u = self.coset_rep(l, targets[l])?;
            let u_inv = self.act.inv(&u);
            for t in targets[l + 1..].iter_mut() {
                *t = self.act.image(&u_inv, *t);
            }
            g = self.act.mul(&u, &g);
        }
        Some(g)
    }

    /// Generators of the pointwise stabilizer of `points` (in order) and its order.
    pub fn pointwise_stabilizer<R: Rng>(&self, points: &[usize], rng: &mut R) -> (Vec<A::Elem>, u128) {
        let c = self.with_base(points, rng);
        let k = points.len();
        let gens = if k < c.levels.len() { c.levels[k].gens.clone() } else { Vec::new() };
        let order = c.levels[k.min(c.levels.len())..].iter().map(|l| l.orbit.len() as u128).product();
        (gens, order)
    }

    /// Uniformly random group element (product of random coset representatives).
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> A::Elem {
        let mut g = self.act.identity();
        for l in (0..self.levels.len()).rev() {
            let orb = &self.levels[l].orbit;
            let x = orb[rng.gen_range(0..orb.len())];
            let u = self.coset_rep(l, x).expect("orbit point");
            g = self.act.mul(&g, &u);
        }
        g
    }
}

/// Product-replacement generator of pseudo-random group elements.
struct ProductReplacement<E> {
    state: Vec<E>,
    acc: E,
}

impl<E: Clone> ProductReplacement<E> {
    fn new<A: Action<Elem = E>, R: Rng>(act: &A, gens: &[E], rng: &mut R) -> Self {
        let n = gens.len().max(10);
        let state: Vec<E> = (0..n).map(|i| gens[i % gens.len()].clone()).collect();
        let mut pr = ProductReplacement { state, acc: act.identity() };
        for _ in 0..60 {
            pr.next(act, rng);
        }
        pr
    }

    fn next<A: Action<Elem = E>, R: Rng>(&mut self, act: &A, rng: &mut R) -> E {
        let n = self.state.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let sj = if rng.gen_bool(0.5) { self.state[j].clone() } else { act.inv(&self.state[j]) };
        self.state[i] = if rng.gen_bool(0.5) { act.mul(&self.state[i], &sj) } else { act.mul(&sj, &self.state[i]) };
        self.acc = act.mul(&self.acc, &self.state[i]);
        self.acc.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Perm, PermAction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(n: usize) -> (PermAction, Vec<Perm>) {
        let act = PermAction::new(n);
        let cyc: Vec<u32> = (0..n as u32).collect();
        (act, vec![Perm::from_cycles(n, &[&[0, 1]]), Perm::from_cycles(n, &[&cyc])])
    }

    #[test]
    fn order_of_cyclic_of_order_two() {
        let act = PermAction::new(2);
        let c = StabChain::new(act, &[Perm::from_cycles(2, &[&[0, 1]])], &[]);
        assert_eq!(c.order(), 2);
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 2..8 {
            let (act, gens) = sym(n);
            let c = StabChain::new(act, &gens, &[]);
            assert_eq!(c.order(), (1..=n as u128).product::<u128>());
        }
    }

    #[test]
    fn random_then_verify_matches_deterministic() {
        let (act, gens) = sym(9);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = StabChain::new_random(act.clone(), &gens, &[], &mut rng, None);
        assert_eq!(c.order(), 362880);
        let d = StabChain::new_random(act, &gens, &[], &mut rng, Some(362880));
        assert_eq!(d.order(), 362880);
    }

    #[test]
    fn membership() {
        let act = PermAction::new(6);
        // Alt(6) inside Sym(6)
        let a = Perm::from_cycles(6, &[&[0, 1, 2]]);
        let b = Perm::from_cycles(6, &[&[1, 2, 3, 4, 5]]);
        let c = StabChain::new(act, &[a, b], &[]);
        assert_eq!(c.order(), 360);
        assert!(c.contains(&Perm::from_cycles(6, &[&[0, 1], &[2, 3]])));
        assert!(!c.contains(&Perm::from_cycles(6, &[&[0, 1]])));
    }

    #[test]
    fn extend_grows_group() {
        let act = PermAction::new(5);
        let mut c = StabChain::new(act, &[Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])], &[]);
        assert_eq!(c.order(), 5);
        assert!(c.extend(&Perm::from_cycles(5, &[&[1, 4], &[2, 3]])));
        assert_eq!(c.order(), 10);
        assert!(!c.extend(&Perm::from_cycles(5, &[&[1, 4], &[2, 3]])));
        assert!(c.extend(&Perm::from_cycles(5, &[&[0, 1]])));
        assert_eq!(c.order(), 120);
    }

    #[test]
    fn stabilizer_orders() {
        let (act, gens) = sym(6);
        let c = StabChain::new(act, &gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (g, o) = c.pointwise_stabilizer(&[3, 5], &mut rng);
        assert_eq!(o, 24);
        assert!(g.iter().all(|x| x.apply(3) == 3 && x.apply(5) == 5));
    }

    #[test]
    fn random_elements_are_members() {
        let (act, gens) = sym(7);
        let c = StabChain::new(act, &gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = c.random_element(&mut rng);
            assert!(c.contains(&g));
        }
    }

    #[test]
    fn maps_base_prefix() {
        let (act, gens) = sym(6);
        let c = StabChain::new(act.clone(), &gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = c.with_base(&[4, 1, 2], &mut rng);
        let g = d.element_mapping_base(&[0, 5, 3]).unwrap();
        assert_eq!((g.apply(4), g.apply(1), g.apply(2)), (0, 5, 3));
        // Alt(4) on {0..3} cannot send (0, 1, 2) to (1, 0, 2) with 3 fixed.
        let a = StabChain::new(
            PermAction::new(4),
            &[Perm::from_cycles(4, &[&[0, 1, 2]]), Perm::from_cycles(4, &[&[1, 2, 3]])],
            &[0, 1, 2],
        );
        assert!(a.element_mapping_base(&[1, 0, 2]).is_none());
        assert!(a.element_mapping_base(&[1, 2, 0]).is_some());
    }
}
