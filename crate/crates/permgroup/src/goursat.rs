//! Subgroups of small index in a direct product `A x B` of permutation groups.
//!
//! By Goursat's lemma every subgroup `H <= A x B` is the fibre product
//! `{(a, b) in A1 x B1 : phi(a) = psi(b)}` of surjections `phi: A1 -> Q`,
//! `psi: B1 -> Q` onto a common group, with `A1`, `B1` the projections of
//! `H`; its index is `|A : A1| |B : B1| |Q|`. Subgroups of index `e` in a
//! factor are point stabilizers of transitive homomorphisms into `Sym(e)`,
//! and the quotient maps are homomorphisms into `Sym(m)` with regular image.
//! Homomorphisms are found by assigning images to a small generating set and
//! testing that the diagonal subgroup has the order of its first projection.

use rand::Rng;

use crate::action::{Action, Perm, PermAction};
use crate::chain::StabChain;
use crate::orbit::orbit;

/// A permutation group with its chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub chain: StabChain<PermAction>,
}

impl PermGroup {
    pub fn new<R: Rng>(degree: usize, gens: &[Perm], rng: &mut R) -> PermGroup {
        PermGroup { chain: StabChain::new_random(PermAction::new(degree), gens, &[], rng, None) }
    }

    pub fn degree(&self) -> usize {
        self.chain.action().degree()
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn gens(&self) -> &[Perm] {
        self.chain.generators()
    }

    /// Same order and mutual containment of generators.
    pub fn same_as(&self, other: &PermGroup) -> bool {
        self.order() == other.order() && other.gens().iter().all(|g| self.chain.contains(g))
    }

    pub fn conjugate_by(&self, x: &Perm) -> Vec<Perm> {
        let act = self.chain.action();
        self.gens().iter().map(|g| act.conjugate(g, x)).collect()
    }
}

/// `a` on `0..deg(a)` and `b` shifted to `deg(a)..`.
pub fn concat(a: &Perm, b: &Perm) -> Perm {
    let n = a.degree() as u32;
    Perm(a.0.iter().copied().chain(b.0.iter().map(|&x| x + n)).collect())
}

/// The first `n` points of a permutation preserving `0..n`.
pub fn restrict(p: &Perm, n: usize) -> Perm {
    Perm(p.0[..n].to_vec())
}

/// A few random elements generating the group, so that homomorphism
/// searches range over few generator images.
pub fn small_generating_set<R: Rng>(g: &PermGroup, rng: &mut R) -> Vec<Perm> {
    if g.order() == 1 {
        return Vec::new();
    }
    let mut gens: Vec<Perm> = Vec::new();
    loop {
        gens.push(g.chain.random_element(rng));
        let h = StabChain::new_random(PermAction::new(g.degree()), &gens, &[], rng, Some(g.order()));
        if h.order() == g.order() {
            return gens;
        }
        if gens.len() > 4 {
            gens.clear();
        }
    }
}

/// All elements of the group generated by `gens` on `0..n` (small groups only).
pub fn elements(n: usize, gens: &[Perm]) -> Vec<Perm> {
    let act = PermAction::new(n);
    let mut out = vec![act.identity()];
    let mut i = 0;
    while i < out.len() {
        for s in gens {
            let y = act.mul(&out[i], s);
            if !out.contains(&y) {
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// Homomorphism `X -> Sym(t)` given by the images of generators of `X`.
#[derive(Clone, Debug)]
pub struct Hom {
    pub images: Vec<Perm>,
    /// Chain of the diagonal subgroup of `X x Sym(t)` on `deg X + t` points,
    /// with base starting at the `t` target points.
    diagonal: StabChain<PermAction>,
    domain_degree: usize,
}

impl Hom {
    /// Order of the image.
    pub fn image_order(&self, t: usize) -> usize {
        elements(t, &self.images).len()
    }

    /// Generators of the preimage of the stabilizer of target point 0.
    pub fn point_stabilizer(&self) -> Vec<Perm> {
        let lv = self.diagonal.levels();
        if lv.len() <= 1 {
            return Vec::new();
        }
        lv[1].gens.iter().map(|g| restrict(g, self.domain_degree)).collect()
    }

    /// Generators of the kernel.
    pub fn kernel(&self, t: usize) -> Vec<Perm> {
        let lv = self.diagonal.levels();
        if lv.len() <= t {
            return Vec::new();
        }
        lv[t].gens.iter().map(|g| restrict(g, self.domain_degree)).collect()
    }
}

fn divides_order(act: &PermAction, x: &Perm, target: &Perm, tact: &PermAction) -> bool {
    act.order_of(x).is_multiple_of(tact.order_of(target))
}

/// Short words in the generators used to reject assignments cheaply.
fn test_words(k: usize) -> Vec<Vec<(usize, bool)>> {
    let mut w: Vec<Vec<(usize, bool)>> = (0..k).map(|i| vec![(i, false)]).collect();
    for i in 0..k {
        for j in 0..k {
            if i != j {
                w.push(vec![(i, false), (j, false)]);
                w.push(vec![(i, false), (j, true)]);
                w.push(vec![(i, false), (i, false), (j, false)]);
                w.push(vec![(i, true), (j, true), (i, false), (j, false)]);
            }
        }
    }
    w
}

fn eval(act: &PermAction, gens: &[Perm], w: &[(usize, bool)]) -> Perm {
    w.iter().fold(act.identity(), |acc, &(i, inv)| {
        let g = if inv { act.inv(&gens[i]) } else { gens[i].clone() };
        act.mul(&acc, &g)
    })
}

/// Every homomorphism from `X = <gens>` (of order `order`) into the group
/// with element list `target` on `t` points, filtered by `keep` on the
/// image tuple. Assignments are tried exhaustively.
pub fn homomorphisms<R: Rng>(
    degree: usize,
    gens: &[Perm],
    order: u128,
    t: usize,
    target: &[Perm],
    keep: &dyn Fn(&[Perm]) -> bool,
    rng: &mut R,
) -> Vec<Hom> {
    let act = PermAction::new(degree);
    let tact = PermAction::new(t);
    let words = test_words(gens.len());
    let word_vals: Vec<Perm> = words.iter().map(|w| eval(&act, gens, w)).collect();
    let k = gens.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    let total = target.len().pow(k as u32);
    let prefix: Vec<usize> = (degree..degree + t).collect();
    for _ in 0..total {
        let images: Vec<Perm> = idx.iter().map(|&i| target[i].clone()).collect();
        let plausible = words
            .iter()
            .zip(&word_vals)
            .all(|(w, x)| divides_order(&act, x, &eval(&tact, &images, w), &tact));
        if plausible && keep(&images) {
            let diag: Vec<Perm> = gens.iter().zip(&images).map(|(g, s)| concat(g, s)).collect();
            let chain = StabChain::new_random(PermAction::new(degree + t), &diag, &prefix, rng, None);
            if chain.order() == order {
                out.push(Hom { images, diagonal: chain, domain_degree: degree });
            }
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < target.len() {
                break;
            }
            *slot = 0;
        }
    }
    out
}

/// `Sym(t)` as an element list.
pub fn symmetric_group(t: usize) -> Vec<Perm> {
    if t <= 1 {
        return vec![Perm::identity(t)];
    }
    let cycle = Perm((0..t as u32).map(|i| (i + 1) % t as u32).collect());
    let mut swap: Vec<u32> = (0..t as u32).collect();
    swap.swap(0, 1);
    elements(t, &[cycle, Perm(swap)])
}

fn dedup(groups: Vec<PermGroup>) -> Vec<PermGroup> {
    let mut out: Vec<PermGroup> = Vec::new();
    for g in groups {
        if !out.iter().any(|h| h.same_as(&g)) {
            out.push(g);
        }
    }
    out
}

/// All subgroups of index `e` in `g`, as stabilizers of transitive actions
/// on `e` points.
pub fn subgroups_of_index<R: Rng>(g: &PermGroup, e: usize, rng: &mut R) -> Vec<PermGroup> {
    if e == 1 {
        return vec![g.clone()];
    }
    let gens = small_generating_set(g, rng);
    let sym = symmetric_group(e);
    let transitive = |imgs: &[Perm]| orbit(&PermAction::new(e), imgs, 0).len() == e;
    let homs = homomorphisms(g.degree(), &gens, g.order(), e, &sym, &transitive, rng);
    let subs = homs.iter().map(|h| PermGroup::new(g.degree(), &h.point_stabilizer(), rng)).collect();
    dedup(subs).into_iter().filter(|h| h.order() * e as u128 == g.order()).collect()
}

/// Preimages of every image element under `h`, keyed by position in `els`.
fn preimages(degree: usize, gens: &[Perm], h: &Hom, t: usize, els: &[Perm]) -> Vec<Perm> {
    let act = PermAction::new(degree);
    let tact = PermAction::new(t);
    let mut pre: Vec<Option<Perm>> = vec![None; els.len()];
    let id = els.iter().position(|e| tact.is_identity(e)).expect("identity in the image");
    pre[id] = Some(act.identity());
    let mut queue = vec![(act.identity(), tact.identity())];
    let mut i = 0;
    while i < queue.len() {
        let (x, s) = queue[i].clone();
        for (g, si) in gens.iter().zip(&h.images) {
            let y = tact.mul(&s, si);
            let k = els.iter().position(|e| *e == y).expect("image element");
            if pre[k].is_none() {
                let xg = act.mul(&x, g);
                pre[k] = Some(xg.clone());
                queue.push((xg, y));
            }
        }
        i += 1;
    }
    pre.into_iter().map(|p| p.expect("surjective onto its image")).collect()
}

/// All subgroups of index `d` in `A x B`, acting on `deg A + deg B` points.
pub fn product_subgroups_of_index<R: Rng>(a: &PermGroup, b: &PermGroup, d: usize, rng: &mut R) -> Vec<PermGroup> {
    let (na, nb) = (a.degree(), b.degree());
    let n = na + nb;
    let ida = Perm::identity(na);
    let idb = Perm::identity(nb);
    let mut found = Vec::new();
    for ea in (1..=d).filter(|e| d.is_multiple_of(*e)) {
        for eb in (1..=d / ea).filter(|e| (d / ea).is_multiple_of(*e)) {
            let m = d / (ea * eb);
            let a1s = subgroups_of_index(a, ea, rng);
            let b1s = subgroups_of_index(b, eb, rng);
            for a1 in &a1s {
                for b1 in &b1s {
                    if m == 1 {
                        let gens: Vec<Perm> = a1
                            .gens()
                            .iter()
                            .map(|x| concat(x, &idb))
                            .chain(b1.gens().iter().map(|y| concat(&ida, y)))
                            .collect();
                        found.push(PermGroup::new(n, &gens, rng));
                        continue;
                    }
                    let a_gens = small_generating_set(a1, rng);
                    let b_gens = small_generating_set(b1, rng);
                    let phis = regular_quotients(a1, &a_gens, m, rng);
                    let psis = regular_quotients(b1, &b_gens, m, rng);
                    for phi in &phis {
                        let els = elements(m, &phi.images);
                        for psi in &psis {
                            let psi_els = elements(m, &psi.images);
                            if psi_els.len() != els.len() || !psi_els.iter().all(|e| els.contains(e)) {
                                continue;
                            }
                            let pre = preimages(nb, &b_gens, psi, m, &els);
                            let mut gens: Vec<Perm> = a_gens
                                .iter()
                                .zip(&phi.images)
                                .map(|(x, s)| {
                                    let k = els.iter().position(|e| e == s).expect("image element");
                                    concat(x, &pre[k])
                                })
                                .collect();
                            gens.extend(psi.kernel(m).iter().map(|y| concat(&ida, y)));
                            found.push(PermGroup::new(n, &gens, rng));
                        }
                    }
                }
            }
        }
    }
    let total = a.order() * b.order();
    dedup(found).into_iter().filter(|h| h.order() * d as u128 == total).collect()
}

/// Surjections of `g = <gens>` onto groups of order `m`, as homomorphisms
/// into `Sym(m)` with regular image.
fn regular_quotients<R: Rng>(g: &PermGroup, gens: &[Perm], m: usize, rng: &mut R) -> Vec<Hom> {
    let sym = symmetric_group(m);
    let regular = |imgs: &[Perm]| {
        let els = elements(m, imgs);
        els.len() == m && orbit(&PermAction::new(m), imgs, 0).len() == m
    };
    homomorphisms(g.degree(), gens, g.order(), m, &sym, &regular, rng)
}

/// Partition of `subs` into classes under conjugation by `ambient_gens`.
/// Every conjugate of a member must again be a member.
pub fn conjugacy_classes(subs: &[PermGroup], ambient_gens: &[Perm]) -> Option<Vec<Vec<usize>>> {
    let n = subs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for x in ambient_gens {
            let conj = subs[i].conjugate_by(x);
            let j = (0..n).find(|&j| subs[j].order() == subs[i].order() && conj.iter().all(|g| subs[j].chain.contains(g)))?;
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(c) => classes[c].push(i),
            None => {
                root_of[r] = Some(classes.len());
                classes.push(vec![i]);
            }
        }
    }
    Some(classes)
}
