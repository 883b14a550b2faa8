//! Isometry groups of definite lattices by backtracking over short vectors,
//! centralizers of elements, and the induced action on discriminant forms.
//!
//! The group acts faithfully on a spanning, invariant set of short vectors
//! (the smallest spanning union of norm shells). A base of linearly
//! independent points determines every isometry; candidate images are
//! filtered by a fingerprint (the multiset of inner products with the point
//! set) and by agreement of inner products with the images already chosen.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use permgroup::backtrack::{self, Search};
use permgroup::{Action, Perm, PermAction, StabChain};
use rustc_hash::FxHashMap;

use crate::error::CoreError;
use crate::fqm::{FqGroup, FqMap, FqModule, ModAction};
use crate::lattice::{short_vector_coords, Isometry, Lattice};
use crate::linalg::{inverse, rank, rat, to_int, IntMatrix, RatMatrix};

/// Short vectors of a lattice on which its isometry group acts faithfully.
#[derive(Clone, Debug)]
pub struct PointSet {
    /// Basis coordinates, sorted lexicographically.
    pub coords: Vec<Vec<i64>>,
    pub norms: Vec<i64>,
    index: FxHashMap<Vec<i64>, u32>,
    /// Inner products of points with basis vectors: `coords[i] * G`.
    dual_coords: Vec<Vec<i64>>,
}

impl PointSet {
    /// The smallest union of norm shells that spans the lattice.
    pub fn spanning_shells(l: &Lattice) -> PointSet {
        assert!(l.is_integral(), "point sets are built for integral lattices");
        let r = l.rank();
        let mut bound = l.minimum();
        loop {
            let found = short_vector_coords(l.gram(), &bound, None);
            let rows: Vec<Vec<BigRational>> =
                found.iter().map(|(c, _)| c.iter().map(|&x| rat(x, 1)).collect()).collect();
            if !rows.is_empty() && rank(&RatMatrix::from_rows(rows)) == r {
                let mut pts: Vec<(Vec<i64>, i64)> =
                    found.into_iter().map(|(c, n)| (c, n.to_integer().to_i64().expect("small norm"))).collect();
                pts.sort();
                return PointSet::new(l, pts);
            }
            bound += rat(1, 1);
        }
    }

    fn new(l: &Lattice, pts: Vec<(Vec<i64>, i64)>) -> PointSet {
        let gram = gram_i64(l);
        let (coords, norms): (Vec<Vec<i64>>, Vec<i64>) = pts.into_iter().unzip();
        let index = coords.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect();
        let dual_coords = coords.iter().map(|c| vec_mat(c, &gram)).collect();
        PointSet { coords, norms, index, dual_coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn position(&self, c: &[i64]) -> Option<usize> {
        self.index.get(c).map(|&i| i as usize)
    }

    pub fn inner(&self, i: usize, j: usize) -> i64 {
        self.dual_coords[i].iter().zip(&self.coords[j]).map(|(a, b)| a * b).sum()
    }

    /// The permutation induced by an integer matrix (row convention), if it
    /// maps the point set to itself.
    pub fn perm_of(&self, m: &[Vec<i64>]) -> Option<Perm> {
        let images: Option<Vec<u32>> =
            self.coords.iter().map(|c| self.position(&vec_mat(c, m)).map(|i| i as u32)).collect();
        Perm::from_images(images?)
    }
}

fn gram_i64(l: &Lattice) -> Vec<Vec<i64>> {
    let g = l.gram();
    (0..g.rows()).map(|i| g.row(i).iter().map(|x| x.to_integer().to_i64().expect("small gram entry")).collect()).collect()
}

fn vec_mat(c: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0i64; cols];
    for (ci, row) in c.iter().zip(m) {
        if *ci != 0 {
            for (o, x) in out.iter_mut().zip(row) {
                *o += ci * x;
            }
        }
    }
    out
}

fn mat_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_i64().expect("small matrix entry")).collect()).collect()
}

/// A group of isometries with its faithful permutation representation.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub lattice: Lattice,
    pub points: Arc<PointSet>,
    /// Indices of points forming a rational basis.
    pub base: Vec<usize>,
    base_inv: RatMatrix,
    pub chain: StabChain<PermAction>,
}

impl MatrixGroup {
    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn perm_generators(&self) -> &[Perm] {
        self.chain.generators()
    }

    /// Matrices of the generators.
    pub fn generators(&self) -> Vec<Isometry> {
        self.perm_generators().iter().map(|p| self.matrix_of(p)).collect()
    }

    /// The isometry realizing a permutation of the point set.
    pub fn matrix_of(&self, p: &Perm) -> Isometry {
        let images: Vec<Vec<BigRational>> =
            self.base.iter().map(|&b| self.points.coords[p.apply(b)].iter().map(|&x| rat(x, 1)).collect()).collect();
        let m = self.base_inv.mul(&RatMatrix::from_rows(images));
        Isometry { mat: to_int(&m).expect("group elements are integral") }
    }

    pub fn perm_of(&self, g: &Isometry) -> Option<Perm> {
        self.points.perm_of(&mat_i64(&g.mat))
    }

    pub fn contains(&self, g: &Isometry) -> bool {
        self.perm_of(g).is_some_and(|p| self.chain.contains(&p))
    }

    /// The group generated by isometries of `l`, e.g. generators read back
    /// from a cache.
    pub fn from_generators(l: &Lattice, gens: &[Isometry]) -> Result<MatrixGroup, CoreError> {
        let points = Arc::new(PointSet::spanning_shells(l));
        let (base, base_inv) = base_of(&points, l.rank());
        let perms = gens
            .iter()
            .map(|g| points.perm_of(&mat_i64(&g.mat)))
            .collect::<Option<Vec<Perm>>>()
            .ok_or_else(|| CoreError::NotIsometry("generator does not permute the short vectors".into()))?;
        let chain = StabChain::new(PermAction::new(points.len()), &perms, &base);
        Ok(MatrixGroup { lattice: l.clone(), points, base, base_inv, chain })
    }

    fn with_generators(&self, gens: &[Perm]) -> MatrixGroup {
        let act = PermAction::new(self.points.len());
        let chain = StabChain::new(act, gens, &self.base);
        MatrixGroup { chain, ..self.clone() }
    }
}

struct AutSearch<'a> {
    act: PermAction,
    points: &'a PointSet,
    base: Vec<usize>,
    base_inv: RatMatrix,
    cands: Vec<Vec<usize>>,
}

impl Search for AutSearch<'_> {
    type A = PermAction;

    fn action(&self) -> &PermAction {
        &self.act
    }
    fn base(&self) -> Vec<usize> {
        self.base.clone()
    }
    fn candidates(&self, level: usize) -> Vec<usize> {
        self.cands[level].clone()
    }
    fn compatible(&self, i: usize, xi: usize, j: usize, xj: usize) -> bool {
        xi != xj && self.points.inner(xi, xj) == self.points.inner(self.base[i], self.base[j])
    }
    fn complete(&self, images: &[usize]) -> Option<Perm> {
        let rows: Vec<Vec<BigRational>> =
            images.iter().map(|&x| self.points.coords[x].iter().map(|&v| rat(v, 1)).collect()).collect();
        // Inner products of the base images agree with those of the base, so
        // M = B^-1 B' is an isometry of the rational span; it remains to see
        // that it is integral and permutes the points.
        let m = to_int(&self.base_inv.mul(&RatMatrix::from_rows(rows)))?;
        self.points.perm_of(&mat_i64(&m))
    }
}

/// Sorted inner-product histogram of each point against the whole set.
fn fingerprints(points: &PointSet) -> Vec<Vec<(i64, u32)>> {
    (0..points.len())
        .map(|i| {
            let mut h: FxHashMap<i64, u32> = FxHashMap::default();
            for j in 0..points.len() {
                *h.entry(points.inner(i, j)).or_default() += 1;
            }
            let mut v: Vec<(i64, u32)> = h.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// Greedy choice of linearly independent points, preferring points with a
/// nonzero inner product with the previous choice (this keeps the pairwise
/// filter effective).
fn choose_base(points: &PointSet, r: usize) -> Vec<usize> {
    let mut base: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let independent = |rows: &Vec<Vec<BigRational>>, i: usize| {
        let mut t = rows.clone();
        t.push(points.coords[i].iter().map(|&x| rat(x, 1)).collect());
        rank(&RatMatrix::from_rows(t)) == rows.len() + 1
    };
    while base.len() < r {
        let last = base.last().copied();
        let pick = (0..points.len())
            .filter(|&i| last.is_some_and(|b| points.inner(b, i) != 0))
            .find(|&i| independent(&rows, i))
            .or_else(|| (0..points.len()).find(|&i| independent(&rows, i)))
            .expect("the point set spans the lattice");
        rows.push(points.coords[pick].iter().map(|&x| rat(x, 1)).collect());
        base.push(pick);
    }
    base
}

fn base_of(points: &PointSet, r: usize) -> (Vec<usize>, RatMatrix) {
    let base = choose_base(points, r);
    let bmat = RatMatrix::from_rows(base.iter().map(|&b| points.coords[b].iter().map(|&x| rat(x, 1)).collect()).collect());
    let base_inv = inverse(&bmat).expect("base points are independent");
    (base, base_inv)
}

/// Both routes to `|O(L)|`.
#[derive(Clone, Debug)]
pub struct AutResult {
    pub group: MatrixGroup,
    /// Product of the backtrack's level indices.
    pub search_order: u128,
    /// Order of an independent Schreier–Sims run on the found generators.
    pub chain_order: u128,
    pub leaves: u64,
}

/// The full isometry group of a positive-definite integral lattice.
pub fn aut_group(l: &Lattice) -> AutResult {
    let points = Arc::new(PointSet::spanning_shells(l));
    let (base, base_inv) = base_of(&points, l.rank());
    let fp = fingerprints(&points);
    let cands = base
        .iter()
        .map(|&b| (0..points.len()).filter(|&x| points.norms[x] == points.norms[b] && fp[x] == fp[b]).collect())
        .collect();
    let act = PermAction::new(points.len());
    let search = AutSearch { act: act.clone(), points: &points, base: base.clone(), base_inv: base_inv.clone(), cands };
    let res = backtrack::search(&search, &[]);
    let chain = StabChain::new(act, &res.gens, &base);
    let chain_order = chain.order();
    AutResult {
        group: MatrixGroup { lattice: l.clone(), points: points.clone(), base, base_inv, chain },
        search_order: res.order,
        chain_order,
        leaves: res.leaves,
    }
}

/// `C_G(g)` together with the conjugacy class of `g` under `G`.
#[derive(Clone, Debug)]
pub struct Centralizer {
    pub group: MatrixGroup,
    pub class_size: usize,
}

/// Centralizer by orbit-stabilizer on the conjugation orbit of `g`.
pub fn centralizer(g_group: &MatrixGroup, g: &Isometry) -> Result<Centralizer, CoreError> {
    let gp = g_group.perm_of(g).ok_or_else(|| CoreError::NotIsometry("element does not permute the point set".into()))?;
    if !g_group.chain.contains(&gp) {
        return Err(CoreError::NotIsometry("element is not in the group".into()));
    }
    let act = g_group.chain.action().clone();
    let gens = g_group.perm_generators().to_vec();
    // Orbit of gp under x -> s^-1 x s, with transversal u_x: gp^{u_x} = x.
    let mut orbit: Vec<Perm> = vec![gp.clone()];
    let mut trans: Vec<Perm> = vec![act.identity()];
    let mut pos: FxHashMap<Perm, usize> = FxHashMap::default();
    pos.insert(gp.clone(), 0);
    let mut schreier: Vec<Perm> = Vec::new();
    let mut i = 0;
    while i < orbit.len() {
        for s in &gens {
            let y = act.conjugate(&orbit[i], s);
            let us = act.mul(&trans[i], s);
            match pos.get(&y) {
                Some(&j) => schreier.push(act.mul(&us, &act.inv(&trans[j]))),
                None => {
                    pos.insert(y.clone(), orbit.len());
                    orbit.push(y);
                    trans.push(us);
                }
            }
        }
        i += 1;
    }
    schreier.retain(|p| !act.is_identity(p));
    schreier.sort_by(|a, b| a.0.cmp(&b.0));
    schreier.dedup();
    let group = g_group.with_generators(&schreier);
    debug_assert!(schreier.iter().all(|c| act.mul(&gp, c) == act.mul(c, &gp)));
    Ok(Centralizer { group, class_size: orbit.len() })
}

/// Image of a group of isometries in `O(D(L))`, with the kernel order.
#[derive(Clone, Debug)]
pub struct DiscriminantAction {
    pub module: Arc<FqModule>,
    pub maps: Vec<FqMap>,
    pub image: FqGroup,
    pub kernel_order: u128,
}

pub fn discriminant_action(g: &MatrixGroup, l: &Lattice, seed: u64) -> Result<DiscriminantAction, CoreError> {
    use rand::SeedableRng;
    let disc = l.discriminant()?;
    let module = Arc::new(disc.module.clone());
    let maps: Vec<FqMap> = g.generators().iter().map(|m| disc.induced_map(m)).collect();
    for (k, f) in maps.iter().enumerate() {
        if !f.is_orthogonal(&module) {
            return Err(CoreError::NotOrthogonal(format!("induced map of generator {k}")));
        }
    }
    let act = ModAction::new(module.clone());
    let base: Vec<usize> = (0..module.rank()).map(|i| module.gen(i)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let chain = StabChain::new_random(act.clone(), &maps, &base, &mut rng, None);
    let kernel_order = g.order() / chain.order();
    Ok(DiscriminantAction { module, maps, image: FqGroup { action: act, chain }, kernel_order })
}

/// Whether `x` acts trivially on `L*/L`.
pub fn acts_trivially_on_discriminant(l: &Lattice, g: &Isometry) -> Result<bool, CoreError> {
    let disc = l.discriminant()?;
    let f = disc.induced_map(g);
    Ok(f == FqMap::identity(&disc.module))
}

/// Counts isometries of a small lattice by testing every assignment of
/// short vectors to the basis vectors. Exponential; for tiny ranks only.
pub fn count_isometries_brute_force(l: &Lattice) -> u64 {
    let gram = gram_i64(l);
    let r = l.rank();
    let maxn = (0..r).map(|i| gram[i][i]).max().unwrap_or(0);
    let vecs: Vec<Vec<i64>> = short_vector_coords(l.gram(), &rat(maxn, 1), None).into_iter().map(|(c, _)| c).collect();
    let ip = |a: &[i64], b: &[i64]| -> i64 { vec_mat(a, &gram).iter().zip(b).map(|(x, y)| x * y).sum() };
    fn rec(
        k: usize,
        r: usize,
        vecs: &[Vec<i64>],
        gram: &[Vec<i64>],
        chosen: &mut Vec<usize>,
        ip: &dyn Fn(&[i64], &[i64]) -> i64,
        count: &mut u64,
    ) {
        if k == r {
            let m: Vec<Vec<i64>> = chosen.iter().map(|&i| vecs[i].clone()).collect();
            let det = crate::linalg::det_int(&IntMatrix::from_rows(
                m.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            ));
            if det == BigInt::from(1) || det == BigInt::from(-1) {
                *count += 1;
            }
            return;
        }
        for (i, v) in vecs.iter().enumerate() {
            if ip(v, v) != gram[k][k] || (0..k).any(|j| ip(&vecs[chosen[j]], v) != gram[j][k]) {
                continue;
            }
            chosen.push(i);
            rec(k + 1, r, vecs, gram, chosen, ip, count);
            chosen.pop();
        }
    }
    let mut count = 0;
    rec(0, r, &vecs, &gram, &mut Vec::new(), &ip, &mut count);
    count
}

/// `-1` on `L`.
pub fn minus_identity(r: usize) -> Isometry {
    let mut m = IntMatrix::zeros(r, r);
    for i in 0..r {
        m[(i, i)] = BigInt::from(-1);
    }
    Isometry { mat: m }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::root_lattice_a;

    #[test]
    fn root_lattice_groups_match_brute_force() {
        for k in 2..=5usize {
            let l = root_lattice_a(k);
            let a = aut_group(&l);
            let fact: u128 = (1..=k as u128).product();
            let expected = if k >= 3 { 2 * fact } else { fact };
            assert_eq!(a.search_order, expected, "k={k}");
            assert_eq!(a.chain_order, expected, "k={k}");
            assert_eq!(count_isometries_brute_force(&l) as u128, expected, "k={k}");
            for g in a.group.generators() {
                assert!(l.is_isometry(&g));
            }
        }
    }

    #[test]
    fn a3_has_order_48_and_a1_order_2() {
        assert_eq!(aut_group(&root_lattice_a(4)).chain_order, 48);
        assert_eq!(aut_group(&root_lattice_a(2)).chain_order, 2);
    }

    #[test]
    fn central_element_has_full_centralizer() {
        let l = root_lattice_a(4);
        let a = aut_group(&l);
        let c = centralizer(&a.group, &minus_identity(3)).unwrap();
        assert_eq!(c.class_size, 1);
        assert_eq!(c.group.order(), 48);
    }

    #[test]
    fn coxeter_centralizer_in_a3() {
        // The Coxeter element of A_3 generates its own centralizer in Sym_4,
        // and -1 is central: |C| = 4 * 2 = 8, class size 48 / 8 = 6.
        let l = root_lattice_a(4);
        let a = aut_group(&l);
        let cox = crate::glue::build_block(4).coxeter;
        let c = centralizer(&a.group, &cox).unwrap();
        assert_eq!(c.group.order() * c.class_size as u128, 48);
        assert_eq!(c.group.order(), 8);
    }

    #[test]
    fn minus_one_acts_trivially_on_a1_discriminant() {
        let l = root_lattice_a(2);
        let a = aut_group(&l);
        let d = discriminant_action(&a.group, &l, 0).unwrap();
        assert_eq!(d.kernel_order, 2);
        assert!(acts_trivially_on_discriminant(&l, &minus_identity(1)).unwrap());
    }
}
