//! Finite quadratic modules: a finite abelian group `Z/d_1 + ... + Z/d_r`
//! with a Q/Z-valued quadratic form, their orthogonal groups and the
//! isotropic census sets.
//!
//! Elements are addressed by a mixed-radix index (coefficient of the first
//! generator varies fastest). Values of `q` and `b` are stored as integers
//! modulo `den`, meaning `value / den` in Q/Z.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use permgroup::backtrack::{self, Search};
use permgroup::chain::StabChain;
use permgroup::{orbit, Action};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

#[derive(Clone, Debug)]
pub struct FqModule {
    factors: Vec<u32>,
    den: u32,
    q_gen: Vec<u32>,
    b_gen: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    coef: Vec<u16>,
    q_tab: Vec<u32>,
    ord_tab: Vec<u32>,
    bgen_tab: Vec<u32>,
}

fn lcm_all(xs: &[u32]) -> u32 {
    xs.iter().fold(1u32, |a, &b| a.lcm(&b))
}

/// Reduces a rational modulo 1 to a numerator over `den`; fails if the
/// denominator does not divide `den`.
fn to_units(x: &BigRational, den: u32) -> Option<u32> {
    let scaled = x * BigRational::from_integer(BigInt::from(den));
    if !scaled.is_integer() {
        return None;
    }
    let v = scaled.to_integer().mod_floor(&BigInt::from(den));
    v.to_u32()
}

impl FqModule {
    /// Builds a module from cyclic orders, `q` on generators and the
    /// bilinear form on pairs of generators (rationals taken mod 1).
    pub fn new(factors: Vec<u32>, q_gen: &[BigRational], b_gen: &[Vec<BigRational>]) -> Result<Self, CoreError> {
        let r = factors.len();
        if q_gen.len() != r || b_gen.len() != r || b_gen.iter().any(|row| row.len() != r) {
            return Err(CoreError::Parse("generator data has the wrong shape".into()));
        }
        if factors.iter().any(|&d| d < 2) {
            return Err(CoreError::Parse("cyclic factors must be at least 2".into()));
        }
        let den = 2 * lcm_all(&factors);
        let qs: Option<Vec<u32>> = q_gen.iter().map(|x| to_units(x, den)).collect();
        let bs: Option<Vec<u32>> = b_gen.iter().flatten().map(|x| to_units(x, den)).collect();
        let (Some(qs), Some(bs)) = (qs, bs) else {
            return Err(CoreError::Parse("form values have denominators beyond 2*exponent".into()));
        };
        Self::from_units(factors, den, qs, bs)
    }

    /// Same as [`FqModule::new`] with values already scaled by `den`.
    pub fn from_units(factors: Vec<u32>, den: u32, q_gen: Vec<u32>, b_gen: Vec<u32>) -> Result<Self, CoreError> {
        let r = factors.len();
        let den_needed = 2 * lcm_all(&factors);
        if !den.is_multiple_of(den_needed) {
            return Err(CoreError::Parse(format!("denominator {den} is not a multiple of {den_needed}")));
        }
        // Normalize to the canonical denominator.
        let scale = den / den_needed;
        if q_gen.iter().chain(&b_gen).any(|v| v % scale != 0) {
            return Err(CoreError::Parse("form values have denominators beyond 2*exponent".into()));
        }
        let den = den_needed;
        let q_gen: Vec<u32> = q_gen.iter().map(|v| (v / scale) % den).collect();
        let b_gen: Vec<u32> = b_gen.iter().map(|v| (v / scale) % den).collect();
        for i in 0..r {
            let di = factors[i] as u64;
            if (2 * q_gen[i]) % den != b_gen[i * r + i] {
                return Err(CoreError::Parse(format!("b(e{i},e{i}) differs from 2q(e{i})")));
            }
            if !(di * di * q_gen[i] as u64).is_multiple_of(den as u64) {
                return Err(CoreError::Parse(format!("q is not well defined on generator {i}")));
            }
            for j in 0..r {
                if b_gen[i * r + j] != b_gen[j * r + i] {
                    return Err(CoreError::Parse("bilinear form is not symmetric".into()));
                }
                if !(di * b_gen[i * r + j] as u64).is_multiple_of(den as u64) {
                    return Err(CoreError::Parse(format!("b is not well defined on generators {i},{j}")));
                }
            }
        }
        let mut strides = Vec::with_capacity(r);
        let mut size = 1usize;
        for &d in &factors {
            strides.push(size);
            size *= d as usize;
        }
        let mut m = FqModule {
            factors,
            den,
            q_gen,
            b_gen,
            strides,
            size,
            coef: Vec::new(),
            q_tab: Vec::new(),
            ord_tab: Vec::new(),
            bgen_tab: Vec::new(),
        };
        m.fill_tables();
        Ok(m)
    }

    fn fill_tables(&mut self) {
        let r = self.rank();
        let den = self.den as u64;
        self.coef = vec![0; self.size * r];
        self.q_tab = vec![0; self.size];
        self.ord_tab = vec![0; self.size];
        self.bgen_tab = vec![0; self.size * r];
        for x in 0..self.size {
            let c: Vec<u64> = (0..r).map(|i| ((x / self.strides[i]) % self.factors[i] as usize) as u64).collect();
            let mut q = 0u64;
            let mut ord = 1u64;
            for i in 0..r {
                self.coef[x * r + i] = c[i] as u16;
                q += c[i] * c[i] % den * self.q_gen[i] as u64;
                for j in i + 1..r {
                    q += c[i] * c[j] % den * self.b_gen[i * r + j] as u64;
                }
                let d = self.factors[i] as u64;
                ord = ord.lcm(&(d / d.gcd(&c[i])));
            }
            self.q_tab[x] = (q % den) as u32;
            self.ord_tab[x] = ord as u32;
            for j in 0..r {
                let mut b = 0u64;
                for i in 0..r {
                    b += c[i] * self.b_gen[i * r + j] as u64;
                }
                self.bgen_tab[x * r + j] = (b % den) as u32;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn exponent(&self) -> u32 {
        self.den / 2
    }

    pub fn zero(&self) -> usize {
        0
    }

    /// Index of the `i`-th generator.
    pub fn gen(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn coeffs(&self, x: usize) -> &[u16] {
        let r = self.rank();
        &self.coef[x * r..(x + 1) * r]
    }

    pub fn encode(&self, c: &[i64]) -> usize {
        c.iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|((&ci, &d), &s)| ci.rem_euclid(d as i64) as usize * s)
            .sum()
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (cx, cy) = (self.coeffs(x), self.coeffs(y));
        (0..self.rank())
            .map(|i| ((cx[i] as usize + cy[i] as usize) % self.factors[i] as usize) * self.strides[i])
            .sum()
    }

    pub fn neg(&self, x: usize) -> usize {
        self.scale(x, -1)
    }

    pub fn scale(&self, x: usize, k: i64) -> usize {
        let c = self.coeffs(x);
        (0..self.rank())
            .map(|i| {
                let d = self.factors[i] as i64;
                ((c[i] as i64 * k).rem_euclid(d)) as usize * self.strides[i]
            })
            .sum()
    }

    /// `q(x)` as a numerator over [`FqModule::den`].
    pub fn q(&self, x: usize) -> u32 {
        self.q_tab[x]
    }

    pub fn b(&self, x: usize, y: usize) -> u32 {
        let r = self.rank();
        let cy = self.coeffs(y);
        let row = &self.bgen_tab[x * r..(x + 1) * r];
        let s: u64 = row.iter().zip(cy).map(|(&b, &c)| b as u64 * c as u64).sum();
        (s % self.den as u64) as u32
    }

    pub fn order(&self, x: usize) -> u32 {
        self.ord_tab[x]
    }

    pub fn q_rational(&self, x: usize) -> BigRational {
        BigRational::new(BigInt::from(self.q(x)), BigInt::from(self.den))
    }

    pub fn b_rational(&self, x: usize, y: usize) -> BigRational {
        BigRational::new(BigInt::from(self.b(x, y)), BigInt::from(self.den))
    }

    /// Non-degeneracy of `b`: only 0 pairs trivially with every generator.
    pub fn is_nondegenerate(&self) -> bool {
        let r = self.rank();
        (1..self.size).all(|x| self.bgen_tab[x * r..(x + 1) * r].iter().any(|&v| v != 0))
    }

    /// `{x : q(x) = 0, o(x) = k}`.
    pub fn isotropic_census(&self, k: u32) -> Vec<usize> {
        (0..self.size).filter(|&x| self.q_tab[x] == 0 && self.ord_tab[x] == k).collect()
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &FqModule) -> FqModule {
        let den = self.den.lcm(&other.den);
        let (s1, s2) = (den / self.den, den / other.den);
        let (r1, r2) = (self.rank(), other.rank());
        let r = r1 + r2;
        let mut factors = self.factors.clone();
        factors.extend(&other.factors);
        let mut q: Vec<u32> = self.q_gen.iter().map(|v| v * s1).collect();
        q.extend(other.q_gen.iter().map(|v| v * s2));
        let mut b = vec![0u32; r * r];
        for i in 0..r1 {
            for j in 0..r1 {
                b[i * r + j] = self.b_gen[i * r1 + j] * s1;
            }
        }
        for i in 0..r2 {
            for j in 0..r2 {
                b[(r1 + i) * r + r1 + j] = other.b_gen[i * r2 + j] * s2;
            }
        }
        FqModule::from_units(factors, den, q, b).expect("direct sum of valid modules is valid")
    }

    /// Invariants of the abelian group as a sorted list of prime powers.
    pub fn elementary_divisors(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for &d in &self.factors {
            out.extend(prime_power_parts(d).into_iter().map(|(p, e)| p.pow(e)));
        }
        out.sort_unstable();
        out
    }

    /// Number of elements of each (order, q) pair, sorted.
    pub fn q_census(&self) -> Vec<(u32, u32, usize)> {
        let mut counts: std::collections::BTreeMap<(u32, u32), usize> = Default::default();
        for x in 0..self.size {
            *counts.entry((self.ord_tab[x], self.q_tab[x])).or_default() += 1;
        }
        counts.into_iter().map(|((o, q), n)| (o, q, n)).collect()
    }

    /// The submodule generated by `gens`, as a sorted element list.
    pub fn span(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut out = vec![0usize];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            i += 1;
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// `[(p, e)]` with `n = prod p^e`.
pub fn prime_power_parts(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primary decomposition: `M` rewritten over generators that each have
/// prime-power order, grouped by prime.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition {
    /// The same module on primary-adapted generators.
    pub module: FqModule,
    /// `(p, M_p)` in increasing order of `p`.
    pub parts: Vec<(u32, FqModule)>,
    /// Generator indices of `module` belonging to each part.
    pub part_gens: Vec<Vec<usize>>,
    /// Element of `module` to element of the original module.
    pub to_original: Vec<usize>,
    /// Element of the original module to element of `module`.
    pub from_original: Vec<usize>,
}

pub fn primary_decompose(m: &FqModule) -> PrimaryDecomposition {
    let mut primes: Vec<u32> = m.factors.iter().flat_map(|&d| prime_power_parts(d).into_iter().map(|(p, _)| p)).collect();
    primes.sort_unstable();
    primes.dedup();
    // New generators: for each prime p and each factor d_i with p | d_i, the
    // element (d_i / p^e) e_i of order p^e.
    let mut new_gens: Vec<usize> = Vec::new();
    let mut new_factors: Vec<u32> = Vec::new();
    let mut part_gens: Vec<Vec<usize>> = Vec::new();
    for &p in &primes {
        let mut idxs = Vec::new();
        for (i, &d) in m.factors.iter().enumerate() {
            if let Some(&(_, e)) = prime_power_parts(d).iter().find(|(q, _)| *q == p) {
                let pe = p.pow(e);
                idxs.push(new_gens.len());
                new_gens.push(m.scale(m.gen(i), (d / pe) as i64));
                new_factors.push(pe);
            }
        }
        part_gens.push(idxs);
    }
    let r = new_gens.len();
    let den = m.den;
    let q: Vec<u32> = new_gens.iter().map(|&g| m.q(g)).collect();
    let mut b = vec![0u32; r * r];
    for i in 0..r {
        for j in 0..r {
            b[i * r + j] = m.b(new_gens[i], new_gens[j]);
        }
    }
    let module = FqModule::from_units(new_factors.clone(), den, q, b).expect("primary generators are consistent");
    let mut to_original = vec![0usize; module.size];
    for (x, slot) in to_original.iter_mut().enumerate() {
        let c = module.coeffs(x);
        let mut acc = 0;
        for (k, &ck) in c.iter().enumerate() {
            acc = m.add(acc, m.scale(new_gens[k], ck as i64));
        }
        *slot = acc;
    }
    let mut from_original = vec![usize::MAX; m.size];
    for (x, &y) in to_original.iter().enumerate() {
        from_original[y] = x;
    }
    assert!(from_original.iter().all(|&x| x != usize::MAX), "primary generators span the module");
    let parts = primes
        .iter()
        .zip(&part_gens)
        .map(|(&p, idxs)| {
            let f: Vec<u32> = idxs.iter().map(|&i| new_factors[i]).collect();
            let q: Vec<u32> = idxs.iter().map(|&i| module.q_gen[i]).collect();
            let k = idxs.len();
            let mut bb = vec![0u32; k * k];
            for (a, &i) in idxs.iter().enumerate() {
                for (c, &j) in idxs.iter().enumerate() {
                    bb[a * k + c] = module.b_gen[i * r + j];
                }
            }
            (p, FqModule::from_units(f, den, q, bb).expect("primary part is consistent"))
        })
        .collect();
    PrimaryDecomposition { module, parts, part_gens, to_original, from_original }
}

/// An endomorphism of a module, stored as the images of the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FqMap(pub Vec<u32>);

impl FqMap {
    pub fn identity(m: &FqModule) -> Self {
        FqMap((0..m.rank()).map(|i| m.gen(i) as u32).collect())
    }

    pub fn apply(&self, m: &FqModule, x: usize) -> usize {
        let r = m.rank();
        let c = m.coeffs(x);
        let mut acc = [0u64; 32];
        assert!(r <= 32, "modules of rank above 32 are not supported");
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let img = m.coeffs(self.0[i] as usize);
            for j in 0..r {
                acc[j] += ci as u64 * img[j] as u64;
            }
        }
        (0..r).map(|j| (acc[j] % m.factors[j] as u64) as usize * m.strides[j]).sum()
    }

    /// `self` followed by `other`.
    pub fn then(&self, m: &FqModule, other: &FqMap) -> FqMap {
        FqMap(self.0.iter().map(|&x| other.apply(m, x as usize) as u32).collect())
    }

    /// Whether the generator images define a homomorphism.
    pub fn is_hom(&self, m: &FqModule) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| m.factors[i].is_multiple_of(m.order(x as usize)))
    }

    pub fn is_bijective(&self, m: &FqModule) -> bool {
        self.is_hom(m) && m.span(&self.0.iter().map(|&x| x as usize).collect::<Vec<_>>()).len() == m.size
    }

    /// Exhaustive check that `q` is preserved on every element.
    pub fn preserves_q(&self, m: &FqModule) -> bool {
        (0..m.size).all(|x| m.q(self.apply(m, x)) == m.q(x))
    }

    pub fn is_orthogonal(&self, m: &FqModule) -> bool {
        self.is_bijective(m) && self.preserves_q(m)
    }

    /// The map as a permutation of element indices.
    pub fn to_perm(&self, m: &FqModule) -> Vec<u32> {
        (0..m.size).map(|x| self.apply(m, x) as u32).collect()
    }
}

/// Automorphisms of a module acting on its elements.
#[derive(Clone, Debug)]
pub struct ModAction {
    pub module: Arc<FqModule>,
}

impl ModAction {
    pub fn new(module: Arc<FqModule>) -> Self {
        ModAction { module }
    }
}

impl Action for ModAction {
    type Elem = FqMap;

    fn degree(&self) -> usize {
        self.module.size
    }
    fn identity(&self) -> FqMap {
        FqMap::identity(&self.module)
    }
    fn mul(&self, a: &FqMap, b: &FqMap) -> FqMap {
        a.then(&self.module, b)
    }
    fn inv(&self, a: &FqMap) -> FqMap {
        let m = &self.module;
        let r = m.rank();
        let mut out = vec![u32::MAX; r];
        let mut missing = r;
        for x in 0..m.size {
            let y = a.apply(m, x);
            if let Some(i) = (0..r).find(|&i| m.gen(i) == y) {
                if out[i] == u32::MAX {
                    out[i] = x as u32;
                    missing -= 1;
                    if missing == 0 {
                        break;
                    }
                }
            }
        }
        assert_eq!(missing, 0, "inverse of a non-bijective map");
        FqMap(out)
    }
    fn image(&self, a: &FqMap, x: usize) -> usize {
        a.apply(&self.module, x)
    }
}

/// Backtrack problem for `O(M, q)` with the generators as base.
struct OrthSearch<'a> {
    act: &'a ModAction,
    cands: Vec<Vec<usize>>,
    /// Census of the generator prefixes, indexed by prefix length.
    base_census: Vec<Vec<Vec<u32>>>,
}

/// Sorted signatures `(order, q, b(y, x_0), ..., b(y, x_k))` over all `y`.
fn census(m: &FqModule, xs: &[usize]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (0..m.size)
        .map(|y| {
            let mut sig = Vec::with_capacity(xs.len() + 2);
            sig.push(m.order(y));
            sig.push(m.q(y));
            sig.extend(xs.iter().map(|&x| m.b(y, x)));
            sig
        })
        .collect();
    out.sort_unstable();
    out
}

impl<'a> OrthSearch<'a> {
    fn new(act: &'a ModAction) -> Self {
        let m = &act.module;
        let cands = (0..m.rank())
            .map(|i| {
                let g = m.gen(i);
                (0..m.size).filter(|&x| m.order(x) == m.order(g) && m.q(x) == m.q(g)).collect()
            })
            .collect();
        let gens: Vec<usize> = (0..m.rank()).map(|i| m.gen(i)).collect();
        let base_census = (0..=m.rank()).map(|k| census(m, &gens[..k])).collect();
        OrthSearch { act, cands, base_census }
    }
}

impl Search for OrthSearch<'_> {
    type A = ModAction;

    fn action(&self) -> &ModAction {
        self.act
    }
    fn base(&self) -> Vec<usize> {
        (0..self.act.module.rank()).map(|i| self.act.module.gen(i)).collect()
    }
    fn candidates(&self, level: usize) -> Vec<usize> {
        self.cands[level].clone()
    }
    fn compatible(&self, i: usize, xi: usize, j: usize, xj: usize) -> bool {
        let m = &self.act.module;
        m.b(xi, xj) == m.b(m.gen(i), m.gen(j))
    }
    fn partial_ok(&self, images: &[usize]) -> bool {
        census(&self.act.module, images) == self.base_census[images.len()]
    }
    fn complete(&self, images: &[usize]) -> Option<FqMap> {
        // Orders and q match on generators and b matches on pairs, so the map
        // is a q-preserving homomorphism; non-degeneracy makes it injective.
        Some(FqMap(images.iter().map(|&x| x as u32).collect()))
    }
}

/// A group of module automorphisms together with its stabilizer chain.
#[derive(Clone, Debug)]
pub struct FqGroup {
    pub action: ModAction,
    pub chain: StabChain<ModAction>,
}

impl FqGroup {
    pub fn module(&self) -> &FqModule {
        &self.action.module
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn generators(&self) -> &[FqMap] {
        self.chain.generators()
    }

    pub fn orbits_on(&self, set: &[usize]) -> Result<Vec<Vec<usize>>, permgroup::GroupError> {
        orbit::orbits_on(&self.action, self.chain.generators(), set)
    }

    pub fn orbit_of(&self, x: usize) -> Vec<usize> {
        self.chain.orbit_of(x)
    }

    pub fn stabilizer_order(&self, x: usize) -> u128 {
        self.order() / self.orbit_of(x).len() as u128
    }

    pub fn contains(&self, f: &FqMap) -> bool {
        self.chain.contains(f)
    }
}

/// Result of the orthogonal group computation, with both order routes.
#[derive(Clone, Debug)]
pub struct OrthogonalGroup {
    pub group: FqGroup,
    /// Order from the backtrack's level indices.
    pub search_order: u128,
    /// Order from an independent Schreier–Sims run on the found generators.
    pub chain_order: u128,
}

/// The full orthogonal group `O(M, q)`. Requires `M` non-degenerate.
///
/// The primary parts are orthogonal to each other, so `O(M)` is the product
/// of the `O(M_p)`. Each factor is found by its own backtrack search and its
/// generators are lifted to `M`; `search_order` is the product of the factor
/// orders, `chain_order` comes from Schreier–Sims on the lifted generators.
pub fn orthogonal_group(m: Arc<FqModule>, seed: u64) -> Result<OrthogonalGroup, CoreError> {
    use rand::SeedableRng;
    if !m.is_nondegenerate() {
        return Err(CoreError::Unsupported("orthogonal group of a degenerate module".into()));
    }
    let pd = primary_decompose(&m);
    let mut gens = Vec::new();
    let mut search_order: u128 = 1;
    for ((_, part), idxs) in pd.parts.iter().zip(&pd.part_gens) {
        let act = ModAction::new(Arc::new(part.clone()));
        let res = backtrack::search(&OrthSearch::new(&act), &[]);
        search_order = search_order
            .checked_mul(res.order)
            .ok_or_else(|| CoreError::Unsupported("group order overflows u128".into()))?;
        gens.extend(res.gens.iter().map(|f| lift_part_map(&m, &pd, idxs, part, f)));
    }
    let act = ModAction::new(m.clone());
    let base: Vec<usize> = (0..m.rank()).map(|i| m.gen(i)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // No target order: the chain is completed by the deterministic pass.
    let chain = StabChain::new_random(act.clone(), &gens, &base, &mut rng, None);
    let chain_order = chain.order();
    Ok(OrthogonalGroup { group: FqGroup { action: act, chain }, search_order, chain_order })
}

/// Extends an automorphism of one primary part by the identity on the others
/// and rewrites it on the generators of the original module.
fn lift_part_map(m: &FqModule, pd: &PrimaryDecomposition, idxs: &[usize], part: &FqModule, f: &FqMap) -> FqMap {
    let dm = &pd.module;
    let embed = |y: usize| {
        part.coeffs(y).iter().zip(idxs).fold(dm.zero(), |acc, (&c, &k)| dm.add(acc, dm.scale(dm.gen(k), c as i64)))
    };
    let mut imgs: Vec<u32> = (0..dm.rank()).map(|k| dm.gen(k) as u32).collect();
    for (a, &k) in idxs.iter().enumerate() {
        imgs[k] = embed(f.0[a] as usize) as u32;
    }
    let lifted = FqMap(imgs);
    FqMap((0..m.rank()).map(|i| pd.to_original[lifted.apply(dm, pd.from_original[m.gen(i)])] as u32).collect())
}

/// The subgroup generated by `maps` and its index in `full`.
pub fn image_and_index(maps: &[FqMap], full: &FqGroup, seed: u64) -> Result<(FqGroup, u128), CoreError> {
    use rand::SeedableRng;
    let m = full.module();
    for (k, f) in maps.iter().enumerate() {
        if !f.is_orthogonal(m) {
            return Err(CoreError::NotOrthogonal(format!("map {k}")));
        }
    }
    let base: Vec<usize> = (0..m.rank()).map(|i| m.gen(i)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let chain = StabChain::new_random(full.action.clone(), maps, &base, &mut rng, None);
    let order = chain.order();
    assert_eq!(full.order() % order, 0, "subgroup order divides the group order");
    Ok((FqGroup { action: full.action.clone(), chain }, full.order() / order))
}

/// Number of q-preserving automorphisms, counted by exhaustive enumeration of
/// generator images (every homomorphism is visited; q and b are tested as
/// soon as the relevant images are fixed). Intended for small modules.
pub fn count_orthogonal_brute_force(m: &FqModule) -> u64 {
    fn rec(m: &FqModule, imgs: &mut Vec<usize>, count: &mut u64) {
        let k = imgs.len();
        if k == m.rank() {
            let f = FqMap(imgs.iter().map(|&x| x as u32).collect());
            if f.is_bijective(m) && f.preserves_q(m) {
                *count += 1;
            }
            return;
        }
        let g = m.gen(k);
        for x in 0..m.size() {
            if !m.factors[k].is_multiple_of(m.order(x)) || m.q(x) != m.q(g) {
                continue;
            }
            if (0..k).any(|j| m.b(imgs[j], x) != m.b(m.gen(j), g)) {
                continue;
            }
            imgs.push(x);
            rec(m, imgs, count);
            imgs.pop();
        }
    }
    let mut count = 0;
    rec(m, &mut Vec::new(), &mut count);
    count
}

/// JSON form: invariant factors plus the q-Gram matrix (diagonal `q(e_i)`,
/// off-diagonal half of `b(e_i, e_j)`), entries as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FqModuleJson {
    pub factors: Vec<u32>,
    pub q_gram: Vec<Vec<String>>,
}

impl FqModule {
    pub fn to_json(&self) -> FqModuleJson {
        let r = self.rank();
        let den = BigInt::from(self.den);
        let q_gram = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let v = if i == j {
                            BigRational::new(BigInt::from(self.q_gen[i]), den.clone())
                        } else {
                            BigRational::new(BigInt::from(self.b_gen[i * r + j]), den.clone() * 2)
                        };
                        crate::lattice::rat_to_string(&v)
                    })
                    .collect()
            })
            .collect();
        FqModuleJson { factors: self.factors.clone(), q_gram }
    }

    pub fn from_json(j: &FqModuleJson) -> Result<Self, CoreError> {
        let r = j.factors.len();
        let parse = |s: &String| crate::lattice::parse_rat(s);
        let mut q = Vec::with_capacity(r);
        let mut b = vec![vec![BigRational::zero(); r]; r];
        for i in 0..r {
            let row = j.q_gram.get(i).ok_or_else(|| CoreError::Parse("q_gram too short".into()))?;
            for jj in 0..r {
                let v = parse(row.get(jj).ok_or_else(|| CoreError::Parse("q_gram row too short".into()))?)?;
                if i == jj {
                    b[i][i] = &v * BigRational::from_integer(BigInt::from(2));
                    q.push(v);
                } else {
                    b[i][jj] = &v * BigRational::from_integer(BigInt::from(2));
                }
            }
        }
        FqModule::new(j.factors.clone(), &q, &b)
    }
}

/// Sanity value used by tests: `|M|` as a big integer.
pub fn module_order(m: &FqModule) -> BigInt {
    m.factors.iter().fold(BigInt::one(), |a, &d| a * BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn cyclic(d: u32, q: BigRational) -> FqModule {
        let b = &q * rat(2, 1);
        FqModule::new(vec![d], &[q], &[vec![b]]).unwrap()
    }

    fn klein_all_half() -> FqModule {
        FqModule::new(
            vec![2, 2],
            &[rat(1, 2), rat(1, 2)],
            &[vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]],
        )
        .unwrap()
    }

    #[test]
    fn a1_discriminant_form_values() {
        let m = cyclic(2, rat(1, 4));
        assert_eq!(m.size(), 2);
        assert_eq!(m.q_rational(1), rat(1, 4));
        assert!(m.isotropic_census(2).is_empty());
        assert_eq!(m.isotropic_census(1), vec![0]);
        assert!(m.is_nondegenerate());
    }

    #[test]
    fn polarization_identity() {
        let m = FqModule::new(
            vec![4, 6],
            &[rat(3, 8), rat(1, 12)],
            &[vec![rat(3, 4), rat(1, 2)], vec![rat(1, 2), rat(1, 6)]],
        )
        .unwrap();
        for x in 0..m.size() {
            for y in 0..m.size() {
                let lhs = (m.q(m.add(x, y)) + 2 * m.den() - m.q(x) - m.q(y)) % m.den();
                assert_eq!(lhs, m.b(x, y));
            }
            assert_eq!(m.q(m.scale(x, 3)), (9 * m.q(x)) % m.den());
        }
    }

    #[test]
    fn klein_orthogonal_group_is_sym3() {
        let m = Arc::new(klein_all_half());
        let o = orthogonal_group(m.clone(), 1).unwrap();
        assert_eq!(o.search_order, 6);
        assert_eq!(o.chain_order, 6);
        assert_eq!(count_orthogonal_brute_force(&m), 6);
    }

    #[test]
    fn brute_force_matches_search_on_small_modules() {
        let cases = vec![
            cyclic(8, rat(1, 16)),
            cyclic(9, rat(1, 9)),
            cyclic(4, rat(3, 8)).direct_sum(&cyclic(4, rat(3, 8))),
            cyclic(2, rat(1, 4)).direct_sum(&cyclic(2, rat(1, 4))).direct_sum(&cyclic(4, rat(1, 8))),
            klein_all_half().direct_sum(&klein_all_half()),
            cyclic(3, rat(1, 3)).direct_sum(&cyclic(3, rat(1, 3))).direct_sum(&cyclic(3, rat(2, 3))),
            cyclic(12, rat(1, 24)).direct_sum(&cyclic(6, rat(1, 12))),
            cyclic(6, rat(1, 12)).direct_sum(&cyclic(6, rat(5, 12))).direct_sum(&cyclic(2, rat(1, 4))),
        ];
        for m in cases {
            let m = Arc::new(m);
            let o = orthogonal_group(m.clone(), 3).unwrap();
            let brute = count_orthogonal_brute_force(&m) as u128;
            assert_eq!(o.search_order, brute, "{:?}", m.factors());
            assert_eq!(o.chain_order, brute);
            for g in o.group.generators() {
                assert!(g.is_orthogonal(&m));
            }
        }
    }

    #[test]
    fn primary_parts_reassemble() {
        let m = cyclic(12, rat(1, 24)).direct_sum(&cyclic(6, rat(1, 12)));
        assert!(m.is_nondegenerate());
        let pd = primary_decompose(&m);
        let sizes: Vec<(u32, usize)> = pd.parts.iter().map(|(p, mp)| (*p, mp.size())).collect();
        assert_eq!(sizes, vec![(2, 8), (3, 9)]);
        for x in 0..pd.module.size() {
            assert_eq!(pd.module.q(x), m.q(pd.to_original[x]));
        }
        // Different primes are orthogonal.
        let r = pd.module.rank();
        for &i in &pd.part_gens[0] {
            for &j in &pd.part_gens[1] {
                assert_eq!(pd.module.b(pd.module.gen(i), pd.module.gen(j)), 0);
            }
        }
        assert_eq!(r, 4);
    }

    #[test]
    fn json_round_trip() {
        let m = cyclic(4, rat(3, 8)).direct_sum(&klein_all_half());
        let j = m.to_json();
        let back = FqModule::from_json(&j).unwrap();
        assert_eq!(back.q_census(), m.q_census());
        let text = serde_json::to_string(&j).unwrap();
        let j2: FqModuleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(j2, j);
    }

    #[test]
    fn rejects_ill_defined_forms() {
        assert!(FqModule::new(vec![2], &[rat(1, 3)], &[vec![rat(2, 3)]]).is_err());
        assert!(FqModule::new(vec![3], &[rat(1, 3)], &[vec![rat(1, 3)]]).is_err());
    }
}
