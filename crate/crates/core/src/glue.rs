//! Coinvariant lattices built from glued root lattices.
//!
//! For a root lattice `R = A_{k_1-1} + ... + A_{k_t-1}` and a cyclic glue code
//! `C = <c>` in `R*/R`, the overlattice `N = L_A(C)` is the preimage of `C` and
//! `L = L_B(C) = {v in N : (v|chi) in Z}` with `chi = (rho_i / k_i)_i`. The
//! product of block Coxeter elements raised to the glue digits is a
//! fixed-point-free isometry `g` of `L`.
//!
//! Ambient coordinates are simple-root coordinates of `R`, so `R = Z^d` and
//! the ambient form is the block Cartan matrix.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::lattice::{cartan_a, Isometry, Lattice};
use crate::linalg::{inverse, left_kernel_int, rat, to_rat, IntMatrix, RatMatrix};

/// The five conjugacy classes of the Leech lattice handled here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    #[serde(rename = "4C")]
    C4,
    #[serde(rename = "6E")]
    E6,
    #[serde(rename = "6G")]
    G6,
    #[serde(rename = "8E")]
    E8,
    #[serde(rename = "10F")]
    F10,
}

impl ClassTag {
    pub const ALL: [ClassTag; 5] = [ClassTag::C4, ClassTag::E6, ClassTag::G6, ClassTag::E8, ClassTag::F10];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::C4 => "4C",
            ClassTag::E6 => "6E",
            ClassTag::G6 => "6G",
            ClassTag::E8 => "8E",
            ClassTag::F10 => "10F",
        }
    }

    /// Order of `g`.
    pub fn n(self) -> u32 {
        match self {
            ClassTag::C4 => 4,
            ClassTag::E6 | ClassTag::G6 => 6,
            ClassTag::E8 => 8,
            ClassTag::F10 => 10,
        }
    }

    /// Whether the lift of `g` to the lattice VOA has order `2n`.
    pub fn doubled(self) -> bool {
        matches!(self, ClassTag::G6 | ClassTag::F10)
    }

    pub fn glue_spec(self) -> GlueSpec {
        let (blocks, digits): (&[u32], &[u32]) = match self {
            ClassTag::C4 => (&[4, 4, 4, 4, 2, 2], &[1, 1, 1, 1, 1, 1]),
            ClassTag::E6 => (&[6, 6, 3, 3, 2, 2], &[1, 1, 1, 1, 1, 1]),
            ClassTag::G6 => (&[6, 6, 6, 2, 2, 2], &[1, 1, 1, 1, 1, 1]),
            ClassTag::E8 => (&[8, 8, 4, 2], &[1, 3, 1, 1]),
            ClassTag::F10 => (&[10, 10, 2, 2], &[1, 3, 1, 1]),
        };
        GlueSpec { class: self, blocks: blocks.to_vec(), digits: digits.to_vec() }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassTag::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CoreError::UnknownClass(s.to_string()))
    }
}

/// The root lattice `A_{k-1}` in simple-root coordinates.
#[derive(Clone, Debug)]
pub struct RootBlock {
    pub k: u32,
    pub cartan: IntMatrix,
    /// Rows are the fundamental weights `lambda_1, ..., lambda_{k-1}`.
    pub weights: RatMatrix,
    pub rho: Vec<BigRational>,
    /// `r_{alpha_1} ... r_{alpha_{k-1}}` (as a composition of maps) in the
    /// row convention `v -> v M`.
    pub coxeter: Isometry,
}

/// Reflection in the simple root `alpha_j`, row convention.
fn reflection(cartan: &IntMatrix, j: usize) -> IntMatrix {
    let m = cartan.rows();
    let mut r = IntMatrix::identity(m);
    for i in 0..m {
        r[(i, j)] -= &cartan[(i, j)];
    }
    r
}

pub fn build_block(k: u32) -> RootBlock {
    assert!(k >= 2, "A_{{k-1}} needs k >= 2");
    let m = (k - 1) as usize;
    let cartan = cartan_a(m);
    let weights = inverse(&to_rat(&cartan)).expect("Cartan matrix is invertible");
    let rho = (0..m).map(|j| (0..m).map(|i| weights[(i, j)].clone()).sum()).collect();
    // Applying r_{alpha_{k-1}} first and r_{alpha_1} last: M = R_{k-1} ... R_1.
    let mut cox = IntMatrix::identity(m);
    for j in (0..m).rev() {
        cox = cox.mul(&reflection(&cartan, j));
    }
    RootBlock { k, cartan, weights, rho, coxeter: Isometry { mat: cox } }
}

/// Construction data for one class: block sizes `k_i` and glue digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueSpec {
    pub class: ClassTag,
    pub blocks: Vec<u32>,
    pub digits: Vec<u32>,
}

impl GlueSpec {
    pub fn n(&self) -> u32 {
        self.blocks.iter().fold(1, |a, &k| a.lcm(&k))
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|&k| (k - 1) as usize).sum()
    }

    /// E.g. `A_3^4 A_1^2`.
    pub fn root_type(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.blocks.len() {
            let k = self.blocks[i];
            let run = self.blocks[i..].iter().take_while(|&&x| x == k).count();
            out.push_str(&format!("A{}", k - 1));
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        out
    }
}

/// Everything built from a glue specification.
#[derive(Clone, Debug)]
pub struct BConstruction {
    pub spec: GlueSpec,
    pub n: u32,
    pub blocks: Vec<RootBlock>,
    /// First ambient coordinate of each block.
    pub offsets: Vec<usize>,
    pub r: Lattice,
    pub n_lat: Lattice,
    pub l: Lattice,
    pub chi: Vec<BigRational>,
    pub gamma: Vec<BigRational>,
    pub lambda_e: Vec<BigRational>,
    /// `g` on the ambient space (row convention).
    pub g_ambient: RatMatrix,
    /// `g` restricted to `L`, in the basis of `L`.
    pub g: Isometry,
}

impl BConstruction {
    /// Ambient vector supported on block `i`.
    pub fn embed(&self, i: usize, local: &[BigRational]) -> Vec<BigRational> {
        embed(self.r.ambient_dim(), self.offsets[i], local)
    }

    pub fn apply_g(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.g_ambient.vec_mul(v)
    }

    pub fn chi_pairing(&self, v: &[BigRational]) -> BigRational {
        self.r.inner(v, &self.chi)
    }

    /// All norm-2 vectors of `N` that are valid choices of `gamma`, in
    /// lexicographic order.
    pub fn gamma_candidates(&self) -> Vec<Vec<BigRational>> {
        let target = rat(1, self.n as i64);
        self.n_lat
            .short_vectors(&rat(2, 1))
            .into_iter()
            .map(|(v, _)| v)
            .filter(|v| (self.chi_pairing(v) - &target).is_integer())
            .collect()
    }

    /// The same construction with a different valid `gamma`.
    pub fn with_gamma(&self, gamma: Vec<BigRational>) -> Result<BConstruction, CoreError> {
        if !self.n_lat.contains(&gamma) || !(self.chi_pairing(&gamma) - rat(1, self.n as i64)).is_integer() {
            return Err(CoreError::BadGlue("gamma must lie in N with (gamma|chi) = 1/n mod 1".into()));
        }
        Ok(BConstruction { gamma, ..self.clone() })
    }
}

fn embed(d: usize, offset: usize, local: &[BigRational]) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); d];
    v[offset..offset + local.len()].clone_from_slice(local);
    v
}

fn scale(v: &[BigRational], s: &BigRational) -> Vec<BigRational> {
    v.iter().map(|x| x * s).collect()
}

fn add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn build_la_lb(spec: &GlueSpec) -> Result<BConstruction, CoreError> {
    if spec.blocks.len() != spec.digits.len() {
        return Err(CoreError::BadGlue("one digit per block is required".into()));
    }
    for (&k, &d) in spec.blocks.iter().zip(&spec.digits) {
        if k < 2 || d.gcd(&k) != 1 {
            return Err(CoreError::BadGlue(format!("digit {d} is not a unit modulo {k}")));
        }
    }
    let n = spec.n();
    if n != spec.class.n() {
        return Err(CoreError::BadGlue(format!("blocks give n = {n}, class {} needs {}", spec.class, spec.class.n())));
    }
    let blocks: Vec<RootBlock> = spec.blocks.iter().map(|&k| build_block(k)).collect();
    let mut offsets = Vec::new();
    let mut d = 0;
    for b in &blocks {
        offsets.push(d);
        d += (b.k - 1) as usize;
    }
    let form = Arc::new(to_rat(&IntMatrix::direct_sum(&blocks.iter().map(|b| b.cartan.clone()).collect::<Vec<_>>())));
    let r = Lattice::new(form.clone(), RatMatrix::identity(d))?;

    let mut chi = vec![BigRational::zero(); d];
    let mut glue = vec![BigRational::zero(); d];
    let mut lambda_e = vec![BigRational::zero(); d];
    for (i, b) in blocks.iter().enumerate() {
        let e = spec.digits[i] as usize;
        chi = add(&chi, &embed(d, offsets[i], &scale(&b.rho, &rat(1, b.k as i64))));
        glue = add(&glue, &embed(d, offsets[i], &scale(b.weights.row(0), &rat(e as i64, 1))));
        lambda_e = add(&lambda_e, &embed(d, offsets[i], b.weights.row(e - 1)));
    }

    let mut gens: Vec<Vec<BigRational>> = r.basis().row_vecs();
    gens.push(glue);
    let n_lat = Lattice::span(form.clone(), &gens)?;
    if !n_lat.is_even() {
        return Err(CoreError::BadGlue("the glue overlattice is not even".into()));
    }
    let n_chi = scale(&chi, &rat(n as i64, 1));
    if !n_lat.pairs_integrally(&n_chi) {
        return Err(CoreError::BadGlue("chi is not in (1/n) N*".into()));
    }

    // L = {c B_N : sum_i c_i n(b_i|chi) = 0 mod n}.
    let vals = n_lat.pairings(&n_chi);
    let mut col = IntMatrix::zeros(vals.len() + 1, 1);
    for (i, v) in vals.iter().enumerate() {
        col[(i, 0)] = v.to_integer();
    }
    col[(vals.len(), 0)] = BigInt::from(n);
    let ker = left_kernel_int(&col);
    let l_vecs: Vec<Vec<BigRational>> = (0..ker.rows())
        .map(|i| {
            let c: Vec<BigRational> = ker.row(i)[..vals.len()].iter().map(|x| BigRational::from_integer(x.clone())).collect();
            n_lat.vector(&c)
        })
        .collect();
    let l = Lattice::span(form.clone(), &l_vecs)?;
    if !l.contains(&lambda_e) || !(r.norm(&lambda_e) / rat(2, 1)).is_integer() {
        return Err(CoreError::BadGlue("lambda_e is not an even vector of L".into()));
    }

    let mut g_ambient = RatMatrix::identity(0);
    let mut parts = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        parts.push(to_rat(&b.coxeter.pow(spec.digits[i]).mat));
    }
    if !parts.is_empty() {
        g_ambient = RatMatrix::direct_sum(&parts);
    }
    let g = l.restrict(&g_ambient)?;

    let mut b = BConstruction {
        spec: spec.clone(),
        n,
        blocks,
        offsets,
        r,
        n_lat,
        l,
        chi,
        gamma: Vec::new(),
        lambda_e,
        g_ambient,
        g,
    };
    b.gamma = b
        .gamma_candidates()
        .into_iter()
        .next()
        .ok_or_else(|| CoreError::BadGlue("no norm-2 vector gamma with (gamma|chi) = 1/n".into()))?;
    Ok(b)
}

pub fn table2_build(class: ClassTag) -> BConstruction {
    build_la_lb(&class.glue_spec()).expect("built-in class data defines a valid construction")
}

/// Whether `g(chi) - chi + lambda_e` lies in `R`.
pub fn verify_eq_gchi(b: &BConstruction) -> bool {
    verify_eq_gchi_with(b, &b.lambda_e)
}

pub fn verify_eq_gchi_with(b: &BConstruction, lambda: &[BigRational]) -> bool {
    let v = add(&sub(&b.apply_g(&b.chi), &b.chi), lambda);
    b.r.contains(&v)
}

/// Structural facts about a construction, each computed independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFacts {
    pub rank: usize,
    pub det: String,
    pub even: bool,
    pub rootless: bool,
    pub discriminant_factors: Vec<u32>,
    pub g_order: Option<u32>,
    pub fixed_point_free: bool,
    pub one_minus_g_dual_is_l: bool,
    pub index_n_over_l: String,
    pub dual_quotient_cyclic_by_chi: bool,
    pub gamma_generates: bool,
    pub eq_gchi: bool,
}

/// `(1 - g) L*` as a lattice.
pub fn one_minus_g_dual(b: &BConstruction) -> Result<Lattice, CoreError> {
    let dual = b.l.dual();
    let imgs: Vec<Vec<BigRational>> =
        dual.basis().row_vecs().iter().map(|v| sub(v, &b.apply_g(v))).collect();
    Lattice::span(b.r.form().clone(), &imgs)
}

pub fn lattice_facts(b: &BConstruction) -> Result<LatticeFacts, CoreError> {
    let l = &b.l;
    let disc = l.discriminant()?;
    let (fixed, _) = l.fixed_and_coinvariant(&b.g);
    let img = one_minus_g_dual(b)?;
    let one_minus_g_dual_is_l = img.is_sublattice_of(l) && l.is_sublattice_of(&img);

    // L*/N* is cyclic of order n generated by chi + N*.
    let l_dual = l.dual();
    let n_dual = b.n_lat.dual();
    let (qf, _) = n_dual.quotient_in(&l_dual)?;
    let chi_order_n = (1..b.n).all(|k| !n_dual.contains(&scale(&b.chi, &rat(k as i64, 1))))
        && n_dual.contains(&scale(&b.chi, &rat(b.n as i64, 1)));
    let dual_quotient_cyclic_by_chi = qf.len() == 1 && qf[0] == BigInt::from(b.n) && l_dual.contains(&b.chi) && chi_order_n;

    let gamma_generates = b.n_lat.contains(&b.gamma)
        && (1..b.n).all(|k| !l.contains(&scale(&b.gamma, &rat(k as i64, 1))))
        && (b.chi_pairing(&b.gamma) - rat(1, b.n as i64)).is_integer();

    Ok(LatticeFacts {
        rank: l.rank(),
        det: l.det().to_string(),
        even: l.is_even(),
        rootless: l.short_vectors(&rat(2, 1)).is_empty(),
        discriminant_factors: disc.module.factors().to_vec(),
        g_order: b.g.order(4 * b.n),
        fixed_point_free: fixed.rank() == 0,
        one_minus_g_dual_is_l,
        index_n_over_l: l.index_in(&b.n_lat)?.to_string(),
        dual_quotient_cyclic_by_chi,
        gamma_generates,
        eq_gchi: verify_eq_gchi(b),
    })
}

/// Multiset of prime-power cyclic orders, e.g. `2^2 4^4` as `[2, 2, 4, 4, 4, 4]`.
pub fn elementary_divisor_multiset(factors: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    for &f in factors {
        for (p, e) in crate::fqm::prime_power_parts(f) {
            out.push(p.pow(e));
        }
    }
    out.sort_unstable();
    out
}
