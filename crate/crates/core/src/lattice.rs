//! Positive-definite lattices in a rational ambient space.
//!
//! A lattice is a set of rational basis rows in an ambient space `Q^d` with
//! a symmetric form `Phi`. Lattices sharing an ambient space (a root lattice,
//! its glue overlattice, the dual, ...) can be compared directly.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fqm::FqModule;
use crate::linalg::{
    self, common_denominator, dot, inverse, lattice_span, left_kernel_int, rat_int, snf, to_int, to_rat,
    IntMatrix, RatMatrix,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    form: Arc<RatMatrix>,
    basis: RatMatrix,
    gram: RatMatrix,
}

/// An isometry in basis coordinates: row vector `c` maps to `c * mat`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub mat: IntMatrix,
}

impl Lattice {
    /// Lattice with the given (independent) basis rows.
    pub fn new(form: Arc<RatMatrix>, basis: RatMatrix) -> Result<Self, CoreError> {
        assert_eq!(basis.cols(), form.rows(), "basis lives in the ambient space");
        let gram = basis.mul(&form).mul(&basis.transpose());
        if basis.rows() > 0 && linalg::det_rat(&gram).is_zero() {
            return Err(CoreError::Singular);
        }
        Ok(Lattice { form, basis, gram })
    }

    /// Z-span of arbitrary ambient vectors.
    pub fn span(form: Arc<RatMatrix>, vectors: &[Vec<BigRational>]) -> Result<Self, CoreError> {
        let rows = lattice_span(vectors);
        let d = form.rows();
        let basis = if rows.is_empty() { RatMatrix::zeros(0, d) } else { RatMatrix::from_rows(rows) };
        Self::new(form, basis)
    }

    pub fn form(&self) -> &Arc<RatMatrix> {
        &self.form
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.form.rows()
    }

    pub fn det(&self) -> BigRational {
        linalg::det_rat(&self.gram)
    }

    pub fn inner(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        linalg::pairing(a, &self.form, b)
    }

    pub fn norm(&self, a: &[BigRational]) -> BigRational {
        self.inner(a, a)
    }

    pub fn is_integral(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.row(i).iter().all(|x| x.is_integer()))
    }

    pub fn is_even(&self) -> bool {
        self.is_integral() && (0..self.rank()).all(|i| self.gram[(i, i)].to_integer().is_even())
    }

    /// Ambient vector with basis coordinates `c`.
    pub fn vector(&self, c: &[BigRational]) -> Vec<BigRational> {
        self.basis.vec_mul(c)
    }

    pub fn vector_int(&self, c: &[i64]) -> Vec<BigRational> {
        let c: Vec<BigRational> = c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        self.vector(&c)
    }

    /// Rational basis coordinates of an ambient vector in the span.
    pub fn coords(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let c = linalg::solve_left(&self.basis, v).ok()?;
        (self.basis.vec_mul(&c) == v).then_some(c)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coords(v).is_some_and(|c| c.iter().all(|x| x.is_integer()))
    }

    /// `((v|b_1), ..., (v|b_r))`.
    pub fn pairings(&self, v: &[BigRational]) -> Vec<BigRational> {
        let fv = self.form.vec_mul(v);
        (0..self.rank()).map(|i| dot(&fv, self.basis.row(i))).collect()
    }

    /// Whether `v` pairs integrally with the lattice (i.e. lies in `L*` when in the span).
    pub fn pairs_integrally(&self, v: &[BigRational]) -> bool {
        self.pairings(v).iter().all(|x| x.is_integer())
    }

    pub fn dual(&self) -> Lattice {
        let ginv = inverse(&self.gram).expect("nondegenerate lattice");
        let basis = ginv.mul(&self.basis);
        Lattice::new(self.form.clone(), basis).expect("dual of a nondegenerate lattice")
    }

    /// Whether every basis vector of `self` lies in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    /// Basis of `self` in coordinates of `other` (requires `self <= other`).
    pub fn coords_in(&self, other: &Lattice) -> Result<IntMatrix, CoreError> {
        let rows: Option<Vec<Vec<BigRational>>> = (0..self.rank()).map(|i| other.coords(self.basis.row(i))).collect();
        let rows = rows.ok_or_else(|| CoreError::NotSublattice("basis vector outside the span".into()))?;
        to_int(&RatMatrix::from_rows(rows)).ok_or_else(|| CoreError::NotSublattice("non-integral coordinates".into()))
    }

    /// `|M : L|` for `L = self <= M` of the same rank.
    pub fn index_in(&self, m: &Lattice) -> Result<BigInt, CoreError> {
        if self.rank() != m.rank() {
            return Err(CoreError::NotSublattice("ranks differ".into()));
        }
        let k = self.coords_in(m)?;
        Ok(linalg::det_int(&k).abs())
    }

    /// Structure of `M / L` for `L = self <= M` of equal rank: the nontrivial
    /// invariant factors and ambient representatives of the generators.
    pub fn quotient_in(&self, m: &Lattice) -> Result<(Vec<BigInt>, Vec<Vec<BigRational>>), CoreError> {
        let k = self.coords_in(m)?;
        if self.rank() != m.rank() {
            return Err(CoreError::NotSublattice("ranks differ".into()));
        }
        // U K V = D, so L has basis D (V^-1 B_M) and M has basis V^-1 B_M.
        let (d, _u, v) = snf(&k);
        let vinv = inverse(&to_rat(&v)).expect("unimodular");
        let new_basis = vinv.mul(m.basis());
        let mut factors = Vec::new();
        let mut reps = Vec::new();
        for i in 0..d.rows() {
            if d[(i, i)] != BigInt::one() {
                factors.push(d[(i, i)].clone());
                reps.push(new_basis.row(i).to_vec());
            }
        }
        Ok((factors, reps))
    }

    /// Applies an isometry (basis coordinates) to an ambient vector of the span.
    pub fn apply(&self, g: &Isometry, v: &[BigRational]) -> Vec<BigRational> {
        let c = self.coords(v).expect("vector in the span");
        self.vector(&to_rat(&g.mat).vec_mul(&c))
    }

    pub fn is_isometry(&self, g: &Isometry) -> bool {
        let m = to_rat(&g.mat);
        g.mat.rows() == self.rank()
            && m.mul(&self.gram).mul(&m.transpose()) == self.gram
            && linalg::det_int(&g.mat).abs() == BigInt::one()
    }

    /// Matrix (basis coordinates) of the restriction of an ambient linear map
    /// `A` (acting on row vectors, `v -> v A`), if it preserves the lattice.
    pub fn restrict(&self, ambient: &RatMatrix) -> Result<Isometry, CoreError> {
        let images = self.basis.mul(ambient);
        let rows: Option<Vec<Vec<BigRational>>> = (0..self.rank()).map(|i| self.coords(images.row(i))).collect();
        let rows = rows.ok_or_else(|| CoreError::NotIsometry("map leaves the span".into()))?;
        let m = to_int(&RatMatrix::from_rows(rows)).ok_or_else(|| CoreError::NotIsometry("map leaves the lattice".into()))?;
        let g = Isometry { mat: m };
        if !self.is_isometry(&g) {
            return Err(CoreError::NotIsometry("form not preserved".into()));
        }
        Ok(g)
    }

    /// Fixed-point sublattice `L^g` and coinvariant lattice `L_g`.
    pub fn fixed_and_coinvariant(&self, g: &Isometry) -> (Lattice, Lattice) {
        let r = self.rank();
        let mut gm1 = g.mat.clone();
        for i in 0..r {
            gm1[(i, i)] = &gm1[(i, i)] - BigInt::one();
        }
        let fixed = left_kernel_int(&gm1);
        let fixed_basis = to_rat(&fixed).mul(&self.basis);
        let fixed_lat = Lattice::new(self.form.clone(), fixed_basis.clone()).expect("sublattice of a definite lattice");
        // Orthogonal complement: c with c G_L K^T = 0, K the fixed coordinates.
        let cross = self.basis.mul(&self.form).mul(&fixed_basis.transpose());
        let co = if fixed.rows() == 0 {
            IntMatrix::identity(r)
        } else {
            let den = common_denominator(&(0..cross.rows()).flat_map(|i| cross.row(i).to_vec()).collect::<Vec<_>>());
            let scaled = to_int(&RatMatrix::with_shape(
                cross.rows(),
                cross.cols(),
                (0..cross.rows()).flat_map(|i| cross.row(i).iter().map(|x| x * rat_int(&den)).collect::<Vec<_>>()).collect(),
            ))
            .expect("scaled to integers");
            left_kernel_int(&scaled)
        };
        let co_lat = Lattice::new(self.form.clone(), to_rat(&co).mul(&self.basis)).expect("sublattice of a definite lattice");
        (fixed_lat, co_lat)
    }

    /// All nonzero vectors of norm at most `bound`, with exact norms, in
    /// lexicographic order of ambient coordinates.
    pub fn short_vectors(&self, bound: &BigRational) -> Vec<(Vec<BigRational>, BigRational)> {
        let coords = short_vector_coords(&self.gram, bound, None);
        let mut out: Vec<(Vec<BigRational>, BigRational)> =
            coords.into_iter().map(|(c, n)| (self.vector_int(&c), n)).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Vectors of `v + L` of norm at most `bound` (including `v` itself if short),
    /// in lexicographic order.
    pub fn coset_short_vectors(&self, v: &[BigRational], bound: &BigRational) -> Vec<(Vec<BigRational>, BigRational)> {
        let t = self.coords(v).expect("coset representative in the span");
        let coords = short_vector_coords(&self.gram, bound, Some(&t));
        let mut out: Vec<(Vec<BigRational>, BigRational)> = coords
            .into_iter()
            .map(|(c, n)| {
                let c: Vec<BigRational> = c.iter().zip(&t).map(|(&x, ti)| BigRational::from_integer(BigInt::from(x)) + ti).collect();
                (self.vector(&c), n)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Smallest nonzero norm.
    pub fn minimum(&self) -> BigRational {
        let mut bound = self.gram[(0, 0)].clone();
        for i in 1..self.rank() {
            if self.gram[(i, i)] < bound {
                bound = self.gram[(i, i)].clone();
            }
        }
        short_vector_coords(&self.gram, &bound, None)
            .into_iter()
            .map(|(_, n)| n)
            .min()
            .expect("a basis vector attains the bound")
    }

    /// The discriminant form `(L*/L, q)`; requires an even lattice.
    pub fn discriminant(&self) -> Result<Discriminant, CoreError> {
        if !self.is_even() {
            return Err(CoreError::NotEven);
        }
        let g = to_int(&self.gram).expect("integral gram");
        let (d, _u, v) = snf(&g);
        let vinv = inverse(&to_rat(&v)).expect("unimodular");
        let ginv = inverse(&self.gram).expect("nondegenerate");
        let mut factors = Vec::new();
        let mut positions = Vec::new();
        let mut gens = Vec::new();
        for i in 0..d.rows() {
            if d[(i, i)] != BigInt::one() {
                factors.push(d[(i, i)].to_u32().expect("small discriminant"));
                positions.push(i);
                // Dual coordinates a = row i of V^-1; the vector is a G^-1 B.
                let c = ginv.transpose().vec_mul(vinv.row(i));
                gens.push(self.vector(&c));
            }
        }
        let r = gens.len();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let q: Vec<BigRational> = gens.iter().map(|x| self.norm(x) * &half).collect();
        let b: Vec<Vec<BigRational>> = (0..r).map(|i| (0..r).map(|j| self.inner(&gens[i], &gens[j])).collect()).collect();
        let module = FqModule::new(factors.clone(), &q, &b)?;
        Ok(Discriminant { module, gens, positions, v, lattice: self.clone() })
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            form: mat_to_strings(&self.form),
            basis: mat_to_strings(&self.basis),
            gram: mat_to_strings(&self.gram),
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self, CoreError> {
        let form = Arc::new(strings_to_mat(&j.form)?);
        let basis = strings_to_mat(&j.basis)?;
        if basis.rows() > 0 && basis.cols() != form.rows() {
            return Err(CoreError::Parse("basis width differs from ambient dimension".into()));
        }
        let basis = if basis.rows() == 0 { RatMatrix::zeros(0, form.rows()) } else { basis };
        let l = Lattice::new(form, basis)?;
        if strings_to_mat(&j.gram)? != *l.gram() && l.rank() > 0 {
            return Err(CoreError::Parse("stored gram matrix is inconsistent".into()));
        }
        Ok(l)
    }
}

/// `L*/L` with explicit generator representatives.
#[derive(Clone, Debug)]
pub struct Discriminant {
    pub module: FqModule,
    /// Ambient representatives in `L*` of the module generators.
    pub gens: Vec<Vec<BigRational>>,
    positions: Vec<usize>,
    v: IntMatrix,
    lattice: Lattice,
}

impl Discriminant {
    /// The class of `y + L` for `y` in `L*`.
    pub fn class_of(&self, y: &[BigRational]) -> Result<usize, CoreError> {
        let a = self.lattice.pairings(y);
        if a.iter().any(|x| !x.is_integer()) {
            return Err(CoreError::NotSublattice("vector is not in the dual lattice".into()));
        }
        let a: Vec<BigInt> = a.iter().map(|x| x.to_integer()).collect();
        let av = self.v.transpose();
        let coeffs: Vec<i64> = self
            .positions
            .iter()
            .zip(self.module.factors())
            .map(|(&p, &d)| {
                let s: BigInt = av.row(p).iter().zip(&a).map(|(x, y)| x * y).sum();
                s.mod_floor(&BigInt::from(d)).to_i64().expect("reduced")
            })
            .collect();
        Ok(self.module.encode(&coeffs))
    }

    /// An ambient representative of an element.
    pub fn representative(&self, x: usize) -> Vec<BigRational> {
        let c = self.module.coeffs(x);
        let d = self.lattice.ambient_dim();
        let mut out = vec![BigRational::zero(); d];
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0 {
                continue;
            }
            let f = BigRational::from_integer(BigInt::from(ck));
            for (o, g) in out.iter_mut().zip(&self.gens[k]) {
                *o += &f * g;
            }
        }
        out
    }

    /// The induced automorphism of `L*/L`.
    pub fn induced_map(&self, g: &Isometry) -> crate::fqm::FqMap {
        let images = self
            .gens
            .iter()
            .map(|y| self.class_of(&self.lattice.apply(g, y)).expect("isometries preserve the dual") as u32)
            .collect();
        crate::fqm::FqMap(images)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
}

/// LDL data of a positive-definite Gram matrix: `Q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`.
struct Ldl {
    d: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

fn ldl(gram: &RatMatrix) -> Ldl {
    let n = gram.rows();
    let mut a = gram.clone();
    let mut d = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        d[i] = a[(i, i)].clone();
        assert!(d[i].is_positive(), "gram matrix is not positive definite");
        for j in i + 1..n {
            mu[i][j] = &a[(i, j)] / &d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let v = &a[(j, k)] - &mu[i][j] * &a[(i, k)];
                a[(j, k)] = v;
            }
        }
    }
    Ldl { d, mu }
}

/// Exact LLL reduction (delta = 3/4) of a Gram matrix; returns the reduced
/// Gram and the integer transform `T` with `G' = T G T^T`.
pub fn lll_gram(gram: &RatMatrix) -> (RatMatrix, IntMatrix) {
    let n = gram.rows();
    let mut t = IntMatrix::identity(n);
    let mut g = gram.clone();
    if n < 2 {
        return (g, t);
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (mut bstar, mut mu) = gso(&g);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = round(&mu[k][j]);
                reduce(&mut g, &mut t, k, j, &q);
                let qr = rat_int(&q);
                for jj in 0..j {
                    let v = &mu[k][jj] - &qr * &mu[j][jj];
                    mu[k][jj] = v;
                }
                mu[k][j] -= &qr;
            }
        }
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if bstar[k] >= rhs {
            k += 1;
        } else {
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            t.swap_rows(k, k - 1);
            (bstar, mu) = gso(&g);
            k = (k - 1).max(1);
        }
    }
    (g, t)
}

fn round(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

/// `b_k <- b_k - q b_j` on the Gram matrix and the transform.
fn reduce(g: &mut RatMatrix, t: &mut IntMatrix, k: usize, j: usize, q: &BigInt) {
    let n = g.rows();
    let qr = rat_int(q);
    for c in 0..n {
        let v = &g[(k, c)] - &qr * &g[(j, c)];
        g[(k, c)] = v;
    }
    for r in 0..n {
        let v = &g[(r, k)] - &qr * &g[(r, j)];
        g[(r, k)] = v;
    }
    for c in 0..n {
        let v = &t[(k, c)] - q * &t[(j, c)];
        t[(k, c)] = v;
    }
}

/// Squared Gram–Schmidt lengths and coefficients `mu[i][j]` (j < i).
fn gso(g: &RatMatrix) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = g.rows();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = g[(i, i)].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        b[i] = s;
    }
    (b, mu)
}

/// Fincke–Pohst enumeration of integer `x` with `Q(x + t) <= bound`, where
/// `Q` is the Gram form and `t` an optional shift; `x = 0` is reported only
/// when a shift is given.
pub fn short_vector_coords(gram: &RatMatrix, bound: &BigRational, shift: Option<&[BigRational]>) -> Vec<(Vec<i64>, BigRational)> {
    let n = gram.rows();
    if n == 0 {
        return Vec::new();
    }
    let (red, t) = lll_gram(gram);
    let tinv = inverse(&to_rat(&t)).expect("unimodular");
    // With x = y T the shifted vector is (y + t T^-1) T.
    let shift_red: Vec<BigRational> = match shift {
        Some(s) => tinv.vec_mul(s),
        None => vec![BigRational::zero(); n],
    };
    let ldl = ldl(&red);
    let mut found = Vec::new();
    let mut y = vec![0i64; n];
    let mut z = vec![BigRational::zero(); n];
    enumerate(&ldl, &shift_red, n - 1, bound, &BigRational::zero(), &mut y, &mut z, &mut found);
    let tm: Vec<Vec<i64>> = (0..n).map(|i| t.row(i).iter().map(|v| v.to_i64().expect("small transform")).collect()).collect();
    found
        .into_iter()
        .filter(|(yv, _)| shift.is_some() || yv.iter().any(|&v| v != 0))
        .map(|(yv, norm)| {
            let mut x = vec![0i64; n];
            for (i, &yi) in yv.iter().enumerate() {
                if yi != 0 {
                    for j in 0..n {
                        x[j] += yi * tm[i][j];
                    }
                }
            }
            (x, norm)
        })
        .collect()
}

/// Level `i` of the enumeration; `z[j] = y[j] + shift[j]` for `j > i`.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    ldl: &Ldl,
    shift: &[BigRational],
    i: usize,
    bound: &BigRational,
    used: &BigRational,
    y: &mut Vec<i64>,
    z: &mut Vec<BigRational>,
    out: &mut Vec<(Vec<i64>, BigRational)>,
) {
    let n = y.len();
    let mut s = BigRational::zero();
    for j in i + 1..n {
        s += &ldl.mu[i][j] * &z[j];
    }
    // Term d_i (y_i - c)^2 with center c = -shift_i - s.
    let c = -(&shift[i] + &s);
    let start = round(&c).to_i64().expect("coordinate fits");
    let try_value = |v: i64, y: &mut Vec<i64>, z: &mut Vec<BigRational>, out: &mut Vec<(Vec<i64>, BigRational)>| -> bool {
        let diff = BigRational::from_integer(BigInt::from(v)) - &c;
        let total = used + &ldl.d[i] * &diff * &diff;
        if total > *bound {
            return false;
        }
        y[i] = v;
        z[i] = BigRational::from_integer(BigInt::from(v)) + &shift[i];
        if i == 0 {
            out.push((y.clone(), total));
        } else {
            enumerate(ldl, shift, i - 1, bound, &total, y, z, out);
        }
        true
    };
    try_value(start, y, z, out);
    let mut up = start + 1;
    while try_value(up, y, z, out) {
        up += 1;
    }
    let mut down = start - 1;
    while try_value(down, y, z, out) {
        down -= 1;
    }
    y[i] = 0;
    z[i] = BigRational::zero();
}

pub fn rat_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<BigRational, CoreError> {
    let bad = || CoreError::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn mat_to_strings(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(rat_to_string).collect()).collect()
}

fn strings_to_mat(rows: &[Vec<String>]) -> Result<RatMatrix, CoreError> {
    let parsed: Result<Vec<Vec<BigRational>>, CoreError> =
        rows.iter().map(|r| r.iter().map(|s| parse_rat(s)).collect()).collect();
    let parsed = parsed?;
    if parsed.iter().any(|r| r.len() != parsed[0].len()) {
        return Err(CoreError::Parse("ragged matrix".into()));
    }
    Ok(RatMatrix::from_rows(parsed))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LatticeJson {
    pub form: Vec<Vec<String>>,
    pub basis: Vec<Vec<String>>,
    pub gram: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IsometryJson {
    pub mat: Vec<Vec<String>>,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        Isometry { mat: IntMatrix::identity(n) }
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { mat: self.mat.mul(&other.mat) }
    }

    pub fn pow(&self, e: u32) -> Isometry {
        let mut acc = Isometry::identity(self.mat.rows());
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.mat == IntMatrix::identity(self.mat.rows())
    }

    /// Multiplicative order (searched up to `limit`).
    pub fn order(&self, limit: u32) -> Option<u32> {
        let mut acc = self.clone();
        for k in 1..=limit {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.compose(self);
        }
        None
    }

    pub fn to_json(&self) -> IsometryJson {
        IsometryJson { mat: (0..self.mat.rows()).map(|i| self.mat.row(i).iter().map(|x| x.to_string()).collect()).collect() }
    }

    pub fn from_json(j: &IsometryJson) -> Result<Self, CoreError> {
        let rows: Result<Vec<Vec<BigInt>>, CoreError> = j
            .mat
            .iter()
            .map(|r| r.iter().map(|s| s.trim().parse().map_err(|_| CoreError::Parse(format!("not an integer: {s:?}")))).collect())
            .collect();
        let rows = rows?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(CoreError::Parse("isometry matrix must be square".into()));
        }
        Ok(Isometry { mat: IntMatrix::from_rows(rows) })
    }
}

/// Root lattice `A_{k-1}` in its own simple-root coordinates.
pub fn root_lattice_a(k: usize) -> Lattice {
    let form = Arc::new(to_rat(&cartan_a(k - 1)));
    Lattice::new(form, RatMatrix::identity(k - 1)).expect("Cartan matrix is definite")
}

/// Cartan matrix of `A_n`.
pub fn cartan_a(n: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = BigInt::from(2);
        if i + 1 < n {
            m[(i, i + 1)] = BigInt::from(-1);
            m[(i + 1, i)] = BigInt::from(-1);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int_matrix, rat};

    fn brute_short(gram: &RatMatrix, bound: &BigRational, box_size: i64) -> Vec<Vec<i64>> {
        let n = gram.rows();
        let mut out = Vec::new();
        let total = (2 * box_size + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let x: Vec<i64> = (0..n)
                .map(|_| {
                    let v = c % (2 * box_size + 1) - box_size;
                    c /= 2 * box_size + 1;
                    v
                })
                .collect();
            if x.iter().all(|&v| v == 0) {
                continue;
            }
            let xr: Vec<BigRational> = x.iter().map(|&v| rat(v, 1)).collect();
            if linalg::pairing(&xr, gram, &xr) <= *bound {
                out.push(x);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn a1_and_a3_short_vectors() {
        let a1 = root_lattice_a(2);
        assert_eq!(a1.short_vectors(&rat(2, 1)).len(), 2);
        let a3 = root_lattice_a(4);
        let sv = a3.short_vectors(&rat(2, 1));
        assert_eq!(sv.len(), 12);
        assert!(sv.iter().all(|(_, n)| *n == rat(2, 1)));
    }

    #[test]
    fn fincke_pohst_matches_box_search() {
        let grams = [
            int_matrix(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]),
            int_matrix(&[&[4, 1, 0, 1], &[1, 4, 1, 0], &[0, 1, 6, 2], &[1, 0, 2, 4]]),
            int_matrix(&[&[10, 7], &[7, 6]]),
        ];
        for g in grams {
            let g = to_rat(&g);
            for bound in [rat(2, 1), rat(6, 1), rat(8, 1)] {
                let mut fp: Vec<Vec<i64>> = short_vector_coords(&g, &bound, None).into_iter().map(|(x, _)| x).collect();
                fp.sort();
                assert_eq!(fp, brute_short(&g, &bound, 6));
            }
        }
    }

    #[test]
    fn dual_and_determinant() {
        let a1 = root_lattice_a(2);
        let d = a1.dual();
        assert_eq!(d.gram()[(0, 0)], rat(1, 2));
        assert_eq!(d.det(), a1.det().recip());
        let a3 = root_lattice_a(4);
        assert_eq!(a3.dual().det() * a3.det(), rat(1, 1));
        assert!(a3.is_sublattice_of(&a3.dual()));
    }

    #[test]
    fn discriminant_examples() {
        let disc = root_lattice_a(2).discriminant().unwrap();
        assert_eq!(disc.module.factors(), &[2]);
        assert_eq!(disc.module.q_rational(disc.module.gen(0)), rat(1, 4));
        let a3 = root_lattice_a(4);
        let disc = a3.discriminant().unwrap();
        assert_eq!(disc.module.factors(), &[4]);
        let q = disc.module.q_rational(disc.module.gen(0));
        assert!(q == rat(3, 8) || q == rat(3, 8) * rat(9, 1) - rat(3, 1));
        assert_eq!(BigRational::from_integer(BigInt::from(disc.module.size() as i64)), a3.det());
        for x in 0..disc.module.size() {
            assert_eq!(disc.class_of(&disc.representative(x)).unwrap(), x);
        }
    }

    #[test]
    fn index_and_fixed_lattices() {
        let a3 = root_lattice_a(4);
        let two = Lattice::new(a3.form().clone(), to_rat(&int_matrix(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]))).unwrap();
        assert_eq!(two.index_in(&a3).unwrap(), BigInt::from(8));
        assert_eq!(a3.index_in(&a3).unwrap(), BigInt::one());
        assert!(a3.index_in(&two).is_err());
        let id = Isometry::identity(3);
        let (f, c) = a3.fixed_and_coinvariant(&id);
        assert_eq!((f.rank(), c.rank()), (3, 0));
        let neg = Isometry { mat: int_matrix(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]) };
        let (f, c) = a3.fixed_and_coinvariant(&neg);
        assert_eq!((f.rank(), c.rank()), (0, 3));
        // The diagram flip of A_3 fixes a rank-2 sublattice.
        let flip = Isometry { mat: int_matrix(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]) };
        assert!(a3.is_isometry(&flip));
        let (f, c) = a3.fixed_and_coinvariant(&flip);
        assert_eq!(f.rank() + c.rank(), 3);
        assert_eq!(f.rank(), 2);
    }

    #[test]
    fn json_round_trip() {
        let l = root_lattice_a(4).dual();
        let j = l.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = Lattice::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, l);
        let g = Isometry { mat: int_matrix(&[&[0, 1], &[1, 0]]) };
        assert_eq!(Isometry::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn coset_vectors_of_a1_dual() {
        let a1 = root_lattice_a(2);
        let half = vec![rat(1, 2)];
        let sv = a1.coset_short_vectors(&half, &rat(1, 2));
        assert_eq!(sv.len(), 2);
        assert!(sv.iter().all(|(_, n)| *n == rat(1, 2)));
    }
}
