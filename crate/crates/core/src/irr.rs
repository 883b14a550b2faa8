//! The quadratic space of irreducible-module labels of the orbifold
//! `V_{Lambda_g}^{hat g}`, the distinguished sets `S_g`, and label maps
//! induced by known automorphisms.
//!
//! Plain case (`|hat g| = n` on `V_Lambda`): labels `(lambda, (i, j))` with
//! `lambda` in `D(L)` and `(i, j)` in `(Z/n)^2`, `q = q(lambda) + ij/n`.
//!
//! Doubled case (`|hat g| = 2n`): labels `(lambda, (i, j))` with `lambda` in
//! `Y_g/L` and `(i, j)` in `(Z/2n)^2`,
//! `q = q(lambda) + ij/2n + (3/4) [i + j odd]`.
//!
//! In both cases `i` is the twisted sector and `j` the grading index.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::fqm::{FqMap, FqModule};
use crate::glue::{BConstruction, ClassTag};
use crate::lattice::{Discriminant, Lattice};
use crate::linalg::{left_kernel_int, rank, rat, IntMatrix, RatMatrix};

/// The vectors `h`, `u` and the lattice `Y_g` of the doubled case.
#[derive(Clone, Debug)]
pub struct DoubledFrame {
    pub h: Vec<BigRational>,
    pub u: Vec<BigRational>,
    pub y: Lattice,
    /// Whether `u` lies in `(n/2) chi + h + L` rather than `(n/2) chi + L`.
    pub u_shifted_by_h: bool,
}

impl DoubledFrame {
    /// The defining properties: norms, `(u|h) = 1/2`, `h` in `(n/2) gamma + L`,
    /// both vectors in `L*`, in `(1/2) L` and negated by `g^{n/2}`, and
    /// `L*/Y_g` elementary abelian of order 4.
    pub fn check(&self, b: &BConstruction) -> bool {
        let p = b.n / 2;
        let neg_by_gp = |v: &[BigRational]| {
            let mut w = v.to_vec();
            for _ in 0..p {
                w = b.apply_g(&w);
            }
            w.iter().zip(v).all(|(x, y)| *x == -y)
        };
        let doubled = |v: &[BigRational]| v.iter().map(|x| x * rat(2, 1)).collect::<Vec<_>>();
        let h_minus: Vec<BigRational> =
            self.h.iter().zip(&b.gamma).map(|(x, g)| x - g * rat(p as i64, 1)).collect();
        let dual = b.l.dual();
        let quotient = self.y.quotient_in(&dual).map(|(f, _)| f);
        b.r.norm(&self.h) == rat(2, 1)
            && b.r.norm(&self.u) == rat(3, 2)
            && b.r.inner(&self.u, &self.h) == rat(1, 2)
            && b.l.contains(&h_minus)
            && b.l.pairs_integrally(&self.u)
            && b.l.pairs_integrally(&self.h)
            && b.l.contains(&doubled(&self.u))
            && b.l.contains(&doubled(&self.h))
            && neg_by_gp(&self.u)
            && neg_by_gp(&self.h)
            && quotient.is_ok_and(|f| f == vec![BigInt::from(2), BigInt::from(2)])
    }
}

#[derive(Clone, Debug)]
pub struct IrrSpace {
    pub class: ClassTag,
    pub n: u32,
    /// Modulus of the sector and grading indices (`n` or `2n`).
    pub m: u32,
    pub module: Arc<FqModule>,
    /// The `lambda` part (`D(L)` or `Y_g/L`).
    pub lambda_module: FqModule,
    /// `lambda` element to the corresponding element of `D(L)`.
    pub lambda_to_disc: Vec<usize>,
    disc_to_lambda: FxHashMap<usize, usize>,
    pub disc: Discriminant,
    pub frame: Option<DoubledFrame>,
}

impl IrrSpace {
    pub fn doubled(&self) -> bool {
        self.frame.is_some()
    }

    /// Element index of the label `(lambda, (i, j))`.
    pub fn label(&self, lambda: usize, i: i64, j: i64) -> usize {
        let mut c: Vec<i64> = self.lambda_module.coeffs(lambda).iter().map(|&x| x as i64).collect();
        c.push(i);
        c.push(j);
        self.module.encode(&c)
    }

    /// Inverse of [`IrrSpace::label`].
    pub fn unlabel(&self, x: usize) -> (usize, u32, u32) {
        let c = self.module.coeffs(x);
        let r = self.lambda_module.rank();
        let lam: Vec<i64> = c[..r].iter().map(|&v| v as i64).collect();
        (self.lambda_module.encode(&lam), c[r] as u32, c[r + 1] as u32)
    }

    /// The `lambda` label of a vector of `L*` (in `Y_g` in the doubled case).
    pub fn lambda_of(&self, v: &[BigRational]) -> Result<usize, CoreError> {
        let d = self.disc.class_of(v)?;
        self.disc_to_lambda
            .get(&d)
            .copied()
            .ok_or_else(|| CoreError::NotSublattice("vector outside the lambda lattice".into()))
    }

    /// Label of the untwisted module `V_L(1)`.
    pub fn vacuum_grade_one(&self) -> usize {
        if self.doubled() {
            self.label(0, 0, 2)
        } else {
            self.label(0, 0, 1)
        }
    }
}

fn hyperbolic(modulus: u32, doubled: bool) -> FqModule {
    let m = modulus as i64;
    if doubled {
        let q = [rat(3, 4), rat(3, 4)];
        let off = rat(1, m) + rat(1, 2);
        let b = vec![vec![rat(3, 2), off.clone()], vec![off, rat(3, 2)]];
        FqModule::new(vec![modulus, modulus], &q, &b).expect("valid hyperbolic module")
    } else {
        let q = [BigRational::zero(), BigRational::zero()];
        let b = vec![vec![BigRational::zero(), rat(1, m)], vec![rat(1, m), BigRational::zero()]];
        FqModule::new(vec![modulus, modulus], &q, &b).expect("valid hyperbolic module")
    }
}

/// `D(L) + ((Z/n)^2, ij/n)`.
pub fn build_irr_plain(b: &BConstruction) -> Result<IrrSpace, CoreError> {
    if b.spec.class.doubled() {
        return Err(CoreError::Unsupported(format!("class {} needs the doubled construction", b.spec.class)));
    }
    let disc = b.l.discriminant()?;
    let lambda_module = disc.module.clone();
    let module = Arc::new(lambda_module.direct_sum(&hyperbolic(b.n, false)));
    let lambda_to_disc: Vec<usize> = (0..lambda_module.size()).collect();
    let disc_to_lambda = lambda_to_disc.iter().map(|&x| (x, x)).collect();
    Ok(IrrSpace {
        class: b.spec.class,
        n: b.n,
        m: b.n,
        module,
        lambda_module,
        lambda_to_disc,
        disc_to_lambda,
        disc,
        frame: None,
    })
}

/// Minimal vectors of the coset `v + L` with their norm, lexicographically sorted.
fn coset_minimal(b: &BConstruction, v: &[BigRational]) -> (BigRational, Vec<Vec<BigRational>>) {
    let mut bound = rat(1, 1);
    loop {
        let vs = b.l.coset_short_vectors(v, &bound);
        if let Some(min) = vs.iter().map(|(_, n)| n.clone()).min() {
            let mins = vs.into_iter().filter(|(_, n)| *n == min).map(|(v, _)| v).collect();
            return (min, mins);
        }
        bound += rat(1, 2);
    }
}

/// `h`, `u` and `Y_g` for a doubled class.
///
/// `u` is the lexicographically least norm-3/2 vector of `(n/2) chi + L`.
/// When that coset has larger minimum, `u` is taken from `(n/2) chi + h + L`
/// instead; `Y_g` only depends on `u + L` through pairings modulo those
/// with `h`, so it is the same lattice either way.
pub fn doubled_frame(b: &BConstruction) -> Result<DoubledFrame, CoreError> {
    let a1 = b.spec.blocks.iter().position(|&k| k == 2).ok_or_else(|| CoreError::BadGlue("no A_1 block".into()))?;
    let mut h = b.embed(a1, &[BigRational::one()]);
    let half: Vec<BigRational> = b.chi.iter().map(|x| x * rat(b.n as i64 / 2, 1)).collect();
    let (min, mins) = coset_minimal(b, &half);
    let (u, u_shifted_by_h) = if min == rat(3, 2) {
        (mins[0].clone(), false)
    } else {
        let shifted: Vec<BigRational> = half.iter().zip(&h).map(|(x, y)| x + y).collect();
        let (min2, mins2) = coset_minimal(b, &shifted);
        if min2 != rat(3, 2) {
            return Err(CoreError::BadGlue(format!("no norm 3/2 vector near (n/2)chi: minima {min} and {min2}")));
        }
        (mins2[0].clone(), true)
    };
    let uh = b.r.inner(&u, &h);
    if uh == rat(-1, 2) {
        h = h.iter().map(|x| -x).collect();
    } else if uh != rat(1, 2) {
        return Err(CoreError::BadGlue(format!("(u|h) = {uh}, expected +-1/2")));
    }
    // Y = {v in L* : (v|u), (v|h) in Z}: kernel of L* -> (Z/2)^2.
    let dual = b.l.dual();
    let pu = dual.pairings(&u);
    let ph = dual.pairings(&h);
    let r = dual.rank();
    let mut m = IntMatrix::zeros(r + 2, 2);
    for i in 0..r {
        let (a, c) = (&pu[i] * rat(2, 1), &ph[i] * rat(2, 1));
        if !a.is_integer() || !c.is_integer() {
            return Err(CoreError::BadGlue("u or h is not in (1/2)L".into()));
        }
        m[(i, 0)] = a.to_integer();
        m[(i, 1)] = c.to_integer();
    }
    m[(r, 0)] = BigInt::from(2);
    m[(r + 1, 1)] = BigInt::from(2);
    let ker = left_kernel_int(&m);
    let vecs: Vec<Vec<BigRational>> = (0..ker.rows())
        .map(|i| dual.vector(&ker.row(i)[..r].iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>()))
        .collect();
    let y = Lattice::span(b.r.form().clone(), &vecs)?;
    Ok(DoubledFrame { h, u, y, u_shifted_by_h })
}

/// `Y_g/L + ((Z/2n)^2, ij/2n + (3/4)[i + j odd])`.
pub fn build_irr_doubled(b: &BConstruction) -> Result<IrrSpace, CoreError> {
    if !b.spec.class.doubled() {
        return Err(CoreError::Unsupported(format!("class {} uses the plain construction", b.spec.class)));
    }
    let frame = doubled_frame(b)?;
    let disc = b.l.discriminant()?;
    let (factors, reps) = b.l.quotient_in(&frame.y)?;
    let factors: Vec<u32> = factors.iter().map(|f| u32::try_from(f).expect("small factor")).collect();
    let q: Vec<BigRational> = reps.iter().map(|v| b.r.norm(v) * rat(1, 2)).collect();
    let bf: Vec<Vec<BigRational>> = reps.iter().map(|v| reps.iter().map(|w| b.r.inner(v, w)).collect()).collect();
    let lambda_module = FqModule::new(factors, &q, &bf)?;
    let gen_classes: Vec<usize> = reps.iter().map(|v| disc.class_of(v)).collect::<Result<_, _>>()?;
    let lambda_to_disc: Vec<usize> = (0..lambda_module.size())
        .map(|x| {
            lambda_module
                .coeffs(x)
                .iter()
                .zip(&gen_classes)
                .fold(0, |acc, (&c, &g)| disc.module.add(acc, disc.module.scale(g, c as i64)))
        })
        .collect();
    let disc_to_lambda: FxHashMap<usize, usize> = lambda_to_disc.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    assert_eq!(disc_to_lambda.len(), lambda_module.size(), "Y_g/L embeds in D(L)");
    let m = 2 * b.n;
    let module = Arc::new(lambda_module.direct_sum(&hyperbolic(m, true)));
    Ok(IrrSpace {
        class: b.spec.class,
        n: b.n,
        m,
        module,
        lambda_module,
        lambda_to_disc,
        disc_to_lambda,
        disc,
        frame: Some(frame),
    })
}

pub fn build_irr(b: &BConstruction) -> Result<IrrSpace, CoreError> {
    if b.spec.class.doubled() {
        build_irr_doubled(b)
    } else {
        build_irr_plain(b)
    }
}

/// The distinguished sets: `S_g`, and in the doubled case also its 2-part
/// and odd part.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SgSets {
    pub sg: Vec<usize>,
    pub sg2: Vec<usize>,
    pub sgp: Vec<usize>,
}

pub fn sg_set(irr: &IrrSpace) -> SgSets {
    let m = &irr.module;
    let n = irr.n;
    if !irr.doubled() {
        let sg = (0..m.size()).filter(|&x| m.q(x) == 0 && m.order(x) == n).collect();
        return SgSets { sg, sg2: Vec::new(), sgp: Vec::new() };
    }
    let p = n / 2;
    let mut sg: Vec<usize> =
        (0..m.size()).filter(|&a| m.order(a) == 2 * n).map(|a| m.scale(a, 2)).filter(|&x| m.q(x) == 0).collect();
    sg.sort_unstable();
    sg.dedup();
    let mut sg2: Vec<usize> = (0..m.size())
        .filter(|&a| m.order(a) == 4)
        .map(|a| m.scale(a, 2))
        .filter(|&x| m.q(x) == 0)
        .collect();
    sg2.sort_unstable();
    sg2.dedup();
    let sgp: Vec<usize> =
        (0..m.size()).filter(|&a| m.order(a) == p && m.q(a) == 0).collect();
    SgSets { sg, sg2, sgp }
}

/// `{a + b : a in A, b in B}`, sorted.
pub fn sumset(m: &FqModule, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().flat_map(|&x| b.iter().map(move |&y| m.add(x, y))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// A map defined on a subset of the module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialMap {
    pub pairs: Vec<(usize, usize)>,
}

impl PartialMap {
    pub fn preserves_q(&self, m: &FqModule) -> bool {
        self.pairs.iter().all(|&(x, y)| m.q(x) == m.q(y))
    }

    /// Injective and additive wherever both sides are in the domain.
    pub fn is_partial_isomorphism(&self, m: &FqModule) -> bool {
        let mut map = vec![usize::MAX; m.size()];
        let mut hit = vec![false; m.size()];
        for &(x, fx) in &self.pairs {
            if map[x] != usize::MAX && map[x] != fx {
                return false;
            }
            map[x] = fx;
        }
        let domain: Vec<(usize, usize)> =
            map.iter().enumerate().filter(|p| *p.1 != usize::MAX).map(|(x, &fx)| (x, fx)).collect();
        for &(_, fx) in &domain {
            if std::mem::replace(&mut hit[fx], true) {
                return false;
            }
        }
        // On a subgroup, additivity against a generating set suffices.
        let mut span = vec![false; m.size()];
        span[0] = true;
        let mut size = 1;
        let mut gens = Vec::new();
        for &(x, fx) in &domain {
            if span[x] {
                continue;
            }
            gens.push((x, fx));
            let mut frontier: Vec<usize> = (0..m.size()).filter(|&s| span[s]).collect();
            while let Some(s) = frontier.pop() {
                let t = m.add(s, x);
                if !span[t] {
                    span[t] = true;
                    size += 1;
                    frontier.push(t);
                }
            }
        }
        let closed = size == domain.len() && domain.iter().all(|&(x, _)| span[x]);
        let others: &[(usize, usize)] = if closed { &gens } else { &domain };
        domain.iter().all(|&(x, fx)| {
            others.iter().all(|&(y, fy)| {
                let fxy = map[m.add(x, y)];
                (fxy == usize::MAX && !closed) || fxy == m.add(fx, fy)
            })
        })
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == x).map(|p| p.1)
    }
}

/// Label action of the inner automorphism `sigma_alpha`, `alpha` in `L*`.
#[derive(Clone, Debug)]
pub struct SigmaAction {
    /// Defined on the untwisted sector `i = 0` always.
    pub untwisted: PartialMap,
    /// The extension to all sectors, when `n q(alpha) in Z`.
    pub full: Option<FqMap>,
}

/// `(lambda, (i, j)) -> (lambda + i alpha, (i, j - n b(alpha, lambda) + i j0))`
/// with `j0 = -n q(alpha)`; on the untwisted sector this is the shift
/// `j -> j - s` for `(alpha|lambda) in s/n + Z`. Plain case only.
pub fn sigma_label_action(irr: &IrrSpace, alpha: &[BigRational]) -> Result<SigmaAction, CoreError> {
    if irr.doubled() {
        return Err(CoreError::Unsupported("label action of sigma is modelled in the plain case".into()));
    }
    let a = irr.lambda_of(alpha)?;
    let lm = &irr.lambda_module;
    let m = &irr.module;
    let n = irr.n as i64;
    let den = lm.den() as i64;
    // n * b(alpha, lambda) as an integer mod n.
    let shift = |lam: usize| -> i64 {
        let v = lm.b(a, lam) as i64 * n;
        assert_eq!(v % den, 0, "(alpha|lambda) lies in (1/n)Z");
        v / den
    };
    let untwisted = PartialMap {
        pairs: (0..lm.size()).flat_map(|lam| (0..n).map(move |j| (lam, j))).map(|(lam, j)| (irr.label(lam, 0, j), irr.label(lam, 0, j - shift(lam)))).collect(),
    };
    let qa = lm.q(a) as i64 * n;
    let full = (qa % den == 0).then(|| {
        let j0 = -(qa / den);
        let r = lm.rank();
        let mut images: Vec<u32> = (0..r)
            .map(|k| {
                let g = lm.gen(k);
                irr.label(g, 0, -shift(g)) as u32
            })
            .collect();
        // Sector generator (0, (1, 0)) and grading generator (0, (0, 1)).
        images.push(irr.label(a, 1, j0) as u32);
        images.push(irr.label(0, 0, 1) as u32);
        FqMap(images)
    });
    if let Some(f) = &full {
        debug_assert!(f.is_hom(m));
    }
    Ok(SigmaAction { untwisted, full })
}

/// `(j gamma, (0, i)) -> (i gamma, (0, ik - j))` on the subgroup generated by
/// `gamma` and the grading index. Plain case only.
pub fn hk_untwisted_action(irr: &IrrSpace, gamma: &[BigRational], k: i64) -> Result<PartialMap, CoreError> {
    if irr.doubled() {
        return Err(CoreError::Unsupported("hk label action is modelled in the plain case".into()));
    }
    let g = irr.lambda_of(gamma)?;
    let lm = &irr.lambda_module;
    let n = irr.n as i64;
    let pairs = (0..n)
        .flat_map(|j| (0..n).map(move |i| (j, i)))
        .map(|(j, i)| (irr.label(lm.scale(g, j), 0, i), irr.label(lm.scale(g, i), 0, i * k - j)))
        .collect();
    Ok(PartialMap { pairs })
}

/// Eigenvalue multiplicities `d_j = dim h_(j)` of `g^i` (eigenvalue
/// `exp(2 pi i j / n)`), read off the block structure of `g`.
pub fn eigen_multiplicities(b: &BConstruction, i: u32) -> Vec<u32> {
    let n = b.n;
    let mut d = vec![0u32; n as usize];
    for (blk, &e) in b.blocks.iter().zip(&b.spec.digits) {
        let k = blk.k;
        for t in 1..k {
            let j = (n / k) * ((i * e * t) % k);
            d[j as usize] += 1;
        }
    }
    d
}

/// Coefficients (lowest degree first) of the `m`-th cyclotomic polynomial.
fn cyclotomic(m: u32) -> Vec<i64> {
    // x^m - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![0i64; m as usize + 1];
    p[0] = -1;
    p[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let q = cyclotomic(d);
            p = poly_div_exact(&p, &q);
        }
    }
    p
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let mut out = vec![0i64; a.len() - db];
    for k in (0..out.len()).rev() {
        let c = rem[k + db] / b[db];
        out[k] = c;
        for (t, &bt) in b.iter().enumerate() {
            rem[k + t] -= c * bt;
        }
    }
    assert!(rem.iter().all(|&x| x == 0), "cyclotomic division is exact");
    out
}

/// The same multiplicities computed from the matrix of `g^i` on `L`: the
/// kernel of `Phi_m(g^i)` has dimension `phi(m)` times the multiplicity of
/// each primitive `m`-th root of unity.
pub fn eigen_multiplicities_from_matrix(b: &BConstruction, i: u32) -> Vec<u32> {
    let n = b.n;
    let gi = crate::linalg::to_rat(&b.g.pow(i).mat);
    let r = gi.rows();
    let mut d = vec![0u32; n as usize];
    for j in 0..n {
        let m = n / j.gcd(&n);
        let phi = cyclotomic(m);
        let mut acc = RatMatrix::zeros(r, r);
        let mut pw = RatMatrix::identity(r);
        for &c in &phi {
            if c != 0 {
                for x in 0..r {
                    for y in 0..r {
                        acc[(x, y)] = &acc[(x, y)] + &pw[(x, y)] * rat(c, 1);
                    }
                }
            }
            pw = pw.mul(&gi);
        }
        let kernel_dim = (r - rank(&acc)) as u32;
        d[j as usize] = kernel_dim / (phi.len() as u32 - 1);
    }
    d
}

/// `rho_i = (1/4n^2) sum_j j (n - j) d_j` for `gcd(i, n) = 1`.
pub fn vacuum_anomaly(b: &BConstruction, i: u32) -> Result<BigRational, CoreError> {
    let n = b.n;
    if i.gcd(&n) != 1 {
        return Err(CoreError::Unsupported(format!("sector {i} is not coprime to {n}")));
    }
    let d = eigen_multiplicities(b, i);
    let s: i64 = (1..n).map(|j| (j * (n - j)) as i64 * d[j as usize] as i64).sum();
    Ok(rat(s, 4 * (n as i64) * (n as i64)))
}

/// Whether `rho` mod 1 is among the `q`-values of the labels `(0, (i, j))`.
pub fn anomaly_matches_sector(irr: &IrrSpace, i: u32, rho: &BigRational) -> bool {
    let frac = rho - BigRational::from_integer(rho.floor().to_integer());
    (0..irr.m as i64).any(|j| irr.module.q_rational(irr.label(0, i as i64, j)) == frac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glue::table2_build;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(10), vec![1, -1, 1, -1, 1]);
    }

    #[test]
    fn hyperbolic_planes() {
        let h = hyperbolic(4, false);
        assert_eq!(h.q_rational(h.encode(&[1, 1])), rat(1, 4));
        let d = hyperbolic(12, true);
        assert_eq!(d.q_rational(d.encode(&[1, 0])), rat(3, 4));
        assert_eq!(d.q_rational(d.encode(&[1, 1])), rat(1, 12));
        for i in 0..12 {
            for j in 0..12 {
                let parity = if (i + j) % 2 == 1 { rat(3, 4) } else { rat(0, 1) };
                let expected = rat(i * j, 12) + parity;
                let expected = &expected - BigRational::from_integer(expected.floor().to_integer());
                assert_eq!(d.q_rational(d.encode(&[i, j])), expected);
            }
        }
    }

    #[test]
    fn class_4c_plain_space() {
        let b = table2_build(ClassTag::C4);
        let irr = build_irr_plain(&b).unwrap();
        assert_eq!(irr.module.size(), 16384);
        assert!(irr.module.is_nondegenerate());
        let s = sg_set(&irr);
        assert!(s.sg.contains(&irr.vacuum_grade_one()));
        assert!(!s.sg.contains(&irr.label(0, 2, 2)));
        assert_eq!(irr.module.q_rational(irr.label(0, 1, 1)), rat(1, 4));
        let rho = vacuum_anomaly(&b, 1).unwrap();
        assert_eq!(rho, rat(3, 4));
        assert_eq!(eigen_multiplicities(&b, 1), vec![0, 4, 6, 4]);
        assert_eq!(eigen_multiplicities_from_matrix(&b, 1), vec![0, 4, 6, 4]);
        assert!(anomaly_matches_sector(&irr, 1, &rho));
    }

    #[test]
    fn partial_isomorphisms() {
        let m = hyperbolic(4, false);
        let e = |i, j| m.encode(&[i, j]);
        let swap = PartialMap { pairs: (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (e(i, j), e(j, i))).collect() };
        assert!(swap.is_partial_isomorphism(&m) && swap.preserves_q(&m));
        // On the subgroup {(i, 0)}: doubling is additive but not injective.
        let double = PartialMap { pairs: (0..4).map(|i| (e(i, 0), e(2 * i, 0))).collect() };
        assert!(!double.is_partial_isomorphism(&m));
        // A bijection of {(i, 0)} that is not additive.
        let bad = PartialMap { pairs: vec![(e(0, 0), e(0, 0)), (e(1, 0), e(1, 0)), (e(2, 0), e(3, 0)), (e(3, 0), e(2, 0))] };
        assert!(!bad.is_partial_isomorphism(&m));
        // Off a subgroup only pairs whose sum is in the domain are compared.
        let loose = PartialMap { pairs: vec![(e(1, 0), e(0, 1)), (e(0, 1), e(1, 0))] };
        assert!(loose.is_partial_isomorphism(&m));
    }

    #[test]
    fn rejects_wrong_case() {
        let b = table2_build(ClassTag::C4);
        assert!(build_irr_doubled(&b).is_err());
        assert!(vacuum_anomaly(&b, 2).is_err());
    }
}
