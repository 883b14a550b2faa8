//! Locating the orbifold automorphism group inside `O(Irr)`.
//!
//! Candidates of the right index are screened by the conditions that single
//! out the automorphism group: transitivity on `S_g`, the order of the
//! stabilizer of the `V_L(1)` label, and containment of the label maps that
//! automorphisms of the lattice theory are known to induce. A known map is
//! only pinned on a subgroup of labels (its footprint), so containment means
//! that the candidate has some element extending it.

use coinv_core::fqm::{FqGroup, FqMap, FqModule, ModAction, OrthogonalGroup};
use coinv_core::glue::BConstruction;
use coinv_core::irr::{hk_untwisted_action, sigma_label_action, IrrSpace, PartialMap};
use permgroup::index2::index2_subgroups;
use permgroup::StabChain;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

/// A partial label map given on generators of its domain; it is a
/// homomorphism on the subgroup they generate.
#[derive(Clone, Debug)]
pub struct Footprint {
    pub name: String,
    pub points: Vec<usize>,
    pub images: Vec<usize>,
}

fn from_partial(name: String, points: Vec<usize>, map: &PartialMap) -> Result<Footprint, VerifyError> {
    let images = points
        .iter()
        .map(|&p| map.get(p).ok_or_else(|| VerifyError::Group(format!("{name}: label {p} outside the domain"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Footprint { name, points, images })
}

/// Footprints of automorphisms commuting with the lifted `g` (plain case):
///
/// * `sigma_alpha` for `alpha` running over generators of `L*/L`, on the
///   untwisted sector;
/// * lifts of generators of `C(g)`: such a lift preserves every eigenspace
///   `V_L(j)` and moves `(lambda, (0, j))` to `(h lambda, (0, j + s(lambda)))`
///   with `s` a homomorphism; composing with a suitable `sigma_alpha` makes
///   `s = 0`, and the `sigma_alpha` are screened separately;
/// * `h_k` for every `k`, on the labels `(j gamma, (0, i))`.
pub fn known_footprints(
    irr: &IrrSpace,
    b: &BConstruction,
    disc: &FqModule,
    c_maps: &[FqMap],
) -> Result<Vec<Footprint>, VerifyError> {
    let lm = &irr.lambda_module;
    let untwisted: Vec<usize> =
        (0..lm.rank()).map(|k| irr.label(lm.gen(k), 0, 0)).chain([irr.label(0, 0, 1)]).collect();
    let mut out = Vec::new();
    for k in 0..lm.rank() {
        let alpha = irr.disc.representative(irr.lambda_to_disc[lm.gen(k)]);
        let s = sigma_label_action(irr, &alpha)?;
        out.push(from_partial(format!("sigma generator {k}"), untwisted.clone(), &s.untwisted)?);
    }
    let disc_to_lambda: std::collections::HashMap<usize, usize> =
        irr.lambda_to_disc.iter().enumerate().map(|(a, &d)| (d, a)).collect();
    for (i, f) in c_maps.iter().enumerate() {
        let images = (0..lm.rank())
            .map(|k| {
                let d = f.apply(disc, irr.lambda_to_disc[lm.gen(k)]);
                irr.label(disc_to_lambda[&d], 0, 0)
            })
            .chain([irr.label(0, 0, 1)])
            .collect();
        out.push(Footprint { name: format!("centralizer generator {i}"), points: untwisted.clone(), images });
    }
    let gamma = irr.lambda_of(&b.gamma)?;
    let hk_points = vec![irr.label(gamma, 0, 0), irr.label(0, 0, 1)];
    for k in 0..irr.n as i64 {
        let p = hk_untwisted_action(irr, &b.gamma, k)?;
        out.push(from_partial(format!("h_{k}"), hk_points.clone(), &p)?);
    }
    Ok(out)
}

/// `O(Irr)` re-based at each distinct footprint domain, so that extensions
/// can be read off coset representatives.
pub struct FootprintTester {
    rebased: Vec<(Vec<usize>, StabChain<ModAction>)>,
}

impl FootprintTester {
    pub fn new(full: &FqGroup, footprints: &[Footprint], seed: u64) -> FootprintTester {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rebased: Vec<(Vec<usize>, StabChain<ModAction>)> = Vec::new();
        for f in footprints {
            if !rebased.iter().any(|(p, _)| *p == f.points) {
                rebased.push((f.points.clone(), full.chain.with_base(&f.points, &mut rng)));
            }
        }
        FootprintTester { rebased }
    }

    fn chain_for(&self, f: &Footprint) -> &StabChain<ModAction> {
        &self.rebased.iter().find(|(p, _)| *p == f.points).expect("domain was rebased").1
    }

    /// Whether the full group extends the footprint at all.
    pub fn extendable(&self, f: &Footprint) -> bool {
        self.chain_for(f).element_mapping_base(&f.images).is_some()
    }

    /// Whether the index-2 subgroup `h` has an element extending `f`. The
    /// extensions in the full group form a coset `xK` of the pointwise
    /// stabilizer `K` of the domain, and `xK` meets `h` iff `x` lies in `h`
    /// or `K` does not.
    pub fn extends_in_index2(&self, f: &Footprint, h: &StabChain<ModAction>) -> Option<bool> {
        let chain = self.chain_for(f);
        let x = chain.element_mapping_base(&f.images)?;
        let k = f.points.len();
        let outside = chain.levels().get(k).is_some_and(|l| l.gens.iter().any(|y| !h.contains(y)));
        Some(outside || h.contains(&x))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Index2Candidate {
    /// Sign character on the generators of `O(Irr)`, as a bit string.
    pub signs: String,
    pub order: u128,
    pub transitive_on_sg: bool,
    pub stabilizer: u128,
    /// Names of the footprints without an extension in the candidate.
    pub missing_footprints: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Index2Outcome {
    pub candidates: Vec<Index2Candidate>,
    pub target_stabilizer: u128,
}

impl Index2Outcome {
    /// Candidates passing transitivity and the stabilizer order.
    pub fn order_screened(&self) -> Vec<&Index2Candidate> {
        self.candidates.iter().filter(|c| c.transitive_on_sg && c.stabilizer == self.target_stabilizer).collect()
    }

    /// Candidates passing every screen, footprints included.
    pub fn selected(&self) -> Vec<&Index2Candidate> {
        self.order_screened().into_iter().filter(|c| c.missing_footprints.is_empty()).collect()
    }
}

/// All index-2 subgroups of `O(Irr)`, screened.
pub fn index2_search(
    o_irr: &OrthogonalGroup,
    sg: &[usize],
    vacuum: usize,
    target_stabilizer: u128,
    footprints: &[Footprint],
    tester: &FootprintTester,
    seed: u64,
) -> Result<Index2Outcome, VerifyError> {
    let g = &o_irr.group;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subs = index2_subgroups(&g.action, g.generators(), g.order(), &mut rng);
    let mut candidates = Vec::new();
    for h in subs {
        let transitive_on_sg = permgroup::orbit::transitive_on(&g.action, &h.gens, sg)
            .map_err(|e| VerifyError::Group(format!("S_g is not invariant: {e}")))?;
        let stabilizer = h.chain.order() / h.chain.orbit_of(vacuum).len() as u128;
        let mut missing_footprints = Vec::new();
        for f in footprints {
            match tester.extends_in_index2(f, &h.chain) {
                Some(true) => {}
                Some(false) => missing_footprints.push(f.name.clone()),
                None => return Err(VerifyError::Group(format!("{} is not induced by O(Irr)", f.name))),
            }
        }
        let k = g.generators().len();
        let signs = (0..k).map(|i| if h.signs >> i & 1 == 1 { '1' } else { '0' }).collect();
        candidates.push(Index2Candidate { signs, order: h.chain.order(), transitive_on_sg, stabilizer, missing_footprints });
    }
    Ok(Index2Outcome { candidates, target_stabilizer })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DeepCandidate {
    pub order: u128,
    pub transitive_on_sg: bool,
    pub stabilizer: u128,
}

/// Subgroups of a given index in `O(Irr) = O(Irr_2) x O(Irr_p)`, screened
/// by transitivity on `S_g` and the stabilizer order, and the passing ones
/// grouped into conjugacy classes.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DeepOutcome {
    pub index: u128,
    pub factor_orders: Vec<u128>,
    pub candidates: Vec<DeepCandidate>,
    pub target_stabilizer: u128,
    /// Sizes of the conjugacy classes of the passing subgroups.
    pub passing_classes: Vec<usize>,
    pub passing_order: Option<u128>,
}

/// Searches the subgroups of index `d` of `O(Irr)` through the primary factors.
pub fn goursat_search(
    irr: &IrrSpace,
    sg: &[usize],
    vacuum: usize,
    target_stabilizer: u128,
    d: usize,
    seed: u64,
) -> Result<DeepOutcome, VerifyError> {
    use coinv_core::fqm::{orthogonal_group, primary_decompose};
    use permgroup::goursat::{concat, conjugacy_classes, product_subgroups_of_index, PermGroup};
    use permgroup::Perm;
    use std::collections::HashSet;
    use std::sync::Arc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = &irr.module;
    let pd = primary_decompose(m);
    let [(_, m2), (_, mp)] = pd.parts.as_slice() else {
        return Err(VerifyError::Group("expected exactly two primary parts".into()));
    };
    let factor = |part: &FqModule| -> Result<PermGroup, VerifyError> {
        let o = orthogonal_group(Arc::new(part.clone()), seed)?;
        let gens: Vec<Perm> = o.group.generators().iter().map(|f| Perm(f.to_perm(part))).collect();
        Ok(PermGroup::new(part.size(), &gens, &mut ChaCha8Rng::seed_from_u64(seed)))
    };
    let (a, b) = (factor(m2)?, factor(mp)?);
    let na = m2.size();
    let split = |x: usize| -> (usize, usize) {
        let c = pd.module.coeffs(pd.from_original[x]);
        let enc = |part: &FqModule, idxs: &[usize]| part.encode(&idxs.iter().map(|&i| c[i] as i64).collect::<Vec<_>>());
        (enc(m2, &pd.part_gens[0]), enc(mp, &pd.part_gens[1]))
    };
    let sg_pairs: HashSet<(usize, usize)> = sg.iter().map(|&x| split(x)).collect();
    let start = split(vacuum);

    let subs = product_subgroups_of_index(&a, &b, d, &mut rng);
    let mut candidates = Vec::new();
    let mut passing = Vec::new();
    for h in &subs {
        let mut seen: HashSet<(usize, usize)> = HashSet::from([start]);
        let mut queue = vec![start];
        while let Some((x, y)) = queue.pop() {
            for g in h.gens() {
                let z = (g.apply(x), g.apply(na + y) - na);
                if seen.insert(z) {
                    queue.push(z);
                }
            }
        }
        let transitive_on_sg = seen == sg_pairs;
        let stabilizer = h.order() / seen.len() as u128;
        if transitive_on_sg && stabilizer == target_stabilizer {
            passing.push(h.clone());
        }
        candidates.push(DeepCandidate { order: h.order(), transitive_on_sg, stabilizer });
    }
    let ida = Perm::identity(na);
    let idb = Perm::identity(mp.size());
    let ambient: Vec<Perm> =
        a.gens().iter().map(|x| concat(x, &idb)).chain(b.gens().iter().map(|y| concat(&ida, y))).collect();
    let classes = conjugacy_classes(&passing, &ambient)
        .ok_or_else(|| VerifyError::Group("a conjugate of a passing subgroup failed the screen".into()))?;
    Ok(DeepOutcome {
        index: d as u128,
        factor_orders: vec![a.order(), b.order()],
        candidates,
        target_stabilizer,
        passing_classes: classes.iter().map(Vec::len).collect(),
        passing_order: passing.first().map(PermGroup::order),
    })
}
