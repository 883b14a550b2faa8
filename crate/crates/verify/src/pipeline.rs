//! End-to-end run for one class: lattice, lattice groups, discriminant form,
//! module of irreducibles and the automorphism-group identification. Every
//! result becomes a [`Check`] against the expectations file or against an
//! identity the results must satisfy.

use std::sync::Arc;
use std::time::Instant;

use coinv_core::fqm::{image_and_index, orthogonal_group, FqMap, FqModule, OrthogonalGroup};
use coinv_core::glue::{elementary_divisor_multiset, lattice_facts, table2_build, BConstruction, ClassTag};
use coinv_core::irr::{anomaly_matches_sector, build_irr, sg_set, sumset, vacuum_anomaly, IrrSpace};
use coinv_core::isometry::{
    acts_trivially_on_discriminant, aut_group, centralizer, discriminant_action, Centralizer, DiscriminantAction,
    MatrixGroup,
};
use coinv_core::lattice::{Isometry, IsometryJson};
use coinv_core::shape::abelian_type;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::error::VerifyError;
use crate::expect::{ClassExpect, Shape};
use crate::subgroups::{goursat_search, index2_search, known_footprints, DeepOutcome, FootprintTester, Index2Outcome};

/// Pipeline stages, in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Lattice facts and the groups `O(L)`, `C(g)`.
    Lattice,
    /// The discriminant form, its orthogonal group and the image of `C(g)`.
    Discriminant,
    /// The module of irreducibles and its orthogonal group.
    Irreducibles,
    /// Identification of the automorphism group inside `O(Irr)`.
    Automorphisms,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Lattice => "lattice",
            Stage::Discriminant => "discriminant",
            Stage::Irreducibles => "irreducibles",
            Stage::Automorphisms => "automorphisms",
        }
    }
}

/// Where the expected value of a check comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A published value, read from the expectations file.
    Published,
    /// A value derived from published data by arithmetic (block ranks,
    /// order formulas, products of published orders).
    Derived,
    /// An identity between computed values (two routes agreeing,
    /// orbit-stabilizer, structural facts).
    Consistency,
}

/// Topic a check belongs to; the acceptance suite groups checks by it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topic {
    LatticeFacts,
    LatticeGroups,
    OrbitClaims,
    DiscriminantGroups,
    IrrGroups,
    Identification,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub topic: Topic,
    pub stage: Stage,
    pub label: String,
    pub computed: String,
    pub expected: Option<String>,
    pub pass: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
    pub cache_hits: u32,
}

/// The numbers the report tables are built from.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Summary {
    pub rank: Option<usize>,
    pub det: Option<String>,
    pub disc_factors: Option<Vec<u32>>,
    pub o_lattice: Option<u128>,
    pub centralizer: Option<u128>,
    pub class_size: Option<u128>,
    pub o_disc: Option<u128>,
    pub c_mod_g: Option<u128>,
    pub disc_index: Option<u128>,
    pub irr_factors: Option<Vec<u32>>,
    pub o_irr: Option<u128>,
    pub sg_size: Option<usize>,
    pub stabilizer: Option<u128>,
    pub c_voa: Option<u128>,
    pub aut_index: Option<u128>,
    pub aut: Option<u128>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassReport {
    pub class: ClassTag,
    pub upto: Stage,
    pub summary: Summary,
    pub checks: Vec<Check>,
    pub index2: Option<Index2Outcome>,
    /// Present when the deep tier ran.
    pub deep: Option<DeepOutcome>,
    pub timings: Vec<StageTiming>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub upto: Stage,
    /// Run the subgroup searches of index 3 and 4.
    pub deep: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 1, upto: Stage::Automorphisms, deep: false }
    }
}

struct Recorder {
    stage: Stage,
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, id: &str, topic: Topic, label: &str, computed: String, expected: Option<String>, pass: bool, provenance: Provenance) {
        self.checks.push(Check {
            id: id.to_string(),
            topic,
            stage: self.stage,
            label: label.to_string(),
            computed,
            expected,
            pass,
            provenance,
        });
    }

    fn equal<T: PartialEq + ToString>(&mut self, id: &str, topic: Topic, label: &str, computed: T, expected: T, provenance: Provenance) {
        let pass = computed == expected;
        self.push(id, topic, label, computed.to_string(), Some(expected.to_string()), pass, provenance);
    }

    fn order(&mut self, id: &str, topic: Topic, label: &str, computed: u128, expected: &Shape) {
        let pass = computed == expected.order as u128;
        self.push(
            id,
            topic,
            label,
            computed.to_string(),
            Some(format!("{} = |{}|", expected.order, expected.shape)),
            pass,
            Provenance::Published,
        );
    }

    fn holds(&mut self, id: &str, topic: Topic, label: &str, value: bool) {
        self.push(id, topic, label, value.to_string(), Some("true".into()), value, Provenance::Consistency);
    }
}

#[derive(Serialize, Deserialize)]
struct CachedGroup {
    generators: Vec<IsometryJson>,
    search_order: u128,
    chain_order: u128,
}

#[derive(Serialize, Deserialize)]
struct CachedCentralizer {
    generators: Vec<IsometryJson>,
    class_size: usize,
}

#[derive(Serialize, Deserialize)]
struct CachedOrthogonal {
    generators: Vec<FqMap>,
    search_order: u128,
}

fn to_json(gens: &[Isometry]) -> Vec<IsometryJson> {
    gens.iter().map(Isometry::to_json).collect()
}

fn from_json(gens: &[IsometryJson]) -> Result<Vec<Isometry>, VerifyError> {
    Ok(gens.iter().map(Isometry::from_json).collect::<Result<_, _>>()?)
}

/// `O(L)` with both order routes, through the cache.
pub fn cached_aut(b: &BConstruction, cache: &Cache) -> Result<(MatrixGroup, u128, u128, bool), VerifyError> {
    let (c, hit): (CachedGroup, bool) = cache.get_or_compute("aut", &b.l.to_json(), || {
        let a = aut_group(&b.l);
        Ok(CachedGroup { generators: to_json(&a.group.generators()), search_order: a.search_order, chain_order: a.chain_order })
    })?;
    let group = MatrixGroup::from_generators(&b.l, &from_json(&c.generators)?)?;
    Ok((group, c.search_order, c.chain_order, hit))
}

pub fn cached_centralizer(b: &BConstruction, aut: &MatrixGroup, cache: &Cache) -> Result<(Centralizer, bool), VerifyError> {
    let key = (b.l.to_json(), b.g.to_json(), to_json(&aut.generators()));
    let (c, hit): (CachedCentralizer, bool) = cache.get_or_compute("centralizer", &key, || {
        let c = centralizer(aut, &b.g)?;
        Ok(CachedCentralizer { generators: to_json(&c.group.generators()), class_size: c.class_size })
    })?;
    let group = MatrixGroup::from_generators(&b.l, &from_json(&c.generators)?)?;
    Ok((Centralizer { group, class_size: c.class_size }, hit))
}

/// `O(M)` with both order routes. The Schreier–Sims route is rerun from the
/// cached generators on every load.
pub fn cached_orthogonal(m: &Arc<FqModule>, seed: u64, cache: &Cache) -> Result<(OrthogonalGroup, bool), VerifyError> {
    use rand::SeedableRng;
    let (c, hit): (CachedOrthogonal, bool) = cache.get_or_compute("orthogonal", &m.to_json(), || {
        let o = orthogonal_group(m.clone(), seed)?;
        Ok(CachedOrthogonal { generators: o.group.generators().to_vec(), search_order: o.search_order })
    })?;
    for (k, f) in c.generators.iter().enumerate() {
        if !f.is_orthogonal(m) {
            return Err(VerifyError::Group(format!("cached orthogonal generator {k} does not preserve q")));
        }
    }
    let act = coinv_core::fqm::ModAction::new(m.clone());
    let base: Vec<usize> = (0..m.rank()).map(|i| m.gen(i)).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let chain = permgroup::StabChain::new_random(act.clone(), &c.generators, &base, &mut rng, None);
    let chain_order = chain.order();
    let group = coinv_core::fqm::FqGroup { action: act, chain };
    Ok((OrthogonalGroup { group, search_order: c.search_order, chain_order }, hit))
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|k| n.is_multiple_of(*k)).collect()
}

fn fmt_factors(f: &[u32]) -> String {
    format!("{f:?}")
}

/// Runs the stages of one class up to `opts.upto`.
pub fn run_class(tag: ClassTag, exp: &ClassExpect, cache: &Cache, opts: &Options) -> Result<ClassReport, VerifyError> {
    use Topic::*;
    let mut rec = Recorder { stage: Stage::Lattice, checks: Vec::new() };
    let mut summary = Summary::default();
    let mut timings = Vec::new();
    let n = tag.n() as u128;

    // Lattice facts and lattice groups.
    let t = Instant::now();
    let mut hits = 0;
    let b = table2_build(tag);
    let facts = lattice_facts(&b)?;
    let det = exp.det()?;
    rec.equal("rank", LatticeFacts, "rank of L", facts.rank, exp.rank, Provenance::Derived);
    rec.equal("det", LatticeFacts, "det L", facts.det.clone(), det.to_string(), Provenance::Published);
    rec.holds("even", LatticeFacts, "L is even", facts.even);
    rec.holds("rootless", LatticeFacts, "L has no norm-2 vectors", facts.rootless);
    let disc_expected = elementary_divisor_multiset(&abelian_type(&exp.disc)?);
    rec.equal(
        "disc_factors",
        LatticeFacts,
        "elementary divisors of L*/L",
        fmt_factors(&elementary_divisor_multiset(&facts.discriminant_factors)),
        fmt_factors(&disc_expected),
        Provenance::Published,
    );
    rec.equal("g_order", LatticeFacts, "order of g", facts.g_order.unwrap_or(0), tag.n(), Provenance::Published);
    rec.holds("fixed_point_free", LatticeFacts, "g is fixed-point free", facts.fixed_point_free);
    rec.holds("one_minus_g", LatticeFacts, "(1 - g)L* = L", facts.one_minus_g_dual_is_l);
    rec.equal("index_n_over_l", LatticeFacts, "|N : L| = n", facts.index_n_over_l.clone(), tag.n().to_string(), Provenance::Consistency);
    rec.holds("dual_quotient", LatticeFacts, "L*/N* is cyclic of order n generated by chi", facts.dual_quotient_cyclic_by_chi);
    rec.holds("gamma", LatticeFacts, "gamma + L generates N/L", facts.gamma_generates);
    rec.holds("g_chi", LatticeFacts, "g(chi) lies in chi - lambda_e + R", facts.eq_gchi);
    summary.rank = Some(facts.rank);
    summary.det = Some(facts.det.clone());
    summary.disc_factors = Some(facts.discriminant_factors.clone());

    let (aut, search_order, chain_order, hit) = cached_aut(&b, cache)?;
    hits += hit as u32;
    rec.equal("o_lattice_routes", LatticeGroups, "|O(L)|: backtrack and Schreier-Sims agree", search_order, chain_order, Provenance::Consistency);
    rec.equal("o_lattice_reload", LatticeGroups, "|O(L)| from stored generators", aut.order(), chain_order, Provenance::Consistency);
    rec.order("o_lattice", LatticeGroups, "|O(L)|", aut.order(), &exp.o_lattice);
    let (cent, hit) = cached_centralizer(&b, &aut, cache)?;
    hits += hit as u32;
    let c_order = cent.group.order();
    rec.order("centralizer", LatticeGroups, "|C(g)|", c_order, &exp.centralizer);
    rec.equal(
        "class_equation",
        LatticeGroups,
        "|g^O(L)| * |C(g)| = |O(L)|",
        cent.class_size as u128 * c_order,
        aut.order(),
        Provenance::Consistency,
    );
    rec.holds("g_in_centralizer", LatticeGroups, "g lies in C(g)", cent.group.contains(&b.g));
    summary.o_lattice = Some(aut.order());
    summary.centralizer = Some(c_order);
    summary.class_size = Some(cent.class_size as u128);
    timings.push(StageTiming { stage: Stage::Lattice, seconds: t.elapsed().as_secs_f64(), cache_hits: hits });
    let done = |rec: Recorder, summary: Summary, timings: Vec<StageTiming>, index2, deep| {
        Ok(ClassReport { class: tag, upto: opts.upto, summary, checks: rec.checks, index2, deep, timings })
    };
    if opts.upto < Stage::Discriminant {
        return done(rec, summary, timings, None, None);
    }

    // Discriminant form.
    let t = Instant::now();
    rec.stage = Stage::Discriminant;
    let da: DiscriminantAction = discriminant_action(&cent.group, &b.l, opts.seed)?;
    rec.holds("g_trivial_on_disc", OrbitClaims, "g acts trivially on L*/L", acts_trivially_on_discriminant(&b.l, &b.g)?);
    rec.equal("faithful", OrbitClaims, "kernel of C(g) on L*/L is <g>", da.kernel_order, n, Provenance::Consistency);
    let ks: Vec<u32> = if tag.doubled() { vec![tag.n() / 2] } else { divisors(tag.n()).into_iter().filter(|&k| k > 1).collect() };
    for k in ks {
        let set = da.module.isotropic_census(k);
        let orbits = da.image.orbits_on(&set).map_err(|e| VerifyError::Group(e.to_string()))?;
        rec.push(
            &format!("transitive_l_g_{k}"),
            OrbitClaims,
            &format!("C(g) transitive on isotropic elements of order {k}"),
            format!("{} elements, {} orbits", set.len(), orbits.len()),
            Some("nonempty, 1 orbit".into()),
            !set.is_empty() && orbits.len() == 1,
            Provenance::Published,
        );
    }
    let (o_disc, hit) = cached_orthogonal(&da.module, opts.seed, cache)?;
    rec.equal("o_disc_routes", DiscriminantGroups, "|O(L*/L)|: backtrack and Schreier-Sims agree", o_disc.search_order, o_disc.chain_order, Provenance::Consistency);
    rec.order("o_disc", DiscriminantGroups, "|O(L*/L)|", o_disc.chain_order, &exp.o_disc);
    let (image, index) = image_and_index(&da.maps, &o_disc.group, opts.seed)?;
    rec.order("c_mod_g", DiscriminantGroups, "|C(g)/<g>| as its image in O(L*/L)", image.order(), &exp.c_mod_g);
    rec.equal("c_mod_g_quotient", DiscriminantGroups, "|image| = |C(g)| / n", image.order(), c_order / n, Provenance::Consistency);
    rec.equal("disc_index", DiscriminantGroups, "|O(L*/L) : C(g)/<g>|", index, exp.disc_index as u128, Provenance::Published);
    summary.o_disc = Some(o_disc.chain_order);
    summary.c_mod_g = Some(image.order());
    summary.disc_index = Some(index);
    timings.push(StageTiming { stage: Stage::Discriminant, seconds: t.elapsed().as_secs_f64(), cache_hits: hit as u32 });
    if opts.upto < Stage::Irreducibles {
        return done(rec, summary, timings, None, None);
    }

    // Module of irreducibles.
    let t = Instant::now();
    rec.stage = Stage::Irreducibles;
    let irr: IrrSpace = build_irr(&b)?;
    let m = &irr.module;
    let irr_expected = exp.irr_order()?;
    rec.equal("irr_size", IrrGroups, "|Irr|", m.size() as u64, irr_expected, Provenance::Published);
    rec.equal(
        "irr_factors",
        IrrGroups,
        "elementary divisors of Irr",
        fmt_factors(&elementary_divisor_multiset(m.factors())),
        fmt_factors(&elementary_divisor_multiset(&abelian_type(&exp.irr)?)),
        Provenance::Published,
    );
    rec.holds("irr_nondegenerate", IrrGroups, "Irr is non-degenerate", m.is_nondegenerate());
    if let Some(frame) = &irr.frame {
        rec.holds("doubled_frame", IrrGroups, "h and u have the required norms, pairings and sign under g^(n/2)", frame.check(&b));
    }
    let sets = sg_set(&irr);
    let vacuum = irr.vacuum_grade_one();
    rec.holds("vacuum_in_sg", IrrGroups, "the V_L(1) label lies in S_g", sets.sg.binary_search(&vacuum).is_ok());
    if irr.doubled() {
        rec.equal("sg2_size", IrrGroups, "|S_g(2)|", sets.sg2.len(), 3, Provenance::Derived);
        rec.holds("sg_sumset", IrrGroups, "S_g = S_g(2) + S_g(p)", sumset(m, &sets.sg2, &sets.sgp) == sets.sg);
    } else {
        let rho = vacuum_anomaly(&b, 1)?;
        rec.push(
            "rho_1",
            IrrGroups,
            "vacuum anomaly of the first twisted sector matches a label weight",
            coinv_core::lattice::rat_to_string(&rho),
            None,
            anomaly_matches_sector(&irr, 1, &rho),
            Provenance::Consistency,
        );
    }

    let (o_irr, hit) = cached_orthogonal(m, opts.seed, cache)?;
    rec.equal("o_irr_routes", IrrGroups, "|O(Irr)|: backtrack and Schreier-Sims agree", o_irr.search_order, o_irr.chain_order, Provenance::Consistency);
    rec.order("o_irr", IrrGroups, "|O(Irr)|", o_irr.chain_order, &exp.o_irr);
    let orbits = o_irr.group.orbits_on(&sets.sg).map_err(|e| VerifyError::Group(e.to_string()))?;
    rec.push(
        "o_irr_transitive",
        IrrGroups,
        "O(Irr) transitive on S_g",
        format!("{} labels, {} orbits", sets.sg.len(), orbits.len()),
        Some("1 orbit".into()),
        orbits.len() == 1,
        Provenance::Published,
    );
    let stab = o_irr.group.stabilizer_order(vacuum);
    rec.order("stabilizer", IrrGroups, "stabilizer of the V_L(1) label", stab, &exp.stabilizer);
    rec.equal("orbit_stabilizer", IrrGroups, "|S_g| * stabilizer = |O(Irr)|", sets.sg.len() as u128 * stab, o_irr.chain_order, Provenance::Consistency);
    let c_voa = det as u128 * c_order / n;
    rec.order("c_voa", IrrGroups, "|L*/L| * |C(g)| / n", c_voa, &exp.c_voa);
    let index = if stab % c_voa == 0 { stab / c_voa } else { 0 };
    rec.equal("index_chain", IrrGroups, "stabilizer / c_voa = |O(L*/L) : C(g)/<g>|", index, summary.disc_index.unwrap_or(0), Provenance::Consistency);
    rec.equal("aut_index", IrrGroups, "index of Aut in O(Irr)", index, exp.aut_index as u128, Provenance::Published);
    let aut_order = o_irr.chain_order.checked_div(index).unwrap_or(0);
    rec.order("aut", IrrGroups, "|O(Irr)| / index", aut_order, &exp.aut);
    summary.irr_factors = Some(m.factors().to_vec());
    summary.o_irr = Some(o_irr.chain_order);
    summary.sg_size = Some(sets.sg.len());
    summary.stabilizer = Some(stab);
    summary.c_voa = Some(c_voa);
    summary.aut_index = Some(index);
    summary.aut = Some(aut_order);
    timings.push(StageTiming { stage: Stage::Irreducibles, seconds: t.elapsed().as_secs_f64(), cache_hits: hit as u32 });
    if opts.upto < Stage::Automorphisms {
        return done(rec, summary, timings, None, None);
    }

    // Automorphism group.
    let t = Instant::now();
    rec.stage = Stage::Automorphisms;
    let mut outcome = None;
    let mut deep = None;
    match index {
        1 => rec.holds("aut_is_o_irr", Identification, "index 1: Aut is all of O(Irr)", aut_order == o_irr.chain_order),
        2 if !irr.doubled() => {
            let fps = known_footprints(&irr, &b, &da.module, &da.maps)?;
            let tester = FootprintTester::new(&o_irr.group, &fps, opts.seed);
            let all_extend = fps.iter().all(|f| tester.extendable(f));
            rec.holds("footprints_in_o_irr", Identification, "known label maps extend to O(Irr)", all_extend);
            let out = index2_search(&o_irr, &sets.sg, vacuum, c_voa, &fps, &tester, opts.seed)?;
            let screened = out.order_screened();
            rec.push(
                "index2_order_screen",
                Identification,
                "index-2 subgroups transitive on S_g with stabilizer order c_voa (informational)",
                format!("{} of {}", screened.len(), out.candidates.len()),
                None,
                !screened.is_empty(),
                Provenance::Consistency,
            );
            let selected = out.selected();
            rec.push(
                "index2_unique",
                Identification,
                "index-2 subgroups passing every screen, label-map footprints included",
                selected.len().to_string(),
                Some("1".into()),
                selected.len() == 1,
                Provenance::Published,
            );
            if let [h] = selected.as_slice() {
                rec.order("index2_order", Identification, "order of the selected subgroup", h.order, &exp.aut);
            }
            outcome = Some(out);
        }
        _ if opts.deep => {
            let out = goursat_search(&irr, &sets.sg, vacuum, c_voa, index as usize, opts.seed)?;
            rec.equal(
                "deep_factors",
                Identification,
                "|O(Irr_2)| * |O(Irr_p)| = |O(Irr)|",
                out.factor_orders.iter().product::<u128>(),
                o_irr.chain_order,
                Provenance::Consistency,
            );
            let passing: usize = out.passing_classes.iter().sum();
            rec.push(
                "deep_unique",
                Identification,
                &format!("conjugacy classes of index-{index} subgroups transitive on S_g with stabilizer order c_voa"),
                format!("{} classes ({passing} subgroups of {} of index {index})", out.passing_classes.len(), out.candidates.len()),
                Some("1".into()),
                out.passing_classes.len() == 1,
                Provenance::Published,
            );
            if let Some(order) = out.passing_order {
                rec.order("deep_order", Identification, "order of the selected subgroups", order, &exp.aut);
            }
            deep = Some(out);
        }
        _ => rec.push(
            "larger_index",
            Identification,
            "index at least 3: the subgroup search runs in the deep tier",
            format!("index {index}"),
            None,
            true,
            Provenance::Consistency,
        ),
    }
    timings.push(StageTiming { stage: Stage::Automorphisms, seconds: t.elapsed().as_secs_f64(), cache_hits: 0 });
    done(rec, summary, timings, outcome, deep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_of_small_numbers() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(8), vec![1, 2, 4, 8]);
        assert_eq!(divisors(10), vec![1, 2, 5, 10]);
    }

    #[test]
    fn stages_are_ordered() {
        assert!(Stage::Lattice < Stage::Discriminant);
        assert!(Stage::Irreducibles < Stage::Automorphisms);
    }
}
