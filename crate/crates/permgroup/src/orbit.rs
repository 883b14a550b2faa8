//! Orbits of a group given by generators.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::action::Action;
use crate::GroupError;

/// Orbit of `x` under `<gens>`, in BFS order starting with `x`.
pub fn orbit<A: Action>(act: &A, gens: &[A::Elem], x: usize) -> Vec<usize> {
    let mut seen = FxHashSet::default();
    seen.insert(x);
    let mut out = vec![x];
    let mut i = 0;
    while i < out.len() {
        let y = out[i];
        i += 1;
        for g in gens {
            let z = act.image(g, y);
            if seen.insert(z) {
                out.push(z);
            }
        }
    }
    out
}

/// Orbit of `x` together with, for each point, a group element carrying `x` there.
pub fn orbit_with_transversal<A: Action>(
    act: &A,
    gens: &[A::Elem],
    x: usize,
) -> FxHashMap<usize, A::Elem> {
    let mut reps = FxHashMap::default();
    reps.insert(x, act.identity());
    let mut queue = vec![x];
    let mut i = 0;
    while i < queue.len() {
        let y = queue[i];
        i += 1;
        let uy = reps[&y].clone();
        for g in gens {
            let z = act.image(g, y);
            if let std::collections::hash_map::Entry::Vacant(e) = reps.entry(z) {
                e.insert(act.mul(&uy, g));
                queue.push(z);
            }
        }
    }
    reps
}

/// Partition of `set` into `<gens>`-orbits. Fails if some generator moves a
/// point of `set` outside of it.
pub fn orbits_on<A: Action>(
    act: &A,
    gens: &[A::Elem],
    set: &[usize],
) -> Result<Vec<Vec<usize>>, GroupError> {
    let members: FxHashSet<usize> = set.iter().copied().collect();
    let mut assigned = FxHashSet::default();
    let mut parts = Vec::new();
    for &x in set {
        if assigned.contains(&x) {
            continue;
        }
        let orb = orbit(act, gens, x);
        for &y in &orb {
            if !members.contains(&y) {
                return Err(GroupError::NotInvariant { point: y });
            }
            assigned.insert(y);
        }
        parts.push(orb);
    }
    Ok(parts)
}

/// True iff `set` is a single `<gens>`-orbit.
pub fn transitive_on<A: Action>(
    act: &A,
    gens: &[A::Elem],
    set: &[usize],
) -> Result<bool, GroupError> {
    if set.is_empty() {
        return Ok(true);
    }
    Ok(orbits_on(act, gens, set)?.len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Perm, PermAction};

    #[test]
    fn trivial_group_gives_singletons() {
        let act = PermAction::new(4);
        let parts = orbits_on(&act, &[], &[0, 1, 2, 3]).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(!transitive_on(&act, &[], &[0, 1]).unwrap());
        assert!(transitive_on(&act, &[], &[2]).unwrap());
    }

    #[test]
    fn detects_non_invariant_set() {
        let act = PermAction::new(4);
        let g = Perm::from_cycles(4, &[&[0, 1, 2, 3]]);
        assert!(orbits_on(&act, &[g], &[0, 1]).is_err());
    }

    #[test]
    fn transversal_maps_base_point() {
        let act = PermAction::new(5);
        let g = Perm::from_cycles(5, &[&[0, 1, 2]]);
        let h = Perm::from_cycles(5, &[&[2, 3]]);
        let t = orbit_with_transversal(&act, &[g, h], 0);
        assert_eq!(t.len(), 4);
        for (p, u) in &t {
            assert_eq!(act.image(u, 0), *p);
        }
    }
}
