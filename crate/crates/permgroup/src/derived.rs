//! Normal closures and derived subgroups.

use crate::action::Action;
use crate::chain::StabChain;

/// Normal closure of `<h_gens>` in `<g_gens>`.
pub fn normal_closure<A: Action>(act: &A, g_gens: &[A::Elem], h_gens: &[A::Elem]) -> StabChain<A> {
    let mut chain = StabChain::new(act.clone(), h_gens, &[]);
    let mut pending: Vec<A::Elem> = chain.generators().to_vec();
    while let Some(h) = pending.pop() {
        for g in g_gens {
            let c = act.conjugate(&h, g);
            if chain.extend(&c) {
                pending.push(c);
            }
        }
    }
    chain
}

/// The commutator subgroup `[G, G]`.
pub fn derived_subgroup<A: Action>(act: &A, gens: &[A::Elem]) -> StabChain<A> {
    let mut comms = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = act.commutator(a, b);
            if !act.is_identity(&c) && !comms.contains(&c) {
                comms.push(c);
            }
        }
    }
    normal_closure(act, gens, &comms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Perm, PermAction};

    #[test]
    fn abelian_group_has_trivial_derived_subgroup() {
        let act = PermAction::new(6);
        let a = Perm::from_cycles(6, &[&[0, 1, 2]]);
        let b = Perm::from_cycles(6, &[&[3, 4]]);
        let d = derived_subgroup(&act, &[a, b]);
        assert_eq!(d.order(), 1);
    }

    #[test]
    fn sym3_derived_is_alt3() {
        let act = PermAction::new(3);
        let gens = [Perm::from_cycles(3, &[&[0, 1]]), Perm::from_cycles(3, &[&[0, 1, 2]])];
        let d = derived_subgroup(&act, &gens);
        assert_eq!(d.order(), 3);
        assert!(d.contains(&Perm::from_cycles(3, &[&[0, 2, 1]])));
    }

    #[test]
    fn sym5_derived_is_alt5() {
        let act = PermAction::new(5);
        let gens = [Perm::from_cycles(5, &[&[0, 1]]), Perm::from_cycles(5, &[&[0, 1, 2, 3, 4]])];
        assert_eq!(derived_subgroup(&act, &gens).order(), 60);
    }
}
