//! Backtrack search for the automorphism group of a structure determined by
//! the images of a few base points (lattice isometries, module automorphisms).
//!
//! The search runs level by level from the bottom of the base, so that when
//! level `i` is processed the stabilizer of the first `i + 1` base points is
//! already known completely. A candidate image that fails at level `i` then
//! rules out its whole orbit under that stabilizer.

use rustc_hash::FxHashSet;

use crate::action::Action;
use crate::orbit::orbit;

/// A search problem: the group consists of all elements of the action that
/// arise from a consistent assignment of images to the base points.
pub trait Search: Sync {
    type A: Action;

    fn action(&self) -> &Self::A;

    /// Base points. The group element must be determined by their images.
    fn base(&self) -> Vec<usize>;

    /// A superset of the possible images of base point `level`.
    fn candidates(&self, level: usize) -> Vec<usize>;

    /// Whether base point `i` going to `xi` and base point `j` going to `xj`
    /// can happen simultaneously.
    fn compatible(&self, i: usize, xi: usize, j: usize, xj: usize) -> bool;

    /// Extra necessary condition on the images of the first `images.len()`
    /// base points, checked after the pairwise ones.
    fn partial_ok(&self, _images: &[usize]) -> bool {
        true
    }

    /// The group element with the given base images, if there is one.
    fn complete(&self, images: &[usize]) -> Option<<Self::A as Action>::Elem>;
}

#[derive(Clone, Debug)]
pub struct SearchResult<E> {
    pub gens: Vec<E>,
    /// `|G^(i) : G^(i+1)|` for each base level.
    pub orbit_sizes: Vec<usize>,
    pub order: u128,
    /// Number of complete assignments tested.
    pub leaves: u64,
}

/// Runs the search. `seeds` are elements already known to lie in the group.
pub fn search<S: Search>(s: &S, seeds: &[<S::A as Action>::Elem]) -> SearchResult<<S::A as Action>::Elem> {
    let act = s.action();
    let base = s.base();
    let m = base.len();
    let fixes = |g: &<S::A as Action>::Elem, upto: usize| base[..upto].iter().all(|&b| act.image(g, b) == b);

    let mut found: Vec<<S::A as Action>::Elem> = seeds.iter().filter(|g| !act.is_identity(g)).cloned().collect();
    let mut orbit_sizes = vec![1usize; m];
    let mut leaves = 0u64;
    let cands: Vec<Vec<usize>> = (0..m).map(|i| s.candidates(i)).collect();

    for i in (0..m).rev() {
        let mut gi: Vec<_> = found.iter().filter(|g| fixes(g, i)).cloned().collect();
        let mut orb: FxHashSet<usize> = orbit(act, &gi, base[i]).into_iter().collect();
        let mut excluded: FxHashSet<usize> = FxHashSet::default();

        let fixed: Vec<usize> = base[..i].to_vec();
        let level_cands: Vec<usize> = cands[i]
            .iter()
            .copied()
            .filter(|&x| (0..i).all(|j| s.compatible(j, fixed[j], i, x)))
            .collect();

        for &x in &level_cands {
            if orb.contains(&x) || excluded.contains(&x) {
                continue;
            }
            let mut images = fixed.clone();
            images.push(x);
            if !s.partial_ok(&images) {
                excluded.extend(orbit(act, &gi, x));
                continue;
            }
            let lists: Vec<Vec<usize>> = (i + 1..m)
                .map(|l| {
                    cands[l]
                        .iter()
                        .copied()
                        .filter(|&y| (0..=i).all(|j| s.compatible(j, images[j], l, y)))
                        .collect()
                })
                .collect();
            match dfs(s, i + 1, m, &mut images, &lists, &mut leaves) {
                Some(g) => {
                    found.push(g.clone());
                    gi.push(g);
                    orb = orbit(act, &gi, base[i]).into_iter().collect();
                }
                None => {
                    // The images of base[i] form a union of orbits of the
                    // known part of G^(i), so the whole orbit of x fails.
                    excluded.extend(orbit(act, &gi, x));
                }
            }
        }
        orbit_sizes[i] = orb.len();
    }

    let order = orbit_sizes.iter().map(|&k| k as u128).product();
    SearchResult { gens: found, orbit_sizes, order, leaves }
}

/// `lists[l - k]` holds the surviving candidates for level `l >= k`.
fn dfs<S: Search>(
    s: &S,
    k: usize,
    m: usize,
    images: &mut Vec<usize>,
    lists: &[Vec<usize>],
    leaves: &mut u64,
) -> Option<<S::A as Action>::Elem> {
    if k == m {
        *leaves += 1;
        return s.complete(images);
    }
    'cand: for &y in &lists[0] {
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(lists.len() - 1);
        for (off, list) in lists[1..].iter().enumerate() {
            let l = k + 1 + off;
            let kept: Vec<usize> = list.iter().copied().filter(|&z| s.compatible(k, y, l, z)).collect();
            if kept.is_empty() {
                continue 'cand;
            }
            next.push(kept);
        }
        images.push(y);
        if !s.partial_ok(images) {
            images.pop();
            continue;
        }
        if let Some(g) = dfs(s, k + 1, m, images, &next, leaves) {
            images.pop();
            return Some(g);
        }
        images.pop();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Perm, PermAction};
    use crate::chain::StabChain;

    /// Automorphisms of a simple graph on `n` vertices; base = all vertices.
    struct GraphAut {
        act: PermAction,
        adj: Vec<Vec<bool>>,
    }

    impl Search for GraphAut {
        type A = PermAction;
        fn action(&self) -> &PermAction {
            &self.act
        }
        fn base(&self) -> Vec<usize> {
            (0..self.adj.len()).collect()
        }
        fn candidates(&self, level: usize) -> Vec<usize> {
            let deg = |v: usize| self.adj[v].iter().filter(|&&b| b).count();
            (0..self.adj.len()).filter(|&v| deg(v) == deg(level)).collect()
        }
        fn compatible(&self, i: usize, xi: usize, j: usize, xj: usize) -> bool {
            (xi != xj) && self.adj[i][j] == self.adj[xi][xj]
        }
        fn complete(&self, images: &[usize]) -> Option<Perm> {
            Perm::from_images(images.iter().map(|&x| x as u32).collect())
        }
    }

    fn cycle_graph(n: usize) -> GraphAut {
        let mut adj = vec![vec![false; n]; n];
        for v in 0..n {
            adj[v][(v + 1) % n] = true;
            adj[(v + 1) % n][v] = true;
        }
        GraphAut { act: PermAction::new(n), adj }
    }

    #[test]
    fn cycle_graph_has_dihedral_group() {
        for n in 3..9 {
            let r = search(&cycle_graph(n), &[]);
            assert_eq!(r.order, 2 * n as u128);
            let c = StabChain::new(PermAction::new(n), &r.gens, &[]);
            assert_eq!(c.order(), r.order);
        }
    }

    #[test]
    fn petersen_graph_has_order_120() {
        // Kneser graph K(5,2): vertices are 2-subsets, adjacent when disjoint.
        let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let n = pairs.len();
        let adj: Vec<Vec<bool>> = pairs
            .iter()
            .map(|p| pairs.iter().map(|q| p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1).collect())
            .collect();
        let r = search(&GraphAut { act: PermAction::new(n), adj }, &[]);
        assert_eq!(r.order, 120);
    }

    #[test]
    fn seeds_do_not_change_the_result() {
        let g = cycle_graph(7);
        let rot = Perm((0..7u32).map(|v| (v + 1) % 7).collect());
        assert_eq!(search(&g, &[rot]).order, 14);
    }
}
