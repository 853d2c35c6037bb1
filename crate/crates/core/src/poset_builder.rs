//! Construction of the Hasse diagram of the intersection lattice (central
//! hyperplane arrangement) and of the poset of layers (central toric
//! arrangement).
//!
//! Both follow the same scheme. One pre-vertex is created per subset `S`
//! and element of its layer group. Each pair `T = S ∖ {s}` then emits an
//! arc from the projected element of `T` to each element of `S`. The arc
//! is blue when `rank(S) = rank(T)` and black otherwise. Blue arcs are
//! contracted, black arcs become cover relations. The hyperplane case is
//! the same procedure with every layer group replaced by the trivial group.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact_linalg::{self, IntMatrix};
use crate::layer_groups::{project, GroupElement, LayerGroupTable};
use crate::matroid::{MatroidCache, SubsetId, DEFAULT_MAX_GROUND_SET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Toric,
    Hyperplane,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Toric => "toric",
            Mode::Hyperplane => "hyperplane",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "toric" => Ok(Mode::Toric),
            "hyperplane" => Ok(Mode::Hyperplane),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreVertex {
    pub subset: SubsetId,
    pub element: GroupElement,
}

/// The uncontracted graph: pre-vertices with their ranks plus both arc kinds.
#[derive(Clone, Debug, Default)]
pub struct PreGraph {
    pub pre_vertices: Vec<PreVertex>,
    pub ranks: Vec<usize>,
    pub blue_arcs: Vec<(usize, usize)>,
    pub black_arcs: Vec<(usize, usize)>,
}

/// Name of a layer: its inclusion-maximal defining subset and the
/// canonical lift of its layer-group element there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalName {
    pub subset: SubsetId,
    pub lift: Vec<BigInt>,
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.subset.iter().map(|i| (i + 1).to_string()).collect();
        let k: Vec<String> = self.lift.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}} k=({})", idx.join(","), k.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerRecord {
    pub id: usize,
    pub rank: usize,
    pub dim: usize,
    /// Every subset that defines this layer, in increasing bitmask order.
    pub defining_subsets: Vec<SubsetId>,
    pub canonical_name: CanonicalName,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseDiagram {
    pub d: usize,
    pub n: usize,
    pub mode: Mode,
    /// Sorted by `(rank, canonical_name)`; `vertices[i].id == i`.
    pub vertices: Vec<LayerRecord>,
    /// Cover relations `(lower, upper)`, sorted and free of duplicates.
    pub arcs: Vec<(usize, usize)>,
}

impl HasseDiagram {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn max_rank(&self) -> usize {
        self.vertices.iter().map(|v| v.rank).max().unwrap_or(0)
    }

    /// Lower covers of each vertex.
    pub fn lower_covers(&self) -> Vec<Vec<usize>> {
        let mut down = vec![Vec::new(); self.vertices.len()];
        for &(lo, hi) in &self.arcs {
            down[hi].push(lo);
        }
        down
    }

    pub fn upper_covers(&self) -> Vec<Vec<usize>> {
        let mut up = vec![Vec::new(); self.vertices.len()];
        for &(lo, hi) in &self.arcs {
            up[lo].push(hi);
        }
        up
    }

    pub fn vertex_by_name(&self, name: &CanonicalName) -> Option<&LayerRecord> {
        self.vertices.iter().find(|v| &v.canonical_name == name)
    }

    /// Checks the grading invariants: every arc raises rank by one, there is
    /// one rank-0 vertex, and arcs are unique.
    pub fn check_graded(&self) -> std::result::Result<(), String> {
        let bottoms = self.vertices.iter().filter(|v| v.rank == 0).count();
        if bottoms != 1 {
            return Err(format!("{bottoms} vertices of rank 0"));
        }
        let mut seen = HashSet::new();
        for &(lo, hi) in &self.arcs {
            if self.vertices[hi].rank != self.vertices[lo].rank + 1 {
                return Err(format!("arc {lo}->{hi} does not raise rank by one"));
            }
            if !seen.insert((lo, hi)) {
                return Err(format!("duplicate arc {lo}->{hi}"));
            }
        }
        for v in &self.vertices {
            if v.rank + v.dim != self.d {
                return Err(format!("vertex {} has rank + dim != d", v.id));
            }
        }
        Ok(())
    }

    /// Isomorphism of graded digraphs under which canonical names match.
    /// Returns a description of the first difference found.
    pub fn compare_by_name(&self, other: &HasseDiagram) -> std::result::Result<(), String> {
        if self.d != other.d {
            return Err(format!("ambient dimension {} vs {}", self.d, other.d));
        }
        if self.len() != other.len() {
            return Err(format!("{} vertices vs {}", self.len(), other.len()));
        }
        let index: HashMap<&CanonicalName, &LayerRecord> = other
            .vertices
            .iter()
            .map(|v| (&v.canonical_name, v))
            .collect();
        let mut map = vec![0; self.len()];
        for v in &self.vertices {
            let w = index
                .get(&v.canonical_name)
                .ok_or_else(|| format!("layer {} missing", v.canonical_name))?;
            if v.rank != w.rank || v.dim != w.dim {
                return Err(format!(
                    "layer {} has rank {} vs {}",
                    v.canonical_name, v.rank, w.rank
                ));
            }
            map[v.id] = w.id;
        }
        let mine: HashSet<(usize, usize)> =
            self.arcs.iter().map(|&(a, b)| (map[a], map[b])).collect();
        let theirs: HashSet<(usize, usize)> = other.arcs.iter().copied().collect();
        if mine != theirs {
            let show = |&(a, b): &(usize, usize)| {
                format!(
                    "{} -> {}",
                    other.vertices[a].canonical_name, other.vertices[b].canonical_name
                )
            };
            return Err(format!(
                "cover relations differ (only left: {:?}, only right: {:?})",
                mine.difference(&theirs).next().map(show),
                theirs.difference(&mine).next().map(show),
            ));
        }
        Ok(())
    }
}

fn check_full_rank(x: &IntMatrix) -> Result<()> {
    let r = exact_linalg::rank(x);
    if r < x.rows() {
        return Err(Error::NotFullRank {
            rank: r,
            d: x.rows(),
        });
    }
    Ok(())
}

pub fn build_intersection_lattice(x: &IntMatrix) -> Result<HasseDiagram> {
    build(x, Mode::Hyperplane, DEFAULT_MAX_GROUND_SET)
}

pub fn build_layer_poset(x: &IntMatrix) -> Result<HasseDiagram> {
    build(x, Mode::Toric, DEFAULT_MAX_GROUND_SET)
}

/// Builds either diagram, refusing ground sets larger than `max_ground_set`.
pub fn build(x: &IntMatrix, mode: Mode, max_ground_set: usize) -> Result<HasseDiagram> {
    check_full_rank(x)?;
    let cache = MatroidCache::with_cap(x.clone(), max_ground_set)?;
    let graph = generate_arcs(&cache, mode)?;
    contract_equivalence(graph, x.rows(), x.cols(), mode)
}

fn trivial_element(s: SubsetId) -> GroupElement {
    GroupElement {
        residues: Vec::new(),
        lift: vec![BigInt::default(); s.len()],
    }
}

/// Creates all pre-vertices and all blue and black arcs. Subsets are visited
/// in increasing bitmask order and removed elements in increasing index order.
pub fn generate_arcs(cache: &MatroidCache, mode: Mode) -> Result<PreGraph> {
    let table = match mode {
        Mode::Toric => Some(LayerGroupTable::build(cache)?),
        Mode::Hyperplane => None,
    };
    let subset_count = 1usize << cache.n();
    let subset_ranks: Vec<usize> = match &table {
        Some(table) => cache.all_subsets().map(|s| table.group(s).rank).collect(),
        None => cache
            .all_subsets()
            .map(|s| cache.rank_of_subset(s))
            .collect(),
    };

    let mut graph = PreGraph::default();
    let mut offsets = Vec::with_capacity(subset_count);
    for s in cache.all_subsets() {
        offsets.push(graph.pre_vertices.len());
        let rank = subset_ranks[s.bits() as usize];
        match &table {
            None => {
                graph.pre_vertices.push(PreVertex {
                    subset: s,
                    element: trivial_element(s),
                });
                graph.ranks.push(rank);
            }
            Some(table) => {
                for h in table.elements(s) {
                    graph.pre_vertices.push(PreVertex {
                        subset: s,
                        element: h.clone(),
                    });
                    graph.ranks.push(rank);
                }
            }
        }
    }

    for s in cache.all_subsets() {
        let sb = s.bits() as usize;
        for i in s.iter() {
            let t = s.remove(i);
            let tb = t.bits() as usize;
            let arcs = if subset_ranks[sb] == subset_ranks[tb] {
                &mut graph.blue_arcs
            } else {
                &mut graph.black_arcs
            };
            match &table {
                None => arcs.push((offsets[tb], offsets[sb])),
                Some(table) => {
                    let (gs, gt) = (table.group(s), table.group(t));
                    for (idx, h) in table.elements(s).iter().enumerate() {
                        // index 0 is the identity, which every homomorphism
                        // fixes, and a trivial target has nothing else
                        let q = if idx == 0 || gt.is_trivial() {
                            0
                        } else {
                            gt.index_of(&project(gs, gt, h)?)?
                        };
                        arcs.push((offsets[tb] + q, offsets[sb] + idx));
                    }
                }
            }
        }
    }
    Ok(graph)
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Contracts blue arcs and turns black arcs into deduplicated cover
/// relations between the resulting classes.
pub fn contract_equivalence(
    graph: PreGraph,
    d: usize,
    n: usize,
    mode: Mode,
) -> Result<HasseDiagram> {
    let PreGraph {
        pre_vertices,
        ranks,
        blue_arcs,
        black_arcs,
    } = graph;
    if ranks.len() != pre_vertices.len() {
        return Err(Error::DimensionMismatch {
            expected: pre_vertices.len(),
            found: ranks.len(),
        });
    }
    let mut sets = DisjointSets::new(pre_vertices.len());
    for &(a, b) in &blue_arcs {
        if ranks[a] != ranks[b] {
            return Err(Error::Invariant(format!(
                "blue arc joins ranks {} and {}",
                ranks[a], ranks[b]
            )));
        }
        sets.union(a, b);
    }

    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![0; pre_vertices.len()];
    for (v, class) in class_of.iter_mut().enumerate() {
        let root = sets.find(v);
        let c = *class_of_root.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[c].push(v);
        *class = c;
    }

    struct Draft {
        rank: usize,
        name: CanonicalName,
        defining: Vec<SubsetId>,
    }
    let mut drafts = Vec::with_capacity(members.len());
    for class in &members {
        let union = class.iter().fold(SubsetId::empty(n), |acc, &v| {
            acc.union(pre_vertices[v].subset)
        });
        let maximal: Vec<usize> = class
            .iter()
            .copied()
            .filter(|&v| pre_vertices[v].subset == union)
            .collect();
        let &[rep] = maximal.as_slice() else {
            return Err(Error::Invariant(format!(
                "class has {} pre-vertices on its union {:?}",
                maximal.len(),
                union
            )));
        };
        let mut defining: Vec<SubsetId> = class.iter().map(|&v| pre_vertices[v].subset).collect();
        defining.sort();
        if defining.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invariant(format!(
                "a subset defines two elements of the layer named by {union:?}"
            )));
        }
        drafts.push(Draft {
            rank: ranks[rep],
            name: CanonicalName {
                subset: union,
                lift: pre_vertices[rep].element.lift.clone(),
            },
            defining,
        });
    }

    let mut order: Vec<usize> = (0..drafts.len()).collect();
    order.sort_by(|&a, &b| {
        (drafts[a].rank, &drafts[a].name).cmp(&(drafts[b].rank, &drafts[b].name))
    });
    let mut new_id = vec![0; drafts.len()];
    for (id, &c) in order.iter().enumerate() {
        new_id[c] = id;
    }

    let mut arc_set = HashSet::new();
    for &(a, b) in &black_arcs {
        if ranks[b] != ranks[a] + 1 {
            return Err(Error::Invariant(format!(
                "black arc joins ranks {} and {}",
                ranks[a], ranks[b]
            )));
        }
        arc_set.insert((new_id[class_of[a]], new_id[class_of[b]]));
    }
    let mut arcs: Vec<(usize, usize)> = arc_set.into_iter().collect();
    arcs.sort_unstable();

    let mut slots: Vec<Option<Draft>> = drafts.into_iter().map(Some).collect();
    let vertices = order
        .iter()
        .enumerate()
        .map(|(id, &c)| {
            let draft = slots[c].take().expect("each class visited once");
            LayerRecord {
                id,
                rank: draft.rank,
                dim: d - draft.rank,
                defining_subsets: draft.defining,
                canonical_name: draft.name,
            }
        })
        .collect();

    Ok(HasseDiagram {
        d,
        n,
        mode,
        vertices,
        arcs,
    })
}

/// Exhaustive check that every square submatrix has determinant in {-1,0,1}.
pub fn is_totally_unimodular(x: &IntMatrix) -> bool {
    use itertools::Itertools;
    let k_max = x.rows().min(x.cols());
    for k in 1..=k_max {
        for rows in (0..x.rows()).combinations(k) {
            let sub = x.select_rows(&rows);
            for cols in (0..x.cols()).combinations(k) {
                let det = sub.select_columns(&cols).determinant().expect("square");
                if det > BigInt::from(1) || det < BigInt::from(-1) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn four_vectors() -> IntMatrix {
        IntMatrix::from_rows(&[[2, 0, 1, 2], [0, 1, -1, 2]])
    }

    fn rank_counts(h: &HasseDiagram) -> Vec<usize> {
        let mut c = vec![0; h.d + 1];
        for v in &h.vertices {
            c[v.rank] += 1;
        }
        c
    }

    #[test]
    fn identity_lattice_is_boolean() {
        let x = IntMatrix::identity(2);
        for h in [
            build_intersection_lattice(&x).unwrap(),
            build_layer_poset(&x).unwrap(),
        ] {
            assert_eq!(h.len(), 4);
            assert_eq!(h.arcs.len(), 4);
            assert_eq!(rank_counts(&h), vec![1, 2, 1]);
            h.check_graded().unwrap();
        }
    }

    #[test]
    fn single_column() {
        let x = IntMatrix::from_rows(&[[1]]);
        let h = build_intersection_lattice(&x).unwrap();
        assert_eq!((h.len(), h.arcs.len()), (2, 1));

        let x = IntMatrix::from_rows(&[[2]]);
        let h = build_layer_poset(&x).unwrap();
        assert_eq!((h.len(), h.arcs.len()), (3, 2));
        assert_eq!(h.arcs, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn four_vectors_rank_one_layers() {
        let h = build_layer_poset(&four_vectors()).unwrap();
        h.check_graded().unwrap();
        let rank1: Vec<&LayerRecord> = h.vertices.iter().filter(|v| v.rank == 1).collect();
        assert_eq!(rank1.len(), 6);
        let per_vector = |i: usize| {
            rank1
                .iter()
                .filter(|v| v.canonical_name.subset.indices() == vec![i])
                .count()
        };
        assert_eq!(
            (per_vector(0), per_vector(1), per_vector(2), per_vector(3)),
            (2, 1, 1, 2)
        );
    }

    #[test]
    fn four_vectors_lattice_of_flats() {
        // No two of the four vectors are parallel: the flats are the empty
        // set, four singletons and the whole ground set.
        let h = build_intersection_lattice(&four_vectors()).unwrap();
        assert_eq!(rank_counts(&h), vec![1, 4, 1]);
        assert_eq!(h.arcs.len(), 8);
        let top = h.vertices.last().unwrap();
        assert_eq!(top.defining_subsets.len(), 16 - 1 - 4);
    }

    #[test]
    fn parallel_columns_merge() {
        let x = IntMatrix::from_rows(&[[1, 1]]);
        let h = build_intersection_lattice(&x).unwrap();
        assert_eq!(h.len(), 2);
        let atom = &h.vertices[1];
        let subsets: Vec<Vec<usize>> = atom.defining_subsets.iter().map(|s| s.indices()).collect();
        assert_eq!(subsets, vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(atom.canonical_name.subset.indices(), vec![0, 1]);
    }

    #[test]
    fn contraction_without_blue_arcs_keeps_graph() {
        let s0 = SubsetId::empty(2);
        let s1 = SubsetId::from_indices(&[0], 2).unwrap();
        let s2 = SubsetId::from_indices(&[1], 2).unwrap();
        let graph = PreGraph {
            pre_vertices: [s0, s1, s2]
                .iter()
                .map(|&s| PreVertex {
                    subset: s,
                    element: trivial_element(s),
                })
                .collect(),
            ranks: vec![0, 1, 1],
            blue_arcs: vec![],
            black_arcs: vec![(0, 2), (0, 1), (0, 1)],
        };
        let h = contract_equivalence(graph, 1, 2, Mode::Hyperplane).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.arcs, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn contraction_rejects_blue_arc_across_ranks() {
        let s0 = SubsetId::empty(1);
        let s1 = SubsetId::full(1);
        let graph = PreGraph {
            pre_vertices: vec![
                PreVertex {
                    subset: s0,
                    element: trivial_element(s0),
                },
                PreVertex {
                    subset: s1,
                    element: trivial_element(s1),
                },
            ],
            ranks: vec![0, 1],
            blue_arcs: vec![(0, 1)],
            black_arcs: vec![],
        };
        assert!(matches!(
            contract_equivalence(graph, 1, 1, Mode::Hyperplane),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn rejects_rank_deficient_input() {
        let x = IntMatrix::from_rows(&[[1, 2], [2, 4]]);
        assert_eq!(
            build_layer_poset(&x),
            Err(Error::NotFullRank { rank: 1, d: 2 })
        );
    }

    #[test]
    fn rejects_large_ground_set() {
        let x = IntMatrix::from_rows(&[[1, 1, 1, 1]]);
        assert!(matches!(
            build(&x, Mode::Toric, 3),
            Err(Error::GroundSetTooLarge { n: 4, max: 3 })
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let a = build_layer_poset(&four_vectors()).unwrap();
        let b = build_layer_poset(&four_vectors()).unwrap();
        assert_eq!(a, b);
    }

    fn random_full_rank(rng: &mut impl Rng, d: usize, n: usize, m: i64) -> IntMatrix {
        loop {
            let e: Vec<BigInt> = (0..d * n).map(|_| rng.gen_range(-m..=m).into()).collect();
            let x = IntMatrix::new(d, n, e).unwrap();
            if exact_linalg::rank(&x) == d {
                return x;
            }
        }
    }

    /// Every maximal chain from the bottom has length d, and the vertex count
    /// per rank matches a direct count of layers by their maximal subsets.
    #[test]
    fn grading_and_layer_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(d..=5);
            let x = random_full_rank(&mut rng, d, n, 3);
            let h = build_layer_poset(&x).unwrap();
            h.check_graded().unwrap();
            let up = h.upper_covers();
            for v in &h.vertices {
                if up[v.id].is_empty() {
                    assert_eq!(v.rank, d, "maximal element below top rank");
                }
            }
            let cache = MatroidCache::new(x.clone()).unwrap();
            let table = LayerGroupTable::build(&cache).unwrap();
            for v in &h.vertices {
                let s = v.canonical_name.subset;
                let g = table.group(s);
                assert_eq!(v.rank, g.rank);
                assert!(table
                    .elements(s)
                    .iter()
                    .any(|e| e.lift == v.canonical_name.lift));
            }
        }
    }

    /// Every pair of flats has exactly one minimal upper bound.
    #[test]
    fn intersection_lattice_has_unique_joins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(d..=5);
            let x = random_full_rank(&mut rng, d, n, 2);
            let h = build_intersection_lattice(&x).unwrap();
            let up = h.upper_covers();
            let above: Vec<HashSet<usize>> = (0..h.len())
                .map(|v| {
                    let mut seen = HashSet::from([v]);
                    let mut stack = vec![v];
                    while let Some(u) = stack.pop() {
                        for &w in &up[u] {
                            if seen.insert(w) {
                                stack.push(w);
                            }
                        }
                    }
                    seen
                })
                .collect();
            for a in 0..h.len() {
                for b in 0..h.len() {
                    let common: Vec<usize> = above[a].intersection(&above[b]).copied().collect();
                    let minimal = common
                        .iter()
                        .filter(|&&c| common.iter().all(|&e| e == c || !above[e].contains(&c)))
                        .count();
                    assert_eq!(minimal, 1);
                }
            }
        }
    }

    #[test]
    fn unimodular_degeneration() {
        let x = IntMatrix::from_rows(&[[1, 0, 1, 0], [0, 1, 1, 1], [0, 0, 0, 1]]);
        assert!(is_totally_unimodular(&x));
        let t = build_layer_poset(&x).unwrap();
        let l = build_intersection_lattice(&x).unwrap();
        t.compare_by_name(&l).unwrap();
        assert!(!is_totally_unimodular(&four_vectors()));
    }
}
