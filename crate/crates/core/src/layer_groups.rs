//! Layer groups `LG(S) = W(S) / I(S)` and the projections between them.
//!
//! With `A_S = X[S]^t` and a Smith decomposition `U · A_S · V = D`, the
//! coordinate change `y = U · k` turns both lattices into coordinate
//! conditions:
//!
//! * `k ∈ W(S)` iff `y_j = 0` for every `j ≥ r`,
//! * `k ∈ I(S)` iff additionally `d_i | y_i` for every `i < r`.
//!
//! An element of `LG(S)` is therefore named by its residues `y_i mod d_i`,
//! and its canonical lift is `U⁻¹ · (a_1, …, a_r, 0, …, 0)`. Since
//! `A_S · V = U⁻¹ · D`, column `i < r` of `U⁻¹` equals `A_S · V e_i / d_i`,
//! so the group keeps only the rows of `U` it reads (sparse) and never
//! forms `U⁻¹`. Those rows are computed on first use: the order and the
//! cyclic structure come from the invariant factors alone, which is all
//! a trivial group ever needs.
//!
//! The table of all groups gets its invariant factors incrementally. If `m`
//! is the largest index of `S` and `T = S \ {m}`, then
//! `diag(U_T, 1) · A_S · V_T = [D_T; x_m^t · V_T]`, so the factors of `S`
//! follow from an `(r_T + 1) × d` matrix and `V_S = V_T · V'`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{invariant_factors, smith_transforms, IntMatrix};
use crate::matroid::{MatroidCache, SubsetId};

#[derive(Clone, Debug)]
pub struct LayerGroupData {
    pub subset: SubsetId,
    pub rank: usize,
    pub factors: Vec<BigInt>,
    pub order: BigInt,
    /// Positions `i < r` with `d_i > 1`; only these carry a residue.
    nontrivial: Vec<usize>,
    /// The full `d × N` matrix `X`, shared by every group of a table.
    x: Arc<IntMatrix>,
    coordinates: OnceLock<Coordinates>,
}

/// The parts of the Smith transforms that canonicalization reads.
#[derive(Clone, Debug)]
struct Coordinates {
    /// Rows of `U` paired with `nontrivial`, as sparse `(column, entry)`.
    residue_rows: Vec<SparseRow>,
    /// Rows `r..|S|` of `U`, a basis of the left kernel of `A_S`.
    kernel_rows: Vec<SparseRow>,
    /// Column `i` of `U⁻¹` for each `i` in `nontrivial`.
    lift_columns: Vec<Vec<BigInt>>,
}

type SparseRow = Vec<(usize, BigInt)>;

fn sparse_row(u: &IntMatrix, i: usize) -> SparseRow {
    u.row(i)
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.clone()))
        .collect()
}

fn dot(row: &SparseRow, k: &[BigInt]) -> BigInt {
    row.iter().map(|(j, c)| c * &k[*j]).sum()
}

/// One element of a layer group, i.e. the combinatorial name of one layer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    /// `y_i mod d_i` for each invariant factor `d_i > 1`, in order.
    pub residues: Vec<BigInt>,
    /// Canonical representative in `Z^S`.
    pub lift: Vec<BigInt>,
}

impl GroupElement {
    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(Zero::is_zero)
    }
}

pub fn build_layer_group(cache: &MatroidCache, s: SubsetId) -> LayerGroupData {
    let factors = invariant_factors(&cache.columns(s).transpose());
    LayerGroupData::new(Arc::new(cache.matrix().clone()), s, factors)
}

impl LayerGroupData {
    fn new(x: Arc<IntMatrix>, subset: SubsetId, factors: Vec<BigInt>) -> Self {
        let rank = factors.len();
        let order = factors.iter().product();
        let nontrivial = (0..rank).filter(|&i| !factors[i].is_one()).collect();
        LayerGroupData {
            subset,
            rank,
            factors,
            order,
            nontrivial,
            x,
            coordinates: OnceLock::new(),
        }
    }

    /// `A_S = X[S]^t`, an `|S| × d` matrix.
    fn a_s(&self) -> IntMatrix {
        self.x.select_columns(&self.subset.indices()).transpose()
    }

    fn coordinates(&self) -> &Coordinates {
        self.coordinates.get_or_init(|| {
            let a_s = self.a_s();
            let snf = smith_transforms(&a_s);
            debug_assert_eq!(snf.factors, self.factors);
            let lift_columns = self
                .nontrivial
                .iter()
                .map(|&i| {
                    let image = a_s.mul_vec(&snf.v.column(i)).expect("V is d × d");
                    image
                        .into_iter()
                        .map(|x| {
                            let (q, r) = x.div_rem(&self.factors[i]);
                            debug_assert!(r.is_zero());
                            q
                        })
                        .collect()
                })
                .collect();
            Coordinates {
                residue_rows: self
                    .nontrivial
                    .iter()
                    .map(|&i| sparse_row(&snf.u, i))
                    .collect(),
                kernel_rows: (self.rank..self.subset.len())
                    .map(|j| sparse_row(&snf.u, j))
                    .collect(),
                lift_columns,
            }
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.nontrivial.is_empty()
    }

    /// Invariant factors greater than one, i.e. the cyclic decomposition.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.nontrivial
            .iter()
            .map(|&i| self.factors[i].clone())
            .collect()
    }

    pub fn order_usize(&self) -> Result<usize> {
        self.order
            .to_usize()
            .ok_or_else(|| Error::InstanceTooLarge(format!("layer group of order {}", self.order)))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![BigInt::zero(); self.nontrivial.len()],
            lift: vec![BigInt::zero(); self.subset.len()],
        }
    }

    fn lift_of(&self, residues: &[BigInt]) -> Vec<BigInt> {
        let mut lift = vec![BigInt::zero(); self.subset.len()];
        if residues.iter().all(Zero::is_zero) {
            return lift;
        }
        for (column, a) in self.coordinates().lift_columns.iter().zip(residues) {
            if a.is_zero() {
                continue;
            }
            for (entry, c) in lift.iter_mut().zip(column) {
                if !c.is_zero() {
                    *entry += c * a;
                }
            }
        }
        lift
    }

    /// All elements, lexicographic in the residues.
    pub fn enumerate_elements(&self) -> Vec<GroupElement> {
        let radices = self.nontrivial_factors();
        let mut out = Vec::new();
        let mut cur = vec![BigInt::zero(); radices.len()];
        loop {
            out.push(GroupElement {
                lift: self.lift_of(&cur),
                residues: cur.clone(),
            });
            // odometer increment, last coordinate fastest
            let mut pos = radices.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                cur[pos] += 1;
                if cur[pos] < radices[pos] {
                    break;
                }
                cur[pos] = BigInt::zero();
            }
        }
    }

    /// Position of `h` in [`LayerGroupData::enumerate_elements`].
    pub fn index_of(&self, h: &GroupElement) -> Result<usize> {
        let mut idx = BigInt::zero();
        for (&i, a) in self.nontrivial.iter().zip(&h.residues) {
            idx = idx * &self.factors[i] + a;
        }
        idx.to_usize()
            .ok_or_else(|| Error::InstanceTooLarge(format!("element index {idx}")))
    }

    /// Canonical element of `LG(S)` represented by `k ∈ Z^S`.
    pub fn canonicalize(&self, k: &[BigInt]) -> Result<GroupElement> {
        if k.len() != self.subset.len() {
            return Err(Error::DimensionMismatch {
                expected: self.subset.len(),
                found: k.len(),
            });
        }
        let coordinates = self.coordinates();
        if coordinates
            .kernel_rows
            .iter()
            .any(|row| !dot(row, k).is_zero())
        {
            return Err(Error::NotInW);
        }
        let residues: Vec<BigInt> = coordinates
            .residue_rows
            .iter()
            .zip(&self.nontrivial)
            .map(|(row, &i)| dot(row, k).mod_floor(&self.factors[i]))
            .collect();
        Ok(GroupElement {
            lift: self.lift_of(&residues),
            residues,
        })
    }

    /// `h1 ⊞ h2`, computed on lifts and then canonicalized.
    pub fn add(&self, h1: &GroupElement, h2: &GroupElement) -> Result<GroupElement> {
        let sum: Vec<BigInt> = h1.lift.iter().zip(&h2.lift).map(|(a, b)| a + b).collect();
        self.canonicalize(&sum)
    }
}

/// `π̄_{S,T}(h)` for `T = S ∖ {s}`: drop coordinate `s` of the lift and
/// canonicalize in `LG(T)`.
pub fn project(
    g_s: &LayerGroupData,
    g_t: &LayerGroupData,
    h: &GroupElement,
) -> Result<GroupElement> {
    let (s, t) = (g_s.subset, g_t.subset);
    if !t.is_subset_of(s) || s.len() != t.len() + 1 {
        return Err(Error::NotCodimOne);
    }
    let removed = s.bits() & !t.bits();
    let pos = s
        .position_of(removed.trailing_zeros() as usize)
        .expect("removed element lies in S");
    let projected: Vec<BigInt> = h
        .lift
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pos)
        .map(|(_, x)| x.clone())
        .collect();
    g_t.canonicalize(&projected).map_err(|e| match e {
        Error::NotInW => Error::Invariant(format!(
            "projection of {:?} from {:?} to {:?} left W(T)",
            h.lift, s, t
        )),
        other => other,
    })
}

/// Layer groups of every subset, indexed by bitmask, together with their
/// enumerated elements.
pub struct LayerGroupTable {
    groups: Vec<LayerGroupData>,
    elements: Vec<Vec<GroupElement>>,
}

impl LayerGroupTable {
    pub fn build(cache: &MatroidCache) -> Result<Self> {
        let mut groups: Vec<LayerGroupData> = Vec::with_capacity(1 << cache.n());
        let mut elements = Vec::with_capacity(1 << cache.n());
        let x = Arc::new(cache.matrix().clone());
        let d = cache.d();
        // `V_S` for every subset visited so far, indexed by bitmask
        let mut column_ops: Vec<IntMatrix> = Vec::with_capacity(1 << cache.n());
        for s in cache.all_subsets() {
            let g = if s.is_empty() {
                column_ops.push(IntMatrix::identity(d));
                LayerGroupData::new(Arc::clone(&x), s, Vec::new())
            } else {
                let m = 63 - s.bits().leading_zeros() as usize;
                let t = s.remove(m).bits() as usize;
                let (prev, v_t) = (&groups[t], &column_ops[t]);
                let appended = v_t.transpose().mul_vec(&x.column(m))?;
                let mut reduced = IntMatrix::zeros(prev.rank + 1, d);
                for (i, f) in prev.factors.iter().enumerate() {
                    reduced[(i, i)] = f.clone();
                }
                for (j, y) in appended.into_iter().enumerate() {
                    reduced[(prev.rank, j)] = y;
                }
                let snf = smith_transforms(&reduced);
                column_ops.push(v_t * &snf.v);
                LayerGroupData::new(Arc::clone(&x), s, snf.factors)
            };
            g.order_usize()?;
            elements.push(g.enumerate_elements());
            groups.push(g);
        }
        Ok(LayerGroupTable { groups, elements })
    }

    pub fn group(&self, s: SubsetId) -> &LayerGroupData {
        &self.groups[s.bits() as usize]
    }

    pub fn elements(&self, s: SubsetId) -> &[GroupElement] {
        &self.elements[s.bits() as usize]
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::IntMatrix;
    use rand::{Rng, SeedableRng};

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn four_vectors() -> MatroidCache {
        MatroidCache::new(IntMatrix::from_rows(&[[2, 0, 1, 2], [0, 1, -1, 2]])).unwrap()
    }

    #[test]
    fn cyclic_group_of_order_two() {
        let c = MatroidCache::new(IntMatrix::from_rows(&[[2]])).unwrap();
        let g = build_layer_group(&c, c.full_set());
        assert_eq!(g.factors, big(&[2]));
        assert_eq!(g.order, 2.into());
        let el = g.enumerate_elements();
        assert_eq!(el.len(), 2);
        assert_eq!(el[0].residues, big(&[0]));
        assert_eq!(el[1].residues, big(&[1]));
        assert_eq!(g.canonicalize(&big(&[3])).unwrap().residues, big(&[1]));
        assert_eq!(g.canonicalize(&big(&[0])).unwrap(), g.zero());
    }

    #[test]
    fn empty_subset_is_trivial() {
        let c = four_vectors();
        let g = build_layer_group(&c, SubsetId::empty(4));
        assert_eq!(g.order, 1.into());
        assert_eq!(g.enumerate_elements(), vec![g.zero()]);
    }

    #[test]
    fn four_vectors_x1_x4() {
        let c = four_vectors();
        let g = build_layer_group(&c, c.subset(&[0, 3]).unwrap());
        assert_eq!(g.order, 4.into());
        // A_S = [[2,0],[2,2]]: gcd of entries 2, |det| 4, so Z/2 ⊕ Z/2.
        assert_eq!(g.factors, big(&[2, 2]));
        let el = g.enumerate_elements();
        assert_eq!(el.len(), 4);
        for (i, e) in el.iter().enumerate() {
            assert_eq!(g.canonicalize(&e.lift).unwrap(), *e);
            assert_eq!(g.index_of(e).unwrap(), i);
        }
    }

    #[test]
    fn vector_outside_w_is_rejected() {
        // x_1 = (1,0), x_2 = (2,0): W forces k_2 = 2 k_1.
        let c = MatroidCache::new(IntMatrix::from_rows(&[[1, 2], [0, 0]])).unwrap();
        let g = build_layer_group(&c, c.full_set());
        assert_eq!(g.canonicalize(&big(&[0, 1])), Err(Error::NotInW));
        assert!(g.canonicalize(&big(&[1, 2])).is_ok());
        assert!(matches!(
            g.canonicalize(&big(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let c = four_vectors();
        let s = c.subset(&[0, 1]).unwrap();
        let t = c.subset(&[0]).unwrap();
        let (gs, gt) = (build_layer_group(&c, s), build_layer_group(&c, t));
        assert_eq!(project(&gs, &gt, &gs.zero()).unwrap(), gt.zero());
        let images: Vec<_> = gs
            .enumerate_elements()
            .iter()
            .map(|h| project(&gs, &gt, h).unwrap())
            .collect();
        assert_eq!(images.len(), 2);
        assert_ne!(images[0], images[1]);

        let e = SubsetId::empty(4);
        let one = c.subset(&[1]).unwrap();
        let (g1, g0) = (build_layer_group(&c, one), build_layer_group(&c, e));
        assert_eq!(project(&g1, &g0, &g1.zero()).unwrap(), g0.zero());

        let far = build_layer_group(&c, c.subset(&[2, 3]).unwrap());
        assert_eq!(project(&far, &gt, &far.zero()), Err(Error::NotCodimOne));
    }

    /// Exhaustive checks over every codim-one pair of random instances.
    #[test]
    fn projection_properties_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 40 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(d..=5);
            let e: Vec<BigInt> = (0..d * n)
                .map(|_| rng.gen_range(-4i64..=4).into())
                .collect();
            let x = IntMatrix::new(d, n, e).unwrap();
            if crate::exact_linalg::rank(&x) < d {
                continue;
            }
            checked += 1;
            let c = MatroidCache::new(x).unwrap();
            let table = LayerGroupTable::build(&c).unwrap();
            for s in c.all_subsets() {
                let gs = table.group(s);
                assert_eq!(gs.order, c.multiplicity_of_set(s));
                assert_eq!(gs.factors, build_layer_group(&c, s).factors);
                assert_eq!(gs.rank, c.rank_of_subset(s));
                for i in s.iter() {
                    let t = s.remove(i);
                    let gt = table.group(t);
                    let images: Vec<GroupElement> = table
                        .elements(s)
                        .iter()
                        .map(|h| project(gs, gt, h).unwrap())
                        .collect();
                    let mut distinct = images.clone();
                    distinct.sort();
                    distinct.dedup();
                    if gs.rank == gt.rank {
                        assert_eq!(distinct.len(), images.len(), "not injective");
                    } else {
                        assert_eq!(distinct.len(), table.elements(t).len(), "not onto");
                    }
                    // homomorphism on a sample of pairs
                    let el = table.elements(s);
                    for (a, b) in el.iter().zip(el.iter().rev()).take(4) {
                        let sum = gs.add(a, b).unwrap();
                        assert_eq!(
                            project(gs, gt, &sum).unwrap(),
                            gt.add(&project(gs, gt, a).unwrap(), &project(gs, gt, b).unwrap())
                                .unwrap()
                        );
                    }
                }
                // coset invariance: shifting a lift by A_S z keeps the class
                let a_s = c.columns(s).transpose();
                for h in table.elements(s) {
                    let z: Vec<BigInt> = (0..d).map(|_| rng.gen_range(-3i64..=3).into()).collect();
                    let shift = a_s.mul_vec(&z).unwrap();
                    let k: Vec<BigInt> = h.lift.iter().zip(&shift).map(|(a, b)| a + b).collect();
                    assert_eq!(gs.canonicalize(&k).unwrap(), *h);
                }
            }
        }
    }
}
