//! Brute-force reference construction of the poset of layers directly from
//! the geometry: each candidate layer is an affine subspace
//! `{α : A_S α = k}` taken modulo `Z^d`, compared by exact rational linear
//! algebra. Nothing here uses layer-group projections, so agreement with
//! [`crate::poset_builder`] is an independent check.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{self, IntMatrix};
use crate::layer_groups::build_layer_group;
use crate::matroid::{MatroidCache, SubsetId};
use crate::poset_builder::{CanonicalName, HasseDiagram, LayerRecord, Mode};

/// Largest ground set accepted by the toric oracle.
pub const MAX_ORACLE_N: usize = 6;
/// Largest ambient dimension accepted by the toric oracle.
pub const MAX_ORACLE_D: usize = 3;
const MAX_FLAT_ORACLE_N: usize = 10;
const MAX_TORSION_CANDIDATES: u64 = 4_000_000;

type Q = BigRational;

/// `H(S, k) / Z^d` in explicit form.
#[derive(Clone, Debug)]
pub struct GeometricLayer {
    pub subset: SubsetId,
    pub k: Vec<BigInt>,
    /// `A_S = X[S]^t`.
    equations: IntMatrix,
    /// Basis of `{α : A_S α = 0}`.
    pub direction: Vec<Vec<Q>>,
    /// Some `α₀` with `A_S α₀ = k`.
    pub anchor: Vec<Q>,
}

/// Reduced row echelon form; returns pivot columns.
fn rref(rows: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn to_q(v: &BigInt) -> Q {
    Q::from_integer(v.clone())
}

/// Solves `a α = k` over the rationals and returns one solution together
/// with a basis of the solution space of `a α = 0`.
fn solve_affine(a: &IntMatrix, k: &[BigInt]) -> Option<(Vec<Q>, Vec<Vec<Q>>)> {
    let d = a.cols();
    let mut rows: Vec<Vec<Q>> = (0..a.rows())
        .map(|i| {
            let mut row: Vec<Q> = a.row(i).iter().map(to_q).collect();
            row.push(to_q(&k[i]));
            row
        })
        .collect();
    let pivots = rref(&mut rows, d);
    if rows[pivots.len()..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut anchor = vec![Q::zero(); d];
    for (r, &c) in pivots.iter().enumerate() {
        anchor[c] = rows[r][d].clone();
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); d];
            v[f] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rows[r][f].clone();
            }
            v
        })
        .collect();
    Some((anchor, basis))
}

fn apply(a: &IntMatrix, v: &[Q]) -> Vec<Q> {
    (0..a.rows())
        .map(|i| a.row(i).iter().zip(v).map(|(x, y)| to_q(x) * y).sum())
        .collect()
}

/// Whether `delta` lies in `ker(a) + Z^d`: some integer `z` must satisfy
/// `a z = a delta`.
fn in_kernel_plus_lattice(a: &IntMatrix, delta: &[Q]) -> bool {
    let image = apply(a, delta);
    if !image.iter().all(Q::is_integer) {
        return false;
    }
    let target: Vec<BigInt> = image.iter().map(Q::to_integer).collect();
    exact_linalg::solve_integer_membership(a, &target)
        .expect("target has one entry per equation")
        .is_some()
}

impl GeometricLayer {
    /// `None` if `H(S, k)` is empty.
    pub fn new(x: &IntMatrix, subset: SubsetId, k: Vec<BigInt>) -> Result<Option<Self>> {
        if k.len() != subset.len() {
            return Err(Error::DimensionMismatch {
                expected: subset.len(),
                found: k.len(),
            });
        }
        let equations = x.select_columns(&subset.indices()).transpose();
        Ok(
            solve_affine(&equations, &k).map(|(anchor, direction)| GeometricLayer {
                subset,
                k,
                equations,
                direction,
                anchor,
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    fn direction_within(&self, other: &GeometricLayer) -> bool {
        self.direction
            .iter()
            .all(|v| apply(&other.equations, v).iter().all(Zero::is_zero))
    }
}

pub fn layers_equal(a: &GeometricLayer, b: &GeometricLayer) -> bool {
    if a.dim() != b.dim() || !a.direction_within(b) {
        return false;
    }
    let delta: Vec<Q> = a.anchor.iter().zip(&b.anchor).map(|(p, q)| p - q).collect();
    in_kernel_plus_lattice(&b.equations, &delta)
}

/// Whether `smaller ⊆ bigger` as subsets of the torus.
pub fn layer_contains(bigger: &GeometricLayer, smaller: &GeometricLayer) -> bool {
    if smaller.dim() > bigger.dim() || !smaller.direction_within(bigger) {
        return false;
    }
    let delta: Vec<Q> = smaller
        .anchor
        .iter()
        .zip(&bigger.anchor)
        .map(|(p, q)| p - q)
        .collect();
    in_kernel_plus_lattice(&bigger.equations, &delta)
}

fn check_rank(x: &IntMatrix) -> Result<()> {
    let r = exact_linalg::rank(x);
    if r < x.rows() {
        return Err(Error::NotFullRank {
            rank: r,
            d: x.rows(),
        });
    }
    Ok(())
}

struct Class {
    layer: GeometricLayer,
    members: Vec<(SubsetId, Vec<BigInt>)>,
}

/// Groups candidate layers into equality classes and emits the Hasse
/// diagram of containment among them.
fn assemble(
    d: usize,
    n: usize,
    mode: Mode,
    candidates: Vec<GeometricLayer>,
) -> Result<HasseDiagram> {
    let mut classes: Vec<Class> = Vec::new();
    for layer in candidates {
        let member = (layer.subset, layer.k.clone());
        match classes.iter_mut().find(|c| layers_equal(&c.layer, &layer)) {
            Some(c) => c.members.push(member),
            None => classes.push(Class {
                layer,
                members: vec![member],
            }),
        }
    }

    let mut named = Vec::with_capacity(classes.len());
    for c in &classes {
        let union = c
            .members
            .iter()
            .fold(SubsetId::empty(n), |acc, (s, _)| acc.union(*s));
        let (_, lift) = c.members.iter().find(|(s, _)| *s == union).ok_or_else(|| {
            Error::Invariant(format!(
                "no member of a layer class is defined by {union:?}"
            ))
        })?;
        let mut defining: Vec<SubsetId> = c.members.iter().map(|(s, _)| *s).collect();
        defining.sort();
        named.push((
            d - c.layer.dim(),
            CanonicalName {
                subset: union,
                lift: lift.clone(),
            },
            defining,
        ));
    }

    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| (named[a].0, &named[a].1).cmp(&(named[b].0, &named[b].1)));
    let mut id_of = vec![0; classes.len()];
    for (id, &c) in order.iter().enumerate() {
        id_of[c] = id;
    }

    let mut arcs = Vec::new();
    for (lo, lower) in classes.iter().enumerate() {
        for (hi, upper) in classes.iter().enumerate() {
            if named[hi].0 == named[lo].0 + 1 && layer_contains(&lower.layer, &upper.layer) {
                arcs.push((id_of[lo], id_of[hi]));
            }
        }
    }
    arcs.sort_unstable();

    let vertices = order
        .iter()
        .enumerate()
        .map(|(id, &c)| {
            let (rank, name, defining) = named[c].clone();
            LayerRecord {
                id,
                rank,
                dim: d - rank,
                defining_subsets: defining,
                canonical_name: name,
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

/// Poset of layers from the geometric definition. Limited to `N ≤ 6`,
/// `d ≤ 3`.
pub fn brute_force_layer_poset(x: &IntMatrix) -> Result<HasseDiagram> {
    let (d, n) = (x.rows(), x.cols());
    if n > MAX_ORACLE_N || d > MAX_ORACLE_D {
        return Err(Error::InstanceTooLarge(format!(
            "oracle handles N <= {MAX_ORACLE_N}, d <= {MAX_ORACLE_D}; got N = {n}, d = {d}"
        )));
    }
    check_rank(x)?;
    let cache = MatroidCache::new(x.clone())?;
    let mut candidates = Vec::new();
    for s in cache.all_subsets() {
        let group = build_layer_group(&cache, s);
        for h in group.enumerate_elements() {
            let layer = GeometricLayer::new(x, s, h.lift)?.ok_or_else(|| {
                Error::Invariant(format!(
                    "layer-group element of {s:?} names an empty subspace"
                ))
            })?;
            candidates.push(layer);
        }
    }
    assemble(d, n, Mode::Toric, candidates)
}

/// Intersection lattice from the geometric definition: kernels of every
/// `X[S]^t`, merged when equal.
pub fn brute_force_intersection_lattice(x: &IntMatrix) -> Result<HasseDiagram> {
    let (d, n) = (x.rows(), x.cols());
    if n > MAX_FLAT_ORACLE_N {
        return Err(Error::InstanceTooLarge(format!(
            "flat oracle handles N <= {MAX_FLAT_ORACLE_N}; got N = {n}"
        )));
    }
    check_rank(x)?;
    let mut candidates = Vec::new();
    for bits in 0..1u64 << n {
        let s = SubsetId::new(bits, n)?;
        let layer = GeometricLayer::new(x, s, vec![BigInt::zero(); s.len()])?
            .expect("central subspaces contain the origin");
        candidates.push(layer);
    }
    assemble(d, n, Mode::Hyperplane, candidates)
}

/// The 0-dimensional layers as points of `[0,1)^d`, sorted.
///
/// Candidates are the points of `(1/q) Z^d ∩ [0,1)^d`, where `q` is the lcm
/// of all nonzero basis determinants; a candidate is kept when the vectors
/// taking integer values on it span.
pub fn enumerate_torsion_points(x: &IntMatrix) -> Result<Vec<Vec<BigRational>>> {
    use itertools::Itertools;
    check_rank(x)?;
    let (d, n) = (x.rows(), x.cols());
    let mut q = BigInt::one();
    for cols in (0..n).combinations(d) {
        let det = x.select_columns(&cols).determinant()?;
        if !det.is_zero() {
            q = q.lcm(&det.abs());
        }
    }
    let q_small = q
        .to_u64()
        .filter(|&q| {
            q.checked_pow(d as u32)
                .is_some_and(|c| c <= MAX_TORSION_CANDIDATES)
        })
        .ok_or_else(|| Error::InstanceTooLarge(format!("{q}^{d} torsion candidates")))?;
    let columns: Vec<Vec<BigInt>> = (0..n).map(|j| x.column(j)).collect();
    let mut points = BTreeSet::new();
    let mut m = vec![0u64; d];
    loop {
        let numer: Vec<BigInt> = m.iter().map(|&v| BigInt::from(v)).collect();
        let integral: Vec<usize> = (0..n)
            .filter(|&j| {
                let dot: BigInt = columns[j].iter().zip(&numer).map(|(a, b)| a * b).sum();
                dot.is_multiple_of(&q)
            })
            .collect();
        if exact_linalg::rank(&x.select_columns(&integral)) == d {
            points.insert(
                numer
                    .iter()
                    .map(|v| BigRational::new(v.clone(), q.clone()))
                    .collect::<Vec<_>>(),
            );
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                return Ok(points.into_iter().collect());
            }
            pos -= 1;
            m[pos] += 1;
            if m[pos] < q_small {
                break;
            }
            m[pos] = 0;
        }
    }
}
