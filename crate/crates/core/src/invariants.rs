//! Möbius function, characteristic polynomial and rank counts of a graded
//! poset given by its Hasse diagram.

use crate::error::{Error, Result};
use crate::poset_builder::HasseDiagram;

/// `μ(0̂, v)` for every vertex, indexed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    pub bottom: usize,
    pub values: Vec<i64>,
}

impl MobiusTable {
    pub fn get(&self, id: usize) -> i64 {
        self.values[id]
    }
}

/// Coefficients of `χ(t) = Σ_v μ(0̂, v) t^dim(v)`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolynomial {
    pub coefficients: Vec<i64>,
}

impl CharPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, t: i64) -> Option<i64> {
        self.coefficients
            .iter()
            .rev()
            .try_fold(0i64, |acc, &c| acc.checked_mul(t)?.checked_add(c))
    }
}

/// Fixed-width bitset over vertex ids.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }
}

fn rank_order(h: &HasseDiagram) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by_key(|&v| (h.vertices[v].rank, v));
    order
}

/// Strict down-sets, built level by level from the cover relations.
fn strict_down_sets(h: &HasseDiagram) -> Vec<Bits> {
    let down = h.lower_covers();
    let mut below = vec![Bits::new(h.len()); h.len()];
    for v in rank_order(h) {
        let mut acc = Bits::new(h.len());
        for &u in &down[v] {
            acc.set(u);
            acc.or_assign(&below[u]);
        }
        below[v] = acc;
    }
    below
}

pub fn mobius(h: &HasseDiagram) -> Result<MobiusTable> {
    let bottoms: Vec<usize> = h
        .vertices
        .iter()
        .filter(|v| v.rank == 0)
        .map(|v| v.id)
        .collect();
    let &[bottom] = bottoms.as_slice() else {
        return Err(Error::NoBottom(bottoms.len()));
    };
    let below = strict_down_sets(h);
    let mut values = vec![0i64; h.len()];
    for v in rank_order(h) {
        if v == bottom {
            values[v] = 1;
            continue;
        }
        if !below[v].get(bottom) {
            continue;
        }
        let mut sum = 0i64;
        for u in below[v].ones() {
            if u == bottom || below[u].get(bottom) {
                sum = sum
                    .checked_add(values[u])
                    .ok_or(Error::Overflow("Möbius function"))?;
            }
        }
        values[v] = -sum;
    }
    Ok(MobiusTable { bottom, values })
}

pub fn characteristic_polynomial(h: &HasseDiagram) -> Result<CharPolynomial> {
    let mu = mobius(h)?;
    let mut coefficients = vec![0i64; h.d + 1];
    for v in &h.vertices {
        let c = &mut coefficients[v.dim];
        *c = c
            .checked_add(mu.get(v.id))
            .ok_or(Error::Overflow("characteristic polynomial"))?;
    }
    Ok(CharPolynomial { coefficients })
}

/// Number of vertices of each rank `0..=d`.
pub fn rank_counts(h: &HasseDiagram) -> Vec<usize> {
    let mut counts = vec![0; h.d + 1];
    for v in &h.vertices {
        counts[v.rank] += 1;
    }
    counts
}

/// Checks `Σ_{u ≤ v} μ(0̂, u) = [v = 0̂]` over every interval `[0̂, v]`.
pub fn mobius_identity_holds(h: &HasseDiagram, mu: &MobiusTable) -> bool {
    let below = strict_down_sets(h);
    (0..h.len()).all(|v| {
        let in_interval = |u: usize| u == mu.bottom || below[u].get(mu.bottom);
        if v != mu.bottom && !below[v].get(mu.bottom) {
            return mu.values[v] == 0;
        }
        let sum: i64 = below[v]
            .ones()
            .filter(|&u| in_interval(u))
            .map(|u| mu.values[u])
            .sum::<i64>()
            + mu.values[v];
        sum == i64::from(v == mu.bottom)
    })
}
