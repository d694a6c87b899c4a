//! Exact fusion-space state of one connected group of anyons.
//!
//! A group is stored in the linear ("left comb") fusion-tree basis
//!
//! ```text
//!   a0   a1   a2        a(n-1)
//!    \   /    /           /
//!     b1 ----b2-- ... --b(n-1) = total
//! ```
//!
//! with internal edge `b_m` carrying the combined charge of leaves `0..=m`
//! (`b_0 = a_0`). A labeling is packed into a `u64` whose bit `m` is set when
//! `b_m = tau`, and the state is a sparse, key-sorted list of
//! `(labeling, amplitude)` pairs. The leaf order is bookkeeping only; leaves
//! are reordered with braid (B-symbol) moves before any measurement.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::anyon::{admissible, fibonacci, AnyonModel, Charge};
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Leaves are packed into a `u64` labeling.
pub const MAX_LEAVES: usize = 64;

/// Identity of one anyon for its whole lifetime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct AnyonId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Leaf {
    pub id: AnyonId,
    pub charge: Charge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SwapDirection {
    Clockwise,
    Counterclockwise,
}

#[inline]
fn bit(mask: u64, m: usize) -> Charge {
    Charge::from_bit(mask >> m & 1 == 1)
}

#[inline]
fn with_bit(mask: u64, m: usize, c: Charge) -> u64 {
    (mask & !(1u64 << m)) | ((c.index() as u64) << m)
}

/// Label of edge `m`, with the virtual edge left of leaf 0 being the vacuum.
#[inline]
fn edge(mask: u64, m: isize) -> Charge {
    if m < 0 {
        Charge::Vacuum
    } else {
        bit(mask, m as usize)
    }
}

/// Keeps only bits `0..n`.
#[inline]
fn low_bits(mask: u64, n: usize) -> u64 {
    if n >= 64 {
        mask
    } else {
        mask & ((1u64 << n) - 1)
    }
}

/// Removes bits `from..to` and shifts the higher ones down.
#[inline]
fn drop_bits(mask: u64, from: usize, to: usize) -> u64 {
    let high = if to >= 64 { 0 } else { mask >> to };
    low_bits(mask, from) | high.checked_shl(from as u32).unwrap_or(0)
}

/// Sorts by labeling, sums duplicates and prunes negligible amplitudes.
fn canonicalize(mut terms: Vec<(u64, Complex64)>) -> Vec<(u64, Complex64)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(u64, Complex64)> = Vec::with_capacity(terms.len());
    for (k, v) in terms {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += v,
            _ => out.push((k, v)),
        }
    }
    out.retain(|t| t.1.norm() >= PRUNE_THRESHOLD);
    out
}

fn norm_sqr(terms: &[(u64, Complex64)]) -> f64 {
    terms.iter().map(|t| t.1.norm_sqr()).sum()
}

fn renormalize(terms: &mut [(u64, Complex64)]) {
    let n = norm_sqr(terms).sqrt();
    if n > 0.0 {
        for t in terms.iter_mut() {
            t.1 /= n;
        }
    }
}

/// Draws a charge from unnormalized Born weights.
fn sample_charge<R: Rng + ?Sized>(weights: [f64; 2], rng: &mut R) -> Charge {
    let total = weights[0] + weights[1];
    let u: f64 = rng.random();
    if u * total < weights[0] {
        Charge::Vacuum
    } else {
        Charge::Tau
    }
}

/// Recoupling step `((x y)_e z)_d -> (x (y z)_f)_d` applied to bit `slot`,
/// or its inverse.
///
/// `labels` reads `(x, y, current, z, d)` off a labeling, where `current` is
/// the edge stored in `slot` before the step; the new edge is written there.
fn recouple_terms<F>(model: &AnyonModel, terms: &[(u64, Complex64)], slot: usize, inverse: bool, labels: F) -> Vec<(u64, Complex64)>
where
    F: Fn(u64) -> (Charge, Charge, Charge, Charge, Charge),
{
    let mut out = Vec::with_capacity(terms.len() * 2);
    for &(mask, amp) in terms {
        let (x, y, e, z, d) = labels(mask);
        for f in Charge::ALL {
            let coef = if inverse {
                model.f_symbol(x, y, f, z, d, e).conj()
            } else {
                model.f_symbol(x, y, e, z, d, f)
            };
            if coef.norm_sqr() > 0.0 {
                out.push((with_bit(mask, slot, f), amp * coef));
            }
        }
    }
    canonicalize(out)
}

/// A group state expressed in the basis where a contiguous leaf range has
/// been recoupled into its own sub-tree.
///
/// Bits `start..end` of each labeling hold the sub-tree edges, bit `end - 1`
/// being the combined charge of the range; every other bit keeps its linear
/// meaning. A single-leaf range needs no recoupling and its charge is the
/// leaf charge.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoupledState {
    leaves: Vec<Leaf>,
    start: usize,
    end: usize,
    terms: Vec<(u64, Complex64)>,
}

impl RecoupledState {
    pub fn range(&self) -> RangeInclusive<usize> {
        self.start..=self.end
    }

    /// Combined charge of the range in one labeling.
    fn range_charge(&self, mask: u64) -> Charge {
        if self.start == self.end {
            self.leaves[self.start].charge
        } else {
            bit(mask, self.end - 1)
        }
    }

    /// Born probabilities of the range charge, indexed by `Charge::index`.
    pub fn charge_probabilities(&self) -> [f64; 2] {
        let mut w = [0.0; 2];
        for &(mask, amp) in &self.terms {
            w[self.range_charge(mask).index()] += amp.norm_sqr();
        }
        let total = w[0] + w[1];
        if total > 0.0 {
            w[0] /= total;
            w[1] /= total;
        }
        w
    }

    /// Amplitudes keyed by the full label vector (sub-tree edges in place of
    /// the replaced linear edges).
    pub fn labelings(&self) -> impl Iterator<Item = (Vec<Charge>, Complex64)> + '_ {
        let n = self.leaves.len();
        self.terms
            .iter()
            .map(move |&(mask, amp)| ((0..n).map(|m| bit(mask, m)).collect(), amp))
    }

    /// Projects onto a definite range charge and renormalizes.
    fn project(&mut self, charge: Charge) {
        let start = self.start;
        let end = self.end;
        let leaves = &self.leaves;
        self.terms.retain(|&(mask, _)| {
            let c = if start == end { leaves[start].charge } else { bit(mask, end - 1) };
            c == charge
        });
        renormalize(&mut self.terms);
        self.terms = canonicalize(std::mem::take(&mut self.terms));
    }

    /// Undoes the recoupling, returning to the linear basis.
    pub fn into_linear(self) -> FusionGroup {
        let model = fibonacci();
        let RecoupledState { leaves, start, end, mut terms } = self;
        for s in (0..end - start).rev() {
            let slot = start + s;
            terms = recouple_terms(model, &terms, slot, true, |mask| {
                let x = edge(mask, start as isize - 1);
                let y = if s == 0 { leaves[start].charge } else { bit(mask, slot - 1) };
                (x, y, bit(mask, slot), leaves[slot + 1].charge, bit(mask, slot + 1))
            });
        }
        FusionGroup { leaves, terms }
    }
}

/// State of one connected group of anyons.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionGroup {
    leaves: Vec<Leaf>,
    terms: Vec<(u64, Complex64)>,
}

/// JSON-friendly dump of a group.
#[derive(Clone, Debug, Serialize)]
pub struct GroupDump {
    pub leaves: Vec<Leaf>,
    pub labelings: Vec<LabelingDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelingDump {
    pub edges: Vec<Charge>,
    pub re: f64,
    pub im: f64,
}

impl FusionGroup {
    /// A tau pair freshly created from the vacuum.
    pub fn pair(first: AnyonId, second: AnyonId) -> Self {
        Self {
            leaves: vec![
                Leaf { id: first, charge: Charge::Tau },
                Leaf { id: second, charge: Charge::Tau },
            ],
            // b0 = tau, b1 = vacuum
            terms: vec![(0b01, Complex64::new(1.0, 0.0))],
        }
    }

    /// Builds a group from explicit labelings, validating admissibility and
    /// normalizing. Each label vector lists `b_0..b_{n-1}`.
    pub fn from_labelings(leaves: Vec<Leaf>, labelings: Vec<(Vec<Charge>, Complex64)>) -> Result<Self> {
        let n = leaves.len();
        if n == 0 || n > MAX_LEAVES {
            return Err(Error::InvalidGroup(format!("unsupported leaf count {n}")));
        }
        let mut terms = Vec::with_capacity(labelings.len());
        let mut total = None;
        for (labels, amp) in labelings {
            if labels.len() != n {
                return Err(Error::InvalidGroup("label vector length differs from leaf count".into()));
            }
            if labels[0] != leaves[0].charge {
                return Err(Error::InvalidGroup("first edge must equal the first leaf charge".into()));
            }
            for m in 1..n {
                if !admissible(labels[m - 1], leaves[m].charge, labels[m]) {
                    return Err(Error::InvalidGroup(format!("inadmissible vertex at edge {m}")));
                }
            }
            match total {
                None => total = Some(labels[n - 1]),
                Some(t) if t != labels[n - 1] => {
                    return Err(Error::InvalidGroup("labelings disagree on the total charge".into()))
                }
                _ => {}
            }
            let mask = labels.iter().enumerate().fold(0u64, |acc, (m, c)| acc | ((c.index() as u64) << m));
            terms.push((mask, amp));
        }
        let mut terms = canonicalize(terms);
        if terms.is_empty() {
            return Err(Error::InvalidGroup("state has zero norm".into()));
        }
        renormalize(&mut terms);
        Ok(Self { leaves, terms })
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Number of stored labelings.
    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.terms)
    }

    pub fn total_charge(&self) -> Charge {
        match self.terms.first() {
            Some(&(mask, _)) => bit(mask, self.leaves.len() - 1),
            None => Charge::Vacuum,
        }
    }

    pub fn position(&self, id: AnyonId) -> Option<usize> {
        self.leaves.iter().position(|l| l.id == id)
    }

    /// Amplitudes keyed by the linear-tree label vector `b_0..b_{n-1}`.
    pub fn labelings(&self) -> impl Iterator<Item = (Vec<Charge>, Complex64)> + '_ {
        let n = self.leaves.len();
        self.terms
            .iter()
            .map(move |&(mask, amp)| ((0..n).map(|m| bit(mask, m)).collect(), amp))
    }

    pub fn dump(&self) -> GroupDump {
        GroupDump {
            leaves: self.leaves.clone(),
            labelings: self
                .labelings()
                .map(|(edges, amp)| LabelingDump { edges, re: amp.re, im: amp.im })
                .collect(),
        }
    }

    /// Recouples leaves `range` into a sub-tree hanging from a single edge.
    pub fn recouple(&self, range: RangeInclusive<usize>) -> Result<RecoupledState> {
        let (start, end) = (*range.start(), *range.end());
        if start > end || end >= self.leaves.len() {
            return Err(Error::InvalidLeafRange { start, end, len: self.leaves.len() });
        }
        let model = fibonacci();
        let leaves = &self.leaves;
        let mut terms = self.terms.clone();
        for s in 0..end - start {
            let slot = start + s;
            terms = recouple_terms(model, &terms, slot, false, |mask| {
                let x = edge(mask, start as isize - 1);
                let y = if s == 0 { leaves[start].charge } else { bit(mask, slot - 1) };
                (x, y, bit(mask, slot), leaves[slot + 1].charge, bit(mask, slot + 1))
            });
        }
        Ok(RecoupledState { leaves: self.leaves.clone(), start, end, terms })
    }

    /// F-move at the leaf pair `(position, position + 1)`: the returned state
    /// is expressed in the basis where that pair is fused first.
    pub fn apply_f_move(&self, position: usize) -> Result<RecoupledState> {
        if position + 1 >= self.leaves.len() {
            return Err(Error::InvalidLeafRange { start: position, end: position + 1, len: self.leaves.len() });
        }
        self.recouple(position..=position + 1)
    }

    /// Exchanges leaves `j` and `j + 1`.
    pub fn apply_swap(&mut self, j: usize, direction: SwapDirection) -> Result<()> {
        if j + 1 >= self.leaves.len() {
            return Err(Error::InvalidLeafRange { start: j, end: j + 1, len: self.leaves.len() });
        }
        let model = fibonacci();
        let aj = self.leaves[j].charge;
        let aj1 = self.leaves[j + 1].charge;
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for &(mask, amp) in &self.terms {
            let b1 = edge(mask, j as isize - 1);
            let b2 = bit(mask, j);
            let b3 = bit(mask, j + 1);
            for b2p in Charge::ALL {
                let coef = model.b_symbol(b1, aj, b2, aj1, b3, b2p);
                let coef = match direction {
                    SwapDirection::Clockwise => coef,
                    SwapDirection::Counterclockwise => coef.conj(),
                };
                if coef.norm_sqr() > 0.0 {
                    out.push((with_bit(mask, j, b2p), amp * coef));
                }
            }
        }
        self.terms = canonicalize(out);
        self.leaves.swap(j, j + 1);
        Ok(())
    }

    /// Moves the leaf at `from` to position `to` by adjacent exchanges.
    /// Rightward steps are clockwise, leftward steps counterclockwise.
    pub fn move_leaf(&mut self, from: usize, to: usize) -> Result<()> {
        let mut p = from;
        while p < to {
            self.apply_swap(p, SwapDirection::Clockwise)?;
            p += 1;
        }
        while p > to {
            self.apply_swap(p - 1, SwapDirection::Counterclockwise)?;
            p -= 1;
        }
        Ok(())
    }

    /// Makes two leaves adjacent with the fewest exchanges, moving the one
    /// with the smaller id. Returns the position of the left one.
    pub fn make_adjacent(&mut self, u: AnyonId, v: AnyonId) -> Result<usize> {
        let pu = self.position(u).ok_or(Error::UnknownAnyon(u.0))?;
        let pv = self.position(v).ok_or(Error::UnknownAnyon(v.0))?;
        if pu == pv {
            return Err(Error::SameAnyon(u.0));
        }
        let (mover, target) = if u < v { (pu, pv) } else { (pv, pu) };
        let dest = if mover < target { target - 1 } else { target + 1 };
        self.move_leaf(mover, dest)?;
        Ok(dest.min(target))
    }

    /// Measures the combined charge of a contiguous leaf range without
    /// fusing it; the state collapses onto the sampled outcome.
    pub fn measure_charge<R: Rng + ?Sized>(&mut self, range: RangeInclusive<usize>, rng: &mut R) -> Result<Charge> {
        let mut rec = self.recouple(range)?;
        let c = sample_charge(rec.charge_probabilities(), rng);
        rec.project(c);
        *self = rec.into_linear();
        Ok(c)
    }

    /// Born distribution of the combined charge of a contiguous range.
    pub fn charge_probabilities(&self, range: RangeInclusive<usize>) -> Result<[f64; 2]> {
        Ok(self.recouple(range)?.charge_probabilities())
    }

    /// Fuses leaves `i` and `i + 1` into a single leaf, sampling the outcome.
    /// A vacuum outcome removes both leaves; otherwise the new leaf takes
    /// `keep` as its id.
    pub fn fuse_pair<R: Rng + ?Sized>(&mut self, i: usize, keep: AnyonId, rng: &mut R) -> Result<Charge> {
        let mut rec = self.apply_f_move(i)?;
        let c = sample_charge(rec.charge_probabilities(), rng);
        rec.project(c);
        // bit i now holds c; bit i + 1 is b_{i+1} = b_{i-1} x c
        let terms = rec.terms;
        let (terms, leaves): (Vec<(u64, Complex64)>, Vec<Leaf>) = if c.is_vacuum() {
            let t = terms.into_iter().map(|(m, a)| (drop_bits(m, i, i + 2), a)).collect();
            let mut leaves = self.leaves.clone();
            leaves.drain(i..=i + 1);
            (t, leaves)
        } else {
            let t = terms.into_iter().map(|(m, a)| (drop_bits(m, i, i + 1), a)).collect();
            let mut leaves = self.leaves.clone();
            leaves.drain(i..=i + 1);
            leaves.insert(i, Leaf { id: keep, charge: c });
            (t, leaves)
        };
        self.terms = canonicalize(terms);
        renormalize(&mut self.terms);
        self.leaves = leaves;
        if self.leaves.is_empty() {
            self.terms.clear();
        }
        Ok(c)
    }

    /// Inserts a tau pair with vacuum total charge so that its two leaves
    /// occupy positions `at` and `at + 1`.
    pub fn insert_vacuum_pair(&mut self, at: usize, first: AnyonId, second: AnyonId) -> Result<()> {
        let n = self.leaves.len();
        if at > n {
            return Err(Error::InvalidLeafRange { start: at, end: at + 1, len: n });
        }
        if n + 2 > MAX_LEAVES {
            return Err(Error::InvalidGroup("group exceeds the labeling width".into()));
        }
        let model = fibonacci();
        let tau = Charge::Tau;
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for &(mask, amp) in &self.terms {
            let left = edge(mask, at as isize - 1);
            let shifted = low_bits(mask, at) | (if at >= 64 { 0 } else { mask >> at } << (at + 2));
            for x in Charge::ALL {
                // (left, (tau tau)_1)_left expanded in the linear basis
                let coef = model.f_symbol(left, tau, x, tau, left, Charge::Vacuum).conj();
                if coef.norm_sqr() > 0.0 {
                    let m = with_bit(with_bit(shifted, at, x), at + 1, left);
                    out.push((m, amp * coef));
                }
            }
        }
        self.terms = canonicalize(out);
        self.leaves.insert(at, Leaf { id: first, charge: tau });
        self.leaves.insert(at + 1, Leaf { id: second, charge: tau });
        Ok(())
    }

    /// Tensor product of two vacuum-total groups; `other`'s leaves follow
    /// `self`'s.
    pub fn merge(self, other: FusionGroup) -> Result<FusionGroup> {
        if self.total_charge() != Charge::Vacuum {
            return Err(Error::InvalidGroup("merge requires a vacuum-total left group".into()));
        }
        let n1 = self.leaves.len();
        if n1 + other.leaves.len() > MAX_LEAVES {
            return Err(Error::InvalidGroup("group exceeds the labeling width".into()));
        }
        if other.leaves.iter().any(|l| self.leaves.iter().any(|k| k.id == l.id)) {
            return Err(Error::SameGroup);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(m1, a1) in &self.terms {
            for &(m2, a2) in &other.terms {
                terms.push((m1 | (m2 << n1), a1 * a2));
            }
        }
        let mut leaves = self.leaves;
        leaves.extend(other.leaves);
        Ok(FusionGroup { leaves, terms: canonicalize(terms) })
    }
}

/// Fibonacci numbers with `fib(1) = fib(2) = 1`.
pub fn fibonacci_number(n: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anyon::golden_ratio;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn amps(g: &FusionGroup) -> Vec<(Vec<Charge>, Complex64)> {
        g.labelings().collect()
    }

    fn close(a: &FusionGroup, b: &FusionGroup) -> bool {
        let (x, y) = (amps(a), amps(b));
        x.len() == y.len() && x.iter().zip(&y).all(|((l1, a1), (l2, a2))| l1 == l2 && (a1 - a2).norm() < 1e-12)
    }

    fn chain(pairs: u64) -> FusionGroup {
        let mut g = FusionGroup::pair(AnyonId(0), AnyonId(1));
        for k in 1..pairs {
            let tail = FusionGroup::pair(AnyonId(2 * k), AnyonId(2 * k + 1));
            g = g.merge(tail).unwrap();
        }
        g
    }

    #[test]
    fn fresh_pair() {
        let g = FusionGroup::pair(AnyonId(7), AnyonId(8));
        assert_eq!(g.len(), 2);
        assert_eq!(g.dimension(), 1);
        assert_eq!(g.total_charge(), Charge::Vacuum);
        assert_eq!(amps(&g), vec![(vec![Charge::Tau, Charge::Vacuum], Complex64::new(1.0, 0.0))]);
        assert_eq!(g.position(AnyonId(8)), Some(1));
    }

    #[test]
    fn f_move_weights() {
        // two pairs (0 1)(2 3): leaves 1 and 2 fuse to 1 with weight 1/phi
        let g = chain(2);
        let p = g.charge_probabilities(1..=2).unwrap();
        let phi = golden_ratio();
        assert!((p[0] - 1.0 / (phi * phi)).abs() < 1e-12);
        assert!((p[1] - 1.0 / phi).abs() < 1e-12);
        let rec = g.apply_f_move(1).unwrap();
        let mut weights: Vec<f64> = rec.labelings().map(|(_, a)| a.norm()).collect();
        weights.sort_by(f64::total_cmp);
        assert!((weights[0] - 1.0 / phi).abs() < 1e-12);
        assert!((weights[1] - 1.0 / phi.sqrt()).abs() < 1e-12);
        assert!(close(&rec.into_linear(), &g));
    }

    #[test]
    fn opposite_swaps_cancel() {
        let g = chain(3);
        for j in 0..g.len() - 1 {
            let mut h = g.clone();
            h.apply_swap(j, SwapDirection::Clockwise).unwrap();
            h.apply_swap(j, SwapDirection::Counterclockwise).unwrap();
            assert!(close(&h, &g));
        }
    }

    #[test]
    fn double_exchange_of_a_pair() {
        let mut g = FusionGroup::pair(AnyonId(0), AnyonId(1));
        g.apply_swap(0, SwapDirection::Clockwise).unwrap();
        g.apply_swap(0, SwapDirection::Clockwise).unwrap();
        let r = fibonacci().r_symbol(Charge::Tau, Charge::Tau, Charge::Vacuum);
        assert!((amps(&g)[0].1 - r * r).norm() < 1e-12);
        assert!((r * r - Complex64::from_polar(1.0, 8.0 * std::f64::consts::PI / 5.0)).norm() < 1e-12);
    }

    #[test]
    fn exchange_with_a_vacuum_leaf_is_trivial() {
        let leaves = vec![
            Leaf { id: AnyonId(0), charge: Charge::Tau },
            Leaf { id: AnyonId(1), charge: Charge::Vacuum },
            Leaf { id: AnyonId(2), charge: Charge::Tau },
        ];
        let labels = vec![Charge::Tau, Charge::Tau, Charge::Vacuum];
        let g = FusionGroup::from_labelings(leaves, vec![(labels, Complex64::new(0.0, 1.0))]).unwrap();
        for dir in [SwapDirection::Clockwise, SwapDirection::Counterclockwise] {
            let mut h = g.clone();
            h.apply_swap(0, dir).unwrap();
            let (l, a) = amps(&h).remove(0);
            assert_eq!(l, vec![Charge::Vacuum, Charge::Tau, Charge::Vacuum]);
            assert!((a - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn measurement_is_repeatable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = chain(3);
        let c = g.measure_charge(1..=2, &mut rng).unwrap();
        let p = g.charge_probabilities(1..=2).unwrap();
        assert!((p[c.index()] - 1.0).abs() < 1e-12);
        assert_eq!(g.measure_charge(1..=2, &mut rng).unwrap(), c);
        // the whole group is a vacuum pair product
        assert_eq!(g.measure_charge(0..=5, &mut rng).unwrap(), Charge::Vacuum);
    }

    #[test]
    fn fusing_a_fresh_pair_gives_vacuum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut g = FusionGroup::pair(AnyonId(0), AnyonId(1));
        assert_eq!(g.fuse_pair(0, AnyonId(0), &mut rng).unwrap(), Charge::Vacuum);
        assert!(g.is_empty());
        assert_eq!(g.dimension(), 0);
    }

    #[test]
    fn fused_tau_keeps_the_requested_id() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut g = chain(2);
            let c = g.fuse_pair(1, AnyonId(42), &mut rng).unwrap();
            if c == Charge::Tau {
                assert_eq!(g.len(), 3);
                assert_eq!(g.position(AnyonId(42)), Some(1));
                assert_eq!(g.total_charge(), Charge::Vacuum);
                return;
            }
        }
        panic!("no tau outcome in 50 draws");
    }

    #[test]
    fn merge_dimension_is_a_product() {
        let a = chain(2);
        let b = FusionGroup::from_labelings(
            chain(3).leaves().iter().map(|l| Leaf { id: AnyonId(l.id.0 + 100), charge: l.charge }).collect(),
            amps(&chain(3)),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut a2 = a.clone();
        a2.apply_swap(1, SwapDirection::Clockwise).unwrap();
        let mut b2 = b.clone();
        b2.apply_swap(2, SwapDirection::Counterclockwise).unwrap();
        b2.measure_charge(0..=1, &mut rng).unwrap();
        let m = a2.clone().merge(b2.clone()).unwrap();
        assert_eq!(m.dimension(), a2.dimension() * b2.dimension());
        assert_eq!(m.len(), a.len() + b.len());
        assert!(a.merge(chain(1)).is_err());
    }

    #[test]
    fn basis_sizes_are_fibonacci() {
        assert_eq!((1..=8).map(fibonacci_number).collect::<Vec<_>>(), vec![1, 1, 2, 3, 5, 8, 13, 21]);
        // swaps spread a product state over the whole vacuum sector
        let mut g = chain(3);
        for j in [1, 3, 2, 0, 4, 1, 3] {
            g.apply_swap(j, SwapDirection::Clockwise).unwrap();
        }
        assert_eq!(g.dimension() as u64, fibonacci_number(5));
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let g = chain(2);
        assert!(g.recouple(2..=4).is_err());
        assert!(g.apply_f_move(3).is_err());
        assert!(g.clone().apply_swap(3, SwapDirection::Clockwise).is_err());
    }

    #[derive(Clone, Debug)]
    enum Op {
        Swap(usize, bool),
        Measure(usize, usize),
        Fuse(usize),
        Insert(usize),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..16, any::<bool>()).prop_map(|(j, cw)| Op::Swap(j, cw)),
            (0usize..16, 0usize..16).prop_map(|(a, b)| Op::Measure(a, b)),
            (0usize..16).prop_map(Op::Fuse),
            (0usize..16).prop_map(Op::Insert),
        ]
    }

    proptest! {
        #[test]
        fn operations_preserve_invariants(ops in proptest::collection::vec(op(), 1..30), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = chain(2);
            let mut next_id = 100;
            for o in ops {
                let n = g.len();
                match o {
                    Op::Swap(j, cw) if n >= 2 => {
                        let dir = if cw { SwapDirection::Clockwise } else { SwapDirection::Counterclockwise };
                        g.apply_swap(j % (n - 1), dir).unwrap();
                    }
                    Op::Measure(a, b) => {
                        let (a, b) = (a % n, b % n);
                        g.measure_charge(a.min(b)..=a.max(b), &mut rng).unwrap();
                    }
                    Op::Fuse(i) if n >= 2 => {
                        g.fuse_pair(i % (n - 1), AnyonId(next_id), &mut rng).unwrap();
                        next_id += 1;
                    }
                    Op::Insert(at) if n <= 10 => {
                        g.insert_vacuum_pair(at % (n + 1), AnyonId(next_id), AnyonId(next_id + 1)).unwrap();
                        next_id += 2;
                    }
                    _ => {}
                }
                if g.is_empty() {
                    g = chain(1);
                }
                prop_assert!((g.norm_sqr() - 1.0).abs() < 1e-9);
                prop_assert_eq!(g.total_charge(), Charge::Vacuum);
                let tau_leaves = g.leaves().iter().filter(|l| l.charge == Charge::Tau).count();
                prop_assert!(g.dimension() as u64 <= fibonacci_number(tau_leaves.saturating_sub(1)).max(1));
            }
        }

        #[test]
        fn swap_then_inverse_is_identity(j in 0usize..5, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = chain(3);
            g.apply_swap(2, SwapDirection::Clockwise).unwrap();
            g.measure_charge(0..=2, &mut rng).unwrap();
            let before = g.clone();
            g.apply_swap(j, SwapDirection::Clockwise).unwrap();
            g.apply_swap(j, SwapDirection::Counterclockwise).unwrap();
            prop_assert!(close(&g, &before));
        }
    }
}
