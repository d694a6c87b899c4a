//! Brute-force reference for fusion-group operations on at most five anyons.
//!
//! The reference keeps dense amplitude maps keyed by full label vectors and
//! builds every operation from hand-written Fibonacci F and R tables:
//! exchanges as F R F^dagger, range charges via right-comb recoupling (the
//! opposite association to the one used by the library), and projectors as
//! T^dagger D T with T the explicit recoupling matrix.

use std::collections::BTreeMap;

use fibsim_core::anyon::Charge;
use fibsim_core::fusion::{AnyonId, FusionGroup, Leaf, SwapDirection};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;
const VAC: u8 = 0;
const TAU: u8 = 1;

type Dense = BTreeMap<Vec<u8>, Complex64>;

fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn adm(a: u8, b: u8, c: u8) -> bool {
    a + b + c != 1
}

/// `[F^{abc}_d]_{ef}`: `((a b)_e c)_d = sum_f F (a (b c)_f)_d`.
fn f_sym(a: u8, b: u8, c: u8, d: u8, e: u8, f: u8) -> f64 {
    if !(adm(a, b, e) && adm(e, c, d) && adm(b, c, f) && adm(a, f, d)) {
        return 0.0;
    }
    if a == TAU && b == TAU && c == TAU && d == TAU {
        let p = phi();
        return match (e, f) {
            (VAC, VAC) => 1.0 / p,
            (TAU, TAU) => -1.0 / p,
            _ => 1.0 / p.sqrt(),
        };
    }
    1.0
}

fn r_sym(a: u8, b: u8, c: u8) -> Complex64 {
    if !adm(a, b, c) {
        return Complex64::new(0.0, 0.0);
    }
    if a == TAU && b == TAU {
        let angle = if c == VAC { 4.0 } else { -3.0 } * std::f64::consts::PI / 5.0;
        return Complex64::from_polar(1.0, angle);
    }
    Complex64::new(1.0, 0.0)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn to_u8(ch: Charge) -> u8 {
    ch.index() as u8
}

fn from_u8(x: u8) -> Charge {
    if x == TAU {
        Charge::Tau
    } else {
        Charge::Vacuum
    }
}

fn dense_of(g: &FusionGroup) -> Dense {
    g.labelings().map(|(l, a)| (l.into_iter().map(to_u8).collect(), a)).collect()
}

fn leaves_of(g: &FusionGroup) -> Vec<u8> {
    g.leaves().iter().map(|l| to_u8(l.charge)).collect()
}

fn edge(labels: &[u8], m: isize) -> u8 {
    if m < 0 {
        VAC
    } else {
        labels[m as usize]
    }
}

fn add_to(map: &mut Dense, key: Vec<u8>, v: Complex64) {
    *map.entry(key).or_insert(c(0.0)) += v;
}

fn assert_close(a: &Dense, b: &Dense, what: &str) {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    for k in keys {
        let x = a.get(k).copied().unwrap_or_default();
        let y = b.get(k).copied().unwrap_or_default();
        assert!((x - y).norm() < TOL, "{what}: label {k:?}: {x} vs {y}");
    }
}

/// All admissible linear label vectors for the given leaves and total.
fn basis(leaves: &[u8], total: u8) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![vec![leaves[0]]];
    for &a in &leaves[1..] {
        out = out
            .into_iter()
            .flat_map(|v| {
                let last = *v.last().unwrap();
                [VAC, TAU].into_iter().filter(move |&b| adm(last, a, b)).map(move |b| {
                    let mut w = v.clone();
                    w.push(b);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| *v.last().unwrap() == total);
    out
}

fn random_group(n: usize, total: u8, rng: &mut ChaCha8Rng) -> FusionGroup {
    let charges = vec![TAU; n];
    let leaves: Vec<Leaf> = (0..n).map(|i| Leaf { id: AnyonId(i as u64), charge: Charge::Tau }).collect();
    let labelings = basis(&charges, total)
        .into_iter()
        .map(|v| {
            let amp = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            (v.into_iter().map(from_u8).collect(), amp)
        })
        .collect();
    FusionGroup::from_labelings(leaves, labelings).unwrap()
}

/// Exchange of leaves `j`, `j + 1`: fuse them with F, braid with R, split
/// back with F^dagger for the swapped order.
fn oracle_swap(leaves: &[u8], state: &Dense, j: usize, dir: SwapDirection) -> Dense {
    let (aj, aj1) = (leaves[j], leaves[j + 1]);
    let mut out = Dense::new();
    for (labels, &amp) in state {
        let b1 = edge(labels, j as isize - 1);
        let b2 = labels[j];
        let b3 = labels[j + 1];
        for cc in [VAC, TAU] {
            let to_fused = f_sym(b1, aj, aj1, b3, b2, cc);
            if to_fused == 0.0 {
                continue;
            }
            let r = match dir {
                SwapDirection::Clockwise => r_sym(aj, aj1, cc),
                SwapDirection::Counterclockwise => r_sym(aj, aj1, cc).conj(),
            };
            for b2p in [VAC, TAU] {
                let back = f_sym(b1, aj1, aj, b3, b2p, cc);
                if back == 0.0 {
                    continue;
                }
                let mut key = labels.clone();
                key[j] = b2p;
                add_to(&mut out, key, amp * c(to_fused) * r * c(back));
            }
        }
    }
    out
}

/// Key of the right-comb basis for range `i..=j`: linear edges outside the
/// range, then the comb's edges from the outermost (the range charge) in.
type CombKey = (Vec<u8>, Vec<u8>);

/// Right-comb state while the comb grows: linear prefix, comb edges, suffix.
type Growing = BTreeMap<(Vec<u8>, Vec<u8>, Vec<u8>), Complex64>;

/// Recouples leaves `i..=j` into a right comb `(a_i (a_{i+1} (... a_j)))`,
/// one leaf at a time from the right.
fn right_comb(leaves: &[u8], state: &Dense, i: usize, j: usize) -> BTreeMap<CombKey, Complex64> {
    // outside: edges b_0..b_{m-1} then b_j..; comb: current subtree edges
    let mut cur: Growing = state
        .iter()
        .map(|(l, &a)| ((l[..j].to_vec(), vec![leaves[j]], l[j..].to_vec()), a))
        .collect();
    for m in (i..j).rev() {
        let mut next = Growing::new();
        for ((prefix, comb, suffix), amp) in cur {
            // ((b_{m-1} a_m)_{b_m} F)_{b_j} -> (b_{m-1} (a_m F)_g)_{b_j}
            let bm = prefix[m];
            let before = edge(&prefix, m as isize - 1);
            let top = comb[0];
            let bj = suffix[0];
            for g in [VAC, TAU] {
                let coef = f_sym(before, leaves[m], top, bj, bm, g);
                if coef == 0.0 {
                    continue;
                }
                let mut comb2 = vec![g];
                comb2.extend(&comb);
                *next.entry((prefix[..m].to_vec(), comb2, suffix.clone())).or_insert(c(0.0)) += amp * c(coef);
            }
        }
        cur = next;
    }
    cur.into_iter()
        .map(|((mut prefix, comb, suffix), a)| {
            prefix.extend(suffix);
            ((prefix, comb), a)
        })
        .collect()
}

fn range_probabilities(leaves: &[u8], state: &Dense, i: usize, j: usize) -> [f64; 2] {
    let mut w = [0.0; 2];
    for ((_, comb), a) in right_comb(leaves, state, i, j) {
        w[comb[0] as usize] += a.norm_sqr();
    }
    let t = w[0] + w[1];
    [w[0] / t, w[1] / t]
}

/// `P_c psi` computed as `T^dagger D_c T psi` with `T` the right-comb map.
fn project(leaves: &[u8], state: &Dense, i: usize, j: usize, charge: u8) -> Dense {
    let mut out = Dense::new();
    let forward = right_comb(leaves, state, i, j);
    // T^dagger: expand every linear basis vector and take overlaps
    let all: std::collections::BTreeSet<Vec<u8>> = {
        let total = *state.keys().next().unwrap().last().unwrap();
        basis(leaves, total).into_iter().collect()
    };
    for e in all {
        let unit: Dense = [(e.clone(), c(1.0))].into_iter().collect();
        let column = right_comb(leaves, &unit, i, j);
        let mut overlap = c(0.0);
        for (k, t) in column {
            if k.1[0] != charge {
                continue;
            }
            if let Some(&a) = forward.get(&k) {
                overlap += t.conj() * a;
            }
        }
        if overlap.norm() > 1e-15 {
            out.insert(e, overlap);
        }
    }
    out
}

fn normalized(mut d: Dense) -> Dense {
    let n: f64 = d.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in d.values_mut() {
        *a /= n;
    }
    d
}

fn groups(seed: u64) -> Vec<FusionGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in 2..=5 {
        for total in [VAC, TAU] {
            if basis(&vec![TAU; n], total).is_empty() {
                continue;
            }
            for _ in 0..3 {
                out.push(random_group(n, total, &mut rng));
            }
        }
    }
    out
}

pub fn swaps_match_reference() {
    for g in groups(1) {
        let leaves = leaves_of(&g);
        for j in 0..g.len() - 1 {
            for dir in [SwapDirection::Clockwise, SwapDirection::Counterclockwise] {
                let mut h = g.clone();
                h.apply_swap(j, dir).unwrap();
                let expected = oracle_swap(&leaves, &dense_of(&g), j, dir);
                assert_close(&dense_of(&h), &expected, "swap");
                assert!((h.norm_sqr() - 1.0).abs() < 1e-9);
            }
        }
    }
}

pub fn pair_exchange_phase() {
    let mut g = FusionGroup::pair(AnyonId(0), AnyonId(1));
    g.apply_swap(0, SwapDirection::Clockwise).unwrap();
    g.apply_swap(0, SwapDirection::Clockwise).unwrap();
    let (_, amp) = g.labelings().next().unwrap();
    let expected = Complex64::from_polar(1.0, 8.0 * std::f64::consts::PI / 5.0);
    assert!((amp - expected).norm() < TOL);
}

pub fn range_charges_match_reference() {
    for g in groups(2) {
        let leaves = leaves_of(&g);
        let d = dense_of(&g);
        for i in 0..g.len() {
            for j in i..g.len() {
                let got = g.charge_probabilities(i..=j).unwrap();
                let want = if i == j { [0.0, 1.0] } else { range_probabilities(&leaves, &d, i, j) };
                assert!((got[0] - want[0]).abs() < TOL && (got[1] - want[1]).abs() < TOL, "{i}..={j}: {got:?} vs {want:?}");
                assert!((got[0] + got[1] - 1.0).abs() < 1e-9);
            }
        }
    }
}

pub fn measurement_collapse_matches_projector() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in groups(3) {
        let leaves = leaves_of(&g);
        let d = dense_of(&g);
        for i in 0..g.len() - 1 {
            for j in i + 1..g.len() {
                let mut h = g.clone();
                let outcome = h.measure_charge(i..=j, &mut rng).unwrap();
                let expected = normalized(project(&leaves, &d, i, j, to_u8(outcome)));
                assert_close(&dense_of(&h), &expected, "collapse");
            }
        }
    }
}

pub fn fusion_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for g in groups(4) {
        let leaves = leaves_of(&g);
        let d = dense_of(&g);
        for i in 0..g.len() - 1 {
            let mut h = g.clone();
            let outcome = to_u8(h.fuse_pair(i, AnyonId(99), &mut rng).unwrap());
            // amplitude of the fused basis: sum over the replaced edge b_i
            let mut expected = Dense::new();
            for (labels, &amp) in &d {
                let before = edge(labels, i as isize - 1);
                let coef = f_sym(before, leaves[i], leaves[i + 1], labels[i + 1], labels[i], outcome);
                if coef == 0.0 {
                    continue;
                }
                let mut key: Vec<u8> = labels[..i].to_vec();
                if outcome == TAU {
                    key.extend(&labels[i + 1..]);
                } else {
                    key.extend(&labels[i + 2..]);
                }
                add_to(&mut expected, key, amp * c(coef));
            }
            if h.is_empty() {
                continue;
            }
            assert_close(&dense_of(&h), &normalized(expected), "fusion");
            let ids: Vec<u64> = h.leaves().iter().map(|l| l.id.0).collect();
            if outcome == TAU {
                assert_eq!(ids[i], 99);
                assert_eq!(h.len(), g.len() - 1);
            } else {
                assert_eq!(h.len(), g.len() - 2);
            }
        }
    }
}

pub fn pair_insertion_matches_reference() {
    for g in groups(5).into_iter().filter(|g| g.len() <= 3) {
        let leaves = leaves_of(&g);
        for at in 0..=g.len() {
            let mut h = g.clone();
            h.insert_vacuum_pair(at, AnyonId(100), AnyonId(101)).unwrap();
            // (left (tau tau)_1)_left = sum_x conj F (left tau)_x tau)_left
            let mut expected = Dense::new();
            for (labels, &amp) in &dense_of(&g) {
                let left = edge(labels, at as isize - 1);
                for x in [VAC, TAU] {
                    let coef = f_sym(left, TAU, TAU, left, x, VAC);
                    if coef == 0.0 {
                        continue;
                    }
                    let mut key = labels[..at].to_vec();
                    key.push(x);
                    key.push(left);
                    key.extend(&labels[at..]);
                    add_to(&mut expected, key, amp * c(coef));
                }
            }
            assert_close(&dense_of(&h), &expected, "insertion");
            // the new pair fuses to the vacuum
            let p = h.charge_probabilities(at..=at + 1).unwrap();
            assert!((p[0] - 1.0).abs() < TOL);
            let mut with_pair = leaves.clone();
            with_pair.insert(at, TAU);
            with_pair.insert(at, TAU);
            assert_eq!(leaves_of(&h), with_pair);
        }
    }
}

pub fn merge_is_a_tensor_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_group(2, VAC, &mut rng);
    let b = {
        let g = random_group(3, VAC, &mut rng);
        let leaves = g.leaves().iter().map(|l| Leaf { id: AnyonId(l.id.0 + 10), charge: l.charge }).collect();
        FusionGroup::from_labelings(leaves, g.labelings().collect()).unwrap()
    };
    let m = a.clone().merge(b.clone()).unwrap();
    assert_eq!(m.dimension(), a.dimension() * b.dimension());
    let mut expected = Dense::new();
    for (ka, va) in dense_of(&a) {
        for (kb, vb) in dense_of(&b) {
            let mut key = ka.clone();
            key.extend(&kb);
            add_to(&mut expected, key, va * vb);
        }
    }
    assert_close(&dense_of(&m), &expected, "merge");
    let p = m.charge_probabilities(0..=m.len() - 1).unwrap();
    assert!((p[0] - 1.0).abs() < TOL);
}

pub fn pentagon_paths_agree_on_states() {
    // ((a0 a1)_{b1} a2)_{b2} a3 -> (a0 (a1 (a2 a3)_g)_f) along both paths
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for total in [VAC, TAU] {
        let g = random_group(4, total, &mut rng);
        let d = dense_of(&g);
        let mut two = BTreeMap::new();
        let mut three = BTreeMap::new();
        for (l, &amp) in &d {
            let (a, b1, b2, b3) = (TAU, l[1], l[2], l[3]);
            for gg in [VAC, TAU] {
                for f in [VAC, TAU] {
                    let v = f_sym(b1, TAU, TAU, b3, b2, gg) * f_sym(a, TAU, gg, b3, b1, f);
                    *two.entry((f, gg)).or_insert(c(0.0)) += amp * c(v);
                    let mut w = 0.0;
                    for h in [VAC, TAU] {
                        w += f_sym(a, TAU, TAU, b2, b1, h) * f_sym(a, h, TAU, b3, b2, f) * f_sym(TAU, TAU, TAU, f, h, gg);
                    }
                    *three.entry((f, gg)).or_insert(c(0.0)) += amp * c(w);
                }
            }
        }
        for (k, v) in &two {
            assert!((v - three[k]).norm() < TOL, "{k:?}");
        }
        // f is the charge of leaves 1..=3
        let mut pf = [0.0; 2];
        for ((f, _), v) in &two {
            pf[*f as usize] += v.norm_sqr();
        }
        let got = g.charge_probabilities(1..=3).unwrap();
        assert!((got[0] - pf[0]).abs() < TOL && (got[1] - pf[1]).abs() < TOL);
    }
}

fn four_sigma(count: u64, n: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    ((count as f64 / n as f64) - p).abs() < 4.0 * sigma.max(1e-12)
}

pub fn sampling_follows_born_probabilities() {
    let n = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = random_group(5, TAU, &mut rng);
    let p = g.charge_probabilities(1..=3).unwrap();
    let mut vacuum = 0;
    for _ in 0..n {
        let mut h = g.clone();
        if h.measure_charge(1..=3, &mut rng).unwrap() == Charge::Vacuum {
            vacuum += 1;
        }
    }
    assert!(four_sigma(vacuum, n, p[0]), "{vacuum} of {n} vs {}", p[0]);
}

pub fn pair_creation_next_to_an_anyon() {
    // an existing pair (x, y); a new pair appears next to x and x fuses with
    // its nearer member
    let n = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p_vac = 1.0 / (phi() * phi());
    let mut base = FusionGroup::pair(AnyonId(0), AnyonId(1));
    base.insert_vacuum_pair(1, AnyonId(2), AnyonId(3)).unwrap();
    let probs = base.charge_probabilities(0..=1).unwrap();
    assert!((probs[0] - p_vac).abs() < TOL);
    assert!((probs[1] - 1.0 / phi()).abs() < TOL);
    let mut vacuum = 0;
    for _ in 0..n {
        let mut h = base.clone();
        if h.fuse_pair(0, AnyonId(0), &mut rng).unwrap() == Charge::Vacuum {
            vacuum += 1;
        }
    }
    assert!(four_sigma(vacuum, n, p_vac), "{vacuum} of {n}");
}
