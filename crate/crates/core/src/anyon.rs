//! Fibonacci anyon data: fusion rules, F-, R- and B-symbols, the modular S
//! matrix, and numerical checks of the pentagon and hexagon identities.
//!
//! All symbols are stored as dense tables over the two-element label set, so
//! every lookup in the state-evolution inner loops is a single array index.

use std::f64::consts::PI;
use std::fmt;
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance used for every algebraic consistency check.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-12;

/// The golden ratio.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// Anyon label of the Fibonacci model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Charge {
    Vacuum,
    Tau,
}

impl Charge {
    pub const ALL: [Charge; 2] = [Charge::Vacuum, Charge::Tau];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Charge::Vacuum => 0,
            Charge::Tau => 1,
        }
    }

    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Charge::Tau
        } else {
            Charge::Vacuum
        }
    }

    #[inline]
    pub fn is_vacuum(self) -> bool {
        self == Charge::Vacuum
    }

    /// Quantum dimension: 1 for the vacuum, the golden ratio for tau.
    pub fn quantum_dimension(self) -> f64 {
        match self {
            Charge::Vacuum => 1.0,
            Charge::Tau => golden_ratio(),
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Charge::Vacuum => write!(f, "1"),
            Charge::Tau => write!(f, "tau"),
        }
    }
}

/// Fusion multiplicity `N^{ab}_c`, which is 0 or 1 for this model.
///
/// All labels are self-dual, so the multiplicity is symmetric in its three
/// arguments. It vanishes exactly when one of the three labels is tau and the
/// other two are the vacuum.
#[inline]
pub fn admissible(a: Charge, b: Charge, c: Charge) -> bool {
    (a.index() + b.index() + c.index()) != 1
}

/// Admissible outcomes of fusing `a` with `b`.
pub fn fuse_outcomes(a: Charge, b: Charge) -> &'static [Charge] {
    match (a, b) {
        (Charge::Vacuum, Charge::Vacuum) => &[Charge::Vacuum],
        (Charge::Vacuum, Charge::Tau) | (Charge::Tau, Charge::Vacuum) => &[Charge::Tau],
        (Charge::Tau, Charge::Tau) => &[Charge::Vacuum, Charge::Tau],
    }
}

#[inline]
fn idx6(a: Charge, b: Charge, e: Charge, c: Charge, d: Charge, f: Charge) -> usize {
    (a.index() << 5)
        | (b.index() << 4)
        | (e.index() << 3)
        | (c.index() << 2)
        | (d.index() << 1)
        | f.index()
}

#[inline]
fn idx3(a: Charge, b: Charge, c: Charge) -> usize {
    (a.index() << 2) | (b.index() << 1) | c.index()
}

/// Dense table of F-symbols `F^{abe}_{cdf}`.
///
/// The symbol recouples `((a b)_e c)_d` into `(a (b c)_f)_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FSymbolTable {
    golden_ratio: f64,
    values: [Complex64; 64],
}

impl FSymbolTable {
    pub fn fibonacci() -> Self {
        let phi = golden_ratio();
        let mut values = [Complex64::new(0.0, 0.0); 64];
        for a in Charge::ALL {
            for b in Charge::ALL {
                for e in Charge::ALL {
                    for c in Charge::ALL {
                        for d in Charge::ALL {
                            for f in Charge::ALL {
                                let ok = admissible(a, b, e)
                                    && admissible(e, c, d)
                                    && admissible(b, c, f)
                                    && admissible(a, f, d);
                                if !ok {
                                    continue;
                                }
                                let all_tau = [a, b, c, d].iter().all(|&x| x == Charge::Tau);
                                let v = if all_tau {
                                    match (e, f) {
                                        (Charge::Vacuum, Charge::Vacuum) => 1.0 / phi,
                                        (Charge::Tau, Charge::Tau) => -1.0 / phi,
                                        _ => 1.0 / phi.sqrt(),
                                    }
                                } else {
                                    1.0
                                };
                                values[idx6(a, b, e, c, d, f)] = Complex64::new(v, 0.0);
                            }
                        }
                    }
                }
            }
        }
        Self {
            golden_ratio: phi,
            values,
        }
    }

    pub fn golden_ratio(&self) -> f64 {
        self.golden_ratio
    }

    #[inline]
    pub fn get(&self, a: Charge, b: Charge, e: Charge, c: Charge, d: Charge, f: Charge) -> Complex64 {
        self.values[idx6(a, b, e, c, d, f)]
    }

    /// Overwrites a single entry. Used to build deliberately broken tables.
    pub fn set(&mut self, labels: [Charge; 6], value: Complex64) {
        let [a, b, e, c, d, f] = labels;
        self.values[idx6(a, b, e, c, d, f)] = value;
    }
}

/// Dense table of R-symbols `R^{ab}_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct RSymbolTable {
    values: [Complex64; 8],
}

impl RSymbolTable {
    pub fn fibonacci() -> Self {
        let mut values = [Complex64::new(0.0, 0.0); 8];
        for a in Charge::ALL {
            for b in Charge::ALL {
                for c in Charge::ALL {
                    if !admissible(a, b, c) {
                        continue;
                    }
                    let v = match (a, b, c) {
                        (Charge::Tau, Charge::Tau, Charge::Vacuum) => Complex64::from_polar(1.0, 4.0 * PI / 5.0),
                        (Charge::Tau, Charge::Tau, Charge::Tau) => Complex64::from_polar(1.0, -3.0 * PI / 5.0),
                        _ => Complex64::new(1.0, 0.0),
                    };
                    values[idx3(a, b, c)] = v;
                }
            }
        }
        Self { values }
    }

    #[inline]
    pub fn get(&self, a: Charge, b: Charge, c: Charge) -> Complex64 {
        self.values[idx3(a, b, c)]
    }

    pub fn set(&mut self, labels: [Charge; 3], value: Complex64) {
        let [a, b, c] = labels;
        self.values[idx3(a, b, c)] = value;
    }
}

/// Modular S matrix, indexed by `Charge::index`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrix(pub [[Complex64; 2]; 2]);

impl SMatrix {
    #[inline]
    pub fn get(&self, a: Charge, b: Charge) -> Complex64 {
        self.0[a.index()][b.index()]
    }
}

/// The Fibonacci S matrix `(1, phi; phi, -1) / sqrt(1 + phi^2)`.
pub fn s_matrix() -> SMatrix {
    let phi = golden_ratio();
    let norm = 1.0 / (1.0 + phi * phi).sqrt();
    let c = |x: f64| Complex64::new(x * norm, 0.0);
    SMatrix([[c(1.0), c(phi)], [c(phi), c(-1.0)]])
}

/// F and R tables together with the derived braid (B) table.
#[derive(Clone, Debug)]
pub struct AnyonModel {
    pub f: FSymbolTable,
    pub r: RSymbolTable,
    b: [Complex64; 64],
}

static FIBONACCI: LazyLock<AnyonModel> =
    LazyLock::new(|| AnyonModel::new(FSymbolTable::fibonacci(), RSymbolTable::fibonacci()));

/// Shared, immutable Fibonacci model.
pub fn fibonacci() -> &'static AnyonModel {
    &FIBONACCI
}

impl AnyonModel {
    pub fn new(f: FSymbolTable, r: RSymbolTable) -> Self {
        let mut b = [Complex64::new(0.0, 0.0); 64];
        for b1 in Charge::ALL {
            for aj in Charge::ALL {
                for b2 in Charge::ALL {
                    for aj1 in Charge::ALL {
                        for b3 in Charge::ALL {
                            for b2p in Charge::ALL {
                                b[idx6(b1, aj, b2, aj1, b3, b2p)] =
                                    compose_b_symbol(&f, &r, b1, aj, b2, aj1, b3, b2p);
                            }
                        }
                    }
                }
            }
        }
        Self { f, r, b }
    }

    #[inline]
    pub fn f_symbol(&self, a: Charge, b: Charge, e: Charge, c: Charge, d: Charge, f: Charge) -> Complex64 {
        self.f.get(a, b, e, c, d, f)
    }

    #[inline]
    pub fn r_symbol(&self, a: Charge, b: Charge, c: Charge) -> Complex64 {
        self.r.get(a, b, c)
    }

    /// Braid coefficient `B^{b1 aj b2}_{aj1 b3 b2p}` for exchanging adjacent
    /// leaves `aj`, `aj1` of a linear fusion tree whose internal edges around
    /// the pair are `b1`, `b2`, `b3`; `b2p` is the new middle edge.
    #[inline]
    pub fn b_symbol(&self, b1: Charge, aj: Charge, b2: Charge, aj1: Charge, b3: Charge, b2p: Charge) -> Complex64 {
        self.b[idx6(b1, aj, b2, aj1, b3, b2p)]
    }
}

#[allow(clippy::too_many_arguments)]
fn compose_b_symbol(
    f: &FSymbolTable,
    r: &RSymbolTable,
    b1: Charge,
    aj: Charge,
    b2: Charge,
    aj1: Charge,
    b3: Charge,
    b2p: Charge,
) -> Complex64 {
    Charge::ALL
        .iter()
        .map(|&c| f.get(aj1, aj, c, b3, b1, b2p) * r.get(aj, aj1, c) * f.get(b1, aj, b2, aj1, b3, c))
        .sum()
}

/// Free-function form of [`AnyonModel::f_symbol`] on the Fibonacci tables.
pub fn f_symbol(a: Charge, b: Charge, e: Charge, c: Charge, d: Charge, f: Charge) -> Complex64 {
    fibonacci().f_symbol(a, b, e, c, d, f)
}

pub fn r_symbol(a: Charge, b: Charge, c: Charge) -> Complex64 {
    fibonacci().r_symbol(a, b, c)
}

pub fn b_symbol(b1: Charge, aj: Charge, b2: Charge, aj1: Charge, b3: Charge, b2p: Charge) -> Complex64 {
    fibonacci().b_symbol(b1, aj, b2, aj1, b3, b2p)
}

/// Maximum residual of each algebraic identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConsistencyReport {
    pub pentagon: f64,
    pub hexagon_clockwise: f64,
    pub hexagon_counterclockwise: f64,
    pub f_unitarity: f64,
    pub b_unitarity: f64,
    pub b_inverse: f64,
    pub r_modulus: f64,
    pub s_unitarity: f64,
}

impl ConsistencyReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.pentagon,
            self.hexagon_clockwise,
            self.hexagon_counterclockwise,
            self.f_unitarity,
            self.b_unitarity,
            self.b_inverse,
            self.r_modulus,
            self.s_unitarity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_residual() < tolerance
    }
}

/// Consistency report of the Fibonacci tables.
pub fn check_consistency() -> ConsistencyReport {
    check_tables(&FSymbolTable::fibonacci(), &RSymbolTable::fibonacci())
}

/// Evaluates every identity exhaustively over all label assignments.
pub fn check_tables(f: &FSymbolTable, r: &RSymbolTable) -> ConsistencyReport {
    let model = AnyonModel::new(f.clone(), r.clone());
    let l = Charge::ALL;
    let fm = |a, b, c, d, e, g| f.get(a, b, e, c, d, g);

    // [F^{fcd}_e]_{gl} [F^{abl}_e]_{fk} = sum_h [F^{abc}_g]_{fh} [F^{ahd}_e]_{gk} [F^{bcd}_k]_{hl}
    let mut pentagon: f64 = 0.0;
    for a in l {
        for b in l {
            for c in l {
                for d in l {
                    for e in l {
                        for ff in l {
                            for g in l {
                                for k in l {
                                    for ll in l {
                                        let lhs = fm(ff, c, d, e, g, ll) * fm(a, b, ll, e, ff, k);
                                        let rhs: Complex64 = l
                                            .iter()
                                            .map(|&h| fm(a, b, c, g, ff, h) * fm(a, h, d, e, g, k) * fm(b, c, d, k, h, ll))
                                            .sum();
                                        pentagon = pentagon.max((lhs - rhs).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // R^{ca}_e [F^{acb}_d]_{eg} R^{cb}_g = sum_f [F^{cab}_d]_{ef} R^{cf}_d [F^{abc}_d]_{fg}
    // and the same with every R replaced by its inverse.
    let mut hex_cw: f64 = 0.0;
    let mut hex_ccw: f64 = 0.0;
    let inv = |z: Complex64| if z.norm() == 0.0 { z } else { z.inv() };
    for a in l {
        for b in l {
            for c in l {
                for d in l {
                    for e in l {
                        for g in l {
                            let lhs = r.get(c, a, e) * fm(a, c, b, d, e, g) * r.get(c, b, g);
                            let rhs: Complex64 = l
                                .iter()
                                .map(|&ff| fm(c, a, b, d, e, ff) * r.get(c, ff, d) * fm(a, b, c, d, ff, g))
                                .sum();
                            hex_cw = hex_cw.max((lhs - rhs).norm());

                            let lhs = inv(r.get(a, c, e)) * fm(a, c, b, d, e, g) * inv(r.get(b, c, g));
                            let rhs: Complex64 = l
                                .iter()
                                .map(|&ff| fm(c, a, b, d, e, ff) * inv(r.get(ff, c, d)) * fm(a, b, c, d, ff, g))
                                .sum();
                            hex_ccw = hex_ccw.max((lhs - rhs).norm());
                        }
                    }
                }
            }
        }
    }

    // Unitarity of each 2x2 block [F^{abc}_d]_{ef} and [B^{b1 aj . }_{aj1 b3 .}].
    let mut f_unitarity: f64 = 0.0;
    let mut b_unitarity: f64 = 0.0;
    let mut b_inverse: f64 = 0.0;
    for a in l {
        for b in l {
            for c in l {
                for d in l {
                    let rows: Vec<Charge> = l
                        .iter()
                        .copied()
                        .filter(|&e| admissible(a, b, e) && admissible(e, c, d))
                        .collect();
                    for &e in &rows {
                        for &e2 in &rows {
                            let s: Complex64 = l.iter().map(|&x| fm(a, b, c, d, e, x) * fm(a, b, c, d, e2, x).conj()).sum();
                            let target = if e == e2 { 1.0 } else { 0.0 };
                            f_unitarity = f_unitarity.max((s - target).norm());
                        }
                    }
                    // (b1, aj, aj1, b3) = (a, b, c, d)
                    let rows: Vec<Charge> = l
                        .iter()
                        .copied()
                        .filter(|&b2| admissible(a, b, b2) && admissible(b2, c, d))
                        .collect();
                    for &b2 in &rows {
                        for &b2x in &rows {
                            let target = if b2 == b2x { 1.0 } else { 0.0 };
                            let s: Complex64 = l
                                .iter()
                                .map(|&p| model.b_symbol(a, b, b2, c, d, p) * model.b_symbol(a, b, b2x, c, d, p).conj())
                                .sum();
                            b_unitarity = b_unitarity.max((s - target).norm());
                            // clockwise exchange followed by the counterclockwise one
                            let s: Complex64 = l
                                .iter()
                                .map(|&p| model.b_symbol(a, b, b2, c, d, p) * model.b_symbol(a, c, p, b, d, b2x).conj())
                                .sum();
                            b_inverse = b_inverse.max((s - target).norm());
                        }
                    }
                }
            }
        }
    }

    let mut r_modulus: f64 = 0.0;
    for a in l {
        for b in l {
            for c in l {
                let expected = if admissible(a, b, c) { 1.0 } else { 0.0 };
                r_modulus = r_modulus.max((r.get(a, b, c).norm() - expected).abs());
            }
        }
    }

    let s = s_matrix();
    let mut s_unitarity: f64 = 0.0;
    for i in l {
        for j in l {
            let v: Complex64 = l.iter().map(|&k| s.get(i, k) * s.get(j, k).conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            s_unitarity = s_unitarity.max((v - target).norm());
        }
    }

    ConsistencyReport {
        pentagon,
        hexagon_clockwise: hex_cw,
        hexagon_counterclockwise: hex_ccw,
        f_unitarity,
        b_unitarity,
        b_inverse,
        r_modulus,
        s_unitarity,
    }
}
