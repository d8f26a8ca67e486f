//! Exact resonance detection and per-grid triple enumeration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::spectral::{TorusGrid, Wavevector};

fn check_sign(s: i8) -> Result<()> {
    if s != 1 && s != -1 {
        return Err(Error::InvalidArgument(format!(
            "branch sign must be +1 or -1, got {s}"
        )));
    }
    Ok(())
}

/// Sign of `σ_m√a + σ_l√b` for nonnegative `a`, `b`.
fn lhs_sign(a: i128, b: i128, sm: i128, sl: i128) -> i128 {
    if a == 0 && b == 0 {
        0
    } else if sm == sl {
        sm
    } else if a > b {
        sm
    } else if b > a {
        sl
    } else {
        0
    }
}

/// Decides `σ_m√a + σ_l√b = σ_k√c` exactly for squared norms `a`, `b`, `c`.
pub fn is_resonant(a: i64, b: i64, c: i64, signs: [i8; 3]) -> Result<bool> {
    if a < 0 || b < 0 || c < 0 {
        return Err(Error::InvalidArgument(format!(
            "squared norms must be nonnegative: {a}, {b}, {c}"
        )));
    }
    for s in signs {
        check_sign(s)?;
    }
    let (a, b, c) = (a as i128, b as i128, c as i128);
    let [sm, sl, sk] = signs.map(|s| s as i128);
    let d = c - a - b;
    // (σ_m√a + σ_l√b)² = c  ⇔  2σ_mσ_l√(ab) = c − a − b
    if d * d != 4 * a * b || sm * sl * d < 0 {
        return Ok(false);
    }
    if c == 0 {
        return Ok(lhs_sign(a, b, sm, sl) == 0);
    }
    Ok(lhs_sign(a, b, sm, sl) == sk)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResonantTriple {
    pub k: Wavevector,
    pub m: Wavevector,
    pub l: Wavevector,
    pub sigma_m: i8,
    pub sigma_l: i8,
    pub sigma_k: i8,
}

/// Interaction of a slow mode `m` with an acoustic mode `l` of equal length to `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearEntry {
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub kvec: Wavevector,
    /// `k·l / |k|²`.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearEntry {
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub sigma_m: i8,
    pub sigma_l: i8,
    pub sigma_k: i8,
    /// `σ_mσ_l (k·m)(k·l) / (|k||m||l|)`.
    pub transport: f64,
    /// `|k|`.
    pub knorm: f64,
}

/// All in-band interactions retained by the time averages on one grid.
#[derive(Debug, Clone)]
pub struct ResonantSet {
    grid: TorusGrid,
    pub linear: Vec<LinearEntry>,
    pub bilinear: Vec<BilinearEntry>,
    pub triples: Vec<ResonantTriple>,
}

fn dot(a: Wavevector, b: Wavevector) -> i64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: Wavevector, b: Wavevector) -> Wavevector {
    [a[0] - b[0], a[1] - b[1]]
}

impl ResonantSet {
    pub fn build(grid: TorusGrid) -> Self {
        let mut band: Vec<(Wavevector, usize)> = (0..grid.len())
            .map(|i| (grid.wavevector(i), i))
            .filter(|(k, _)| grid.in_band(*k))
            .collect();
        band.sort();
        let mut linear = Vec::new();
        let mut triples = Vec::new();
        for &(k, ki) in &band {
            let k2 = TorusGrid::norm_sq(k);
            if k2 == 0 {
                continue;
            }
            for &(m, mi) in &band {
                let l = sub(k, m);
                if !grid.in_band(l) {
                    continue;
                }
                let li = grid.index_of(l).expect("in-band mode lies on the lattice");
                let l2 = TorusGrid::norm_sq(l);
                if l2 == 0 {
                    continue;
                }
                if l2 == k2 {
                    linear.push(LinearEntry {
                        k: ki,
                        m: mi,
                        l: li,
                        kvec: k,
                        weight: dot(k, l) as f64 / k2 as f64,
                    });
                }
                let m2 = TorusGrid::norm_sq(m);
                if m2 == 0 {
                    continue;
                }
                for sigma_m in [1i8, -1] {
                    for sigma_l in [1i8, -1] {
                        for sigma_k in [1i8, -1] {
                            if is_resonant(m2, l2, k2, [sigma_m, sigma_l, sigma_k])
                                .expect("valid input")
                            {
                                triples.push(ResonantTriple {
                                    k,
                                    m,
                                    l,
                                    sigma_m,
                                    sigma_l,
                                    sigma_k,
                                });
                            }
                        }
                    }
                }
            }
        }
        triples.sort();
        let bilinear = triples
            .iter()
            .map(|t| {
                let (k2, m2, l2) = (
                    TorusGrid::norm_sq(t.k),
                    TorusGrid::norm_sq(t.m),
                    TorusGrid::norm_sq(t.l),
                );
                let denom = ((k2 * m2 * l2) as f64).sqrt();
                BilinearEntry {
                    k: grid.index_of(t.k).expect("lattice"),
                    m: grid.index_of(t.m).expect("lattice"),
                    l: grid.index_of(t.l).expect("lattice"),
                    sigma_m: t.sigma_m,
                    sigma_l: t.sigma_l,
                    sigma_k: t.sigma_k,
                    transport: (t.sigma_m * t.sigma_l) as f64
                        * (dot(t.k, t.m) * dot(t.k, t.l)) as f64
                        / denom,
                    knorm: (k2 as f64).sqrt(),
                }
            })
            .collect();
        Self {
            grid,
            linear,
            bilinear,
            triples,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Triples with output mode `k`.
    pub fn triples_at(&self, k: Wavevector) -> impl Iterator<Item = &ResonantTriple> {
        self.triples.iter().filter(move |t| t.k == k)
    }

    /// Audit dump, lexicographic by `k` then `m`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k0,k1,m0,m1,l0,l1,sigma_m,sigma_l,sigma_k\n");
        for t in &self.triples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                t.k[0], t.k[1], t.m[0], t.m[1], t.l[0], t.l[1], t.sigma_m, t.sigma_l, t.sigma_k
            );
        }
        out
    }
}

/// Shared, lazily built resonant set of `grid`.
pub fn resonant_set(grid: &TorusGrid) -> Arc<ResonantSet> {
    static CACHE: OnceLock<Mutex<HashMap<TorusGrid, Arc<ResonantSet>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("resonance cache poisoned").get(grid) {
        return s.clone();
    }
    let built = Arc::new(ResonantSet::build(*grid));
    cache
        .lock()
        .expect("resonance cache poisoned")
        .entry(*grid)
        .or_insert(built)
        .clone()
}
