//! Searching for chart-wise gauge isomorphisms, and the round-trip and
//! lift-independence comparisons built on it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cartier::cartier_traced;
use super::descent::default_degree_bound;
use super::inverse::{inverse_cartier_with, LiftChoice};
use super::space::{box_monomials, layers, poly_from};
use crate::atlas::{Atlas, Side};
use crate::error::{Error, Result};
use crate::report::{Report, Status};
use crate::ring::linalg::{KernelVector, LinearSystem};
use crate::ring::{LaurentPoly, Matrix, Monomial};
use crate::sheaves::{check_flat, gauge_connection, p_curvature, FlatSheaf, HiggsSheaf, LocalData};

/// Chart-wise frame changes `g_a` with unit determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeWitness {
    pub matrices: Vec<Matrix>,
    pub bound: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Higgs,
    Flat,
}

/// Combinations tried exhaustively up to this many, sampled beyond.
const EXHAUSTIVE_LIMIT: u64 = 1 << 14;
const SAMPLES: usize = 2048;
const SEED: u64 = 0x9a_06e;

/// Finds `g` with `g theta1 = theta2 g` chart-wise and `g_b T1 = T2 g_a`
/// on overlaps.
pub fn gauge_compare(e1: &HiggsSheaf, e2: &HiggsSheaf, degree_bound: Option<u32>) -> Result<GaugeWitness> {
    compatible(e1.data(), e2.data())?;
    let bound = degree_bound.unwrap_or_else(|| default_degree_bound(e1.data()).max(default_degree_bound(e2.data())));
    if e1.exponent() != e2.exponent() {
        return Err(Error::GaugeNotFound(bound as usize));
    }
    search(e1.data(), e2.data(), Kind::Higgs, bound)
}

/// Finds `g` with `dg = g A1 - A2 g` chart-wise and `g_b T1 = T2 g_a`.
pub fn gauge_compare_flat(h1: &FlatSheaf, h2: &FlatSheaf, degree_bound: Option<u32>) -> Result<GaugeWitness> {
    compatible(h1.data(), h2.data())?;
    let bound = degree_bound.unwrap_or_else(|| default_degree_bound(h1.data()).max(default_degree_bound(h2.data())));
    if p_curvature(h1)?.exponent() != p_curvature(h2)?.exponent() {
        return Err(Error::GaugeNotFound(bound as usize));
    }
    search(h1.data(), h2.data(), Kind::Flat, bound)
}

pub fn verify_higgs_witness(e1: &HiggsSheaf, e2: &HiggsSheaf, w: &GaugeWitness) -> Result<()> {
    verify(e1.data(), e2.data(), Kind::Higgs, &w.matrices)
}

pub fn verify_flat_witness(h1: &FlatSheaf, h2: &FlatSheaf, w: &GaugeWitness) -> Result<()> {
    verify(h1.data(), h2.data(), Kind::Flat, &w.matrices)
}

fn compatible(a: &LocalData, b: &LocalData) -> Result<()> {
    if a.rank != b.rank {
        return Err(Error::Precondition(format!("ranks {} and {} differ", a.rank, b.rank)));
    }
    if a.atlas.charts() != b.atlas.charts() || a.atlas.overlaps() != b.atlas.overlaps() {
        return Err(Error::Precondition("sheaves live on different atlases".into()));
    }
    Ok(())
}

fn verify(a: &LocalData, b: &LocalData, kind: Kind, g: &[Matrix]) -> Result<()> {
    for (c, chart) in a.atlas.charts().iter().enumerate() {
        let det = g[c].det();
        if !det.is_unit() {
            return Err(Error::Internal(format!("witness on `{}` has det {det}", chart.name)));
        }
        let ok = match kind {
            Kind::Higgs => (0..a.fields[c].dim())
                .all(|i| &g[c] * a.fields[c].component(i) == b.fields[c].component(i) * &g[c]),
            Kind::Flat => gauge_connection(&a.fields[c], &g[c], &g[c].inverse()?) == b.fields[c],
        };
        if !ok {
            return Err(Error::Internal(format!("witness does not intertwine on `{}`", chart.name)));
        }
    }
    for (k, o) in a.atlas.overlaps().iter().enumerate() {
        let ga = o.restrict_matrix(Side::Alpha, &g[o.chart(Side::Alpha)])?;
        let gb = o.restrict_matrix(Side::Beta, &g[o.chart(Side::Beta)])?;
        if &gb * &a.transitions[k] != &b.transitions[k] * &ga {
            return Err(Error::Internal(format!(
                "witness does not intertwine transitions on {}",
                crate::sheaves::overlap_name(&a.atlas, o)
            )));
        }
    }
    Ok(())
}

type RowKey = (usize, usize, usize, Monomial);

struct Layout {
    rank: usize,
    monos: Vec<Vec<Monomial>>,
    offsets: Vec<usize>,
    ncols: usize,
}

impl Layout {
    fn new(atlas: &Atlas, rank: usize, bound: u32) -> Self {
        let monos: Vec<Vec<Monomial>> = atlas.charts().iter().map(|c| box_monomials(&c.vars, bound)).collect();
        let mut offsets = Vec::new();
        let mut ncols = 0;
        for m in &monos {
            offsets.push(ncols);
            ncols += m.len() * rank * rank;
        }
        Self {
            rank,
            monos,
            offsets,
            ncols,
        }
    }

    fn col(&self, chart: usize, mono: usize, a: usize, b: usize) -> usize {
        self.offsets[chart] + (mono * self.rank + a) * self.rank + b
    }

    fn matrices(&self, atlas: &Atlas, coeffs: &[(usize, u64)]) -> Vec<Matrix> {
        let r = self.rank;
        let p = atlas.p();
        atlas
            .charts()
            .iter()
            .enumerate()
            .map(|(c, chart)| {
                let lo = self.offsets[c];
                let hi = lo + self.monos[c].len() * r * r;
                let mut cells: Vec<Vec<(Monomial, u64)>> = vec![Vec::new(); r * r];
                for &(col, v) in coeffs.iter().filter(|(col, _)| (lo..hi).contains(col)) {
                    let local = col - lo;
                    let (mono, cell) = (local / (r * r), local % (r * r));
                    cells[cell].push((self.monos[c][mono].clone(), v));
                }
                Matrix::from_fn(p, &chart.vars, r, r, |a, b| {
                    poly_from(p, &chart.vars, std::mem::take(&mut cells[a * r + b]))
                })
            })
            .collect()
    }
}

fn build_system(a: &LocalData, b: &LocalData, kind: Kind, layout: &Layout) -> Result<LinearSystem<RowKey>> {
    let p = a.p();
    let r = a.rank;
    let atlas = &a.atlas;
    let mut sys = LinearSystem::new(p, layout.ncols);
    let mut tag = 0;
    for c in 0..atlas.charts().len() {
        let (f1, f2) = (&a.fields[c], &b.fields[c]);
        for l in 0..f1.dim() {
            let (m1, m2) = (f1.component(l), f2.component(l));
            for (mi, m) in layout.monos[c].iter().enumerate() {
                for x in 0..r {
                    for y in 0..r {
                        let col = layout.col(c, mi, x, y);
                        // g[x][y] m contributes (g M1)[x][j] += m M1[y][j], (M2 g)[i][y] += M2[i][x] m.
                        for j in 0..r {
                            for (t, k) in m1.get(y, j).terms() {
                                let k = if kind == Kind::Flat { p - k } else { k };
                                sys.add(col, (tag, x, j, t.mul(m)), k);
                            }
                        }
                        for i in 0..r {
                            for (t, k) in m2.get(i, x).terms() {
                                let k = if kind == Kind::Flat { k } else { p - k };
                                sys.add(col, (tag, i, y, t.mul(m)), k);
                            }
                        }
                        if kind == Kind::Flat {
                            let e = m.exponents()[l].rem_euclid(p as i32);
                            if e != 0 {
                                let mut ex = m.exponents().to_vec();
                                ex[l] -= 1;
                                sys.add(col, (tag, x, y, Monomial::from_exponents(&ex)), e as u64);
                            }
                        }
                    }
                }
            }
            tag += 1;
        }
    }
    for (k, o) in atlas.overlaps().iter().enumerate() {
        let (t1, t2) = (&a.transitions[k], &b.transitions[k]);
        for side in [Side::Alpha, Side::Beta] {
            let c = o.chart(side);
            for (mi, m) in layout.monos[c].iter().enumerate() {
                let mono = LaurentPoly::monomial(p, &atlas.chart(c).vars, 1, m.exponents())?;
                let rm = o.restrict_fn(side, &mono)?;
                for x in 0..r {
                    for y in 0..r {
                        let col = layout.col(c, mi, x, y);
                        match side {
                            // g_b T1: (x, j) += rm T1[y][j]
                            Side::Beta => {
                                for j in 0..r {
                                    for (t, v) in (&rm * t1.get(y, j)).terms() {
                                        sys.add(col, (tag, x, j, t.clone()), v);
                                    }
                                }
                            }
                            // -T2 g_a: (i, y) -= T2[i][x] rm
                            Side::Alpha => {
                                for i in 0..r {
                                    for (t, v) in (t2.get(i, x) * &rm).terms() {
                                        sys.add(col, (tag, i, y, t.clone()), p - v);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        tag += 1;
    }
    Ok(sys)
}

fn search(a: &LocalData, b: &LocalData, kind: Kind, max: u32) -> Result<GaugeWitness> {
    let p = a.p();
    for bound in layers(p, max, true) {
        let layout = Layout::new(&a.atlas, a.rank, bound);
        let kernel = build_system(a, b, kind, &layout)?.kernel();
        if kernel.is_empty() {
            continue;
        }
        if let Some(g) = find_unit(a, b, kind, &layout, &kernel) {
            return Ok(GaugeWitness {
                matrices: normalize_scalar(g),
                bound,
            });
        }
    }
    Err(Error::GaugeNotFound(max as usize))
}

/// Scales the witness so the first nonzero entry of the first chart has
/// leading coefficient 1.
fn normalize_scalar(g: Vec<Matrix>) -> Vec<Matrix> {
    let Some((_, _, lead)) = g[0].first_nonzero() else {
        return g;
    };
    let (_, c) = lead.terms().next_back().expect("nonzero entry");
    let p = g[0].p();
    let inv = crate::ring::mod_inv(c, p).expect("nonzero residue");
    g.iter().map(|m| m.scale(inv)).collect()
}

fn find_unit(a: &LocalData, b: &LocalData, kind: Kind, layout: &Layout, kernel: &[KernelVector]) -> Option<Vec<Matrix>> {
    let p = a.p();
    let atlas = &a.atlas;
    let accept = |coeffs: &[(usize, u64)]| -> Option<Vec<Matrix>> {
        let g = layout.matrices(atlas, coeffs);
        if g.iter().all(|m| m.det().is_unit()) && verify(a, b, kind, &g).is_ok() {
            Some(g)
        } else {
            None
        }
    };
    for kv in kernel {
        if let Some(g) = accept(&kv.entries) {
            return Some(g);
        }
    }
    let combine = |weights: &[u64]| -> Vec<(usize, u64)> {
        let mut acc = std::collections::BTreeMap::<usize, u64>::new();
        for (kv, &w) in kernel.iter().zip(weights) {
            if w == 0 {
                continue;
            }
            for &(c, v) in &kv.entries {
                let e = acc.entry(c).or_insert(0);
                *e = (*e + v * w) % p;
            }
        }
        acc.into_iter().filter(|&(_, v)| v % p != 0).map(|(c, v)| (c, v % p)).collect()
    };
    let m = kernel.len() as u32;
    let total = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    if total <= EXHAUSTIVE_LIMIT as u128 {
        let mut w = vec![0u64; kernel.len()];
        loop {
            let mut i = 0;
            while i < w.len() {
                w[i] += 1;
                if w[i] < p {
                    break;
                }
                w[i] = 0;
                i += 1;
            }
            if i == w.len() {
                return None;
            }
            if let Some(g) = accept(&combine(&w)) {
                return Some(g);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..SAMPLES {
        let w: Vec<u64> = (0..kernel.len()).map(|_| rng.gen_range(0..p)).collect();
        if let Some(g) = accept(&combine(&w)) {
            return Some(g);
        }
    }
    None
}

/// Sign relating the p-curvature of the inverse transform to `F*theta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Epsilon {
    Plus,
    Minus,
    /// `theta = 0`, so every sign fits.
    Undetermined,
    /// Neither sign fits.
    Neither,
}

impl Epsilon {
    pub fn as_i64(self) -> Option<i64> {
        match self {
            Epsilon::Plus => Some(1),
            Epsilon::Minus => Some(-1),
            _ => None,
        }
    }
}

/// Compares `psi` with `F*theta` component by component on every chart.
pub fn measure_epsilon(e: &HiggsSheaf, psi: &crate::sheaves::PCurvature) -> Epsilon {
    if e.is_zero() {
        return if psi.is_zero() { Epsilon::Undetermined } else { Epsilon::Neither };
    }
    let f_theta: Vec<_> = e.data().fields.iter().map(|f| f.frobenius()).collect();
    if psi.fields == f_theta {
        Epsilon::Plus
    } else if psi.fields.iter().zip(&f_theta).all(|(a, b)| *a == b.neg()) {
        Epsilon::Minus
    } else {
        Epsilon::Neither
    }
}

/// Output of a round trip through both transforms.
#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub flat: FlatSheaf,
    pub result: HiggsSheaf,
    pub exact: bool,
    pub report: Report,
}

/// `cartier(inverse_cartier(E))` compared against `(E, -theta)`.
pub fn roundtrip(e: &HiggsSheaf, atlas: &Arc<Atlas>, degree_bound: Option<u32>) -> Result<RoundTrip> {
    let mut report = Report::new("round trip");
    let flat = inverse_cartier_with(e, atlas, &LiftChoice::first())?;
    let checks = check_flat(&flat);
    report.absorb("inverse transform", checks);
    let trace = cartier_traced(&flat, atlas, &LiftChoice::first(), degree_bound)?;
    report.absorb("Cartier transform", trace.report.clone());
    let target = e.negated();
    let result = trace.higgs;
    let exact = result == target;
    if exact {
        report.pass("equals (E, -theta) exactly");
    } else if atlas.charts().len() == 1 {
        report.fail("equals (E, -theta) exactly", format!("got {:?}", result.data().fields));
    } else {
        report.note("equals (E, -theta) exactly", Status::Skip, "differs by a frame change; comparing up to gauge");
    }
    if !exact || atlas.charts().len() > 1 {
        report.timed("gauge-isomorphic to (E, -theta)", || {
            let w = gauge_compare(&result, &target, degree_bound)?;
            verify_higgs_witness(&result, &target, &w)?;
            Ok::<_, Error>((true, Some(witness_text(&w))))
        });
    }
    report.check("rank preserved", result.rank() == e.rank(), || format!("{} vs {}", result.rank(), e.rank()));
    report.check("nilpotency exponent preserved", result.exponent() == e.exponent(), || {
        format!("{:?} vs {:?}", result.exponent(), e.exponent())
    });
    Ok(RoundTrip {
        flat,
        result,
        exact,
        report,
    })
}

pub fn roundtrip_check(e: &HiggsSheaf, atlas: &Arc<Atlas>) -> Report {
    match roundtrip(e, atlas, None) {
        Ok(rt) => rt.report,
        Err(err) => {
            let mut r = Report::new("round trip");
            r.fail("pipeline", err.to_string());
            r
        }
    }
}

/// Inverse transforms under two lift choices are gauge-isomorphic.
pub fn lift_independence(
    e: &HiggsSheaf,
    atlas: &Arc<Atlas>,
    first: &LiftChoice,
    second: &LiftChoice,
    degree_bound: Option<u32>,
) -> Report {
    let mut report = Report::new("lift independence");
    report.timed(format!("lifts {:?} and {:?} give gauge-isomorphic connections", first.0, second.0), || {
        let a = inverse_cartier_with(e, atlas, first)?;
        let b = inverse_cartier_with(e, atlas, second)?;
        let w = gauge_compare_flat(&a, &b, degree_bound)?;
        verify_flat_witness(&a, &b, &w)?;
        Ok::<_, Error>((true, Some(witness_text(&w))))
    });
    report
}

pub fn witness_text(w: &GaugeWitness) -> String {
    let parts: Vec<String> = w.matrices.iter().map(|m| m.to_string()).collect();
    format!("g = {} (bound {})", parts.join(", "), w.bound)
}
