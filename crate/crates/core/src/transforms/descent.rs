//! Flat frames of connections with vanishing p-curvature and the descended
//! module they define.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space::{box_monomials, layers, poly_from};
use crate::atlas::Side;
use crate::error::{Error, Result};
use crate::ring::linalg::LinearSystem;
use crate::ring::{LaurentPoly, Matrix, MatrixForm, Monomial, VarSpec};
use crate::sheaves::{overlap_name, p_curvature, FlatSheaf, LocalData};

/// Flat frames and the descended transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentResult {
    pub rank: usize,
    /// Per chart, a unimodular matrix whose columns are flat sections.
    pub frames: Vec<Matrix>,
    /// Per overlap, `S_b^-1 T S_a` before dividing exponents by `p`.
    pub raw_transitions: Vec<Matrix>,
    /// Per overlap, the descended transition.
    pub transitions: Vec<Matrix>,
    /// The degree bound at which every frame was found.
    pub bound: u32,
}

/// Maximum entry degree of the data plus `p * rank`.
pub fn default_degree_bound(data: &LocalData) -> u32 {
    let deg = data
        .fields
        .iter()
        .map(MatrixForm::max_abs_degree)
        .chain(data.transitions.iter().map(Matrix::max_abs_degree))
        .max()
        .unwrap_or(0);
    (deg + data.p() * data.rank as u64) as u32
}

/// Solves `nabla s = 0` chart by chart and descends the transitions.
pub fn flat_sections(h: &FlatSheaf, degree_bound: Option<u32>) -> Result<DescentResult> {
    let d = h.data();
    let p = d.p();
    if !p_curvature(h)?.is_zero() {
        return Err(Error::Precondition("flat sections need vanishing p-curvature".into()));
    }
    let max = degree_bound.unwrap_or_else(|| default_degree_bound(d)).max(1);
    let mut frames = Vec::with_capacity(d.fields.len());
    let mut used = 0;
    for (chart, a) in d.atlas.charts().iter().zip(&d.fields) {
        let mut found = None;
        let mut tries = layers(p, max, false);
        tries.push(max + p as u32);
        for b in tries {
            if let Some(s) = chart_frame(a, &chart.vars, d.rank, b)? {
                found = Some((s, b));
                break;
            }
        }
        let (s, b) = found.ok_or(Error::DegreeBoundExceeded(max as usize + p as usize))?;
        verify_frame(a, &s).map_err(|e| Error::Internal(format!("frame on `{}`: {e}", chart.name)))?;
        used = used.max(b);
        frames.push(s);
    }
    let mut raw_transitions = Vec::new();
    let mut transitions = Vec::new();
    for (k, o) in d.atlas.overlaps().iter().enumerate() {
        let sa = o.restrict_matrix(Side::Alpha, &frames[o.chart(Side::Alpha)])?;
        let sb = o.restrict_matrix(Side::Beta, &frames[o.chart(Side::Beta)])?;
        let raw = &(&sb.inverse()? * &d.transitions[k]) * &sa;
        let relabeled = raw.frobenius_root().map_err(|e| {
            Error::Internal(format!("descended transition {} is not a p-th power: {e}", overlap_name(&d.atlas, o)))
        })?;
        raw_transitions.push(raw);
        transitions.push(relabeled);
    }
    Ok(DescentResult {
        rank: d.rank,
        frames,
        raw_transitions,
        transitions,
        bound: used,
    })
}

/// Checks `d_i S + A_i S = 0` for all `i` and that `det S` is a unit.
pub fn verify_frame(a: &MatrixForm, s: &Matrix) -> Result<()> {
    for i in 0..a.dim() {
        let r = &s.derivative(i) + &(a.component(i) * s);
        if !r.is_zero() {
            return Err(Error::Internal(format!("nabla_{i} S = {r}")));
        }
    }
    let det = s.det();
    if !det.is_unit() {
        return Err(Error::Internal(format!("det S = {det} is not a unit")));
    }
    Ok(())
}

struct Candidate {
    free_comp: usize,
    degree: u64,
    column: Vec<LaurentPoly>,
}

/// A unimodular flat frame with entries in the degree box, if one exists
/// among the solutions the search visits.
pub fn chart_frame(a: &MatrixForm, vars: &std::sync::Arc<VarSpec>, rank: usize, bound: u32) -> Result<Option<Matrix>> {
    let p = a.p();
    let monos = box_monomials(vars, bound);
    let ncols = monos.len() * rank;
    let mut sys: LinearSystem<(usize, usize, Monomial)> = LinearSystem::new(p, ncols);
    for (mi, m) in monos.iter().enumerate() {
        for c in 0..rank {
            let col = mi * rank + c;
            for i in 0..a.dim() {
                let e = m.exponents()[i];
                if e.rem_euclid(p as i32) != 0 {
                    let mut ex = m.exponents().to_vec();
                    ex[i] -= 1;
                    sys.add(col, (i, c, Monomial::from_exponents(&ex)), e.rem_euclid(p as i32) as u64);
                }
                let ai = a.component(i);
                for row in 0..rank {
                    for (am, k) in ai.get(row, c).terms() {
                        sys.add(col, (i, row, am.mul(m)), k);
                    }
                }
            }
        }
    }
    let mut cands: Vec<Candidate> = Vec::new();
    for kv in sys.kernel() {
        let column: Vec<LaurentPoly> = (0..rank)
            .map(|c| {
                poly_from(
                    p,
                    vars,
                    kv.entries
                        .iter()
                        .filter(|(col, _)| col % rank == c)
                        .map(|&(col, v)| (monos[col / rank].clone(), v)),
                )
            })
            .collect();
        let column = normalize_column(p, vars, column)?;
        if cands.iter().any(|x| x.column == column) {
            continue;
        }
        let degree = column.iter().map(LaurentPoly::max_abs_degree).max().unwrap_or(0);
        cands.push(Candidate {
            free_comp: kv.free_col % rank,
            degree,
            column,
        });
    }
    if cands.len() < rank {
        return Ok(None);
    }
    cands.sort_by_key(|c| (c.degree, c.free_comp));
    let build = |chosen: &[&Candidate]| {
        let mut chosen = chosen.to_vec();
        chosen.sort_by_key(|c| (c.free_comp, c.degree));
        Matrix::from_fn(p, vars, rank, rank, |i, j| chosen[j].column[i].clone())
    };
    let head = cands.len().min(12);
    let mut idx: Vec<usize> = (0..rank).collect();
    loop {
        let chosen: Vec<&Candidate> = idx.iter().map(|&i| &cands[i]).collect();
        let s = build(&chosen);
        if s.det().is_unit() {
            return Ok(Some(s));
        }
        if !next_combination(&mut idx, head) {
            break;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..256 {
        let mut cols = Vec::with_capacity(rank);
        for _ in 0..rank {
            let mut col = vec![LaurentPoly::zero(p, vars); rank];
            for c in &cands {
                let k = rng.gen_range(0..p);
                if k != 0 {
                    for (slot, e) in col.iter_mut().zip(&c.column) {
                        *slot = &*slot + &e.scale(k);
                    }
                }
            }
            cols.push(col);
        }
        let s = Matrix::from_fn(p, vars, rank, rank, |i, j| cols[j][i].clone());
        if s.det().is_unit() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Multiplies by powers `t^(kp)` of inverted variables so that the lowest
/// exponent of each lies in `[0, p)`.
fn normalize_column(p: u64, vars: &std::sync::Arc<VarSpec>, column: Vec<LaurentPoly>) -> Result<Vec<LaurentPoly>> {
    let mut shift = vec![0i32; vars.len()];
    for (j, s) in shift.iter_mut().enumerate() {
        if !vars.is_inverted(j) {
            continue;
        }
        let min = column
            .iter()
            .flat_map(|f| f.terms().map(|(m, _)| m.exponents()[j]))
            .min();
        if let Some(min) = min {
            *s = -(p as i32) * min.div_euclid(p as i32);
        }
    }
    if shift.iter().all(|&s| s == 0) {
        return Ok(column);
    }
    let unit = LaurentPoly::monomial(p, vars, 1, &shift)?;
    Ok(column.iter().map(|f| f * &unit).collect())
}

pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
