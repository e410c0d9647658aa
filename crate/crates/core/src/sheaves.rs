//! Higgs sheaves and flat sheaves given by local frames on an atlas, their
//! definitional checks, and p-curvature.

use std::sync::Arc;

use crate::atlas::{Atlas, Side};
use crate::error::{Error, Result};
use crate::report::{Report, Status};
use crate::ring::{Matrix, MatrixForm};

/// Chart-wise free sheaf data shared by both kinds: one matrix-valued
/// 1-form per chart and one transition per overlap, `s_beta = T s_alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalData {
    pub atlas: Arc<Atlas>,
    pub rank: usize,
    /// Per chart, components along `dt_1, ..., dt_n`.
    pub fields: Vec<MatrixForm>,
    /// Per overlap (in atlas order), a matrix over the overlap ring.
    pub transitions: Vec<Matrix>,
}

/// `theta = sum_i Theta_i dt_i` on each chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HiggsSheaf(pub LocalData);

/// `nabla = d + sum_i A_i dt_i` on each chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSheaf(pub LocalData);

/// `psi = sum_i Psi_i F*dt_i` on each chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCurvature {
    pub fields: Vec<MatrixForm>,
}

impl LocalData {
    pub fn new(atlas: Arc<Atlas>, rank: usize, fields: Vec<MatrixForm>, transitions: Vec<Matrix>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Sheaf("rank must be positive".into()));
        }
        if fields.len() != atlas.charts().len() {
            return Err(Error::Sheaf(format!(
                "{} charts but {} local fields",
                atlas.charts().len(),
                fields.len()
            )));
        }
        if transitions.len() != atlas.overlaps().len() {
            return Err(Error::Sheaf(format!(
                "{} overlaps but {} transitions",
                atlas.overlaps().len(),
                transitions.len()
            )));
        }
        for (chart, f) in atlas.charts().iter().zip(&fields) {
            if f.vars().as_ref() != chart.vars.as_ref() || f.dim() != chart.vars.len() || f.rank() != rank {
                return Err(Error::Sheaf(format!(
                    "field on `{}` must have {} components of size {rank} over its coordinates",
                    chart.name,
                    chart.vars.len()
                )));
            }
            if f.p() != atlas.p() {
                return Err(Error::Sheaf("field over a different prime".into()));
            }
        }
        for (o, t) in atlas.overlaps().iter().zip(&transitions) {
            let name = overlap_name(&atlas, o);
            if t.vars().as_ref() != o.vars.as_ref() || t.rows() != rank || t.cols() != rank || t.p() != atlas.p() {
                return Err(Error::Sheaf(format!("transition {name} must be {rank}x{rank} over the overlap ring")));
            }
            let det = t.det();
            if !det.is_unit() {
                return Err(Error::Sheaf(format!("transition {name} has non-unit determinant {det}")));
            }
        }
        Ok(Self {
            atlas,
            rank,
            fields,
            transitions,
        })
    }

    pub fn p(&self) -> u64 {
        self.atlas.p()
    }

    /// Transports the overlap's two local fields onto the overlap.
    fn restricted_pair(&self, k: usize, frobenius: bool) -> Result<(MatrixForm, MatrixForm)> {
        let o = &self.atlas.overlaps()[k];
        let mv = |side: Side| {
            let f = &self.fields[o.chart(side)];
            if frobenius {
                o.restrict_frobenius_form(side, f)
            } else {
                o.restrict_matrix_form(side, f)
            }
        };
        Ok((mv(Side::Alpha)?, mv(Side::Beta)?))
    }

    fn check_cocycles(&self, report: &mut Report) {
        let overlaps = self.atlas.overlaps();
        let mut found = false;
        for (i, a) in overlaps.iter().enumerate() {
            for (j, b) in overlaps.iter().enumerate() {
                if a.chart(Side::Beta) != b.chart(Side::Alpha) || i == j {
                    continue;
                }
                let Some(c) = overlaps.iter().position(|c| {
                    c.chart(Side::Alpha) == a.chart(Side::Alpha) && c.chart(Side::Beta) == b.chart(Side::Beta)
                }) else {
                    continue;
                };
                found = true;
                let name = format!(
                    "transition cocycle {}",
                    [a.chart(Side::Alpha), a.chart(Side::Beta), b.chart(Side::Beta)]
                        .map(|x| self.atlas.chart(x).name.clone())
                        .join("/")
                );
                // Triple overlaps would need a shared coordinate ring; all
                // three transitions must therefore live on the same ring.
                let (ta, tb, tc) = (&self.transitions[i], &self.transitions[j], &self.transitions[c]);
                if ta.vars() != tb.vars() || ta.vars() != tc.vars() {
                    report.skip(name, "overlaps use different coordinate rings");
                    continue;
                }
                let lhs = tb * ta;
                report.check(name, &lhs == tc, || format!("T_bc T_ab = {lhs}, T_ac = {tc}"));
            }
        }
        if !found {
            report.skip("transition cocycle", "no triple overlaps");
        }
    }
}

pub fn overlap_name(atlas: &Atlas, o: &crate::atlas::Overlap) -> String {
    format!(
        "{}->{}",
        atlas.chart(o.chart(Side::Alpha)).name,
        atlas.chart(o.chart(Side::Beta)).name
    )
}

/// Smallest `n` such that every product of `n` matrices drawn from the
/// (commuting) family vanishes; `None` if the family is not nilpotent.
pub fn nilpotency_exponent(family: &[Matrix]) -> Option<usize> {
    let rank = family.first().map_or(0, Matrix::rows);
    let mut level: Vec<(usize, Matrix)> = family
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(i, m)| (i, m.clone()))
        .collect();
    let mut n = 1;
    while !level.is_empty() {
        if n > rank {
            return None;
        }
        let mut next = Vec::new();
        for (last, m) in &level {
            for (j, f) in family.iter().enumerate().skip(*last) {
                let prod = f * m;
                if !prod.is_zero() {
                    next.push((j, prod));
                }
            }
        }
        level = next;
        n += 1;
    }
    Some(n)
}

/// A nonzero product of `n` matrices from the family, named by the indices used.
pub fn nonvanishing_product(family: &[Matrix], n: usize) -> Option<(Vec<usize>, Matrix)> {
    fn go(family: &[Matrix], n: usize, start: usize, idx: &mut Vec<usize>, acc: &Matrix) -> Option<(Vec<usize>, Matrix)> {
        if idx.len() == n {
            return (!acc.is_zero()).then(|| (idx.clone(), acc.clone()));
        }
        for j in start..family.len() {
            let prod = &family[j] * acc;
            if prod.is_zero() {
                continue;
            }
            idx.push(j);
            if let Some(found) = go(family, n, j, idx, &prod) {
                return Some(found);
            }
            idx.pop();
        }
        None
    }
    let first = family.first()?;
    let id = Matrix::identity(first.p(), first.vars(), first.rows());
    go(family, n, 0, &mut Vec::new(), &id)
}

fn check_commuting(report: &mut Report, label: &str, field: &MatrixForm) {
    let n = field.dim();
    let mut witness = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let c = field.component(i).commutator(field.component(j));
            if !c.is_zero() {
                witness = Some(format!("[{i},{j}] = {c}"));
                break 'outer;
            }
        }
    }
    match witness {
        None => report.pass(label),
        Some(w) => report.fail(label, w),
    }
}

fn check_exponent(report: &mut Report, label: &str, fields: &[MatrixForm], p: u64) -> Option<usize> {
    let mut worst = Some(1);
    for f in fields {
        let e = nilpotency_exponent(f.components());
        worst = match (worst, e) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    match worst {
        Some(e) if e as u64 <= p - 1 => report.note(label, Status::Pass, format!("exponent {e}")),
        Some(e) => report.fail(label, format!("exponent {e} exceeds p - 1 = {}", p - 1)),
        None => report.fail(label, "not nilpotent"),
    }
    worst
}

impl HiggsSheaf {
    pub fn new(atlas: Arc<Atlas>, rank: usize, fields: Vec<MatrixForm>, transitions: Vec<Matrix>) -> Result<Self> {
        LocalData::new(atlas, rank, fields, transitions).map(Self)
    }

    pub fn data(&self) -> &LocalData {
        &self.0
    }

    pub fn atlas(&self) -> &Arc<Atlas> {
        &self.0.atlas
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn field(&self, chart: usize) -> &MatrixForm {
        &self.0.fields[chart]
    }

    pub fn transition(&self, overlap: usize) -> &Matrix {
        &self.0.transitions[overlap]
    }

    pub fn is_zero(&self) -> bool {
        self.0.fields.iter().all(MatrixForm::is_zero)
    }

    /// Nilpotency exponent over all charts, `None` if some chart is not nilpotent.
    pub fn exponent(&self) -> Option<usize> {
        self.0
            .fields
            .iter()
            .map(|f| nilpotency_exponent(f.components()))
            .try_fold(1, |acc, e| e.map(|e| acc.max(e)))
    }

    /// `(E, -theta)`.
    pub fn negated(&self) -> Self {
        let mut d = self.0.clone();
        d.fields = d.fields.iter().map(MatrixForm::neg).collect();
        Self(d)
    }

    /// Same frames and transitions with another set of local fields.
    pub fn with_fields(&self, fields: Vec<MatrixForm>) -> Result<Self> {
        Self::new(self.0.atlas.clone(), self.0.rank, fields, self.0.transitions.clone())
    }

    /// Fails unless every check of [`check_higgs`] passes.
    pub fn validate(&self) -> Result<()> {
        first_failure(&check_higgs(self))
    }
}

impl FlatSheaf {
    pub fn new(atlas: Arc<Atlas>, rank: usize, fields: Vec<MatrixForm>, transitions: Vec<Matrix>) -> Result<Self> {
        LocalData::new(atlas, rank, fields, transitions).map(Self)
    }

    /// The trivial connection `d` on `O^r`.
    pub fn trivial(atlas: Arc<Atlas>, rank: usize) -> Result<Self> {
        let p = atlas.p();
        let fields = atlas
            .charts()
            .iter()
            .map(|c| MatrixForm::zero(p, &c.vars, rank))
            .collect();
        let transitions = atlas
            .overlaps()
            .iter()
            .map(|o| Matrix::identity(p, &o.vars, rank))
            .collect();
        Self::new(atlas, rank, fields, transitions)
    }

    pub fn data(&self) -> &LocalData {
        &self.0
    }

    pub fn atlas(&self) -> &Arc<Atlas> {
        &self.0.atlas
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    pub fn connection(&self, chart: usize) -> &MatrixForm {
        &self.0.fields[chart]
    }

    pub fn transition(&self, overlap: usize) -> &Matrix {
        &self.0.transitions[overlap]
    }

    pub fn validate(&self) -> Result<()> {
        first_failure(&check_flat(self))
    }
}

fn first_failure(report: &Report) -> Result<()> {
    match report.failures().next() {
        None => Ok(()),
        Some(e) => Err(Error::Sheaf(format!(
            "{}: {}",
            e.check,
            e.witness.as_deref().unwrap_or_default()
        ))),
    }
}

/// Curvature component `d_i A_j - d_j A_i + [A_i, A_j]`.
pub fn curvature(a: &MatrixForm, i: usize, j: usize) -> Matrix {
    let (ai, aj) = (a.component(i), a.component(j));
    &(&aj.derivative(i) - &ai.derivative(j)) + &ai.commutator(aj)
}

/// The gauge action `g A g^-1 - (dg) g^-1`, component-wise.
pub fn gauge_connection(a: &MatrixForm, g: &Matrix, g_inv: &Matrix) -> MatrixForm {
    let comps = (0..a.dim())
        .map(|i| &(&(g * a.component(i)) * g_inv) - &(&g.derivative(i) * g_inv))
        .collect();
    MatrixForm::new(comps)
}

pub fn check_higgs(e: &HiggsSheaf) -> Report {
    let d = &e.0;
    let mut report = Report::new("Higgs sheaf checks");
    for (chart, f) in d.atlas.charts().iter().zip(&d.fields) {
        check_commuting(&mut report, &format!("{}: integrability", chart.name), f);
    }
    check_exponent(&mut report, "nilpotency", &d.fields, d.p());
    d.check_cocycles(&mut report);
    for (k, o) in d.atlas.overlaps().iter().enumerate() {
        let name = format!("{}: Higgs field compatibility", overlap_name(&d.atlas, o));
        report.timed(name, || {
            let (a, b) = d.restricted_pair(k, false)?;
            let t = &d.transitions[k];
            let moved = a.conjugate(t, &t.inverse()?);
            let ok = moved == b;
            Ok::<_, Error>((ok, (!ok).then(|| format!("T theta_a T^-1 = {moved}, theta_b = {b}"))))
        });
    }
    report
}

pub fn check_flat(h: &FlatSheaf) -> Report {
    let d = &h.0;
    let mut report = Report::new("flat sheaf checks");
    for (chart, a) in d.atlas.charts().iter().zip(&d.fields) {
        let n = a.dim();
        let mut witness = None;
        'outer: for i in 0..n {
            for j in i + 1..n {
                let c = curvature(a, i, j);
                if !c.is_zero() {
                    witness = Some(format!("curvature ({i},{j}) = {c}"));
                    break 'outer;
                }
            }
        }
        let label = format!("{}: zero curvature", chart.name);
        match witness {
            None => report.pass(label),
            Some(w) => report.fail(label, w),
        }
    }
    d.check_cocycles(&mut report);
    for (k, o) in d.atlas.overlaps().iter().enumerate() {
        let name = format!("{}: connection gluing", overlap_name(&d.atlas, o));
        report.timed(name, || {
            let (a, b) = d.restricted_pair(k, false)?;
            let t = &d.transitions[k];
            let moved = gauge_connection(&a, t, &t.inverse()?);
            let ok = moved == b;
            Ok::<_, Error>((ok, (!ok).then(|| format!("T A_a T^-1 - dT T^-1 = {moved}, A_b = {b}"))))
        });
    }
    report
}

/// Applies `(d_i + A_i)^p` to the identity frame on every chart.
pub fn p_curvature(h: &FlatSheaf) -> Result<PCurvature> {
    let d = &h.0;
    let p = d.p();
    let mut fields = Vec::with_capacity(d.fields.len());
    for (chart, a) in d.atlas.charts().iter().zip(&d.fields) {
        let comps = (0..a.dim())
            .map(|i| {
                let ai = a.component(i);
                let mut m = Matrix::identity(p, &chart.vars, d.rank);
                for _ in 0..p {
                    m = &m.derivative(i) + &(ai * &m);
                }
                m
            })
            .collect();
        let psi = MatrixForm::new(comps);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let c = psi.component(i).commutator(psi.component(j));
                if !c.is_zero() {
                    return Err(Error::Internal(format!(
                        "p-curvature components {i},{j} on `{}` do not commute: {c}",
                        chart.name
                    )));
                }
                let hor = &psi.component(i).derivative(j) + &a.component(j).commutator(psi.component(i));
                if !hor.is_zero() {
                    return Err(Error::Internal(format!(
                        "p-curvature component {i} on `{}` is not horizontal along {j}: {hor}",
                        chart.name
                    )));
                }
            }
        }
        fields.push(psi);
    }
    Ok(PCurvature { fields })
}

impl PCurvature {
    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(MatrixForm::is_zero)
    }

    pub fn exponent(&self) -> Option<usize> {
        self.fields
            .iter()
            .map(|f| nilpotency_exponent(f.components()))
            .try_fold(1, |acc, e| e.map(|e| acc.max(e)))
    }
}

/// True iff every product of `n` components of `psi` vanishes on every chart.
pub fn check_nilpotent_psi(psi: &PCurvature, n: usize) -> bool {
    psi.fields
        .iter()
        .all(|f| nonvanishing_product(f.components(), n).is_none())
}

/// Checks that `psi` glues: on each overlap `T Psi_a T^-1 = Psi_b` with
/// both sides moved to the overlap in the `F*du` basis.
pub fn check_psi_gluing(h: &FlatSheaf, psi: &PCurvature) -> Report {
    let d = &h.0;
    let mut report = Report::new("p-curvature gluing");
    let moved = LocalData {
        fields: psi.fields.clone(),
        ..d.clone()
    };
    for (k, o) in d.atlas.overlaps().iter().enumerate() {
        report.timed(format!("{}: p-curvature gluing", overlap_name(&d.atlas, o)), || {
            let (a, b) = moved.restricted_pair(k, true)?;
            let t = &d.transitions[k];
            let conj = a.conjugate(t, &t.inverse()?);
            let ok = conj == b;
            Ok::<_, Error>((ok, (!ok).then(|| format!("{conj} vs {b}"))))
        });
    }
    report
}
