//! The Cartier transform: kill the p-curvature by a divided-Frobenius
//! correction, descend along flat sections and read off the Higgs field.

use std::sync::Arc;

use super::descent::{flat_sections, DescentResult};
use super::inverse::{same_geometry, twist, LiftChoice};
use crate::atlas::{self, Atlas, Side};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::ring::{Matrix, MatrixForm};
use crate::sheaves::{check_psi_gluing, p_curvature, FlatSheaf, HiggsSheaf, PCurvature};

/// Everything computed along the way, for inspection and reporting.
#[derive(Clone, Debug)]
pub struct CartierTrace {
    pub psi: PCurvature,
    /// `nabla' = nabla + zeta(psi)` with the twisted transitions `J T`.
    pub primed: FlatSheaf,
    /// Per overlap, `J = exp(h(psi))`.
    pub twists: Vec<Matrix>,
    pub descent: DescentResult,
    pub higgs: HiggsSheaf,
    pub report: Report,
}

pub fn cartier(h: &FlatSheaf, atlas: &Arc<Atlas>) -> Result<HiggsSheaf> {
    cartier_traced(h, atlas, &LiftChoice::first(), None).map(|t| t.higgs)
}

pub fn cartier_traced(
    h: &FlatSheaf,
    atlas: &Arc<Atlas>,
    choice: &LiftChoice,
    degree_bound: Option<u32>,
) -> Result<CartierTrace> {
    same_geometry(h.atlas(), atlas)?;
    h.validate()?;
    let p = atlas.p();
    let d = h.data();
    let mut report = Report::new("Cartier transform");
    let psi = p_curvature(h)?;
    match psi.exponent() {
        Some(n) if n as u64 <= p - 1 => report.pass(format!("p-curvature nilpotent of exponent {n}")),
        Some(n) => {
            return Err(Error::Precondition(format!(
                "p-curvature is nilpotent of exponent {n}, above p - 1 = {}",
                p - 1
            )))
        }
        None => return Err(Error::Precondition("p-curvature is not nilpotent".into())),
    }
    report.extend(check_psi_gluing(h, &psi));

    let mut fields = Vec::with_capacity(d.fields.len());
    for (c, a) in d.fields.iter().enumerate() {
        let lift = choice.pick(atlas, c)?;
        let zetas = (0..a.dim()).map(|j| lift.zeta(j)).collect::<Result<Vec<_>>>()?;
        fields.push(a.add(&atlas::zeta_of_field(&psi.fields[c], &zetas)));
    }
    let mut twists = Vec::new();
    let mut transitions = Vec::new();
    for (k, o) in atlas.overlaps().iter().enumerate() {
        let ga = atlas.lift_on_overlap(o, Side::Alpha, choice.pick(atlas, o.chart(Side::Alpha))?)?;
        let gb = atlas.lift_on_overlap(o, Side::Beta, choice.pick(atlas, o.chart(Side::Beta))?)?;
        let hv = atlas::h_vector(&ga, &gb)?;
        let psi_b = o.restrict_frobenius_form(Side::Beta, &psi.fields[o.chart(Side::Beta)])?;
        let j = twist(&psi_b, &hv, atlas.ctx())?;
        let commutes = psi_b.components().iter().all(|m| (m * &j) == (&j * m));
        report.check(format!("{}: psi commutes with J", crate::sheaves::overlap_name(atlas, o)), commutes, || {
            format!("J = {j}")
        });
        transitions.push(&j * &d.transitions[k]);
        twists.push(j);
    }
    let primed = FlatSheaf::new(atlas.clone(), d.rank, fields, transitions)?;
    let primed_report = crate::sheaves::check_flat(&primed);
    let flat_ok = primed_report.is_pass();
    report.absorb("nabla'", primed_report);
    if !flat_ok {
        return Err(Error::Internal(format!(
            "corrected connection fails its checks:\n{}",
            report.render_text()
        )));
    }
    let psi_primed = p_curvature(&primed)?;
    report.check("nabla' has zero p-curvature", psi_primed.is_zero(), || {
        format!("{:?}", psi_primed.fields)
    });
    if !psi_primed.is_zero() {
        return Err(Error::Internal("corrected connection has nonzero p-curvature".into()));
    }
    let glued = check_psi_gluing(&primed, &psi);
    report.absorb("psi along J T", glued);

    let descent = flat_sections(&primed, degree_bound)?;
    report.pass(format!("flat frames found within degree bound {}", descent.bound));
    let mut higgs_fields = Vec::with_capacity(d.fields.len());
    for (c, chart) in atlas.charts().iter().enumerate() {
        let s = &descent.frames[c];
        let s_inv = s.inverse()?;
        let comps = psi.fields[c]
            .components()
            .iter()
            .map(|m| {
                (&(&s_inv * m) * s).frobenius_root().map_err(|e| {
                    Error::Internal(format!("p-curvature in the flat frame on `{}` is not a p-th power: {e}", chart.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        higgs_fields.push(MatrixForm::new(comps));
    }
    let higgs = HiggsSheaf::new(atlas.clone(), d.rank, higgs_fields, descent.transitions.clone())?;
    let checks = crate::sheaves::check_higgs(&higgs);
    let ok = checks.is_pass();
    report.absorb("output", checks);
    if !ok {
        return Err(Error::Internal(format!("descended Higgs sheaf fails its checks:\n{}", report.render_text())));
    }
    Ok(CartierTrace {
        psi,
        primed,
        twists,
        descent,
        higgs,
        report,
    })
}
