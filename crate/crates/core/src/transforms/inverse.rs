//! The inverse Cartier transform: Frobenius pullback twisted by exponentials
//! of the Deligne-Illusie homotopies.

use std::sync::Arc;

use crate::atlas::{self, Atlas, FrobLift, OverlapLift, Side};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::ring::{trunc_exp, LaurentPoly, Matrix, MatrixForm, OneForm, PrimeContext};
use crate::sheaves::{gauge_connection, overlap_name, FlatSheaf, HiggsSheaf};

/// Which lift each chart uses, as an index into that chart's lifts.
/// Charts beyond the end of the list use their first lift.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftChoice(pub Vec<usize>);

impl LiftChoice {
    pub fn first() -> Self {
        Self(Vec::new())
    }

    /// Lift number `k` on every chart.
    pub fn uniform(atlas: &Atlas, k: usize) -> Self {
        Self(vec![k; atlas.charts().len()])
    }

    pub fn pick<'a>(&self, atlas: &'a Atlas, chart: usize) -> Result<&'a FrobLift> {
        let k = self.0.get(chart).copied().unwrap_or(0);
        atlas.lifts_on(chart).get(k).copied().ok_or_else(|| {
            Error::Precondition(format!("chart `{}` has no lift #{k}", atlas.chart(chart).name))
        })
    }
}

/// Charts and overlaps must agree; lifts may differ.
pub(crate) fn same_geometry(a: &Atlas, b: &Atlas) -> Result<()> {
    if a.p() != b.p() || a.charts() != b.charts() || a.overlaps() != b.overlaps() {
        return Err(Error::Precondition("sheaf and atlas have different charts or overlaps".into()));
    }
    Ok(())
}

/// Requires exponent at most `p - 1` and all other Higgs checks.
pub(crate) fn require_higgs(e: &HiggsSheaf) -> Result<usize> {
    let p = e.atlas().p();
    match e.exponent() {
        Some(n) if n as u64 <= p - 1 => {}
        Some(n) => {
            return Err(Error::Precondition(format!(
                "Higgs field is nilpotent of exponent {n}, above p - 1 = {}",
                p - 1
            )))
        }
        None => return Err(Error::Precondition("Higgs field is not nilpotent".into())),
    }
    e.validate()?;
    Ok(e.exponent().unwrap_or(1))
}

/// `exp(sum_k M_k h_k)` for a field `M` in an `F*du` basis.
pub fn twist(field: &MatrixForm, h: &[LaurentPoly], ctx: &PrimeContext) -> Result<Matrix> {
    trunc_exp(&field.contract(h), ctx)
}

/// `(F*E, nabla_can)` for a sheaf with zero Higgs field.
pub fn canonical_connection(e: &HiggsSheaf) -> Result<FlatSheaf> {
    if !e.is_zero() {
        return Err(Error::Precondition("canonical connection needs a zero Higgs field".into()));
    }
    let d = e.data();
    let fields = d.fields.iter().map(MatrixForm::frobenius).collect();
    let transitions = d.transitions.iter().map(Matrix::frobenius).collect();
    FlatSheaf::new(d.atlas.clone(), d.rank, fields, transitions)
}

pub fn inverse_cartier(e: &HiggsSheaf, atlas: &Arc<Atlas>) -> Result<FlatSheaf> {
    inverse_cartier_with(e, atlas, &LiftChoice::first())
}

/// On each chart `nabla = d + zeta(F*theta)`; on each overlap the
/// transition is `exp(h_ab(F*theta)) F(T)`.
pub fn inverse_cartier_with(e: &HiggsSheaf, atlas: &Arc<Atlas>, choice: &LiftChoice) -> Result<FlatSheaf> {
    same_geometry(e.atlas(), atlas)?;
    require_higgs(e)?;
    let d = e.data();
    let mut fields = Vec::with_capacity(d.fields.len());
    for (c, theta) in d.fields.iter().enumerate() {
        let lift = choice.pick(atlas, c)?;
        let zetas = (0..theta.dim()).map(|j| lift.zeta(j)).collect::<Result<Vec<_>>>()?;
        fields.push(atlas::zeta_of_field(&theta.frobenius(), &zetas));
    }
    let mut transitions = Vec::with_capacity(d.transitions.len());
    for (k, o) in atlas.overlaps().iter().enumerate() {
        let ga = atlas.lift_on_overlap(o, Side::Alpha, choice.pick(atlas, o.chart(Side::Alpha))?)?;
        let gb = atlas.lift_on_overlap(o, Side::Beta, choice.pick(atlas, o.chart(Side::Beta))?)?;
        let h = atlas::h_vector(&ga, &gb)?;
        let theta_b = o.restrict_matrix_form(Side::Beta, &d.fields[o.chart(Side::Beta)])?;
        let g = twist(&theta_b.frobenius(), &h, atlas.ctx())?;
        transitions.push(&g * &d.transitions[k].frobenius());
    }
    FlatSheaf::new(atlas.clone(), d.rank, fields, transitions)
}

/// Compares the twisted pullbacks built from different lifts: for every
/// group of lifts that meet (all lifts of one chart, and all lifts of two
/// charts on their overlap) the gluings `exp(h_xy(F*theta))` satisfy the
/// cocycle law and carry `d + zeta_x(F*theta)` to `d + zeta_y(F*theta)`.
pub fn lift_cocycle_report(e: &HiggsSheaf, atlas: &Atlas) -> Report {
    let mut report = Report::new("exponential twisting across lifts");
    if let Err(err) = same_geometry(e.atlas(), atlas).and_then(|_| require_higgs(e)) {
        report.fail("preconditions", err.to_string());
        return report;
    }
    for (c, chart) in atlas.charts().iter().enumerate() {
        let lifts: Vec<(String, OverlapLift)> = atlas
            .lifts_on(c)
            .iter()
            .enumerate()
            .map(|(k, l)| (format!("{}#{k}", chart.name), l.as_overlap_lift()))
            .collect();
        twist_group(&mut report, &chart.name, e.field(c), &lifts, atlas.ctx());
    }
    for o in atlas.overlaps() {
        let ctx = overlap_name(atlas, o);
        let mut lifts = Vec::new();
        for side in [Side::Alpha, Side::Beta] {
            let name = &atlas.chart(o.chart(side)).name;
            for (k, l) in atlas.lifts_on(o.chart(side)).iter().enumerate() {
                match atlas.lift_on_overlap(o, side, l) {
                    Ok(ol) => lifts.push((format!("{name}#{k}"), ol)),
                    Err(err) => report.fail(format!("{ctx}: move {name}#{k}"), err.to_string()),
                }
            }
        }
        match o.restrict_matrix_form(Side::Alpha, e.field(o.chart(Side::Alpha))) {
            Ok(theta) => twist_group(&mut report, &ctx, &theta, &lifts, atlas.ctx()),
            Err(err) => report.fail(format!("{ctx}: restrict Higgs field"), err.to_string()),
        }
    }
    report
}

fn twist_group(report: &mut Report, ctx: &str, theta: &MatrixForm, lifts: &[(String, OverlapLift)], pctx: &PrimeContext) {
    if lifts.len() < 2 {
        return;
    }
    let f_theta = theta.frobenius();
    let gluing = |a: &OverlapLift, b: &OverlapLift| -> Result<Matrix> {
        twist(&f_theta, &atlas::h_vector(a, b)?, pctx)
    };
    let connection = |a: &OverlapLift| -> Result<MatrixForm> {
        let zetas: Vec<OneForm> = a.zeta_table()?;
        Ok(atlas::zeta_of_field(&f_theta, &zetas))
    };
    for (na, a) in lifts {
        for (nb, b) in lifts {
            if na == nb {
                continue;
            }
            report.timed(format!("{ctx}: exp h({na},{nb}) carries nabla_{na} to nabla_{nb}"), || {
                let g = gluing(a, b)?;
                let moved = gauge_connection(&connection(a)?, &g, &g.inverse()?);
                let target = connection(b)?;
                let ok = moved == target;
                Ok::<_, Error>((ok, (!ok).then(|| format!("{moved} vs {target}"))))
            });
            for (nc, c) in lifts {
                if nc == na || nc == nb {
                    continue;
                }
                report.timed(format!("{ctx}: G({nb},{nc}) G({na},{nb}) = G({na},{nc})"), || {
                    let lhs = &gluing(b, c)? * &gluing(a, b)?;
                    let rhs = gluing(a, c)?;
                    let ok = lhs == rhs;
                    Ok::<_, Error>((ok, (!ok).then(|| format!("{lhs} vs {rhs}"))))
                });
            }
        }
    }
}
