//! Charts, overlaps and Frobenius liftings, together with the divided
//! Frobenius `zeta` and the homotopies `h` comparing two liftings.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::ring::{
    FOneForm, LaurentPoly, LaurentPoly2, Matrix, MatrixForm, OneForm, PrimeContext, VarSpec,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub vars: Arc<VarSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Alpha,
    Beta,
}

impl Side {
    fn idx(self) -> usize {
        match self {
            Side::Alpha => 0,
            Side::Beta => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Alpha => Side::Beta,
            Side::Beta => Side::Alpha,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartDirection {
    AlphaToBeta,
    BetaToAlpha,
}

impl ChartDirection {
    fn sides(self) -> (Side, Side) {
        match self {
            ChartDirection::AlphaToBeta => (Side::Alpha, Side::Beta),
            ChartDirection::BetaToAlpha => (Side::Beta, Side::Alpha),
        }
    }
}

/// One side of an overlap: the chart's coordinates as functions of the
/// overlap coordinates, and the overlap coordinates as functions of the
/// chart's coordinates (in the chart ring localized along the overlap).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapSide {
    pub chart: usize,
    /// Chart coordinate `i` expressed in the overlap ring, mod `p^2`.
    pub coords: Vec<LaurentPoly2>,
    /// The chart's coordinate names with the overlap's inversions.
    pub local_vars: Arc<VarSpec>,
    /// Overlap coordinate `k` expressed in `local_vars`, mod `p^2`.
    pub inverse: Vec<LaurentPoly2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub vars: Arc<VarSpec>,
    sides: [OverlapSide; 2],
    coords_mod_p: [Vec<LaurentPoly>; 2],
    inverse_mod_p: [Vec<LaurentPoly>; 2],
    jacobian: [Matrix; 2],
    inverse_jacobian: [Matrix; 2],
}

/// A Frobenius lifting on one chart: the images of its coordinates mod `p^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobLift {
    pub chart: usize,
    pub images: Vec<LaurentPoly2>,
}

/// A Frobenius lifting moved onto an overlap: images of the overlap
/// coordinates, mod `p^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapLift {
    pub vars: Arc<VarSpec>,
    pub images: Vec<LaurentPoly2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    ctx: PrimeContext,
    charts: Vec<Chart>,
    overlaps: Vec<Overlap>,
    lifts: Vec<FrobLift>,
}

impl Overlap {
    pub fn new(p: u64, charts: &[Chart], vars: Arc<VarSpec>, alpha: OverlapSide, beta: OverlapSide) -> Result<Self> {
        let mut coords_mod_p = [Vec::new(), Vec::new()];
        let mut inverse_mod_p = [Vec::new(), Vec::new()];
        let mut jacobian = Vec::new();
        let mut inverse_jacobian = Vec::new();
        for (s, side) in [&alpha, &beta].into_iter().enumerate() {
            let chart = charts
                .get(side.chart)
                .ok_or_else(|| Error::Atlas(format!("overlap references chart #{}", side.chart)))?;
            let n = chart.vars.len();
            if n != vars.len() || side.coords.len() != n || side.inverse.len() != n {
                return Err(Error::Atlas(format!(
                    "overlap with chart `{}`: coordinate counts disagree",
                    chart.name
                )));
            }
            if side.local_vars.names() != chart.vars.names()
                || (0..n).any(|i| chart.vars.is_inverted(i) && !side.local_vars.is_inverted(i))
            {
                return Err(Error::Atlas(format!(
                    "local ring of `{}` must localize the chart ring",
                    chart.name
                )));
            }
            for c in &side.coords {
                check_ring(c, p, &vars)?;
            }
            for c in &side.inverse {
                check_ring(c, p, &side.local_vars)?;
            }
            // The two substitutions must be mutually inverse on coordinates.
            let local_coords: Vec<LaurentPoly2> = (0..n)
                .map(|i| LaurentPoly2::var(p, &side.local_vars, i))
                .collect();
            for (i, c) in side.coords.iter().enumerate() {
                let back = c.substitute(&side.inverse, &side.local_vars)?;
                if back != local_coords[i] {
                    return Err(Error::Atlas(format!(
                        "overlap with `{}`: coordinate {} does not round-trip (got {back})",
                        chart.name,
                        chart.vars.name(i)
                    )));
                }
            }
            for (k, c) in side.inverse.iter().enumerate() {
                let back = c.substitute(&side.coords, &vars)?;
                if back != LaurentPoly2::var(p, &vars, k) {
                    return Err(Error::Atlas(format!(
                        "overlap with `{}`: overlap coordinate {} does not round-trip (got {back})",
                        chart.name,
                        vars.name(k)
                    )));
                }
            }
            coords_mod_p[s] = side.coords.iter().map(LaurentPoly2::reduce).collect();
            inverse_mod_p[s] = side.inverse.iter().map(LaurentPoly2::reduce).collect();
            let jac = Matrix::from_fn(p, &vars, n, n, |i, k| coords_mod_p[s][i].derivative(k));
            if !jac.det().is_unit() {
                return Err(Error::Atlas(format!(
                    "overlap with `{}`: Jacobian determinant {} is not a unit",
                    chart.name,
                    jac.det()
                )));
            }
            jacobian.push(jac);
            inverse_jacobian.push(Matrix::from_fn(p, &side.local_vars, n, n, |k, j| {
                inverse_mod_p[s][k].derivative(j)
            }));
        }
        if alpha.chart == beta.chart {
            return Err(Error::Atlas("an overlap joins two distinct charts".into()));
        }
        let [ja, jb]: [Matrix; 2] = jacobian.try_into().expect("two sides");
        let [ia, ib]: [Matrix; 2] = inverse_jacobian.try_into().expect("two sides");
        Ok(Self {
            vars,
            sides: [alpha, beta],
            coords_mod_p,
            inverse_mod_p,
            jacobian: [ja, jb],
            inverse_jacobian: [ia, ib],
        })
    }

    pub fn side(&self, side: Side) -> &OverlapSide {
        &self.sides[side.idx()]
    }

    pub fn chart(&self, side: Side) -> usize {
        self.sides[side.idx()].chart
    }

    pub fn p(&self) -> u64 {
        self.jacobian[0].p()
    }

    /// `d t_i / d u_k` for the side's coordinates `t` and overlap coordinates `u`.
    pub fn jacobian(&self, side: Side) -> &Matrix {
        &self.jacobian[side.idx()]
    }

    pub fn restrict_fn(&self, side: Side, f: &LaurentPoly) -> Result<LaurentPoly> {
        f.substitute(&self.coords_mod_p[side.idx()], &self.vars)
    }

    pub fn restrict_fn2(&self, side: Side, f: &LaurentPoly2) -> Result<LaurentPoly2> {
        f.substitute(&self.sides[side.idx()].coords, &self.vars)
    }

    pub fn restrict_matrix(&self, side: Side, m: &Matrix) -> Result<Matrix> {
        m.try_map(&self.vars, |e| self.restrict_fn(side, e))
    }

    pub fn restrict_form(&self, side: Side, form: &OneForm) -> Result<OneForm> {
        let coeffs = form
            .coeffs()
            .iter()
            .map(|c| self.restrict_fn(side, c))
            .collect::<Result<Vec<_>>>()?;
        let jac = self.jacobian(side);
        let n = self.vars.len();
        let out = (0..n)
            .map(|k| {
                coeffs.iter().enumerate().fold(LaurentPoly::zero(self.p(), &self.vars), |acc, (i, c)| {
                    &acc + &(c * jac.get(i, k))
                })
            })
            .collect();
        Ok(OneForm::new(&self.vars, out))
    }

    /// Transports a matrix-valued 1-form, changing the `dt` basis by the Jacobian.
    pub fn restrict_matrix_form(&self, side: Side, form: &MatrixForm) -> Result<MatrixForm> {
        self.restrict_with(side, form, false)
    }

    /// Transports a matrix-valued section of `F*Omega`; the basis changes by
    /// the Frobenius pullback of the Jacobian.
    pub fn restrict_frobenius_form(&self, side: Side, form: &MatrixForm) -> Result<MatrixForm> {
        self.restrict_with(side, form, true)
    }

    fn restrict_with(&self, side: Side, form: &MatrixForm, frobenius: bool) -> Result<MatrixForm> {
        let comps = form
            .components()
            .iter()
            .map(|m| self.restrict_matrix(side, m))
            .collect::<Result<Vec<_>>>()?;
        let jac = self.jacobian(side);
        let n = self.vars.len();
        let out = (0..n)
            .map(|k| {
                let weights: Vec<LaurentPoly> = (0..n)
                    .map(|i| {
                        let j = jac.get(i, k);
                        if frobenius {
                            j.frobenius()
                        } else {
                            j.clone()
                        }
                    })
                    .collect();
                MatrixForm::new(comps.clone()).contract(&weights)
            })
            .collect();
        Ok(MatrixForm::new(out))
    }

    /// Overlap function expressed in the side's localized chart ring.
    pub fn extend_fn(&self, side: Side, f: &LaurentPoly) -> Result<LaurentPoly> {
        f.substitute(&self.inverse_mod_p[side.idx()], &self.sides[side.idx()].local_vars)
    }

    pub fn extend_form(&self, side: Side, form: &OneForm) -> Result<OneForm> {
        let s = side.idx();
        let local = &self.sides[s].local_vars;
        let coeffs = form
            .coeffs()
            .iter()
            .map(|c| self.extend_fn(side, c))
            .collect::<Result<Vec<_>>>()?;
        let jac = &self.inverse_jacobian[s];
        let n = local.len();
        let out = (0..n)
            .map(|j| {
                coeffs.iter().enumerate().fold(LaurentPoly::zero(self.p(), local), |acc, (k, c)| {
                    &acc + &(c * jac.get(k, j))
                })
            })
            .collect();
        Ok(OneForm::new(local, out))
    }

    /// Re-expresses a 1-form given in one chart's coordinates in the other
    /// chart's (localized) coordinates.
    pub fn change_chart_form(&self, form: &OneForm, direction: ChartDirection) -> Result<OneForm> {
        let (from, to) = direction.sides();
        self.extend_form(to, &self.restrict_form(from, form)?)
    }

    /// Matrices of functions change charts by substitution alone.
    pub fn change_chart_matrix(&self, m: &Matrix, direction: ChartDirection) -> Result<Matrix> {
        let (from, to) = direction.sides();
        let on_overlap = self.restrict_matrix(from, m)?;
        on_overlap.try_map(&self.sides[to.idx()].local_vars, |e| self.extend_fn(to, e))
    }
}

fn check_ring(f: &LaurentPoly2, p: u64, vars: &Arc<VarSpec>) -> Result<()> {
    if f.p() != p || f.vars().as_ref() != vars.as_ref() {
        return Err(Error::Atlas(format!("`{f}` lives in the wrong ring")));
    }
    Ok(())
}

impl FrobLift {
    /// Checks that the lift reduces to the absolute Frobenius mod `p`.
    pub fn validate(&self, chart: &Chart) -> Result<()> {
        if self.images.len() != chart.vars.len() {
            return Err(Error::Atlas(format!(
                "lift on `{}` has {} images for {} coordinates",
                chart.name,
                self.images.len(),
                chart.vars.len()
            )));
        }
        for (i, img) in self.images.iter().enumerate() {
            check_ring(img, img.p(), &chart.vars)?;
            let t = LaurentPoly::var(img.p(), &chart.vars, i);
            if img.reduce() != t.frobenius() {
                return Err(Error::Atlas(format!(
                    "lift of {} on `{}` is {img}, which does not reduce to {}",
                    chart.vars.name(i),
                    chart.name,
                    t.frobenius()
                )));
            }
        }
        Ok(())
    }

    /// Applies the lift as a ring endomorphism, extended to a localization
    /// `local` of the chart ring.
    pub fn apply(&self, f: &LaurentPoly2, local: &Arc<VarSpec>) -> Result<LaurentPoly2> {
        let images = self
            .images
            .iter()
            .map(|g| g.rehome(local))
            .collect::<Result<Vec<_>>>()?;
        f.substitute(&images, local)
    }

    /// `zeta(F*dt_i) = d(F(t_i)) / p`, reduced mod `p`.
    pub fn zeta(&self, i: usize) -> Result<OneForm> {
        zeta_of(&self.images[i])
    }

    /// `zeta(F*omega)` computed through a mod-`p^2` lift of the form
    /// `sum_i g_i dt_i`: `sum_i F(g_i) dF(t_i) / p`.
    pub fn zeta_pullback(&self, coeffs: &[LaurentPoly2]) -> Result<OneForm> {
        let vars = self.images[0].vars().clone();
        let p = self.images[0].p();
        let n = vars.len();
        let mut acc = vec![LaurentPoly2::zero(p, &vars); n];
        for (i, g) in coeffs.iter().enumerate() {
            let fg = self.apply(g, &vars)?;
            for (l, slot) in acc.iter_mut().enumerate() {
                *slot = &*slot + &(&fg * &self.images[i].derivative(l));
            }
        }
        let out = acc
            .iter()
            .map(LaurentPoly2::divide_by_p)
            .collect::<Result<Vec<_>>>()?;
        Ok(OneForm::new(&vars, out))
    }

    pub fn as_overlap_lift(&self) -> OverlapLift {
        OverlapLift {
            vars: self.images[0].vars().clone(),
            images: self.images.clone(),
        }
    }
}

fn zeta_of(image: &LaurentPoly2) -> Result<OneForm> {
    let vars = image.vars();
    let coeffs = (0..vars.len())
        .map(|l| image.derivative(l).divide_by_p())
        .collect::<Result<Vec<_>>>()?;
    Ok(OneForm::new(vars, coeffs))
}

impl OverlapLift {
    pub fn zeta(&self, k: usize) -> Result<OneForm> {
        zeta_of(&self.images[k])
    }

    /// The matrix `z` with `zeta(F*du_k) = sum_l z[k][l] du_l`.
    pub fn zeta_table(&self) -> Result<Vec<OneForm>> {
        (0..self.images.len()).map(|k| self.zeta(k)).collect()
    }
}

/// `h_ab(F*du_k) = (F_a(u_k) - F_b(u_k)) / p`, reduced mod `p`.
pub fn h_pair(a: &OverlapLift, b: &OverlapLift, k: usize) -> Result<LaurentPoly> {
    (&a.images[k] - &b.images[k]).divide_by_p()
}

/// All components `h_ab(F*du_k)`.
pub fn h_vector(a: &OverlapLift, b: &OverlapLift) -> Result<Vec<LaurentPoly>> {
    (0..a.images.len()).map(|k| h_pair(a, b, k)).collect()
}

/// Contracts a matrix-valued `F*Omega` section against `h`: `sum_k M_k h(F*du_k)`.
pub fn contract_h(field: &MatrixForm, h: &[LaurentPoly]) -> Matrix {
    field.contract(h)
}

impl Atlas {
    pub fn new(
        ctx: PrimeContext,
        charts: Vec<Chart>,
        overlaps: Vec<Overlap>,
        lifts: Vec<FrobLift>,
    ) -> Result<Self> {
        for (i, c) in charts.iter().enumerate() {
            if charts[..i].iter().any(|d| d.name == c.name) {
                return Err(Error::Atlas(format!("duplicate chart `{}`", c.name)));
            }
        }
        for l in &lifts {
            let chart = charts
                .get(l.chart)
                .ok_or_else(|| Error::Atlas(format!("lift references chart #{}", l.chart)))?;
            l.validate(chart)?;
            if l.images.iter().any(|g| g.p() != ctx.p()) {
                return Err(Error::Atlas("lift over a different prime".into()));
            }
        }
        for (i, c) in charts.iter().enumerate() {
            if !lifts.iter().any(|l| l.chart == i) {
                return Err(Error::Atlas(format!("chart `{}` has no Frobenius lift", c.name)));
            }
        }
        for o in &overlaps {
            if o.p() != ctx.p() {
                return Err(Error::Atlas("overlap over a different prime".into()));
            }
        }
        Ok(Self {
            ctx,
            charts,
            overlaps,
            lifts,
        })
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> &Chart {
        &self.charts[i]
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    pub fn overlaps(&self) -> &[Overlap] {
        &self.overlaps
    }

    pub fn lifts(&self) -> &[FrobLift] {
        &self.lifts
    }

    pub fn lifts_on(&self, chart: usize) -> Vec<&FrobLift> {
        self.lifts.iter().filter(|l| l.chart == chart).collect()
    }

    /// The same atlas with a different set of lifts.
    pub fn with_lifts(&self, lifts: Vec<FrobLift>) -> Result<Self> {
        Self::new(self.ctx.clone(), self.charts.clone(), self.overlaps.clone(), lifts)
    }

    /// Moves a lift on the overlap's `side` chart onto the overlap.
    pub fn lift_on_overlap(&self, overlap: &Overlap, side: Side, lift: &FrobLift) -> Result<OverlapLift> {
        let s = overlap.side(side);
        if lift.chart != s.chart {
            return Err(Error::Atlas("lift lives on a different chart".into()));
        }
        let images = s
            .inverse
            .iter()
            .map(|u| {
                let on_local = lift.apply(u, &s.local_vars)?;
                overlap.restrict_fn2(side, &on_local)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OverlapLift {
            vars: overlap.vars.clone(),
            images,
        })
    }

    /// `zeta` computed on the chart and transported to the overlap:
    /// `zeta(F*du_k) = sum_i F(du_k/dt_i) zeta(F*dt_i)`.
    pub fn transported_zeta(&self, overlap: &Overlap, side: Side, lift: &FrobLift) -> Result<Vec<OneForm>> {
        let s = overlap.side(side);
        let n = overlap.vars.len();
        let zetas = (0..n)
            .map(|i| overlap.restrict_form(side, &lift.zeta(i)?))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let u_k = s.inverse[k].reduce();
            let mut acc = OneForm::zero(self.p(), &overlap.vars);
            for (i, z) in zetas.iter().enumerate() {
                let weight = overlap.restrict_fn(side, &u_k.derivative(i))?.frobenius();
                acc = acc.add(&z.scale(&weight));
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Checks the Deligne-Illusie identities `dh_ab = zeta_a - zeta_b`,
/// `h_ab + h_bc = h_ac` and `h_ab = -h_ba` over every group of lifts that
/// can be compared: all lifts of a single chart, and all lifts of both
/// charts moved onto each overlap.
pub fn verify_deligne_illusie(atlas: &Atlas) -> Report {
    let mut report = Report::new("Deligne-Illusie lemma");
    for (ci, chart) in atlas.charts().iter().enumerate() {
        let lifts: Vec<(String, OverlapLift)> = atlas
            .lifts_on(ci)
            .iter()
            .enumerate()
            .map(|(k, l)| (format!("{}#{k}", chart.name), l.as_overlap_lift()))
            .collect();
        check_lift_group(&mut report, &chart.name, &lifts);
        for (k, l) in atlas.lifts_on(ci).iter().enumerate() {
            // zeta(F*(t_i dt_i)) through the non-canonical lift (t_i + p) dt_i.
            report.timed(format!("{}#{k}: zeta independent of form lift", chart.name), || {
                let p = atlas.p();
                let n = chart.vars.len();
                for i in 0..n {
                    let mut coeffs = vec![LaurentPoly2::zero(p, &chart.vars); n];
                    coeffs[i] = &LaurentPoly2::var(p, &chart.vars, i) + &LaurentPoly2::constant(p, &chart.vars, p as i64);
                    let a = l.zeta_pullback(&coeffs)?;
                    let b = l.zeta(i)?.scale(&LaurentPoly::var(p, &chart.vars, i).frobenius());
                    if a != b {
                        return Ok((false, Some(format!("coordinate {i}: {a} vs {b}"))));
                    }
                }
                Ok::<_, Error>((true, None))
            });
        }
    }
    for overlap in atlas.overlaps() {
        let a = atlas.chart(overlap.chart(Side::Alpha)).name.clone();
        let b = atlas.chart(overlap.chart(Side::Beta)).name.clone();
        let ctx = format!("{a}/{b}");
        let mut group = Vec::new();
        for side in [Side::Alpha, Side::Beta] {
            let cname = &atlas.chart(overlap.chart(side)).name;
            for (k, l) in atlas.lifts_on(overlap.chart(side)).iter().enumerate() {
                match atlas.lift_on_overlap(overlap, side, l) {
                    Ok(ol) => {
                        let label = format!("{cname}#{k}");
                        report.timed(format!("{ctx}: zeta of {label} agrees with chart zeta"), || {
                            let direct = ol.zeta_table()?;
                            let moved = atlas.transported_zeta(overlap, side, l)?;
                            let ok = direct == moved;
                            Ok::<_, Error>((ok, (!ok).then(|| format!("{direct:?} vs {moved:?}"))))
                        });
                        group.push((label, ol));
                    }
                    Err(e) => report.fail(format!("{ctx}: move {cname}#{k} onto overlap"), e.to_string()),
                }
            }
        }
        check_lift_group(&mut report, &ctx, &group);
    }
    report
}

fn check_lift_group(report: &mut Report, ctx: &str, lifts: &[(String, OverlapLift)]) {
    if lifts.len() < 2 {
        report.skip(format!("{ctx}: lift comparisons"), "fewer than two lifts");
        return;
    }
    let n = lifts[0].1.images.len();
    for (na, a) in lifts {
        for (nb, b) in lifts {
            if na == nb {
                continue;
            }
            report.timed(format!("{ctx}: d h({na},{nb}) = zeta_{na} - zeta_{nb}"), || {
                for k in 0..n {
                    let dh = OneForm::exact(&h_pair(a, b, k)?);
                    let diff = a.zeta(k)?.sub(&b.zeta(k)?);
                    if dh != diff {
                        return Ok((false, Some(format!("F*d{}: dh = {dh}, zeta difference = {diff}", a.vars.name(k)))));
                    }
                }
                Ok::<_, Error>((true, None))
            });
            report.timed(format!("{ctx}: h({na},{nb}) = -h({nb},{na})"), || {
                let ab = h_vector(a, b)?;
                let ba = h_vector(b, a)?;
                let ok = ab.iter().zip(&ba).all(|(x, y)| (x + y).is_zero());
                Ok::<_, Error>((ok, (!ok).then(|| format!("{ab:?} vs {ba:?}"))))
            });
        }
    }
    for (na, a) in lifts {
        for (nb, b) in lifts {
            for (nc, c) in lifts {
                if na == nb || nb == nc || na == nc {
                    continue;
                }
                report.timed(format!("{ctx}: h({na},{nb}) + h({nb},{nc}) = h({na},{nc})"), || {
                    let ab = h_vector(a, b)?;
                    let bc = h_vector(b, c)?;
                    let ac = h_vector(a, c)?;
                    for k in 0..n {
                        let lhs = &ab[k] + &bc[k];
                        if lhs != ac[k] {
                            return Ok((false, Some(format!("F*d{}: {lhs} vs {}", a.vars.name(k), ac[k]))));
                        }
                    }
                    Ok::<_, Error>((true, None))
                });
            }
        }
    }
}

/// `zeta` applied to an `F*Omega`-valued form, e.g. `F*theta` or `psi`:
/// returns the matrix-valued 1-form `sum_j M_j zeta(F*dt_j)`.
pub fn zeta_of_field(field: &MatrixForm, zetas: &[OneForm]) -> MatrixForm {
    let n = zetas.len();
    let comps = (0..n)
        .map(|i| {
            let weights: Vec<LaurentPoly> = zetas.iter().map(|z| z.coeff(i).clone()).collect();
            field.contract(&weights)
        })
        .collect();
    MatrixForm::new(comps)
}

/// Convenience wrapper turning an `F*Omega` coefficient list into a typed form.
pub fn as_frobenius_form(vars: &Arc<VarSpec>, coeffs: Vec<LaurentPoly>) -> FOneForm {
    FOneForm::new(vars, coeffs)
}

/// Ready-made atlases used by the gallery and the tests.
pub mod standard {
    use super::*;

    fn lift_images(p: u64, vars: &Arc<VarSpec>, texts: &[&str]) -> Result<Vec<LaurentPoly2>> {
        texts.iter().map(|t| LaurentPoly2::parse(t, p, vars)).collect()
    }

    /// Affine space on the named coordinates with one chart `A`; each entry
    /// of `lifts` lists the images of the coordinates, e.g. `["t^p + p*t"]`.
    /// An empty list means the single lift `t -> t^p`.
    pub fn affine(ctx: &PrimeContext, names: &[&str], lifts: &[Vec<String>]) -> Result<Atlas> {
        chart_with_lifts(ctx, "A", VarSpec::polynomial(names)?, lifts)
    }

    /// The multiplicative group on `t`, chart `G`.
    pub fn torus(ctx: &PrimeContext, lifts: &[Vec<String>]) -> Result<Atlas> {
        chart_with_lifts(ctx, "G", VarSpec::laurent(&["t"])?, lifts)
    }

    fn chart_with_lifts(ctx: &PrimeContext, name: &str, vars: Arc<VarSpec>, lifts: &[Vec<String>]) -> Result<Atlas> {
        let p = ctx.p();
        let lifts = if lifts.is_empty() {
            vec![standard_images(&vars)]
        } else {
            lifts.to_vec()
        };
        let lifts = lifts
            .iter()
            .map(|imgs| {
                let expanded: Vec<String> = imgs.iter().map(|t| expand_p(t, p)).collect();
                let refs: Vec<&str> = expanded.iter().map(String::as_str).collect();
                Ok(FrobLift {
                    chart: 0,
                    images: lift_images(p, &vars, &refs)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Atlas::new(
            ctx.clone(),
            vec![Chart {
                name: name.into(),
                vars,
            }],
            vec![],
            lifts,
        )
    }

    fn standard_images(vars: &Arc<VarSpec>) -> Vec<String> {
        vars.names().iter().map(|n| format!("{n}^p")).collect()
    }

    /// The projective line: chart `U0` on `s`, chart `U1` on `w = 1/s`,
    /// glued along `s != 0`. `lift0`/`lift1` are the images of `s` and `w`;
    /// the letter `p` inside them stands for the prime.
    pub fn projective_line(ctx: &PrimeContext, lift0: &str, lift1: &str) -> Result<Atlas> {
        let p = ctx.p();
        let s = VarSpec::polynomial(&["s"])?;
        let w = VarSpec::polynomial(&["w"])?;
        let u = VarSpec::laurent(&["s"])?;
        let w_loc = VarSpec::laurent(&["w"])?;
        let charts = vec![
            Chart {
                name: "U0".into(),
                vars: s.clone(),
            },
            Chart {
                name: "U1".into(),
                vars: w.clone(),
            },
        ];
        let alpha = OverlapSide {
            chart: 0,
            coords: vec![LaurentPoly2::var(p, &u, 0)],
            local_vars: u.clone(),
            inverse: vec![LaurentPoly2::var(p, &u, 0)],
        };
        let beta = OverlapSide {
            chart: 1,
            coords: vec![LaurentPoly2::parse("s^-1", p, &u)?],
            local_vars: w_loc.clone(),
            inverse: vec![LaurentPoly2::parse("w^-1", p, &w_loc)?],
        };
        let overlap = Overlap::new(p, &charts, u, alpha, beta)?;
        let lifts = vec![
            FrobLift {
                chart: 0,
                images: lift_images(p, &s, &[&expand_p(lift0, p)])?,
            },
            FrobLift {
                chart: 1,
                images: lift_images(p, &w, &[&expand_p(lift1, p)])?,
            },
        ];
        Atlas::new(ctx.clone(), charts, vec![overlap], lifts)
    }

    /// Replaces the standalone letter `p` in an expression with the prime.
    pub fn expand_p(text: &str, p: u64) -> String {
        let mut out = String::new();
        let chars: Vec<char> = text.chars().collect();
        for (i, &c) in chars.iter().enumerate() {
            let ident = |c: char| c.is_alphanumeric() || c == '_';
            let before = i > 0 && ident(chars[i - 1]);
            let after = i + 1 < chars.len() && ident(chars[i + 1]);
            if c == 'p' && !before && !after {
                out.push_str(&p.to_string());
            } else {
                out.push(c);
            }
        }
        out
    }
}
