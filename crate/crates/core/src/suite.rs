//! The acceptance criteria, each producing a report.

use std::sync::Arc;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atlas::{self, Atlas, FrobLift};
use crate::error::{Error, Result};
use crate::gallery::gallery;
use crate::identities;
use crate::report::{Report, Status};
use crate::ring::{LaurentPoly, Matrix};
use crate::scene::Scene;
use crate::sheaves::{self, FlatSheaf};
use crate::transforms::{self as tf, Epsilon, LiftChoice};

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub budget: Duration,
    run: fn() -> Report,
}

impl Criterion {
    pub fn run(&self) -> Report {
        let mut r = (self.run)();
        r.title = format!("{}. {}", self.id, self.name);
        r
    }
}

pub fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: 1, name: "Deligne-Illusie homotopies", budget: s(10), run: deligne_illusie },
        Criterion { id: 2, name: "inverse Cartier well-formedness", budget: s(30), run: inverse_well_formed },
        Criterion { id: 3, name: "p-curvature sign law", budget: s(30), run: p_curvature_law },
        Criterion { id: 4, name: "Cartier well-formedness", budget: s(30), run: cartier_well_formed },
        Criterion { id: 5, name: "round trip to (E, -theta)", budget: s(60), run: round_trip },
        Criterion { id: 6, name: "Cartier descent frames", budget: s(10), run: descent_frames },
        Criterion { id: 7, name: "symmetrized sums F_k vanish", budget: s(60), run: fk_vanishing },
        Criterion { id: 8, name: "Taylor regrouping of exponentials", budget: s(30), run: taylor },
        Criterion { id: 9, name: "Wilson unit in the p-curvature", budget: s(5), run: wilson },
        Criterion { id: 10, name: "independence of the Frobenius lift", budget: s(30), run: lift_independence },
    ]
}

fn scene_or_fail(report: &mut Report, name: &str, p: u64) -> Option<Scene> {
    match gallery(name, p) {
        Ok(s) => Some(s),
        Err(e) => {
            report.fail(format!("{name} p={p}: build"), e.to_string());
            None
        }
    }
}

/// Folds a nested report into a single entry.
fn summarize(report: &mut Report, name: String, inner: Report) {
    if inner.is_pass() {
        let n = inner.entries.iter().filter(|e| e.status == Status::Pass).count();
        let witness = match inner.entries.as_slice() {
            [only] => only.witness.clone().unwrap_or_else(|| "1 check".into()),
            _ => format!("{n} checks"),
        };
        report.note(name, Status::Pass, witness);
    } else {
        let f = inner.failures().next().expect("failing report");
        report.fail(name, format!("{}: {}", f.check, f.witness.as_deref().unwrap_or("")));
    }
}

/// `F(t_i) + p r_i` with random `r_i` on every coordinate.
pub fn perturb_lift(lift: &FrobLift, rng: &mut ChaCha8Rng) -> FrobLift {
    let vars = lift.images[0].vars().clone();
    let p = lift.images[0].p();
    let images = lift
        .images
        .iter()
        .map(|img| {
            let mut r = LaurentPoly::zero(p, &vars);
            for _ in 0..rng.gen_range(1..=3) {
                let exps: Vec<i32> = (0..vars.len())
                    .map(|i| {
                        let lo = if vars.is_inverted(i) { -(2 * p as i32) } else { 0 };
                        rng.gen_range(lo..=2 * p as i32)
                    })
                    .collect();
                let c = rng.gen_range(1..p) as i64;
                r = &r + &LaurentPoly::monomial(p, &vars, c, &exps).expect("exponents in range");
            }
            img + &r.lift().scale(p)
        })
        .collect();
    FrobLift {
        chart: lift.chart,
        images,
    }
}

fn deligne_illusie() -> Report {
    let mut report = Report::new("");
    for p in [3, 5, 7] {
        for name in ["g3_a1_three_lifts", "g4_p1_lemma"] {
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            summarize(&mut report, format!("{name} p={p}"), atlas::verify_deligne_illusie(&scene.atlas));
            if name == "g4_p1_lemma" {
                let o = &scene.atlas.overlaps()[0];
                report.timed(format!("g4 p={p}: h(F*ds) = s^(2p-1)"), || {
                    let a = scene.atlas.lift_on_overlap(o, atlas::Side::Alpha, &scene.atlas.lifts()[0])?;
                    let b = scene.atlas.lift_on_overlap(o, atlas::Side::Beta, &scene.atlas.lifts()[1])?;
                    let h = atlas::h_pair(&a, &b, 0)?;
                    let expected = LaurentPoly::monomial(p, &o.vars, 1, &[2 * p as i32 - 1])?;
                    Ok::<_, Error>((h == expected, Some(format!("h = {h}"))))
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + p);
        for trial in 0..20 {
            let name = if trial % 2 == 0 { "g3_a1_three_lifts" } else { "g4_p1_lemma" };
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            let mut lifts = scene.atlas.lifts().to_vec();
            for c in 0..scene.atlas.charts().len() {
                let base = scene.atlas.lifts_on(c)[0].clone();
                lifts.push(perturb_lift(&base, &mut rng));
            }
            match scene.atlas.with_lifts(lifts) {
                Ok(a) => summarize(&mut report, format!("{name} p={p} perturbation {trial}"), atlas::verify_deligne_illusie(&a)),
                Err(e) => report.fail(format!("{name} p={p} perturbation {trial}"), e.to_string()),
            }
        }
    }
    report
}

fn higgs_items(p: u64) -> Vec<&'static str> {
    let mut items = vec!["g1_trivial:1", "g1_trivial:2", "g1_trivial:3", "g2_a1_rank2", "g3_a1_three_lifts", "g5_p1_uniformizing", "g6_a2_rank3"];
    if p >= 5 {
        items.push("g6_a2_rank3_exp3");
    }
    items
}

fn lift_choices(atlas: &Atlas) -> Vec<LiftChoice> {
    let most = (0..atlas.charts().len()).map(|c| atlas.lifts_on(c).len()).max().unwrap_or(1);
    (0..most)
        .map(|k| LiftChoice((0..atlas.charts().len()).map(|c| k.min(atlas.lifts_on(c).len() - 1)).collect()))
        .collect()
}

fn inverse_well_formed() -> Report {
    let mut report = Report::new("");
    for p in [3, 5, 7] {
        for name in higgs_items(p) {
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            let Ok(e) = scene.higgs() else { continue };
            for choice in lift_choices(&scene.atlas) {
                let label = format!("{name} p={p} lifts {:?}", choice.0);
                match tf::inverse_cartier_with(e, &scene.atlas, &choice) {
                    Ok(h) => {
                        let mut inner = sheaves::check_flat(&h);
                        match sheaves::p_curvature(&h) {
                            Ok(psi) => inner.extend(sheaves::check_psi_gluing(&h, &psi)),
                            Err(err) => inner.fail("p-curvature", err.to_string()),
                        }
                        summarize(&mut report, format!("{label}: flat, glued"), inner);
                    }
                    Err(err) => report.fail(label, err.to_string()),
                }
            }
            summarize(
                &mut report,
                format!("{name} p={p}: cocycle and gluing across lifts"),
                tf::lift_cocycle_report(e, &scene.atlas),
            );
        }
    }
    report
}

fn p_curvature_law() -> Report {
    let mut report = Report::new("");
    let mut eps: Option<(Epsilon, String)> = None;
    for p in [3, 5] {
        for name in higgs_items(p) {
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            let Ok(e) = scene.higgs() else { continue };
            for choice in lift_choices(&scene.atlas) {
                let label = format!("{name} p={p} lifts {:?}", choice.0);
                let measured = tf::inverse_cartier_with(e, &scene.atlas, &choice)
                    .and_then(|h| sheaves::p_curvature(&h))
                    .map(|psi| tf::measure_epsilon(e, &psi));
                match measured {
                    Err(err) => report.fail(label, err.to_string()),
                    Ok(Epsilon::Neither) => report.fail(label, "p-curvature is neither F*theta nor -F*theta"),
                    Ok(Epsilon::Undetermined) => report.note(label, Status::Pass, "theta = 0, p-curvature 0"),
                    Ok(m) => match &eps {
                        None => {
                            report.note(label.clone(), Status::Pass, format!("measured epsilon = {}", m.as_i64().unwrap_or(0)));
                            eps = Some((m, label));
                        }
                        Some((first, _)) if m == *first => {
                            report.note(label, Status::Pass, format!("epsilon = {}", m.as_i64().unwrap_or(0)))
                        }
                        Some((first, from)) => {
                            report.fail(label, format!("epsilon {m:?} disagrees with {first:?} from {from}"))
                        }
                    },
                }
            }
        }
    }
    report.timed("rank-2 oracle: psi(d) e2 = -e1 at p=3", || {
        let scene = gallery("g2_a1_rank2", 3)?;
        let h = tf::inverse_cartier(scene.higgs()?, &scene.atlas)?;
        let psi = sheaves::p_curvature(&h)?;
        let m = psi.fields[0].component(0);
        let oracle = m.get(0, 1).as_constant() == Some(2) && m.get(0, 0).is_zero() && m.get(1, 0).is_zero() && m.get(1, 1).is_zero();
        let ok = oracle && matches!(eps, Some((Epsilon::Minus, _)));
        Ok::<_, Error>((ok, Some(format!("psi = {m}, measured epsilon {:?}", eps.as_ref().map(|e| e.0)))))
    });
    report
}

fn cartier_inputs() -> Vec<(String, u64, Result<FlatSheaf>, Arc<Atlas>)> {
    let mut out = Vec::new();
    for p in [3, 5] {
        for name in ["g2_a1_rank2", "g5_p1_uniformizing", "g6_a2_rank3"] {
            if let Ok(scene) = gallery(name, p) {
                let h = scene.higgs().and_then(|e| tf::inverse_cartier(e, &scene.atlas));
                out.push((format!("image of {name}"), p, h, scene.atlas.clone()));
            }
        }
    }
    for c in 0..3 {
        let name = format!("g7_gm_rank1:{c}");
        if let Ok(scene) = gallery(&name, 3) {
            out.push((name, 3, scene.flat().cloned(), scene.atlas.clone()));
        }
    }
    out
}

fn cartier_well_formed() -> Report {
    let mut report = Report::new("");
    for (name, p, h, atlas) in cartier_inputs() {
        let label = format!("{name} p={p}");
        let traced = h.and_then(|h| tf::cartier_traced(&h, &atlas, &LiftChoice::first(), None));
        match traced {
            Ok(t) => {
                let primed_zero = sheaves::p_curvature(&t.primed).map(|x| x.is_zero()).unwrap_or(false);
                report.check(format!("{label}: nabla' has zero p-curvature"), primed_zero, || "nonzero".into());
                let bound_ok = t.higgs.exponent().is_some_and(|n| n as u64 <= p - 1);
                report.check(format!("{label}: output exponent <= p-1"), bound_ok, || format!("{:?}", t.higgs.exponent()));
                summarize(&mut report, format!("{label}: psi/J commute, output Higgs checks"), t.report);
            }
            Err(e) => report.fail(label, e.to_string()),
        }
    }
    report
}

fn round_trip() -> Report {
    let mut report = Report::new("");
    for p in [3, 5] {
        for name in higgs_items(p) {
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            let Ok(e) = scene.higgs() else { continue };
            let label = format!("{name} p={p}");
            match tf::roundtrip(e, &scene.atlas, None) {
                Ok(rt) => {
                    let single = scene.atlas.charts().len() == 1;
                    if single {
                        report.check(format!("{label}: exactly (E, -theta)"), rt.exact, || format!("{:?}", rt.result.data().fields));
                    }
                    let how = if rt.exact { "exact" } else { "up to gauge" };
                    summarize(&mut report, format!("{label}: round trip ({how})"), rt.report);
                }
                Err(err) => report.fail(label, err.to_string()),
            }
        }
    }
    report
}

fn frame_case(report: &mut Report, label: String, h: Result<FlatSheaf>, expected: Option<Matrix>) {
    report.timed(label, || {
        let h = h?;
        let d = tf::flat_sections(&h, None)?;
        tf::verify_frame(h.connection(0), &d.frames[0])?;
        let ok = expected.as_ref().is_none_or(|m| *m == d.frames[0]);
        Ok::<_, Error>((ok, Some(format!("S = {}", d.frames[0]))))
    });
}

fn descent_frames() -> Report {
    let mut report = Report::new("");
    for p in [3, 5, 7] {
        for r in 1..=3 {
            let atlas = gallery(&format!("g1_trivial:{r}"), p).map(|s| s.atlas);
            let h = atlas.and_then(|a| FlatSheaf::trivial(a, r));
            let id = h.as_ref().ok().map(|h| Matrix::identity(p, &h.atlas().chart(0).vars, r));
            frame_case(&mut report, format!("(O^{r}, d) p={p}"), h, id);
        }
        let nh = gallery("g2_a1_rank2", p).and_then(|s| {
            let e = s.higgs()?;
            FlatSheaf::new(s.atlas.clone(), 2, e.data().fields.clone(), vec![])
        });
        let expected = nh.as_ref().ok().map(|h| {
            let v = &h.atlas().chart(0).vars;
            Matrix::parse_square(p, v, &["1", "-t", "0", "1"]).expect("valid matrix")
        });
        frame_case(&mut report, format!("d + N dt p={p}: I - tN"), nh, expected);
        for c in 0..p {
            let scene = gallery(&format!("g7_gm_rank1:{c}"), p);
            let expected = scene.as_ref().ok().map(|s| {
                let v = &s.atlas.chart(0).vars;
                let e = if c == 0 { 0 } else { (p - c) as i32 };
                Matrix::from_fn(p, v, 1, 1, |_, _| LaurentPoly::monomial(p, v, 1, &[e]).expect("valid"))
            });
            let h = scene.and_then(|s| s.flat().cloned());
            frame_case(&mut report, format!("d + {c} dt/t p={p}: t^(p-c)"), h, expected);
        }
    }
    report
}

fn fk_vanishing() -> Report {
    let mut report = identities::verify_fk_vanishing(&[3, 5, 7]);
    let f1 = report.find("p=3 k=1: F_1 recorded").and_then(|e| e.witness.clone());
    report.check("p=3: F_1 = T1^2", f1.as_deref() == Some("F_1 = T1^2"), || format!("{f1:?}"));
    report
}

fn taylor() -> Report {
    let mut report = Report::new("");
    for p in [3, 5] {
        summarize(&mut report, format!("p={p}: 50 seeded commuting nilpotent families"), identities::taylor_trials(p, 50, 2024 + p));
    }
    report
}

fn wilson() -> Report {
    let mut report = Report::new("");
    for p in [3, 5, 7, 11, 13] {
        report.extend(identities::wilson_psi_check(p));
    }
    report
}

fn lift_independence() -> Report {
    let mut report = Report::new("");
    for p in [3, 5, 7] {
        for name in ["g2_a1_rank2", "g3_a1_three_lifts", "g6_a2_rank3"] {
            let Some(scene) = scene_or_fail(&mut report, name, p) else { continue };
            let Ok(e) = scene.higgs() else { continue };
            let choices = lift_choices(&scene.atlas);
            for other in &choices[1..] {
                summarize(
                    &mut report,
                    format!("{name} p={p}: lifts {:?} vs {:?}", choices[0].0, other.0),
                    tf::lift_independence(e, &scene.atlas, &choices[0], other, None),
                );
            }
        }
    }
    report
}

/// Runs every criterion, one report each.
pub fn run_all() -> Vec<Report> {
    criteria().iter().map(Criterion::run).collect()
}
