//! Command-line driver for the Higgs/flat correspondence toolkit.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails,
//! 2 on usage, parse or runtime errors.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use cartier_core::gallery::{gallery, GALLERY};
use cartier_core::identities::{symmetrized_f_k, taylor_trials, verify_fk_vanishing, wilson_psi_check};
use cartier_core::scene::Sheaf;
use cartier_core::sheaves::{check_flat, check_higgs, check_psi_gluing, p_curvature};
use cartier_core::suite::criteria;
use cartier_core::transforms::{
    cartier_traced, inverse_cartier_with, lift_cocycle_report, measure_epsilon, roundtrip, LiftChoice,
};
use cartier_core::{atlas::verify_deligne_illusie, emit_scene, parse_scene, Error, Report, Scene, Status};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "xcartier", version, about = "Exact Cartier and inverse Cartier transforms mod p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input scene (JSON).
    #[arg(long, global = true)]
    scene: Option<PathBuf>,
    /// Output file. Transforms write their output scene here and the report
    /// to stdout; other commands write everything here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// `fk`: a single k. `icartier`/`cartier`: index of the lift used on every chart.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long = "degree-bound", global = true)]
    degree_bound: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 50)]
    trials: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Deligne-Illusie homotopies of a scene's atlas (default: g4_p1_lemma).
    Lemma(Common),
    /// Inverse Cartier transform of a Higgs scene.
    Icartier(Common),
    /// Cartier transform of a flat scene.
    Cartier(Common),
    /// p-curvature of a flat scene.
    Pcurv(Common),
    /// Cartier of inverse Cartier, compared against (E, -theta).
    Roundtrip(Common),
    /// Vanishing of the symmetrized sums F_k mod p.
    Fk(Common),
    /// Taylor regrouping of exponentials on random commuting nilpotent families.
    Taylor(Common),
    /// Wilson unit check in the model p-curvature.
    Wilson(Common),
    /// Print a built-in scene.
    Gallery {
        /// Item name, optionally with a parameter (`g1_trivial:3`); omit to list.
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run every acceptance criterion.
    VerifyAll(Common),
}

enum Outcome {
    Report(Report),
    Transform(Report, Scene),
    Scene(Scene),
    Text(String),
}

/// Runs the CLI on `argv` (program name first), writing normal output to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let common = match &cli.command {
        Command::Lemma(c)
        | Command::Icartier(c)
        | Command::Cartier(c)
        | Command::Pcurv(c)
        | Command::Roundtrip(c)
        | Command::Fk(c)
        | Command::Taylor(c)
        | Command::Wilson(c)
        | Command::VerifyAll(c) => c.clone(),
        Command::Gallery { common, .. } => common.clone(),
    };
    let outcome = match execute(&cli.command, &common) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let json = common.json;
    let (text, code, scene_file) = match (&outcome, &common.out) {
        // With --out, a transform writes its scene there and its report to stdout.
        (Outcome::Transform(r, s), Some(_)) => {
            let (text, code) = render(&Outcome::Report(r.clone()), json);
            (text, code, Some(ensure_newline(emit_scene(s))))
        }
        _ => {
            let (text, code) = render(&outcome, json);
            (text, code, None)
        }
    };
    let (stdout_text, file_text) = match (&common.out, scene_file) {
        (Some(_), Some(scene)) => (Some(text), Some(scene)),
        (Some(_), None) => (None, Some(text)),
        (None, _) => (Some(text), None),
    };
    if let (Some(path), Some(body)) = (&common.out, file_text) {
        if let Err(e) = std::fs::write(path, body) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if let Some(body) = stdout_text {
        if let Err(e) = out.write_all(body.as_bytes()) {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    }
    code
}

fn render(outcome: &Outcome, json: bool) -> (String, i32) {
    let code = |r: &Report| if r.is_pass() { 0 } else { 1 };
    match outcome {
        Outcome::Report(r) => {
            let text = if json { pretty(&r.to_json()) } else { r.render_text() };
            (text, code(r))
        }
        Outcome::Transform(r, s) => {
            let text = if json {
                let scene: serde_json::Value = serde_json::from_str(&emit_scene(s)).expect("emitted scene is JSON");
                pretty(&serde_json::json!({ "report": r.to_json(), "scene": scene }))
            } else {
                format!("{}\n{}", r.render_text(), ensure_newline(emit_scene(s)))
            };
            (text, code(r))
        }
        Outcome::Scene(s) => (ensure_newline(emit_scene(s)), 0),
        Outcome::Text(t) => (t.clone(), 0),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    ensure_newline(serde_json::to_string_pretty(v).expect("JSON value serializes"))
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn load_scene(c: &Common) -> Result<Scene, Error> {
    let path = c
        .scene
        .as_ref()
        .ok_or_else(|| Error::Scene("--scene FILE is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Scene(format!("cannot read {}: {e}", path.display())))?;
    let scene = parse_scene(&text)?;
    if let Some(p) = c.p {
        if p != scene.p() {
            return Err(Error::Scene(format!("--p {p} disagrees with the scene's p = {}", scene.p())));
        }
    }
    Ok(scene)
}

fn lift_choice(c: &Common) -> LiftChoice {
    match c.k {
        Some(k) => LiftChoice(vec![k; 8]),
        None => LiftChoice::first(),
    }
}

fn execute(cmd: &Command, c: &Common) -> Result<Outcome, Error> {
    match cmd {
        Command::Lemma(_) => {
            let scene = match &c.scene {
                Some(_) => load_scene(c)?,
                None => gallery("g4_p1_lemma", c.p.unwrap_or(3))?,
            };
            Ok(Outcome::Report(verify_deligne_illusie(&scene.atlas)))
        }
        Command::Icartier(_) => {
            let scene = load_scene(c)?;
            let e = scene.higgs()?;
            let choice = lift_choice(c);
            let flat = inverse_cartier_with(e, &scene.atlas, &choice)?;
            let mut report = Report::new("inverse Cartier transform");
            report.absorb("input", check_higgs(e));
            report.absorb("output", check_flat(&flat));
            report.absorb("lift choice", lift_cocycle_report(e, &scene.atlas));
            match p_curvature(&flat) {
                Ok(psi) => {
                    let eps = measure_epsilon(e, &psi);
                    match eps.as_i64() {
                        Some(v) => report.note("p-curvature = eps * F*theta", Status::Pass, format!("eps = {v}")),
                        None => report.fail("p-curvature = eps * F*theta", format!("{eps:?}")),
                    }
                }
                Err(err) => report.fail("p-curvature", err.to_string()),
            }
            let out = scene.with_sheaf(
                format!("{}-icartier", scene.name),
                format!("inverse Cartier transform of {}", scene.name),
                Sheaf::Flat(flat),
            );
            Ok(Outcome::Transform(report, out))
        }
        Command::Cartier(_) => {
            let scene = load_scene(c)?;
            let h = scene.flat()?;
            let trace = cartier_traced(h, &scene.atlas, &lift_choice(c), c.degree_bound)?;
            let mut report = trace.report.clone();
            report.title = "Cartier transform".into();
            let out = scene.with_sheaf(
                format!("{}-cartier", scene.name),
                format!("Cartier transform of {}", scene.name),
                Sheaf::Higgs(trace.higgs),
            );
            Ok(Outcome::Transform(report, out))
        }
        Command::Pcurv(_) => {
            let scene = load_scene(c)?;
            let h = scene.flat()?;
            let psi = p_curvature(h)?;
            let mut report = Report::new("p-curvature");
            for (chart, field) in h.atlas().charts().iter().zip(&psi.fields) {
                for (var, m) in chart.vars.names().iter().zip(field.components()) {
                    report.note(format!("{}: psi(d/d{var})", chart.name), Status::Pass, m.to_string());
                }
            }
            let exponent = match psi.exponent() {
                Some(n) => n.to_string(),
                None => "not nilpotent".into(),
            };
            report.note("nilpotency exponent", Status::Pass, exponent);
            let zero = if psi.is_zero() { Status::Pass } else { Status::Skip };
            report.note("p-curvature vanishes", zero, if psi.is_zero() { "yes" } else { "no" });
            report.extend(check_psi_gluing(h, &psi));
            Ok(Outcome::Report(report))
        }
        Command::Roundtrip(_) => {
            let scene = load_scene(c)?;
            let e = scene.higgs()?;
            let rt = roundtrip(e, &Arc::clone(&scene.atlas), c.degree_bound)?;
            let out = scene.with_sheaf(
                format!("{}-roundtrip", scene.name),
                format!("Cartier transform of the inverse Cartier transform of {}", scene.name),
                Sheaf::Higgs(rt.result),
            );
            Ok(Outcome::Transform(rt.report, out))
        }
        Command::Fk(_) => {
            let p = c.p.unwrap_or(3);
            match c.k {
                None => Ok(Outcome::Report(verify_fk_vanishing(&[p]))),
                Some(k) => {
                    let f = symmetrized_f_k(p, k)?;
                    let mut report = Report::new("symmetrized sums F_k vanish mod p");
                    if k == 1 {
                        report.note(format!("p={p} k=1: F_1 recorded"), Status::Skip, format!("F_1 = {f}"));
                    } else {
                        report.check(format!("p={p} k={k}: F_k = 0"), f.is_zero(), || format!("F_{k} = {f}"));
                    }
                    Ok(Outcome::Report(report))
                }
            }
        }
        Command::Taylor(_) => Ok(Outcome::Report(taylor_trials(c.p.unwrap_or(3), c.trials, c.seed))),
        Command::Wilson(_) => match c.p {
            Some(p) => Ok(Outcome::Report(wilson_psi_check(p))),
            None => {
                let mut report = Report::new("Wilson unit check");
                for p in [3, 5, 7, 11, 13] {
                    report.absorb(&format!("p={p}"), wilson_psi_check(p));
                }
                Ok(Outcome::Report(report))
            }
        },
        Command::Gallery { name, .. } => match name {
            Some(n) => Ok(Outcome::Scene(gallery(n, c.p.unwrap_or(3))?)),
            None => Ok(Outcome::Text(GALLERY.iter().map(|g| format!("{g}\n")).collect())),
        },
        Command::VerifyAll(_) => {
            let mut report = Report::new("acceptance suite");
            for criterion in criteria() {
                let r = criterion.run();
                let title = r.title.clone();
                report.absorb(&title, r);
            }
            Ok(Outcome::Report(report))
        }
    }
}
