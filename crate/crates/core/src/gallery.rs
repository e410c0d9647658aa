//! Built-in example scenes.

use std::sync::Arc;

use crate::atlas::standard;
use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::ring::{Matrix, MatrixForm, PrimeContext};
use crate::scene::{Scene, Sheaf};
use crate::sheaves::{FlatSheaf, HiggsSheaf};

/// Gallery item names; some take a parameter after a colon, e.g.
/// `g1_trivial:3` (rank) or `g7_gm_rank1:2` (residue `c`).
pub const GALLERY: &[&str] = &[
    "g1_trivial",
    "g2_a1_rank2",
    "g3_a1_three_lifts",
    "g4_p1_lemma",
    "g5_p1_uniformizing",
    "g6_a2_rank3",
    "g6_a2_rank3_exp3",
    "g7_gm_rank1",
];

fn lifts(list: &[&[&str]]) -> Vec<Vec<String>> {
    list.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect()
}

fn square(atlas: &Atlas, chart: usize, rows: &[&str]) -> Result<Matrix> {
    Matrix::parse_square(atlas.p(), &atlas.chart(chart).vars, rows)
}

fn param(name: &str, param: Option<&str>, default: u64) -> Result<u64> {
    match param {
        None => Ok(default),
        Some(t) => t
            .parse()
            .map_err(|_| Error::UnknownGallery(format!("{name}: parameter `{t}` is not a number"))),
    }
}

fn higgs_scene(name: &str, description: &str, atlas: Atlas, fields: Vec<Vec<Vec<&str>>>, transitions: Vec<Vec<&str>>) -> Result<Scene> {
    let atlas = Arc::new(atlas);
    let rank = (fields[0][0].len() as f64).sqrt() as usize;
    let fields = fields
        .iter()
        .enumerate()
        .map(|(c, comps)| {
            comps
                .iter()
                .map(|m| square(&atlas, c, m))
                .collect::<Result<Vec<_>>>()
                .map(MatrixForm::new)
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = atlas
        .overlaps()
        .iter()
        .zip(&transitions)
        .map(|(o, t)| Matrix::parse_square(atlas.p(), &o.vars, t))
        .collect::<Result<Vec<_>>>()?;
    let e = HiggsSheaf::new(atlas.clone(), rank, fields, transitions)?;
    e.validate()?;
    Ok(Scene {
        name: name.into(),
        description: description.into(),
        atlas,
        sheaf: Some(Sheaf::Higgs(e)),
    })
}

/// Builds gallery item `name` (optionally `name:param`) at the prime `p`.
pub fn gallery(name: &str, p: u64) -> Result<Scene> {
    let ctx = PrimeContext::new(p)?;
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let full = name.to_string();
    match base {
        "g1_trivial" => {
            let r = param(name, arg, 2)? as usize;
            if !(1..=6).contains(&r) {
                return Err(Error::UnknownGallery(format!("{name}: rank must be in 1..=6")));
            }
            let zeros = vec!["0"; r * r];
            higgs_scene(
                &full,
                "affine line, zero Higgs field",
                standard::affine(&ctx, &["t"], &[])?,
                vec![vec![zeros]],
                vec![],
            )
        }
        "g2_a1_rank2" => higgs_scene(
            &full,
            "affine line, rank 2, theta = N dt, lifts t^p and t^p + p t",
            standard::affine(&ctx, &["t"], &lifts(&[&["t^p"], &["t^p + p*t"]]))?,
            vec![vec![vec!["0", "1", "0", "0"]]],
            vec![],
        ),
        "g3_a1_three_lifts" => higgs_scene(
            &full,
            "affine line, rank 2, theta = N dt, lifts t^p, t^p + p t, t^p + p t^2",
            standard::affine(&ctx, &["t"], &lifts(&[&["t^p"], &["t^p + p*t"], &["t^p + p*t^2"]]))?,
            vec![vec![vec!["0", "1", "0", "0"]]],
            vec![],
        ),
        "g4_p1_lemma" => Ok(Scene {
            name: full,
            description: "projective line, lifts s^p and w^p + p w".into(),
            atlas: Arc::new(standard::projective_line(&ctx, "s^p", "w^p + p*w")?),
            sheaf: None,
        }),
        "g5_p1_uniformizing" => higgs_scene(
            &full,
            "projective line, O(-1) + O(1) with the uniformizing Higgs field",
            standard::projective_line(&ctx, "s^p", "w^p + p*w")?,
            vec![vec![vec!["0", "0", "1", "0"]], vec![vec!["0", "0", "-1", "0"]]],
            vec![vec!["s", "0", "0", "s^-1"]],
        ),
        "g6_a2_rank3" => higgs_scene(
            &full,
            "affine plane, rank 3, theta = E12 dt1 + E13 dt2",
            standard::affine(
                &ctx,
                &["t1", "t2"],
                &lifts(&[&["t1^p", "t2^p"], &["t1^p + p*t2", "t2^p + p*t1*t2"]]),
            )?,
            vec![vec![
                vec!["0", "1", "0", "0", "0", "0", "0", "0", "0"],
                vec!["0", "0", "1", "0", "0", "0", "0", "0", "0"],
            ]],
            vec![],
        ),
        "g6_a2_rank3_exp3" => {
            if p < 5 {
                return Err(Error::Precondition(format!("{base} has exponent 3 and needs p >= 5")));
            }
            higgs_scene(
                &full,
                "affine plane, rank 3, theta = J dt1 + J^2 dt2 with J a Jordan block",
                standard::affine(&ctx, &["t1", "t2"], &[])?,
                vec![vec![
                    vec!["0", "1", "0", "0", "0", "1", "0", "0", "0"],
                    vec!["0", "0", "1", "0", "0", "0", "0", "0", "0"],
                ]],
                vec![],
            )
        }
        "g7_gm_rank1" => {
            let c = param(name, arg, 1)?;
            if c >= p {
                return Err(Error::UnknownGallery(format!("{name}: c must be below p")));
            }
            let atlas = Arc::new(standard::torus(&ctx, &[])?);
            let a = square(&atlas, 0, &[format!("{c}*t^-1").as_str()])?;
            let h = FlatSheaf::new(atlas.clone(), 1, vec![MatrixForm::new(vec![a])], vec![])?;
            h.validate()?;
            Ok(Scene {
                name: full,
                description: format!("multiplicative group, d + {c} dt/t"),
                atlas,
                sheaf: Some(Sheaf::Flat(h)),
            })
        }
        _ => Err(Error::UnknownGallery(name.into())),
    }
}
