//! JSON scenes: an atlas with lifts and optionally a Higgs or flat sheaf.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::atlas::{Atlas, Chart, FrobLift, Overlap, OverlapSide, Side};
use crate::error::{Error, Result};
use crate::ring::{LaurentPoly2, Matrix, MatrixForm, PrimeContext, VarSpec};
use crate::sheaves::{check_flat, check_higgs, overlap_name, FlatSheaf, HiggsSheaf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sheaf {
    Higgs(HiggsSheaf),
    Flat(FlatSheaf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub name: String,
    pub description: String,
    pub atlas: Arc<Atlas>,
    pub sheaf: Option<Sheaf>,
}

impl Scene {
    pub fn p(&self) -> u64 {
        self.atlas.p()
    }

    pub fn higgs(&self) -> Result<&HiggsSheaf> {
        match &self.sheaf {
            Some(Sheaf::Higgs(e)) => Ok(e),
            _ => Err(Error::Scene(format!("scene `{}` has no Higgs sheaf", self.name))),
        }
    }

    pub fn flat(&self) -> Result<&FlatSheaf> {
        match &self.sheaf {
            Some(Sheaf::Flat(h)) => Ok(h),
            _ => Err(Error::Scene(format!("scene `{}` has no flat sheaf", self.name))),
        }
    }

    pub fn with_sheaf(&self, name: impl Into<String>, description: impl Into<String>, sheaf: Sheaf) -> Scene {
        Scene {
            name: name.into(),
            description: description.into(),
            atlas: self.atlas.clone(),
            sheaf: Some(sheaf),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneJson {
    #[serde(default)]
    name: String,
    #[serde(default)]
    description: String,
    p: u64,
    atlas: AtlasJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sheaf: Option<SheafJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtlasJson {
    charts: Vec<ChartJson>,
    #[serde(default)]
    overlaps: Vec<OverlapJson>,
    lifts: Vec<LiftJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartJson {
    name: String,
    vars: Vec<String>,
    #[serde(default)]
    inverted: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverlapJson {
    alpha: String,
    beta: String,
    vars: Vec<String>,
    #[serde(default)]
    inverted: Vec<String>,
    alpha_coords: BTreeMap<String, String>,
    beta_coords: BTreeMap<String, String>,
    alpha_inverse: InverseJson,
    beta_inverse: InverseJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InverseJson {
    #[serde(default)]
    inverted: Vec<String>,
    map: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LiftJson {
    chart: String,
    images: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum KindJson {
    Higgs,
    Flat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheafJson {
    kind: KindJson,
    rank: usize,
    charts: BTreeMap<String, Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    transitions: BTreeMap<String, Vec<Vec<String>>>,
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scene(format!("{path}: {e}")))
}

fn lookup<'a>(map: &'a BTreeMap<String, String>, key: &str, path: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Scene(format!("{path}: missing entry for `{key}`")))
}

fn exact_keys(map: &BTreeMap<String, String>, names: &[String], path: &str) -> Result<()> {
    if let Some(extra) = map.keys().find(|k| !names.contains(k)) {
        return Err(Error::Scene(format!("{path}: unknown variable `{extra}`")));
    }
    Ok(())
}

pub fn parse_scene(text: &str) -> Result<Scene> {
    let json: SceneJson = serde_json::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
    let ctx = at("p", PrimeContext::new(json.p))?;
    let p = ctx.p();
    let mut charts = Vec::new();
    for (i, c) in json.atlas.charts.iter().enumerate() {
        let vars = at(&format!("atlas.charts[{i}]"), VarSpec::new(&c.vars, &c.inverted))?;
        charts.push(Chart {
            name: c.name.clone(),
            vars,
        });
    }
    let chart_index = |name: &str, path: &str| {
        charts
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Scene(format!("{path}: unknown chart `{name}`")))
    };
    let mut overlaps = Vec::new();
    for (i, o) in json.atlas.overlaps.iter().enumerate() {
        let path = format!("atlas.overlaps[{i}]");
        let vars = at(&path, VarSpec::new(&o.vars, &o.inverted))?;
        let mut sides = Vec::new();
        for (label, chart_name, coords, inverse) in [
            ("alpha", &o.alpha, &o.alpha_coords, &o.alpha_inverse),
            ("beta", &o.beta, &o.beta_coords, &o.beta_inverse),
        ] {
            let ci = chart_index(chart_name, &format!("{path}.{label}"))?;
            let chart = &charts[ci];
            let cpath = format!("{path}.{label}_coords");
            exact_keys(coords, chart.vars.names(), &cpath)?;
            let coords = chart
                .vars
                .names()
                .iter()
                .map(|n| {
                    let text = lookup(coords, n, &cpath)?;
                    at(&format!("{cpath}.{n}"), LaurentPoly2::parse(text, p, &vars))
                })
                .collect::<Result<Vec<_>>>()?;
            let ipath = format!("{path}.{label}_inverse");
            let local_vars = at(&ipath, VarSpec::new(chart.vars.names(), &inverse.inverted))?;
            exact_keys(&inverse.map, vars.names(), &format!("{ipath}.map"))?;
            let inv = vars
                .names()
                .iter()
                .map(|n| {
                    let text = lookup(&inverse.map, n, &format!("{ipath}.map"))?;
                    at(&format!("{ipath}.map.{n}"), LaurentPoly2::parse(text, p, &local_vars))
                })
                .collect::<Result<Vec<_>>>()?;
            sides.push(OverlapSide {
                chart: ci,
                coords,
                local_vars,
                inverse: inv,
            });
        }
        let beta = sides.pop().expect("two sides");
        let alpha = sides.pop().expect("two sides");
        overlaps.push(at(&path, Overlap::new(p, &charts, vars, alpha, beta))?);
    }
    let mut lifts = Vec::new();
    for (i, l) in json.atlas.lifts.iter().enumerate() {
        let path = format!("atlas.lifts[{i}]");
        let ci = chart_index(&l.chart, &path)?;
        let vars = &charts[ci].vars;
        exact_keys(&l.images, vars.names(), &format!("{path}.images"))?;
        let images = vars
            .names()
            .iter()
            .map(|n| {
                let text = lookup(&l.images, n, &format!("{path}.images"))?;
                at(&format!("{path}.images.{n}"), LaurentPoly2::parse(text, p, vars))
            })
            .collect::<Result<Vec<_>>>()?;
        lifts.push(FrobLift { chart: ci, images });
    }
    let atlas = Arc::new(at("atlas", Atlas::new(ctx, charts, overlaps, lifts))?);
    let sheaf = match json.sheaf {
        None => None,
        Some(s) => Some(parse_sheaf(&atlas, s)?),
    };
    Ok(Scene {
        name: json.name,
        description: json.description,
        atlas,
        sheaf,
    })
}

fn parse_matrix(p: u64, vars: &Arc<VarSpec>, rank: usize, rows: &[Vec<String>], path: &str) -> Result<Matrix> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        return Err(Error::Scene(format!("{path}: expected a {rank}x{rank} matrix")));
    }
    let flat: Vec<&str> = rows.iter().flatten().map(String::as_str).collect();
    at(path, Matrix::parse(p, vars, rank, rank, &flat))
}

fn parse_sheaf(atlas: &Arc<Atlas>, s: SheafJson) -> Result<Sheaf> {
    let p = atlas.p();
    if let Some(extra) = s.charts.keys().find(|k| atlas.chart_index(k).is_none()) {
        return Err(Error::Scene(format!("sheaf.charts: unknown chart `{extra}`")));
    }
    let mut fields = Vec::new();
    for chart in atlas.charts() {
        let path = format!("sheaf.charts.{}", chart.name);
        let comps = s
            .charts
            .get(&chart.name)
            .ok_or_else(|| Error::Scene(format!("{path}: missing")))?;
        if comps.len() != chart.vars.len() {
            return Err(Error::Scene(format!(
                "{path}: expected {} matrices, one per coordinate",
                chart.vars.len()
            )));
        }
        let mats = comps
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(p, &chart.vars, s.rank, m, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        fields.push(MatrixForm::new(mats));
    }
    let mut transitions = Vec::new();
    for o in atlas.overlaps() {
        let key = overlap_name(atlas, o);
        let path = format!("sheaf.transitions.{key}");
        let m = s
            .transitions
            .get(&key)
            .ok_or_else(|| Error::Scene(format!("{path}: missing")))?;
        transitions.push(parse_matrix(p, &o.vars, s.rank, m, &path)?);
    }
    if let Some(extra) = s
        .transitions
        .keys()
        .find(|k| !atlas.overlaps().iter().any(|o| &overlap_name(atlas, o) == *k))
    {
        return Err(Error::Scene(format!("sheaf.transitions: unknown overlap `{extra}`")));
    }
    let report = match s.kind {
        KindJson::Higgs => {
            let e = at("sheaf", HiggsSheaf::new(atlas.clone(), s.rank, fields, transitions))?;
            let r = check_higgs(&e);
            if r.is_pass() {
                return Ok(Sheaf::Higgs(e));
            }
            r
        }
        KindJson::Flat => {
            let h = at("sheaf", FlatSheaf::new(atlas.clone(), s.rank, fields, transitions))?;
            let r = check_flat(&h);
            if r.is_pass() {
                return Ok(Sheaf::Flat(h));
            }
            r
        }
    };
    let f = report.failures().next().expect("failing report");
    Err(Error::Scene(format!(
        "sheaf: {} failed: {}",
        f.check,
        f.witness.as_deref().unwrap_or("")
    )))
}

fn names_map<C: crate::ring::Coefficients>(names: &[String], polys: &[crate::ring::Laurent<C>]) -> BTreeMap<String, String> {
    names.iter().cloned().zip(polys.iter().map(|f| f.to_string())).collect()
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

pub fn emit_scene(scene: &Scene) -> String {
    let atlas = &scene.atlas;
    let charts = atlas
        .charts()
        .iter()
        .map(|c| ChartJson {
            name: c.name.clone(),
            vars: c.vars.names().to_vec(),
            inverted: c.vars.inverted_names(),
        })
        .collect();
    let overlaps = atlas
        .overlaps()
        .iter()
        .map(|o| {
            let side_json = |side: Side| {
                let s = o.side(side);
                let chart = atlas.chart(s.chart);
                (
                    chart.name.clone(),
                    names_map(chart.vars.names(), &s.coords),
                    InverseJson {
                        inverted: s.local_vars.inverted_names(),
                        map: names_map(o.vars.names(), &s.inverse),
                    },
                )
            };
            let (alpha, alpha_coords, alpha_inverse) = side_json(Side::Alpha);
            let (beta, beta_coords, beta_inverse) = side_json(Side::Beta);
            OverlapJson {
                alpha,
                beta,
                vars: o.vars.names().to_vec(),
                inverted: o.vars.inverted_names(),
                alpha_coords,
                beta_coords,
                alpha_inverse,
                beta_inverse,
            }
        })
        .collect();
    let lifts = atlas
        .lifts()
        .iter()
        .map(|l| {
            let chart = atlas.chart(l.chart);
            LiftJson {
                chart: chart.name.clone(),
                images: names_map(chart.vars.names(), &l.images),
            }
        })
        .collect();
    let sheaf = scene.sheaf.as_ref().map(|s| {
        let (kind, data) = match s {
            Sheaf::Higgs(e) => (KindJson::Higgs, e.data()),
            Sheaf::Flat(h) => (KindJson::Flat, h.data()),
        };
        SheafJson {
            kind,
            rank: data.rank,
            charts: atlas
                .charts()
                .iter()
                .zip(&data.fields)
                .map(|(c, f)| (c.name.clone(), f.components().iter().map(matrix_rows).collect()))
                .collect(),
            transitions: atlas
                .overlaps()
                .iter()
                .zip(&data.transitions)
                .map(|(o, t)| (overlap_name(atlas, o), matrix_rows(t)))
                .collect(),
        }
    });
    let json = SceneJson {
        name: scene.name.clone(),
        description: scene.description.clone(),
        p: atlas.p(),
        atlas: AtlasJson {
            charts,
            overlaps,
            lifts,
        },
        sheaf,
    };
    let mut out = serde_json::to_string_pretty(&json).expect("scene serializes");
    out.push('\n');
    out
}
