//! Point-cloud files and JSON configuration records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::compact_sets::{Point, PointCloudSet};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::null_lagrangian::{
    build_from_generators, Curve, Generators, SeparableLagrangian, STATE_VARS,
};
use crate::numerics::{AxisBox, Grid};
use crate::secant_geometry::{CoefficientSequence, GraphSpec};

/// Sidecar record written next to every point-cloud CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dim: usize,
    #[serde(rename = "box")]
    pub domain: AxisBox,
    pub h: f64,
    pub count: usize,
}

/// `points.csv` → `points.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn write_point_cloud_csv<W: std::io::Write>(set: &PointCloudSet, out: W) -> Result<()> {
    let dim = set.dim();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&["x", "y", "z"][..dim])?;
    for p in set.points() {
        w.write_record(p[..dim].iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSV and its manifest; returns the manifest path.
pub fn write_point_cloud(set: &PointCloudSet, csv_path: &Path) -> Result<PathBuf> {
    write_point_cloud_csv(set, fs::File::create(csv_path)?)?;
    let manifest = Manifest {
        dim: set.dim(),
        domain: set.domain().clone(),
        h: set.resolution(),
        count: set.len(),
    };
    let path = manifest_path(csv_path);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

pub fn read_point_cloud(csv_path: &Path) -> Result<PointCloudSet> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(manifest_path(csv_path))?)?;
    if manifest.domain.dim() != manifest.dim {
        return Err(Error::DimensionMismatch {
            expected: manifest.dim,
            got: manifest.domain.dim(),
        });
    }
    let mut r = csv::Reader::from_path(csv_path)?;
    let expected = &["x", "y", "z"][..manifest.dim.min(3)];
    let headers = r.headers()?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Io(format!(
            "expected CSV header {}, got {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut p: Point = [0.0; 3];
        for (i, field) in rec.iter().enumerate() {
            p[i] = field.trim().parse().map_err(|_| {
                Error::Io(format!(
                    "bad coordinate `{field}` on CSV line {}",
                    rec.position().map_or(0, |p| p.line())
                ))
            })?;
        }
        points.push(p);
    }
    if points.len() != manifest.count {
        return Err(Error::Io(format!(
            "manifest lists {} points, CSV has {}",
            manifest.count,
            points.len()
        )));
    }
    PointCloudSet::new(manifest.domain, manifest.h, points)
}

fn default_box(dim: usize) -> Result<AxisBox> {
    AxisBox::cube(dim, -1.0, 1.0)
}

/// Graph `f` over a box with a base point; the box defaults to `[-1, 1]^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub f: String,
    #[serde(rename = "box", default)]
    pub domain: Option<AxisBox>,
    pub base: Vec<f64>,
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<GraphSpec> {
        let domain = match &self.domain {
            Some(d) => d.clone(),
            None => default_box(self.base.len())?,
        };
        GraphSpec::parse(domain, &self.f, self.base.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecantConfig {
    #[serde(flatten)]
    pub surface: SurfaceConfig,
    /// Defaults to the tangent coefficients.
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimsupConfig {
    #[serde(flatten)]
    pub surface: SurfaceConfig,
    pub sequence: CoefficientSequence,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub tail_fraction: Option<f64>,
}

pub fn grid_for(spec: &GraphSpec, points_per_axis: usize) -> Result<Grid> {
    Grid::new(spec.domain().clone(), points_per_axis)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    #[serde(default = "zero")]
    pub f: String,
    #[serde(default = "zero")]
    pub g: String,
    #[serde(default = "zero")]
    pub h: String,
}

fn zero() -> String {
    "0".into()
}

/// Either `{"generators": {...}}`, `{"P", "Q1", "Q2", "Q3"}` or the split
/// form `{"P1", "P2", "P3", "Q1", "Q2", "Q3"}`; missing `Q`s are zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<GeneratorConfig>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(rename = "P1", default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    #[serde(rename = "P2", default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<String>,
    #[serde(rename = "P3", default, skip_serializing_if = "Option::is_none")]
    pub p3: Option<String>,
    #[serde(rename = "Q1", default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<String>,
    #[serde(rename = "Q2", default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<String>,
    #[serde(rename = "Q3", default, skip_serializing_if = "Option::is_none")]
    pub q3: Option<String>,
}

impl LagrangianConfig {
    pub fn build(&self) -> Result<SeparableLagrangian> {
        let split = self.p1.is_some() || self.p2.is_some() || self.p3.is_some();
        let explicit =
            self.p.is_some() || self.q1.is_some() || self.q2.is_some() || self.q3.is_some();
        match (&self.generators, explicit || split) {
            (Some(g), false) => build_from_generators(Generators::parse(&g.f, &g.g, &g.h)?),
            (Some(_), true) => Err(Error::Precondition(
                "give either generators or P/Q components, not both".into(),
            )),
            (None, false) => Err(Error::Precondition(
                "Lagrangian config needs generators or P/Q components".into(),
            )),
            (None, true) => {
                if split && self.p.is_some() {
                    return Err(Error::Precondition(
                        "give either P or P1/P2/P3, not both".into(),
                    ));
                }
                let text = |s: &Option<String>| s.clone().unwrap_or_else(zero);
                let parse = |s: &Option<String>, vars: &[&str]| Expression::parse(&text(s), vars);
                let q = [
                    parse(&self.q1, &["t", "x"])?,
                    parse(&self.q2, &["t", "y"])?,
                    parse(&self.q3, &["t", "z"])?,
                ];
                if split {
                    let p = [
                        parse(&self.p1, &["t", "x"])?,
                        parse(&self.p2, &["t", "y"])?,
                        parse(&self.p3, &["t", "z"])?,
                    ];
                    SeparableLagrangian::from_split([&p[0], &p[1], &p[2]], [&q[0], &q[1], &q[2]])
                } else {
                    SeparableLagrangian::new(&parse(&self.p, &STATE_VARS)?, &q[0], &q[1], &q[2])
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(default = "zero")]
    pub x: String,
    #[serde(default = "zero")]
    pub y: String,
    #[serde(default = "zero")]
    pub z: String,
    pub a: f64,
    pub b: f64,
}

impl CurveConfig {
    pub fn build(&self) -> Result<Curve> {
        Curve::parse(&self.x, &self.y, &self.z, self.a, self.b)
    }
}

/// Sample box over `(t, x, y, z)` for exactness checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(rename = "box")]
    pub domain: AxisBox,
    pub points_per_axis: usize,
}

impl SampleConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.domain.clone(), self.points_per_axis)
    }
}
