//! Tuple JSON, cloud CSV with sidecar metadata, SVG scatter plots and
//! atomic file writes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64;
use qrange_core::geometry::{hull_2d, Point2};
use qrange_core::range::{CloudMeta, PointCloud};
use qrange_core::{ComplexMatrix, OperatorTuple};
use serde::{Deserialize, Serialize};

/// `{"n", "d", "matrices"}`: `d` row-major `n×n` arrays of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDoc {
    pub n: usize,
    pub d: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TupleDoc {
    pub fn from_tuple(t: &OperatorTuple) -> Self {
        let n = t.n();
        let matrices = t
            .parts()
            .iter()
            .map(|m| (0..n).map(|i| (0..n).map(|j| m.get(i, j)).map(|c| [c.re, c.im]).collect()).collect())
            .collect();
        Self { n, d: t.d(), matrices }
    }

    pub fn to_tuple(&self) -> Result<OperatorTuple> {
        ensure!(self.n >= 1, "n must be at least 1");
        ensure!(self.d >= 1, "d must be at least 1");
        ensure!(self.matrices.len() == self.d, "expected {} matrices, found {}", self.d, self.matrices.len());
        let mut parts = Vec::with_capacity(self.d);
        for (k, m) in self.matrices.iter().enumerate() {
            ensure!(m.len() == self.n, "matrix {}: expected {} rows, found {}", k + 1, self.n, m.len());
            let mut rows = Vec::with_capacity(self.n);
            for (i, row) in m.iter().enumerate() {
                ensure!(row.len() == self.n, "matrix {}, row {}: expected {} entries, found {}", k + 1, i + 1, self.n, row.len());
                rows.push(row.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
            }
            parts.push(ComplexMatrix::from_rows(&rows).with_context(|| format!("matrix {}", k + 1))?);
        }
        Ok(OperatorTuple::new(parts)?)
    }
}

pub fn parse_tuple(json: &str) -> Result<OperatorTuple> {
    let doc: TupleDoc = serde_json::from_str(json).context("malformed tuple JSON")?;
    doc.to_tuple()
}

pub fn tuple_json(t: &OperatorTuple) -> String {
    serde_json::to_string_pretty(&TupleDoc::from_tuple(t)).expect("tuple serializes")
}

pub fn read_tuple(path: &Path) -> Result<OperatorTuple> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tuple(&text).with_context(|| format!("in {}", path.display()))
}

/// A single matrix stored as a tuple with `d = 1`.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let t = read_tuple(path)?;
    ensure!(t.d() == 1, "{}: expected a single matrix (d = 1), found d = {}", path.display(), t.d());
    Ok(t.part(0).clone())
}

/// Provenance stored next to a cloud CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub n: usize,
    pub d: usize,
    pub q: Complex64,
    pub seed: u64,
    pub count: usize,
    pub generator: String,
}

impl Sidecar {
    pub fn of(cloud: &PointCloud) -> Self {
        let m = &cloud.meta;
        Self {
            n: m.n,
            d: cloud.d,
            q: m.q,
            seed: m.seed,
            count: m.sample_count,
            generator: m.generator.clone(),
        }
    }

    fn meta(&self) -> CloudMeta {
        CloudMeta {
            n: self.n,
            q: self.q,
            seed: self.seed,
            sample_count: self.count,
            generator: self.generator.clone(),
        }
    }
}

/// `cloud.csv` → `cloud.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

pub fn csv_header(d: usize) -> Vec<String> {
    (1..=d).flat_map(|i| [format!("re_{i}"), format!("im_{i}")]).collect()
}

/// Values use the shortest representation that parses back to the same bits.
pub fn cloud_csv(cloud: &PointCloud) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(cloud.d))?;
    for p in &cloud.points {
        w.write_record(p.iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]))?;
    }
    Ok(w.into_inner().context("flushing CSV")?)
}

pub fn parse_cloud_csv(csv_text: &[u8], sidecar: &Sidecar) -> Result<PointCloud> {
    let mut r = csv::Reader::from_reader(csv_text);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    ensure!(header == csv_header(sidecar.d), "CSV header does not match d = {}", sidecar.d);
    let mut points = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().with_context(|| format!("row {}: bad number {s:?}", row + 1)))
            .collect::<Result<_>>()?;
        points.push(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
    }
    ensure!(points.len() == sidecar.count, "sidecar count {} but CSV has {} rows", sidecar.count, points.len());
    Ok(PointCloud::new(sidecar.d, points, sidecar.meta())?)
}

/// Reloads a cloud from its CSV and the sidecar next to it.
pub fn read_cloud(csv_path: &Path) -> Result<PointCloud> {
    let side = sidecar_path(csv_path);
    let meta: Sidecar = serde_json::from_str(&fs::read_to_string(&side).with_context(|| format!("reading {}", side.display()))?)
        .with_context(|| format!("malformed sidecar {}", side.display()))?;
    let data = fs::read(csv_path).with_context(|| format!("reading {}", csv_path.display()))?;
    parse_cloud_csv(&data, &meta)
}

/// Index into the real coordinates `re_1, im_1, …, re_d, im_d`.
pub fn parse_axis(name: &str, d: usize) -> Result<usize> {
    let (part, idx) = name.trim().split_once('_').with_context(|| format!("axis {name:?}: expected re_K or im_K"))?;
    let k: usize = idx.parse().with_context(|| format!("axis {name:?}: bad index"))?;
    ensure!((1..=d).contains(&k), "axis {name:?}: index outside 1..={d}");
    match part {
        "re" => Ok(2 * (k - 1)),
        "im" => Ok(2 * (k - 1) + 1),
        _ => bail!("axis {name:?}: expected re_K or im_K"),
    }
}

fn coordinate(p: &[Complex64], axis: usize) -> f64 {
    let c = p[axis / 2];
    if axis % 2 == 0 {
        c.re
    } else {
        c.im
    }
}

/// Scatter of two real coordinates with the convex hull overlaid: one
/// `<circle>` per point and exactly one `<path>`.
pub fn cloud_svg(cloud: &PointCloud, axes: (usize, usize)) -> Result<String> {
    ensure!(axes.0 < 2 * cloud.d && axes.1 < 2 * cloud.d, "axis outside the cloud's coordinates");
    let pts: Vec<Point2> = cloud.points.iter().map(|p| [coordinate(p, axes.0), coordinate(p, axes.1)]).collect();
    let hull = hull_2d(&pts);
    let (size, pad) = (600.0, 30.0);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let to_px = |p: Point2| {
        let x = pad + (p[0] - lo[0]) / span * (size - 2.0 * pad);
        let y = size - pad - (p[1] - lo[1]) / span * (size - 2.0 * pad);
        (x, y)
    };
    let names = csv_header(cloud.d);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#)?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let m = &cloud.meta;
    writeln!(
        s,
        "<title>{} n={} q={}{:+}i seed={} count={} axes={},{}</title>",
        m.generator, m.n, m.q.re, m.q.im, m.seed, m.sample_count, names[axes.0], names[axes.1]
    )?;
    writeln!(s, r##"<g fill="#1f77b4" fill-opacity="0.5">"##)?;
    for &p in &pts {
        let (x, y) = to_px(p);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#)?;
    }
    writeln!(s, "</g>")?;
    let mut d = String::new();
    for (i, &v) in hull.vertices.iter().enumerate() {
        let (x, y) = to_px(v);
        write!(d, "{}{x:.3} {y:.3} ", if i == 0 { "M" } else { "L" })?;
    }
    d.push('Z');
    writeln!(s, r##"<path d="{d}" fill="none" stroke="#d62728" stroke-width="1.5"/>"##)?;
    writeln!(s, "</svg>")?;
    Ok(s)
}

/// Writes every file through a temporary in the target directory, renaming
/// only after all contents are on disk.
pub fn write_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_names() {
        assert_eq!(parse_axis("re_1", 2).unwrap(), 0);
        assert_eq!(parse_axis("im_2", 2).unwrap(), 3);
        assert!(parse_axis("re_3", 2).is_err());
        assert!(parse_axis("x_1", 2).is_err());
    }

    #[test]
    fn ragged_tuple_rejected() {
        let bad = r#"{"n":2,"d":1,"matrices":[[[[1,0],[0,0]],[[0,0]]]]}"#;
        assert!(parse_tuple(bad).is_err());
        let wrong_d = r#"{"n":1,"d":2,"matrices":[[[[1,0]]]]}"#;
        assert!(parse_tuple(wrong_d).is_err());
        let short_entry = r#"{"n":1,"d":1,"matrices":[[[[1]]]]}"#;
        assert!(parse_tuple(short_entry).is_err());
    }

    #[test]
    fn tuple_round_trip() {
        let t = OperatorTuple::new(vec![
            ComplexMatrix::from_rows(&[vec![Complex64::new(0.1, -2.5), Complex64::new(1e-300, 0.0)], vec![Complex64::new(3.0, 1.0 / 3.0), Complex64::new(-0.0, 7.0)]]).unwrap(),
            ComplexMatrix::identity(2),
        ])
        .unwrap();
        assert_eq!(parse_tuple(&tuple_json(&t)).unwrap(), t);
    }
}
