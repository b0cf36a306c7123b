//! Hulls, nearest-point distances, Hausdorff distance and the midpoint
//! convexity defect. Points of `ℂ^d` are measured in `ℝ^{2d}`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Seed;
use crate::range::{to_real, PointCloud};
use crate::sampler::pair_rng;

/// Cross-product tolerance for collinearity.
pub const COLLINEAR_TOL: f64 = 1e-12;

pub type Point2 = [f64; 2];

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2D {
    pub vertices: Vec<Point2>,
}

impl Polygon2D {
    /// Smallest signed distance to the edge lines; `≥ 0` inside. Degenerate
    /// polygons (point, segment) return minus the distance to the set.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::NEG_INFINITY,
            1 => -dist2(v[0], p),
            2 => -segment_distance(v[0], v[1], p),
            n => {
                let mut inside = f64::INFINITY;
                for i in 0..n {
                    let a = v[i];
                    let b = v[(i + 1) % n];
                    let len = dist2(a, b);
                    inside = inside.min(cross(a, b, p) / len);
                }
                if inside >= 0.0 {
                    inside
                } else {
                    let outside = (0..n)
                        .map(|i| segment_distance(v[i], v[(i + 1) % n], p))
                        .fold(f64::INFINITY, f64::min);
                    -outside
                }
            }
        }
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.signed_distance(p) >= -tol
    }

    pub fn max_modulus(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
            .fold(0.0, f64::max)
    }
}

fn dist2(a: Point2, b: Point2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn segment_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist2(a, p);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist2([a[0] + t * ab[0], a[1] + t * ab[1]], p)
}

/// Andrew's monotone chain.
pub fn hull_2d(points: &[Point2]) -> Polygon2D {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Polygon2D { vertices: pts };
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_TOL {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= COLLINEAR_TOL {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Polygon2D { vertices: hull }
}

/// Planar points of a `d = 1` cloud.
pub fn planar(cloud: &PointCloud) -> Vec<Point2> {
    cloud.points.iter().map(|p| [p[0].re, p[0].im]).collect()
}

const LEAF: usize = 8;

/// Static k-d tree over points of `ℝ^k`.
#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    split: Vec<usize>,
}

impl KdTree {
    pub fn new(points: &[Vec<f64>]) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let mut idx: Vec<usize> = (0..points.len()).collect();
        let mut split = alloc::vec![0; points.len()];
        build(points, &mut idx, 0, &mut split, dim);
        let coords = idx.iter().flat_map(|&i| points[i].iter().copied()).collect();
        Self { dim, coords, split }
    }

    pub fn len(&self) -> usize {
        self.split.len()
    }

    pub fn is_empty(&self) -> bool {
        self.split.is_empty()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Distance from `p` to the nearest stored point.
    pub fn nearest(&self, p: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        self.search(p, 0, self.len(), &mut best);
        best.sqrt()
    }

    fn search(&self, p: &[f64], lo: usize, hi: usize, best: &mut f64) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                *best = best.min(sq_dist(self.point(i), p));
            }
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let axis = self.split[mid];
        *best = best.min(sq_dist(self.point(mid), p));
        let diff = p[axis] - self.point(mid)[axis];
        let (first, second) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(p, first.0, first.1, best);
        if diff * diff < *best {
            self.search(p, second.0, second.1, best);
        }
    }
}

fn build(points: &[Vec<f64>], idx: &mut [usize], offset: usize, split: &mut [usize], dim: usize) {
    if idx.len() <= LEAF || dim == 0 {
        return;
    }
    let axis = (0..dim)
        .map(|k| {
            let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(points[i][k]), hi.max(points[i][k]))
            });
            (k, hi - lo)
        })
        .fold((0, -1.0), |acc, (k, s)| if s > acc.1 { (k, s) } else { acc })
        .0;
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| points[a][axis].total_cmp(&points[b][axis]));
    split[offset + mid] = axis;
    let (left, rest) = idx.split_at_mut(mid);
    build(points, left, offset, split, dim);
    build(points, &mut rest[1..], offset + mid + 1, split, dim);
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Distance from `p` to the nearest cloud point.
pub fn min_distance(cloud: &PointCloud, p: &[Complex64]) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::InvalidArgument("empty cloud".into()));
    }
    if p.len() != cloud.d {
        return Err(Error::DimensionMismatch {
            expected: cloud.d,
            found: p.len(),
        });
    }
    let target = to_real(p);
    Ok(cloud
        .points
        .iter()
        .map(|q| sq_dist(&to_real(q), &target))
        .fold(f64::INFINITY, f64::min)
        .sqrt())
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            found: b.d,
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty cloud".into()));
    }
    let ra = a.real_coords();
    let rb = b.real_coords();
    let ta = KdTree::new(&ra);
    let tb = KdTree::new(&rb);
    let one = ra.iter().map(|p| tb.nearest(p)).fold(0.0, f64::max);
    let two = rb.iter().map(|p| ta.nearest(p)).fold(0.0, f64::max);
    Ok(one.max(two))
}

/// Largest pairwise distance, pruned by distances to the centroid.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let Some(first) = points.first() else {
        return 0.0;
    };
    let k = first.len();
    let mut c = alloc::vec![0.0; k];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    for ci in &mut c {
        *ci /= points.len() as f64;
    }
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (sq_dist(p, &c).sqrt(), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: f64 = 0.0;
    for (a, &(ra, i)) in order.iter().enumerate() {
        if 2.0 * ra <= best {
            break;
        }
        for &(rb, j) in &order[a + 1..] {
            if ra + rb <= best {
                break;
            }
            best = best.max(sq_dist(&points[i], &points[j]).sqrt());
        }
    }
    best
}

/// Distance from the midpoint of `a` and `b` to the cloud.
pub fn midpoint_gap(cloud: &PointCloud, a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let mid: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| (x + y) * 0.5).collect();
    min_distance(cloud, &mid)
}

/// Max over `pair_count` random pairs of distinct points of the distance
/// from their midpoint to the cloud, divided by the cloud diameter.
pub fn convexity_defect(cloud: &PointCloud, pair_count: usize, seed: Seed) -> Result<f64> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::InvalidArgument("convexity defect needs at least two points".into()));
    }
    let real = cloud.real_coords();
    let diam = diameter(&real);
    if diam == 0.0 {
        return Ok(0.0);
    }
    let tree = KdTree::new(&real);
    let mut rng = pair_rng(seed, u64::MAX);
    let mut worst: f64 = 0.0;
    for _ in 0..pair_count {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mid: Vec<f64> = real[i].iter().zip(&real[j]).map(|(a, b)| 0.5 * (a + b)).collect();
        worst = worst.max(tree.nearest(&mid));
    }
    Ok(worst / diam)
}

/// The defect restricted to explicit point pairs (which need not belong to
/// the cloud), normalized by the cloud diameter.
pub fn convexity_defect_with_pairs(cloud: &PointCloud, pairs: &[(Vec<Complex64>, Vec<Complex64>)]) -> Result<f64> {
    let diam = diameter(&cloud.real_coords());
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        worst = worst.max(midpoint_gap(cloud, a, b)?);
    }
    Ok(if diam > 0.0 { worst / diam } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{c, ComplexMatrix, FieldMode, QParam};
    use crate::range::cloud_single;
    use alloc::vec;
    use rand::SeedableRng;

    fn cloud1(pts: &[Complex64]) -> PointCloud {
        PointCloud::from_points(1, pts.iter().map(|&p| vec![p]).collect()).unwrap()
    }

    #[test]
    fn hull_examples() {
        assert_eq!(hull_2d(&[[0.3, 0.4]]).vertices, vec![[0.3, 0.4]]);
        let sq = hull_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]]);
        assert_eq!(sq.vertices.len(), 4);
        let area: f64 = (0..4)
            .map(|i| {
                let a = sq.vertices[i];
                let b = sq.vertices[(i + 1) % 4];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        assert!(area > 0.0, "counterclockwise");
        assert!(sq.contains([0.5, 0.5], 0.0));
        assert!(!sq.contains([1.5, 0.5], 1e-12));
    }

    #[test]
    fn hull_of_diag_range() {
        let cl = cloud_single(&ComplexMatrix::real_diag(&[1.0, 0.0]), QParam::real(0.5).unwrap(), 10_000, Seed(3), FieldMode::Complex).unwrap();
        let h = hull_2d(&planar(&cl));
        assert!(h.max_modulus() <= 0.75 + 1e-3);
        assert!(planar(&cl).iter().all(|&p| h.signed_distance(p) >= -1e-12));
        let again = hull_2d(&h.vertices);
        assert_eq!(again.vertices.len(), h.vertices.len());
    }

    #[test]
    fn distances() {
        let cl = cloud1(&[c(0.0, 0.0)]);
        assert_eq!(min_distance(&cl, &[c(1.0, 0.0)]).unwrap(), 1.0);
        assert_eq!(min_distance(&cl, &[c(0.0, 0.0)]).unwrap(), 0.0);
        let a = cloud1(&[c(0.0, 0.0)]);
        let b = cloud1(&[c(1.0, 0.0)]);
        assert_eq!(hausdorff(&a, &b).unwrap(), 1.0);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let two = PointCloud::from_points(2, vec![vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(hausdorff(&a, &two).is_err());
    }

    #[test]
    fn kd_tree_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for dim in [2usize, 4, 6] {
            let pts: Vec<Vec<f64>> = (0..500).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
            let tree = KdTree::new(&pts);
            for _ in 0..200 {
                let q: Vec<f64> = (0..dim).map(|_| 1.5 * rng.random::<f64>() - 0.25).collect();
                let brute = pts.iter().map(|p| sq_dist(p, &q)).fold(f64::INFINITY, f64::min).sqrt();
                assert!((tree.nearest(&q) - brute).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diameter_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Vec<f64>> = (0..300).map(|_| (0..4).map(|_| rng.random::<f64>()).collect()).collect();
        let mut brute: f64 = 0.0;
        for i in 0..pts.len() {
            for j in 0..i {
                brute = brute.max(sq_dist(&pts[i], &pts[j]).sqrt());
            }
        }
        assert!((diameter(&pts) - brute).abs() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        let two = cloud1(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((convexity_defect(&two, 10, Seed(0)).unwrap() - 0.5).abs() < 1e-15);
        let seg: Vec<Complex64> = (0..=2000).map(|k| c(k as f64 / 2000.0, 0.0)).collect();
        assert!(convexity_defect(&cloud1(&seg), 1000, Seed(0)).unwrap() < 1e-3);
    }
}
