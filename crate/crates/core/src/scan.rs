//! Separability functional over pair geometries: two evaluation routes,
//! Cartesian-product scans and a deterministic search for the maximum.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::collective::tilde_variance_closed_form;
use crate::error::{Error, Result};
use crate::gaussian::{simon_ppt_functional, EvaluationPath, SeparabilityReport, Verdict};
use crate::greens::{components, default_box_edge, PairGeometry};
use crate::scalar::Scalar;

/// `F + 1/4` from the expanded polynomial in `L⁶` and `L¹²`:
///
/// ```text
/// F + 1/4 = −(L⁶/4π⁴)  [1/(2⁷z⁶) + 1/(2⁷z′⁶) − 1/R⁶]
///           −(L¹²/2⁴π⁸)[1/(2¹²z⁶z′⁶) − 1/(2⁴z²z′²R⁸) − 1/(2⁸z⁴z′⁴R⁴) + 1/R¹²]
/// ```
///
/// Each bracket is evaluated in a factored form that is a sum of
/// non-negative terms, with `R² − 4zz′ = r² + (z − z′)²` carried exactly:
///
/// ```text
/// [quadratic] = (z⁻³ − z′⁻³)²/2⁷ + (R² − 4zz′)(R⁴ + 4zz′R² + 16z²z′²)/(2⁶ z³z′³ R⁶)
/// [quartic]   = (u/16 − v)² (u/16 + v),   u = 1/(z²z′²),  v = 1/R⁴
/// u/16 − v    = (R² − 4zz′)(R² + 4zz′)/(16 z²z′² R⁴)
/// ```
///
/// so both vanish exactly at `r = 0, z = z′` and never change sign through
/// rounding.
pub fn f_excess<T: Scalar>(geom: &PairGeometry<T>) -> T {
    let pi = T::PI();
    let pi4 = (pi * pi) * (pi * pi);
    let (z, w, r) = (geom.z(), geom.zprime(), geom.r());
    let zw = z * w;
    let zw3 = zw * zw * zw;
    let r2 = geom.image_distance_sq();
    let r4 = r2 * r2;
    let r6 = r4 * r2;
    let dz = z - w;
    // R² − 4zz′ without cancellation
    let gap = r * r + dz * dz;
    let four_zw = T::lit(4.0) * zw;
    let l6 = geom.l().powi(6);
    let p = |k: i32| T::lit(2f64.powi(k));

    // z⁻³ − z′⁻³ = (z′ − z)(z² + zz′ + z′²)/(z³z′³)
    let inv_cube_diff = -dz * ((z * z + w * w) + zw) / zw3;
    let quadratic = inv_cube_diff * inv_cube_diff / p(7)
        + gap * (r4 + four_zw * r2 + T::lit(16.0) * zw * zw) / (p(6) * zw3 * r6);

    let u16 = (T::lit(16.0) * zw * zw).recip();
    let v = r4.recip();
    let u16_minus_v = gap * (r2 + four_zw) / (T::lit(16.0) * zw * zw * r4);
    let quartic = u16_minus_v * u16_minus_v * (u16 + v);

    -(l6 / (T::lit(4.0) * pi4)) * quadratic - (l6 * l6 / (p(4) * pi4 * pi4)) * quartic
}

/// Separability functional from the expanded closed form.
pub fn f_expanded<T: Scalar>(geom: &PairGeometry<T>) -> T {
    -T::lit(0.25) + f_excess(geom)
}

/// Separability functional from the smeared variance matrix via block
/// determinants.
pub fn f_detform<T: Scalar>(geom: &PairGeometry<T>) -> Result<T> {
    Ok(report_detform(geom)?.f)
}

pub fn report_detform<T: Scalar>(geom: &PairGeometry<T>) -> Result<SeparabilityReport<T>> {
    simon_ppt_functional(&tilde_variance_closed_form(geom).matrix)
}

/// Report built from closed-form block determinants of the smeared matrix,
/// without forming the matrix.
pub fn report_expanded<T: Scalar>(geom: &PairGeometry<T>) -> SeparabilityReport<T> {
    let c = components(geom);
    let l6 = geom.l().powi(6);
    let det_a = l6 * c.a * c.b;
    let det_b = l6 * c.a_prime * c.b_prime;
    let det_g = l6 * c.c * c.d;
    let det_v = l6 * l6 * (c.a * c.a_prime - c.c * c.c) * (c.b * c.b_prime - c.d * c.d);
    let mut report = SeparabilityReport::from_determinants(det_a, det_b, det_g, det_v, EvaluationPath::ExpandedForm);
    report.f = f_expanded(geom);
    report.verdict = Verdict::from_functional(report.f);
    report
}

/// Candidate box edges for a scan.
#[derive(Debug, Clone, PartialEq)]
pub enum BoxEdges<T> {
    Fixed(Vec<T>),
    /// `L = min(z, z′)/20` per geometry.
    Default,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRange<T> {
    pub r_values: Vec<T>,
    pub z_values: Vec<T>,
    pub zprime_values: Vec<T>,
    pub box_edges: BoxEdges<T>,
}

impl<T: Scalar> ScanRange<T> {
    pub fn single(r: T, z: T, zprime: T, l: T) -> Self {
        Self {
            r_values: vec![r],
            z_values: vec![z],
            zprime_values: vec![zprime],
            box_edges: BoxEdges::Fixed(vec![l]),
        }
    }

    fn product(&self) -> Vec<(T, T, T, Option<T>)> {
        let edges: Vec<Option<T>> = match &self.box_edges {
            BoxEdges::Fixed(v) => v.iter().copied().map(Some).collect(),
            BoxEdges::Default => vec![None],
        };
        let mut out = Vec::new();
        for &r in &self.r_values {
            for &z in &self.z_values {
                for &zp in &self.zprime_values {
                    for &l in &edges {
                        out.push((r, z, zp, l));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord<T> {
    pub geometry: PairGeometry<T>,
    pub f_expanded: T,
    pub f_detform: T,
    pub verdict: Verdict,
    pub max_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome<T> {
    /// Sorted by `(r, z, z′, L)` ascending.
    pub records: Vec<ScanRecord<T>>,
    /// Grid points dropped for violating geometry rules.
    pub skipped: usize,
}

fn geometry_key<T: Scalar>(g: &PairGeometry<T>) -> [T; 4] {
    [g.r(), g.z(), g.zprime(), g.l()]
}

fn compare_keys<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

pub fn evaluate<T: Scalar>(geom: &PairGeometry<T>) -> Result<ScanRecord<T>> {
    let f_detform = f_detform(geom)?;
    Ok(ScanRecord {
        geometry: *geom,
        f_expanded: f_expanded(geom),
        f_detform,
        verdict: Verdict::from_functional(f_detform),
        max_flag: false,
    })
}

/// Evaluates every point of the Cartesian product. Invalid geometries are
/// skipped and counted; the record(s) attaining the largest `F` carry
/// `max_flag`.
pub fn scan<T: Scalar>(ranges: &ScanRange<T>) -> Result<ScanOutcome<T>> {
    let points = ranges.product();
    if points.is_empty() {
        return Err(Error::EmptyScan);
    }
    let evaluated: Vec<Option<ScanRecord<T>>> = points
        .par_iter()
        .map(|&(r, z, zp, l)| {
            let l = l.unwrap_or_else(|| default_box_edge(z, zp));
            PairGeometry::new(r, z, zp, l).ok().and_then(|g| evaluate(&g).ok())
        })
        .collect();
    let skipped = evaluated.iter().filter(|r| r.is_none()).count();
    let mut records: Vec<ScanRecord<T>> = evaluated.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        compare_keys(&geometry_key(&a.geometry), &geometry_key(&b.geometry))
            .then_with(|| b.f_expanded.partial_cmp(&a.f_expanded).unwrap_or(Ordering::Equal))
    });
    let top = records.iter().map(|r| r.f_expanded).fold(T::neg_infinity(), T::max);
    for rec in records.iter_mut().filter(|r| r.f_expanded == top) {
        rec.max_flag = true;
    }
    Ok(ScanOutcome { records, skipped })
}

/// Closed interval `[lo, hi]`; `lo == hi` pins the coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is empty or not finite")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: T) -> Self {
        Self { lo: x, hi: x }
    }

    fn width(&self) -> T {
        self.hi - self.lo
    }

    fn grid(&self, n: usize) -> Vec<T> {
        if self.width() == T::zero() {
            return vec![self.lo];
        }
        let step = self.width() / T::lit((n - 1) as f64);
        (0..n)
            .map(|i| if i + 1 == n { self.hi } else { self.lo + step * T::lit(i as f64) })
            .collect()
    }
}

/// Search region for [`find_max_f`]; the box edge is held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSearchRegion<T> {
    pub r: Interval<T>,
    pub z: Interval<T>,
    pub zprime: Interval<T>,
    pub l: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSearchResult<T> {
    pub geometry: PairGeometry<T>,
    pub f: T,
    /// `F + 1/4` at the argmax.
    pub excess: T,
    pub levels: usize,
}

const GRID_POINTS: usize = 9;
const MAX_REFINEMENT_LEVELS: usize = 200;

/// Nested grid refinement: evaluate a 9-point grid per axis, recentre on the
/// best point with a window of ±1 cell, repeat until every axis window is
/// narrower than `tolerance`.
pub fn find_max_f<T: Scalar>(region: &MaxSearchRegion<T>, tolerance: T) -> Result<MaxSearchResult<T>> {
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} must be > 0")));
    }
    if !(region.z.lo > T::zero()) || !(region.zprime.lo > T::zero()) || !(region.r.lo >= T::zero()) {
        return Err(Error::Geometry("search region needs z, zprime > 0 and r >= 0".into()));
    }
    let mut window = [region.r, region.z, region.zprime];
    let bounds = window;
    for level in 1..=MAX_REFINEMENT_LEVELS {
        let grids: Vec<Vec<T>> = window.iter().map(|w| w.grid(GRID_POINTS)).collect();
        let mut best: Option<(T, PairGeometry<T>)> = None;
        for &r in &grids[0] {
            for &z in &grids[1] {
                for &zp in &grids[2] {
                    let Ok(g) = PairGeometry::new(r, z, zp, region.l) else {
                        continue;
                    };
                    let e = f_excess(&g);
                    if best.map_or(true, |(b, _)| e > b) {
                        best = Some((e, g));
                    }
                }
            }
        }
        let Some((excess, geometry)) = best else {
            return Err(Error::Geometry(
                "no point of the search region admits a valid box of the requested edge".into(),
            ));
        };
        if window.iter().all(|w| w.width() <= tolerance) {
            return Ok(MaxSearchResult {
                geometry,
                f: -T::lit(0.25) + excess,
                excess,
                levels: level,
            });
        }
        let centre = [geometry.r(), geometry.z(), geometry.zprime()];
        for axis in 0..3 {
            let cell = window[axis].width() / T::lit((GRID_POINTS - 1) as f64);
            window[axis] = Interval {
                lo: (centre[axis] - cell).max(bounds[axis].lo),
                hi: (centre[axis] + cell).min(bounds[axis].hi),
            };
        }
    }
    Err(Error::RefinementNonConvergence {
        depth: MAX_REFINEMENT_LEVELS,
        tolerance: tolerance.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn geom(r: f64, z: f64, zp: f64, l: f64) -> PairGeometry<f64> {
        PairGeometry::new(r, z, zp, l).unwrap()
    }

    #[test]
    fn coincidence_gives_exactly_minus_quarter() {
        for l in [0.01, 0.1, 0.5, 1.9] {
            assert_eq!(f_expanded(&geom(0.0, 1.0, 1.0, l)), -0.25);
            assert_eq!(f_excess(&geom(0.0, 1.0, 1.0, l)), 0.0);
        }
        assert!((f_detform(&geom(0.0, 1.0, 1.0, 0.1)).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn far_separation_term_by_term() {
        let g = geom(100.0, 1.0, 1.0, 0.1);
        let pi4 = PI.powi(4);
        let leading = -0.25 - (1e-6 / (4.0 * pi4)) * (2.0 / 128.0);
        let f = f_expanded(&g);
        assert!(f < -0.25);
        // image terms at R ≈ 100 are ~1e-12 of the leading bracket
        assert!((f - leading).abs() < 1e-18, "{f} vs {leading}");
    }

    #[test]
    fn off_coincidence_is_strictly_below() {
        let f = f_detform(&geom(2.0, 1.0, 3.0, 0.1)).unwrap();
        assert!(f < -0.25);
        assert!(f_excess(&geom(2.0, 1.0, 3.0, 0.1)) < 0.0);
    }

    #[test]
    fn expanded_matches_detform_even_for_large_boxes() {
        for (r, z, zp, l) in [(0.3, 1.0, 1.2, 1.9), (0.0, 0.5, 3.0, 0.9), (5.0, 2.0, 2.0, 3.9)] {
            let g = geom(r, z, zp, l);
            let a = f_expanded(&g);
            let b = f_detform(&g).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn expanded_report_determinants_match_matrix_route() {
        let g = geom(0.4, 0.8, 1.7, 0.3);
        let e = report_expanded(&g);
        let d = report_detform(&g).unwrap();
        for (x, y) in [(e.det_a, d.det_a), (e.det_b, d.det_b), (e.det_g, d.det_g), (e.det_v, d.det_v)] {
            assert!((x - y).abs() <= 1e-12 * y.abs(), "{x} vs {y}");
        }
        assert_eq!(e.path, EvaluationPath::ExpandedForm);
        assert_eq!(d.path, EvaluationPath::DeterminantForm);
    }

    #[test]
    fn scan_single_point_is_flagged_maximum() {
        let out = scan(&ScanRange::single(0.0, 1.0, 1.0, 0.1)).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.records[0].f_expanded, -0.25);
        assert!(out.records[0].max_flag);
        assert_eq!(out.records[0].verdict, Verdict::Separable);
    }

    #[test]
    fn scan_grid_is_sorted_and_separable() {
        let range = ScanRange {
            r_values: vec![0.0, 1.0],
            z_values: vec![1.0, 2.0],
            zprime_values: vec![1.0, 2.0],
            box_edges: BoxEdges::Fixed(vec![0.1]),
        };
        let out = scan(&range).unwrap();
        assert_eq!(out.records.len(), 8);
        assert_eq!(out.skipped, 0);
        assert!(out.records.iter().all(|r| r.verdict == Verdict::Separable));
        assert!(out.records.iter().all(|r| r.f_expanded <= -0.25 + 1e-12));
        assert!(out.records.windows(2).all(|w| {
            compare_keys(&geometry_key(&w[0].geometry), &geometry_key(&w[1].geometry)) == Ordering::Less
        }));
        // (0,1,1) and (0,2,2) both sit exactly at −1/4
        assert_eq!(out.records.iter().filter(|r| r.max_flag).count(), 2);
    }

    #[test]
    fn scan_skips_invalid_and_rejects_empty() {
        let range = ScanRange {
            r_values: vec![0.0],
            z_values: vec![0.01, 1.0],
            zprime_values: vec![1.0],
            box_edges: BoxEdges::Fixed(vec![0.1]),
        };
        let out = scan(&range).unwrap();
        assert_eq!((out.records.len(), out.skipped), (1, 1));
        let empty = ScanRange::<f64> {
            r_values: vec![],
            z_values: vec![1.0],
            zprime_values: vec![1.0],
            box_edges: BoxEdges::Default,
        };
        assert!(matches!(scan(&empty), Err(Error::EmptyScan)));
    }

    #[test]
    fn find_max_locates_coincidence_ridge() {
        let region = MaxSearchRegion {
            r: Interval::new(0.0f64, 2.0).unwrap(),
            z: Interval::new(0.5, 2.0).unwrap(),
            zprime: Interval::new(0.5, 2.0).unwrap(),
            l: 0.1,
        };
        let res = find_max_f(&region, 1e-9).unwrap();
        assert!((res.f + 0.25).abs() <= 1e-9);
        assert!(res.geometry.r() <= 1e-9);
        assert!((res.geometry.z() - res.geometry.zprime()).abs() <= 1e-9);
    }

    #[test]
    fn find_max_off_coincidence_and_degenerate() {
        let region = MaxSearchRegion {
            r: Interval::new(0.0, 1.0).unwrap(),
            z: Interval::point(1.0),
            zprime: Interval::new(2.0, 3.0).unwrap(),
            l: 0.1,
        };
        let res = find_max_f(&region, 1e-8).unwrap();
        assert!(res.f < -0.25);
        assert_eq!(res.geometry.zprime(), 2.0);
        assert_eq!(res.geometry.r(), 0.0);

        let point = MaxSearchRegion {
            r: Interval::point(0.5),
            z: Interval::point(1.0),
            zprime: Interval::point(1.5),
            l: 0.1,
        };
        let res = find_max_f(&point, 1e-6).unwrap();
        assert_eq!(res.geometry, geom(0.5, 1.0, 1.5, 0.1));
        assert_eq!(res.levels, 1);
    }
}
