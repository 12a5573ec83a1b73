//! Exact two-strand geometry: the pillowcase coordinates of the quotient, the
//! graph lines of the torus braids, an exact rational oracle for their signed
//! intersections with the diagonal, and SVG figure emission.
//!
//! The quotient of the two-strand constraint space is parameterized by
//! (theta, psi) on [0, pi] x (-pi, pi] via the conjugation normal form
//!
//! ```text
//! X1 = i e^{-k theta},  X2 = i,  Y1 = i e^{-k psi},  Y2 = i e^{-k (psi - theta)}
//! ```
//!
//! with the four reducible corner points removed.

use crate::action::{product_holonomy, RepTuple};
use crate::quat::{conjugate_by, exp_so3, Quaternion, SpherePoint, Vec3};
use num_rational::Rational64;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PillowcaseError {
    #[error("expected two-strand tuples, got {x} and {y}")]
    WrongArity { x: usize, y: usize },
    #[error("product constraint violated: defect {defect:.3e}")]
    ProductMismatch { defect: f64 },
    #[error("tuple is reducible; conjugation normal form is not defined")]
    Reducible,
    #[error("line with slope 1 is parallel to the diagonal")]
    NonTransverse,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A point of the pillowcase; corners are the reducible locus.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PillowcasePoint {
    pub theta: f64,
    pub psi: f64,
}

impl PillowcasePoint {
    pub fn new(theta: f64, psi: f64) -> Self {
        PillowcasePoint { theta, psi }
    }

    /// True within `tol` of one of the four reducible corners (0,0), (pi,0),
    /// (0,pi), (pi,pi), with psi = -pi identified with psi = pi.
    pub fn is_corner(&self, tol: f64) -> bool {
        let near_theta = self.theta.abs() <= tol || (self.theta - PI).abs() <= tol;
        let near_psi =
            self.psi.abs() <= tol || (self.psi - PI).abs() <= tol || (self.psi + PI).abs() <= tol;
        near_theta && near_psi
    }
}

/// The line psi = slope * theta + intercept (mod 2 pi), with the intercept a
/// rational multiple of pi.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct PillowLine {
    pub slope: i64,
    /// Intercept divided by pi.
    pub intercept_over_pi: Rational64,
}

/// Graph line of the signed action of sigma_1^{2k}: psi = (2k+1) theta - pi.
pub fn graph_line(k: u32) -> PillowLine {
    PillowLine {
        slope: 2 * k as i64 + 1,
        intercept_over_pi: Rational64::from_integer(-1),
    }
}

fn wrap_psi(psi: f64) -> f64 {
    // into (-pi, pi]
    let mut p = psi.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Normal form of an irreducible constrained pair: conjugate so that X2 = i
/// and X1 lies in the i-j plane with nonnegative j component, then read
/// (theta, psi) off X1 and Y1.
pub fn to_pillowcase(x: &RepTuple, y: &RepTuple) -> Result<PillowcasePoint, PillowcaseError> {
    if x.len() != 2 || y.len() != 2 {
        return Err(PillowcaseError::WrongArity {
            x: x.len(),
            y: y.len(),
        });
    }
    let defect = (product_holonomy(x) - product_holonomy(y)).norm();
    if defect > 1e-9 {
        return Err(PillowcaseError::ProductMismatch { defect });
    }

    let mut pts = [x.get(0), x.get(1), y.get(0), y.get(1)];
    // irreducible = some pair does not commute = some pair of directions is
    // neither equal nor antipodal
    let mut irreducible = false;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].vec().cross(pts[j].vec()).norm() > 1e-9 {
                irreducible = true;
                break 'outer;
            }
        }
    }
    if !irreducible {
        return Err(PillowcaseError::Reducible);
    }

    // rotate X2 to i
    let rot = rotation_to_i(pts[1]);
    for p in pts.iter_mut() {
        *p = conjugate_by(rot, *p);
    }
    pts[1] = SpherePoint::I;

    // spin about i so the anchor (X1 if it is off-axis, otherwise Y1) lands
    // in the i-j plane with nonnegative j component
    const AXIS_TOL: f64 = 1e-9;
    let anchor = if 1.0 - pts[0].vec().x.abs() > AXIS_TOL {
        0
    } else if 1.0 - pts[2].vec().x.abs() > AXIS_TOL {
        2
    } else {
        return Err(PillowcaseError::Reducible);
    };
    let v = pts[anchor].vec();
    let phi = -f64::atan2(v.z, v.y) / 2.0;
    let spin = exp_so3(Vec3::new(phi, 0.0, 0.0));
    for p in pts.iter_mut() {
        *p = conjugate_by(spin, *p);
    }

    let x1 = pts[0].vec();
    let y1 = pts[2].vec();
    if x1.z.abs() > 1e-8 || y1.z.abs() > 1e-8 {
        // the trace-free product constraint keeps both factors in the plane
        return Err(PillowcaseError::ProductMismatch {
            defect: x1.z.abs().max(y1.z.abs()),
        });
    }
    let theta = f64::atan2(x1.y.max(0.0), x1.x);
    let psi = f64::atan2(y1.y, y1.x);
    Ok(PillowcasePoint::new(theta, wrap_psi(psi)))
}

fn rotation_to_i(from: SpherePoint) -> Quaternion {
    let d = from.dot(SpherePoint::I);
    if d > 1.0 - 1e-14 {
        return crate::quat::ONE;
    }
    if d < -1.0 + 1e-14 {
        return exp_so3(Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
    }
    let axis = from.vec().cross(SpherePoint::I.vec()).normalized();
    exp_so3(axis.scale(d.clamp(-1.0, 1.0).acos() / 2.0))
}

fn plane_point(angle: f64) -> SpherePoint {
    SpherePoint::new(Vec3::new(angle.cos(), angle.sin(), 0.0))
}

/// The constrained pair with the given coordinates, in normal form.
pub fn from_pillowcase(theta: f64, psi: f64) -> (RepTuple, RepTuple) {
    let x = RepTuple::new(vec![plane_point(theta), SpherePoint::I]);
    let y = RepTuple::new(vec![plane_point(psi), plane_point(psi - theta)]);
    (x, y)
}

/// Exact intersection data of a graph line with the diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionData {
    pub count: usize,
    /// Exact theta values divided by pi, increasing.
    pub thetas_over_pi: Vec<Rational64>,
    pub points: Vec<PillowcasePoint>,
    pub common_sign: i8,
}

/// Solve slope * theta + intercept = theta (mod 2 pi) exactly over the
/// rationals, with theta strictly inside (0, pi) so the corners are excluded.
/// The common sign is the 1x1 crossing determinant sign(slope - 1) under the
/// same calibration as the solver.
pub fn signed_intersections(line: &PillowLine) -> Result<IntersectionData, PillowcaseError> {
    let d = line.slope - 1;
    if d == 0 {
        return Err(PillowcaseError::NonTransverse);
    }
    // (slope - 1) t = -c + 2m with t = theta / pi in (0, 1)
    let c = line.intercept_over_pi;
    let lo;
    let hi;
    if d > 0 {
        lo = c;
        hi = c + Rational64::from_integer(d);
    } else {
        lo = c + Rational64::from_integer(d);
        hi = c;
    }
    // enumerate even integers 2m strictly inside (lo, hi)
    let mut thetas = Vec::new();
    let floor = |r: Rational64| -> i64 { r.numer().div_euclid(*r.denom()) };
    let mut twice_m = 2 * (floor(lo) / 2 - 2);
    while Rational64::from_integer(twice_m) <= lo {
        twice_m += 2;
    }
    while Rational64::from_integer(twice_m) < hi {
        let t = (Rational64::from_integer(twice_m) - c) / Rational64::from_integer(d);
        if t > Rational64::from_integer(0) && t < Rational64::from_integer(1) {
            thetas.push(t);
        }
        twice_m += 2;
    }
    thetas.sort();

    let points = thetas
        .iter()
        .map(|t| {
            let theta = PI * (*t.numer() as f64) / (*t.denom() as f64);
            PillowcasePoint::new(theta, theta)
        })
        .collect();
    Ok(IntersectionData {
        count: thetas.len(),
        thetas_over_pi: thetas,
        points,
        common_sign: if d > 0 { 1 } else { -1 },
    })
}

/// Render the pillowcase rectangle with the diagonal, wrapped graph lines,
/// intersection dots, and the labeled reducible corners. Output is
/// byte-deterministic for fixed input.
pub fn render_svg_string(lines: &[PillowLine], points: &[PillowcasePoint]) -> String {
    let scale = 120.0;
    let margin = 40.0;
    let width = PI * scale + 2.0 * margin;
    let height = 2.0 * PI * scale + 2.0 * margin;
    let x = |theta: f64| margin + theta * scale;
    let y = |psi: f64| margin + (PI - psi) * scale;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
        width, height, width, height
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // frame of [0, pi] x [-pi, pi]
    s.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        x(0.0), y(PI), PI * scale, 2.0 * PI * scale
    ));
    // midline psi = 0
    s.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#bbbbbb\" stroke-width=\"0.8\" stroke-dasharray=\"4 4\"/>\n",
        x(0.0), y(0.0), x(PI), y(0.0)
    ));
    // diagonal psi = theta
    s.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.2\"/>\n",
        x(0.0), y(0.0), x(PI), y(PI)
    ));

    // graph lines, wrapped into (-pi, pi]
    for line in lines {
        let value = |theta: f64| {
            line.slope as f64 * theta
                + PI * (*line.intercept_over_pi.numer() as f64)
                    / (*line.intercept_over_pi.denom() as f64)
        };
        // breakpoints where the unwrapped value crosses an odd multiple of pi
        let mut cuts = vec![0.0];
        if line.slope != 0 {
            let v0 = value(0.0);
            let v1 = value(PI);
            let (vmin, vmax) = (v0.min(v1), v0.max(v1));
            let mut level = (vmin / (2.0 * PI)).floor() * 2.0 * PI - PI;
            while level <= vmax {
                if level > vmin {
                    let t = (level - v0) / (line.slope as f64);
                    if t > 1e-12 && t < PI - 1e-12 {
                        cuts.push(t);
                    }
                }
                level += 2.0 * PI;
            }
        }
        cuts.push(PI);
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-9 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let offset = value(mid) - wrap_psi(value(mid));
            s.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#2060c0\" stroke-width=\"1.2\"/>\n",
                x(a), y(value(a) - offset), x(b), y(value(b) - offset)
            ));
        }
    }

    // intersection dots
    for p in points {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#c03030\"/>\n",
            x(p.theta),
            y(wrap_psi(p.psi))
        ));
    }

    // reducible corners, with the psi = -pi copies identified with the top
    let corners = [
        (0.0, 0.0, "A", -10.0, 16.0),
        (PI, 0.0, "B", 6.0, 16.0),
        (0.0, PI, "A'", -16.0, -8.0),
        (PI, PI, "B'", 6.0, -8.0),
        (0.0, -PI, "A'", -16.0, 16.0),
        (PI, -PI, "B'", 6.0, 16.0),
    ];
    for (t, p, label, dx, dy) in corners {
        s.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"white\" stroke=\"black\" stroke-width=\"1.2\"/>\n",
            x(t), y(p)
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"serif\" font-size=\"14\">{}</text>\n",
            x(t) + dx,
            y(p) + dy,
            label
        ));
    }
    // axis labels
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"serif\" font-size=\"14\">&#x3b8;</text>\n",
        x(PI / 2.0),
        y(-PI) + 28.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"serif\" font-size=\"14\">&#x3c8;</text>\n",
        x(0.0) - 28.0,
        y(0.0) + 4.0
    ));
    s.push_str("</svg>\n");
    s
}

/// Write the figure to a file.
pub fn render_svg(
    lines: &[PillowLine],
    points: &[PillowcasePoint],
    path: &std::path::Path,
) -> Result<(), PillowcaseError> {
    std::fs::write(path, render_svg_string(lines, points))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::act_signed;
    use crate::braid::{BraidWord, SignVector};
    use crate::quat::sample_su2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hopf_fixed_point_maps_to_the_center() {
        let x = RepTuple::new(vec![SpherePoint::J, SpherePoint::I]);
        let p = to_pillowcase(&x, &x).unwrap();
        assert!((p.theta - PI / 2.0).abs() < 1e-12);
        assert!((p.psi - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pairs_map_to_the_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..40 {
            let theta: f64 = rng.gen_range(0.1..3.0);
            let (x, _) = from_pillowcase(theta, 0.0);
            let a = sample_su2(&mut rng);
            let conj = x.conjugated_by(a);
            let p = to_pillowcase(&conj, &conj).unwrap();
            assert!((p.theta - theta).abs() < 1e-9);
            assert!((p.psi - theta).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_on_interior_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..60 {
            let theta: f64 = rng.gen_range(0.05..(PI - 0.05));
            let psi: f64 = rng.gen_range((-PI + 0.05)..(PI - 0.05));
            let (x, y) = from_pillowcase(theta, psi);
            let p = to_pillowcase(&x, &y).unwrap();
            assert!(
                (p.theta - theta).abs() < 1e-9,
                "theta {} vs {}",
                p.theta,
                theta
            );
            assert!((p.psi - psi).abs() < 1e-9, "psi {} vs {}", p.psi, psi);
        }
    }

    #[test]
    fn coordinates_are_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..40 {
            let theta: f64 = rng.gen_range(0.1..(PI - 0.1));
            let psi: f64 = rng.gen_range((-PI + 0.1)..(PI - 0.1));
            let (x, y) = from_pillowcase(theta, psi);
            let a = sample_su2(&mut rng);
            let p = to_pillowcase(&x.conjugated_by(a), &y.conjugated_by(a)).unwrap();
            assert!((p.theta - theta).abs() < 1e-9);
            assert!((p.psi - psi).abs() < 1e-9);
        }
    }

    #[test]
    fn constraint_violations_are_rejected() {
        let x = RepTuple::new(vec![SpherePoint::J, SpherePoint::I]);
        let y = RepTuple::new(vec![SpherePoint::K, SpherePoint::J]);
        assert!(matches!(
            to_pillowcase(&x, &y),
            Err(PillowcaseError::ProductMismatch { .. })
        ));

        let r = RepTuple::new(vec![SpherePoint::I, SpherePoint::I]);
        assert!(matches!(
            to_pillowcase(&r, &r),
            Err(PillowcaseError::Reducible)
        ));
    }

    #[test]
    fn corner_detection() {
        assert!(PillowcasePoint::new(0.0, 0.0).is_corner(1e-9));
        assert!(PillowcasePoint::new(PI, PI).is_corner(1e-9));
        assert!(PillowcasePoint::new(0.0, -PI).is_corner(1e-9));
        assert!(!PillowcasePoint::new(PI / 2.0, PI / 2.0).is_corner(1e-9));
    }

    #[test]
    fn graph_line_examples() {
        let l = graph_line(1);
        assert_eq!(l.slope, 3);
        assert_eq!(l.intercept_over_pi, Rational64::from_integer(-1));
        assert_eq!(graph_line(2).slope, 5);
    }

    #[test]
    fn graph_line_matches_the_signed_action_pointwise() {
        let eps = SignVector::from_entries(vec![-1, -1]);
        for k in 1..=3u32 {
            let b = BraidWord::parse(&"1 ".repeat(2 * k as usize), None).unwrap();
            let line = graph_line(k);
            for s in 1..=20 {
                let theta = PI * s as f64 / 21.0;
                let (x, _) = from_pillowcase(theta, 0.0);
                let y = act_signed(&eps, &b, &x).unwrap();
                let p = to_pillowcase(&x, &y).unwrap();
                let expected = wrap_psi(line.slope as f64 * theta - PI);
                let diff = wrap_psi(p.psi - expected).abs();
                assert!(
                    diff < 1e-9 || (diff - 2.0 * PI).abs() < 1e-9,
                    "k={} theta={} psi={} expected={}",
                    k,
                    theta,
                    p.psi,
                    expected
                );
            }
        }
    }

    #[test]
    fn intersection_oracle_examples() {
        let data = signed_intersections(&graph_line(1)).unwrap();
        assert_eq!(data.count, 1);
        assert_eq!(data.thetas_over_pi, vec![Rational64::new(1, 2)]);
        assert_eq!(data.common_sign, 1);

        let data = signed_intersections(&graph_line(3)).unwrap();
        assert_eq!(
            data.thetas_over_pi,
            vec![
                Rational64::new(1, 6),
                Rational64::new(1, 2),
                Rational64::new(5, 6)
            ]
        );

        for k in 1..=6u32 {
            let data = signed_intersections(&graph_line(k)).unwrap();
            assert_eq!(data.count, k as usize);
            let expected: Vec<Rational64> = (0..k as i64)
                .map(|m| Rational64::new(2 * m + 1, 2 * k as i64))
                .collect();
            assert_eq!(data.thetas_over_pi, expected);
            assert_eq!(data.common_sign, 1);
            // the braid oracle agrees with the exact count
            let b = BraidWord::parse(&"1 ".repeat(2 * k as usize), None).unwrap();
            assert_eq!(crate::braid::linking_number(&b).unwrap(), k as i64);
        }

        let flat = PillowLine {
            slope: 1,
            intercept_over_pi: Rational64::new(1, 3),
        };
        assert!(matches!(
            signed_intersections(&flat),
            Err(PillowcaseError::NonTransverse)
        ));
    }

    #[test]
    fn intersection_oracle_handles_negative_slopes() {
        // psi = -theta: crosses the diagonal at theta = m pi only, which the
        // open interval excludes entirely
        let l = PillowLine {
            slope: -1,
            intercept_over_pi: Rational64::from_integer(0),
        };
        let data = signed_intersections(&l).unwrap();
        assert_eq!(data.count, 0);
        assert_eq!(data.common_sign, -1);

        let l = PillowLine {
            slope: -3,
            intercept_over_pi: Rational64::from_integer(-1),
        };
        let data = signed_intersections(&l).unwrap();
        assert_eq!(
            data.thetas_over_pi,
            vec![Rational64::new(1, 4), Rational64::new(3, 4)]
        );
    }

    #[test]
    fn svg_output_is_deterministic_and_structured() {
        let line = graph_line(1);
        let data = signed_intersections(&line).unwrap();
        let a = render_svg_string(&[line], &data.points);
        let b = render_svg_string(&[line], &data.points);
        assert_eq!(a, b);
        assert!(a.starts_with("<?xml"));
        assert!(a.contains("<svg"));
        assert!(a.contains(">A<") && a.contains(">B<") && a.contains(">A'<") && a.contains(">B'<"));
        assert!(a.trim_end().ends_with("</svg>"));

        let empty = render_svg_string(&[], &[]);
        assert!(empty.contains("<rect"));
        assert!(empty.contains("<line"));
    }
}
