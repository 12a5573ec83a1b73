//! Enumeration of fixed-point conjugacy classes of the signed braid action on
//! the sphere product, local intersection signs, and the assembly of the
//! invariant h as the signed class count.

use crate::action::{self, act_signed, push_forward, RepTuple};
use crate::braid::{linking_number, BraidError, BraidWord, SignVector};
use crate::linalg::{orthonormalize, Mat};
use crate::quat::{
    conjugate_by, exp_so3, sample_sphere, sample_su2, tangent_basis, Quaternion, SpherePoint, Vec3,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Global sign calibration: the intersection determinant determines signs up
/// to one overall constant, fixed here so that the positive Hopf braid
/// (sigma_1^2) counts +1.
const SIGN_CALIBRATION: f64 = -1.0;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Action(#[from] crate::action::ActionError),
    #[error("tuple is reducible (commutator margin {margin:.3e})")]
    Reducible { margin: f64 },
    #[error("not a fixed point: residual {residual:.3e} exceeds {tol:.3e}")]
    NotAFixedPoint { residual: f64, tol: f64 },
    #[error("conjugation orbit is not invariant under the differential (defect {defect:.3e})")]
    OrbitNotInvariant { defect: f64 },
}

/// Multistart and tolerance configuration. `starts` defaults to 400 per
/// strand when unset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub starts: Option<usize>,
    pub residual_tol: f64,
    pub cluster_tol: f64,
    /// Threshold on the reciprocal condition number of the intersection
    /// matrix below which a class is reported degenerate rather than signed.
    pub degenerate_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            starts: None,
            residual_tol: 1e-10,
            cluster_tol: 1e-6,
            degenerate_tol: 1e-8,
            max_iters: 200,
        }
    }
}

impl SolverConfig {
    pub fn effective_starts(&self, n: usize) -> usize {
        self.starts.unwrap_or(400 * n).max(1)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = Some(starts);
        self
    }
}

/// Local intersection sign of a fixed-point class.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
    Degenerate,
}

impl Sign {
    pub fn value(self) -> Option<i64> {
        match self {
            Sign::Plus => Some(1),
            Sign::Minus => Some(-1),
            Sign::Degenerate => None,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Sign::Plus => s.serialize_i8(1),
            Sign::Minus => s.serialize_i8(-1),
            Sign::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

/// One conjugacy class of fixed points.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointClass {
    /// Gauge-fixed representative; not part of the wire format.
    #[serde(skip)]
    pub representative: RepTuple,
    /// Conjugation-invariant trace fingerprint used for clustering.
    pub fingerprint: Vec<f64>,
    pub sign: Sign,
    #[serde(rename = "residual")]
    pub residual_norm: f64,
    pub commutator_margin: f64,
}

/// Echo of the configuration a result was computed with.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub starts: usize,
    pub residual_tol: f64,
    pub cluster_tol: f64,
    pub degenerate_tol: f64,
    pub max_iters: usize,
}

/// Result of a full invariant computation. `h` is `None` when any class came
/// out degenerate (the count is then indeterminate rather than silently
/// perturbed).
#[derive(Clone, Debug, Serialize)]
pub struct HResult {
    pub braid: String,
    pub n: usize,
    /// Cycle partition of the braid permutation; the two cycles are the two
    /// components of the closure.
    pub cycles: Vec<Vec<usize>>,
    pub epsilon: Vec<i8>,
    pub h: Option<i64>,
    pub lk: i64,
    pub classes: Vec<FixedPointClass>,
    /// Converged points discarded because their commutator margin was below
    /// the reducibility guard; nonzero values indicate tolerance trouble.
    pub rejected_near_reducible: usize,
    pub seed: u64,
    pub config: ResolvedConfig,
}

/// Residual of the fixed-point equation as a flat 3n-vector.
pub fn residual(
    eps: &SignVector,
    b: &BraidWord,
    x: &RepTuple,
) -> Result<Vec<f64>, crate::action::ActionError> {
    let y = act_signed(eps, b, x)?;
    let mut r = Vec::with_capacity(3 * x.len());
    for (a, b) in y.points().iter().zip(x.points()) {
        let d = a.vec() - b.vec();
        r.extend_from_slice(&[d.x, d.y, d.z]);
    }
    Ok(r)
}

pub fn residual_norm(eps: &SignVector, b: &BraidWord, x: &RepTuple) -> f64 {
    act_signed(eps, b, x)
        .map(|y| y.dist(x))
        .unwrap_or(f64::INFINITY)
}

/// Outcome of one local refinement.
#[derive(Clone, Debug)]
pub enum Refined {
    Converged { point: RepTuple, residual: f64 },
    Diverged,
}

/// Levenberg-Marquardt refinement of the fixed-point residual with retraction
/// to the sphere product after every step.
pub fn refine(eps: &SignVector, b: &BraidWord, x0: &RepTuple, cfg: &SolverConfig) -> Refined {
    let n = x0.len();
    let mut x = x0.clone();
    let mut r = match residual(eps, b, &x) {
        Ok(r) => r,
        Err(_) => return Refined::Diverged,
    };
    let mut rn = norm(&r);
    let mut lambda = 1e-3;

    for _ in 0..cfg.max_iters {
        if rn <= cfg.residual_tol {
            return Refined::Converged {
                point: x,
                residual: rn,
            };
        }

        // Jacobian of the residual in the tangent frames at x: pushed frame
        // vectors minus the frame vectors themselves.
        let pf = push_forward(eps, b, &x).expect("sizes checked above");
        let mut jac = Mat::zeros(3 * n, 2 * n);
        for (col, tangent) in pf.pushed.iter().enumerate() {
            let (factor, which) = (col / 2, col % 2);
            let frame = tangent_basis(x.get(factor));
            let dir = if which == 0 { frame.0 } else { frame.1 };
            for i in 0..n {
                let mut v = tangent[i];
                if i == factor {
                    v = v - dir;
                }
                jac[(3 * i, col)] = v.x;
                jac[(3 * i + 1, col)] = v.y;
                jac[(3 * i + 2, col)] = v.z;
            }
        }

        let jt = jac.transpose();
        let a = jt.matmul(&jac);
        let g = jt.matvec(&r);

        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = a.clone();
            for i in 0..2 * n {
                damped[(i, i)] += lambda;
            }
            let Some(step) = damped.solve(&g.iter().map(|v| -v).collect::<Vec<_>>()) else {
                lambda *= 10.0;
                continue;
            };
            let candidate = retract(&x, &step);
            let Ok(r_new) = residual(eps, b, &candidate) else {
                lambda *= 10.0;
                continue;
            };
            let rn_new = norm(&r_new);
            if rn_new < rn {
                x = candidate;
                r = r_new;
                rn = rn_new;
                lambda = (lambda * 0.3).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            return Refined::Diverged;
        }
    }
    if rn <= cfg.residual_tol {
        Refined::Converged {
            point: x,
            residual: rn,
        }
    } else {
        Refined::Diverged
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn retract(x: &RepTuple, step: &[f64]) -> RepTuple {
    let points = x
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let (t1, t2) = tangent_basis(p);
            SpherePoint::new(p.vec() + t1.scale(step[2 * i]) + t2.scale(step[2 * i + 1]))
        })
        .collect();
    RepTuple::new(points)
}

/// Irreducibility margin: the largest quaternion commutator norm over pairs.
/// A tuple is reducible exactly when every pair commutes.
pub fn irreducibility_margin(x: &RepTuple) -> f64 {
    let n = x.len();
    let mut margin: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let a = x.get(i).quat();
            let b = x.get(j).quat();
            margin = margin.max((a * b - b * a).norm());
        }
    }
    margin
}

pub fn is_irreducible(x: &RepTuple, cfg: &SolverConfig) -> (bool, f64) {
    let margin = irreducibility_margin(x);
    (margin > 10.0 * cfg.cluster_tol, margin)
}

/// Conjugation-invariant fingerprint: scalar parts of all pair and triple
/// products of distinct factors, in index order. These trace coordinates
/// separate conjugacy classes of irreducible tuples.
pub fn fingerprint(x: &RepTuple) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((x.get(i).quat() * x.get(j).quat()).w);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((x.get(i).quat() * x.get(j).quat() * x.get(k).quat()).w);
            }
        }
    }
    out
}

fn fingerprint_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Conjugate the tuple into the canonical gauge: the first factor becomes i
/// exactly, and the first factor not parallel to it is rotated into the i-j
/// plane with positive j component.
pub fn gauge_fix(x: &RepTuple) -> Result<RepTuple, SolverError> {
    let n = x.len();
    let x1 = x.get(0);

    // rotation taking x1 to i
    let rot = rotation_between(x1, SpherePoint::I);
    let mut pts: Vec<SpherePoint> = x.points().iter().map(|&p| conjugate_by(rot, p)).collect();
    pts[0] = SpherePoint::I;

    // anchor: first factor not parallel to the first one
    const PARALLEL_TOL: f64 = 1e-6;
    let anchor = (1..n).find(|&j| 1.0 - pts[j].vec().x.abs() > PARALLEL_TOL);
    let Some(anchor) = anchor else {
        return Err(SolverError::Reducible {
            margin: irreducibility_margin(x),
        });
    };

    // rotate about the i axis to kill the k component, keeping j positive
    let v = pts[anchor].vec();
    let phi = -f64::atan2(v.z, v.y) / 2.0;
    let spin = exp_so3(Vec3::new(phi, 0.0, 0.0));
    for p in pts.iter_mut().skip(1) {
        *p = conjugate_by(spin, *p);
    }
    pts[0] = SpherePoint::I;
    Ok(RepTuple::new(pts))
}

/// Unit quaternion whose adjoint rotation takes `from` to `to`.
fn rotation_between(from: SpherePoint, to: SpherePoint) -> Quaternion {
    let d = from.dot(to);
    if d > 1.0 - 1e-14 {
        return crate::quat::ONE;
    }
    if d < -1.0 + 1e-14 {
        // antipodal: rotate by pi about any axis orthogonal to `from`
        let (t1, _) = tangent_basis(from);
        return exp_so3(t1.scale(std::f64::consts::FRAC_PI_2));
    }
    let axis = from.vec().cross(to.vec()).normalized();
    let half_angle = d.clamp(-1.0, 1.0).acos() / 2.0;
    exp_so3(axis.scale(half_angle))
}

/// Jacobian of the signed action as an endomorphism of the tangent space at a
/// fixed point: domain and codomain both use the frames at `x`.
fn jacobian_at_fixed_point(eps: &SignVector, b: &BraidWord, x: &RepTuple) -> Mat {
    let n = x.len();
    let pf = push_forward(eps, b, x).expect("sizes match");
    let frames: Vec<(Vec3, Vec3)> = x.points().iter().map(|&p| tangent_basis(p)).collect();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for (col, tangent) in pf.pushed.iter().enumerate() {
        for i in 0..n {
            m[(2 * i, col)] = tangent[i].dot(frames[i].0);
            m[(2 * i + 1, col)] = tangent[i].dot(frames[i].1);
        }
    }
    m
}

/// Orthonormal basis (in frame coordinates) of the conjugation-orbit tangent
/// subspace at `x`, spanned by v -> [v, X_i] for v in {i, j, k}.
fn orbit_basis(x: &RepTuple) -> Vec<Vec<f64>> {
    let n = x.len();
    let frames: Vec<(Vec3, Vec3)> = x.points().iter().map(|&p| tangent_basis(p)).collect();
    let dirs = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    ];
    let raw: Vec<Vec<f64>> = dirs
        .iter()
        .map(|&v| {
            let mut coords = Vec::with_capacity(2 * n);
            for (p, frame) in x.points().iter().zip(&frames) {
                let o = v.cross(p.vec());
                coords.push(o.dot(frame.0));
                coords.push(o.dot(frame.1));
            }
            coords
        })
        .collect();
    orthonormalize(&raw, 1e-9)
}

/// Differential of the product holonomy in frame coordinates, right
/// translated to the Lie algebra: column `c` holds the i, j, k components of
/// (X_1 ... u ... X_n) P^{-1} for the c-th frame vector u.
fn holonomy_differential(x: &RepTuple) -> Mat {
    let n = x.len();
    let quats: Vec<Quaternion> = x.points().iter().map(|p| p.quat()).collect();
    let mut prefix = vec![crate::quat::ONE; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * quats[i];
    }
    let mut suffix = vec![crate::quat::ONE; n + 1];
    for i in (0..n).rev() {
        suffix[i] = quats[i] * suffix[i + 1];
    }
    let p_inv = prefix[n].inverse();

    let mut m = Mat::zeros(3, 2 * n);
    for i in 0..n {
        let (t1, t2) = tangent_basis(x.get(i));
        for (which, dir) in [t1, t2].into_iter().enumerate() {
            let xi = prefix[i] * Quaternion::from_imag(dir) * suffix[i + 1] * p_inv;
            let col = 2 * i + which;
            m[(0, col)] = xi.x;
            m[(1, col)] = xi.y;
            m[(2, col)] = xi.z;
        }
    }
    m
}

/// Sign of the fixed-point class at `x`: the local intersection sign of the
/// action graph with the diagonal inside the holonomy-constrained quotient,
/// up to the global calibration.
///
/// Concretely, with V the tangent space of the sphere product in its frame
/// coordinates, the columns of a (4n)x(4n) matrix over V + V are assembled
/// from canonically chosen bases:
/// - (w, w) for the diagonal directions (w spans the orbit complement),
/// - (w, Jw) for the graph directions,
/// - (o, o) for the conjugation orbit, oriented by pushing {i, j, k},
/// - (u, 0) with d(holonomy) u = {i, j, k}, a fiber complement of the
///   holonomy constraint.
///
/// The first two blocks share the same w basis, so the determinant sign is
/// independent of every non-canonical choice. Returns the relative
/// determinant magnitude alongside.
pub fn sign_of(
    eps: &SignVector,
    b: &BraidWord,
    x: &RepTuple,
    cfg: &SolverConfig,
) -> Result<(Sign, f64), SolverError> {
    let rn = residual_norm(eps, b, x);
    if rn > cfg.residual_tol {
        return Err(SolverError::NotAFixedPoint {
            residual: rn,
            tol: cfg.residual_tol,
        });
    }
    let (irr, margin) = is_irreducible(x, cfg);
    if !irr {
        return Err(SolverError::Reducible { margin });
    }

    let n = x.len();
    let dim = 2 * n;
    let j = jacobian_at_fixed_point(eps, b, x);
    let orbit = orbit_basis(x);
    if orbit.len() != 3 {
        return Err(SolverError::Reducible { margin });
    }

    // the orbit consists of fixed points, so (I - J) must kill it
    let scale = 1.0 + j.frobenius_norm();
    for o in &orbit {
        let jo = j.matvec(o);
        let defect: f64 = jo
            .iter()
            .zip(o)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if defect > 1e-8 * scale {
            return Err(SolverError::OrbitNotInvariant { defect });
        }
    }

    // orthonormal complement of the orbit inside V
    let mut spanning = orbit.clone();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        spanning.push(e);
    }
    let full = orthonormalize(&spanning, 1e-9);
    debug_assert_eq!(full.len(), dim);
    let complement = &full[3..];

    // minimum-norm preimages of i, j, k under the holonomy differential
    let pi = holonomy_differential(x);
    let pit = pi.transpose();
    let gram = pi.matmul(&pit);
    let mut fiber: Vec<Vec<f64>> = Vec::with_capacity(3);
    for k in 0..3 {
        let mut e = vec![0.0; 3];
        e[k] = 1.0;
        let Some(lam) = gram.solve(&e) else {
            // holonomy differential not onto: no transverse fiber, so the
            // intersection data is degenerate at this point
            return Ok((Sign::Degenerate, 0.0));
        };
        fiber.push(pit.matvec(&lam));
    }

    let q = dim - 3;
    let mut m = Mat::zeros(2 * dim, 2 * dim);
    let mut col = 0;
    for w in complement {
        for (row, &v) in w.iter().enumerate() {
            m[(row, col)] = v;
            m[(row + dim, col)] = v;
        }
        col += 1;
    }
    for w in complement {
        let jw = j.matvec(w);
        for row in 0..dim {
            m[(row, col)] = w[row];
            m[(row + dim, col)] = jw[row];
        }
        col += 1;
    }
    for o in &orbit {
        for (row, &v) in o.iter().enumerate() {
            m[(row, col)] = v;
            m[(row + dim, col)] = v;
        }
        col += 1;
    }
    for u in &fiber {
        for (row, &v) in u.iter().enumerate() {
            m[(row, col)] = v;
        }
        col += 1;
    }
    debug_assert_eq!(col, 2 * dim);
    debug_assert_eq!(q + q + 3 + 3, 2 * dim);

    // column equilibration removes the scale disparity between the diagonal,
    // graph, orbit, and fiber blocks without touching the determinant sign
    let Some(balanced) = m.column_equilibrated() else {
        return Ok((Sign::Degenerate, 0.0));
    };
    let det = balanced.det();
    let rel = balanced.reciprocal_condition();
    if rel < cfg.degenerate_tol {
        return Ok((Sign::Degenerate, rel));
    }
    let sign = if det * SIGN_CALIBRATION > 0.0 {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok((sign, rel))
}

/// Full invariant computation: seeded multistart refinement, conjugation
/// class clustering by fingerprint, one sign per class, h as the signed sum.
pub fn compute_h(
    b: &BraidWord,
    eps: Option<SignVector>,
    cfg: &SolverConfig,
) -> Result<HResult, SolverError> {
    assert!(
        cfg.residual_tol > 0.0
            && cfg.cluster_tol > 0.0
            && cfg.degenerate_tol > 0.0
            && cfg.max_iters > 0,
        "solver tolerances must be positive"
    );
    let n = b.strand_count();
    let cycles = b.permutation().cycles();
    if cycles.len() != 2 {
        return Err(BraidError::NotTwoComponents {
            cycles: cycles.len(),
        }
        .into());
    }
    let eps = match eps {
        Some(e) => {
            if !e.is_valid_for(b) {
                return Err(BraidError::InvalidEpsilon.into());
            }
            e
        }
        None => SignVector::canonical_for(b)?,
    };
    let lk = linking_number(b)?;
    let starts = cfg.effective_starts(n);

    // sample all starting tuples up front so scheduling cannot affect results
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial: Vec<RepTuple> = (0..starts)
        .map(|_| RepTuple::new((0..n).map(|_| sample_sphere(&mut rng)).collect()))
        .collect();

    let converged: Vec<(RepTuple, f64)> = initial
        .par_iter()
        .filter_map(|x0| match refine(&eps, b, x0, cfg) {
            Refined::Converged { point, residual } => Some((point, residual)),
            Refined::Diverged => None,
        })
        .collect();

    // reducible-limit guard
    let mut rejected = 0usize;
    let mut kept: Vec<(Vec<f64>, RepTuple, f64)> = Vec::new();
    for (point, rn) in converged {
        if irreducibility_margin(&point) <= 10.0 * cfg.cluster_tol {
            rejected += 1;
            continue;
        }
        kept.push((fingerprint(&point), point, rn));
    }

    // canonical order before clustering keeps the result scheduling-free
    kept.sort_by(|a, b| {
        let ord = a.0.iter().map(|v| v.to_bits() as i128).collect::<Vec<_>>();
        let ord_b = b.0.iter().map(|v| v.to_bits() as i128).collect::<Vec<_>>();
        ord.partial_cmp(&ord_b).unwrap().then(a.2.total_cmp(&b.2))
    });

    struct Cluster {
        fingerprint: Vec<f64>,
        best: RepTuple,
        best_residual: f64,
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    for (fp, point, rn) in kept {
        match clusters
            .iter_mut()
            .find(|c| fingerprint_distance(&c.fingerprint, &fp) < cfg.cluster_tol)
        {
            Some(c) => {
                if rn < c.best_residual {
                    c.best = point;
                    c.best_residual = rn;
                }
            }
            None => clusters.push(Cluster {
                fingerprint: fp,
                best: point,
                best_residual: rn,
            }),
        }
    }
    clusters.sort_by(|a, b| {
        a.fingerprint
            .iter()
            .zip(&b.fingerprint)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut classes = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let representative = gauge_fix(&c.best)?;
        let (sign, _rel) = sign_of(&eps, b, &c.best, cfg)?;
        let margin = irreducibility_margin(&c.best);
        classes.push(FixedPointClass {
            representative,
            fingerprint: c.fingerprint.clone(),
            sign,
            residual_norm: c.best_residual,
            commutator_margin: margin,
        });
    }

    let h = classes.iter().map(|c| c.sign.value()).sum::<Option<i64>>();

    Ok(HResult {
        braid: b.to_string(),
        n,
        cycles,
        epsilon: eps.entries().to_vec(),
        h,
        lk,
        classes,
        rejected_near_reducible: rejected,
        seed: cfg.seed,
        config: ResolvedConfig {
            starts,
            residual_tol: cfg.residual_tol,
            cluster_tol: cfg.cluster_tol,
            degenerate_tol: cfg.degenerate_tol,
            max_iters: cfg.max_iters,
        },
    })
}

/// Control experiment: search the full unit-quaternion product, with no
/// trace-free restriction, and return the converged tuples. Any fixed point
/// of a validly signed action is forced onto the trace-free sphere, which the
/// caller checks.
pub fn unconstrained_su2_search(
    b: &BraidWord,
    eps: &SignVector,
    cfg: &SolverConfig,
) -> Vec<Vec<Quaternion>> {
    let n = b.strand_count();
    let starts = cfg.effective_starts(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial: Vec<Vec<Quaternion>> = (0..starts)
        .map(|_| (0..n).map(|_| sample_su2(&mut rng)).collect())
        .collect();

    initial
        .par_iter()
        .filter_map(|x0| refine_su2(eps, b, x0, cfg))
        .collect()
}

/// Orthonormal frame of the tangent space of the unit 3-sphere at q.
fn su2_frame(q: Quaternion) -> [Quaternion; 3] {
    let axes = [
        Quaternion::new(1.0, 0.0, 0.0, 0.0),
        Quaternion::new(0.0, 1.0, 0.0, 0.0),
        Quaternion::new(0.0, 0.0, 1.0, 0.0),
        Quaternion::new(0.0, 0.0, 0.0, 1.0),
    ];
    let dot = |a: Quaternion, b: Quaternion| a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    let mut frame: Vec<Quaternion> = Vec::with_capacity(3);
    for e in axes {
        let mut v = e - q.scale(dot(e, q));
        for f in &frame {
            v = v - f.scale(dot(v, *f));
        }
        let nv = v.norm();
        if nv > 1e-6 {
            frame.push(v.scale(1.0 / nv));
            if frame.len() == 3 {
                break;
            }
        }
    }
    [frame[0], frame[1], frame[2]]
}

fn refine_su2(
    eps: &SignVector,
    b: &BraidWord,
    x0: &[Quaternion],
    cfg: &SolverConfig,
) -> Option<Vec<Quaternion>> {
    let n = x0.len();
    let res = |x: &[Quaternion]| -> Vec<f64> {
        let y = action::act_signed_su2(eps, b, x);
        let mut r = Vec::with_capacity(4 * n);
        for (a, b) in y.iter().zip(x) {
            let d = *a - *b;
            r.extend_from_slice(&[d.w, d.x, d.y, d.z]);
        }
        r
    };

    let mut x = x0.to_vec();
    let mut r = res(&x);
    let mut rn = norm(&r);
    let mut lambda = 1e-3;

    for _ in 0..cfg.max_iters {
        if rn <= cfg.residual_tol {
            return Some(x);
        }
        let frames: Vec<[Quaternion; 3]> = x.iter().map(|&q| su2_frame(q)).collect();
        let mut tangents: Vec<Vec<Quaternion>> = Vec::with_capacity(3 * n);
        for (i, frame) in frames.iter().enumerate() {
            for &f in frame {
                let mut t = vec![Quaternion::new(0.0, 0.0, 0.0, 0.0); n];
                t[i] = f;
                tangents.push(t);
            }
        }
        let (_, pushed) = action::push_forward_su2(eps, b, &x, tangents);

        let mut jac = Mat::zeros(4 * n, 3 * n);
        for (col, tangent) in pushed.iter().enumerate() {
            let (factor, which) = (col / 3, col % 3);
            for i in 0..n {
                let mut v = tangent[i];
                if i == factor {
                    v = v - frames[factor][which];
                }
                jac[(4 * i, col)] = v.w;
                jac[(4 * i + 1, col)] = v.x;
                jac[(4 * i + 2, col)] = v.y;
                jac[(4 * i + 3, col)] = v.z;
            }
        }

        let jt = jac.transpose();
        let a = jt.matmul(&jac);
        let g = jt.matvec(&r);

        let mut accepted = false;
        while lambda < 1e12 {
            let mut damped = a.clone();
            for i in 0..3 * n {
                damped[(i, i)] += lambda;
            }
            let Some(step) = damped.solve(&g.iter().map(|v| -v).collect::<Vec<_>>()) else {
                lambda *= 10.0;
                continue;
            };
            let candidate: Vec<Quaternion> = x
                .iter()
                .enumerate()
                .map(|(i, &q)| {
                    let f = frames[i];
                    (q + f[0].scale(step[3 * i])
                        + f[1].scale(step[3 * i + 1])
                        + f[2].scale(step[3 * i + 2]))
                    .normalized()
                })
                .collect();
            let r_new = res(&candidate);
            let rn_new = norm(&r_new);
            if rn_new < rn {
                x = candidate;
                r = r_new;
                rn = rn_new;
                lambda = (lambda * 0.3).max(1e-14);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            return None;
        }
    }
    if rn <= cfg.residual_tol {
        Some(x)
    } else {
        None
    }
}
