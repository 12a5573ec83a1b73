//! The twisted braid action on tuples of trace-free unit quaternions, its
//! analytic differential, sign transport, and the stabilization lift.
//!
//! A braid letter acts on adjacent factors by
//!
//! ```text
//! sigma_i:     (Z_i, Z_{i+1}) -> (Z_i Z_{i+1} Z_i^{-1}, Z_i)
//! sigma_i^-1:  (Z_i, Z_{i+1}) -> (Z_{i+1}, Z_{i+1}^{-1} Z_i Z_{i+1})
//! ```
//!
//! and a word acts by applying its letters right to left, so concatenation of
//! words composes the maps. The signed action scales factor i of the result
//! by eps_i; -1 is central so the sphere is preserved.

use crate::braid::{BraidWord, Permutation, SignVector};
use crate::linalg::Mat;
use crate::quat::{tangent_basis, Quaternion, SpherePoint, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ActionError {
    #[error("tuple has {tuple} factors but the braid has {braid} strands")]
    SizeMismatch { tuple: usize, braid: usize },
    #[error("sign vector has {sign} entries but the braid has {braid} strands")]
    SignSizeMismatch { sign: usize, braid: usize },
    #[error("input is not a fixed point: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotFixedPoint { residual: f64, tol: f64 },
}

/// A point of (S^2)^n: one trace-free unit quaternion per strand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepTuple {
    points: Vec<SpherePoint>,
}

impl RepTuple {
    pub fn new(points: Vec<SpherePoint>) -> Self {
        RepTuple { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn get(&self, i: usize) -> SpherePoint {
        self.points[i]
    }

    /// The all-i tuple, the base point for the Burau linearization.
    pub fn all_i(n: usize) -> Self {
        RepTuple {
            points: vec![SpherePoint::I; n],
        }
    }

    /// Conjugate every factor by the same unit quaternion.
    pub fn conjugated_by(&self, a: Quaternion) -> RepTuple {
        RepTuple {
            points: self
                .points
                .iter()
                .map(|&p| crate::quat::conjugate_by(a, p))
                .collect(),
        }
    }

    /// Scale factor i by eps_i. Antipodal flips stay on the sphere.
    pub fn scaled_by(&self, eps: &SignVector) -> RepTuple {
        assert_eq!(self.len(), eps.len());
        RepTuple {
            points: self
                .points
                .iter()
                .enumerate()
                .map(|(i, &p)| if eps.get(i + 1) == 1 { p } else { p.antipode() })
                .collect(),
        }
    }

    pub fn dist(&self, other: &RepTuple) -> f64 {
        assert_eq!(self.len(), other.len());
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.dist(*b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Product X_1 X_2 ... X_n of the factors.
pub fn product_holonomy(x: &RepTuple) -> Quaternion {
    x.points
        .iter()
        .fold(crate::quat::ONE, |acc, p| acc * p.quat())
}

fn check_sizes(b: &BraidWord, x: &RepTuple) -> Result<(), ActionError> {
    if b.strand_count() != x.len() {
        return Err(ActionError::SizeMismatch {
            tuple: x.len(),
            braid: b.strand_count(),
        });
    }
    Ok(())
}

fn check_sign(b: &BraidWord, eps: &SignVector) -> Result<(), ActionError> {
    if b.strand_count() != eps.len() {
        return Err(ActionError::SignSizeMismatch {
            sign: eps.len(),
            braid: b.strand_count(),
        });
    }
    Ok(())
}

/// One letter applied to a tuple of unit quaternions. Inverse is conjugate
/// since everything stays on the unit sphere.
fn apply_letter(index: usize, sign: i8, z: &mut [Quaternion]) {
    let i = index - 1;
    let (a, b) = (z[i], z[i + 1]);
    if sign == 1 {
        z[i] = (a * b * a.conj()).normalized();
        z[i + 1] = a;
    } else {
        z[i] = b;
        z[i + 1] = (b.conj() * a * b).normalized();
    }
}

/// Product-rule push of a family of ambient tangent tuples through one letter.
/// `z` is the tuple before the move; d(z^{-1}) = conj(u) on the unit sphere.
fn push_letter(index: usize, sign: i8, z: &[Quaternion], tangents: &mut [Vec<Quaternion>]) {
    let i = index - 1;
    let (a, b) = (z[i], z[i + 1]);
    for t in tangents.iter_mut() {
        let (p, q) = (t[i], t[i + 1]);
        if sign == 1 {
            t[i] = p * b * a.conj() + a * q * a.conj() + a * b * p.conj();
            t[i + 1] = p;
        } else {
            t[i] = q;
            t[i + 1] = q.conj() * a * b + b.conj() * p * b + b.conj() * a * q;
        }
    }
}

/// Unsigned action on arbitrary unit-quaternion tuples; used by the
/// trace-free-forcing control experiment and the conjugacy checks.
pub fn act_su2(b: &BraidWord, x: &[Quaternion]) -> Vec<Quaternion> {
    assert_eq!(b.strand_count(), x.len());
    let mut z = x.to_vec();
    for l in b.letters().iter().rev() {
        apply_letter(l.index, l.sign, &mut z);
    }
    z
}

/// Signed action on arbitrary unit-quaternion tuples.
pub fn act_signed_su2(eps: &SignVector, b: &BraidWord, x: &[Quaternion]) -> Vec<Quaternion> {
    let mut z = act_su2(b, x);
    for (i, q) in z.iter_mut().enumerate() {
        if eps.get(i + 1) == -1 {
            *q = -*q;
        }
    }
    z
}

/// Action of a braid word on a sphere tuple.
pub fn act(b: &BraidWord, x: &RepTuple) -> Result<RepTuple, ActionError> {
    check_sizes(b, x)?;
    let mut z: Vec<Quaternion> = x.points.iter().map(|p| p.quat()).collect();
    for l in b.letters().iter().rev() {
        apply_letter(l.index, l.sign, &mut z);
    }
    Ok(RepTuple {
        points: z.iter().map(|q| SpherePoint::new(q.imag())).collect(),
    })
}

/// The signed (wreath-product) action: factor i of the braid image scaled by
/// eps_i.
pub fn act_signed(eps: &SignVector, b: &BraidWord, x: &RepTuple) -> Result<RepTuple, ActionError> {
    check_sign(b, eps)?;
    Ok(act(b, x)?.scaled_by(eps))
}

/// Image of a tuple together with the pushed images of the per-factor tangent
/// frames: `pushed[c][i]` is the ambient image at factor `i` of the `c`-th
/// domain frame vector (frames ordered (t1, t2) per factor).
pub struct PushForward {
    pub image: RepTuple,
    pub pushed: Vec<Vec<Vec3>>,
}

/// Signed action and tangent push on arbitrary unit-quaternion tuples: the
/// tangent tuples evolve alongside the base tuple by the same product rule.
pub fn push_forward_su2(
    eps: &SignVector,
    b: &BraidWord,
    x: &[Quaternion],
    mut tangents: Vec<Vec<Quaternion>>,
) -> (Vec<Quaternion>, Vec<Vec<Quaternion>>) {
    assert_eq!(b.strand_count(), x.len());
    assert_eq!(eps.len(), x.len());
    let mut z = x.to_vec();
    for l in b.letters().iter().rev() {
        push_letter(l.index, l.sign, &z, &mut tangents);
        apply_letter(l.index, l.sign, &mut z);
    }
    for i in 0..z.len() {
        if eps.get(i + 1) == -1 {
            z[i] = -z[i];
            for t in tangents.iter_mut() {
                t[i] = -t[i];
            }
        }
    }
    (z, tangents)
}

pub fn push_forward(
    eps: &SignVector,
    b: &BraidWord,
    x: &RepTuple,
) -> Result<PushForward, ActionError> {
    check_sizes(b, x)?;
    check_sign(b, eps)?;
    let n = x.len();
    let z: Vec<Quaternion> = x.points.iter().map(|p| p.quat()).collect();

    // one tangent tuple per domain frame vector
    let mut frame_tuples: Vec<Vec<Quaternion>> = Vec::with_capacity(2 * n);
    for (i, &p) in x.points.iter().enumerate() {
        let (t1, t2) = tangent_basis(p);
        for v in [t1, t2] {
            let mut t = vec![Quaternion::new(0.0, 0.0, 0.0, 0.0); n];
            t[i] = Quaternion::from_imag(v);
            frame_tuples.push(t);
        }
    }

    let (z, tangents) = push_forward_su2(eps, b, &z, frame_tuples);
    let image = RepTuple {
        points: z.iter().map(|q| SpherePoint::new(q.imag())).collect(),
    };
    // pushed vectors are tangent analytically; drop numerical drift along the
    // base point and the scalar direction
    let pushed = tangents
        .into_iter()
        .map(|t| {
            t.into_iter()
                .enumerate()
                .map(|(i, q)| {
                    let base = image.points[i].vec();
                    let v = q.imag();
                    v - base.scale(v.dot(base))
                })
                .collect()
        })
        .collect();
    Ok(PushForward { image, pushed })
}

/// Differential of the signed action expressed in the deterministic tangent
/// frames at the domain point and at its image.
#[derive(Clone, Debug)]
pub struct ActionJacobian {
    pub matrix: Mat,
}

pub fn differential(
    eps: &SignVector,
    b: &BraidWord,
    x: &RepTuple,
) -> Result<ActionJacobian, ActionError> {
    let n = x.len();
    let pf = push_forward(eps, b, x)?;
    let frames: Vec<(Vec3, Vec3)> = pf.image.points.iter().map(|&p| tangent_basis(p)).collect();
    let mut m = Mat::zeros(2 * n, 2 * n);
    for (col, tangent) in pf.pushed.iter().enumerate() {
        for i in 0..n {
            let v = tangent[i];
            m[(2 * i, col)] = v.dot(frames[i].0);
            m[(2 * i + 1, col)] = v.dot(frames[i].1);
        }
    }
    Ok(ActionJacobian { matrix: m })
}

/// Sign transport between two valid sign vectors: delta_1 = 1 and
/// delta_{k+1} = delta_k eps_k eps'_k. For braids whose permutation has the
/// interval cycle form (1..m)(m+1..n) this satisfies
/// `delta * eps * sigma(delta) = eps'`.
pub fn epsilon_transport(eps: &SignVector, eps_prime: &SignVector) -> SignVector {
    assert_eq!(
        eps.len(),
        eps_prime.len(),
        "sign vectors must have equal length"
    );
    let n = eps.len();
    let mut delta = vec![1i8; n];
    for k in 1..n {
        delta[k] = delta[k - 1] * eps.get(k) * eps_prime.get(k);
    }
    SignVector::from_entries(delta)
}

/// General sign transport: solves `delta_i delta_{perm(i)} = eps_i eps'_i`
/// along each cycle with delta = 1 at the cycle minimum. Returns `None` when
/// the cycle products are inconsistent (i.e. the sign vectors are not both
/// valid for the permutation).
pub fn transport_for_permutation(
    eps: &SignVector,
    eps_prime: &SignVector,
    perm: &Permutation,
) -> Option<SignVector> {
    let n = perm.size();
    assert_eq!(eps.len(), n);
    assert_eq!(eps_prime.len(), n);
    let mut delta = vec![0i8; n];
    for cycle in perm.cycles() {
        let mut d = 1i8;
        for &s in &cycle {
            delta[s - 1] = d;
            d *= eps.get(s) * eps_prime.get(s);
        }
        // closing the cycle must reproduce the starting value
        if d != delta[cycle[0] - 1] {
            return None;
        }
    }
    Some(SignVector::from_entries(delta))
}

/// Stabilization lift of a fixed point: a fixed point X of (eps, b) on n
/// strands lifts to the fixed point (X_1,...,X_n,X_n) of
/// (eps_1,...,eps_{n-1},1,eps_n) acting with the word sigma_n b on n+1
/// strands.
pub fn markov_lift(
    eps: &SignVector,
    b: &BraidWord,
    x: &RepTuple,
    tol: f64,
) -> Result<(BraidWord, SignVector, RepTuple), ActionError> {
    let image = act_signed(eps, b, x)?;
    let residual = image.dist(x);
    if residual > tol {
        return Err(ActionError::NotFixedPoint { residual, tol });
    }
    let n = x.len();
    let lifted_braid = b.markov_stabilize(1);
    let mut entries: Vec<i8> = eps.entries().to_vec();
    let last = entries[n - 1];
    entries[n - 1] = 1;
    entries.push(last);
    let lifted_eps = SignVector::from_entries(entries);
    let mut points = x.points.clone();
    points.push(x.points[n - 1]);
    Ok((lifted_braid, lifted_eps, RepTuple { points }))
}
