//! Quaternion arithmetic and the trace-free 2-sphere inside the unit quaternions.
//!
//! Unit quaternions are used throughout in place of SU(2) matrices; the matrix
//! trace corresponds to twice the scalar part, so the trace-free elements are
//! exactly the pure-imaginary unit quaternions, a 2-sphere.

use serde::{Deserialize, Serialize};

/// 3-vector with just the operations the sphere geometry needs.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Quaternion w + xi + yj + zk.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ONE: Quaternion = Quaternion {
    w: 1.0,
    x: 0.0,
    y: 0.0,
    z: 0.0,
};
pub const I: Quaternion = Quaternion {
    w: 0.0,
    x: 1.0,
    y: 0.0,
    z: 0.0,
};
pub const J: Quaternion = Quaternion {
    w: 0.0,
    x: 0.0,
    y: 1.0,
    z: 0.0,
};
pub const K: Quaternion = Quaternion {
    w: 0.0,
    x: 0.0,
    y: 0.0,
    z: 1.0,
};

impl Quaternion {
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_imag(v: Vec3) -> Self {
        Quaternion::new(0.0, v.x, v.y, v.z)
    }

    pub fn imag(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Inverse of a unit quaternion.
    pub fn inverse(self) -> Quaternion {
        self.conj()
    }

    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(self) -> Quaternion {
        let n = self.norm();
        self.scale(1.0 / n)
    }

    /// Trace of the corresponding SU(2) matrix, i.e. twice the scalar part.
    pub fn trace(self) -> f64 {
        2.0 * self.w
    }

    pub fn approx_eq(self, o: Quaternion, tol: f64) -> bool {
        (self.w - o.w).abs() <= tol
            && (self.x - o.x).abs() <= tol
            && (self.y - o.y).abs() <= tol
            && (self.z - o.z).abs() <= tol
    }
}

/// Hamilton product.
impl std::ops::Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl std::ops::Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Exponential of the pure-imaginary quaternion with vector part `v`:
/// cos|v| + sin|v| v/|v|. Conjugation by the result rotates by 2|v| about v.
pub fn exp_so3(v: Vec3) -> Quaternion {
    let a = v.norm();
    if a == 0.0 {
        return ONE;
    }
    let s = a.sin() / a;
    Quaternion::new(a.cos(), v.x * s, v.y * s, v.z * s)
}

/// A point of the trace-free sphere: a pure-imaginary unit quaternion.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    pub const I: SpherePoint = SpherePoint(Vec3 {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    });
    pub const J: SpherePoint = SpherePoint(Vec3 {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    });
    pub const K: SpherePoint = SpherePoint(Vec3 {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    });

    /// Normalizes the input; callers keep points unit-length by construction.
    pub fn new(v: Vec3) -> Self {
        SpherePoint(v.normalized())
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn quat(self) -> Quaternion {
        Quaternion::from_imag(self.0)
    }

    pub fn antipode(self) -> SpherePoint {
        SpherePoint(-self.0)
    }

    pub fn dot(self, o: SpherePoint) -> f64 {
        self.0.dot(o.0)
    }

    pub fn dist(self, o: SpherePoint) -> f64 {
        (self.0 - o.0).norm()
    }
}

/// Tangent vector at a sphere point; `v` is orthogonal to the base point.
#[derive(Copy, Clone, Debug)]
pub struct TangentVector {
    pub base: SpherePoint,
    pub v: Vec3,
}

impl TangentVector {
    pub fn new(base: SpherePoint, v: Vec3) -> Self {
        // project out any drift along the base direction
        let v = v - base.vec().scale(v.dot(base.vec()));
        TangentVector { base, v }
    }
}

/// Conjugate a sphere point by a unit quaternion: a x a^{-1}, renormalized.
/// This is the adjoint rotation, so the trace-free condition is preserved.
pub fn conjugate_by(a: Quaternion, x: SpherePoint) -> SpherePoint {
    let q = a * x.quat() * a.inverse();
    SpherePoint::new(q.imag())
}

/// Deterministic orthonormal frame of the tangent plane at `p`, via the
/// smallest-component rule: seed with the coordinate axis of least overlap.
pub fn tangent_basis(p: SpherePoint) -> (Vec3, Vec3) {
    let v = p.vec();
    let ax = v.x.abs();
    let ay = v.y.abs();
    let az = v.z.abs();
    let seed = if ax <= ay && ax <= az {
        Vec3::new(1.0, 0.0, 0.0)
    } else if ay <= az {
        Vec3::new(0.0, 1.0, 0.0)
    } else {
        Vec3::new(0.0, 0.0, 1.0)
    };
    let t1 = (seed - v.scale(seed.dot(v))).normalized();
    let t2 = v.cross(t1);
    (t1, t2)
}

/// Uniform sample from the 2-sphere.
pub fn sample_sphere<R: rand::Rng>(rng: &mut R) -> SpherePoint {
    let v: [f64; 3] = rng.sample(rand_distr::UnitSphere);
    SpherePoint(Vec3::new(v[0], v[1], v[2]))
}

/// Uniform sample from the unit quaternions (the full group, not just the
/// trace-free sphere); used by the unconstrained control search.
pub fn sample_su2<R: rand::Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        );
        let n = q.norm();
        if n > 1e-6 {
            return q.scale(1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn multiplication_table() {
        assert!((I * J).approx_eq(K, 0.0));
        assert!((J * I).approx_eq(-K, 0.0));
        assert!((J * K).approx_eq(I, 0.0));
        assert!((K * I).approx_eq(J, 0.0));
        assert!((I * I).approx_eq(-ONE, 0.0));
    }

    #[test]
    fn conjugating_i_by_j_gives_minus_i() {
        // j i j^{-1} = -i, used by the Hopf fixed-point check
        let r = J * I * J.inverse();
        assert!(r.approx_eq(-I, 1e-15));
    }

    #[test]
    fn adjoint_of_exp_rotates_by_twice_the_angle() {
        // e^{k pi/4} conjugates i to j: rotation by pi/2 about k
        let a = exp_so3(Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_4));
        let r = conjugate_by(a, SpherePoint::I);
        assert!(r.dist(SpherePoint::J) < 1e-15);
    }

    #[test]
    fn identity_and_center_act_trivially() {
        let x = SpherePoint::new(Vec3::new(0.3, -0.4, 0.87));
        assert!(conjugate_by(ONE, x).dist(x) < 1e-15);
        assert!(conjugate_by(-ONE, x).dist(x) < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert_eq!(exp_so3(Vec3::ZERO), ONE);
    }

    #[test]
    fn rodrigues_oracle_agrees_with_conjugation() {
        // rotate random points about random axes and compare with the
        // Rodrigues rotation formula
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = sample_sphere(&mut rng);
            let axis = sample_sphere(&mut rng).vec();
            let half_angle: f64 = rand::Rng::gen_range(&mut rng, -3.0..3.0);
            let q = exp_so3(axis.scale(half_angle));
            let got = conjugate_by(q, x).vec();

            let theta = 2.0 * half_angle;
            let v = x.vec();
            let rodrigues = v.scale(theta.cos())
                + axis.cross(v).scale(theta.sin())
                + axis.scale(axis.dot(v) * (1.0 - theta.cos()));
            assert!((got - rodrigues).norm() < 1e-12);
        }
    }

    #[test]
    fn mul_is_associative_and_conjugation_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = sample_su2(&mut rng);
            let b = sample_su2(&mut rng);
            let c = sample_su2(&mut rng);
            assert!(((a * b) * c).approx_eq(a * (b * c), 1e-12));

            let x = sample_sphere(&mut rng);
            let lhs = conjugate_by(a * b, x);
            let rhs = conjugate_by(a, conjugate_by(b, x));
            assert!(lhs.dist(rhs) < 1e-12);
        }
    }

    #[test]
    fn conjugation_preserves_the_unit_imaginary_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = sample_su2(&mut rng);
            let x = sample_sphere(&mut rng);
            let y = conjugate_by(a, x);
            assert!((y.vec().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_unit_quaternions_square_to_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = sample_sphere(&mut rng).quat();
            assert!((x * x).approx_eq(-ONE, 1e-12));
        }
    }

    #[test]
    fn sample_sphere_mean_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut sum = Vec3::ZERO;
        for _ in 0..n {
            sum = sum + sample_sphere(&mut rng).vec();
        }
        let mean = sum.scale(1.0 / n as f64);
        // per-coordinate variance is 1/3; allow 3 sigma on the norm
        let bound = 3.0 * (1.0 / n as f64).sqrt();
        assert!(mean.norm() < bound, "mean {:?} exceeds {}", mean, bound);
    }

    #[test]
    fn tangent_basis_at_i_spans_j_and_k() {
        let (t1, t2) = tangent_basis(SpherePoint::I);
        assert!((t1 - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((t2 - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = sample_sphere(&mut rng);
            let (t1, t2) = tangent_basis(p);
            assert!((t1.norm() - 1.0).abs() < 1e-12);
            assert!((t2.norm() - 1.0).abs() < 1e-12);
            assert!(t1.dot(t2).abs() < 1e-12);
            assert!(t1.dot(p.vec()).abs() < 1e-12);
            assert!(t2.dot(p.vec()).abs() < 1e-12);
        }
    }
}
