//! Coordinates co-rotating with the shaft.
//!
//! Shaft, disks and point masses are symmetric about the spin axis, so the
//! assembled system satisfies `M(t) = P(φ) M̂ Pᵀ(φ)` where `P(φ)` turns every
//! `(Y, Z)` pair of a node by the shaft angle `φ`. With `u = P q` and
//! `Ṗ = Ω P S`:
//!
//! ```text
//! u̇ = P (q̇ + Ω S q)
//! ü = P (q̈ + 2Ω S q̇ + (Ω² S² + Ω̇ S) q)
//! ```

use nalgebra::{DMatrix, DVector};

/// Shaft angle `φ`, speed `Ω` and angular acceleration `Ω̇` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin {
    pub angle: f64,
    pub omega: f64,
    pub omega_dot: f64,
}

/// Rotation about the shaft axis acting on the free `(Y, Z)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFrame {
    pairs: Vec<(usize, usize)>,
}

impl SpinFrame {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        SpinFrame { pairs }
    }

    /// `P(φ) x`
    pub fn rotate(&self, x: &DVector<f64>, phi: f64) -> DVector<f64> {
        let (s, c) = phi.sin_cos();
        let mut out = x.clone();
        for &(y, z) in &self.pairs {
            out[y] = c * x[y] - s * x[z];
            out[z] = s * x[y] + c * x[z];
        }
        out
    }

    /// `Pᵀ(φ) x`
    pub fn unrotate(&self, x: &DVector<f64>, phi: f64) -> DVector<f64> {
        self.rotate(x, -phi)
    }

    /// `S x`
    pub fn spin(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(x.len());
        for &(y, z) in &self.pairs {
            out[y] = -x[z];
            out[z] = x[y];
        }
        out
    }

    /// `Pᵀ(φ) A P(φ)`
    pub fn unrotate_matrix(&self, a: &DMatrix<f64>, phi: f64) -> DMatrix<f64> {
        let (s, c) = phi.sin_cos();
        let mut out = a.clone();
        for &(y, z) in &self.pairs {
            for j in 0..out.ncols() {
                let (ay, az) = (out[(y, j)], out[(z, j)]);
                out[(y, j)] = c * ay + s * az;
                out[(z, j)] = -s * ay + c * az;
            }
        }
        for &(y, z) in &self.pairs {
            for i in 0..out.nrows() {
                let (ay, az) = (out[(i, y)], out[(i, z)]);
                out[(i, y)] = c * ay + s * az;
                out[(i, z)] = -s * ay + c * az;
            }
        }
        out
    }

    /// `A S`
    pub fn spin_right(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(a.nrows(), a.ncols());
        for &(y, z) in &self.pairs {
            out.set_column(y, &a.column(z));
            out.set_column(z, &(-a.column(y)));
        }
        out
    }

    /// Co-rotating coordinates of a global state at spin `w`.
    pub fn to_frame(
        &self,
        (u, v, a): (&DVector<f64>, &DVector<f64>, &DVector<f64>),
        w: Spin,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let q = self.unrotate(u, w.angle);
        let qd = self.unrotate(v, w.angle) - self.spin(&q) * w.omega;
        let sq = self.spin(&q);
        let qdd = self.unrotate(a, w.angle)
            - self.spin(&qd) * (2.0 * w.omega)
            - self.spin(&sq) * (w.omega * w.omega)
            - sq * w.omega_dot;
        (q, qd, qdd)
    }

    /// Global state from co-rotating coordinates at spin `w`.
    pub fn from_frame(
        &self,
        (q, qd, qdd): (&DVector<f64>, &DVector<f64>, &DVector<f64>),
        w: Spin,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let sq = self.spin(q);
        let v = qd + &sq * w.omega;
        let a = qdd + self.spin(qd) * (2.0 * w.omega) + self.spin(&sq) * (w.omega * w.omega) + &sq * w.omega_dot;
        (
            self.rotate(q, w.angle),
            self.rotate(&v, w.angle),
            self.rotate(&a, w.angle),
        )
    }
}
