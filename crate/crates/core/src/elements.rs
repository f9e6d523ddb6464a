//! Two-node, twelve-DOF Euler-Bernoulli frame elements for the shaft and the
//! blades.
//!
//! Local DOFs per node are ordered `(u_x, u_y, u_z, θ_x, θ_y, θ_z)` with `x`
//! along the element axis. Bending deflection along `y` pairs with `θ_z`
//! (`θ_z = dv/dx`) and deflection along `z` with `θ_y` (`θ_y = -dw/dx`), which
//! gives the usual negative coupling terms in the `x-z` plane.
//!
//! Mass matrices are consistent (cubic Hermite for bending, linear for axial
//! and torsion). Intact stiffness is closed-form; a cracked blade element is
//! integrated with a 16-point Gauss-Legendre rule against the spanwise
//! rigidity profile.

use nalgebra::{SMatrix, SVector};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::sections::{CrackProfile, DiskInertia, MaterialProperties, RigidityScale, SectionProperties};

pub type Matrix12 = SMatrix<f64, 12, 12>;
pub type Vector12 = SVector<f64, 12>;

/// Quadrature order for cracked stiffness integrals, applied on each side of
/// the crack plane when it falls inside the element.
pub const CRACK_QUADRATURE_ORDER: usize = 16;

pub const DOF_LABELS: [&str; 12] = [
    "u_x1", "u_y1", "u_z1", "th_x1", "th_y1", "th_z1", "u_x2", "u_y2", "u_z2", "th_x2", "th_y2",
    "th_z2",
];

pub(crate) const UX: usize = 0;
pub(crate) const UY: usize = 1;
pub(crate) const UZ: usize = 2;
pub(crate) const RX: usize = 3;
pub(crate) const RY: usize = 4;
pub(crate) const RZ: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub mass: Matrix12,
    pub stiffness: Matrix12,
}

/// Where an element sits along its member and what it is made of.
#[derive(Debug, Clone, Copy)]
pub struct ElementContext {
    /// 1-based position along the member.
    pub index: usize,
    /// Distance of node 1 from the member root (m).
    pub start: f64,
    pub length: f64,
    pub member_length: f64,
    pub section: SectionProperties,
    pub material: MaterialProperties,
    pub crack: Option<CrackProfile>,
}

impl ElementContext {
    /// Element `index` (1-based) of a member split into `n_elements` equal parts.
    pub fn uniform(
        index: usize,
        n_elements: usize,
        member_length: f64,
        section: SectionProperties,
        material: MaterialProperties,
        crack: Option<CrackProfile>,
    ) -> Self {
        let length = member_length / n_elements as f64;
        ElementContext {
            index,
            start: (index.saturating_sub(1)) as f64 * length,
            length,
            member_length,
            section,
            material,
            crack,
        }
    }

    fn validate(&self) -> Result<()> {
        require_positive("element.length", self.length)?;
        if self.index == 0 {
            return Err(Error::validation("element.index", "element index is 1-based"));
        }
        let tol = 1e-9 * self.member_length.max(1.0);
        if self.start < -tol || self.start + self.length > self.member_length + tol {
            return Err(Error::validation(
                "element.length",
                format!(
                    "element [{}, {}] extends beyond the member length {}",
                    self.start,
                    self.start + self.length,
                    self.member_length
                ),
            ));
        }
        Ok(())
    }
}

/// Shaft element; an attached disk is lumped on node 2.
pub fn shaft_element(ctx: &ElementContext, disk: Option<DiskInertia>) -> Result<ElementMatrices> {
    if ctx.crack.is_some() {
        return Err(Error::validation("cracks", "shaft elements cannot carry a crack"));
    }
    let mut m = frame_element(ctx)?;
    if let Some(d) = disk {
        for k in [6 + UX, 6 + UY, 6 + UZ] {
            m.mass[(k, k)] += d.mass;
        }
        m.mass[(6 + RX, 6 + RX)] += d.polar_inertia;
    }
    Ok(m)
}

/// Blade element in the blade's local frame (x radial along the span).
pub fn blade_element(ctx: &ElementContext) -> Result<ElementMatrices> {
    frame_element(ctx)
}

fn frame_element(ctx: &ElementContext) -> Result<ElementMatrices> {
    ctx.validate()?;
    let mass = consistent_mass(ctx.length, &ctx.section, ctx.material.density);
    let stiffness = match &ctx.crack {
        None => intact_stiffness(ctx.length, &ctx.section, &ctx.material),
        Some(profile) => cracked_stiffness(ctx, profile),
    };
    Ok(ElementMatrices { mass, stiffness })
}

fn place(m: &mut Matrix12, dofs: [usize; 4], block: &[[f64; 4]; 4]) {
    for (a, &i) in dofs.iter().enumerate() {
        for (b, &j) in dofs.iter().enumerate() {
            m[(i, j)] += block[a][b];
        }
    }
}

fn place2(m: &mut Matrix12, dofs: [usize; 2], k: f64) {
    let [i, j] = dofs;
    m[(i, i)] += k;
    m[(j, j)] += k;
    m[(i, j)] -= k;
    m[(j, i)] -= k;
}

const Y_PLANE: [usize; 4] = [UY, RZ, 6 + UY, 6 + RZ];
const Z_PLANE: [usize; 4] = [UZ, RY, 6 + UZ, 6 + RY];

/// Consistent mass matrix of a uniform element.
pub fn consistent_mass(length: f64, section: &SectionProperties, density: f64) -> Matrix12 {
    let l = length;
    let mut m = Matrix12::zeros();
    let axial = density * section.area * l / 6.0;
    let torsion = density * section.j_x * l / 6.0;
    for (dofs, c) in [([UX, 6 + UX], axial), ([RX, 6 + RX], torsion)] {
        m[(dofs[0], dofs[0])] += 2.0 * c;
        m[(dofs[1], dofs[1])] += 2.0 * c;
        m[(dofs[0], dofs[1])] += c;
        m[(dofs[1], dofs[0])] += c;
    }
    let c = density * section.area * l / 420.0;
    let y = [
        [156.0 * c, 22.0 * l * c, 54.0 * c, -13.0 * l * c],
        [22.0 * l * c, 4.0 * l * l * c, 13.0 * l * c, -3.0 * l * l * c],
        [54.0 * c, 13.0 * l * c, 156.0 * c, -22.0 * l * c],
        [-13.0 * l * c, -3.0 * l * l * c, -22.0 * l * c, 4.0 * l * l * c],
    ];
    place(&mut m, Y_PLANE, &y);
    place(&mut m, Z_PLANE, &flip_rotation_sign(&y));
    m
}

/// Converts a `(v, θ_z)` bending block into the `(w, θ_y)` convention.
fn flip_rotation_sign(b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let sign = [1.0, -1.0, 1.0, -1.0];
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = sign[i] * sign[j] * b[i][j];
        }
    }
    out
}

fn hermite_bending_stiffness(ei: f64, l: f64) -> [[f64; 4]; 4] {
    let c = ei / l.powi(3);
    [
        [12.0 * c, 6.0 * l * c, -12.0 * c, 6.0 * l * c],
        [6.0 * l * c, 4.0 * l * l * c, -6.0 * l * c, 2.0 * l * l * c],
        [-12.0 * c, -6.0 * l * c, 12.0 * c, -6.0 * l * c],
        [6.0 * l * c, 2.0 * l * l * c, -6.0 * l * c, 4.0 * l * l * c],
    ]
}

fn intact_stiffness(length: f64, s: &SectionProperties, mat: &MaterialProperties) -> Matrix12 {
    let mut k = Matrix12::zeros();
    place2(&mut k, [UX, 6 + UX], mat.young_modulus * s.area / length);
    place2(&mut k, [RX, 6 + RX], mat.shear_modulus * s.j_x / length);
    let y = hermite_bending_stiffness(mat.young_modulus * s.i_y, length);
    let z = hermite_bending_stiffness(mat.young_modulus * s.i_z, length);
    place(&mut k, Y_PLANE, &y);
    place(&mut k, Z_PLANE, &flip_rotation_sign(&z));
    k
}

/// Second derivatives of the cubic Hermite functions `(N1, N2, N3, N4)` at
/// local coordinate `x` of an element of length `l`.
pub(crate) fn hermite_curvatures(x: f64, l: f64) -> [f64; 4] {
    let xi = x / l;
    [
        (-6.0 + 12.0 * xi) / (l * l),
        (-4.0 + 6.0 * xi) / l,
        (6.0 - 12.0 * xi) / (l * l),
        (-2.0 + 6.0 * xi) / l,
    ]
}

/// First derivatives of the cubic Hermite functions `(N1, N2, N3, N4)`.
pub(crate) fn hermite_slopes(x: f64, l: f64) -> [f64; 4] {
    let xi = x / l;
    [
        6.0 * (xi * xi - xi) / l,
        1.0 - 4.0 * xi + 3.0 * xi * xi,
        6.0 * (xi - xi * xi) / l,
        3.0 * xi * xi - 2.0 * xi,
    ]
}

fn cracked_stiffness(ctx: &ElementContext, profile: &CrackProfile) -> Matrix12 {
    let l = ctx.length;
    let s = &ctx.section;
    let mat = &ctx.material;
    let mut axial = 0.0;
    let mut torsion = 0.0;
    let mut y = [[0.0; 4]; 4];
    let mut z = [[0.0; 4]; 4];
    for (x, w) in crack_quadrature_points(CRACK_QUADRATURE_ORDER, l, profile.location() - ctx.start) {
        let RigidityScale {
            axial: sa,
            bending_y: sy,
            bending_z: sz,
            torsion: st,
        } = profile.scale_at(ctx.start + x);
        axial += w * mat.young_modulus * s.area * sa / (l * l);
        torsion += w * mat.shear_modulus * s.j_x * st / (l * l);
        let b = hermite_curvatures(x, l);
        let ey = w * mat.young_modulus * s.i_y * sy;
        let ez = w * mat.young_modulus * s.i_z * sz;
        for i in 0..4 {
            for j in 0..4 {
                y[i][j] += b[i] * ey * b[j];
                z[i][j] += b[i] * ez * b[j];
            }
        }
    }
    let mut k = Matrix12::zeros();
    place2(&mut k, [UX, 6 + UX], axial);
    place2(&mut k, [RX, 6 + RX], torsion);
    place(&mut k, Y_PLANE, &y);
    place(&mut k, Z_PLANE, &flip_rotation_sign(&z));
    k
}

/// Geometric stiffness of a blade element under its own centrifugal tension,
/// per unit `ω²`.
///
/// The tension at span position `x` is `ρA((R + L)² − (R + x)²)/2 + m(R + L)`,
/// with `R` the radius of the blade root, `L` the blade length and `m` a point
/// mass carried at the tip. Both bending planes stiffen; axial and torsion
/// rows are untouched.
pub fn centrifugal_stiffness(ctx: &ElementContext, root_radius: f64, tip_mass: f64) -> Result<Matrix12> {
    ctx.validate()?;
    require_non_negative("disk.diameter", root_radius)?;
    require_non_negative("tip mass", tip_mass)?;
    let l = ctx.length;
    let tip = root_radius + ctx.member_length;
    let rho_a = ctx.material.density * ctx.section.area;
    let mut y = [[0.0; 4]; 4];
    // tension is quadratic and slopes are quadratic: degree 6 is exact with 4 points
    for (x, w) in GaussLegendre::new(4).mapped(0.0, l) {
        let r = root_radius + ctx.start + x;
        let tension = 0.5 * rho_a * (tip * tip - r * r) + tip_mass * tip;
        let d = hermite_slopes(x, l);
        for i in 0..4 {
            for j in 0..4 {
                y[i][j] += w * tension * d[i] * d[j];
            }
        }
    }
    let mut k = Matrix12::zeros();
    place(&mut k, Y_PLANE, &y);
    place(&mut k, Z_PLANE, &flip_rotation_sign(&y));
    Ok(k)
}

/// Quadrature points on `[0, l]`, split at `kink` when it is interior so each
/// panel integrates a smooth integrand.
pub(crate) fn crack_quadrature_points(order: usize, l: f64, kink: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(order);
    if kink > 0.0 && kink < l {
        rule.mapped(0.0, kink).chain(rule.mapped(kink, l)).collect()
    } else {
        rule.mapped(0.0, l).collect()
    }
}

/// Six rigid-body displacement fields of a free element of length `l`.
pub fn rigid_body_modes(l: f64) -> [Vector12; 6] {
    let mut modes = [Vector12::zeros(); 6];
    for (axis, mode) in modes.iter_mut().take(3).enumerate() {
        mode[axis] = 1.0;
        mode[6 + axis] = 1.0;
    }
    // rotation about x
    modes[3][RX] = 1.0;
    modes[3][6 + RX] = 1.0;
    // rotation about y: w = -θ x
    modes[4][RY] = 1.0;
    modes[4][6 + RY] = 1.0;
    modes[4][6 + UZ] = -l;
    // rotation about z: v = θ x
    modes[5][RZ] = 1.0;
    modes[5][6 + RZ] = 1.0;
    modes[5][6 + UY] = l;
    modes
}
