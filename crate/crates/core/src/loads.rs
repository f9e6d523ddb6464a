//! Centrifugal and aerodynamic blade loads.
//!
//! Loads are distributed per unit span and expressed in the blade frame:
//! `x'` radial, `y'` tangential in the rotation plane, `z'` axial. At span
//! position `x` of a blade whose root sits at radius `r0 = d_D / 2`:
//!
//! ```text
//! q_x'(x) = ρ_b A ω² (x + r0)
//! q_y'(x) = ½ ρ_a ((x + r0)² ω² + V∞²) S (−C_D cos ε − C_L sin ε)
//! q_z'(x) = ½ ρ_a ((x + r0)² ω² + V∞²) S ( C_L cos ε − C_D sin ε)
//! ```

use serde::{Deserialize, Serialize};

use crate::elements::{ElementContext, Vector12, RY, RZ, UX, UY, UZ};
use crate::error::{require_non_negative, require_positive, Result};
use crate::quadrature::GaussLegendre;
use crate::sections::{blade_section, BladeGeometry, MaterialProperties};

/// Exact for the degree-5 products of Hermite functions and quadratic loads.
const LOAD_QUADRATURE_ORDER: usize = 4;

/// Free-stream conditions and sectional aerodynamic coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AeroEnvironment {
    /// kg/m³
    pub air_density: f64,
    /// m/s
    pub freestream: f64,
    pub c_lift: f64,
    pub c_drag: f64,
    /// Reference chord (m); the blade width when absent.
    #[serde(default)]
    pub chord: Option<f64>,
}

impl AeroEnvironment {
    pub fn validate(&self, field: &str) -> Result<()> {
        require_positive(&format!("{field}.air_density"), self.air_density)?;
        require_non_negative(&format!("{field}.freestream"), self.freestream)?;
        for (name, v) in [("c_lift", self.c_lift), ("c_drag", self.c_drag)] {
            if !v.is_finite() {
                return Err(crate::Error::validation(format!("{field}.{name}"), "must be finite"));
            }
        }
        if let Some(c) = self.chord {
            require_positive(&format!("{field}.chord"), c)?;
        }
        Ok(())
    }

    pub fn chord_for(&self, blade: &BladeGeometry) -> f64 {
        self.chord.unwrap_or(blade.width)
    }

    /// Resolution factors `(y', z')` applied to `½ ρ_a V² S`.
    fn resolution(&self, downwash: f64) -> (f64, f64) {
        let (s, c) = downwash.sin_cos();
        (
            -self.c_drag * c - self.c_lift * s,
            self.c_lift * c - self.c_drag * s,
        )
    }

    /// Aerodynamic load per unit span `(q_y', q_z')` at radius `r`.
    pub fn distributed(&self, blade: &BladeGeometry, omega: f64, r: f64) -> (f64, f64) {
        let dynamic = 0.5
            * self.air_density
            * ((r * omega).powi(2) + self.freestream.powi(2))
            * self.chord_for(blade);
        let (fy, fz) = self.resolution(blade.downwash_angle);
        (dynamic * fy, dynamic * fz)
    }
}

/// Spanwise resultants on one blade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BladeForces {
    pub centrifugal: f64,
    pub lift: f64,
    pub drag: f64,
    /// `(F_x', F_y', F_z')` in the blade frame.
    pub local: [f64; 3],
}

/// Closed-form spanwise totals on a full-length blade.
pub fn total_blade_forces(
    blade: &BladeGeometry,
    aero: &AeroEnvironment,
    material: &MaterialProperties,
    disk_diameter: f64,
    omega: f64,
) -> Result<BladeForces> {
    let area = blade_section(blade)?.area;
    let r1 = 0.5 * disk_diameter;
    let r2 = r1 + blade.length;
    let centrifugal = material.density * area * omega * omega * (r2 * r2 - r1 * r1) / 2.0;
    let v2_integral =
        omega * omega * (r2.powi(3) - r1.powi(3)) / 3.0 + aero.freestream.powi(2) * blade.length;
    let q = 0.5 * aero.air_density * aero.chord_for(blade) * v2_integral;
    let (lift, drag) = (q * aero.c_lift, q * aero.c_drag);
    let (s, c) = blade.downwash_angle.sin_cos();
    Ok(BladeForces {
        centrifugal,
        lift,
        drag,
        local: [centrifugal, -drag * c - lift * s, lift * c - drag * s],
    })
}

/// Consistent nodal loads of one blade element in the blade frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementLoadVector {
    pub values: Vector12,
    /// 1-based.
    pub element_index: usize,
}

/// Integrates the distributed loads against the element shape functions.
///
/// Axial entries use the linear pair `(1 - x/L, x/L)`; transverse entries use
/// the Hermite pair `(H1, H3)` and the moments the rotation pair `(H2, H4)`,
/// with the sign flip of the `θ_y = -dw/dx` convention in the `x-z` plane.
pub fn consistent_nodal_loads(
    ctx: &ElementContext,
    blade: &BladeGeometry,
    aero: &AeroEnvironment,
    omega: f64,
    disk_diameter: f64,
) -> ElementLoadVector {
    let l = ctx.length;
    let r0 = 0.5 * disk_diameter + ctx.start;
    let mass_per_length = ctx.material.density * ctx.section.area;
    let mut f = Vector12::zeros();
    for (x, w) in GaussLegendre::new(LOAD_QUADRATURE_ORDER).mapped(0.0, l) {
        let r = r0 + x;
        let qx = mass_per_length * omega * omega * r;
        let (qy, qz) = aero.distributed(blade, omega, r);
        let xi = x / l;
        let (n1, n2) = (1.0 - xi, xi);
        let h = hermite(x, l);
        f[UX] += w * n1 * qx;
        f[6 + UX] += w * n2 * qx;
        f[UY] += w * h[0] * qy;
        f[RZ] += w * h[1] * qy;
        f[6 + UY] += w * h[2] * qy;
        f[6 + RZ] += w * h[3] * qy;
        f[UZ] += w * h[0] * qz;
        f[RY] -= w * h[1] * qz;
        f[6 + UZ] += w * h[2] * qz;
        f[6 + RY] -= w * h[3] * qz;
    }
    ElementLoadVector {
        values: f,
        element_index: ctx.index,
    }
}

/// Cubic Hermite functions `(H1, H2, H3, H4)` on an element of length `l`.
pub(crate) fn hermite(x: f64, l: f64) -> [f64; 4] {
    let xi = x / l;
    let (xi2, xi3) = (xi * xi, xi * xi * xi);
    [
        1.0 - 3.0 * xi2 + 2.0 * xi3,
        l * (xi - 2.0 * xi2 + xi3),
        3.0 * xi2 - 2.0 * xi3,
        l * (xi3 - xi2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn blade() -> BladeGeometry {
        BladeGeometry {
            width: 0.04,
            t1: 0.00515,
            t2: 0.00065,
            length: 0.4,
            n_elements: 2,
            count: 8,
            downwash_angle: 0.3,
        }
    }

    fn aero() -> AeroEnvironment {
        AeroEnvironment {
            air_density: 1.22,
            freestream: 200.0,
            c_lift: 0.02,
            c_drag: 0.03,
            chord: None,
        }
    }

    fn steel() -> MaterialProperties {
        MaterialProperties::isotropic(2e11, 0.31, 7833.0)
    }

    fn ctx(index: usize, b: &BladeGeometry) -> ElementContext {
        ElementContext::uniform(index, b.n_elements, b.length, blade_section(b).unwrap(), steel(), None)
    }

    #[test]
    fn no_spin_no_flow_no_load() {
        let still = AeroEnvironment { freestream: 0.0, ..aero() };
        let b = blade();
        let t = total_blade_forces(&b, &still, &steel(), 0.35, 0.0).unwrap();
        assert_eq!(t.local, [0.0; 3]);
        for i in 1..=2 {
            assert_eq!(consistent_nodal_loads(&ctx(i, &b), &b, &still, 0.0, 0.35).values, Vector12::zeros());
        }
    }

    #[test]
    fn zero_downwash_separates_lift_and_drag() {
        let b = BladeGeometry { downwash_angle: 0.0, ..blade() };
        let t = total_blade_forces(&b, &aero(), &steel(), 0.35, 628.32).unwrap();
        assert_eq!(t.local[1], -t.drag);
        assert_eq!(t.local[2], t.lift);

        let no_lift = AeroEnvironment { c_lift: 0.0, ..aero() };
        let f = consistent_nodal_loads(&ctx(1, &b), &b, &no_lift, 628.32, 0.35).values;
        for k in [UZ, RY, 6 + UZ, 6 + RY] {
            assert_eq!(f[k], 0.0);
        }
        let no_drag = AeroEnvironment { c_drag: 0.0, ..aero() };
        let f = consistent_nodal_loads(&ctx(1, &b), &b, &no_drag, 628.32, 0.35).values;
        for k in [UY, RZ, 6 + UY, 6 + RZ] {
            assert_eq!(f[k], 0.0);
        }
    }

    #[test]
    fn centrifugal_total_table2() {
        let b = blade();
        let t = total_blade_forces(&b, &aero(), &steel(), 0.35, 628.32).unwrap();
        assert_relative_eq!(t.centrifugal, 5.378e4, max_relative = 1e-3);
    }

    #[test]
    fn outer_element_carries_more_centrifugal_load() {
        let b = blade();
        let f1 = consistent_nodal_loads(&ctx(1, &b), &b, &aero(), 628.32, 0.35).values;
        let f2 = consistent_nodal_loads(&ctx(2, &b), &b, &aero(), 628.32, 0.35).values;
        assert!(f2[UX] > f1[UX] && f2[6 + UX] > f1[6 + UX]);
    }

    #[test]
    fn nodal_sums_reproduce_blade_totals() {
        let b = BladeGeometry { n_elements: 5, ..blade() };
        let t = total_blade_forces(&b, &aero(), &steel(), 0.35, 628.32).unwrap();
        let mut sum = [0.0; 3];
        for i in 1..=5 {
            let f = consistent_nodal_loads(&ctx(i, &b), &b, &aero(), 628.32, 0.35).values;
            for (axis, s) in sum.iter_mut().enumerate() {
                *s += f[axis] + f[6 + axis];
            }
        }
        for (s, expected) in sum.iter().zip(&t.local) {
            assert_relative_eq!(*s, *expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_load_splits_evenly() {
        // no spin: the aero load is uniform along the span
        let b = blade();
        let f = consistent_nodal_loads(&ctx(1, &b), &b, &aero(), 0.0, 0.35).values;
        let (qy, qz) = aero().distributed(&b, 0.0, 0.0);
        let le = b.element_length();
        assert_relative_eq!(f[UY], qy * le / 2.0, max_relative = 1e-13);
        assert_relative_eq!(f[6 + UY], qy * le / 2.0, max_relative = 1e-13);
        assert_relative_eq!(f[UZ], qz * le / 2.0, max_relative = 1e-13);
        // end moments of a uniform load: ±qL²/12
        assert_relative_eq!(f[RZ], qy * le * le / 12.0, max_relative = 1e-13);
        assert_relative_eq!(f[6 + RZ], -qy * le * le / 12.0, max_relative = 1e-13);
        assert_relative_eq!(f[RY], -qz * le * le / 12.0, max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn loads_scale_quadratically(lambda in 0.1f64..5.0, omega in 0.0f64..700.0) {
            let b = blade();
            let a = aero();
            let scaled = AeroEnvironment { freestream: a.freestream * lambda, ..a };
            let base = consistent_nodal_loads(&ctx(2, &b), &b, &a, omega, 0.35).values;
            let up = consistent_nodal_loads(&ctx(2, &b), &b, &scaled, lambda * omega, 0.35).values;
            for k in 0..12 {
                prop_assert!((up[k] - lambda * lambda * base[k]).abs() <= 1e-10 * base[k].abs().max(1e-12));
            }
        }

        #[test]
        fn hermite_partition_of_unity(x in 0.0f64..1.0, l in 0.01f64..2.0) {
            let h = hermite(x * l, l);
            prop_assert!((h[0] + h[2] - 1.0).abs() < 1e-14);
        }
    }
}
