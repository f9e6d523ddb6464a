//! Cross-section properties of the shaft, the lumped disk and the trapezoidal
//! blade, plus the exponential stiffness-reduction profile around a blade crack.
//!
//! A crack of depth `d` cut across the blade width `w` replaces the baseline
//! section by the section of width `w - d` at the crack plane. Away from the
//! plane the rigidity recovers exponentially:
//!
//! ```text
//! R(x) = R0 / (1 + C exp(-2 γ0 |x - l_c| / ℓ)),    C = (R0 - Rc) / Rc
//! ```
//!
//! where `R0` and `Rc` are the intact and cracked section values, `l_c` is the
//! crack position measured from the blade root and `ℓ` is the decay length
//! (the blade width unless overridden).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Default crack decay constant of the exponential rigidity profile.
pub const DEFAULT_GAMMA0: f64 = 0.667;

/// Hollow circular shaft segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShaftGeometry {
    /// Outer diameter (m).
    pub d_out: f64,
    /// Inner diameter (m); zero for a solid shaft.
    pub d_in: f64,
    /// Segment length (m).
    pub length: f64,
    pub n_elements: usize,
}

impl ShaftGeometry {
    pub fn validate(&self, field: &str) -> Result<()> {
        require_positive(&format!("{field}.d_out"), self.d_out)?;
        require_non_negative(&format!("{field}.d_in"), self.d_in)?;
        if self.d_in >= self.d_out {
            return Err(Error::validation(
                format!("{field}.d_in"),
                format!(
                    "inner diameter {} must be smaller than outer diameter {}",
                    self.d_in, self.d_out
                ),
            ));
        }
        require_positive(&format!("{field}.length"), self.length)?;
        if self.n_elements == 0 {
            return Err(Error::validation(
                format!("{field}.n_elements"),
                "must be at least 1",
            ));
        }
        Ok(())
    }
}

/// Thin disk lumped at a shaft node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskGeometry {
    /// Outer diameter (m).
    pub diameter: f64,
    /// Axial thickness (m).
    pub thickness: f64,
    /// Mass density (kg/m³).
    pub density: f64,
}

impl DiskGeometry {
    pub fn validate(&self, field: &str, host: &ShaftGeometry) -> Result<()> {
        require_positive(&format!("{field}.thickness"), self.thickness)?;
        require_positive(&format!("{field}.density"), self.density)?;
        if !(self.diameter > host.d_out) {
            return Err(Error::validation(
                format!("{field}.diameter"),
                format!(
                    "disk diameter {} must exceed the shaft outer diameter {}",
                    self.diameter, host.d_out
                ),
            ));
        }
        Ok(())
    }
}

/// Blade with a trapezoidal cross-section: parallel sides `t1` and `t2`
/// separated by the width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BladeGeometry {
    /// Width (chordwise extent) of the section (m).
    pub width: f64,
    /// Thick parallel side (m).
    pub t1: f64,
    /// Thin parallel side (m).
    pub t2: f64,
    /// Span from root to tip (m).
    pub length: f64,
    pub n_elements: usize,
    /// Number of blades on the stage.
    pub count: usize,
    /// Downwash angle used to resolve lift and drag into the blade frame (rad).
    pub downwash_angle: f64,
}

impl BladeGeometry {
    pub fn validate(&self, field: &str) -> Result<()> {
        require_positive(&format!("{field}.width"), self.width)?;
        require_positive(&format!("{field}.t2"), self.t2)?;
        if !(self.t1 >= self.t2) || !self.t1.is_finite() {
            return Err(Error::validation(
                format!("{field}.t1"),
                format!("t1 ({}) must be at least t2 ({})", self.t1, self.t2),
            ));
        }
        require_positive(&format!("{field}.length"), self.length)?;
        if self.n_elements == 0 {
            return Err(Error::validation(
                format!("{field}.n_elements"),
                "must be at least 1",
            ));
        }
        if self.count == 0 {
            return Err(Error::validation(format!("{field}.count"), "must be at least 1"));
        }
        if !self.downwash_angle.is_finite() {
            return Err(Error::validation(
                format!("{field}.downwash_angle"),
                "must be finite",
            ));
        }
        Ok(())
    }

    pub fn element_length(&self) -> f64 {
        self.length / self.n_elements as f64
    }
}

/// Isotropic linear-elastic material shared by shaft and blades.
///
/// When the shear modulus is omitted from a scenario file it is derived as
/// `E / (2 (1 + ν))`; the serialized form always carries the resolved value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MaterialSpec")]
pub struct MaterialProperties {
    /// Young's modulus (Pa).
    pub young_modulus: f64,
    /// Shear modulus (Pa).
    pub shear_modulus: f64,
    pub poisson: f64,
    /// Mass density of shaft and blades (kg/m³).
    pub density: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSpec {
    young_modulus: f64,
    #[serde(default)]
    shear_modulus: Option<f64>,
    poisson: f64,
    density: f64,
}

impl From<MaterialSpec> for MaterialProperties {
    fn from(spec: MaterialSpec) -> Self {
        let shear_modulus = spec
            .shear_modulus
            .unwrap_or(spec.young_modulus / (2.0 * (1.0 + spec.poisson)));
        MaterialProperties {
            young_modulus: spec.young_modulus,
            shear_modulus,
            poisson: spec.poisson,
            density: spec.density,
        }
    }
}

impl MaterialProperties {
    /// Isotropic material with `G = E / (2 (1 + ν))`.
    pub fn isotropic(young_modulus: f64, poisson: f64, density: f64) -> Self {
        MaterialProperties {
            young_modulus,
            shear_modulus: young_modulus / (2.0 * (1.0 + poisson)),
            poisson,
            density,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        require_positive(&format!("{field}.young_modulus"), self.young_modulus)?;
        require_positive(&format!("{field}.shear_modulus"), self.shear_modulus)?;
        require_positive(&format!("{field}.density"), self.density)?;
        if !(self.poisson > 0.0 && self.poisson < 0.5) {
            return Err(Error::validation(
                format!("{field}.poisson"),
                format!("must lie in (0, 0.5) (got {})", self.poisson),
            ));
        }
        Ok(())
    }
}

fn default_gamma0() -> f64 {
    DEFAULT_GAMMA0
}

/// An open edge crack on one blade, present from the start of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrackSpec {
    /// Stage number, 1-based.
    pub stage: usize,
    /// Blade number on the stage, 1-based.
    pub blade: usize,
    /// Crack depth measured across the blade width (m).
    pub depth: f64,
    /// Crack position measured from the blade root (m).
    pub location: f64,
    #[serde(default = "default_gamma0")]
    pub gamma0: f64,
}

impl CrackSpec {
    pub fn new(stage: usize, blade: usize, depth: f64, location: f64) -> Self {
        CrackSpec {
            stage,
            blade,
            depth,
            location,
            gamma0: DEFAULT_GAMMA0,
        }
    }

    pub fn validate(&self, field: &str, blade: &BladeGeometry) -> Result<()> {
        require_non_negative(&format!("{field}.depth"), self.depth)?;
        if self.depth >= blade.width {
            return Err(Error::validation(
                format!("{field}.depth"),
                format!(
                    "crack depth {} severs the blade section of width {}; model it as a blade-off event",
                    self.depth, blade.width
                ),
            ));
        }
        if !(self.location >= 0.0 && self.location <= blade.length) {
            return Err(Error::validation(
                format!("{field}.location"),
                format!(
                    "crack location {} lies outside the blade span [0, {}]",
                    self.location, blade.length
                ),
            ));
        }
        require_positive(&format!("{field}.gamma0"), self.gamma0)?;
        Ok(())
    }
}

/// Area and second moments of a beam cross-section.
///
/// `i_y` is the second moment governing bending deflection along the local Y
/// axis and `i_z` the one governing deflection along local Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionProperties {
    /// Area (m²).
    pub area: f64,
    /// Second moment for bending along Y (m⁴).
    pub i_y: f64,
    /// Second moment for bending along Z (m⁴).
    pub i_z: f64,
    /// Polar moment (m⁴).
    pub j_x: f64,
}

/// Lumped disk inertia.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DiskInertia {
    /// kg
    pub mass: f64,
    /// kg·m² (or m⁴ under [`DiskInertiaConvention::AreaMoment`])
    pub polar_inertia: f64,
}

/// How the disk polar inertia lumped on the shaft torsion DOF is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskInertiaConvention {
    /// `ρ t π (d_D⁴ − d_o⁴) / 32`, a mass moment of inertia.
    #[default]
    MassMoment,
    /// `π (d_D⁴ − d_o⁴) / 32`, the polar area moment of the annulus.
    AreaMoment,
}

/// Decay length of the crack rigidity profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrackLengthScale {
    /// Blade width.
    #[default]
    Width,
    /// Crack depth.
    Depth,
}

pub fn shaft_section(geom: &ShaftGeometry) -> Result<SectionProperties> {
    geom.validate("shaft")?;
    let (o2, i2) = (geom.d_out.powi(2), geom.d_in.powi(2));
    let area = PI * (o2 - i2) / 4.0;
    let i = PI * (o2 * o2 - i2 * i2) / 64.0;
    Ok(SectionProperties {
        area,
        i_y: i,
        i_z: i,
        j_x: 2.0 * i,
    })
}

/// Mass and polar inertia of the annular disk lumped on its host shaft node.
///
/// A disk whose diameter equals the shaft diameter degenerates to zero inertia.
pub fn disk_inertia(
    geom: &DiskGeometry,
    host: &ShaftGeometry,
    convention: DiskInertiaConvention,
) -> Result<DiskInertia> {
    require_positive("disk.thickness", geom.thickness)?;
    require_positive("disk.density", geom.density)?;
    if !(geom.diameter >= host.d_out) {
        return Err(Error::validation(
            "disk.diameter",
            format!(
                "disk diameter {} is smaller than the shaft outer diameter {}",
                geom.diameter, host.d_out
            ),
        ));
    }
    let rho_t = geom.density * geom.thickness;
    let mass = rho_t * PI * (geom.diameter.powi(2) - host.d_out.powi(2)) / 4.0;
    let area_moment = PI * (geom.diameter.powi(4) - host.d_out.powi(4)) / 32.0;
    let polar_inertia = match convention {
        DiskInertiaConvention::MassMoment => rho_t * area_moment,
        DiskInertiaConvention::AreaMoment => area_moment,
    };
    Ok(DiskInertia {
        mass,
        polar_inertia,
    })
}

fn trapezoid(width: f64, t1: f64, t2: f64) -> SectionProperties {
    let sum = t1 + t2;
    let area = 0.5 * sum * width;
    let i_y = (t1 * t1 + 4.0 * t1 * t2 + t2 * t2) * width.powi(3) / (36.0 * sum);
    let i_z = width * sum * (t1 * t1 + t2 * t2) / 48.0;
    SectionProperties {
        area,
        i_y,
        i_z,
        j_x: i_y + i_z,
    }
}

pub fn blade_section(geom: &BladeGeometry) -> Result<SectionProperties> {
    geom.validate("blades")?;
    Ok(trapezoid(geom.width, geom.t1, geom.t2))
}

/// Section at the crack plane: the width is reduced by the crack depth.
pub fn cracked_blade_section(geom: &BladeGeometry, depth: f64) -> Result<SectionProperties> {
    geom.validate("blades")?;
    require_non_negative("crack.depth", depth)?;
    if depth >= geom.width {
        return Err(Error::validation(
            "crack.depth",
            "crack severs the blade section; model it as a blade-off event",
        ));
    }
    Ok(trapezoid(geom.width - depth, geom.t1, geom.t2))
}

/// Rigidity scale factor `s(x)` in (0, 1] at span position `x`.
pub fn crack_scale(
    baseline: f64,
    cracked: f64,
    gamma0: f64,
    location: f64,
    length_scale: f64,
    x: f64,
) -> Result<f64> {
    if !(cracked > 0.0) {
        return Err(Error::validation(
            "crack",
            "cracked section property must be positive; a severed section is a blade-off event",
        ));
    }
    if cracked > baseline {
        return Err(Error::validation(
            "crack",
            format!("cracked value {cracked} exceeds the intact value {baseline}"),
        ));
    }
    require_positive("crack.length_scale", length_scale)?;
    let c = (baseline - cracked) / cracked;
    Ok(scale_factor(c, gamma0, location, length_scale, x))
}

#[inline]
fn scale_factor(c: f64, gamma0: f64, location: f64, length_scale: f64, x: f64) -> f64 {
    1.0 / (1.0 + c * (-2.0 * gamma0 * (x - location).abs() / length_scale).exp())
}

/// Rigidity multipliers at one span position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidityScale {
    pub axial: f64,
    pub bending_y: f64,
    pub bending_z: f64,
    pub torsion: f64,
}

impl RigidityScale {
    pub const INTACT: RigidityScale = RigidityScale {
        axial: 1.0,
        bending_y: 1.0,
        bending_z: 1.0,
        torsion: 1.0,
    };
}

/// Spanwise rigidity profile of one cracked blade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrackProfile {
    c_axial: f64,
    c_bending_y: f64,
    c_bending_z: f64,
    c_torsion: f64,
    gamma0: f64,
    location: f64,
    length_scale: f64,
}

impl CrackProfile {
    pub fn new(
        blade: &BladeGeometry,
        crack: &CrackSpec,
        length_scale: CrackLengthScale,
    ) -> Result<Self> {
        crack.validate("crack", blade)?;
        let intact = blade_section(blade)?;
        let cracked = cracked_blade_section(blade, crack.depth)?;
        let ell = match length_scale {
            CrackLengthScale::Width => blade.width,
            CrackLengthScale::Depth => crack.depth,
        };
        let ratio = |base: f64, cut: f64| (base - cut) / cut;
        Ok(CrackProfile {
            c_axial: ratio(intact.area, cracked.area),
            c_bending_y: ratio(intact.i_y, cracked.i_y),
            c_bending_z: ratio(intact.i_z, cracked.i_z),
            c_torsion: ratio(intact.j_x, cracked.j_x),
            gamma0: crack.gamma0,
            location: crack.location,
            // A zero-depth crack with a depth-based scale has C = 0; any
            // positive length keeps the exponent finite.
            length_scale: if ell > 0.0 { ell } else { blade.width },
        })
    }

    /// Multipliers at span position `x` measured from the blade root.
    pub fn scale_at(&self, x: f64) -> RigidityScale {
        let f = |c| scale_factor(c, self.gamma0, self.location, self.length_scale, x);
        RigidityScale {
            axial: f(self.c_axial),
            bending_y: f(self.c_bending_y),
            bending_z: f(self.c_bending_z),
            torsion: f(self.c_torsion),
        }
    }

    pub fn location(&self) -> f64 {
        self.location
    }
}
