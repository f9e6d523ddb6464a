//! Global assembly of the shaft, disks and rotating blade rings.
//!
//! The shaft runs along global `X`. Stage `k`'s disk and blades hang on the
//! node closing shaft segment `k`; blade roots share that node's six DOFs.
//! Blade `j` of a stage with `N` blades sits at angle
//! `θ_j(t) = θ_S(t) + (j - 1) 2π / N`, and its element matrices and loads are
//! rotated into the global frame by `T_f(θ_j)` at every assembly.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::elements::{
    blade_element, centrifugal_stiffness, shaft_element, ElementContext, ElementMatrices, Matrix12, Vector12, RY, RZ, UY, UZ,
};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::loads::{consistent_nodal_loads, hermite, AeroEnvironment};
use crate::sections::{
    blade_section, disk_inertia, shaft_section, BladeGeometry, CrackLengthScale, CrackProfile,
    CrackSpec, DiskGeometry, DiskInertiaConvention, MaterialProperties, SectionProperties,
    ShaftGeometry,
};

/// Linear speed ramp from rest to `omega_target` over `ramp_time`, then
/// constant speed.
///
/// Scenario files give the target either as `omega_target` (rad/s) or as
/// `rpm`; the serialized form always carries `omega_target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RpmSpec")]
pub struct RpmProfile {
    /// rad/s
    pub omega_target: f64,
    /// s
    pub ramp_time: f64,
}

pub const DEFAULT_RAMP_TIME: f64 = 0.2;

fn default_ramp_time() -> f64 {
    DEFAULT_RAMP_TIME
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RpmSpec {
    #[serde(default)]
    rpm: Option<f64>,
    #[serde(default)]
    omega_target: Option<f64>,
    #[serde(default = "default_ramp_time")]
    ramp_time: f64,
}

impl TryFrom<RpmSpec> for RpmProfile {
    type Error = String;

    fn try_from(spec: RpmSpec) -> std::result::Result<Self, String> {
        let omega_target = match (spec.rpm, spec.omega_target) {
            (Some(rpm), None) => rpm * 2.0 * PI / 60.0,
            (None, Some(w)) => w,
            (Some(_), Some(_)) => return Err("rpm: give either `rpm` or `omega_target`, not both".into()),
            (None, None) => return Err("rpm: missing `rpm` or `omega_target`".into()),
        };
        Ok(RpmProfile {
            omega_target,
            ramp_time: spec.ramp_time,
        })
    }
}

impl RpmProfile {
    pub fn from_rpm(rpm: f64, ramp_time: f64) -> Self {
        RpmProfile {
            omega_target: rpm * 2.0 * PI / 60.0,
            ramp_time,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        require_non_negative(&format!("{field}.omega_target"), self.omega_target)?;
        require_positive(&format!("{field}.ramp_time"), self.ramp_time)
    }

    /// Shaft speed (rad/s).
    pub fn omega_at(&self, t: f64) -> f64 {
        if t < self.ramp_time {
            self.omega_target * t.max(0.0) / self.ramp_time
        } else {
            self.omega_target
        }
    }

    /// Shaft angle `θ_S(t)` (rad), the integral of [`Self::omega_at`].
    pub fn angle_at(&self, t: f64) -> f64 {
        let w = self.omega_target;
        if t < self.ramp_time {
            let t = t.max(0.0);
            w * t * t / (2.0 * self.ramp_time)
        } else {
            w * self.ramp_time / 2.0 + w * (t - self.ramp_time)
        }
    }

    /// Angular acceleration (rad/s²).
    pub fn acceleration_at(&self, t: f64) -> f64 {
        if (0.0..self.ramp_time).contains(&t) {
            self.omega_target / self.ramp_time
        } else {
            0.0
        }
    }

    /// Rotation frequency at full speed (Hz).
    pub fn rotation_frequency(&self) -> f64 {
        self.omega_target / (2.0 * PI)
    }
}

/// Angular position of blade `blade` (1-based) out of `count`.
pub fn blade_angle(t: f64, blade: usize, count: usize, profile: &RpmProfile) -> f64 {
    profile.angle_at(t) + (blade as f64 - 1.0) * 2.0 * PI / count as f64
}

/// Direction cosines from the global frame to a blade frame at angle `theta`.
pub fn rotation_block(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(0.0, -s, c, 0.0, c, s, -1.0, 0.0, 0.0)
}

/// Block-diagonal `T_f` with four copies of [`rotation_block`];
/// `u_local = T_f u_global`.
pub fn transformation(theta: f64) -> Matrix12 {
    let t = rotation_block(theta);
    let mut tf = Matrix12::zeros();
    for b in 0..4 {
        tf.fixed_view_mut::<3, 3>(3 * b, 3 * b).copy_from(&t);
    }
    tf
}

/// Support of the shaft root node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// All six DOFs fixed.
    #[default]
    Clamped,
    /// Translations and the spin-axis rotation fixed; bending rotations free.
    Pinned,
}

impl BoundaryCondition {
    fn fixed(self) -> [bool; 6] {
        match self {
            BoundaryCondition::Clamped => [true; 6],
            BoundaryCondition::Pinned => [true, true, true, true, false, false],
        }
    }
}

/// Modelling switches that have no counterpart in the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelOptions {
    pub boundary: BoundaryCondition,
    pub disk_inertia: DiskInertiaConvention,
    /// Lump the disk mass on the hub translations as well as its polar inertia.
    pub disk_translational_mass: bool,
    pub crack_length_scale: CrackLengthScale,
    /// Stiffen blade bending with the geometric stiffness of the centrifugal
    /// tension. Without it the rotating blade matrices carry spin softening
    /// alone and the rotor diverges above a few thousand RPM.
    pub centrifugal_stiffening: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            boundary: BoundaryCondition::Clamped,
            disk_inertia: DiskInertiaConvention::MassMoment,
            disk_translational_mass: true,
            crack_length_scale: CrackLengthScale::Width,
            centrifugal_stiffening: true,
        }
    }
}

/// One shaft segment with the disk and blade ring at its outboard end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub shaft: ShaftGeometry,
    pub disk: DiskGeometry,
    pub blades: BladeGeometry,
}

impl StageConfig {
    pub fn validate(&self, field: &str) -> Result<()> {
        self.shaft.validate(&format!("{field}.shaft"))?;
        self.disk.validate(&format!("{field}.disk"), &self.shaft)?;
        self.blades.validate(&format!("{field}.blades"))
    }
}

/// Maps every active node's six DOFs to global free-DOF indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    node_dofs: Vec<[Option<usize>; 6]>,
    n_free: usize,
    hubs: Vec<usize>,
    shaft_nodes: Vec<usize>,
    blades: Vec<Vec<Vec<usize>>>,
}

impl DofMap {
    pub fn n_free(&self) -> usize {
        self.n_free
    }

    /// Global index of DOF `local` (0..6) of `node`, `None` when constrained
    /// or inactive.
    pub fn dof(&self, node: usize, local: usize) -> Option<usize> {
        self.node_dofs.get(node).and_then(|d| d[local])
    }

    pub fn element_dofs(&self, a: usize, b: usize) -> [Option<usize>; 12] {
        let mut out = [None; 12];
        out[..6].copy_from_slice(&self.node_dofs[a]);
        out[6..].copy_from_slice(&self.node_dofs[b]);
        out
    }

    /// Node carrying stage `stage`'s disk and blade roots (1-based stage).
    pub fn hub_node(&self, stage: usize) -> usize {
        self.hubs[stage - 1]
    }

    pub fn stage_count(&self) -> usize {
        self.hubs.len()
    }

    pub fn shaft_nodes(&self) -> &[usize] {
        &self.shaft_nodes
    }

    pub fn shaft_tip_node(&self) -> usize {
        *self.shaft_nodes.last().expect("shaft has nodes")
    }

    /// Free `(Y, Z)` index pairs of every node's translations and rotations;
    /// a spin about the shaft axis mixes exactly these pairs.
    pub fn spin_pairs(&self) -> Vec<(usize, usize)> {
        self.node_dofs
            .iter()
            .flat_map(|d| [(d[UY], d[UZ]), (d[RY], d[RZ])])
            .filter_map(|pair| match pair {
                (Some(y), Some(z)) => Some((y, z)),
                _ => None,
            })
            .collect()
    }

    /// Nodes of one blade from root (the hub) to tip, both indices 1-based.
    pub fn blade_nodes(&self, stage: usize, blade: usize) -> &[usize] {
        &self.blades[stage - 1][blade - 1]
    }
}

/// Global matrices at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub mass: DMatrix<f64>,
    pub damping: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub force: DVector<f64>,
    pub time: f64,
    /// Rayleigh coefficients `C = a0 M + a1 K`.
    pub a0: f64,
    pub a1: f64,
}

impl SystemMatrices {
    /// Matrices without damping or load, for modal analysis.
    pub fn undamped(mass: DMatrix<f64>, stiffness: DMatrix<f64>) -> Self {
        let n = mass.nrows();
        SystemMatrices {
            damping: DMatrix::zeros(n, n),
            force: DVector::zeros(n),
            mass,
            stiffness,
            time: 0.0,
            a0: 0.0,
            a1: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn set_rayleigh(&mut self, a0: f64, a1: f64) {
        self.a0 = a0;
        self.a1 = a1;
        self.damping = &self.mass * a0 + &self.stiffness * a1;
    }
}

/// Rayleigh coefficients `(a0, a1)` giving damping ratio `zeta` at the two
/// circular frequencies.
pub fn rayleigh_coefficients(zeta: f64, omega_i: f64, omega_j: f64) -> Result<(f64, f64)> {
    require_non_negative("damping.zeta", zeta)?;
    require_positive("damping.omega_i", omega_i)?;
    require_positive("damping.omega_j", omega_j)?;
    if omega_i == omega_j {
        return Err(Error::validation(
            "damping.mode_pair",
            "anchor frequencies coincide; pick two distinct modes",
        ));
    }
    let sum = omega_i + omega_j;
    Ok((2.0 * zeta * omega_i * omega_j / sum, 2.0 * zeta / sum))
}

/// Modal damping ratio of a Rayleigh model at circular frequency `omega`.
pub fn rayleigh_ratio(a0: f64, a1: f64, omega: f64) -> f64 {
    a0 / (2.0 * omega) + a1 * omega / 2.0
}

/// Rayleigh damping anchored at modes `mode_pair` (1-based) of `(M, K)`.
pub fn rayleigh_damping(
    mass: &DMatrix<f64>,
    stiffness: &DMatrix<f64>,
    zeta: f64,
    mode_pair: (usize, usize),
) -> Result<(f64, f64, DMatrix<f64>)> {
    let (i, j) = mode_pair;
    if i == 0 || j == 0 || i == j {
        return Err(Error::validation(
            "damping.mode_pair",
            format!("mode pair ({i}, {j}) must be two distinct 1-based modes"),
        ));
    }
    let system = SystemMatrices::undamped(mass.clone(), stiffness.clone());
    let modes = crate::solver::modal_analysis(&system, i.max(j))?;
    let w = |k: usize| -> Result<f64> {
        modes
            .frequencies_hz
            .get(k - 1)
            .map(|f| 2.0 * PI * f)
            .ok_or_else(|| {
                Error::validation("damping.mode_pair", format!("mode {k} exceeds the model size"))
            })
    };
    let (a0, a1) = rayleigh_coefficients(zeta, w(i)?, w(j)?)?;
    Ok((a0, a1, mass * a0 + stiffness * a1))
}

#[derive(Debug, Clone)]
struct ShaftElement {
    nodes: (usize, usize),
    matrices: ElementMatrices,
}

#[derive(Debug, Clone)]
struct BladeElement {
    ctx: ElementContext,
    matrices: ElementMatrices,
    /// Load at ω = 0 (free stream only).
    load_still: Vector12,
    /// Coefficient of ω² in the load.
    load_omega2: Vector12,
    /// Coefficient of ω² in the tension stiffness of the bare blade.
    geometric: Matrix12,
    /// Extra coefficient of ω² per kilogram carried at the tip.
    geometric_tip: Matrix12,
}

/// One blade as currently meshed.
#[derive(Debug, Clone)]
struct BladeMesh {
    stage: usize,
    geometry: BladeGeometry,
    angle_offset: f64,
    disk_diameter: f64,
    crack: Option<CrackProfile>,
    length: f64,
    nodes: Vec<usize>,
    elements: Vec<BladeElement>,
    tip_mass: f64,
}

impl BladeMesh {
    fn element(
        &self,
        index: usize,
        start: f64,
        length: f64,
        section: SectionProperties,
        material: MaterialProperties,
        aero: &AeroEnvironment,
    ) -> Result<BladeElement> {
        let ctx = ElementContext {
            index,
            start,
            length,
            member_length: self.length,
            section,
            material,
            crack: self.crack,
        };
        let matrices = blade_element(&ctx)?;
        let still = consistent_nodal_loads(&ctx, &self.geometry, aero, 0.0, self.disk_diameter).values;
        let unit = consistent_nodal_loads(&ctx, &self.geometry, aero, 1.0, self.disk_diameter).values;
        let root = 0.5 * self.disk_diameter;
        let geometric = centrifugal_stiffness(&ctx, root, 0.0)?;
        let geometric_tip = centrifugal_stiffness(&ctx, root, 1.0)? - geometric;
        Ok(BladeElement {
            ctx,
            matrices,
            load_still: still,
            load_omega2: unit - still,
            geometric,
            geometric_tip,
        })
    }
}

/// Linear map from an old state vector onto the DOFs of a rebuilt model.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTransfer {
    rows: Vec<Vec<(usize, f64)>>,
}

impl StateTransfer {
    pub fn apply(&self, old: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| row.iter().map(|&(k, c)| c * old[k]).sum()),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Assembled rotor: shaft, disks and blade rings, with damage applied.
#[derive(Debug, Clone)]
pub struct RotorModel {
    material: MaterialProperties,
    aero: AeroEnvironment,
    rpm: RpmProfile,
    options: ModelOptions,
    shaft: Vec<ShaftElement>,
    blades: Vec<BladeMesh>,
    active: Vec<bool>,
    hubs: Vec<usize>,
    shaft_nodes: Vec<usize>,
    blade_counts: Vec<usize>,
    static_mass: f64,
    dofs: DofMap,
    rayleigh: (f64, f64),
}

impl RotorModel {
    pub fn new(
        stages: &[StageConfig],
        material: MaterialProperties,
        aero: AeroEnvironment,
        rpm: RpmProfile,
        cracks: &[CrackSpec],
        options: ModelOptions,
    ) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::validation("stages", "at least one stage is required"));
        }
        material.validate("material")?;
        aero.validate("aero")?;
        rpm.validate("rpm")?;
        for (k, stage) in stages.iter().enumerate() {
            stage.validate(&format!("stages[{k}]"))?;
        }
        for (c, crack) in cracks.iter().enumerate() {
            let field = format!("cracks[{c}]");
            let stage = crack
                .stage
                .checked_sub(1)
                .and_then(|k| stages.get(k))
                .ok_or_else(|| Error::validation(format!("{field}.stage"), format!("no stage {}", crack.stage)))?;
            if crack.blade == 0 || crack.blade > stage.blades.count {
                return Err(Error::validation(
                    format!("{field}.blade"),
                    format!("stage {} has no blade {}", crack.stage, crack.blade),
                ));
            }
            crack.validate(&field, &stage.blades)?;
            if cracks[..c].iter().any(|o| o.stage == crack.stage && o.blade == crack.blade) {
                return Err(Error::validation(
                    format!("{field}.blade"),
                    "at most one crack per blade",
                ));
            }
        }

        let mut node_count = 1;
        let mut shaft = Vec::new();
        let mut shaft_nodes = vec![0];
        let mut hubs = Vec::new();
        let mut static_mass = 0.0;
        for stage in stages {
            let section = shaft_section(&stage.shaft)?;
            let disk = disk_inertia(&stage.disk, &stage.shaft, options.disk_inertia)?;
            let lumped = crate::sections::DiskInertia {
                mass: if options.disk_translational_mass { disk.mass } else { 0.0 },
                polar_inertia: disk.polar_inertia,
            };
            static_mass += material.density * section.area * stage.shaft.length + lumped.mass;
            let n = stage.shaft.n_elements;
            for e in 1..=n {
                let ctx = ElementContext::uniform(e, n, stage.shaft.length, section, material, None);
                let matrices = shaft_element(&ctx, (e == n).then_some(lumped))?;
                let a = *shaft_nodes.last().unwrap();
                shaft.push(ShaftElement {
                    nodes: (a, node_count),
                    matrices,
                });
                shaft_nodes.push(node_count);
                node_count += 1;
            }
            hubs.push(*shaft_nodes.last().unwrap());
        }

        let mut blades = Vec::new();
        for (k, stage) in stages.iter().enumerate() {
            let geom = stage.blades;
            let section = blade_section(&geom)?;
            for j in 1..=geom.count {
                let crack = cracks
                    .iter()
                    .find(|c| c.stage == k + 1 && c.blade == j)
                    .map(|c| CrackProfile::new(&geom, c, options.crack_length_scale))
                    .transpose()?;
                let mut nodes = vec![hubs[k]];
                for _ in 0..geom.n_elements {
                    nodes.push(node_count);
                    node_count += 1;
                }
                let mut mesh = BladeMesh {
                    stage: k + 1,
                    geometry: geom,
                    angle_offset: (j as f64 - 1.0) * 2.0 * PI / geom.count as f64,
                    disk_diameter: stage.disk.diameter,
                    crack,
                    length: geom.length,
                    nodes,
                    elements: Vec::new(),
                    tip_mass: 0.0,
                };
                let le = geom.element_length();
                for e in 0..geom.n_elements {
                    let el = mesh.element(e + 1, e as f64 * le, le, section, material, &aero)?;
                    mesh.elements.push(el);
                }
                blades.push(mesh);
            }
        }

        let mut model = RotorModel {
            material,
            aero,
            rpm,
            options,
            shaft,
            blades,
            active: vec![true; node_count],
            hubs,
            shaft_nodes,
            blade_counts: stages.iter().map(|s| s.blades.count).collect(),
            static_mass,
            dofs: DofMap {
                node_dofs: Vec::new(),
                n_free: 0,
                hubs: Vec::new(),
                shaft_nodes: Vec::new(),
                blades: Vec::new(),
            },
            rayleigh: (0.0, 0.0),
        };
        model.rebuild_dofs();
        Ok(model)
    }

    fn rebuild_dofs(&mut self) {
        let fixed = self.options.boundary.fixed();
        let mut next = 0;
        let node_dofs = (0..self.active.len())
            .map(|node| {
                let mut d = [None; 6];
                if self.active[node] {
                    for (k, slot) in d.iter_mut().enumerate() {
                        if !(node == 0 && fixed[k]) {
                            *slot = Some(next);
                            next += 1;
                        }
                    }
                }
                d
            })
            .collect();
        let mut blades: Vec<Vec<Vec<usize>>> = vec![Vec::new(); self.hubs.len()];
        for b in &self.blades {
            blades[b.stage - 1].push(b.nodes.clone());
        }
        self.dofs = DofMap {
            node_dofs,
            n_free: next,
            hubs: self.hubs.clone(),
            shaft_nodes: self.shaft_nodes.clone(),
            blades,
        };
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn rpm(&self) -> &RpmProfile {
        &self.rpm
    }

    pub fn options(&self) -> &ModelOptions {
        &self.options
    }

    pub fn blade_count(&self, stage: usize) -> usize {
        self.blade_counts[stage - 1]
    }

    fn blade_index(&self, stage: usize, blade: usize) -> Result<usize> {
        if stage == 0 || stage > self.blade_counts.len() {
            return Err(Error::validation("stage", format!("no stage {stage}")));
        }
        if blade == 0 || blade > self.blade_counts[stage - 1] {
            return Err(Error::validation("blade", format!("stage {stage} has no blade {blade}")));
        }
        Ok(self.blade_counts[..stage - 1].iter().sum::<usize>() + blade - 1)
    }

    /// Current span of a blade (m).
    pub fn blade_length(&self, stage: usize, blade: usize) -> Result<f64> {
        Ok(self.blades[self.blade_index(stage, blade)?].length)
    }

    /// Global angle of a blade at time `t`.
    pub fn blade_angle(&self, stage: usize, blade: usize, t: f64) -> Result<f64> {
        let b = &self.blades[self.blade_index(stage, blade)?];
        Ok(self.rpm.angle_at(t) + b.angle_offset)
    }

    /// Tip node of a blade.
    pub fn blade_tip(&self, stage: usize, blade: usize) -> Result<usize> {
        Ok(*self.blades[self.blade_index(stage, blade)?].nodes.last().unwrap())
    }

    /// Total structural mass including severed-blade losses and stuck masses.
    pub fn total_mass(&self) -> f64 {
        self.static_mass
            + self
                .blades
                .iter()
                .map(|b| {
                    let area = b.elements.first().map_or(0.0, |e| e.ctx.section.area);
                    self.material.density * area * b.length + b.tip_mass
                })
                .sum::<f64>()
    }

    pub fn set_rayleigh(&mut self, a0: f64, a1: f64) {
        self.rayleigh = (a0, a1);
    }

    pub fn rayleigh(&self) -> (f64, f64) {
        self.rayleigh
    }

    /// Anchors Rayleigh damping on modes of the model assembled at `t`.
    pub fn calibrate_damping(&mut self, zeta: f64, mode_pair: (usize, usize), t: f64) -> Result<(f64, f64)> {
        let sys = self.assemble(t);
        let (a0, a1, _) = rayleigh_damping(&sys.mass, &sys.stiffness, zeta, mode_pair)?;
        self.rayleigh = (a0, a1);
        Ok((a0, a1))
    }

    /// Global mass, damping, stiffness and load at time `t`.
    pub fn assemble(&self, t: f64) -> SystemMatrices {
        let n = self.dofs.n_free;
        let mut mass = DMatrix::zeros(n, n);
        let mut stiffness = DMatrix::zeros(n, n);
        let mut force = DVector::zeros(n);
        for e in &self.shaft {
            let dofs = self.dofs.element_dofs(e.nodes.0, e.nodes.1);
            scatter(&mut mass, &dofs, &e.matrices.mass);
            scatter(&mut stiffness, &dofs, &e.matrices.stiffness);
        }
        let omega = self.rpm.omega_at(t);
        let theta_s = self.rpm.angle_at(t);
        for b in &self.blades {
            let theta = theta_s + b.angle_offset;
            let tf = transformation(theta);
            let tft = tf.transpose();
            for (k, e) in b.elements.iter().enumerate() {
                let dofs = self.dofs.element_dofs(b.nodes[k], b.nodes[k + 1]);
                let mut k_local = e.matrices.stiffness;
                if self.options.centrifugal_stiffening {
                    k_local += (e.geometric + e.geometric_tip * b.tip_mass) * (omega * omega);
                }
                scatter(&mut mass, &dofs, &(tft * e.matrices.mass * tf));
                scatter(&mut stiffness, &dofs, &(tft * k_local * tf));
                let f = tft * (e.load_still + e.load_omega2 * (omega * omega));
                for (i, d) in dofs.iter().enumerate() {
                    if let Some(d) = d {
                        force[*d] += f[i];
                    }
                }
            }
            if b.tip_mass > 0.0 {
                let tip = *b.nodes.last().unwrap();
                let radius = 0.5 * b.disk_diameter + b.length;
                let pull = b.tip_mass * omega * omega * radius;
                let radial = rotation_block(theta).row(0).transpose();
                for axis in 0..3 {
                    if let Some(d) = self.dofs.dof(tip, axis) {
                        mass[(d, d)] += b.tip_mass;
                        force[d] += pull * radial[axis];
                    }
                }
            }
        }
        let (a0, a1) = self.rayleigh;
        let damping = if a0 == 0.0 && a1 == 0.0 {
            DMatrix::zeros(n, n)
        } else {
            &mass * a0 + &stiffness * a1
        };
        SystemMatrices {
            mass,
            damping,
            stiffness,
            force,
            time: t,
            a0,
            a1,
        }
    }

    /// Attaches a point mass at a blade tip; it rotates with the blade and
    /// loads it centrifugally.
    pub fn attach_tip_mass(&mut self, stage: usize, blade: usize, mass: f64) -> Result<()> {
        require_non_negative("fod.mass", mass)?;
        let i = self.blade_index(stage, blade)?;
        self.blades[i].tip_mass += mass;
        Ok(())
    }

    /// Cuts a blade at `break_location` from its root at time `t`.
    ///
    /// Elements outboard of the cut are removed and the element containing it
    /// is shortened. The returned transfer keeps surviving DOFs and
    /// interpolates the new tip node from the pre-cut element shape.
    pub fn sever_blade(&mut self, stage: usize, blade: usize, break_location: f64, t: f64) -> Result<StateTransfer> {
        let i = self.blade_index(stage, blade)?;
        let length = self.blades[i].length;
        if !(break_location > 0.0 && break_location < length) {
            return Err(Error::validation(
                "fbo.break_location",
                format!("break location {break_location} must lie strictly inside the blade span (0, {length})"),
            ));
        }
        let old = self.dofs.clone();
        let theta = self.rpm.angle_at(t) + self.blades[i].angle_offset;
        let material = self.material;
        let aero = self.aero;
        let mesh = &mut self.blades[i];
        let tol = 1e-12 * length;
        let e = mesh
            .elements
            .iter()
            .position(|el| break_location <= el.ctx.start + el.ctx.length + tol)
            .expect("break lies inside the span");
        let el = &mesh.elements[e];
        let local_cut = break_location - el.ctx.start;
        let partial = local_cut < el.ctx.length - tol;
        let cut_node = mesh.nodes[e + 1];
        let interpolation = partial.then(|| {
            let shape = interpolation_matrix(local_cut, el.ctx.length);
            let tf = transformation(theta);
            let t3 = rotation_block(theta).transpose();
            let mut back = nalgebra::SMatrix::<f64, 6, 6>::zeros();
            back.fixed_view_mut::<3, 3>(0, 0).copy_from(&t3);
            back.fixed_view_mut::<3, 3>(3, 3).copy_from(&t3);
            (back * shape * tf, old.element_dofs(mesh.nodes[e], cut_node))
        });

        for &node in &mesh.nodes[e + 2..] {
            self.active[node] = false;
        }
        mesh.nodes.truncate(e + 2);
        mesh.elements.truncate(e + 1);
        mesh.length = if partial { break_location } else { mesh.elements[e].ctx.start + mesh.elements[e].ctx.length };
        mesh.tip_mass = 0.0;
        let section = mesh.elements[e].ctx.section;
        let start = mesh.elements[e].ctx.start;
        let new_len = mesh.length - start;
        let rebuilt: Result<Vec<BladeElement>> = (0..=e)
            .map(|k| {
                let c = mesh.elements[k].ctx;
                let len = if k == e { new_len } else { c.length };
                mesh.element(k + 1, c.start, len, section, material, &aero)
            })
            .collect();
        mesh.elements = rebuilt?;
        self.rebuild_dofs();

        let mut rows = vec![Vec::new(); self.dofs.n_free];
        for node in 0..self.active.len() {
            for k in 0..6 {
                let Some(new) = self.dofs.dof(node, k) else { continue };
                rows[new] = match (&interpolation, node == cut_node) {
                    (Some((p, old_dofs)), true) => (0..12)
                        .filter_map(|c| old_dofs[c].map(|d| (d, p[(k, c)])))
                        .filter(|&(_, v)| v != 0.0)
                        .collect(),
                    _ => vec![(old.dof(node, k).expect("surviving DOF existed before"), 1.0)],
                };
            }
        }
        Ok(StateTransfer { rows })
    }
}

/// Local-frame interpolation of node state at `x` from the two end nodes of
/// an element of length `l` (6 × 12, rows in local DOF order).
fn interpolation_matrix(x: f64, l: f64) -> nalgebra::SMatrix<f64, 6, 12> {
    use crate::elements::hermite_slopes;
    let mut p = nalgebra::SMatrix::<f64, 6, 12>::zeros();
    let xi = x / l;
    let (n1, n2) = (1.0 - xi, xi);
    for axis in [0usize, 3] {
        p[(axis, axis)] = n1;
        p[(axis, 6 + axis)] = n2;
    }
    let h = hermite(x, l);
    let dh = hermite_slopes(x, l);
    // v = H1 v1 + H2 θz1 + H3 v2 + H4 θz2, θz = v'
    for (row, f) in [(1usize, h), (5, dh)] {
        p[(row, 1)] = f[0];
        p[(row, 5)] = f[1];
        p[(row, 7)] = f[2];
        p[(row, 11)] = f[3];
    }
    // w = H1 w1 - H2 θy1 + H3 w2 - H4 θy2, θy = -w'
    for (row, f, sign) in [(2usize, h, 1.0), (4, dh, -1.0)] {
        p[(row, 2)] = sign * f[0];
        p[(row, 4)] = -sign * f[1];
        p[(row, 8)] = sign * f[2];
        p[(row, 10)] = -sign * f[3];
    }
    p
}

fn scatter(global: &mut DMatrix<f64>, dofs: &[Option<usize>; 12], local: &Matrix12) {
    for (a, da) in dofs.iter().enumerate() {
        let Some(i) = *da else { continue };
        for (b, db) in dofs.iter().enumerate() {
            if let Some(j) = *db {
                global[(i, j)] += local[(a, b)];
            }
        }
    }
}

/// A cantilevered blade alone in its own frame, root clamped.
pub fn blade_cantilever(
    blade: &BladeGeometry,
    material: &MaterialProperties,
    crack: Option<&CrackSpec>,
    length_scale: CrackLengthScale,
) -> Result<SystemMatrices> {
    material.validate("material")?;
    let section = blade_section(blade)?;
    let profile = crack.map(|c| CrackProfile::new(blade, c, length_scale)).transpose()?;
    let n = blade.n_elements;
    let elements = (1..=n)
        .map(|e| {
            let ctx = ElementContext::uniform(e, n, blade.length, section, *material, profile);
            blade_element(&ctx).map(|m| ((e - 1, e), m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chain(n + 1, &elements, [true; 6]))
}

/// The shaft segments alone (no disks or blades) with the configured root
/// support.
pub fn shaft_alone(
    stages: &[StageConfig],
    material: &MaterialProperties,
    boundary: BoundaryCondition,
) -> Result<SystemMatrices> {
    material.validate("material")?;
    let mut elements = Vec::new();
    let mut node = 0;
    for stage in stages {
        let section = shaft_section(&stage.shaft)?;
        let n = stage.shaft.n_elements;
        for e in 1..=n {
            let ctx = ElementContext::uniform(e, n, stage.shaft.length, section, *material, None);
            elements.push(((node, node + 1), shaft_element(&ctx, None)?));
            node += 1;
        }
    }
    if elements.is_empty() {
        return Err(Error::validation("stages", "at least one stage is required"));
    }
    Ok(chain(node + 1, &elements, boundary.fixed()))
}

/// Assembles a chain of elements with node 0 constrained by `fixed`.
fn chain(nodes: usize, elements: &[((usize, usize), ElementMatrices)], fixed: [bool; 6]) -> SystemMatrices {
    let mut next = 0;
    let node_dofs: Vec<[Option<usize>; 6]> = (0..nodes)
        .map(|node| {
            let mut d = [None; 6];
            for (k, slot) in d.iter_mut().enumerate() {
                if !(node == 0 && fixed[k]) {
                    *slot = Some(next);
                    next += 1;
                }
            }
            d
        })
        .collect();
    let mut mass = DMatrix::zeros(next, next);
    let mut stiffness = DMatrix::zeros(next, next);
    for ((a, b), m) in elements {
        let mut dofs = [None; 12];
        dofs[..6].copy_from_slice(&node_dofs[*a]);
        dofs[6..].copy_from_slice(&node_dofs[*b]);
        scatter(&mut mass, &dofs, &m.mass);
        scatter(&mut stiffness, &dofs, &m.stiffness);
    }
    SystemMatrices::undamped(mass, stiffness)
}
