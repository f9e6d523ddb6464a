#![allow(dead_code)]

use rotorsim::Scenario;
use serde_json::{json, Value};

pub const E: f64 = 2e11;
pub const RHO: f64 = 7833.0;
pub const WIDTH: f64 = 0.04;
pub const T1: f64 = 0.00515;
pub const T2: f64 = 0.00065;
pub const BLADE_LENGTH: f64 = 0.4;

pub fn stage(blade_elements: usize) -> Value {
    json!({
        "shaft": {"d_out": 0.025, "d_in": 0.015, "length": 0.5, "n_elements": 1},
        "disk": {"diameter": 0.35, "thickness": 0.02, "density": 4430.0},
        "blades": {"width": WIDTH, "t1": T1, "t2": T2, "length": BLADE_LENGTH,
                   "n_elements": blade_elements, "count": 8, "downwash_angle": 0.3}
    })
}

/// Single-stage rotor at 6000 RPM, no faults.
pub fn base(duration: f64) -> Value {
    json!({
        "stages": [stage(2)],
        "material": {"young_modulus": E, "poisson": 0.31, "density": RHO},
        "aero": {"air_density": 1.22, "freestream": 200.0, "c_lift": 0.02, "c_drag": 0.03},
        "rpm": {"rpm": 6000.0, "ramp_time": 0.2},
        "solver": {"dt": 1e-4, "duration": duration}
    })
}

pub fn scenario(value: Value) -> Scenario {
    Scenario::from_json(&value.to_string()).unwrap().resolve().unwrap()
}
