//! Drive protocol and its compilation into a layered gate program.
//!
//! Gate conventions: `RZ(θ) = exp(-iθZ/2)`, `RY(θ) = exp(-iθY/2)`,
//! `RXX(θ) = exp(-iθ X⊗X / 2)`.
//!
//! The compiled program is: one `RY(θ_β)` preparation layer, a full
//! measurement tagged `x`, the Trotter body, and a full measurement tagged
//! `y`. In the body the half-step diagonal evolutions of neighbouring Trotter
//! steps are merged, giving `n_T + 1` RZ layers (angle `-Δt` at both ends,
//! `-2Δt` inside) interleaved with `c` RXX layers per step.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CostReport, EdgeColoring, GateTally, Graph};

/// Protocol tuple `(β, τ, γ, n_T)`; units with ħ = k_B = 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub beta: f64,
    pub tau: f64,
    pub gamma: f64,
    pub n_trotter: usize,
}

impl DriveParams {
    pub fn new(beta: f64, tau: f64, gamma: f64, n_trotter: usize) -> Result<Self> {
        let p = DriveParams {
            beta,
            tau,
            gamma,
            n_trotter,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.n_trotter == 0 {
            return Err(Error::InvalidParameter("n_T must be at least 1".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be >= 0, got {}",
                self.beta
            )));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("gamma must be finite".into()));
        }
        Ok(())
    }

    /// Trotter step `Δt = τ / n_T`.
    pub fn dt(&self) -> f64 {
        self.tau / self.n_trotter as f64
    }

    /// Midpoint time `t_ℓ = (ℓ + ½) Δt` of step `ℓ`.
    pub fn step_midpoint(&self, step: usize) -> f64 {
        (step as f64 + 0.5) * self.dt()
    }

    /// Drive amplitude `λ_t = γ sin(π t / τ)`.
    pub fn lambda(&self, t: f64) -> f64 {
        self.gamma * (PI * t / self.tau).sin()
    }
}

/// Single-qubit Gibbs probability of `|0⟩` under `H₀ = -ΣZ`.
pub fn ground_probability(beta: f64) -> f64 {
    // e^β / (e^β + e^-β), written to stay finite for large β
    1.0 / (1.0 + (-2.0 * beta).exp())
}

/// Angle `θ_β ∈ [0, π]` with `cos²(θ_β/2)` equal to the Gibbs weight of `|0⟩`.
pub fn prep_angle(beta: f64) -> f64 {
    2.0 * ground_probability(beta).sqrt().clamp(0.0, 1.0).acos()
}

/// Drive weights `w_ℓ = γ sin(π t_ℓ / τ)` at the step midpoints.
pub fn trotter_weights(p: &DriveParams) -> Vec<f64> {
    (0..p.n_trotter).map(|l| p.lambda(p.step_midpoint(l))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureTag {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, theta: f64 },
    Rz { qubit: usize, theta: f64 },
    Rxx { qubits: (usize, usize), theta: f64 },
    MeasureAll { tag: MeasureTag },
}

/// A compiled program as a sequence of layers; gates within one layer act
/// on disjoint qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateProgram {
    n_qubits: usize,
    layers: Vec<Vec<Gate>>,
}

/// Serialized instruction: `{layer, op, qubits, angle, tag}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct InstructionRecord {
    layer: usize,
    op: String,
    qubits: Vec<usize>,
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<MeasureTag>,
}

impl GateProgram {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn instructions(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// Layers strictly between the `x` and `y` measurements, i.e. the
    /// Trotterized drive `U_{τ,n_T,γ}`. Without measurements, every layer.
    pub fn drive_layers(&self) -> &[Vec<Gate>] {
        let is_measure = |l: &Vec<Gate>| matches!(l.first(), Some(Gate::MeasureAll { .. }));
        let first = self.layers.iter().position(is_measure);
        let last = self.layers.iter().rposition(is_measure);
        match (first, last) {
            (Some(a), Some(b)) if a < b => &self.layers[a + 1..b],
            _ => &self.layers,
        }
    }

    /// Program containing only the drive layers.
    pub fn drive_only(&self) -> GateProgram {
        GateProgram {
            n_qubits: self.n_qubits,
            layers: self.drive_layers().to_vec(),
        }
    }

    /// Gate and layer counts per gate type, in the layout of [`CostReport`].
    pub fn tally(&self, n_edges: usize, n_colors: usize, n_trotter: usize) -> CostReport {
        let mut ry = GateTally { count: 0, layers: 0 };
        let mut rz = ry;
        let mut rxx = ry;
        let mut mid = ry;
        let mut fin = ry;
        for layer in &self.layers {
            let slot = match layer.first() {
                Some(Gate::Ry { .. }) => &mut ry,
                Some(Gate::Rz { .. }) => &mut rz,
                Some(Gate::Rxx { .. }) => &mut rxx,
                Some(Gate::MeasureAll { tag: MeasureTag::X }) => &mut mid,
                Some(Gate::MeasureAll { tag: MeasureTag::Y }) => &mut fin,
                None => continue,
            };
            slot.layers += 1;
            slot.count += match layer.first() {
                Some(Gate::MeasureAll { .. }) => self.n_qubits,
                _ => layer.len(),
            };
        }
        let parts = [ry, mid, rz, rxx, fin];
        CostReport {
            n_qubits: self.n_qubits,
            n_edges,
            n_colors,
            n_trotter,
            ry,
            mid_measure: mid,
            rz,
            rxx,
            final_measure: fin,
            total_depth: parts.iter().map(|p| p.layers).sum(),
            total_ops: parts.iter().map(|p| p.count).sum(),
        }
    }

    pub fn to_json(&self) -> String {
        let records: Vec<InstructionRecord> = self
            .layers
            .iter()
            .enumerate()
            .flat_map(|(layer, gates)| {
                gates.iter().map(move |g| match *g {
                    Gate::Ry { qubit, theta } => InstructionRecord {
                        layer,
                        op: "ry".into(),
                        qubits: vec![qubit],
                        angle: Some(theta),
                        tag: None,
                    },
                    Gate::Rz { qubit, theta } => InstructionRecord {
                        layer,
                        op: "rz".into(),
                        qubits: vec![qubit],
                        angle: Some(theta),
                        tag: None,
                    },
                    Gate::Rxx { qubits: (a, b), theta } => InstructionRecord {
                        layer,
                        op: "rxx".into(),
                        qubits: vec![a, b],
                        angle: Some(theta),
                        tag: None,
                    },
                    Gate::MeasureAll { tag } => InstructionRecord {
                        layer,
                        op: "measure_all".into(),
                        qubits: (0..self.n_qubits).collect(),
                        angle: None,
                        tag: Some(tag),
                    },
                })
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("program serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<InstructionRecord> = serde_json::from_str(text)?;
        let n_qubits = records
            .iter()
            .flat_map(|r| r.qubits.iter().map(|q| q + 1))
            .max()
            .unwrap_or(0);
        let mut layers: Vec<Vec<Gate>> = Vec::new();
        for r in records {
            let bad = |msg: &str| Error::InvalidParameter(format!("instruction {:?}: {msg}", r.op));
            let angle = || {
                r.angle
                    .filter(|a| a.is_finite())
                    .ok_or_else(|| bad("missing or non-finite angle"))
            };
            let gate = match (r.op.as_str(), r.qubits.as_slice()) {
                ("ry", &[q]) => Gate::Ry { qubit: q, theta: angle()? },
                ("rz", &[q]) => Gate::Rz { qubit: q, theta: angle()? },
                ("rxx", &[a, b]) if a != b => Gate::Rxx {
                    qubits: (a, b),
                    theta: angle()?,
                },
                ("measure_all", _) => Gate::MeasureAll {
                    tag: r.tag.ok_or_else(|| bad("measurement without tag"))?,
                },
                _ => return Err(bad("unknown op or wrong qubit count")),
            };
            if r.layer < layers.len().saturating_sub(1) {
                return Err(bad("layers must appear in order"));
            }
            while layers.len() <= r.layer {
                layers.push(Vec::new());
            }
            layers[r.layer].push(gate);
        }
        Ok(GateProgram { n_qubits, layers })
    }
}

/// Compiles the full two-point-measurement program for `g`.
pub fn build_program(g: &Graph, coloring: &EdgeColoring, p: &DriveParams) -> Result<GateProgram> {
    p.validate()?;
    coloring.validate(g)?;
    if g.n_edges() == 0 {
        return Err(Error::InvalidGraph("drive needs at least one edge".into()));
    }
    let n = g.n_vertices();
    let dt = p.dt();
    let n_edges = g.n_edges() as f64;
    let classes = coloring.classes();

    let rz_layer = |theta: f64| -> Vec<Gate> {
        (0..n).map(|qubit| Gate::Rz { qubit, theta }).collect()
    };

    let mut layers = Vec::with_capacity(4 + (classes.len() + 1) * p.n_trotter);
    let theta_beta = prep_angle(p.beta);
    layers.push((0..n).map(|qubit| Gate::Ry { qubit, theta: theta_beta }).collect());
    layers.push(vec![Gate::MeasureAll { tag: MeasureTag::X }]);

    for (step, w) in trotter_weights(p).into_iter().enumerate() {
        layers.push(rz_layer(if step == 0 { -dt } else { -2.0 * dt }));
        let theta = 2.0 * dt * w / n_edges;
        for class in classes.iter().filter(|c| !c.is_empty()) {
            layers.push(
                class
                    .iter()
                    .map(|&e| Gate::Rxx {
                        qubits: g.edges()[e],
                        theta,
                    })
                    .collect(),
            );
        }
    }
    layers.push(rz_layer(-dt));
    layers.push(vec![Gate::MeasureAll { tag: MeasureTag::Y }]);

    Ok(GateProgram { n_qubits: n, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{circuit_cost, color_edges, heavy_hex_layout};

    #[test]
    fn prep_angle_limits() {
        assert!((prep_angle(0.0) - PI / 2.0).abs() < 1e-15);
        assert!(prep_angle(50.0) < 1e-10);
        // 2 acos(sqrt(e / (e + 1/e)))
        assert!((prep_angle(1.0) - 0.705_026_843_555_238_4).abs() < 1e-12);
        for beta in [0.0, 0.3, 1.0, 4.0] {
            let c = (prep_angle(beta) / 2.0).cos();
            assert!((c * c - ground_probability(beta)).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_are_midpoint_samples() {
        let p = DriveParams::new(1.0, 1.0, 1.0, 1).unwrap();
        assert_eq!(trotter_weights(&p), vec![1.0]);
        let p = DriveParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let w = trotter_weights(&p);
        assert!((w[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((w[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let p = DriveParams::new(1.0, 2.7, 1.3, 9).unwrap();
        let w = trotter_weights(&p);
        for l in 0..9 {
            assert!((w[l] - w[8 - l]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DriveParams::new(1.0, 0.0, 1.0, 1).is_err());
        assert!(DriveParams::new(1.0, 1.0, 1.0, 0).is_err());
        assert!(DriveParams::new(-1.0, 1.0, 1.0, 1).is_err());
        assert!(DriveParams::new(1.0, 1.0, f64::NAN, 1).is_err());
    }

    #[test]
    fn program_matches_cost_table() {
        for (k, nt) in [(1, 1), (3, 4), (6, 10), (15, 29)] {
            let g = heavy_hex_layout(k).unwrap();
            let c = color_edges(&g);
            let p = DriveParams::new(1.0, 1.0, 1.0, nt).unwrap();
            let prog = build_program(&g, &c, &p).unwrap();
            let expected = circuit_cost(&g, nt).unwrap();
            assert_eq!(prog.tally(g.n_edges(), c.n_colors(), nt), expected);
            assert_eq!(prog.depth(), expected.total_depth);
        }
    }

    #[test]
    fn single_step_has_two_boundary_rz_layers() {
        let g = Graph::path(3).unwrap();
        let c = color_edges(&g);
        let p = DriveParams::new(1.0, 0.8, 1.0, 1).unwrap();
        let prog = build_program(&g, &c, &p).unwrap();
        let rz: Vec<f64> = prog
            .layers()
            .iter()
            .filter_map(|l| match l[0] {
                Gate::Rz { theta, .. } => Some(theta),
                _ => None,
            })
            .collect();
        assert_eq!(rz, vec![-0.8, -0.8]);
    }

    #[test]
    fn rxx_angles_bounded() {
        let g = heavy_hex_layout(4).unwrap();
        let c = color_edges(&g);
        let p = DriveParams::new(1.0, 1.7, -2.5, 7).unwrap();
        let bound = 2.0 * p.dt() * p.gamma.abs() / g.n_edges() as f64;
        let prog = build_program(&g, &c, &p).unwrap();
        for gate in prog.instructions() {
            if let Gate::Rxx { qubits, theta } = gate {
                assert!(theta.abs() <= bound + 1e-15);
                assert!(g.edges().contains(qubits));
            }
        }
    }

    #[test]
    fn rejects_foreign_coloring() {
        let g = Graph::path(4).unwrap();
        let other = color_edges(&Graph::path(3).unwrap());
        let p = DriveParams::new(1.0, 1.0, 1.0, 2).unwrap();
        assert!(build_program(&g, &other, &p).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = heavy_hex_layout(2).unwrap();
        let c = color_edges(&g);
        let p = DriveParams::new(0.5, 1.0, 1.0, 3).unwrap();
        let prog = build_program(&g, &c, &p).unwrap();
        let back = GateProgram::from_json(&prog.to_json()).unwrap();
        assert_eq!(back, prog);
        assert!(GateProgram::from_json(r#"[{"layer":0,"op":"rxx","qubits":[1],"angle":0.1}]"#).is_err());
    }

    #[test]
    fn drive_layers_exclude_prelude() {
        let g = Graph::path(2).unwrap();
        let c = color_edges(&g);
        let p = DriveParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let prog = build_program(&g, &c, &p).unwrap();
        let body = prog.drive_layers();
        assert_eq!(body.len(), prog.depth() - 3);
        assert!(matches!(body[0][0], Gate::Rz { .. }));
        assert!(matches!(body.last().unwrap()[0], Gate::Rz { .. }));
    }
}
