use serde::Serialize;

use super::ControlState;
use crate::error::{Error, Result};

/// Tolerance for vertex feasibility and deduplication.
const VERTEX_TOL: f64 = 1e-9;

/// Qubit rates `Q` and entanglement-assistance rates `E` per sender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateQuadruple {
    pub q_a: f64,
    pub e_a: f64,
    pub q_b: f64,
    pub e_b: f64,
}

impl RateQuadruple {
    pub fn new(q_a: f64, e_a: f64, q_b: f64, e_b: f64) -> Result<Self> {
        let r = Self { q_a, e_a, q_b, e_b };
        if r.as_vec().iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "rates must be non-negative: {r:?}"
            )));
        }
        Ok(r)
    }

    fn as_vec(&self) -> [f64; 4] {
        [self.q_a, self.e_a, self.q_b, self.e_b]
    }
}

/// `sum_i coefficients[i] * variables[i] < bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateConstraint {
    pub label: String,
    pub coefficients: Vec<f64>,
    pub bound: f64,
}

/// A polytope of rates and its cross-section in the plane of two of the
/// variables, the others held at `fixed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegion {
    pub variables: Vec<String>,
    pub constraints: Vec<RateConstraint>,
    pub axes: [usize; 2],
    pub fixed: Vec<f64>,
    /// Corners of the cross-section, counterclockwise; empty if infeasible.
    pub vertices: Vec<[f64; 2]>,
}

impl RateRegion {
    fn build(
        variables: &[&str],
        constraints: Vec<RateConstraint>,
        axes: [usize; 2],
        fixed: Vec<f64>,
    ) -> Self {
        let mut r = Self {
            variables: variables.iter().map(|s| s.to_string()).collect(),
            constraints,
            axes,
            fixed,
            vertices: Vec::new(),
        };
        r.vertices = r.enumerate_vertices();
        r
    }

    /// Full point from plane coordinates.
    fn lift(&self, x: f64, y: f64) -> Vec<f64> {
        let mut p = self.fixed.clone();
        p[self.axes[0]] = x;
        p[self.axes[1]] = y;
        p
    }

    /// `bound - form(point)` for every constraint.
    pub fn slacks(&self, point: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.bound - c.coefficients.iter().zip(point).map(|(a, x)| a * x).sum::<f64>())
            .collect()
    }

    pub fn plane_slacks(&self, x: f64, y: f64) -> Vec<f64> {
        self.slacks(&self.lift(x, y))
    }

    /// Whether a full rate quadruple meets every constraint within `tol`.
    pub fn admits(&self, r: &RateQuadruple, tol: f64) -> bool {
        self.variables.len() == 4 && self.slacks(&r.as_vec()).iter().all(|&s| s >= -tol)
    }

    /// Non-negative plane point satisfying every constraint within `tol`.
    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= -tol && y >= -tol && self.plane_slacks(x, y).iter().all(|&s| s >= -tol)
    }

    /// Lines `a x + b y = c` of the cross-section, axes included.
    fn plane_lines(&self) -> Vec<[f64; 3]> {
        let origin = self.plane_slacks(0.0, 0.0);
        let mut lines: Vec<[f64; 3]> = self
            .constraints
            .iter()
            .zip(origin)
            .map(|(c, s0)| [c.coefficients[self.axes[0]], c.coefficients[self.axes[1]], s0])
            .collect();
        lines.push([1.0, 0.0, 0.0]);
        lines.push([0.0, 1.0, 0.0]);
        lines
    }

    fn enumerate_vertices(&self) -> Vec<[f64; 2]> {
        let lines = self.plane_lines();
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let ([a1, b1, c1], [a2, b2, c2]) = (lines[i], lines[j]);
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-14 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                let (x, y) = (
                    if x.abs() < 1e-15 { 0.0 } else { x },
                    if y.abs() < 1e-15 { 0.0 } else { y },
                );
                if self.contains(x, y, VERTEX_TOL)
                    && !pts
                        .iter()
                        .any(|p| (p[0] - x).abs() <= VERTEX_TOL && (p[1] - y).abs() <= VERTEX_TOL)
                {
                    pts.push([x, y]);
                }
            }
        }
        if pts.len() > 2 {
            let n = pts.len() as f64;
            let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
            let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
            pts.sort_by(|p, q| {
                let ap = (p[1] - cy).atan2(p[0] - cx);
                let aq = (q[1] - cy).atan2(q[0] - cx);
                ap.total_cmp(&aq)
            });
        }
        pts
    }

    /// One row per vertex, headed by the axis names.
    pub fn vertices_csv(&self) -> String {
        let mut s = format!(
            "{},{}\n",
            self.variables[self.axes[0]], self.variables[self.axes[1]]
        );
        for v in &self.vertices {
            s.push_str(&format!("{},{}\n", v[0], v[1]));
        }
        s
    }
}

fn constraint(label: &str, coefficients: &[f64], bound: f64) -> RateConstraint {
    RateConstraint {
        label: label.to_owned(),
        coefficients: coefficients.to_vec(),
        bound,
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidDelta(delta));
    }
    Ok(())
}

/// Inner bound on `(Q_A, E_A, Q_B, E_B)` for one control state, cut at the
/// given assistance rates. Rates and entropies are in bits.
pub fn rate_region(cs: &ControlState, delta: f64, e_a: f64, e_b: f64) -> Result<RateRegion> {
    check_delta(delta)?;
    RateQuadruple::new(0.0, e_a, 0.0, e_b)?;
    let (a2, b2) = (cs.a2(), cs.b2());
    let l = (1.0 - delta).log2();
    let ha_e = cs.h_given_e(&[a2], delta)?;
    let hb_e = cs.h_given_e(&[b2], delta)?;
    let hab_e = cs.h_given_e(&[a2, b2], delta)?;
    let ha = cs.h_unconditioned(a2, delta)?;
    let hb = cs.h_unconditioned(b2, delta)?;
    let constraints = vec![
        constraint("Q_A-E_A", &[1.0, -1.0, 0.0, 0.0], ha_e + l),
        constraint("Q_B-E_B", &[0.0, 0.0, 1.0, -1.0], hb_e + l),
        constraint("Q_A-E_A+Q_B-E_B", &[1.0, -1.0, 1.0, -1.0], hab_e + 2.0 * l),
        constraint("Q_A+E_A", &[1.0, 1.0, 0.0, 0.0], ha),
        constraint("Q_B+E_B", &[0.0, 0.0, 1.0, 1.0], hb),
    ];
    Ok(RateRegion::build(
        &["Q_A", "E_A", "Q_B", "E_B"],
        constraints,
        [0, 2],
        vec![0.0, e_a, 0.0, e_b],
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntGenRegion {
    pub region: RateRegion,
    pub epsilon: f64,
    /// `sqrt(δ + 6ε)`.
    pub error: f64,
}

/// Rates `(m, n)` of entanglement generated with each sender.
pub fn ent_gen_region(cs: &ControlState, delta: f64, epsilon: f64) -> Result<EntGenRegion> {
    check_delta(delta)?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let (a2, b2) = (cs.a2(), cs.b2());
    let l = epsilon.log2();
    let constraints = vec![
        constraint("m", &[1.0, 0.0], cs.h_given_e(&[a2], delta)? + l),
        constraint("n", &[0.0, 1.0], cs.h_given_e(&[b2], delta)? + l),
        constraint("m+n", &[1.0, 1.0], cs.h_given_e(&[a2, b2], delta)? + l),
    ];
    Ok(EntGenRegion {
        region: RateRegion::build(&["m", "n"], constraints, [0, 1], vec![0.0, 0.0]),
        epsilon,
        error: (delta + 6.0 * epsilon).sqrt(),
    })
}
