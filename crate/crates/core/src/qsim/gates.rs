//! One- and two-qubit gates and depth-1 layers.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Unitarity tolerance for gate matrices (max-entry deviation of `U^dagger U - I`).
pub const UNITARY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
enum Label {
    Named(&'static str),
    Angle(&'static str, f64),
    Custom,
}

/// A unitary on one or two qubits.
///
/// The matrix is row-major in the local basis where `targets[0]` is the most
/// significant bit, so `cnot(c, t)` has targets `[c, t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    label: Label,
    targets: Vec<usize>,
    matrix: Vec<C64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    fn named(name: &'static str, targets: Vec<usize>, matrix: Vec<C64>) -> Gate {
        Gate {
            label: Label::Named(name),
            targets,
            matrix,
        }
    }

    pub fn id(q: usize) -> Gate {
        Gate::named("id", vec![q], vec![ONE, ZERO, ZERO, ONE])
    }

    pub fn x(q: usize) -> Gate {
        Gate::named("x", vec![q], vec![ZERO, ONE, ONE, ZERO])
    }

    pub fn y(q: usize) -> Gate {
        Gate::named("y", vec![q], vec![ZERO, -I, I, ZERO])
    }

    pub fn z(q: usize) -> Gate {
        Gate::named("z", vec![q], vec![ONE, ZERO, ZERO, -ONE])
    }

    pub fn h(q: usize) -> Gate {
        let h = c(FRAC_1_SQRT_2, 0.0);
        Gate::named("h", vec![q], vec![h, h, h, -h])
    }

    pub fn s(q: usize) -> Gate {
        Gate::named("s", vec![q], vec![ONE, ZERO, ZERO, I])
    }

    pub fn sdg(q: usize) -> Gate {
        Gate::named("sdg", vec![q], vec![ONE, ZERO, ZERO, -I])
    }

    pub fn t(q: usize) -> Gate {
        Gate::named("t", vec![q], vec![ONE, ZERO, ZERO, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
    }

    /// `diag(1, e^{i theta})`.
    pub fn phase(q: usize, theta: f64) -> Gate {
        Gate {
            label: Label::Angle("phase", theta),
            targets: vec![q],
            matrix: vec![ONE, ZERO, ZERO, C64::from_polar(1.0, theta)],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        let mut m = vec![ZERO; 16];
        m[0] = ONE;
        m[5] = ONE;
        m[11] = ONE;
        m[14] = ONE;
        Gate::named("cnot", vec![control, target], m)
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::named("cz", vec![a, b], diag4([ONE, ONE, ONE, -ONE]))
    }

    pub fn swap(a: usize, b: usize) -> Gate {
        let mut m = vec![ZERO; 16];
        m[0] = ONE;
        m[6] = ONE;
        m[9] = ONE;
        m[15] = ONE;
        Gate::named("swap", vec![a, b], m)
    }

    /// `diag(1, 1, 1, e^{i theta})`.
    pub fn cphase(a: usize, b: usize, theta: f64) -> Gate {
        Gate {
            label: Label::Angle("cphase", theta),
            targets: vec![a, b],
            matrix: diag4([ONE, ONE, ONE, C64::from_polar(1.0, theta)]),
        }
    }

    /// `exp(i theta (a xor b))`, i.e. `diag(1, e^{i theta}, e^{i theta}, 1)`.
    pub fn parity_phase(a: usize, b: usize, theta: f64) -> Gate {
        let p = C64::from_polar(1.0, theta);
        Gate {
            label: Label::Angle("parity_phase", theta),
            targets: vec![a, b],
            matrix: diag4([ONE, p, p, ONE]),
        }
    }

    /// Arbitrary unitary on one or two targets, checked to [`UNITARY_TOL`].
    pub fn unitary(targets: Vec<usize>, matrix: Vec<C64>) -> Result<Gate> {
        let k = targets.len();
        if !(k == 1 || k == 2) {
            return Err(Error::invalid(format!("gates act on 1 or 2 qubits, got {k}")));
        }
        if k == 2 && targets[0] == targets[1] {
            return Err(Error::DepthViolation { qubit: targets[0] });
        }
        let dim = 1usize << k;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, matrix.len()));
        }
        let dev = unitarity_deviation(&matrix, dim);
        if dev.is_nan() || dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Gate {
            label: Label::Custom,
            targets,
            matrix,
        })
    }

    /// Looks up a named gate; `theta` is required for parametrised names.
    pub fn from_name(name: &str, targets: &[usize], theta: Option<f64>) -> Result<Gate> {
        let need = |k: usize| -> Result<()> {
            if targets.len() == k {
                Ok(())
            } else {
                Err(Error::WireMismatch {
                    expected: k,
                    got: targets.len(),
                })
            }
        };
        let angle = || theta.ok_or_else(|| Error::invalid(format!("gate {name} needs theta")));
        let g = match name {
            "id" | "x" | "y" | "z" | "h" | "s" | "sdg" | "t" | "phase" => {
                need(1)?;
                let q = targets[0];
                match name {
                    "id" => Gate::id(q),
                    "x" => Gate::x(q),
                    "y" => Gate::y(q),
                    "z" => Gate::z(q),
                    "h" => Gate::h(q),
                    "s" => Gate::s(q),
                    "sdg" => Gate::sdg(q),
                    "t" => Gate::t(q),
                    _ => Gate::phase(q, angle()?),
                }
            }
            "cnot" | "cx" | "cz" | "swap" | "cphase" | "parity_phase" => {
                need(2)?;
                let (a, b) = (targets[0], targets[1]);
                if a == b {
                    return Err(Error::DepthViolation { qubit: a });
                }
                match name {
                    "cnot" | "cx" => Gate::cnot(a, b),
                    "cz" => Gate::cz(a, b),
                    "swap" => Gate::swap(a, b),
                    "cphase" => Gate::cphase(a, b, angle()?),
                    _ => Gate::parity_phase(a, b, angle()?),
                }
            }
            _ => return Err(Error::invalid(format!("unknown gate {name:?}"))),
        };
        Ok(g)
    }

    /// The single-qubit gate "`self` then `next`" on the same target.
    pub fn then(&self, next: &Gate) -> Result<Gate> {
        if self.targets != next.targets {
            return Err(Error::invalid("composed gates must share targets"));
        }
        let dim = 1usize << self.targets.len();
        let mut m = vec![ZERO; dim * dim];
        for r in 0..dim {
            for col in 0..dim {
                m[r * dim + col] = (0..dim).map(|k| next.matrix[r * dim + k] * self.matrix[k * dim + col]).sum();
            }
        }
        Gate::unitary(self.targets.clone(), m)
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &[C64] {
        &self.matrix
    }

    /// Gate name, or `None` for user-supplied matrices.
    pub fn name(&self) -> Option<&'static str> {
        match self.label {
            Label::Named(n) | Label::Angle(n, _) => Some(n),
            Label::Custom => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self.label {
            Label::Angle(_, t) => Some(t),
            _ => None,
        }
    }

    pub(crate) fn matrix2(&self) -> [C64; 4] {
        self.matrix.as_slice().try_into().expect("single-qubit gate")
    }

    pub(crate) fn matrix4(&self) -> [C64; 16] {
        self.matrix.as_slice().try_into().expect("two-qubit gate")
    }
}

fn diag4(d: [C64; 4]) -> Vec<C64> {
    let mut m = vec![ZERO; 16];
    for (i, v) in d.into_iter().enumerate() {
        m[5 * i] = v;
    }
    m
}

/// `max |(U^dagger U - I)_{ij}|` for a row-major `dim x dim` matrix.
pub fn unitarity_deviation(m: &[C64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let v: C64 = (0..dim).map(|k| m[k * dim + i].conj() * m[k * dim + j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    matrix: Option<Vec<[f64; 2]>>,
    targets: Vec<usize>,
}

impl Serialize for Gate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self.label {
            Label::Named(n) => GateRepr {
                name: Some(n.to_string()),
                theta: None,
                matrix: None,
                targets: self.targets.clone(),
            },
            Label::Angle(n, t) => GateRepr {
                name: Some(n.to_string()),
                theta: Some(t),
                matrix: None,
                targets: self.targets.clone(),
            },
            Label::Custom => GateRepr {
                name: None,
                theta: None,
                matrix: Some(self.matrix.iter().map(|z| [z.re, z.im]).collect()),
                targets: self.targets.clone(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GateRepr::deserialize(d)?;
        let gate = match (repr.name, repr.matrix) {
            (Some(name), None) => Gate::from_name(&name, &repr.targets, repr.theta),
            (None, Some(m)) => Gate::unitary(repr.targets, m.into_iter().map(|[re, im]| c(re, im)).collect()),
            _ => Err(Error::invalid("gate needs exactly one of `name` or `matrix`")),
        };
        gate.map_err(D::Error::custom)
    }
}

/// A depth-1 layer: gates on pairwise disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GateLayer {
    gates: Vec<Gate>,
}

impl GateLayer {
    pub fn new(gates: Vec<Gate>) -> Result<GateLayer> {
        let mut seen = std::collections::BTreeSet::new();
        for g in &gates {
            for &q in g.targets() {
                if !seen.insert(q) {
                    return Err(Error::DepthViolation { qubit: q });
                }
            }
        }
        Ok(GateLayer { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Checks every target is below `n_qubits`.
    pub fn check_range(&self, n_qubits: usize) -> Result<()> {
        for g in &self.gates {
            for &q in g.targets() {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange { index: q, n_qubits });
                }
            }
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for GateLayer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let gates = Vec::<Gate>::deserialize(d)?;
        GateLayer::new(gates).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary() {
        let gates = [
            Gate::x(0),
            Gate::y(0),
            Gate::z(0),
            Gate::h(0),
            Gate::s(0),
            Gate::t(0),
            Gate::phase(0, 0.3),
            Gate::cnot(0, 1),
            Gate::cz(0, 1),
            Gate::swap(0, 1),
            Gate::cphase(0, 1, 1.1),
            Gate::parity_phase(0, 1, -0.7),
        ];
        for g in gates {
            let dim = 1 << g.targets().len();
            assert!(unitarity_deviation(g.matrix(), dim) < UNITARY_TOL, "{:?}", g.name());
        }
    }

    #[test]
    fn rejects_non_unitary_and_overlaps() {
        let bad = Gate::unitary(vec![0], vec![ONE, ONE, ZERO, ONE]);
        assert!(matches!(bad, Err(Error::NotUnitary { .. })));
        let overlap = GateLayer::new(vec![Gate::h(0), Gate::cnot(1, 0)]);
        assert!(matches!(overlap, Err(Error::DepthViolation { qubit: 0 })));
    }

    #[test]
    fn composition_order() {
        // X then H maps |0> to |->.
        let g = Gate::x(0).then(&Gate::h(0)).unwrap();
        let m = g.matrix();
        assert!((m[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((m[2].re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let layer = GateLayer::new(vec![
            Gate::phase(0, 0.25),
            Gate::cnot(1, 2),
            Gate::x(3).then(&Gate::h(3)).unwrap(),
        ])
        .unwrap();
        let text = serde_json::to_string(&layer).unwrap();
        let back: GateLayer = serde_json::from_str(&text).unwrap();
        assert_eq!(back, layer);
    }
}
