use serde::{Deserialize, Serialize};

use super::gates::{Gate, GateLayer};
use super::NoiseRate;
use crate::error::{Error, Result};

/// An oracle invocation on an ordered list of circuit wires.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCall {
    pub id: String,
    pub wires: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CircuitStep {
    Layer { gates: GateLayer },
    Oracle(OracleCall),
}

/// Circuit of depth-1 layers and oracle calls, each followed by a layer of
/// depolarizing noise on every qubit. Noise also acts once right after
/// initialization, so a circuit with `T` steps has `T + 1` noise layers; the
/// last one doubles as measurement noise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisyCircuit {
    n_qubits: usize,
    lambda: NoiseRate,
    steps: Vec<CircuitStep>,
}

#[derive(Deserialize)]
struct CircuitRepr {
    n_qubits: usize,
    lambda: NoiseRate,
    steps: Vec<CircuitStep>,
}

impl NoisyCircuit {
    pub fn new(n_qubits: usize, lambda: NoiseRate) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::invalid("a circuit needs at least one qubit"));
        }
        Ok(NoisyCircuit {
            n_qubits,
            lambda,
            steps: Vec::new(),
        })
    }

    /// Appends a layer built from `gates`.
    pub fn layer(&mut self, gates: Vec<Gate>) -> Result<&mut Self> {
        let layer = GateLayer::new(gates)?;
        self.push_layer(layer)
    }

    pub fn push_layer(&mut self, layer: GateLayer) -> Result<&mut Self> {
        layer.check_range(self.n_qubits)?;
        self.steps.push(CircuitStep::Layer { gates: layer });
        Ok(self)
    }

    pub fn oracle(&mut self, id: impl Into<String>, wires: Vec<usize>) -> Result<&mut Self> {
        let call = OracleCall { id: id.into(), wires };
        check_call(&call, self.n_qubits)?;
        self.steps.push(CircuitStep::Oracle(call));
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn lambda(&self) -> NoiseRate {
        self.lambda
    }

    pub fn set_lambda(&mut self, lambda: NoiseRate) {
        self.lambda = lambda;
    }

    pub fn with_lambda(mut self, lambda: NoiseRate) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn steps(&self) -> &[CircuitStep] {
        &self.steps
    }

    /// Number of steps, i.e. the circuit depth `T`.
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn oracle_calls(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, CircuitStep::Oracle(_)))
            .count()
    }

    /// Re-checks all structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::invalid("a circuit needs at least one qubit"));
        }
        for step in &self.steps {
            match step {
                CircuitStep::Layer { gates } => gates.check_range(self.n_qubits)?,
                CircuitStep::Oracle(call) => check_call(call, self.n_qubits)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl<'de> Deserialize<'de> for NoisyCircuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CircuitRepr::deserialize(d)?;
        let c = NoisyCircuit {
            n_qubits: repr.n_qubits,
            lambda: repr.lambda,
            steps: repr.steps,
        };
        c.validate().map_err(D::Error::custom)?;
        Ok(c)
    }
}

fn check_call(call: &OracleCall, n: usize) -> Result<()> {
    super::state::check_distinct(&call.wires, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut c = NoisyCircuit::new(3, NoiseRate::new(0.1).unwrap()).unwrap();
        c.layer(vec![Gate::h(0), Gate::cnot(1, 2)]).unwrap();
        c.oracle("f", vec![0, 2, 1]).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"type\":\"oracle\""));
        let back = NoisyCircuit::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.depth(), 2);
        assert_eq!(back.oracle_calls(), 1);
    }

    #[test]
    fn rejects_bad_wires() {
        let mut c = NoisyCircuit::new(2, NoiseRate::ZERO).unwrap();
        assert!(c.oracle("f", vec![0, 0]).is_err());
        assert!(c.layer(vec![Gate::x(2)]).is_err());
        let bad = r#"{"n_qubits":1,"lambda":0.0,"steps":[{"type":"layer","gates":[{"name":"x","targets":[3]}]}]}"#;
        assert!(NoisyCircuit::from_json(bad).is_err());
        let bad_lambda = r#"{"n_qubits":1,"lambda":1.5,"steps":[]}"#;
        assert!(NoisyCircuit::from_json(bad_lambda).is_err());
    }
}
