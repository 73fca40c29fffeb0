use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Hyperparameter group a parameter trains under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamGroup {
    /// Feature transforms (`W`, `b`).
    Linear,
    /// Filter coefficients and propagation weights.
    Propagation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub(crate) usize);

/// A dense 2-D array with an optional gradient of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub value: Matrix,
    pub grad: Option<Matrix>,
    pub requires_grad: bool,
}

impl Tensor {
    pub fn new(value: Matrix, requires_grad: bool) -> Self {
        Self {
            value,
            grad: None,
            requires_grad,
        }
    }

    pub fn shape(&self) -> [usize; 2] {
        self.value.shape()
    }
}

#[derive(Debug, Clone)]
struct Param {
    name: String,
    group: ParamGroup,
    tensor: Tensor,
}

/// Named trainable tensors, kept in insertion order.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    params: Vec<Param>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, group: ParamGroup, value: Matrix) -> ParamId {
        let name = name.into();
        debug_assert!(self.find(&name).is_none(), "duplicate parameter {name}");
        self.params.push(Param {
            name,
            group,
            tensor: Tensor::new(value, true),
        });
        ParamId(self.params.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.params.len()).map(ParamId)
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.params.iter().position(|p| p.name == name).map(ParamId)
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.params[id.0].name
    }

    pub fn group(&self, id: ParamId) -> ParamGroup {
        self.params[id.0].group
    }

    pub fn tensor(&self, id: ParamId) -> &Tensor {
        &self.params[id.0].tensor
    }

    pub fn tensor_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.params[id.0].tensor
    }

    pub fn value(&self, id: ParamId) -> &Matrix {
        &self.params[id.0].tensor.value
    }

    pub fn grad(&self, id: ParamId) -> Option<&Matrix> {
        self.params[id.0].tensor.grad.as_ref()
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.tensor.grad = None;
        }
    }

    pub(crate) fn accumulate_grad(&mut self, id: ParamId, g: &Matrix) {
        let t = &mut self.params[id.0].tensor;
        match &mut t.grad {
            Some(acc) => acc.add_assign_scaled(g, 1.0),
            slot @ None => *slot = Some(g.clone()),
        }
    }

    /// Total number of scalar parameters.
    pub fn num_scalars(&self) -> usize {
        self.params.iter().map(|p| p.tensor.value.len()).sum()
    }

    /// `{name: {shape, values}}` with keys in sorted order.
    pub fn to_checkpoint(&self) -> Result<String> {
        let map: BTreeMap<&str, CheckpointEntry> = self
            .params
            .iter()
            .map(|p| {
                (
                    p.name.as_str(),
                    CheckpointEntry {
                        shape: p.tensor.shape().to_vec(),
                        values: p.tensor.value.as_slice().to_vec(),
                    },
                )
            })
            .collect();
        Ok(serde_json::to_string_pretty(&map)?)
    }

    /// Overwrites values of every parameter named in `json`. Shapes must
    /// match and every stored parameter must be present.
    pub fn load_checkpoint(&mut self, json: &str) -> Result<()> {
        let map: BTreeMap<String, CheckpointEntry> = serde_json::from_str(json)?;
        for p in &mut self.params {
            let entry = map
                .get(&p.name)
                .ok_or_else(|| Error::InvalidArgument(format!("checkpoint lacks parameter {}", p.name)))?;
            let shape = p.tensor.shape();
            if entry.shape != shape {
                return Err(Error::dim(format!("{shape:?}"), format!("{:?}", entry.shape)));
            }
            p.tensor.value = Matrix::from_vec(shape[0], shape[1], entry.values.clone())?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointEntry {
    shape: Vec<usize>,
    values: Vec<f64>,
}

/// Uniform on `±sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-bound..=bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn checkpoint_round_trip_sorted() {
        let mut store = ParamStore::new();
        store.add("z", ParamGroup::Linear, Matrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64));
        store.add("a", ParamGroup::Propagation, Matrix::column(&[0.5, -1.5]));
        let json = store.to_checkpoint().unwrap();
        assert!(json.find("\"a\"").unwrap() < json.find("\"z\"").unwrap());

        let mut other = ParamStore::new();
        other.add("z", ParamGroup::Linear, Matrix::zeros(2, 3));
        other.add("a", ParamGroup::Propagation, Matrix::zeros(2, 1));
        other.load_checkpoint(&json).unwrap();
        assert_eq!(other.value(ParamId(0)), store.value(ParamId(0)));
        assert_eq!(other.value(ParamId(1)), store.value(ParamId(1)));

        let mut wrong = ParamStore::new();
        wrong.add("z", ParamGroup::Linear, Matrix::zeros(3, 2));
        assert!(wrong.load_checkpoint(&json).is_err());
    }

    #[test]
    fn checkpoint_values_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut store = ParamStore::new();
        store.add("w", ParamGroup::Linear, glorot_uniform(40, 25, &mut rng));
        let json = store.to_checkpoint().unwrap();
        let mut other = ParamStore::new();
        other.add("w", ParamGroup::Linear, Matrix::zeros(40, 25));
        other.load_checkpoint(&json).unwrap();
        let bits = |s: &ParamStore| s.value(ParamId(0)).as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&other), bits(&store));
    }

    #[test]
    fn glorot_bounds_and_determinism() {
        let a = glorot_uniform(30, 20, &mut ChaCha8Rng::seed_from_u64(1));
        let b = glorot_uniform(30, 20, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        let bound = (6.0f64 / 50.0).sqrt();
        assert!(a.max_abs() <= bound);
        assert!(a.max_abs() > 0.8 * bound);
    }

    #[test]
    fn grads_accumulate() {
        let mut store = ParamStore::new();
        let id = store.add("w", ParamGroup::Linear, Matrix::zeros(1, 2));
        store.accumulate_grad(id, &Matrix::column(&[1.0, 2.0]).transpose());
        store.accumulate_grad(id, &Matrix::column(&[1.0, 2.0]).transpose());
        assert_eq!(store.grad(id).unwrap().as_slice(), &[2.0, 4.0]);
        store.zero_grad();
        assert!(store.grad(id).is_none());
    }
}
