use serde::{Deserialize, Serialize};

use super::{ParamGroup, ParamStore};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupHyper {
    pub lr: f64,
    pub weight_decay: f64,
}

/// Adam with bias correction. Weight decay is added to the gradient as an L2
/// term, separately per parameter group.
#[derive(Debug, Clone)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    linear: GroupHyper,
    propagation: GroupHyper,
    step: u64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
}

impl Adam {
    pub fn new(store: &ParamStore, linear: GroupHyper, propagation: GroupHyper) -> Self {
        let zeros = |store: &ParamStore| -> Vec<Matrix> {
            store
                .ids()
                .map(|id| {
                    let [r, c] = store.value(id).shape();
                    Matrix::zeros(r, c)
                })
                .collect()
        };
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            linear,
            propagation,
            step: 0,
            m: zeros(store),
            v: zeros(store),
        }
    }

    /// A single shared group, mainly for tests.
    pub fn uniform(store: &ParamStore, lr: f64, weight_decay: f64) -> Self {
        let h = GroupHyper { lr, weight_decay };
        Self::new(store, h, h)
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    fn hyper(&self, group: ParamGroup) -> GroupHyper {
        match group {
            ParamGroup::Linear => self.linear,
            ParamGroup::Propagation => self.propagation,
        }
    }

    pub fn step(&mut self, store: &mut ParamStore) -> Result<()> {
        if store.len() != self.m.len() {
            return Err(Error::Optimizer(format!(
                "optimizer tracks {} parameters, store has {}",
                self.m.len(),
                store.len()
            )));
        }
        for id in store.ids() {
            let t = store.tensor(id);
            if t.requires_grad && t.grad.is_none() {
                return Err(Error::Optimizer(format!("parameter {} has no gradient", store.name(id))));
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for id in store.ids().collect::<Vec<_>>() {
            let hyper = self.hyper(store.group(id));
            let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
            let tensor = store.tensor_mut(id);
            if !tensor.requires_grad {
                continue;
            }
            let grad = tensor.grad.as_ref().expect("checked above").as_slice();
            let m = self.m[id.0].as_mut_slice();
            let v = self.v[id.0].as_mut_slice();
            let theta = tensor.value.as_mut_slice();
            for i in 0..theta.len() {
                let g = grad[i] + hyper.weight_decay * theta[i];
                m[i] = b1 * m[i] + (1.0 - b1) * g;
                v[i] = b2 * v[i] + (1.0 - b2) * g * g;
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                theta[i] -= hyper.lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_store(w: f64) -> (ParamStore, super::super::ParamId) {
        let mut store = ParamStore::new();
        let id = store.add("w", ParamGroup::Linear, Matrix::column(&[w]));
        (store, id)
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let (mut store, id) = scalar_store(0.7);
        let mut adam = Adam::uniform(&store, 0.1, 0.0);
        for _ in 0..5 {
            store.tensor_mut(id).grad = Some(Matrix::column(&[0.0]));
            adam.step(&mut store).unwrap();
        }
        assert_eq!(store.value(id).get(0, 0), 0.7);
    }

    #[test]
    fn first_step_has_magnitude_lr() {
        let (mut store, id) = scalar_store(0.0);
        let mut adam = Adam::uniform(&store, 0.1, 0.0);
        store.tensor_mut(id).grad = Some(Matrix::column(&[1.0]));
        adam.step(&mut store).unwrap();
        assert!((store.value(id).get(0, 0) + 0.1).abs() < 1e-6);
    }

    #[test]
    fn quadratic_bowl() {
        let (mut store, id) = scalar_store(1.0);
        let mut adam = Adam::uniform(&store, 0.05, 0.0);
        for _ in 0..200 {
            let w = store.value(id).get(0, 0);
            store.tensor_mut(id).grad = Some(Matrix::column(&[2.0 * w]));
            adam.step(&mut store).unwrap();
        }
        assert!(store.value(id).get(0, 0).abs() <= 1e-2);
    }

    #[test]
    fn missing_gradient_is_an_error() {
        let (mut store, _) = scalar_store(1.0);
        let mut adam = Adam::uniform(&store, 0.1, 0.0);
        assert!(matches!(adam.step(&mut store), Err(Error::Optimizer(_))));
        assert_eq!(adam.steps(), 0);
    }

    #[test]
    fn groups_use_their_own_rates() {
        let mut store = ParamStore::new();
        let a = store.add("a", ParamGroup::Linear, Matrix::column(&[0.0]));
        let b = store.add("b", ParamGroup::Propagation, Matrix::column(&[0.0]));
        let mut adam = Adam::new(
            &store,
            GroupHyper { lr: 0.1, weight_decay: 0.0 },
            GroupHyper { lr: 0.01, weight_decay: 0.0 },
        );
        for id in [a, b] {
            store.tensor_mut(id).grad = Some(Matrix::column(&[1.0]));
        }
        adam.step(&mut store).unwrap();
        assert!((store.value(a).get(0, 0) + 0.1).abs() < 1e-6);
        assert!((store.value(b).get(0, 0) + 0.01).abs() < 1e-6);
    }

    #[test]
    fn weight_decay_pulls_toward_zero() {
        let (mut store, id) = scalar_store(2.0);
        let mut adam = Adam::uniform(&store, 0.01, 0.5);
        store.tensor_mut(id).grad = Some(Matrix::column(&[0.0]));
        adam.step(&mut store).unwrap();
        assert!(store.value(id).get(0, 0) < 2.0);
    }
}
