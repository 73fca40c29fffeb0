use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ParamStore, Tape, Var};
use crate::error::Result;

/// Central-difference step.
pub const GRADCHECK_STEP: f64 = 1e-5;
/// Smallest denominator in the relative error, so that near-zero
/// derivatives are compared absolutely.
pub const GRADCHECK_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    /// `(parameter, flat index)` of the worst coordinate.
    pub worst: Option<(String, usize)>,
}

/// Compares backward-pass gradients to central finite differences on up to
/// `coords` randomly chosen entries of every parameter. `loss` must be
/// deterministic (seed any dropout inside it).
pub fn gradcheck<'a, F>(store: &mut ParamStore, coords: usize, seed: u64, loss: F) -> Result<GradCheckReport>
where
    F: Fn(&ParamStore, &mut Tape<'a>) -> Result<Var>,
{
    store.zero_grad();
    let mut tape = Tape::new();
    let out = loss(store, &mut tape)?;
    tape.backward(out, store)?;

    let eval = |store: &ParamStore| -> Result<f64> {
        let mut tape = Tape::new();
        let out = loss(store, &mut tape)?;
        Ok(tape.scalar(out))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradCheckReport {
        checked: 0,
        max_rel_error: 0.0,
        worst: None,
    };
    for id in store.ids().collect::<Vec<_>>() {
        let len = store.value(id).len();
        let analytic = match store.grad(id) {
            Some(g) => g.as_slice().to_vec(),
            None => vec![0.0; len],
        };
        for k in sample(&mut rng, len, coords.min(len)).into_iter() {
            let orig = store.value(id).as_slice()[k];
            store.tensor_mut(id).value.as_mut_slice()[k] = orig + GRADCHECK_STEP;
            let plus = eval(store)?;
            store.tensor_mut(id).value.as_mut_slice()[k] = orig - GRADCHECK_STEP;
            let minus = eval(store)?;
            store.tensor_mut(id).value.as_mut_slice()[k] = orig;

            let numeric = (plus - minus) / (2.0 * GRADCHECK_STEP);
            let a = analytic[k];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRADCHECK_FLOOR);
            report.checked += 1;
            if report.worst.is_none() || rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst = Some((store.name(id).to_string(), k));
            }
        }
    }
    Ok(report)
}
