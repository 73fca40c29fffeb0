//! Parameter layout and forward passes for every model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ModelConfig, ModelKind};
use crate::autodiff::{glorot_uniform, gradcheck, GradCheckReport, ParamGroup, ParamId, ParamStore, Tape, Var};
use crate::error::Result;
use crate::graph::{Dataset, OperatorKind, SpectralOperator};
use crate::linalg::Matrix;
use crate::poly::{binomial, interpolation_matrix, Basis, FilterCoefficients};
use crate::spectral::{sample_filter_response, FilterDomain, SampledFilter};

/// Samples used when a learned filter is reported.
pub const FILTER_GRID: usize = 101;

#[derive(Debug, Clone, Copy)]
struct Linear {
    weight: ParamId,
    bias: ParamId,
}

impl Linear {
    fn new(store: &mut ParamStore, name: &str, fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) -> Self {
        Self {
            weight: store.add(format!("{name}.weight"), ParamGroup::Linear, glorot_uniform(fan_in, fan_out, rng)),
            bias: store.add(format!("{name}.bias"), ParamGroup::Linear, Matrix::zeros(1, fan_out)),
        }
    }

    fn forward(self, tape: &mut Tape, store: &ParamStore, x: Var) -> Result<Var> {
        let w = tape.param(store, self.weight);
        let b = tape.param(store, self.bias);
        let h = tape.matmul(x, w)?;
        tape.add_bias(h, b)
    }
}

/// One `Σ_k T_k(L̂) X W_k + b` layer.
#[derive(Debug, Clone)]
struct ChebLayer {
    weights: Vec<ParamId>,
    bias: ParamId,
}

#[derive(Debug, Clone)]
enum Layout {
    Mlp,
    Gcn { first: Linear, second: Linear },
    Chebnet { first: ChebLayer, second: ChebLayer },
    Decoupled { coeffs: ParamId, extra: Option<Linear> },
}

/// Everything a forward pass reads besides the parameters.
#[derive(Debug)]
pub(crate) struct Architecture {
    config: ModelConfig,
    mlp: Option<(Linear, Linear)>,
    layout: Layout,
    operator: Option<SpectralOperator>,
    /// Node values to Chebyshev coefficients, for chebnet2.
    interp: Option<Matrix>,
}

/// A model's architecture together with its parameters.
#[derive(Debug)]
pub struct Model {
    pub(crate) arch: Architecture,
    pub params: ParamStore,
}

impl Model {
    pub fn new(dataset: &Dataset, config: &ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut store = ParamStore::new();
        let (d, h, c, k) = (dataset.num_features(), config.hidden, dataset.num_classes, config.k);
        let op_kind = match config.model {
            ModelKind::Mlp => None,
            ModelKind::Gcn | ModelKind::Gprgnn => Some(OperatorKind::RenormalizedAdjacency),
            ModelKind::Bernnet => Some(OperatorKind::NormalizedLaplacian),
            _ => Some(OperatorKind::SCALED),
        };
        let operator = op_kind
            .map(|kind| SpectralOperator::new(dataset.graph.clone(), kind))
            .transpose()?;

        let mut mlp = None;
        let mut interp = None;
        let layout = match config.model {
            ModelKind::Mlp => {
                mlp = Some((Linear::new(&mut store, "lin1", d, h, &mut rng), Linear::new(&mut store, "lin2", h, c, &mut rng)));
                Layout::Mlp
            }
            ModelKind::Gcn => Layout::Gcn {
                first: Linear::new(&mut store, "conv1", d, h, &mut rng),
                second: Linear::new(&mut store, "conv2", h, c, &mut rng),
            },
            ModelKind::Chebnet => {
                let mut layer = |name: &str, fan_in: usize, fan_out: usize| ChebLayer {
                    weights: (0..=k)
                        .map(|i| {
                            store.add(format!("{name}.weight{i}"), ParamGroup::Linear, glorot_uniform(fan_in, fan_out, &mut rng))
                        })
                        .collect(),
                    bias: store.add(format!("{name}.bias"), ParamGroup::Linear, Matrix::zeros(1, fan_out)),
                };
                let first = layer("cheb1", d, h);
                let second = layer("cheb2", h, c);
                Layout::Chebnet { first, second }
            }
            _ => {
                let extra = config.extra_linear_after_prop;
                let out = if extra { h } else { c };
                mlp = Some((Linear::new(&mut store, "lin1", d, h, &mut rng), Linear::new(&mut store, "lin2", h, out, &mut rng)));
                let init: Vec<f64> = match config.model {
                    ModelKind::Chebbase | ModelKind::ChebbaseK => (0..=k).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
                    ModelKind::Gprgnn => {
                        let a = config.alpha;
                        (0..=k)
                            .map(|i| if i < k { a * (1.0 - a).powi(i as i32) } else { (1.0 - a).powi(k as i32) })
                            .collect()
                    }
                    _ => vec![1.0; k + 1],
                };
                if config.model == ModelKind::Chebnet2 {
                    interp = Some(interpolation_matrix(k, config.halve_first_coefficient));
                }
                let coeffs = store.add("prop.coeffs", ParamGroup::Propagation, Matrix::column(&init));
                let extra = extra.then(|| Linear::new(&mut store, "lin3", h, c, &mut rng));
                Layout::Decoupled { coeffs, extra }
            }
        };
        Ok(Self {
            arch: Architecture {
                config: config.clone(),
                mlp,
                layout,
                operator,
                interp,
            },
            params: store,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.arch.config
    }

    /// Logits with dropout disabled.
    pub fn predict(&self, features: &Matrix) -> Result<Matrix> {
        let mut tape = Tape::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = self.arch.forward(&mut tape, &self.params, features, false, &mut rng)?;
        Ok(tape.value(out).clone())
    }

    /// The propagation coefficients of decoupled models, or `None`.
    pub fn coefficient_id(&self) -> Option<ParamId> {
        match self.arch.layout {
            Layout::Decoupled { coeffs, .. } => Some(coeffs),
            _ => None,
        }
    }

    /// The polynomial response the model applies, as a function of `λ̂ = λ - 1`.
    /// ChebNet mixes its orders inside weight matrices and has none.
    pub fn filter_coefficients(&self) -> Option<FilterCoefficients> {
        let config = &self.arch.config;
        let k = config.k;
        let raw = |id: ParamId| self.params.value(id).as_slice().to_vec();
        let coeffs = match (&self.arch.layout, config.model) {
            (Layout::Mlp, _) => FilterCoefficients::identity(),
            // two applications of P̃ ≈ I - L = -L̂
            (Layout::Gcn { .. }, _) => FilterCoefficients::new(Basis::Monomial, vec![0.0, 0.0, 1.0]).ok()?,
            (Layout::Chebnet { .. }, _) => return None,
            (Layout::Decoupled { coeffs, .. }, model) => {
                let w = raw(*coeffs);
                match model {
                    ModelKind::Chebbase | ModelKind::ChebbaseK => {
                        let s = decay_scales(model, k);
                        FilterCoefficients::chebyshev(w.iter().zip(&s).map(|(a, b)| a * b).collect()).ok()?
                    }
                    ModelKind::Gprgnn => FilterCoefficients::new(
                        Basis::Monomial,
                        w.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -v }).collect(),
                    )
                    .ok()?,
                    ModelKind::Bernnet => FilterCoefficients::new(Basis::Bernstein, w.iter().map(|v| v.max(0.0)).collect()).ok()?,
                    _ => {
                        let m = self.arch.interp.as_ref()?;
                        let gamma: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
                        FilterCoefficients::chebyshev(m.matvec(&gamma).ok()?).ok()?
                    }
                }
            }
        };
        Some(coeffs)
    }

    /// Finite-difference check of the training loss on `mask`, dropout
    /// active with a fixed mask, over `coords` random parameter entries.
    pub fn gradcheck(&mut self, dataset: &Dataset, mask: &[usize], coords: usize, seed: u64) -> Result<GradCheckReport> {
        let Model { arch, params } = self;
        let arch: &Architecture = arch;
        let (features, labels) = (&dataset.features, &dataset.labels);
        gradcheck(params, coords, seed, move |store, tape| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
            let out = arch.forward(tape, store, features, true, &mut rng)?;
            let lp = tape.log_softmax(out);
            tape.nll_loss(lp, labels, mask)
        })
    }

    pub fn learned_filter(&self) -> Option<SampledFilter> {
        let coeffs = self.filter_coefficients()?;
        sample_filter_response(&coeffs, FILTER_GRID, FilterDomain::Laplacian).ok()
    }
}

fn decay_scales(model: ModelKind, k: usize) -> Vec<f64> {
    (0..=k)
        .map(|i| if model == ModelKind::ChebbaseK && i > 0 { 1.0 / i as f64 } else { 1.0 })
        .collect()
}

impl Architecture {
    pub(crate) fn forward<'a>(
        &'a self,
        tape: &mut Tape<'a>,
        store: &ParamStore,
        features: &Matrix,
        training: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<Var> {
        let cfg = &self.config;
        let x = tape.constant(features.clone());
        match &self.layout {
            Layout::Mlp => self.mlp(tape, store, x, training, rng),
            Layout::Gcn { first, second } => {
                let op = self.operator.as_ref().expect("gcn has an operator");
                let h = tape.dropout(x, cfg.dropout_linear, training, rng)?;
                let h = self.conv(tape, store, op, *first, h)?;
                let h = tape.relu(h);
                let h = tape.dropout(h, cfg.dropout_linear, training, rng)?;
                self.conv(tape, store, op, *second, h)
            }
            Layout::Chebnet { first, second } => {
                let h = tape.dropout(x, cfg.dropout_linear, training, rng)?;
                let h = self.cheb_layer(tape, store, first, h)?;
                let h = tape.relu(h);
                let h = tape.dropout(h, cfg.dropout_linear, training, rng)?;
                self.cheb_layer(tape, store, second, h)
            }
            Layout::Decoupled { coeffs, extra } => {
                let z = self.mlp(tape, store, x, training, rng)?;
                let z = tape.dropout(z, cfg.dropout_prop, training, rng)?;
                let y = self.propagate(tape, store, *coeffs, z)?;
                match extra {
                    Some(lin) => lin.forward(tape, store, y),
                    None => Ok(y),
                }
            }
        }
    }

    /// `lin2(dropout(relu(lin1(dropout(x)))))`
    fn mlp<'a>(&'a self, tape: &mut Tape<'a>, store: &ParamStore, x: Var, training: bool, rng: &mut ChaCha8Rng) -> Result<Var> {
        let (first, second) = self.mlp.expect("model has an mlp");
        let p = self.config.dropout_linear;
        let h = tape.dropout(x, p, training, rng)?;
        let h = first.forward(tape, store, h)?;
        let h = tape.relu(h);
        let h = tape.dropout(h, p, training, rng)?;
        second.forward(tape, store, h)
    }

    /// `P̃ H W + b`, multiplying by `W` first to keep the graph product narrow.
    fn conv<'a>(&'a self, tape: &mut Tape<'a>, store: &ParamStore, op: &'a SpectralOperator, lin: Linear, h: Var) -> Result<Var> {
        let w = tape.param(store, lin.weight);
        let hw = tape.matmul(h, w)?;
        let ph = tape.graph_matmul(op, hw)?;
        let b = tape.param(store, lin.bias);
        tape.add_bias(ph, b)
    }

    /// `Σ_k T_k(L̂) (H W_k) + b` by Clenshaw's recurrence, `K` operator
    /// applications.
    fn cheb_layer<'a>(&'a self, tape: &mut Tape<'a>, store: &ParamStore, layer: &ChebLayer, h: Var) -> Result<Var> {
        let op = self.operator.as_ref().expect("chebnet has an operator");
        let mut u = Vec::with_capacity(layer.weights.len());
        for &id in &layer.weights {
            let w = tape.param(store, id);
            u.push(tape.matmul(h, w)?);
        }
        let (mut b1, mut b2): (Option<Var>, Option<Var>) = (None, None);
        for k in (1..u.len()).rev() {
            let mut next = u[k];
            if let Some(b) = b1 {
                let lb = tape.graph_affine(op, b, 0.0, 2.0)?;
                next = tape.add(next, lb)?;
            }
            if let Some(b) = b2 {
                let neg = tape.scale(b, -1.0);
                next = tape.add(next, neg)?;
            }
            b2 = b1;
            b1 = Some(next);
        }
        let mut y = u[0];
        if let Some(b) = b1 {
            let lb = tape.graph_matmul(op, b)?;
            y = tape.add(y, lb)?;
        }
        if let Some(b) = b2 {
            let neg = tape.scale(b, -1.0);
            y = tape.add(y, neg)?;
        }
        let bias = tape.param(store, layer.bias);
        tape.add_bias(y, bias)
    }

    fn propagate<'a>(&'a self, tape: &mut Tape<'a>, store: &ParamStore, coeffs: ParamId, z: Var) -> Result<Var> {
        let op = self.operator.as_ref().expect("decoupled models have an operator");
        let k = self.config.k;
        let model = self.config.model;
        let raw = tape.param(store, coeffs);
        match model {
            ModelKind::Chebbase | ModelKind::ChebbaseK => {
                let terms = cheb_terms(tape, op, z, k)?;
                tape.weighted_sum(&terms, raw, &decay_scales(model, k))
            }
            ModelKind::Chebnet2 => {
                let gamma = tape.relu(raw);
                let m = tape.constant(self.interp.clone().expect("chebnet2 has an interpolation matrix"));
                let w = tape.matmul(m, gamma)?;
                let terms = cheb_terms(tape, op, z, k)?;
                tape.weighted_sum(&terms, w, &vec![1.0; k + 1])
            }
            ModelKind::Gprgnn => {
                let mut terms = vec![z];
                for i in 0..k {
                    let next = tape.graph_matmul(op, terms[i])?;
                    terms.push(next);
                }
                tape.weighted_sum(&terms, raw, &vec![1.0; k + 1])
            }
            ModelKind::Bernnet => {
                let w = tape.relu(raw);
                // L^k z for every k, then K - k applications of (2I - L)
                let mut powers = vec![z];
                for i in 0..k {
                    let next = tape.graph_matmul(op, powers[i])?;
                    powers.push(next);
                }
                let mut terms = Vec::with_capacity(k + 1);
                for (i, &p) in powers.iter().enumerate() {
                    let mut t = p;
                    for _ in 0..(k - i) {
                        t = tape.graph_affine(op, t, 2.0, -1.0)?;
                    }
                    terms.push(t);
                }
                let scale = 0.5f64.powi(k as i32);
                let scales: Vec<f64> = (0..=k).map(|i| binomial(k, i) * scale).collect();
                tape.weighted_sum(&terms, w, &scales)
            }
            ModelKind::Mlp | ModelKind::Gcn | ModelKind::Chebnet => unreachable!("not a decoupled model"),
        }
    }
}

/// `[T_0(L̂) z, ..., T_K(L̂) z]`
fn cheb_terms<'a>(tape: &mut Tape<'a>, op: &'a SpectralOperator, z: Var, k: usize) -> Result<Vec<Var>> {
    let mut terms = vec![z];
    if k >= 1 {
        terms.push(tape.graph_matmul(op, z)?);
    }
    for i in 2..=k {
        let twice = tape.graph_affine(op, terms[i - 1], 0.0, 2.0)?;
        let neg = tape.scale(terms[i - 2], -1.0);
        terms.push(tape.add(twice, neg)?);
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, SyntheticKind, generate_synthetic};
    use crate::poly::{cheb_interpolate, cheb_nodes};
    use crate::spectral::apply_cheb_filter_matrix;

    fn toy() -> Dataset {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5), (5, 6), (6, 7), (7, 4), (3, 4), (1, 6)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let features = glorot_uniform(8, 4, &mut rng).scale(3.0);
        Dataset::new(Graph::from_edges(8, &edges).unwrap(), features, vec![0, 1, 2, 0, 1, 2, 0, 1], 3).unwrap()
    }

    fn cfg(model: ModelKind, k: usize) -> ModelConfig {
        ModelConfig {
            model,
            k,
            hidden: 6,
            dropout_linear: 0.3,
            dropout_prop: 0.2,
            ..ModelConfig::default()
        }
    }

    fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
        a.max_abs_diff(b)
    }

    /// `lin2(relu(lin1(x)))` evaluated directly.
    fn mlp_reference(model: &Model, x: &Matrix) -> Matrix {
        let p = &model.params;
        let get = |name: &str| p.value(p.find(name).unwrap()).clone();
        let add_bias = |m: Matrix, b: Matrix| Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j) + b.get(0, j));
        let h = add_bias(x.matmul(&get("lin1.weight")).unwrap(), get("lin1.bias")).map(|v| v.max(0.0));
        add_bias(h.matmul(&get("lin2.weight")).unwrap(), get("lin2.bias"))
    }

    fn set(model: &mut Model, id: ParamId, values: &[f64]) {
        model.params.tensor_mut(id).value = Matrix::column(values);
    }

    #[test]
    fn initial_filters_are_all_pass() {
        let d = toy();
        for kind in [ModelKind::Chebbase, ModelKind::ChebbaseK, ModelKind::Chebnet2, ModelKind::Bernnet] {
            let model = Model::new(&d, &cfg(kind, 5)).unwrap();
            let out = model.predict(&d.features).unwrap();
            let err = max_diff(&out, &mlp_reference(&model, &d.features));
            assert!(err <= 1e-6, "{kind:?}: {err}");
            let f = model.learned_filter().unwrap();
            assert!(f.responses.iter().all(|r| (r - 1.0).abs() < 1e-9), "{kind:?}");
        }
    }

    #[test]
    fn gprgnn_ppr_init_and_reduction() {
        let d = toy();
        let mut model = Model::new(&d, &cfg(ModelKind::Gprgnn, 10)).unwrap();
        let id = model.coefficient_id().unwrap();
        let total: f64 = model.params.value(id).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut only_first = vec![0.0; 11];
        only_first[0] = 1.0;
        set(&mut model, id, &only_first);
        let out = model.predict(&d.features).unwrap();
        assert!(max_diff(&out, &mlp_reference(&model, &d.features)) <= 1e-12);
    }

    #[test]
    fn chebbase_inverse_k_scaling() {
        let d = toy();
        let mut plain = Model::new(&d, &cfg(ModelKind::Chebbase, 4)).unwrap();
        let mut decayed = Model::new(&d, &cfg(ModelKind::ChebbaseK, 4)).unwrap();
        for m in [&mut plain, &mut decayed] {
            let id = m.coefficient_id().unwrap();
            set(m, id, &[1.0; 5]);
        }
        let fp = plain.filter_coefficients().unwrap();
        let fd = decayed.filter_coefficients().unwrap();
        for k in 0..5 {
            let s = if k == 0 { 1.0 } else { 1.0 / k as f64 };
            assert!((fd.weights()[k] - s * fp.weights()[k]).abs() < 1e-15);
        }
        // the forward pass applies the same scaled series
        let z = mlp_reference(&decayed, &d.features);
        let op = SpectralOperator::new(d.graph.clone(), OperatorKind::SCALED).unwrap();
        let want = apply_cheb_filter_matrix(&op, &fd, &z).unwrap();
        assert!(max_diff(&decayed.predict(&d.features).unwrap(), &want) <= 1e-10);
    }

    #[test]
    fn chebbase_first_order_low_pass() {
        let d = toy();
        let mut m = Model::new(&d, &cfg(ModelKind::Chebbase, 1)).unwrap();
        let id = m.coefficient_id().unwrap();
        set(&mut m, id, &[1.0, -1.0]);
        let f = m.learned_filter().unwrap();
        assert!(f.responses.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(f.lambdas[0], 0.0);
        assert_eq!(*f.lambdas.last().unwrap(), 2.0);
    }

    #[test]
    fn chebnet2_coefficients_interpolate_gamma() {
        let d = toy();
        for k in [3usize, 7, 12, 20] {
            let mut m = Model::new(&d, &cfg(ModelKind::Chebnet2, k)).unwrap();
            let g = |x: f64| x * x;
            let gamma: Vec<f64> = cheb_nodes(k).nodes().iter().map(|&x| g(x)).collect();
            let id = m.coefficient_id().unwrap();
            set(&mut m, id, &gamma);
            let got = m.filter_coefficients().unwrap();
            let want = cheb_interpolate(g, k).unwrap();
            for (a, b) in got.weights().iter().zip(want.weights()) {
                assert!((a - b).abs() <= 1e-9);
            }
            let z = mlp_reference(&m, &d.features);
            let op = SpectralOperator::new(d.graph.clone(), OperatorKind::SCALED).unwrap();
            let direct = apply_cheb_filter_matrix(&op, &got, &z).unwrap();
            assert!(max_diff(&m.predict(&d.features).unwrap(), &direct) <= 1e-10);
        }
    }

    #[test]
    fn chebnet2_unhalved_mode_doubles_constant_term() {
        let d = toy();
        let mut c = cfg(ModelKind::Chebnet2, 4);
        c.halve_first_coefficient = false;
        let m = Model::new(&d, &c).unwrap();
        let w = m.filter_coefficients().unwrap();
        assert!((w.weights()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bernnet_first_order_matches_definition() {
        let d = toy();
        let mut m = Model::new(&d, &cfg(ModelKind::Bernnet, 1)).unwrap();
        let id = m.coefficient_id().unwrap();
        set(&mut m, id, &[0.7, 0.2]);
        let z = mlp_reference(&m, &d.features);
        let lap = SpectralOperator::new(d.graph.clone(), OperatorKind::NormalizedLaplacian).unwrap();
        let lz = lap.apply(&z).unwrap();
        let want = Matrix::from_fn(z.rows(), z.cols(), |i, j| {
            0.5 * (0.7 * (2.0 * z.get(i, j) - lz.get(i, j)) + 0.2 * lz.get(i, j))
        });
        assert!(max_diff(&m.predict(&d.features).unwrap(), &want) <= 1e-12);
    }

    #[test]
    fn relu_filters_are_nonnegative() {
        let d = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [ModelKind::Bernnet, ModelKind::Chebnet2] {
            let mut m = Model::new(&d, &cfg(kind, 9)).unwrap();
            let id = m.coefficient_id().unwrap();
            m.params.tensor_mut(id).value = glorot_uniform(10, 1, &mut rng).scale(3.0);
            let f = m.filter_coefficients().unwrap();
            if kind == ModelKind::Bernnet {
                let s = m.learned_filter().unwrap();
                assert!(s.responses.iter().all(|&r| r >= -1e-6));
            } else {
                for &x in cheb_nodes(9).nodes() {
                    assert!(f.eval(x).unwrap() >= -1e-6);
                }
            }
        }
    }

    #[test]
    fn zero_input_gives_bias_only_logits() {
        let d = toy();
        let mut m = Model::new(&d, &cfg(ModelKind::Mlp, 1)).unwrap();
        let b2 = m.params.find("lin2.bias").unwrap();
        m.params.tensor_mut(b2).value = Matrix::from_vec(1, 3, vec![0.1, -0.2, 0.3]).unwrap();
        let out = m.predict(&Matrix::zeros(8, 4)).unwrap();
        for i in 0..8 {
            assert_eq!(out.row(i), &[0.1, -0.2, 0.3]);
        }
    }

    #[test]
    fn every_model_passes_gradcheck() {
        let d = toy();
        let mask = [0usize, 1, 3, 4, 6, 7];
        for kind in ModelKind::ALL {
            for extra in [false, true] {
                if extra && !kind.is_decoupled() {
                    continue;
                }
                let k = match kind {
                    ModelKind::Chebnet2 => 5,
                    ModelKind::Chebnet => 3,
                    _ => 4,
                };
                let mut c = cfg(kind, k);
                c.extra_linear_after_prop = extra;
                let mut model = Model::new(&d, &c).unwrap();
                if let Some(id) = model.coefficient_id() {
                    // move relu inputs away from the kink at zero
                    let mut rng = ChaCha8Rng::seed_from_u64(11);
                    let v = glorot_uniform(k + 1, 1, &mut rng).map(|v| 0.5 + v.abs());
                    model.params.tensor_mut(id).value = v;
                }
                let report = model.gradcheck(&d, &mask, 20, 1).unwrap();
                assert!(report.max_rel_error <= 1e-4, "{kind:?} extra={extra}: {report:?}");
            }
        }
    }

    #[test]
    fn operator_choice() {
        let d = generate_synthetic(40, SyntheticKind::Homophilic, 0).unwrap();
        let m = Model::new(&d, &ModelConfig::for_model(ModelKind::Gcn)).unwrap();
        assert_eq!(m.arch.operator.as_ref().unwrap().kind(), OperatorKind::RenormalizedAdjacency);
        let m = Model::new(&d, &ModelConfig::for_model(ModelKind::Bernnet)).unwrap();
        assert_eq!(m.arch.operator.as_ref().unwrap().kind(), OperatorKind::NormalizedLaplacian);
        let m = Model::new(&d, &ModelConfig::for_model(ModelKind::Mlp)).unwrap();
        assert!(m.arch.operator.is_none());
    }
}
