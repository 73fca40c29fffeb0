use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlp,
    Gcn,
    Chebnet,
    Chebbase,
    #[serde(rename = "chebbase_k")]
    ChebbaseK,
    Gprgnn,
    Bernnet,
    Chebnet2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Mlp,
        ModelKind::Gcn,
        ModelKind::Chebnet,
        ModelKind::Chebbase,
        ModelKind::ChebbaseK,
        ModelKind::Gprgnn,
        ModelKind::Bernnet,
        ModelKind::Chebnet2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Gcn => "gcn",
            ModelKind::Chebnet => "chebnet",
            ModelKind::Chebbase => "chebbase",
            ModelKind::ChebbaseK => "chebbase_k",
            ModelKind::Gprgnn => "gprgnn",
            ModelKind::Bernnet => "bernnet",
            ModelKind::Chebnet2 => "chebnet2",
        }
    }

    /// Models whose order `K` is meaningful.
    pub fn uses_order(self) -> bool {
        !matches!(self, ModelKind::Mlp | ModelKind::Gcn)
    }

    /// Models that propagate the output of a shared MLP with learned scalar
    /// coefficients.
    pub fn is_decoupled(self) -> bool {
        matches!(
            self,
            ModelKind::Chebbase | ModelKind::ChebbaseK | ModelKind::Gprgnn | ModelKind::Bernnet | ModelKind::Chebnet2
        )
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model {s:?}")))
    }
}

/// Training configuration. Serialized field names are the on-disk config
/// format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    #[serde(rename = "K")]
    pub k: usize,
    pub hidden: usize,
    pub lr_linear: f64,
    pub lr_prop: f64,
    pub wd_linear: f64,
    pub wd_prop: f64,
    pub dropout_linear: f64,
    pub dropout_prop: f64,
    pub epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub extra_linear_after_prop: bool,
    /// Teleport probability for the PageRank-style initialization.
    pub alpha: f64,
    /// Halve the `k = 0` interpolation coefficient so that `relu(γ_j)` is the
    /// filter value at node `x_j`.
    pub halve_first_coefficient: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Chebnet2,
            k: 10,
            hidden: 64,
            lr_linear: 0.01,
            lr_prop: 0.01,
            wd_linear: 5e-4,
            wd_prop: 5e-4,
            dropout_linear: 0.5,
            dropout_prop: 0.5,
            epochs: 1000,
            patience: 200,
            seed: 0,
            extra_linear_after_prop: false,
            alpha: 0.1,
            halve_first_coefficient: true,
        }
    }
}

impl ModelConfig {
    pub fn for_model(model: ModelKind) -> Self {
        let mut c = Self {
            model,
            ..Self::default()
        };
        if model == ModelKind::Chebnet {
            c.k = 2;
            c.hidden = 32;
        }
        c
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(json)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.model.uses_order() && self.k < 1 {
            return bad(format!("{} needs K >= 1", self.model.name()));
        }
        if self.hidden == 0 {
            return bad("hidden width must be positive".into());
        }
        for (name, v) in [
            ("lr_linear", self.lr_linear),
            ("lr_prop", self.lr_prop),
            ("wd_linear", self.wd_linear),
            ("wd_prop", self.wd_prop),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a finite non-negative number, got {v}"));
            }
        }
        for (name, v) in [("dropout_linear", self.dropout_linear), ("dropout_prop", self.dropout_prop)] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1), got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must be in [0, 1], got {}", self.alpha));
        }
        if self.epochs == 0 {
            return bad("epochs must be positive".into());
        }
        if self.patience > self.epochs {
            return bad(format!("patience {} exceeds epochs {}", self.patience, self.epochs));
        }
        Ok(())
    }
}
