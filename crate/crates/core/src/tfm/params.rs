//! Parameter containers, initialization, and the canonical named-tensor
//! walk used by the optimizer, gradient checks, and checkpoints.

use ndarray::Array2;

use crate::data::{MAX_CLASSES, MAX_FEATURES};
use crate::rng::Rng;

use super::config::{Arch, TfmConfig};

#[derive(Clone, Debug)]
pub struct Linear {
    pub w: Array2<f64>,
    /// 1×out bias row.
    pub b: Array2<f64>,
}

impl Linear {
    fn init(rows: usize, cols: usize, rng: &mut Rng) -> Self {
        // Xavier-normal weights, zero biases.
        let std = (2.0 / (rows + cols) as f64).sqrt();
        Linear {
            w: Array2::from_shape_fn((rows, cols), |_| rng.normal() * std),
            b: Array2::zeros((1, cols)),
        }
    }

    fn zeros(rows: usize, cols: usize) -> Self {
        Linear { w: Array2::zeros((rows, cols)), b: Array2::zeros((1, cols)) }
    }
}

#[derive(Clone, Debug)]
pub struct LayerNorm {
    pub gamma: Array2<f64>,
    pub beta: Array2<f64>,
}

impl LayerNorm {
    fn init(dim: usize) -> Self {
        LayerNorm { gamma: Array2::ones((1, dim)), beta: Array2::zeros((1, dim)) }
    }

    fn zeros(dim: usize) -> Self {
        LayerNorm { gamma: Array2::zeros((1, dim)), beta: Array2::zeros((1, dim)) }
    }
}

#[derive(Clone, Debug)]
pub struct Attention {
    pub wq: Linear,
    pub wk: Linear,
    pub wv: Linear,
    pub wo: Linear,
}

impl Attention {
    fn init(dim: usize, rng: &mut Rng) -> Self {
        Attention {
            wq: Linear::init(dim, dim, rng),
            wk: Linear::init(dim, dim, rng),
            wv: Linear::init(dim, dim, rng),
            wo: Linear::init(dim, dim, rng),
        }
    }

    fn zeros(dim: usize) -> Self {
        Attention {
            wq: Linear::zeros(dim, dim),
            wk: Linear::zeros(dim, dim),
            wv: Linear::zeros(dim, dim),
            wo: Linear::zeros(dim, dim),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mlp {
    pub w1: Linear,
    pub w2: Linear,
}

impl Mlp {
    fn init(dim: usize, hidden: usize, rng: &mut Rng) -> Self {
        Mlp { w1: Linear::init(dim, hidden, rng), w2: Linear::init(hidden, dim, rng) }
    }

    fn zeros(dim: usize, hidden: usize) -> Self {
        Mlp { w1: Linear::zeros(dim, hidden), w2: Linear::zeros(hidden, dim) }
    }
}

/// One 1D block: masked row attention then MLP, both pre-LN with residuals.
#[derive(Clone, Debug)]
pub struct Block1d {
    pub ln_attn: LayerNorm,
    pub attn: Attention,
    pub ln_mlp: LayerNorm,
    pub mlp: Mlp,
}

/// One 2D block: column attention (within each row), masked row attention
/// (within each column), then MLP.
#[derive(Clone, Debug)]
pub struct Block2d {
    pub ln_col: LayerNorm,
    pub col_attn: Attention,
    pub ln_row: LayerNorm,
    pub row_attn: Attention,
    pub ln_mlp: LayerNorm,
    pub mlp: Mlp,
}

#[derive(Clone, Debug)]
pub enum Layers {
    OneD(Vec<Block1d>),
    TwoD(Vec<Block2d>),
}

/// Embedding parameters. The 1D path projects the zero-padded feature vector
/// per row; the 2D path embeds each cell value plus a column-identity
/// embedding (slot MAX_FEATURES is the label column).
#[derive(Clone, Debug)]
pub struct Embed {
    pub feat_proj: Linear,
    pub value: Linear,
    pub col_emb: Array2<f64>,
    pub label_emb: Array2<f64>,
    pub reg_label: Linear,
    pub mask_emb: Array2<f64>,
}

#[derive(Clone, Debug)]
pub struct TfmModel {
    pub config: TfmConfig,
    pub embed: Embed,
    pub layers: Layers,
    pub final_ln: LayerNorm,
    pub cls_head: Linear,
    pub reg_head: Linear,
}

const EMB_STD: f64 = 0.3;

impl TfmModel {
    /// Random initialization.
    pub fn init(config: &TfmConfig, rng: &mut Rng) -> Self {
        config.validate().expect("invalid TfmConfig");
        let dim = config.model_dim;
        let hidden = config.mlp_hidden();
        let embed = Embed {
            feat_proj: Linear::init(MAX_FEATURES, dim, rng),
            value: Linear::init(1, dim, rng),
            col_emb: Array2::from_shape_fn((MAX_FEATURES + 1, dim), |_| rng.normal() * EMB_STD),
            label_emb: Array2::from_shape_fn((MAX_CLASSES, dim), |_| rng.normal() * EMB_STD),
            reg_label: Linear::init(1, dim, rng),
            mask_emb: Array2::from_shape_fn((1, dim), |_| rng.normal() * EMB_STD),
        };
        let layers = match config.arch {
            Arch::OneD => Layers::OneD(
                (0..config.layers)
                    .map(|_| Block1d {
                        ln_attn: LayerNorm::init(dim),
                        attn: Attention::init(dim, rng),
                        ln_mlp: LayerNorm::init(dim),
                        mlp: Mlp::init(dim, hidden, rng),
                    })
                    .collect(),
            ),
            Arch::TwoD => Layers::TwoD(
                (0..config.layers)
                    .map(|_| Block2d {
                        ln_col: LayerNorm::init(dim),
                        col_attn: Attention::init(dim, rng),
                        ln_row: LayerNorm::init(dim),
                        row_attn: Attention::init(dim, rng),
                        ln_mlp: LayerNorm::init(dim),
                        mlp: Mlp::init(dim, hidden, rng),
                    })
                    .collect(),
            ),
        };
        TfmModel {
            config: *config,
            embed,
            layers,
            final_ln: LayerNorm::init(dim),
            cls_head: Linear::init(dim, MAX_CLASSES, rng),
            reg_head: Linear::init(dim, 1, rng),
        }
    }

    /// Same shapes, all zeros; the gradient container.
    pub fn zeros_like(&self) -> Self {
        let config = self.config;
        let dim = config.model_dim;
        let hidden = config.mlp_hidden();
        let embed = Embed {
            feat_proj: Linear::zeros(MAX_FEATURES, dim),
            value: Linear::zeros(1, dim),
            col_emb: Array2::zeros((MAX_FEATURES + 1, dim)),
            label_emb: Array2::zeros((MAX_CLASSES, dim)),
            reg_label: Linear::zeros(1, dim),
            mask_emb: Array2::zeros((1, dim)),
        };
        let layers = match &self.layers {
            Layers::OneD(blocks) => Layers::OneD(
                blocks
                    .iter()
                    .map(|_| Block1d {
                        ln_attn: LayerNorm::zeros(dim),
                        attn: Attention::zeros(dim),
                        ln_mlp: LayerNorm::zeros(dim),
                        mlp: Mlp::zeros(dim, hidden),
                    })
                    .collect(),
            ),
            Layers::TwoD(blocks) => Layers::TwoD(
                blocks
                    .iter()
                    .map(|_| Block2d {
                        ln_col: LayerNorm::zeros(dim),
                        col_attn: Attention::zeros(dim),
                        ln_row: LayerNorm::zeros(dim),
                        row_attn: Attention::zeros(dim),
                        ln_mlp: LayerNorm::zeros(dim),
                        mlp: Mlp::zeros(dim, hidden),
                    })
                    .collect(),
            ),
        };
        TfmModel {
            config,
            embed,
            layers,
            final_ln: LayerNorm::zeros(dim),
            cls_head: Linear::zeros(dim, MAX_CLASSES),
            reg_head: Linear::zeros(dim, 1),
        }
    }

    /// Immutable walk over every parameter tensor in canonical order.
    pub fn for_each_param<'a>(&'a self, f: &mut impl FnMut(String, &'a Array2<f64>)) {
        let e = &self.embed;
        f("embed.feat_proj.w".into(), &e.feat_proj.w);
        f("embed.feat_proj.b".into(), &e.feat_proj.b);
        f("embed.value.w".into(), &e.value.w);
        f("embed.value.b".into(), &e.value.b);
        f("embed.col_emb".into(), &e.col_emb);
        f("embed.label_emb".into(), &e.label_emb);
        f("embed.reg_label.w".into(), &e.reg_label.w);
        f("embed.reg_label.b".into(), &e.reg_label.b);
        f("embed.mask_emb".into(), &e.mask_emb);
        let visit_attn =
            |tag: &str, a: &'a Attention, f: &mut dyn FnMut(String, &'a Array2<f64>)| {
                f(format!("{tag}.wq.w"), &a.wq.w);
                f(format!("{tag}.wq.b"), &a.wq.b);
                f(format!("{tag}.wk.w"), &a.wk.w);
                f(format!("{tag}.wk.b"), &a.wk.b);
                f(format!("{tag}.wv.w"), &a.wv.w);
                f(format!("{tag}.wv.b"), &a.wv.b);
                f(format!("{tag}.wo.w"), &a.wo.w);
                f(format!("{tag}.wo.b"), &a.wo.b);
            };
        match &self.layers {
            Layers::OneD(blocks) => {
                for (l, b) in blocks.iter().enumerate() {
                    f(format!("layer{l}.ln_attn.gamma"), &b.ln_attn.gamma);
                    f(format!("layer{l}.ln_attn.beta"), &b.ln_attn.beta);
                    visit_attn(&format!("layer{l}.attn"), &b.attn, f);
                    f(format!("layer{l}.ln_mlp.gamma"), &b.ln_mlp.gamma);
                    f(format!("layer{l}.ln_mlp.beta"), &b.ln_mlp.beta);
                    f(format!("layer{l}.mlp.w1.w"), &b.mlp.w1.w);
                    f(format!("layer{l}.mlp.w1.b"), &b.mlp.w1.b);
                    f(format!("layer{l}.mlp.w2.w"), &b.mlp.w2.w);
                    f(format!("layer{l}.mlp.w2.b"), &b.mlp.w2.b);
                }
            }
            Layers::TwoD(blocks) => {
                for (l, b) in blocks.iter().enumerate() {
                    f(format!("layer{l}.ln_col.gamma"), &b.ln_col.gamma);
                    f(format!("layer{l}.ln_col.beta"), &b.ln_col.beta);
                    visit_attn(&format!("layer{l}.col_attn"), &b.col_attn, f);
                    f(format!("layer{l}.ln_row.gamma"), &b.ln_row.gamma);
                    f(format!("layer{l}.ln_row.beta"), &b.ln_row.beta);
                    visit_attn(&format!("layer{l}.row_attn"), &b.row_attn, f);
                    f(format!("layer{l}.ln_mlp.gamma"), &b.ln_mlp.gamma);
                    f(format!("layer{l}.ln_mlp.beta"), &b.ln_mlp.beta);
                    f(format!("layer{l}.mlp.w1.w"), &b.mlp.w1.w);
                    f(format!("layer{l}.mlp.w1.b"), &b.mlp.w1.b);
                    f(format!("layer{l}.mlp.w2.w"), &b.mlp.w2.w);
                    f(format!("layer{l}.mlp.w2.b"), &b.mlp.w2.b);
                }
            }
        }
        f("final_ln.gamma".into(), &self.final_ln.gamma);
        f("final_ln.beta".into(), &self.final_ln.beta);
        f("cls_head.w".into(), &self.cls_head.w);
        f("cls_head.b".into(), &self.cls_head.b);
        f("reg_head.w".into(), &self.reg_head.w);
        f("reg_head.b".into(), &self.reg_head.b);
    }

    /// Mutable walk, same order as [`Self::for_each_param`].
    pub fn for_each_param_mut(&mut self, f: &mut impl FnMut(String, &mut Array2<f64>)) {
        let e = &mut self.embed;
        f("embed.feat_proj.w".into(), &mut e.feat_proj.w);
        f("embed.feat_proj.b".into(), &mut e.feat_proj.b);
        f("embed.value.w".into(), &mut e.value.w);
        f("embed.value.b".into(), &mut e.value.b);
        f("embed.col_emb".into(), &mut e.col_emb);
        f("embed.label_emb".into(), &mut e.label_emb);
        f("embed.reg_label.w".into(), &mut e.reg_label.w);
        f("embed.reg_label.b".into(), &mut e.reg_label.b);
        f("embed.mask_emb".into(), &mut e.mask_emb);
        fn visit_attn_mut(
            tag: &str,
            a: &mut Attention,
            f: &mut impl FnMut(String, &mut Array2<f64>),
        ) {
            f(format!("{tag}.wq.w"), &mut a.wq.w);
            f(format!("{tag}.wq.b"), &mut a.wq.b);
            f(format!("{tag}.wk.w"), &mut a.wk.w);
            f(format!("{tag}.wk.b"), &mut a.wk.b);
            f(format!("{tag}.wv.w"), &mut a.wv.w);
            f(format!("{tag}.wv.b"), &mut a.wv.b);
            f(format!("{tag}.wo.w"), &mut a.wo.w);
            f(format!("{tag}.wo.b"), &mut a.wo.b);
        }
        match &mut self.layers {
            Layers::OneD(blocks) => {
                for (l, b) in blocks.iter_mut().enumerate() {
                    f(format!("layer{l}.ln_attn.gamma"), &mut b.ln_attn.gamma);
                    f(format!("layer{l}.ln_attn.beta"), &mut b.ln_attn.beta);
                    visit_attn_mut(&format!("layer{l}.attn"), &mut b.attn, f);
                    f(format!("layer{l}.ln_mlp.gamma"), &mut b.ln_mlp.gamma);
                    f(format!("layer{l}.ln_mlp.beta"), &mut b.ln_mlp.beta);
                    f(format!("layer{l}.mlp.w1.w"), &mut b.mlp.w1.w);
                    f(format!("layer{l}.mlp.w1.b"), &mut b.mlp.w1.b);
                    f(format!("layer{l}.mlp.w2.w"), &mut b.mlp.w2.w);
                    f(format!("layer{l}.mlp.w2.b"), &mut b.mlp.w2.b);
                }
            }
            Layers::TwoD(blocks) => {
                for (l, b) in blocks.iter_mut().enumerate() {
                    f(format!("layer{l}.ln_col.gamma"), &mut b.ln_col.gamma);
                    f(format!("layer{l}.ln_col.beta"), &mut b.ln_col.beta);
                    visit_attn_mut(&format!("layer{l}.col_attn"), &mut b.col_attn, f);
                    f(format!("layer{l}.ln_row.gamma"), &mut b.ln_row.gamma);
                    f(format!("layer{l}.ln_row.beta"), &mut b.ln_row.beta);
                    visit_attn_mut(&format!("layer{l}.row_attn"), &mut b.row_attn, f);
                    f(format!("layer{l}.ln_mlp.gamma"), &mut b.ln_mlp.gamma);
                    f(format!("layer{l}.ln_mlp.beta"), &mut b.ln_mlp.beta);
                    f(format!("layer{l}.mlp.w1.w"), &mut b.mlp.w1.w);
                    f(format!("layer{l}.mlp.w1.b"), &mut b.mlp.w1.b);
                    f(format!("layer{l}.mlp.w2.w"), &mut b.mlp.w2.w);
                    f(format!("layer{l}.mlp.w2.b"), &mut b.mlp.w2.b);
                }
            }
        }
        f("final_ln.gamma".into(), &mut self.final_ln.gamma);
        f("final_ln.beta".into(), &mut self.final_ln.beta);
        f("cls_head.w".into(), &mut self.cls_head.w);
        f("cls_head.b".into(), &mut self.cls_head.b);
        f("reg_head.w".into(), &mut self.reg_head.w);
        f("reg_head.b".into(), &mut self.reg_head.b);
    }

    /// Parameter tensors in canonical order.
    pub fn param_list(&self) -> Vec<(String, &Array2<f64>)> {
        let mut out = Vec::new();
        self.for_each_param(&mut |name, p| out.push((name, p)));
        out
    }

    pub fn num_parameters(&self) -> usize {
        let mut n = 0;
        self.for_each_param(&mut |_, p| n += p.len());
        n
    }

    /// Accumulate `other * scale` into `self` (both must share shapes).
    pub fn add_scaled(&mut self, other: &TfmModel, scale: f64) {
        let mut others = Vec::new();
        other.for_each_param(&mut |_, p| others.push(p));
        let mut i = 0;
        self.for_each_param_mut(&mut |_, p| {
            p.scaled_add(scale, others[i]);
            i += 1;
        });
    }

    pub fn all_finite(&self) -> bool {
        let mut ok = true;
        self.for_each_param(&mut |_, p| {
            if p.iter().any(|v| !v.is_finite()) {
                ok = false;
            }
        });
        ok
    }
}
