//! Forward/backward primitives: linear maps, layer norm, GELU, and grouped
//! masked multi-head attention. Every backward consumes the cache its
//! forward produced; no autograd, every gradient is written out by hand.
//!
//! Masked attention uses a compact T×(s+1) probability layout: columns 0..s
//! hold the support-key probabilities and column s holds the query token's
//! self-attention weight. Disallowed pairs are never scored, so no -inf
//! entries ever reach exp().

use ndarray::{s, Array2, Axis};

use super::params::{Attention, LayerNorm, Linear};

pub const LN_EPS: f64 = 1e-5;

// ---------------------------------------------------------------- linear

pub fn linear_forward(lin: &Linear, x: &Array2<f64>) -> Array2<f64> {
    let mut out = x.dot(&lin.w);
    out += &lin.b;
    out
}

/// Returns dx; accumulates parameter gradients into `g`.
pub fn linear_backward(
    lin: &Linear,
    g: &mut Linear,
    x: &Array2<f64>,
    dout: &Array2<f64>,
) -> Array2<f64> {
    g.w += &x.t().dot(dout);
    g.b += &dout.sum_axis(Axis(0)).insert_axis(Axis(0));
    dout.dot(&lin.w.t())
}

// -------------------------------------------------------------- layernorm

pub struct LnCache {
    /// Normalized input (x - mean) / std, per row.
    xhat: Array2<f64>,
    /// Per-row std (including epsilon).
    std: Vec<f64>,
}

pub fn ln_forward(ln: &LayerNorm, x: &Array2<f64>) -> (Array2<f64>, LnCache) {
    let (n, d) = x.dim();
    let mut xhat = x.clone();
    let mut std = Vec::with_capacity(n);
    let inv_d = 1.0 / d as f64;
    for mut row in xhat.rows_mut() {
        let r = row.as_slice_mut().unwrap();
        let mean = r.iter().sum::<f64>() * inv_d;
        let var = r.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * inv_d;
        let sd = (var + LN_EPS).sqrt();
        std.push(sd);
        let inv_sd = 1.0 / sd;
        for v in r.iter_mut() {
            *v = (*v - mean) * inv_sd;
        }
    }
    let mut out = xhat.clone();
    out *= &ln.gamma;
    out += &ln.beta;
    (out, LnCache { xhat, std })
}

pub fn ln_backward(
    ln: &LayerNorm,
    g: &mut LayerNorm,
    cache: &LnCache,
    dout: &Array2<f64>,
) -> Array2<f64> {
    let (n, d) = dout.dim();
    let mut dx = Array2::zeros((n, d));
    let gamma = ln.gamma.row(0);
    let gamma = gamma.as_slice().unwrap();
    let ggamma = g.gamma.as_slice_mut().unwrap();
    let gbeta = g.beta.as_slice_mut().unwrap();
    let inv_d = 1.0 / d as f64;
    for i in 0..n {
        let dout_row = dout.row(i);
        let dout_row = dout_row.as_slice().unwrap();
        let xhat_row = cache.xhat.row(i);
        let xhat_row = xhat_row.as_slice().unwrap();
        let mut sum_g = 0.0;
        let mut sum_gx = 0.0;
        for j in 0..d {
            let gval = dout_row[j] * gamma[j];
            sum_g += gval;
            sum_gx += gval * xhat_row[j];
            ggamma[j] += dout_row[j] * xhat_row[j];
            gbeta[j] += dout_row[j];
        }
        let inv_sd = 1.0 / cache.std[i];
        let mut dx_row = dx.row_mut(i);
        let dx_row = dx_row.as_slice_mut().unwrap();
        for j in 0..d {
            let gval = dout_row[j] * gamma[j];
            dx_row[j] = (gval - sum_g * inv_d - xhat_row[j] * sum_gx * inv_d) * inv_sd;
        }
    }
    dx
}

// ------------------------------------------------------------------ gelu

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
const GELU_A: f64 = 0.044_715;

pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

pub fn gelu_grad(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

pub fn gelu_forward(x: &Array2<f64>) -> Array2<f64> {
    x.mapv(gelu)
}

pub fn gelu_backward(x: &Array2<f64>, dout: &Array2<f64>) -> Array2<f64> {
    let mut dx = x.mapv(gelu_grad);
    dx *= dout;
    dx
}

// ------------------------------------------------------------- attention

/// Token-group layout attention operates over.
#[derive(Clone, Copy, Debug)]
pub enum AttnPattern {
    /// One group over all tokens (token index = row index), PFN-masked:
    /// support rows attend to support rows; query rows attend to support
    /// rows and themselves.
    Rows { s: usize },
    /// Tokens form a rows×cols grid (row-major); each grid row is one
    /// unmasked group.
    WithinRow { rows: usize, cols: usize },
    /// Grid as above; each grid column is one group over the `rows` axis,
    /// PFN-masked with `s` support rows.
    AcrossRows { rows: usize, cols: usize, s: usize },
}

enum GroupIndex {
    /// Group tokens are exactly 0..len in order.
    Identity { len: usize },
    /// Contiguous token range.
    Range { start: usize, len: usize },
    /// Strided rows of a grid: token = start + i * stride.
    Strided { start: usize, stride: usize, len: usize },
}

impl GroupIndex {
    fn token(&self, i: usize) -> usize {
        match *self {
            GroupIndex::Identity { .. } => i,
            GroupIndex::Range { start, .. } => start + i,
            GroupIndex::Strided { start, stride, .. } => start + i * stride,
        }
    }
}

struct Group {
    idx: GroupIndex,
    /// Number of support positions for masking; `None` = unmasked.
    mask_s: Option<usize>,
}

fn groups_for(pattern: &AttnPattern, total: usize) -> Vec<Group> {
    match *pattern {
        AttnPattern::Rows { s } => {
            vec![Group { idx: GroupIndex::Identity { len: total }, mask_s: Some(s) }]
        }
        AttnPattern::WithinRow { rows, cols } => (0..rows)
            .map(|r| Group {
                idx: GroupIndex::Range { start: r * cols, len: cols },
                mask_s: None,
            })
            .collect(),
        AttnPattern::AcrossRows { rows, cols, s } => (0..cols)
            .map(|c| Group {
                idx: GroupIndex::Strided { start: c, stride: cols, len: rows },
                mask_s: Some(s),
            })
            .collect(),
    }
}

/// Copy one head's columns of the group's tokens into a contiguous buffer.
fn gather_head(x: &Array2<f64>, idx: &GroupIndex, h0: usize, dh: usize) -> Array2<f64> {
    match *idx {
        GroupIndex::Identity { len } => x.slice(s![..len, h0..h0 + dh]).to_owned(),
        GroupIndex::Range { start, len } => {
            x.slice(s![start..start + len, h0..h0 + dh]).to_owned()
        }
        GroupIndex::Strided { start, stride, len } => {
            let mut out = Array2::zeros((len, dh));
            for i in 0..len {
                out.row_mut(i).assign(&x.slice(s![start + i * stride, h0..h0 + dh]));
            }
            out
        }
    }
}

fn scatter_head(target: &mut Array2<f64>, idx: &GroupIndex, h0: usize, values: &Array2<f64>) {
    let dh = values.ncols();
    for i in 0..values.nrows() {
        let t = idx.token(i);
        let mut slot = target.slice_mut(s![t, h0..h0 + dh]);
        slot += &values.row(i);
    }
}

/// Attention probabilities for one (group, head).
enum Probs {
    /// Unmasked: full G×G row softmax.
    Full(Array2<f64>),
    /// Masked compact layout: G×(s+1). Columns 0..s are support keys;
    /// column s is the self weight (query rows only).
    Compact(Array2<f64>),
}

pub struct AttnCache {
    x: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    probs: Vec<Probs>,
    concat: Array2<f64>,
    pattern: AttnPattern,
    heads: usize,
}

/// Softmax over a contiguous slice, in place.
fn softmax_slice(row: &mut [f64]) {
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    let inv = 1.0 / sum;
    for v in row.iter_mut() {
        *v *= inv;
    }
}

/// dS = A .* (dA - rowdot(dA, A)), over a contiguous slice.
fn softmax_backward_slice(probs: &[f64], dprobs: &[f64], ds: &mut [f64]) {
    let dot: f64 = probs.iter().zip(dprobs).map(|(a, d)| a * d).sum();
    for j in 0..probs.len() {
        ds[j] = probs[j] * (dprobs[j] - dot);
    }
}

/// Masked attention core for one head of one group.
/// qh/kh/vh are G×dh contiguous; returns (output G×dh, compact probs).
fn masked_head_forward(
    qh: &Array2<f64>,
    kh: &Array2<f64>,
    vh: &Array2<f64>,
    mask_s: usize,
    scale: f64,
) -> (Array2<f64>, Array2<f64>) {
    let g = qh.nrows();
    let dh = qh.ncols();
    let s_len = mask_s;
    let kh_sup = kh.slice(s![..s_len, ..]);
    // scores over support keys
    let mut probs = Array2::zeros((g, s_len + 1));
    {
        let mut prefix = probs.slice_mut(s![.., ..s_len]);
        prefix.assign(&qh.dot(&kh_sup.t()));
        prefix *= scale;
    }
    for i in 0..g {
        let self_score = if i >= s_len {
            qh.row(i).dot(&kh.row(i)) * scale
        } else {
            f64::NEG_INFINITY // support rows have no extra self column
        };
        probs[[i, s_len]] = self_score;
        let row = probs.row_mut(i).into_slice().unwrap();
        if i >= s_len {
            softmax_slice(row);
        } else {
            softmax_slice(&mut row[..s_len]);
            row[s_len] = 0.0;
        }
    }
    let vh_sup = vh.slice(s![..s_len, ..]);
    let mut out = probs.slice(s![.., ..s_len]).dot(&vh_sup);
    for i in s_len..g {
        let w = probs[[i, s_len]];
        let mut row = out.row_mut(i);
        for j in 0..dh {
            row[j] += w * vh[[i, j]];
        }
    }
    (out, probs)
}

/// Backward of [`masked_head_forward`]; returns (dqh, dkh, dvh).
fn masked_head_backward(
    qh: &Array2<f64>,
    kh: &Array2<f64>,
    vh: &Array2<f64>,
    probs: &Array2<f64>,
    doh: &Array2<f64>,
    mask_s: usize,
    scale: f64,
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let g = qh.nrows();
    let dh = qh.ncols();
    let s_len = mask_s;
    let kh_sup = kh.slice(s![..s_len, ..]);
    let vh_sup = vh.slice(s![..s_len, ..]);

    // dprobs in compact layout
    let mut dprobs = Array2::zeros((g, s_len + 1));
    dprobs.slice_mut(s![.., ..s_len]).assign(&doh.dot(&vh_sup.t()));
    for i in s_len..g {
        dprobs[[i, s_len]] = doh.row(i).dot(&vh.row(i));
    }
    // softmax backward per row, then scale
    let mut ds = Array2::zeros((g, s_len + 1));
    for i in 0..g {
        let width = if i >= s_len { s_len + 1 } else { s_len };
        let p = probs.row(i);
        let p = &p.as_slice().unwrap()[..width];
        let dp = dprobs.row(i);
        let dp = &dp.as_slice().unwrap()[..width];
        let mut row = ds.row_mut(i);
        let row = row.as_slice_mut().unwrap();
        softmax_backward_slice(p, dp, &mut row[..width]);
        for v in row[..width].iter_mut() {
            *v *= scale;
        }
    }

    // dvh: support keys get the prefix contribution, queries their self term
    let mut dvh = Array2::zeros((g, dh));
    {
        let prefix = probs.slice(s![.., ..s_len]);
        let contrib = prefix.t().dot(doh);
        dvh.slice_mut(s![..s_len, ..]).assign(&contrib);
    }
    for i in s_len..g {
        let w = probs[[i, s_len]];
        let mut row = dvh.row_mut(i);
        for j in 0..dh {
            row[j] += w * doh[[i, j]];
        }
    }

    // dqh = dS_prefix . K_sup (+ self), dkh = dS_prefix^T . Q (+ self)
    let ds_prefix = ds.slice(s![.., ..s_len]);
    let mut dqh = ds_prefix.dot(&kh_sup);
    let mut dkh = Array2::zeros((g, dh));
    dkh.slice_mut(s![..s_len, ..]).assign(&ds_prefix.t().dot(qh));
    for i in s_len..g {
        let w = ds[[i, s_len]];
        for j in 0..dh {
            dqh[[i, j]] += w * kh[[i, j]];
            dkh[[i, j]] += w * qh[[i, j]];
        }
    }
    (dqh, dkh, dvh)
}

pub fn attn_forward(
    params: &Attention,
    x: &Array2<f64>,
    pattern: AttnPattern,
    heads: usize,
) -> (Array2<f64>, AttnCache) {
    let total = x.nrows();
    let dim = x.ncols();
    let dh = dim / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let q = linear_forward(&params.wq, x);
    let k = linear_forward(&params.wk, x);
    let v = linear_forward(&params.wv, x);
    let mut concat = Array2::zeros((total, dim));
    let groups = groups_for(&pattern, total);
    let mut probs = Vec::with_capacity(groups.len() * heads);
    for group in &groups {
        for h in 0..heads {
            let h0 = h * dh;
            let qh = gather_head(&q, &group.idx, h0, dh);
            let kh = gather_head(&k, &group.idx, h0, dh);
            let vh = gather_head(&v, &group.idx, h0, dh);
            match group.mask_s {
                Some(ms) => {
                    let (oh, p) = masked_head_forward(&qh, &kh, &vh, ms, scale);
                    for i in 0..oh.nrows() {
                        let t = group.idx.token(i);
                        concat.slice_mut(s![t, h0..h0 + dh]).assign(&oh.row(i));
                    }
                    probs.push(Probs::Compact(p));
                }
                None => {
                    let mut scores = qh.dot(&kh.t());
                    scores *= scale;
                    for mut row in scores.rows_mut() {
                        softmax_slice(row.as_slice_mut().unwrap());
                    }
                    let oh = scores.dot(&vh);
                    for i in 0..oh.nrows() {
                        let t = group.idx.token(i);
                        concat.slice_mut(s![t, h0..h0 + dh]).assign(&oh.row(i));
                    }
                    probs.push(Probs::Full(scores));
                }
            }
        }
    }
    let out = linear_forward(&params.wo, &concat);
    let cache = AttnCache { x: x.clone(), q, k, v, probs, concat, pattern, heads };
    (out, cache)
}

/// Returns dx; accumulates parameter gradients into `g`.
pub fn attn_backward(
    params: &Attention,
    g: &mut Attention,
    cache: &AttnCache,
    dout: &Array2<f64>,
) -> Array2<f64> {
    let total = cache.x.nrows();
    let dim = cache.x.ncols();
    let heads = cache.heads;
    let dh = dim / heads;
    let scale = 1.0 / (dh as f64).sqrt();
    let dconcat = linear_backward(&params.wo, &mut g.wo, &cache.concat, dout);
    let mut dq = Array2::zeros((total, dim));
    let mut dk = Array2::zeros((total, dim));
    let mut dv = Array2::zeros((total, dim));
    let groups = groups_for(&cache.pattern, total);
    for (gi, group) in groups.iter().enumerate() {
        for h in 0..heads {
            let h0 = h * dh;
            let qh = gather_head(&cache.q, &group.idx, h0, dh);
            let kh = gather_head(&cache.k, &group.idx, h0, dh);
            let vh = gather_head(&cache.v, &group.idx, h0, dh);
            let doh = gather_head(&dconcat, &group.idx, h0, dh);
            let (dqh, dkh, dvh) = match (&cache.probs[gi * heads + h], group.mask_s) {
                (Probs::Compact(p), Some(ms)) => {
                    masked_head_backward(&qh, &kh, &vh, p, &doh, ms, scale)
                }
                (Probs::Full(p), None) => {
                    let dprobs = doh.dot(&vh.t());
                    let dvh = p.t().dot(&doh);
                    let mut ds = Array2::zeros(p.dim());
                    for i in 0..p.nrows() {
                        softmax_backward_slice(
                            p.row(i).as_slice().unwrap(),
                            dprobs.row(i).as_slice().unwrap(),
                            ds.row_mut(i).into_slice().unwrap(),
                        );
                    }
                    ds *= scale;
                    let dqh = ds.dot(&kh);
                    let dkh = ds.t().dot(&qh);
                    (dqh, dkh, dvh)
                }
                _ => unreachable!("probs layout always matches the mask"),
            };
            scatter_head(&mut dq, &group.idx, h0, &dqh);
            scatter_head(&mut dk, &group.idx, h0, &dkh);
            scatter_head(&mut dv, &group.idx, h0, &dvh);
        }
    }
    let mut dx = linear_backward(&params.wq, &mut g.wq, &cache.x, &dq);
    dx += &linear_backward(&params.wk, &mut g.wk, &cache.x, &dk);
    dx += &linear_backward(&params.wv, &mut g.wv, &cache.x, &dv);
    dx
}
