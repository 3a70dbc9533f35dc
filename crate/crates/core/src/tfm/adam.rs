//! Adam with global gradient-norm clipping.

use ndarray::Array2;

use super::config::TrainHp;
use super::params::TfmModel;

pub struct Adam {
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    step: usize,
}

impl Adam {
    pub fn new(model: &TfmModel) -> Self {
        let mut m = Vec::new();
        model.for_each_param(&mut |_, p| m.push(Array2::zeros(p.dim())));
        let v = m.clone();
        Adam { m, v, step: 0 }
    }

    pub fn step_count(&self) -> usize {
        self.step
    }

    /// One update; `grads` must mirror the model's parameter walk. Returns
    /// the pre-clip global gradient norm.
    pub fn update(&mut self, model: &mut TfmModel, grads: &TfmModel, hp: &TrainHp) -> f64 {
        let mut gvec = Vec::new();
        grads.for_each_param(&mut |_, g| gvec.push(g));
        let norm: f64 = gvec.iter().map(|g| g.iter().map(|v| v * v).sum::<f64>()).sum::<f64>().sqrt();
        let scale = if hp.grad_clip > 0.0 && norm > hp.grad_clip { hp.grad_clip / norm } else { 1.0 };
        self.step += 1;
        let t = self.step as f64;
        let bc1 = 1.0 - hp.beta1.powf(t);
        let bc2 = 1.0 - hp.beta2.powf(t);
        let mut i = 0;
        model.for_each_param_mut(&mut |_, p| {
            let g = gvec[i];
            let m = &mut self.m[i];
            let v = &mut self.v[i];
            for ((pv, gv), (mv, vv)) in
                p.iter_mut().zip(g.iter()).zip(m.iter_mut().zip(v.iter_mut()))
            {
                let gc = gv * scale;
                *mv = hp.beta1 * *mv + (1.0 - hp.beta1) * gc;
                *vv = hp.beta2 * *vv + (1.0 - hp.beta2) * gc * gc;
                let mhat = *mv / bc1;
                let vhat = *vv / bc2;
                *pv -= hp.lr * mhat / (vhat.sqrt() + hp.adam_eps);
            }
            i += 1;
        });
        norm
    }
}
