//! Adam with bias correction. Frozen parameters are skipped outright, so a
//! non-trainable tensor can never drift no matter how many steps run.

use super::TrainConfig;
use crate::cells::CellParams;
use crate::tensor::Tensor;

#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<Tensor>,
    v: Vec<Tensor>,
    t: u64,
}

impl AdamState {
    pub fn new(params: &CellParams) -> Self {
        let zeros: Vec<Tensor> = params
            .iter()
            .map(|p| Tensor::zeros(p.tensor.rows(), p.tensor.cols()))
            .collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }
}

/// One update over all trainable parameters; `grads` is aligned with the
/// parameter layout order.
pub fn adam_step(
    params: &mut CellParams,
    grads: &[Tensor],
    state: &mut AdamState,
    cfg: &TrainConfig,
) {
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for (idx, param) in params.iter_mut().enumerate() {
        if !param.trainable {
            continue;
        }
        let g = &grads[idx];
        debug_assert_eq!(g.shape(), param.tensor.shape());
        let m = state.m[idx].values_mut();
        let v = state.v[idx].values_mut();
        let p = param.tensor.values_mut();
        for ((pi, mi), (vi, gi)) in p
            .iter_mut()
            .zip(m.iter_mut())
            .zip(v.iter_mut().zip(g.values()))
        {
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
            let m_hat = *mi / bc1;
            let v_hat = *vi / bc2;
            *pi -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}
