use crate::error::{Error, Result};
use crate::net::{Network, Tensor};

pub const DEFAULT_RHO: f64 = 0.95;
pub const DEFAULT_EPS: f64 = 1e-6;

/// Running averages of squared gradients (`eg2`) and squared updates
/// (`edx2`), one tensor per network parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaDeltaState {
    pub rho: f64,
    pub eps: f64,
    pub eg2: Vec<Tensor>,
    pub edx2: Vec<Tensor>,
}

impl AdaDeltaState {
    pub fn new(net: &Network, rho: f64, eps: f64) -> Self {
        Self::for_shapes(net.params().iter().map(|t| t.shape()), rho, eps)
    }

    pub fn for_shapes<'a>(shapes: impl IntoIterator<Item = &'a [usize]>, rho: f64, eps: f64) -> Self {
        let eg2: Vec<Tensor> = shapes.into_iter().map(Tensor::zeros).collect();
        Self {
            rho,
            eps,
            edx2: eg2.clone(),
            eg2,
        }
    }

    /// Applies one update to every parameter of `net`.
    pub fn step(&mut self, net: &mut Network, grads: &[Tensor]) -> Result<()> {
        let mut params = net.params_mut();
        self.step_tensors(&mut params, grads)
    }

    pub fn step_tensors(&mut self, params: &mut [&mut Tensor], grads: &[Tensor]) -> Result<()> {
        if params.len() != self.eg2.len() || grads.len() != self.eg2.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} parameters, {} gradients, {} accumulators",
                params.len(),
                grads.len(),
                self.eg2.len()
            )));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != g.shape() || p.shape() != self.eg2[i].shape() {
                return Err(Error::ShapeMismatch(format!(
                    "parameter {i}: {:?} vs gradient {:?}",
                    p.shape(),
                    g.shape()
                )));
            }
        }
        let (rho, eps) = (self.rho, self.eps);
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let eg2 = self.eg2[i].data_mut();
            let edx2 = self.edx2[i].data_mut();
            for (((x, &g), a), d) in p.data_mut().iter_mut().zip(g.data()).zip(eg2).zip(edx2) {
                *a = flush(rho * *a + (1.0 - rho) * g * g);
                let dx = -((*d + eps) / (*a + eps)).sqrt() * g;
                *d = flush(rho * *d + (1.0 - rho) * dx * dx);
                *x += dx;
            }
        }
        Ok(())
    }
}

// Averages of parameters that stop receiving gradient decay geometrically
// into the subnormal range, where arithmetic is very slow. Next to `eps`
// such values round away anyway.
fn flush(v: f64) -> f64 {
    if v < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_step(state: &mut AdaDeltaState, x: &mut Tensor, g: f64) {
        state.step_tensors(&mut [x], &[Tensor::scalar(g)]).unwrap();
    }

    #[test]
    fn fresh_unit_gradient() {
        let mut s = AdaDeltaState::for_shapes([&[1][..]], DEFAULT_RHO, DEFAULT_EPS);
        let mut x = Tensor::scalar(0.0);
        scalar_step(&mut s, &mut x, 1.0);
        let expected = -(1e-6f64).sqrt() / (0.05f64 + 1e-6).sqrt();
        assert!((x.data()[0] - expected).abs() < 1e-15);
        assert!((x.data()[0] + 4.472e-3).abs() < 1e-6);
    }

    #[test]
    fn zero_gradient_only_decays() {
        let mut s = AdaDeltaState::for_shapes([&[2][..]], 0.9, 1e-6);
        s.eg2[0].fill(1.0);
        s.edx2[0].fill(0.5);
        let mut x = Tensor::from_vec(vec![1.0, -2.0]);
        s.step_tensors(&mut [&mut x], &[Tensor::zeros(&[2])]).unwrap();
        assert_eq!(x.data(), &[1.0, -2.0]);
        assert!((s.eg2[0].data()[0] - 0.9).abs() < 1e-15);
        assert!((s.edx2[0].data()[0] - 0.45).abs() < 1e-15);
    }

    #[test]
    fn decayed_averages_flush_to_zero() {
        let mut s = AdaDeltaState::for_shapes([&[1][..]], 0.95, 1e-6);
        s.eg2[0].fill(1e-305);
        s.edx2[0].fill(1e-305);
        let mut x = Tensor::scalar(0.0);
        for _ in 0..200 {
            s.step_tensors(&mut [&mut x], &[Tensor::scalar(0.0)]).unwrap();
        }
        assert_eq!((s.eg2[0].data()[0], s.edx2[0].data()[0]), (0.0, 0.0));
        // the flushed state gives the same update as a fresh one
        let mut fresh = AdaDeltaState::for_shapes([&[1][..]], 0.95, 1e-6);
        let mut y = Tensor::scalar(0.0);
        scalar_step(&mut s, &mut x, 0.3);
        scalar_step(&mut fresh, &mut y, 0.3);
        assert_eq!(x, y);
    }

    #[test]
    fn three_scripted_steps() {
        let (rho, eps) = (0.95, 1e-6);
        let mut s = AdaDeltaState::for_shapes([&[1][..]], rho, eps);
        let mut x = Tensor::scalar(0.0);
        let (mut eg2, mut edx2, mut pos) = (0.0f64, 0.0f64, 0.0f64);
        for g in [1.0, -3.0, 10.0] {
            scalar_step(&mut s, &mut x, g);
            eg2 = rho * eg2 + (1.0 - rho) * g * g;
            let dx = -((edx2 + eps) / (eg2 + eps)).sqrt() * g;
            edx2 = rho * edx2 + (1.0 - rho) * dx * dx;
            pos += dx;
            // Step magnitude bounded by the update-history scale.
            assert!(dx.abs() <= ((edx2 + eps) / eps).sqrt() * eps.sqrt() / (1.0 - rho).sqrt() * 2.0);
            assert!((x.data()[0] - pos).abs() < 1e-15);
        }
    }

    #[test]
    fn loss_scale_changes_little() {
        let run = |c: f64| {
            let mut s = AdaDeltaState::for_shapes([&[1][..]], DEFAULT_RHO, DEFAULT_EPS);
            let mut x = Tensor::scalar(0.0);
            for g in [1.0, 0.5, -0.25] {
                scalar_step(&mut s, &mut x, c * g);
            }
            x.data()[0]
        };
        let (a, b) = (run(1.0), run(100.0));
        assert!(a.signum() == b.signum() && (b / a) < 1.1 && (b / a) > 0.9);
    }

    #[test]
    fn adversarial_sequence_stays_finite() {
        let mut s = AdaDeltaState::for_shapes([&[1][..]], DEFAULT_RHO, DEFAULT_EPS);
        let mut x = Tensor::scalar(0.0);
        for k in 0..10_000 {
            scalar_step(&mut s, &mut x, if k % 2 == 0 { 1e3 } else { -1e3 });
            assert!(s.eg2[0].data()[0] >= 0.0 && s.edx2[0].data()[0] >= 0.0);
            assert!(s.eg2[0].data()[0].is_finite() && s.edx2[0].data()[0].is_finite());
        }
        assert!(x.data()[0].is_finite());
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let mut s = AdaDeltaState::for_shapes([&[2][..]], DEFAULT_RHO, DEFAULT_EPS);
        let mut x = Tensor::from_vec(vec![0.0; 3]);
        let err = s.step_tensors(&mut [&mut x], &[Tensor::zeros(&[3])]);
        assert!(matches!(err, Err(Error::ShapeMismatch(_))));
    }
}
