//! Gaussian-process surrogate: Matérn-5/2 ARD kernel, marginal-likelihood
//! fitting, posterior prediction and approximate posterior function draws.

mod dense;
mod gp;
mod kernel;
mod lbfgs;
mod sample;

pub use gp::{GpModel, FIT_MAX_ITER, FIT_STARTS};
pub use kernel::{kernel, KernelParams, LENGTHSCALE_BOUNDS, NOISE_VARIANCE_BOUNDS, SIGNAL_VARIANCE_BOUNDS};
pub use sample::{sample_posterior_function, PosteriorSample, RFF_FEATURES};
