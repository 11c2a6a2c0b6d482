//! θ-type Calderón–Zygmund kernels, truncated singular integrals,
//! commutators and maximal operators.

mod apply;
mod kernel;
mod maximal;
mod theta;

pub use apply::apply_operator;
pub use kernel::{kernel_constants, Kernel, KernelConstants, KernelKind, SamplePlan};
pub use maximal::{maximal, MaximalKind};
pub use theta::{DiniIntegrals, ThetaModulus};
