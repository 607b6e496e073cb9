//! Dense linear algebra kernels shared by the solvers.

mod ldlt;
mod lu;
mod tridiag;

pub use ldlt::{BlockLdlt, LdltError};
pub use lu::{LuError, LuFactors};
pub use tridiag::{symmetric_tridiagonal_eig, TridiagError};
