//! Indirect control of a finite-dimensional quantum system through a probe.
//!
//! The system is never driven directly. It interacts with an auxiliary probe
//! whose initial state can be prepared, and the composite evolves under a
//! coupling Hamiltonian. Tracing out the probe leaves a mixture of
//! probe-conditioned unitaries acting on the system, which is able to change
//! the spectrum of the system state as well as rotate it.
//!
//! Modules:
//!
//! - [`opkit`]: dense complex matrices, density matrices, Kronecker products,
//!   partial trace, Hermitian eigendecomposition and `exp(-iHt)`.
//! - [`qubit`]: two-level system coupled to a two-level probe, closed-form
//!   reduced dynamics and a numerical control solver.
//! - [`nlevel`]: product Hamiltonians `h_s ⊗ h_p` on N-level pairs, Kraus
//!   channels and the probe-spectrum reachability problem.
//! - [`thermal`]: thermal preparation of the two-level probe.
//! - [`verify`]: brute-force composite-system oracle.
//! - [`random`]: seeded random instances for tests and benchmarks.
//!
//! Tensor ordering is system ⊗ probe everywhere, and `ħ = 1`.

pub mod error;
pub mod nlevel;
pub mod opkit;
pub mod qubit;
pub mod random;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use nlevel::{KrausChannel, ProductHamiltonian, ReachabilityProblem};
pub use num_complex::Complex64;
pub use opkit::{ComplexMatrix, DensityMatrix, Eigensystem};
pub use qubit::{ControlSolution, QubitCouplings, SolverBudget};
