//! Seeded Brownian drivers and Euler–Maruyama integration of the classical, N=1 and
//! N=2 Loewner systems, plus the representation-level process `Q(H_t)`.

mod driver;
mod group;
mod points;

pub use driver::{splitmix64, trial_seed, DriverConfig, Increments};
pub use group::{simulate_group, CompiledGroup, GroupScheme, GroupSde, GroupState, NoiseTerm, SparseOp};
pub use points::{
    classical_exact_kappa0, classical_series, classical_step, classical_with, n1_with, n2_with, simulate_classical,
    simulate_n1_point, simulate_n2_point, ClassicalPath, N1Options, N1Path, N2Params, N2Path, PathOptions,
    PointStateN1, PointStateN2, ThetaDrift,
};
