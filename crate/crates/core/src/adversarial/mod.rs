//! Lower-bound machinery: random polytopes, random shell unions, the
//! product-label law, and the experiments that compare them.

pub mod distinguish;
pub mod dyes;
pub mod eno;
pub mod matrix;
pub mod shatter;
pub mod shells;
pub mod typicality;

pub use distinguish::{distinguishing_experiment, DistinguishConfig, DistinguishReport};
pub use dyes::{marginal_identity, sample_dyes, MarginalCheck, RandomPolytope};
pub use eno::sample_eno_star;
pub use matrix::{nice_matrix_check, HalfspaceMatrix};
pub use shatter::{shattering_experiment, ShatterReport};
pub use shells::{build_shells, default_shell_count, sample_dno, ShellBoundaries, ShellPartition};
pub use typicality::{typicality_check, TypicalityConfig, TypicalityReport};
