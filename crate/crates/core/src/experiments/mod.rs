//! Random instances, parameter sweeps and the minimum equation.

mod generate;
mod m0;
mod sweep;

pub use generate::{gen_random_cnf, instance_seed, GenConfig, IMPURITY_TOLERANCE};
pub use m0::{m0_equation, solve_m0, M0Solution};
pub use sweep::{
    assess, locate_empirical_minimum, sweep, sweep_point, write_csv, write_dat, Axis, EmpiricalMinimum, ExperimentRow,
    InstanceOutcome, SweepConfig, CSV_HEADER, DESK_MAX_VARS, IMPURITY_SWEEP_RATIO,
};
