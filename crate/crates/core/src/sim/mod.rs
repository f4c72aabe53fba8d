//! Path simulation under the baseline, contagion and default-adjusted laws.

mod estimate;
mod path;
mod rng;
mod sampler;
mod weights;

pub use estimate::{
    collect_paths, estimate_probabilities, estimate_probability, estimates_from_rows, JointB,
    Law, PathEvent, Predicate, Survival,
};
pub use path::{write_paths_csv, EventKind, FPath, SystemEvent, SystemPath};
pub use rng::{derive_seed, exp1, PathSeed, Purpose, RngStreamKey};
pub use sampler::{
    draw_thresholds, extend_with_defaults, simulate_baseline_f_path, simulate_contagion_path,
    simulate_fbar_path, simulate_fbar_system_path, simulate_p0_path,
};
pub use weights::{a_martingale, girsanov_weight, pbar_weight, t_martingale};
