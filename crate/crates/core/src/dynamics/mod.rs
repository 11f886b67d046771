//! Ion motion: Mathieu stability, trajectories and their spectra.

mod mathieu;
mod spectrum;
mod trajectory;

pub use mathieu::{
    mathieu_bounded, mathieu_stable, stability_boundary, stability_map, MapCell, Monodromy, StabilityMap, Verdict,
    STABILITY_MARGIN,
};
pub use spectrum::{micromotion_amplitude, secular_from_series, secular_from_trajectory, MIN_SECULAR_PERIODS};
pub use trajectory::{
    integrate_pseudo_trajectory, integrate_trajectory, Trajectory, TrajectoryOptions, TrajectoryState,
    DIVERGENCE_SCALE, MIN_STEPS_PER_PERIOD,
};
