//! Empirical fine-scale statistics of a center set.

pub mod curve;
pub mod moments;
pub mod region;

pub use curve::{default_xi_grid, empirical_derivative, nn_distances, nn_spacing, pair_correlation, xi_grid, Curve};
pub use moments::{
    joint_indicator_moment, joint_power_moment, mixed_cell_mass, mixed_moment_nn, mixed_moment_pair, window_count,
    CountIndex, MixedOptions, MomentEstimate, MomentOptions, PowerIndex, Window, WindowCounter, DELTA,
};
pub use region::{Region, Shape};
