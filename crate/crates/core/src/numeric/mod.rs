//! Numerical kernels shared by the geometric modules.

mod brute;
mod polyline;
mod roots;
mod special;

pub use brute::{brute_distance, brute_distance_with, BruteEstimate, BruteOptions, DEFAULT_SEED};
pub use polyline::{polyline_endpoint, polyline_length, PolylinePath};
pub use roots::{fd_derivative, refine_root, Bracket, RootEstimate};
pub use special::{
    branches, sinc_like, sine_deficit_ratio, versine_ratio, DEFICIT_GUARD, SERIES_GUARD,
};
