//! ε-regularization of the relay: transition functions, the rescaled and
//! regularized fields, the blow-up of the band, layer transits, the
//! regularized return map and the interior saddle.

pub mod equilibrium;
pub mod fields;
pub mod layer;
pub mod return_map;
pub mod trajectory;
pub mod transition;

pub use equilibrium::{regularized_equilibrium, Linearization, RegularizedEquilibrium};
pub use fields::{fast_field, regularized_field, rescaled_field, FastState, Timescale};
pub use layer::layer_transit;
pub use return_map::{fast_return_map, find_fast_cycle, FastCycleResult, DEFAULT_EPS, DEFAULT_EPS0};
pub use trajectory::{band_field, integrate_regularized};
pub use transition::{transition_derivative, transition_eval, TransitionKind};
