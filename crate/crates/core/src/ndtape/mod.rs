//! Minimal dense-tensor engine with reverse-mode differentiation.
//!
//! Everything is a 2-D f64 [`Matrix`]. A [`Tape`] records primitive
//! operations during the forward pass; [`Tape::backward`] replays them in
//! reverse to produce adjoints. First-order only: second-order needs of the
//! matching loss are met by writing inner parameter gradients as primal
//! expressions (see the models module).

mod gradcheck;
mod matrix;
mod tape;

pub use gradcheck::grad_check;
pub use matrix::Matrix;
pub use tape::{sigmoid, Gradients, Tape, Var};
