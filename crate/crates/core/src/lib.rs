//! Exact order-theoretic geometry on finite posets of events.
//!
//! Chains of events act as observers: an event is quantified by the
//! valuations of its forward and backward projections onto chains, and
//! Euclidean structure (collinearity, orthogonality, Pythagoras, parallel
//! fences, dot and wedge products) is read off from those numbers exactly.

pub mod collinearity;
pub mod coordination;
pub mod document;
pub mod fence;
pub mod grid;
pub mod metric;
pub mod order;
pub mod projection;
pub mod rational;
pub mod verify;

pub use order::{Chain, ChainId, EventId, FrozenPoset, OrderError, Poset};
pub use rational::Rational;
