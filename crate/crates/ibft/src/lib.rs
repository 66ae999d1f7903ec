//! Istanbul BFT consensus as a deterministic, event-driven state machine.
//!
//! The protocol tolerates `f` Byzantine processes out of `n >= 3f + 1` and
//! proceeds in rounds: a rotating leader proposes, processes prepare, commit,
//! and decide. Round changes carry piggybacked certificates so a new leader
//! can only propose values that are safe with respect to earlier rounds.
//!
//! The crate is pure: [`instance::Instance`] consumes events (start, message
//! delivery, timer expiry) and emits [`instance::Action`]s. All I/O, clocks,
//! and networking live in the driver (see the companion simulator crate).

pub mod instance;
pub mod justification;
pub mod message;
pub mod smr;
pub mod types;
pub mod validation;

pub use instance::{Action, Event, Instance, Rule, StepOutput};
pub use message::{Payload, SignedMessage};
pub use types::{ExternalValidity, InstanceId, ProcessId, Round, SystemConfig, Value};
