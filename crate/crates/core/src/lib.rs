//! Core logic for adaptive, camera-driven learning activities.
//!
//! User and device models feed a rule table that derives an activity
//! configuration ([`adaptation`]). Skeleton traces ([`skeleton`]) drive a
//! gesture recognizer ([`gesture`]) and a hand cursor, which in turn drive the
//! activity state machines ([`activity`]). Finished sessions are logged to a
//! file store ([`store`]), summarized by [`analytics`], and questionnaire
//! answers are scored by [`ueq`]. [`replay`] runs recorded traces offline and
//! [`session`] speaks the live message protocol.

pub mod activity;
pub mod adaptation;
pub mod analytics;
pub mod content;
pub mod dataset;
pub mod gesture;
pub mod models;
pub mod replay;
pub mod session;
pub mod skeleton;
pub mod store;
pub mod ueq;
