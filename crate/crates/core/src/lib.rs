//! Timed session types: parsing, compliance checking through timed automata,
//! kind inference, canonical compliants, subtyping and runtime monitoring.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod encoding;
pub mod kinding;
pub mod monitor;
pub mod semantics;
pub mod syntax;
pub mod verify;
pub mod zones;
