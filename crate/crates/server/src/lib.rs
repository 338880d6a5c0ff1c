//! Session server and command-line tools for the tabviz engine.

pub mod commands;
pub mod config;
pub mod server;

pub use config::Config;
pub use server::{serve, Server};
