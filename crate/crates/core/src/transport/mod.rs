//! Message passing between workers: point-to-point transports, deterministic
//! collectives and halo exchange.
//!
//! Callers only see [`WorkerGroup`]; anything implementing [`Transport`] can
//! sit underneath it. Two transports ship: [`InProcessTransport`] (threads
//! and channels) and [`TcpTransport`] (length-prefixed frames over TCP).

use std::time::Duration;

use crate::error::Result;

mod exchange;
mod frame;
mod inproc;
mod tcp;
mod worker;

pub use exchange::{
    gauge_halo_exchange, halo_exchange, spinor_face_bytes, ExchangePlan, FacePlan, COMPLEX_BYTES,
};
pub use frame::{Frame, HEADER_LEN};
pub use inproc::InProcessTransport;
pub use tcp::TcpTransport;
pub use worker::WorkerGroup;

/// How long a blocking receive waits before reporting a lost peer.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

/// Point-to-point messaging between ranks `0..size`.
///
/// `send` must not block on the receiver; `recv` blocks until a message
/// with the given source and tag arrives. Messages from one source with
/// the same tag are delivered in the order they were sent.
pub trait Transport: Send {
    fn rank(&self) -> usize;
    fn size(&self) -> usize;
    fn send(&mut self, dest: usize, tag: u32, payload: Vec<f64>) -> Result<()>;
    fn recv(&mut self, source: usize, tag: u32) -> Result<Vec<f64>>;
}
