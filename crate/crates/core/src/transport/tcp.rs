use std::collections::VecDeque;
use std::io::BufReader;
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use super::{Frame, Transport, DEFAULT_TIMEOUT};
use crate::error::{Error, Result};

const TAG_HELLO: u32 = u32::MAX;

/// Transport over TCP streams, one connection per pair of ranks.
///
/// Frames use the little-endian layout of [`Frame`]. A reader thread per
/// connection feeds a single inbox, so matching works as in the
/// in-process transport.
pub struct TcpTransport {
    rank: usize,
    size: usize,
    writers: Vec<Option<TcpStream>>,
    inbox: Receiver<Frame>,
    pending: VecDeque<Frame>,
    timeout: Duration,
}

fn io_err(e: std::io::Error) -> Error {
    Error::Transport(e.to_string())
}

fn spawn_reader(stream: TcpStream, tx: Sender<Frame>) {
    std::thread::spawn(move || {
        let mut reader = BufReader::new(stream);
        while let Ok(frame) = Frame::read_from(&mut reader) {
            if tx.send(frame).is_err() {
                break;
            }
        }
    });
}

impl TcpTransport {
    /// Connects rank `rank` to every other rank. `listener` must be bound to
    /// `addrs[rank]`; every rank has to call this concurrently.
    pub fn establish(rank: usize, listener: TcpListener, addrs: &[SocketAddr]) -> Result<Self> {
        let size = addrs.len();
        let (tx, inbox) = channel();
        let mut writers: Vec<Option<TcpStream>> = (0..size).map(|_| None).collect();
        for (peer, addr) in addrs.iter().enumerate().take(rank) {
            let mut stream = TcpStream::connect(addr).map_err(io_err)?;
            stream.set_nodelay(true).map_err(io_err)?;
            Frame {
                tag: TAG_HELLO,
                source: rank as u32,
                payload: Vec::new(),
            }
            .write_to(&mut stream)
            .map_err(io_err)?;
            spawn_reader(stream.try_clone().map_err(io_err)?, tx.clone());
            writers[peer] = Some(stream);
        }
        for _ in rank + 1..size {
            let (mut stream, _) = listener.accept().map_err(io_err)?;
            stream.set_nodelay(true).map_err(io_err)?;
            let hello = Frame::read_from(&mut stream).map_err(io_err)?;
            let peer = hello.source as usize;
            if hello.tag != TAG_HELLO || peer <= rank || peer >= size || writers[peer].is_some() {
                return Err(Error::Transport(format!(
                    "unexpected handshake from rank {peer}"
                )));
            }
            spawn_reader(stream.try_clone().map_err(io_err)?, tx.clone());
            writers[peer] = Some(stream);
        }
        Ok(Self {
            rank,
            size,
            writers,
            inbox,
            pending: VecDeque::new(),
            timeout: DEFAULT_TIMEOUT,
        })
    }

    /// A fully connected group on the loopback interface.
    pub fn local_group(size: usize) -> Result<Vec<TcpTransport>> {
        let listeners = (0..size)
            .map(|_| TcpListener::bind("127.0.0.1:0").map_err(io_err))
            .collect::<Result<Vec<_>>>()?;
        let addrs = listeners
            .iter()
            .map(|l| l.local_addr().map_err(io_err))
            .collect::<Result<Vec<_>>>()?;
        std::thread::scope(|s| {
            let handles: Vec<_> = listeners
                .into_iter()
                .enumerate()
                .map(|(rank, l)| {
                    let addrs = &addrs;
                    s.spawn(move || TcpTransport::establish(rank, l, addrs))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("handshake thread panicked"))
                .collect()
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

impl Drop for TcpTransport {
    fn drop(&mut self) {
        for stream in self.writers.iter().flatten() {
            let _ = stream.shutdown(std::net::Shutdown::Both);
        }
    }
}

impl Transport for TcpTransport {
    fn rank(&self) -> usize {
        self.rank
    }

    fn size(&self) -> usize {
        self.size
    }

    fn send(&mut self, dest: usize, tag: u32, payload: Vec<f64>) -> Result<()> {
        let frame = Frame {
            tag,
            source: self.rank as u32,
            payload,
        };
        if dest == self.rank {
            self.pending.push_back(frame);
            return Ok(());
        }
        let stream = self
            .writers
            .get_mut(dest)
            .and_then(Option::as_mut)
            .ok_or_else(|| Error::Transport(format!("no connection to rank {dest}")))?;
        frame.write_to(stream).map_err(io_err)
    }

    fn recv(&mut self, source: usize, tag: u32) -> Result<Vec<f64>> {
        let matches = |f: &Frame| f.source as usize == source && f.tag == tag;
        if let Some(pos) = self.pending.iter().position(matches) {
            return Ok(self.pending.remove(pos).expect("position is valid").payload);
        }
        loop {
            match self.inbox.recv_timeout(self.timeout) {
                Ok(f) if matches(&f) => return Ok(f.payload),
                Ok(f) => self.pending.push_back(f),
                Err(RecvTimeoutError::Timeout) => {
                    return Err(Error::Transport(format!(
                        "timed out waiting for rank {source}"
                    )))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(Error::Transport(format!(
                        "connection to rank {source} lost"
                    )))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::WorkerGroup;

    #[test]
    fn collectives_over_tcp() {
        let endpoints = TcpTransport::local_group(4).unwrap();
        let out = WorkerGroup::run_with(endpoints, |g| {
            g.barrier().unwrap();
            g.global_sum(g.rank() as f64).unwrap()
        });
        assert_eq!(out, vec![6.0; 4]);
    }

    #[test]
    fn lost_peer_is_reported() {
        let mut endpoints = TcpTransport::local_group(2).unwrap();
        let b = endpoints.pop().unwrap();
        drop(b);
        let mut a = endpoints
            .pop()
            .unwrap()
            .with_timeout(Duration::from_secs(5));
        assert!(matches!(a.recv(1, 9), Err(Error::Transport(_))));
    }
}
