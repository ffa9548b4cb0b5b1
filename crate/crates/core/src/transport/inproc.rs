use std::collections::VecDeque;
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::sync::Arc;
use std::time::Duration;

use super::{Frame, Transport, DEFAULT_TIMEOUT};
use crate::error::{Error, Result};

/// Channel-backed transport between threads of one process.
///
/// Each worker owns a single inbox; messages that arrive out of order are
/// parked until a matching `recv` asks for them. Per-sender ordering is FIFO.
pub struct InProcessTransport {
    rank: usize,
    peers: Arc<Vec<Sender<Frame>>>,
    inbox: Receiver<Frame>,
    pending: VecDeque<Frame>,
    timeout: Duration,
}

impl InProcessTransport {
    /// Creates the endpoints of a fully connected group of `size` workers.
    pub fn group(size: usize) -> Vec<InProcessTransport> {
        let (senders, receivers): (Vec<_>, Vec<_>) = (0..size).map(|_| channel()).unzip();
        let peers = Arc::new(senders);
        receivers
            .into_iter()
            .enumerate()
            .map(|(rank, inbox)| InProcessTransport {
                rank,
                peers: Arc::clone(&peers),
                inbox,
                pending: VecDeque::new(),
                timeout: DEFAULT_TIMEOUT,
            })
            .collect()
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

impl Transport for InProcessTransport {
    fn rank(&self) -> usize {
        self.rank
    }

    fn size(&self) -> usize {
        self.peers.len()
    }

    fn send(&mut self, dest: usize, tag: u32, payload: Vec<f64>) -> Result<()> {
        let peer = self
            .peers
            .get(dest)
            .ok_or_else(|| Error::Transport(format!("no worker with rank {dest}")))?;
        peer.send(Frame {
            tag,
            source: self.rank as u32,
            payload,
        })
        .map_err(|_| Error::Transport(format!("worker {dest} has gone away")))
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
                        "rank {} timed out waiting for tag {tag} from rank {source}",
                        self.rank
                    )))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(Error::Transport("all peers disconnected".into()))
                }
            }
        }
    }
}
