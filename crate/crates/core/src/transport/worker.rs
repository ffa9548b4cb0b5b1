use num_complex::Complex64;

use super::{InProcessTransport, Transport};
use crate::error::{Error, Result};

const TAG_REDUCE_UP: u32 = 1;
const TAG_REDUCE_DOWN: u32 = 2;

#[derive(Clone, Copy)]
#[repr(u64)]
enum Collective {
    Sum = 1,
    Barrier = 2,
    Broadcast = 3,
}

/// One worker's handle on the group: point-to-point transport plus the
/// collective operations built on top of it.
///
/// Reductions run over a fixed binary tree rooted at rank 0 (children of
/// `r` are `2r + 1` and `2r + 2`), so results do not depend on scheduling.
/// Every collective folds its kind into a running checksum which travels
/// with the reduction messages; workers that disagree on the call sequence
/// all get [`Error::CollectiveMismatch`] instead of a deadlock.
pub struct WorkerGroup {
    transport: Box<dyn Transport>,
    checksum: u64,
}

impl WorkerGroup {
    pub fn new<T: Transport + 'static>(transport: T) -> Self {
        Self {
            transport: Box::new(transport),
            checksum: 0,
        }
    }

    /// A group of one, for serial use.
    pub fn solo() -> Self {
        Self::new(InProcessTransport::group(1).pop().expect("group of one"))
    }

    /// Runs `work` on `size` threads, one worker each, and returns the
    /// results ordered by rank.
    pub fn run_in_process<R, F>(size: usize, work: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&mut WorkerGroup) -> R + Sync,
    {
        let endpoints = InProcessTransport::group(size);
        Self::run_with(endpoints, work)
    }

    /// Runs `work` once per endpoint, each on its own thread.
    pub fn run_with<T, R, F>(endpoints: Vec<T>, work: F) -> Vec<R>
    where
        T: Transport + 'static,
        R: Send,
        F: Fn(&mut WorkerGroup) -> R + Sync,
    {
        std::thread::scope(|scope| {
            let handles: Vec<_> = endpoints
                .into_iter()
                .map(|t| {
                    let work = &work;
                    scope.spawn(move || work(&mut WorkerGroup::new(t)))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
                .collect()
        })
    }

    pub fn rank(&self) -> usize {
        self.transport.rank()
    }

    pub fn size(&self) -> usize {
        self.transport.size()
    }

    pub fn is_root(&self) -> bool {
        self.rank() == 0
    }

    /// Running checksum of the collective calls made so far.
    pub fn sequence_checksum(&self) -> u64 {
        self.checksum
    }

    pub fn send(&mut self, dest: usize, tag: u32, payload: Vec<f64>) -> Result<()> {
        self.transport.send(dest, tag, payload)
    }

    pub fn recv(&mut self, source: usize, tag: u32) -> Result<Vec<f64>> {
        self.transport.recv(source, tag)
    }

    fn advance(&mut self, kind: Collective, len: usize) -> u64 {
        // splitmix-style mixing of (previous, kind, length)
        let mut x = self.checksum ^ ((kind as u64) << 56) ^ (len as u64);
        x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        self.checksum = x ^ (x >> 31);
        self.checksum
    }

    /// Tree reduction followed by a broadcast of the root's result.
    fn tree_collective(&mut self, kind: Collective, values: &[f64]) -> Result<Vec<f64>> {
        let check = self.advance(kind, values.len());
        let rank = self.rank();
        let size = self.size();
        let mut acc = values.to_vec();
        let mut poisoned = false;

        for child in [2 * rank + 1, 2 * rank + 2] {
            if child >= size {
                continue;
            }
            let msg = self.recv(child, TAG_REDUCE_UP)?;
            let (body, child_check, child_poisoned) = split_trailer(&msg)?;
            if child_poisoned || child_check != check || body.len() != acc.len() {
                poisoned = true;
                continue;
            }
            if !matches!(kind, Collective::Broadcast) {
                for (a, b) in acc.iter_mut().zip(body) {
                    *a += b;
                }
            }
        }

        let result = if rank == 0 {
            acc
        } else {
            let parent = (rank - 1) / 2;
            self.send(parent, TAG_REDUCE_UP, with_trailer(&acc, check, poisoned))?;
            let msg = self.recv(parent, TAG_REDUCE_DOWN)?;
            let (body, root_check, root_poisoned) = split_trailer(&msg)?;
            poisoned |= root_poisoned || root_check != check;
            body.to_vec()
        };

        for child in [2 * rank + 1, 2 * rank + 2] {
            if child < size {
                self.send(
                    child,
                    TAG_REDUCE_DOWN,
                    with_trailer(&result, check, poisoned),
                )?;
            }
        }
        if poisoned {
            return Err(Error::CollectiveMismatch { rank });
        }
        Ok(result)
    }

    /// Sum of `value` over all workers, identical on every worker.
    pub fn global_sum(&mut self, value: f64) -> Result<f64> {
        Ok(self.tree_collective(Collective::Sum, &[value])?[0])
    }

    pub fn global_sum_complex(&mut self, value: Complex64) -> Result<Complex64> {
        let r = self.tree_collective(Collective::Sum, &[value.re, value.im])?;
        Ok(Complex64::new(r[0], r[1]))
    }

    /// Element-wise sum of equally long slices.
    pub fn global_sum_slice(&mut self, values: &[f64]) -> Result<Vec<f64>> {
        self.tree_collective(Collective::Sum, values)
    }

    /// Distributes the root's `values` to every worker; the other workers'
    /// arguments only fix the length.
    pub fn broadcast(&mut self, values: &[f64]) -> Result<Vec<f64>> {
        self.tree_collective(Collective::Broadcast, values)
    }

    /// Returns once every worker has entered the barrier.
    pub fn barrier(&mut self) -> Result<()> {
        self.tree_collective(Collective::Barrier, &[]).map(|_| ())
    }
}

fn with_trailer(body: &[f64], check: u64, poisoned: bool) -> Vec<f64> {
    let mut v = Vec::with_capacity(body.len() + 2);
    v.extend_from_slice(body);
    v.push(f64::from_bits(check));
    v.push(if poisoned { 1.0 } else { 0.0 });
    v
}

fn split_trailer(msg: &[f64]) -> Result<(&[f64], u64, bool)> {
    if msg.len() < 2 {
        return Err(Error::Transport(
            "collective message without trailer".into(),
        ));
    }
    let n = msg.len() - 2;
    Ok((&msg[..n], msg[n].to_bits(), msg[n + 1] != 0.0))
}
