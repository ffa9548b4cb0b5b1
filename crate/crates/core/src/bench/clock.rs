use std::time::Instant;

/// Time source for the benchmark loops. Only read at batch boundaries.
pub trait Clock {
    /// Seconds since an arbitrary fixed origin.
    fn now(&mut self) -> f64;
    /// Wall-clock stamp written into reports.
    fn timestamp(&self) -> String;
}

#[derive(Debug, Clone)]
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&mut self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn timestamp(&self) -> String {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }
}

/// Advances by a fixed step on every read.
#[derive(Debug, Clone)]
pub struct MockClock {
    t: f64,
    step: f64,
    reads: usize,
}

impl MockClock {
    pub fn new(step: f64) -> Self {
        Self {
            t: 0.0,
            step,
            reads: 0,
        }
    }

    pub fn reads(&self) -> usize {
        self.reads
    }
}

impl Clock for MockClock {
    fn now(&mut self) -> f64 {
        let t = self.t;
        self.t += self.step;
        self.reads += 1;
        t
    }

    fn timestamp(&self) -> String {
        "1970-01-01T00:00:00Z".into()
    }
}
