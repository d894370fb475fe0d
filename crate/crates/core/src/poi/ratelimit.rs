use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Blocking token bucket. Holds at most `max(1, rate)` tokens and refills at
/// `rate` tokens per second.
#[derive(Debug)]
pub struct TokenBucket {
    rate: f64,
    capacity: f64,
    state: Mutex<BucketState>,
}

#[derive(Debug)]
struct BucketState {
    tokens: f64,
    last: Instant,
}

impl TokenBucket {
    pub fn new(requests_per_second: f64) -> Self {
        assert!(
            requests_per_second > 0.0 && requests_per_second.is_finite(),
            "rate limit must be positive"
        );
        let capacity = requests_per_second.max(1.0);
        TokenBucket {
            rate: requests_per_second,
            capacity,
            state: Mutex::new(BucketState {
                tokens: capacity,
                last: Instant::now(),
            }),
        }
    }

    /// Takes a token if one is available, otherwise reports how long until
    /// one will be.
    pub fn try_acquire(&self) -> Result<(), Duration> {
        let mut st = self.state.lock().expect("rate limiter poisoned");
        let now = Instant::now();
        let elapsed = now.duration_since(st.last).as_secs_f64();
        st.tokens = (st.tokens + elapsed * self.rate).min(self.capacity);
        st.last = now;
        if st.tokens >= 1.0 {
            st.tokens -= 1.0;
            Ok(())
        } else {
            Err(Duration::from_secs_f64((1.0 - st.tokens) / self.rate))
        }
    }

    pub fn acquire(&self) {
        while let Err(wait) = self.try_acquire() {
            std::thread::sleep(wait);
        }
    }
}
