//! Node budgets shared by the search routines.
//!
//! Every potentially expensive search (surface matchings, pattern
//! enumeration, ray enumeration) charges one tick per explored node against a
//! [`Budget`]. When the budget runs out the search stops and reports partial
//! results flagged as such, so callers can distinguish "exhausted the space"
//! from "exhausted the budget".

/// A mutable node counter with an upper limit.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    /// Budget of exactly `limit` nodes.
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    /// Effectively unlimited budget.
    pub fn unlimited() -> Self {
        Budget { limit: u64::MAX, used: 0 }
    }

    /// Charge one node. Returns `false` if the budget is exhausted (the node
    /// is not charged in that case).
    pub fn tick(&mut self) -> bool {
        if self.used >= self.limit {
            return false;
        }
        self.used += 1;
        true
    }

    /// Nodes charged so far.
    pub fn used(&self) -> u64 {
        self.used
    }

    /// `true` once a `tick` has been refused.
    pub fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_until_limit() {
        let mut b = Budget::new(3);
        assert!(b.tick());
        assert!(b.tick());
        assert!(b.tick());
        assert!(!b.tick());
        assert_eq!(b.used(), 3);
        assert!(b.exhausted());
    }

    #[test]
    fn unlimited_never_exhausts() {
        let mut b = Budget::unlimited();
        for _ in 0..10_000 {
            assert!(b.tick());
        }
        assert!(!b.exhausted());
    }
}
