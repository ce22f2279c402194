//! Cooperative mutable-memory accounting in words.
//!
//! A word is one scalar, index, or reference. Charges happen at collection
//! boundaries (boundary polygons, coefficient blocks, funnels, permutations);
//! O(1)-size locals are not charged. The read-only polygon is exempt.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct Workspace {
    current: u64,
    peak: u64,
    budget: Option<u64>,
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    pub fn with_budget(budget: u64) -> Self {
        Workspace {
            current: 0,
            peak: 0,
            budget: Some(budget),
        }
    }

    pub fn charge(&mut self, words: usize, tag: &'static str) -> Result<()> {
        let words = words as u64;
        if let Some(b) = self.budget {
            if self.current + words > b {
                return Err(Error::WorkspaceBudget {
                    tag,
                    current: self.current,
                    charge: words,
                    budget: b,
                });
            }
        }
        self.current += words;
        self.peak = self.peak.max(self.current);
        Ok(())
    }

    pub fn release(&mut self, words: usize) {
        let words = words as u64;
        debug_assert!(self.current >= words, "release exceeds current charge");
        self.current = self.current.saturating_sub(words);
    }

    pub fn snapshot(&self) -> (u64, u64) {
        (self.current, self.peak)
    }

    pub fn current(&self) -> u64 {
        self.current
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_release_peak() {
        let mut ws = Workspace::new();
        assert_eq!(ws.snapshot(), (0, 0));
        ws.charge(10, "a").unwrap();
        ws.release(10);
        assert_eq!(ws.snapshot(), (0, 10));
        ws.charge(5, "b").unwrap();
        assert_eq!(ws.snapshot(), (5, 10));
        ws.release(5);
        ws.charge(3, "c").unwrap();
        assert_eq!(ws.snapshot(), (3, 10));
    }

    #[test]
    fn peak_is_max_prefix_sum() {
        let mut ws = Workspace::new();
        for (c, r) in [(4usize, 1usize), (3, 2), (8, 9), (2, 5)] {
            ws.charge(c, "x").unwrap();
            ws.release(r);
        }
        // prefix sums of current: 4,3,6,4,12,3,5,0 -> peak 12
        assert_eq!(ws.peak(), 12);
    }

    #[test]
    fn budget_enforced() {
        let mut ws = Workspace::with_budget(8);
        ws.charge(6, "a").unwrap();
        assert!(matches!(
            ws.charge(4, "b"),
            Err(Error::WorkspaceBudget { .. })
        ));
    }
}
