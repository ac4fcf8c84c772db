use alloc::vec::Vec;

use crate::extrapolate::{extrapolate, Abscissa, Extrapolant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Holds only if both hold; fails if either fails.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Holds, Verdict::Holds) => Verdict::Holds,
            _ => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulePoint {
    pub k: usize,
    /// The scale driving the schedule toward zero.
    pub scale: f64,
    pub epsilon: f64,
    pub l: f64,
    pub value: f64,
}

/// A scalar observable along a schedule that drives the scales to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub observable: &'static str,
    pub abscissa: Abscissa,
    pub points: Vec<SchedulePoint>,
}

impl ConvergenceTable {
    pub fn new(observable: &'static str, abscissa: Abscissa) -> Self {
        Self {
            observable,
            abscissa,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, point: SchedulePoint) {
        self.points.push(point);
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.scale).collect()
    }

    pub fn extrapolate(&self) -> Option<Extrapolant> {
        extrapolate(&self.scales(), &self.values(), self.abscissa)
    }

    /// Verdict on convergence to `target`: inconclusive for non-monotone
    /// series, otherwise whether the extrapolant agrees with the target.
    pub fn verdict_against(&self, target: f64) -> Verdict {
        match self.extrapolate() {
            None => Verdict::Inconclusive,
            Some(e) if !e.monotone => Verdict::Inconclusive,
            Some(e) => Verdict::from_bool(e.agrees_with(target)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_algebra() {
        assert_eq!(Verdict::Holds.and(Verdict::Holds), Verdict::Holds);
        assert_eq!(Verdict::Holds.and(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Inconclusive.and(Verdict::Fails), Verdict::Fails);
    }

    #[test]
    fn table_verdict() {
        let mut t = ConvergenceTable::new("x", Abscissa::Power);
        for (k, s) in [0.1, 0.01, 0.001].iter().enumerate() {
            t.push(SchedulePoint {
                k,
                scale: *s,
                epsilon: *s,
                l: 0.0,
                value: 2.0 + s * s,
            });
        }
        assert_eq!(t.verdict_against(2.0), Verdict::Holds);
        assert_eq!(t.verdict_against(2.1), Verdict::Fails);
    }
}
