use rayon::prelude::*;

use crate::error::Result;

/// Largest residual seen so far and where it occurred.
///
/// Merging keeps the first maximum in point order so results do not depend on
/// the order in which workers finish.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub max: f64,
    pub argmax: Vec<f64>,
}

impl Default for Residual {
    fn default() -> Self {
        Residual {
            max: 0.0,
            argmax: Vec::new(),
        }
    }
}

impl Residual {
    pub fn at(value: f64, point: &[f64]) -> Self {
        Residual {
            max: value,
            argmax: point.to_vec(),
        }
    }

    pub fn observe(&mut self, value: f64, point: &[f64]) {
        if value.is_nan() && !self.max.is_nan() || value > self.max || self.argmax.is_empty() {
            self.max = value;
            self.argmax = point.to_vec();
        }
    }

    pub fn merge(&mut self, other: &Residual) {
        if other.argmax.is_empty() {
            return;
        }
        if other.max.is_nan() && !self.max.is_nan() || other.max > self.max || self.argmax.is_empty() {
            *self = other.clone();
        }
    }

    /// Combine per-point results in order.
    pub fn merge_all<'a>(items: impl IntoIterator<Item = &'a Residual>) -> Residual {
        let mut r = Residual::default();
        for it in items {
            r.merge(it);
        }
        r
    }

    pub fn below(&self, tol: f64) -> bool {
        self.max.is_finite() && self.max <= tol
    }
}

/// One named residual over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// The identity being tested, as a formula.
    pub reference: String,
    pub residual: Residual,
    pub tolerance: f64,
    /// Non-gating checks are reported but do not affect the exit status.
    pub gating: bool,
}

impl Check {
    pub fn new(name: &str, reference: &str, residual: Residual, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            reference: reference.to_string(),
            residual,
            tolerance,
            gating: true,
        }
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn pass(&self) -> bool {
        self.residual.below(self.tolerance)
    }
}

/// A check that was not evaluated, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub name: String,
    pub reason: String,
}

/// Everything a suite produces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub skipped: Vec<Skipped>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.skipped.push(Skipped {
            name: name.to_string(),
            reason: reason.into(),
        });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn extend(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.skipped.extend(other.skipped);
        self.notes.extend(other.notes);
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_gating_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(Check::pass)
    }
}

/// Evaluate `f` at every point concurrently; `f` returns `k` residuals per
/// point and the result holds the per-slot maxima, merged in point order.
pub fn sweep<F>(points: &[Vec<f64>], k: usize, f: F) -> Result<Vec<Residual>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let per_point = points
        .par_iter()
        .map(|p| f(p))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Residual::default(); k];
    for (p, vals) in points.iter().zip(&per_point) {
        debug_assert_eq!(vals.len(), k);
        for (slot, v) in out.iter_mut().zip(vals) {
            slot.observe(*v, p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_maximum_wins() {
        let a = Residual::at(1.0, &[0.0]);
        let b = Residual::at(1.0, &[1.0]);
        let c = Residual::at(0.5, &[2.0]);
        let r = Residual::merge_all([&a, &b, &c]);
        assert_eq!(r.argmax, vec![0.0]);
        let nan = Residual::at(f64::NAN, &[3.0]);
        let r = Residual::merge_all([&a, &nan]);
        assert!(r.max.is_nan());
        assert!(!r.below(1.0));
    }

    #[test]
    fn sweep_is_ordered() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64]).collect();
        let r = sweep(&pts, 2, |p| Ok(vec![(p[0] % 7.0), 1.0])).unwrap();
        assert_eq!(r[0].max, 6.0);
        assert_eq!(r[0].argmax, vec![6.0]);
        assert_eq!(r[1].argmax, vec![0.0]);
    }
}
