use alloc::vec::Vec;

use super::{check_metric, Endomorphism, Metric, ReferenceMeasure};
use crate::error::{invalid, Error, Result};
use crate::numerics::{RngStream, SquareMatrix};

/// Longest word a shift point can hold.
pub const MAX_WORD: usize = 64;
const MAX_SYMBOLS: usize = 64;

/// A finite word; symbols past the system depth are zero (the tail convention).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    syms: [u8; MAX_WORD],
}

impl Word {
    pub fn zeros() -> Self {
        Self { syms: [0; MAX_WORD] }
    }

    pub fn from_symbols(s: &[u8]) -> Self {
        let mut w = Self::zeros();
        let n = s.len().min(MAX_WORD);
        w.syms[..n].copy_from_slice(&s[..n]);
        w
    }

    #[inline]
    pub fn symbol(&self, i: usize) -> u8 {
        self.syms[i]
    }

    pub fn symbols(&self) -> &[u8] {
        &self.syms
    }
}

impl core::fmt::Debug for Word {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let end = self.syms.iter().rposition(|&s| s != 0).map_or(0, |i| i + 1);
        write!(f, "Word(")?;
        for s in &self.syms[..end] {
            write!(f, "{s}")?;
        }
        write!(f, "…)")
    }
}

/// One-sided full shift on m symbols with a Bernoulli(p) measure, words
/// truncated at a fixed depth.
#[derive(Clone, Debug)]
pub struct FullShift {
    probs: Vec<f64>,
    depth: usize,
}

impl FullShift {
    pub fn new(probabilities: &[f64], depth: usize) -> Result<Self> {
        Self::with_metric(probabilities, depth, None)
    }

    pub fn with_metric(probabilities: &[f64], depth: usize, metric: Option<Metric>) -> Result<Self> {
        let m = probabilities.len();
        if !(2..=MAX_SYMBOLS).contains(&m) {
            return Err(invalid("probabilities", "need between 2 and 64 symbols"));
        }
        if probabilities.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(invalid("probabilities", "each weight must lie in (0, 1]"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("probabilities", alloc::format!("weights sum to {total}, not 1")));
        }
        if !(1..=MAX_WORD).contains(&depth) {
            return Err(invalid("depth", "word depth must be in 1..=64"));
        }
        check_metric("full_shift", metric.unwrap_or(Metric::ShiftDyadic), &[Metric::ShiftDyadic])?;
        Ok(Self { probs: probabilities.to_vec(), depth })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn symbols(&self) -> usize {
        self.probs.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn draw_symbol(&self, rng: &mut RngStream) -> u8 {
        rng.next_weighted(&self.probs) as u8
    }
}

impl Endomorphism for FullShift {
    type Point = Word;

    fn kind_name(&self) -> &'static str {
        "full_shift"
    }

    fn metric(&self) -> Metric {
        Metric::ShiftDyadic
    }

    fn dim(&self) -> usize {
        1
    }

    fn apply(&self, x: &Word) -> Word {
        let mut w = Word::zeros();
        w.syms[..self.depth - 1].copy_from_slice(&x.syms[1..self.depth]);
        w
    }

    fn preimages_into(&self, x: &Word, out: &mut Vec<Word>) {
        out.clear();
        for a in 0..self.probs.len() {
            let mut w = Word::zeros();
            w.syms[0] = a as u8;
            w.syms[1..self.depth].copy_from_slice(&x.syms[..self.depth - 1]);
            out.push(w);
        }
    }

    fn distance(&self, p: &Word, q: &Word) -> f64 {
        match (0..self.depth).find(|&k| p.syms[k] != q.syms[k]) {
            Some(k) => libm::ldexp(1.0, -(k as i32)),
            None => 0.0,
        }
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn reference_measure(&self) -> ReferenceMeasure {
        ReferenceMeasure::Bernoulli
    }

    fn jacobian(&self, x: &Word) -> Option<f64> {
        Some(1.0 / self.probs[x.syms[0] as usize])
    }

    fn differential(&self, _x: &Word) -> Result<SquareMatrix> {
        Err(Error::NotSmooth("full_shift"))
    }

    fn sample_reference(&self, rng: &mut RngStream) -> Word {
        let mut w = Word::zeros();
        for k in 0..self.depth {
            w.syms[k] = self.draw_symbol(rng);
        }
        w
    }

    fn backward_weights(&self, preimages: &[Word], weights: &mut Vec<f64>) {
        weights.clear();
        weights.extend(preimages.iter().map(|w| self.probs[w.syms[0] as usize]));
    }

    fn forward_orbit(&self, len: usize, rng: &mut RngStream, visit: &mut dyn FnMut(&Word)) {
        let mut w = self.sample_reference(rng);
        for _ in 0..len {
            visit(&w);
            w.syms.copy_within(1..self.depth, 0);
            w.syms[self.depth - 1] = self.draw_symbol(rng);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_is_reciprocal_weight() {
        let s = FullShift::new(&[0.5, 0.5], 64).unwrap();
        let w = Word::from_symbols(&[0, 1, 1]);
        assert_eq!(s.measure_jacobian(ReferenceMeasure::Bernoulli, &w), Ok(Some(2.0)));
        let t = FullShift::new(&[0.3, 0.7], 16).unwrap();
        assert!((t.jacobian(&Word::from_symbols(&[1])).unwrap() - 1.0 / 0.7).abs() < 1e-15);
    }

    #[test]
    fn shift_and_preimages() {
        let s = FullShift::new(&[0.2, 0.3, 0.5], 8).unwrap();
        let x = Word::from_symbols(&[2, 1, 0, 2, 2, 1, 0, 1]);
        assert_eq!(s.apply(&x), Word::from_symbols(&[1, 0, 2, 2, 1, 0, 1]));
        let pre = s.preimages(&x);
        assert_eq!(pre.len(), 3);
        for (a, w) in pre.iter().enumerate() {
            assert_eq!(w.symbol(0), a as u8);
            assert!(s.distance(&s.apply(w), &x) <= libm::ldexp(1.0, -7));
        }
    }

    #[test]
    fn dyadic_metric() {
        let s = FullShift::new(&[0.5, 0.5], 64).unwrap();
        let a = Word::from_symbols(&[0, 1, 1, 0]);
        let b = Word::from_symbols(&[0, 1, 0, 0]);
        assert_eq!(s.distance(&a, &b), 0.25);
        assert_eq!(s.distance(&a, &a), 0.0);
    }

    #[test]
    fn validation() {
        assert!(FullShift::new(&[0.5, 0.6], 8).is_err());
        assert!(FullShift::new(&[1.0], 8).is_err());
        assert!(FullShift::new(&[0.5, 0.5], 0).is_err());
        assert!(FullShift::new(&[0.5, 0.5], 65).is_err());
        assert!(FullShift::new(&[0.5, 0.5], 8).unwrap().differential(&Word::zeros()).is_err());
    }

    #[test]
    fn streaming_orbit_is_an_orbit() {
        let s = FullShift::new(&[0.3, 0.7], 20).unwrap();
        let mut rng = RngStream::new(2, 2);
        let mut pts = Vec::new();
        s.forward_orbit(50, &mut rng, &mut |w| pts.push(*w));
        for p in pts.windows(2) {
            assert!(s.distance(&s.apply(&p[0]), &p[1]) <= libm::ldexp(1.0, -19));
        }
    }
}
