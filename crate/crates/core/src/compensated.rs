//! Compensated (Neumaier) summation for scalars and vectors.

/// Neumaier variant of Kahan summation; robust when an addend is larger in
/// magnitude than the running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Coordinatewise compensated accumulator for vectors of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorAccumulator {
    parts: Vec<NeumaierSum>,
}

impl VectorAccumulator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            parts: vec![NeumaierSum::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    pub fn add(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.parts.len());
        for (p, &v) in self.parts.iter_mut().zip(x) {
            p.add(v);
        }
    }

    pub fn write_into(&self, out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.parts) {
            *o = p.value();
        }
    }

    pub fn value(&self) -> Vec<f64> {
        self.parts.iter().map(NeumaierSum::value).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_addends() {
        let mut s = NeumaierSum::new();
        s.add(1.0);
        s.add(1e100);
        s.add(1.0);
        s.add(-1e100);
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn alternating_sum_is_exact() {
        let s: NeumaierSum = (1..=100_000)
            .map(|k| if k % 2 == 1 { 0.1 } else { -0.1 })
            .collect();
        assert_eq!(s.value(), 0.0);
    }

    #[test]
    fn vector_accumulator() {
        let mut acc = VectorAccumulator::zeros(2);
        for _ in 0..10 {
            acc.add(&[0.1, -0.2]);
        }
        let v = acc.value();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!((v[1] + 2.0).abs() < 1e-15);
    }
}
