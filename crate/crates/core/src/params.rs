//! Flat views over structured parameter sets.
//!
//! Parameters are visited in a fixed declared order. That order is what the
//! optimiser sees, what gradient checks perturb, and what checkpoints store.

use alloc::vec::Vec;

use crate::error::{check_len, Result};

pub trait ParamSet {
    fn visit(&self, f: &mut dyn FnMut(&[f64]));
    fn visit_mut(&mut self, f: &mut dyn FnMut(&mut [f64]));

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |s| n += s.len());
        n
    }

    fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.visit(&mut |s| out.extend_from_slice(s));
        out
    }

    fn load_flat(&mut self, flat: &[f64]) -> Result<()> {
        check_len("flat parameters", self.param_count(), flat.len())?;
        let mut offset = 0;
        self.visit_mut(&mut |s| {
            s.copy_from_slice(&flat[offset..offset + s.len()]);
            offset += s.len();
        });
        Ok(())
    }

    fn fill(&mut self, value: f64) {
        self.visit_mut(&mut |s| s.fill(value));
    }

    /// `self += scale · other`, element by element in declared order.
    fn add_scaled(&mut self, other: &Self, scale: f64) -> Result<()>
    where
        Self: Sized,
    {
        let flat = other.to_flat();
        check_len("accumulated parameters", self.param_count(), flat.len())?;
        let mut offset = 0;
        self.visit_mut(&mut |s| {
            let len = s.len();
            for (x, g) in s.iter_mut().zip(&flat[offset..offset + len]) {
                *x += scale * g;
            }
            offset += len;
        });
        Ok(())
    }

    fn scale(&mut self, factor: f64) {
        self.visit_mut(&mut |s| s.iter_mut().for_each(|x| *x *= factor));
    }
}

/// A zeroed copy, used as a gradient accumulator of matching shape.
pub fn zeros_like<P: ParamSet + Clone>(p: &P) -> P {
    let mut z = p.clone();
    z.fill(0.0);
    z
}
