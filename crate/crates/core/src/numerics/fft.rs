use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unitary DFT of a fixed power-of-two length, `1/sqrt(N)` on both directions.
///
/// Plans are built once; the struct is cheap to clone and `Send + Sync`, so
/// solvers keep one per grid and reuse it every iteration.
#[derive(Clone)]
pub struct UnitaryFft {
    len: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for UnitaryFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitaryFft").field("len", &self.len).finish()
    }
}

impl UnitaryFft {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Sizing(format!("FFT length {len} is not a power of two")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            len,
            scale: 1.0 / (len as f64).sqrt(),
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn process(&self, buf: &mut [C64], direction: Direction) {
        assert_eq!(buf.len(), self.len, "buffer length does not match the plan");
        match direction {
            Direction::Forward => self.forward.process(buf),
            Direction::Inverse => self.inverse.process(buf),
        }
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
    }

    pub fn forward(&self, buf: &mut [C64]) {
        self.process(buf, Direction::Forward);
    }

    pub fn inverse(&self, buf: &mut [C64]) {
        self.process(buf, Direction::Inverse);
    }
}

/// One-shot unitary transform. Rejects lengths that are not powers of two.
pub fn fft_unitary(x: &[C64], direction: Direction) -> Result<Vec<C64>> {
    let plan = UnitaryFft::new(x.len())?;
    let mut out = x.to_vec();
    plan.process(&mut out, direction);
    Ok(out)
}
