//! The mirror role swap: `(u, lambda, phi)` and `(v, mu, psi)` exchange places.

use super::legendre::{fenchel_residual, LegendrePair};
use crate::error::Result;
use crate::slag::{ModuliChart, PeriodMatrices};

pub trait MirrorSwap: Sized {
    fn mirror_swap(&self) -> Result<Self>;
}

impl MirrorSwap for ModuliChart {
    fn mirror_swap(&self) -> Result<Self> {
        Ok(ModuliChart {
            grid: self.grid.clone(),
            basepoint: self.basepoint.clone(),
            u: self.v.clone(),
            v: self.u.clone(),
        })
    }
}

impl MirrorSwap for PeriodMatrices {
    fn mirror_swap(&self) -> Result<Self> {
        PeriodMatrices::new(self.mu.clone(), self.lambda.clone())
    }
}

impl MirrorSwap for LegendrePair {
    fn mirror_swap(&self) -> Result<Self> {
        Ok(LegendrePair {
            primal: self.dual.clone(),
            dual: self.primal.clone(),
            fenchel_residual: fenchel_residual(&self.dual, &self.primal)?,
            pairs: self.pairs.iter().map(|(u, v)| (v.clone(), u.clone())).collect(),
        })
    }
}
