use std::sync::Arc;

use crate::averaging::StencilTable;
use crate::generate::Generator;
use crate::lattice::{Domain, Lattice, ScalarField};
use crate::maxops::MultiField;
use crate::sobolev::{exponent_table, ExponentSet};
use crate::{Error, Result};

/// What to verify: a domain, a slot tuple of generators, and the exponent
/// inputs. Checks realize it at one or more grid spacings.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Domain,
    pub h: f64,
    pub generators: Vec<Generator>,
    pub alpha: f64,
    pub p: Vec<f64>,
}

impl Scenario {
    pub fn new(
        domain: Domain,
        h: f64,
        generators: Vec<Generator>,
        alpha: f64,
        p: Vec<f64>,
    ) -> Result<Scenario> {
        if generators.is_empty() || generators.len() != p.len() {
            return Err(Error::InvalidParameter(
                "need one integrability exponent per generator slot".into(),
            ));
        }
        let dim = domain.dim();
        for g in &generators {
            g.validate(dim)?;
        }
        Ok(Scenario {
            domain,
            h,
            generators,
            alpha,
            p,
        })
    }

    pub fn m(&self) -> usize {
        self.generators.len()
    }

    pub fn exponents(&self) -> Result<ExponentSet> {
        exponent_table(self.m(), self.domain.dim(), &self.p, self.alpha)
    }

    /// Rasterizes the scenario at its own spacing.
    pub fn realize(&self) -> Result<Realized> {
        self.realize_at(self.h)
    }

    /// Rasterizes the scenario at an arbitrary spacing (refinement runs).
    pub fn realize_at(&self, h: f64) -> Result<Realized> {
        let lattice = Lattice::new(self.domain.clone(), h)?;
        let table = StencilTable::for_lattice(&lattice);
        let mask = lattice.mask.clone();
        let mut slots = Vec::with_capacity(self.m());
        for g in &self.generators {
            slots.push(g.realize(mask.clone())?);
        }
        let fields = MultiField::new(slots)?;
        let exponents = self.exponents()?;
        Ok(Realized {
            scenario: self.clone(),
            lattice,
            table,
            fields,
            exponents,
        })
    }
}

/// A scenario rasterized on one grid, with the stencil cache built.
pub struct Realized {
    pub scenario: Scenario,
    pub lattice: Lattice,
    pub table: StencilTable,
    pub fields: MultiField,
    pub exponents: ExponentSet,
}

impl Realized {
    pub fn h(&self) -> f64 {
        self.lattice.h()
    }

    pub fn mask(&self) -> &Arc<crate::lattice::Mask> {
        &self.lattice.mask
    }

    /// Analytic `|grad f_l|` realized on this grid.
    pub fn gradient_magnitude(&self, slot: usize) -> Result<ScalarField> {
        self.scenario.generators[slot].realize_gradient_magnitude(self.lattice.mask.clone())
    }

    /// Analytic `D_l f_i` realized on this grid.
    pub fn partial(&self, slot: usize, axis: usize) -> Result<ScalarField> {
        self.scenario.generators[slot].realize_partial(self.lattice.mask.clone(), axis)
    }

    /// Slot tuple with slot `l` replaced by `|grad f_l|`.
    pub fn fields_with_gradient_slot(&self, l: usize) -> Result<MultiField> {
        self.fields.with_slot(l, self.gradient_magnitude(l)?)
    }

    /// Sup norms of the slots and their analytic gradients, for tolerance
    /// models: returns `(sup |f_j|, sup |grad f_j|)` per slot.
    pub fn slot_scales(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.fields.m());
        for (i, slot) in self.fields.slots().iter().enumerate() {
            let s = slot.max_abs();
            let g = self.gradient_magnitude(i)?.max_abs();
            out.push((s, g));
        }
        Ok(out)
    }
}
