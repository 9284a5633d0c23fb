//! Name-keyed registries for the interchangeable algorithm families: special
//! function evaluators and ring-simulation steppers.

use crate::error::{Error, Result};
use crate::kernel::special::{AdaptiveQuadrature, ChebyshevTable, SpecialEvaluator, SplitEvaluator};
use crate::ring_sim::stepper::{RigidCoreStepper, Rk4Stepper, Stepper};

type Ctor<T> = Box<dyn Fn() -> Box<T> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Ctor<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds `name`; a later registration under the same name replaces it.
    pub fn register<F>(&mut self, name: &'static str, ctor: F) -> &mut Self
    where
        F: Fn() -> Box<T> + Send + Sync + 'static,
    {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, Box::new(ctor)));
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

/// `adaptive` (quadrature oracle), `split` (closed-form parts plus fixed
/// quadrature) and `table` (Chebyshev fit of `split`, the simulation default).
pub fn special_evaluators() -> Registry<dyn SpecialEvaluator> {
    let mut r = Registry::<dyn SpecialEvaluator>::new("special-function evaluator");
    r.register("adaptive", || Box::new(AdaptiveQuadrature::default()))
        .register("split", || Box::new(SplitEvaluator))
        .register("table", || Box::new(ChebyshevTable::shared()));
    r
}

/// `rk4` (every particle under the full field) and `rigid-core` (exact
/// core rotation split from the slow field).
pub fn steppers() -> Registry<dyn Stepper> {
    let mut r = Registry::<dyn Stepper>::new("stepper");
    r.register("rk4", || Box::new(Rk4Stepper))
        .register("rigid-core", || Box::new(RigidCoreStepper));
    r
}
