//! Experiment kinds, registered by name and selected by the `kind` key.

use std::collections::BTreeMap;

use crate::config::{Constants, Params, Setup};
use crate::error::LabError;
use crate::table::Table;

/// Inputs shared by every run.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub master_seed: u64,
    pub constants: Constants,
}

/// Tables produced by one run, in emission order.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

/// A validated, runnable experiment.
pub trait Plan: Send + Sync {
    fn run(&self, ctx: &RunContext) -> Result<Output, LabError>;
}

/// One experiment kind.
pub trait Experiment: Send + Sync {
    /// Registry key, matched against the configuration's `kind`.
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Reads this kind's keys from `p`. Problems are recorded in `p`; `None`
    /// means the configuration cannot run.
    fn prepare(&self, p: &mut Params, setup: &Setup) -> Option<Box<dyn Plan>>;
}

#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The six built-in kinds.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        for e in crate::experiments::builtin() {
            r.register(e);
        }
        r
    }

    /// Adds `e`, replacing any kind already registered under its name.
    pub fn register(&mut self, e: Box<dyn Experiment>) -> Option<Box<dyn Experiment>> {
        self.entries.insert(e.name(), e)
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.entries.values().map(|b| b.as_ref())
    }
}
