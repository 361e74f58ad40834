//! Generation strategies behind a common trait, looked up by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::SutModel;
use crate::path::{CoverageSpec, TestPathSet};
use crate::{fsmt, nsr};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: u64,
    /// Pick level-2 pivots at random (from `seed`) instead of in edge order.
    pub shuffle_pivots: bool,
    pub limits: Limits,
}

pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn generate(&self, model: &SutModel, spec: &CoverageSpec, opts: &RunOptions) -> Result<TestPathSet>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Fsmt;

impl Strategy for Fsmt {
    fn name(&self) -> &'static str {
        "fsmt"
    }

    fn description(&self) -> &'static str {
        "shortest in-range path per test start, then bidirectional search per uncovered edge"
    }

    fn generate(&self, model: &SutModel, spec: &CoverageSpec, opts: &RunOptions) -> Result<TestPathSet> {
        fsmt::generate_fsmt(model, spec, opts)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Nsr;

impl Strategy for Nsr {
    fn name(&self) -> &'static str {
        "nsr"
    }

    fn description(&self) -> &'static str {
        "exhaustive in-range walk enumeration, start/end filtering, greedy reduction"
    }

    fn generate(&self, model: &SutModel, spec: &CoverageSpec, opts: &RunOptions) -> Result<TestPathSet> {
        nsr::generate_nsr(model, spec, &opts.limits)
    }
}

/// Name-keyed set of strategies.
#[derive(Clone, Default)]
pub struct StrategyRegistry {
    entries: BTreeMap<&'static str, Arc<dyn Strategy>>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `fsmt` and `nsr`.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Fsmt));
        r.register(Arc::new(Nsr));
        r
    }

    /// Adds a strategy, replacing any previous one with the same name.
    pub fn register(&mut self, strategy: Arc<dyn Strategy>) -> Option<Arc<dyn Strategy>> {
        self.entries.insert(strategy.name(), strategy)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Strategy>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Strategy>> {
        self.entries.values()
    }
}

impl std::fmt::Debug for StrategyRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures;
    use crate::path::Level;

    #[test]
    fn builtins_resolve_by_name() {
        let r = StrategyRegistry::with_builtins();
        assert_eq!(r.names().collect::<Vec<_>>(), ["fsmt", "nsr"]);
        assert!(matches!(r.get("greedy"), Err(Error::UnknownStrategy(_))));
        let m = fixtures::single();
        let spec = CoverageSpec::new(Level::One, 1, 1).unwrap();
        for s in r.iter() {
            let set = s.generate(&m, &spec, &RunOptions::default()).unwrap();
            assert_eq!(set.paths.len(), 1, "{}", s.name());
        }
    }

    struct Empty;

    impl Strategy for Empty {
        fn name(&self) -> &'static str {
            "fsmt"
        }
        fn description(&self) -> &'static str {
            "returns nothing"
        }
        fn generate(&self, model: &SutModel, spec: &CoverageSpec, _: &RunOptions) -> Result<TestPathSet> {
            Ok(TestPathSet::assemble(model, spec.level, vec![], Default::default(), Default::default()))
        }
    }

    #[test]
    fn register_replaces_same_name() {
        let mut r = StrategyRegistry::with_builtins();
        assert!(r.register(Arc::new(Empty)).is_some());
        assert_eq!(r.get("fsmt").unwrap().description(), "returns nothing");
    }
}
