pub mod classify;
pub mod clusterer;
pub mod experiments;
pub mod footprints;
pub mod graphdata;
pub mod measures;
pub mod miner;
pub mod properties;
pub mod rankcmp;
pub mod shapley;
pub mod synthetic;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/properties.md")]
    mod properties {}
    #[doc = include_str!("../../../book/src/clustering.md")]
    mod clustering {}
    #[doc = include_str!("../../../book/src/ranking.md")]
    mod ranking {}
    #[doc = include_str!("../../../book/src/gold.md")]
    mod gold {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
