//! Type inference for individuals of an RDF graph.
//!
//! The pipeline reads N-Triples ([`rdf`]), builds an adjacency store
//! ([`graph`]), joins individuals with their type assertions ([`dataset`]),
//! describes each individual by the distinct random walks taken from it
//! ([`walker`]), folds the walk vocabulary into a fixed-width input
//! ([`codec`]) and trains a multi-label network ([`nn`]) scored by
//! micro-averaged F1 ([`metrics`]). [`pipeline`] chains the stages from a
//! config file and [`synth`] generates graphs with planted type rules.

mod binio;
pub mod codec;
pub mod dataset;
pub mod graph;
pub mod metrics;
pub mod nn;
pub mod pipeline;
pub mod rdf;
pub mod rng;
pub mod synth;
pub mod walker;
