pub mod embed;
pub mod evalkit;
pub mod exec;
pub mod ingest;
pub mod kg;
pub mod providers;
pub mod ragen;
pub mod retrieval;
pub mod synth;
