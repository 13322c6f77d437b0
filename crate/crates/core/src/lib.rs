//! Broadcast rate analysis and zero-error code construction for a server
//! that must deliver two functions of correlated sources (X, Y) to
//! receivers holding X and Y respectively as side information.
//!
//! The crate is organized bottom-up:
//!
//! * [`pmf`] — finite joint distributions, entropies, typical sets.
//! * [`graphs`] — labeled graphs, AND/OR powers, cliques, colorings.
//! * [`confusion`] — confusion graphs built from a distribution and a
//!   pair of demanded functions, plus the compatibility decision.
//! * [`gentropy`] — chromatic entropy, graph entropy via alternating
//!   minimization, and bracketed estimates of the asymptotic coloring
//!   rate.
//! * [`rates`] — closed-form rates, cut-set bounds, and the achievable
//!   epsilon-error inner bound.
//! * [`codec`] — concrete encoders/decoders: coloring + Huffman codes,
//!   index codes, and a random-binning simulator.
//!
//! All information quantities are in bits. Randomized routines take
//! explicit seeds and are deterministic given them.

pub mod codec;
pub mod confusion;
pub mod gentropy;
pub mod graphs;
pub mod pmf;
pub mod rates;

use serde::{Deserialize, Serialize};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} needs {requested} but the cap is {limit}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("graphs have different vertex lists")]
    VertexMismatch,
    #[error("function table undefined on support cell ({x}, {y})")]
    TableGap { x: usize, y: usize },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("codeword does not match any color")]
    UnknownCodeword,
    #[error("side information matches no codebook block: {0}")]
    OffSupport(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Size limits for the exact searches. Exceeding a cap is an error, not
/// a silent fallback, except where an operation documents a flagged
/// heuristic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Caps {
    /// Max vertices in a graph power or block-length extension.
    pub power_vertices: usize,
    /// Max vertices for maximal-independent-set enumeration.
    pub mis_vertices: usize,
    /// Max vertices for the exact minimum-entropy coloring search.
    pub exact_coloring_vertices: usize,
    /// Max vertices for the perfection check.
    pub perfection_vertices: usize,
    /// Max vertices for exact clique and chromatic number searches
    /// (hard bound 64: these run on single-word bitsets).
    pub exact_search_vertices: usize,
    /// Max number of deterministic channels enumerated when
    /// cross-checking the epsilon-error inner bound.
    pub deterministic_channels: usize,
    /// Max auxiliary codebook size for the covering/packing simulator.
    pub codebook_sequences: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            power_vertices: 100_000,
            mis_vertices: 24,
            exact_coloring_vertices: 16,
            perfection_vertices: 12,
            exact_search_vertices: 64,
            deterministic_channels: 1_000_000,
            codebook_sequences: 1 << 18,
        }
    }
}

impl Caps {
    /// Default caps with `ZECAST_CAP_*` environment overrides applied
    /// (`POWER_VERTICES`, `MIS_VERTICES`, `EXACT_COLORING_VERTICES`,
    /// `PERFECTION_VERTICES`, `EXACT_SEARCH_VERTICES`,
    /// `DETERMINISTIC_CHANNELS`, `CODEBOOK_SEQUENCES`).
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        let read = |name: &str| -> Option<usize> {
            std::env::var(format!("ZECAST_CAP_{name}"))
                .ok()
                .and_then(|v| v.trim().parse().ok())
        };
        if let Some(v) = read("POWER_VERTICES") {
            caps.power_vertices = v;
        }
        if let Some(v) = read("MIS_VERTICES") {
            caps.mis_vertices = v;
        }
        if let Some(v) = read("EXACT_COLORING_VERTICES") {
            caps.exact_coloring_vertices = v;
        }
        if let Some(v) = read("PERFECTION_VERTICES") {
            caps.perfection_vertices = v;
        }
        if let Some(v) = read("EXACT_SEARCH_VERTICES") {
            caps.exact_search_vertices = v;
        }
        if let Some(v) = read("DETERMINISTIC_CHANNELS") {
            caps.deterministic_channels = v;
        }
        if let Some(v) = read("CODEBOOK_SEQUENCES") {
            caps.codebook_sequences = v;
        }
        caps
    }

}

/// Whether a reported value came from an exact search or a heuristic
/// that only bounds it from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBound,
}

/// Deterministic stream-seeded RNG used by every randomized routine.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha12Rng {
    use rand::SeedableRng;
    use rand_chacha::rand_core::RngCore;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // Discard a few words so that streams of a low-entropy seed decohere.
    for _ in 0..4 {
        rng.next_u64();
    }
    rng
}

/// "(a,b,c)" tuple labels used for product graphs and block symbols.
pub(crate) fn tuple_label(parts: &[&str]) -> String {
    let mut s = String::with_capacity(2 + parts.iter().map(|p| p.len() + 1).sum::<usize>());
    s.push('(');
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(p);
    }
    s.push(')');
    s
}
