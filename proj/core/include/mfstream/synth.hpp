#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfstream/corpus.hpp"
#include "mfstream/decompose.hpp"

namespace mfstream {

/// Deterministic binomial multiplicative cascade: a closed-form multifractal
/// used as the numerical oracle for the analysis pipeline.
struct CascadeSpec {
    double a = 0.75;  // in (0.5, 1)
    int levels = 14;  // series length 2^levels, 8..24
};

/// x_k = a^(levels - popcount(k-1)) * (1-a)^popcount(k-1), k = 1..2^levels.
/// Strictly positive, sums to 1.
std::vector<double> binomial_cascade(const CascadeSpec& spec);

/// Closed-form generalized Hurst exponent of the binomial cascade:
/// h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2). Requires q != 0, 0 < a < 1.
double analytic_hurst_binomial(double q, double a);

/// I.i.d. standard Gaussian draws. The generator is fully specified
/// (mt19937_64, 53-bit uniforms, Box-Muller), so fixed seeds give identical
/// series on every platform.
std::vector<double> white_noise(std::size_t n, std::uint64_t seed);

/// Cumulative sum of white_noise(n, seed).
std::vector<double> random_walk(std::size_t n, std::uint64_t seed);

/// One simulated subtopic: Poisson document counts per day, optionally
/// overlapping a partner subtopic (that fraction of its documents also
/// carries the partner's keyword).
struct SimSubtopic {
    std::string name;
    double intensity = 0.0;      // expected documents per day
    std::string overlap_with;    // empty = no designated partner
    double overlap_fraction = 0.0;  // in [0, 1]
};

struct SimCorpusSpec {
    int days = 365;
    Day start_day;  // default-constructed = 1970-01-01; set explicitly for realistic dates
    std::vector<SimSubtopic> subtopics;
    double background_intensity = 0.0;  // documents matching no subtopic
    std::uint64_t seed = 0;
    std::int64_t base_scan_total = 1000;  // baseline for the synthetic scanner totals
};

/// A generated corpus together with its exact ground truth. Running
/// build_decomposition(corpus, queries) must reproduce `truth` exactly.
struct SimulatedCorpus {
    DocumentSet corpus;
    std::vector<SubtopicQuery> queries;  // one keyword per subtopic: its name
    DecompositionResult truth;           // generator bookkeeping
    DailyTotals totals;  // main_t plus a weekly-periodic scanner background
};

/// Generates documents whose text contains exactly the keywords of the
/// subtopics assigned by the sampler. Every document's text is re-checked
/// against the queries, so ambiguous subtopic names (one name containing
/// another as a phrase) are rejected rather than producing wrong truth.
SimulatedCorpus simulate_corpus(const SimCorpusSpec& spec);

}  // namespace mfstream
