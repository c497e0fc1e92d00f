#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mfstream/corpus.hpp"
#include "mfstream/series.hpp"

namespace mfstream {

/// A narrow subtopic identified by keyword phrases. A phrase is one or more
/// words; it matches when its words occur consecutively in a document,
/// case-insensitively and on whole-word boundaries ("trades" does not match
/// "trade"). ASCII letters and digits form words; non-ASCII code points are
/// word constituents except for the common Unicode punctuation and space
/// blocks. Case folding is ASCII-only.
struct SubtopicQuery {
    std::string name;
    std::vector<std::string> keywords;

    friend bool operator==(const SubtopicQuery&, const SubtopicQuery&) = default;
};

/// Throws InputError unless names are unique and every query has at least one
/// nonempty keyword phrase.
void validate_queries(const std::vector<SubtopicQuery>& queries);

/// Every subtopic with at least one keyword phrase occurring in the text.
/// Empty result means the document belongs to the unmatched remainder.
std::set<std::string> match_subtopics(const Document& doc,
                                      const std::vector<SubtopicQuery>& queries);

/// Daily decomposition of the main stream. For every day t the exact integer
/// identity holds:
///
///   main_t = sum_i sub_t(i) - duplicates_t + other_t
///
/// where a document matching k subtopics contributes k-1 to duplicates_t.
struct DecompositionResult {
    DailySeries main;
    std::map<std::string, DailySeries> per_subtopic;
    DailySeries other;
    DailySeries duplicates;
    std::map<std::string, std::int64_t> per_subtopic_doc_counts;  // N_i
    std::int64_t total_docs = 0;                                  // N
};

DecompositionResult build_decomposition(const DocumentSet& corpus,
                                        const std::vector<SubtopicQuery>& queries);

/// N_i / N per subtopic, descending by fraction (ties by name). Throws on an
/// empty decomposition.
std::vector<std::pair<std::string, double>> contribution_coefficients(
    const DecompositionResult& result);

/// value_t = counts_t / totals_t. Series and totals must cover the same days.
DailySeries normalize_series(const DailySeries& counts, const DailyTotals& totals);

/// p_t = sub_t / main_t, with p_t = 0 on days where main_t = 0. Requires
/// equal coverage and sub_t <= main_t for every day; all results lie in [0,1].
DailySeries contribution_series(const DailySeries& sub, const DailySeries& main);

/// The union stream of the k' largest subtopics.
struct ReducedStream {
    std::vector<std::string> selected;    // largest N_i first, ties by name
    std::int64_t distinct_doc_count = 0;  // N': distinct documents matching any selected subtopic
    double coverage = 0.0;                // N'/N
    bool sufficient = false;              // coverage >= threshold
};

/// Selects the k_prime subtopics with the largest document counts and
/// measures what fraction of distinct documents they cover. Coverage is
/// compared against the threshold as N'/N >= threshold.
ReducedStream reduced_stream(const DecompositionResult& result, const DocumentSet& corpus,
                             const std::vector<SubtopicQuery>& queries, int k_prime,
                             double threshold = 0.8);

}  // namespace mfstream
