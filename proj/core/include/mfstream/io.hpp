#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfstream/compare.hpp"
#include "mfstream/decompose.hpp"
#include "mfstream/mfdfa.hpp"
#include "mfstream/series.hpp"

namespace mfstream {

/// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double value);

/// Series CSV with header `date,value`.
void write_series_csv(const DailySeries& series, const std::filesystem::path& path);

/// Reads `date,value` CSV (dates must be consecutive days) or a headerless
/// value-per-line file, which gets a nominal start day of 1970-01-01.
DailySeries read_series_csv(const std::filesystem::path& path);

/// Spectrum CSV with header `q,h,tau,alpha,f,fit_residual`. Values use the
/// shortest round-trip representation, so read-back is exact.
void write_spectrum_csv(const MultifractalSpectrum& spectrum, const std::filesystem::path& path);
MultifractalSpectrum read_spectrum_csv(const std::filesystem::path& path);

/// JSON sidecar written next to every spectrum CSV: verdict, width, series
/// length and the effective config (for provenance).
void write_spectrum_sidecar(const SpectrumResult& result, const MfdfaConfig& config,
                            std::size_t series_length, const std::filesystem::path& path);

struct SpectrumSidecar {
    bool ok = false;
    std::string reason;
    std::optional<double> width;
    std::size_t series_length = 0;
};

SpectrumSidecar read_spectrum_sidecar(const std::filesystem::path& path);

/// Subtopic queries: JSON array of {"name": ..., "keywords": [...]}.
std::vector<SubtopicQuery> load_topic_queries(const std::filesystem::path& path);
void save_topic_queries(const std::vector<SubtopicQuery>& queries,
                        const std::filesystem::path& path);

/// Ranking CSV `topic,distance,valid`, rows in table order; distances shown
/// with 3 decimals, blank for invalid rows. The JSON twin keeps full
/// precision.
void write_ranking_csv(const RankingTable& table, const std::filesystem::path& path);
void write_ranking_json(const RankingTable& table, const std::filesystem::path& path);

/// Ground truth of a simulated corpus: per-day counts per subtopic plus the
/// duplicate and remainder series.
void write_truth_json(const DecompositionResult& truth, std::uint64_t seed,
                      const std::filesystem::path& path);
DecompositionResult read_truth_json(const std::filesystem::path& path);

}  // namespace mfstream
