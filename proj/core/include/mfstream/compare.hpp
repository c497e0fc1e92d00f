#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfstream/mfdfa.hpp"

namespace mfstream {

/// Distance of one subtopic spectrum to the main spectrum. The distance is
/// undefined (and the row invalid) when the subtopic had no estimable
/// spectrum.
struct SpectrumDistance {
    std::string topic;
    std::optional<double> distance;

    bool valid() const { return distance.has_value(); }
};

/// Rows sorted ascending by distance (ties by name); invalid rows last.
struct RankingTable {
    std::vector<SpectrumDistance> rows;
};

/// RMS Euclidean distance between the parametric spectrum curves at matched q:
///
///   d = sqrt( mean_q [ (alpha_a - alpha_b)^2 + (f_a - f_b)^2 ] )
///
/// Requires identical q grids (no resampling); throws InputError otherwise.
double spectrum_distance(const MultifractalSpectrum& a, const MultifractalSpectrum& b);

/// Ranks subtopics by spectral similarity to the main stream. Subtopics
/// mapped to nullopt (insufficient data) are appended after all valid rows,
/// ordered by name.
RankingTable rank_subtopics(const MultifractalSpectrum& main,
                            const std::map<std::string, std::optional<MultifractalSpectrum>>& subs);

}  // namespace mfstream
