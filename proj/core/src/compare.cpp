#include "mfstream/compare.hpp"

#include <algorithm>
#include <cmath>

#include "mfstream/errors.hpp"

namespace mfstream {

double spectrum_distance(const MultifractalSpectrum& a, const MultifractalSpectrum& b) {
    if (a.q.size() != b.q.size() || !std::equal(a.q.begin(), a.q.end(), b.q.begin())) {
        throw InputError("spectra have different q grids; resampling is not supported");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        const double da = a.alpha[i] - b.alpha[i];
        const double df = a.f[i] - b.f[i];
        sum += da * da + df * df;
    }
    return std::sqrt(sum / static_cast<double>(a.q.size()));
}

RankingTable rank_subtopics(
    const MultifractalSpectrum& main,
    const std::map<std::string, std::optional<MultifractalSpectrum>>& subs) {
    RankingTable table;
    std::vector<SpectrumDistance> invalid;
    for (const auto& [name, spec] : subs) {
        if (spec) {
            table.rows.push_back({name, spectrum_distance(main, *spec)});
        } else {
            invalid.push_back({name, std::nullopt});
        }
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const SpectrumDistance& a, const SpectrumDistance& b) {
                  if (*a.distance != *b.distance) {
                      return *a.distance < *b.distance;
                  }
                  return a.topic < b.topic;
              });
    // `subs` is an ordered map, so the invalid rows are already sorted by name.
    table.rows.insert(table.rows.end(), invalid.begin(), invalid.end());
    return table;
}

}  // namespace mfstream
