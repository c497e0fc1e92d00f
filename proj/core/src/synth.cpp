#include "mfstream/synth.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "mfstream/errors.hpp"

namespace mfstream {

namespace {

// All randomness goes through mt19937_64 with explicitly constructed
// uniforms, so fixed seeds reproduce bit-identically on every toolchain
// (std::*_distribution is implementation-defined and deliberately avoided).
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : rng_(seed) {}

    // Uniform in [0, 1), 53 bits.
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1], safe for logarithms.
    double uniform_positive() {
        return static_cast<double>((rng_() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller transform, second value cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_positive();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    // Exponential inter-arrival accumulation; exact for any rate and free of
    // the e^-lambda underflow of the product form.
    std::int64_t poisson(double rate) {
        if (rate <= 0.0) {
            return 0;
        }
        std::int64_t count = 0;
        double elapsed = -std::log(uniform_positive());
        while (elapsed <= rate) {
            ++count;
            elapsed += -std::log(uniform_positive());
        }
        return count;
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

private:
    std::mt19937_64 rng_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

const std::vector<std::string> kFillerCandidates = {
    "aurora", "breeze",  "cobalt", "drift",  "ember",  "fathom",
    "groves", "harbor",  "inlet",  "juniper", "kestrel", "lantern",
};

}  // namespace

std::vector<double> binomial_cascade(const CascadeSpec& spec) {
    if (!(spec.a > 0.5 && spec.a < 1.0)) {
        throw InputError("cascade parameter a must lie in (0.5, 1)");
    }
    if (spec.levels < 8 || spec.levels > 24) {
        throw InputError("cascade levels must lie in [8, 24]");
    }
    const std::size_t n = std::size_t{1} << spec.levels;
    std::vector<double> series(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int bits = std::popcount(k);
        series[k] = std::pow(spec.a, spec.levels - bits) * std::pow(1.0 - spec.a, bits);
    }
    return series;
}

double analytic_hurst_binomial(double q, double a) {
    if (q == 0.0) {
        throw InputError("analytic Hurst exponent is undefined at q = 0");
    }
    if (!(a > 0.0 && a < 1.0)) {
        throw InputError("cascade parameter a must lie in (0, 1)");
    }
    return 1.0 / q - std::log(std::pow(a, q) + std::pow(1.0 - a, q)) / (q * std::log(2.0));
}

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw InputError("need at least 2 samples");
    }
    RandomSource source(seed);
    std::vector<double> series(n);
    for (double& v : series) {
        v = source.gaussian();
    }
    return series;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    std::vector<double> series = white_noise(n, seed);
    double sum = 0.0;
    for (double& v : series) {
        sum += v;
        v = sum;
    }
    return series;
}

SimulatedCorpus simulate_corpus(const SimCorpusSpec& spec) {
    if (spec.days < 1) {
        throw InputError("simulation needs at least 1 day");
    }
    if (spec.background_intensity < 0.0) {
        throw InputError("background intensity must be non-negative");
    }
    if (spec.base_scan_total < 0) {
        throw InputError("base scan total must be non-negative");
    }

    std::vector<SubtopicQuery> queries;
    queries.reserve(spec.subtopics.size());
    for (const SimSubtopic& sub : spec.subtopics) {
        if (sub.intensity < 0.0) {
            throw InputError("subtopic \"" + sub.name + "\" has negative intensity");
        }
        if (sub.overlap_fraction < 0.0 || sub.overlap_fraction > 1.0) {
            throw InputError("subtopic \"" + sub.name + "\" overlap fraction outside [0, 1]");
        }
        if (!sub.overlap_with.empty()) {
            if (sub.overlap_with == sub.name) {
                throw InputError("subtopic \"" + sub.name + "\" overlaps with itself");
            }
            const bool partner_exists =
                std::any_of(spec.subtopics.begin(), spec.subtopics.end(),
                            [&](const SimSubtopic& other) { return other.name == sub.overlap_with; });
            if (!partner_exists) {
                throw InputError("subtopic \"" + sub.name + "\" overlaps with unknown \"" +
                                 sub.overlap_with + "\"");
            }
        }
        queries.push_back({sub.name, {sub.name}});
    }
    validate_queries(queries);

    // Filler words must not collide with any keyword token.
    std::unordered_set<std::string> keyword_tokens;
    for (const SubtopicQuery& query : queries) {
        for (const std::string& keyword : query.keywords) {
            std::string token;
            for (char c : keyword) {
                token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
            keyword_tokens.insert(token);
        }
    }
    std::vector<std::string> fillers;
    for (const std::string& word : kFillerCandidates) {
        if (!keyword_tokens.contains(word)) {
            fillers.push_back(word);
        }
    }
    for (int i = 0; fillers.size() < 3; ++i) {
        std::string word = "filler" + std::to_string(i);
        if (!keyword_tokens.contains(word)) {
            fillers.push_back(word);
        }
    }

    const DayRange range{spec.start_day, spec.start_day + (spec.days - 1)};
    auto zero_series = [&] {
        return DailySeries{range.first, std::vector<double>(static_cast<std::size_t>(spec.days))};
    };

    SimulatedCorpus sim;
    sim.queries = queries;
    sim.truth.main = zero_series();
    sim.truth.other = zero_series();
    sim.truth.duplicates = zero_series();
    for (const SubtopicQuery& query : queries) {
        sim.truth.per_subtopic.emplace(query.name, zero_series());
        sim.truth.per_subtopic_doc_counts.emplace(query.name, 0);
    }

    RandomSource source(spec.seed);
    std::vector<Document> docs;
    std::int64_t next_id = 0;

    auto emit_document = [&](std::size_t t, const std::vector<std::string>& labels) {
        std::string text = fillers[source.index(fillers.size())];
        for (const std::string& label : labels) {
            text += ' ';
            text += label;
            text += ' ';
            text += fillers[source.index(fillers.size())];
        }

        char id[24];
        std::snprintf(id, sizeof(id), "sim-%08lld", static_cast<long long>(next_id++));
        Document doc{id, range.first + static_cast<std::int64_t>(t), text};

        sim.truth.main.values[t] += 1.0;
        if (labels.empty()) {
            sim.truth.other.values[t] += 1.0;
        } else {
            for (const std::string& label : labels) {
                sim.truth.per_subtopic.at(label).values[t] += 1.0;
                ++sim.truth.per_subtopic_doc_counts.at(label);
            }
            sim.truth.duplicates.values[t] += static_cast<double>(labels.size() - 1);
        }

        const auto matched = match_subtopics(doc, queries);
        if (matched != std::set<std::string>(labels.begin(), labels.end())) {
            throw InputError("ambiguous subtopic keywords: document for \"" +
                             (labels.empty() ? std::string("<background>") : labels.front()) +
                             "\" matches a different label set");
        }
        docs.push_back(std::move(doc));
    };

    for (std::size_t t = 0; t < static_cast<std::size_t>(spec.days); ++t) {
        for (const SimSubtopic& sub : spec.subtopics) {
            const std::int64_t n_docs = source.poisson(sub.intensity);
            for (std::int64_t i = 0; i < n_docs; ++i) {
                std::vector<std::string> labels{sub.name};
                if (!sub.overlap_with.empty() && source.bernoulli(sub.overlap_fraction)) {
                    labels.push_back(sub.overlap_with);
                }
                std::sort(labels.begin(), labels.end());
                emit_document(t, labels);
            }
        }
        const std::int64_t n_background = source.poisson(spec.background_intensity);
        for (std::int64_t i = 0; i < n_background; ++i) {
            emit_document(t, {});
        }
    }

    sim.truth.total_docs = static_cast<std::int64_t>(docs.size());
    sim.corpus = DocumentSet{std::move(docs), range};

    // Scanner totals: the stream itself plus a weekly-periodic background,
    // mirroring the one-week publication cycle the normalization removes.
    static constexpr double kWeeklyPattern[7] = {1.00, 1.04, 1.02, 0.99, 0.97, 0.72, 0.66};
    sim.totals.start_day = range.first;
    sim.totals.counts.resize(static_cast<std::size_t>(spec.days));
    for (std::size_t t = 0; t < static_cast<std::size_t>(spec.days); ++t) {
        const auto background = static_cast<std::int64_t>(
            std::llround(static_cast<double>(spec.base_scan_total) * kWeeklyPattern[t % 7]));
        sim.totals.counts[t] = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(sim.truth.main.values[t]) + background);
    }
    return sim;
}

}  // namespace mfstream
