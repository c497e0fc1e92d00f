#pragma once

// Shared test utilities: scratch directories, CLI invocation and the
// independent oracles the numerical assertions are checked against.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <mfstream/corpus.hpp>
#include <mfstream/decompose.hpp>

namespace testutil {

class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("mfstream_" + label + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

#ifdef MFSTREAM_CLI_PATH
inline CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
    const std::filesystem::path log = scratch / "cli_output.log";
    const std::string command =
        std::string("\"") + MFSTREAM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}
#endif

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// --------------------------------------------------------------------------
// Independent oracles

// Recounts the decomposition day by day and document by document, sharing
// only the pure per-document matcher with the implementation under test.
inline mfstream::DecompositionResult decompose_oracle(
    const mfstream::DocumentSet& corpus, const std::vector<mfstream::SubtopicQuery>& queries) {
    const auto range = corpus.date_range;
    const auto n_days = static_cast<std::size_t>(range.length());
    auto zeros = [&] {
        return mfstream::DailySeries{range.first, std::vector<double>(n_days)};
    };

    mfstream::DecompositionResult oracle;
    oracle.main = zeros();
    oracle.other = zeros();
    oracle.duplicates = zeros();
    for (const auto& query : queries) {
        oracle.per_subtopic.emplace(query.name, zeros());
        oracle.per_subtopic_doc_counts.emplace(query.name, 0);
    }
    for (std::size_t t = 0; t < n_days; ++t) {
        const mfstream::Day day = range.first + static_cast<std::int64_t>(t);
        for (const auto& doc : corpus.docs) {
            if (doc.date != day) {
                continue;
            }
            oracle.main.values[t] += 1.0;
            const auto matched = mfstream::match_subtopics(doc, queries);
            for (const auto& name : matched) {
                oracle.per_subtopic.at(name).values[t] += 1.0;
                ++oracle.per_subtopic_doc_counts.at(name);
            }
            if (matched.empty()) {
                oracle.other.values[t] += 1.0;
            } else {
                oracle.duplicates.values[t] += static_cast<double>(matched.size() - 1);
            }
        }
    }
    oracle.total_docs = static_cast<std::int64_t>(corpus.docs.size());
    return oracle;
}

// Per-day duplicate overcount straight from the definition.
inline std::vector<double> duplicate_overcount_oracle(
    const mfstream::DocumentSet& corpus, const std::vector<mfstream::SubtopicQuery>& queries) {
    std::vector<double> overcount(static_cast<std::size_t>(corpus.date_range.length()));
    for (const auto& doc : corpus.docs) {
        const auto k = mfstream::match_subtopics(doc, queries).size();
        if (k > 1) {
            overcount[static_cast<std::size_t>(doc.date - corpus.date_range.first)] +=
                static_cast<double>(k - 1);
        }
    }
    return overcount;
}

// Mean squared residual of an order-m polynomial least-squares fit, solved on
// the raw abscissa 0..n-1 with long-double normal equations and Gaussian
// elimination. Independent of the centered-basis Cholesky path in the library.
inline double lsq_msr_oracle(std::span<const double> y, int order) {
    const int dim = order + 1;
    long double gram[4][4] = {};
    long double rhs[4] = {};
    for (std::size_t i = 0; i < y.size(); ++i) {
        long double powers[4] = {1.0L, 0.0L, 0.0L, 0.0L};
        for (int j = 1; j < dim; ++j) {
            powers[j] = powers[j - 1] * static_cast<long double>(i);
        }
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) {
                gram[r][c] += powers[r] * powers[c];
            }
            rhs[r] += powers[r] * static_cast<long double>(y[i]);
        }
    }
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r) {
            if (std::fabs(static_cast<double>(gram[r][col])) >
                std::fabs(static_cast<double>(gram[pivot][col]))) {
                pivot = r;
            }
        }
        for (int c = 0; c < dim; ++c) {
            std::swap(gram[col][c], gram[pivot][c]);
        }
        std::swap(rhs[col], rhs[pivot]);
        for (int r = col + 1; r < dim; ++r) {
            const long double factor = gram[r][col] / gram[col][col];
            for (int c = col; c < dim; ++c) {
                gram[r][c] -= factor * gram[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    long double coef[4] = {};
    for (int r = dim - 1; r >= 0; --r) {
        long double sum = rhs[r];
        for (int c = r + 1; c < dim; ++c) {
            sum -= gram[r][c] * coef[c];
        }
        coef[r] = sum / gram[r][r];
    }
    long double sum_sq = 0.0L;
    for (std::size_t i = 0; i < y.size(); ++i) {
        long double fit = 0.0L;
        long double power = 1.0L;
        for (int j = 0; j < dim; ++j) {
            fit += coef[j] * power;
            power *= static_cast<long double>(i);
        }
        const long double r = static_cast<long double>(y[i]) - fit;
        sum_sq += r * r;
    }
    return static_cast<double>(sum_sq / static_cast<long double>(y.size()));
}

// Closed-form scaling function of the binomial cascade.
inline double analytic_tau_binomial(double q, double a) {
    return -std::log2(std::pow(a, q) + std::pow(1.0 - a, q));
}

// Its exact derivative, the singularity strength alpha(q).
inline double analytic_alpha_binomial(double q, double a) {
    const double b = 1.0 - a;
    const double pa = std::pow(a, q);
    const double pb = std::pow(b, q);
    return -(pa * std::log(a) + pb * std::log(b)) / ((pa + pb) * std::log(2.0));
}

// Deterministic Fisher-Yates shuffle (index by modulo draw, documented and
// stable across platforms).
inline void fisher_yates(std::vector<double>& values, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = values.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(values[i], values[j]);
    }
}

// Small corpus builder for hand-written scenarios.
inline mfstream::DocumentSet make_corpus(
    mfstream::Day start, const std::vector<std::pair<int, std::string>>& day_texts) {
    mfstream::DocumentSet corpus;
    int max_offset = 0;
    for (std::size_t i = 0; i < day_texts.size(); ++i) {
        const auto& [offset, text] = day_texts[i];
        corpus.docs.push_back(
            {"doc-" + std::to_string(i), start + offset, text});
        max_offset = std::max(max_offset, offset);
    }
    corpus.date_range = {start, start + max_offset};
    return corpus;
}

}  // namespace testutil
