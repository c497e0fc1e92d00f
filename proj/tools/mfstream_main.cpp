// Command-line front end: decompose a document stream into subtopic series,
// estimate multifractal spectra, rank subtopics by spectral similarity, and
// generate synthetic corpora with known ground truth.
//
// Exit codes: 0 success (including insufficient-data verdicts), 2 input
// error, 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mfstream/compare.hpp>
#include <mfstream/corpus.hpp>
#include <mfstream/decompose.hpp>
#include <mfstream/errors.hpp>
#include <mfstream/io.hpp>
#include <mfstream/mfdfa.hpp>
#include <mfstream/synth.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNumericalError = 3;

std::string sanitize_filename(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out.push_back(keep ? c : '_');
    }
    return out.empty() ? "_" : out;
}

std::map<std::string, std::string> filename_map(const std::vector<std::string>& names) {
    std::map<std::string, std::string> mapping;
    std::set<std::string> used;
    for (const std::string& name : names) {
        const std::string sanitized = sanitize_filename(name);
        if (!used.insert(sanitized).second) {
            throw mfstream::InputError("subtopic names \"" + name +
                                       "\" and another one collide after filename sanitizing; "
                                       "rename one of them");
        }
        mapping[name] = sanitized;
    }
    return mapping;
}

struct MfdfaFlags {
    double q_min = -5.0;
    double q_max = 5.0;
    double q_step = 0.5;
    std::vector<int> scales;
    int detrend_order = 1;
    std::size_t min_length = 128;
    double max_zero_fraction = 0.5;
    int threads = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--q-min", q_min, "Smallest moment order")->capture_default_str();
        cmd->add_option("--q-max", q_max, "Largest moment order")->capture_default_str();
        cmd->add_option("--q-step", q_step, "Moment order step (0 is always excluded)")
            ->capture_default_str();
        cmd->add_option("--scales", scales,
                        "Comma-separated segment lengths (default: half-octave grid)")
            ->delimiter(',');
        cmd->add_option("--detrend-order", detrend_order, "Detrending polynomial order (1-3)")
            ->capture_default_str();
        cmd->add_option("--min-length", min_length, "Minimum series length for a valid estimate")
            ->capture_default_str();
        cmd->add_option("--max-zero-fraction", max_zero_fraction,
                        "Largest tolerated fraction of zero days")
            ->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads (any count is bit-deterministic)")
            ->capture_default_str();
    }

    mfstream::MfdfaConfig to_config() const {
        mfstream::MfdfaConfig config;
        if (q_step <= 0.0) {
            throw mfstream::InputError("--q-step must be positive");
        }
        if (q_max < q_min) {
            throw mfstream::InputError("--q-max must be >= --q-min");
        }
        config.q_grid.clear();
        const int steps = static_cast<int>(std::lround((q_max - q_min) / q_step));
        for (int i = 0; i <= steps; ++i) {
            const double q = q_min + q_step * i;
            if (std::abs(q) < 1e-9) {
                continue;  // q = 0 excluded
            }
            config.q_grid.push_back(q);
        }
        config.scales = scales;
        config.detrend_order = detrend_order;
        config.min_length = min_length;
        config.max_zero_fraction = max_zero_fraction;
        config.threads = threads;
        return config;
    }
};

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
    std::string corpus_path;
    std::string topics_path;
    std::string totals_path;
    std::string out_dir;
    std::string normalize = "rates";
    int k_prime = 0;  // 0 = not requested
    double threshold = 0.8;
    std::string from_day;
    std::string to_day;
};

int run_decompose(const DecomposeArgs& args) {
    std::optional<mfstream::DayRange> analysis_range;
    if (args.from_day.empty() != args.to_day.empty()) {
        throw mfstream::InputError("--from and --to must be given together");
    }
    if (!args.from_day.empty()) {
        analysis_range = mfstream::DayRange{mfstream::Day::parse(args.from_day),
                                            mfstream::Day::parse(args.to_day)};
        if (analysis_range->last < analysis_range->first) {
            throw mfstream::InputError("--to lies before --from");
        }
    }

    mfstream::CorpusLoadStats stats;
    const auto corpus = mfstream::load_corpus(args.corpus_path, analysis_range, &stats);
    if (stats.dropped_out_of_range > 0) {
        std::cerr << "note: dropped " << stats.dropped_out_of_range
                  << " documents outside the analysis range\n";
    }
    const auto queries = mfstream::load_topic_queries(args.topics_path);

    const bool rates = args.normalize == "rates";
    std::optional<mfstream::DailyTotals> totals;
    if (rates) {
        if (args.totals_path.empty()) {
            throw mfstream::InputError(
                "--normalize rates needs --totals FILE (daily scanner totals); "
                "pass --normalize counts to analyze raw counts");
        }
        totals = mfstream::load_daily_totals(args.totals_path, corpus.date_range);
    } else if (!args.totals_path.empty()) {
        std::cerr << "note: --totals is unused with --normalize counts\n";
    }

    const auto result = mfstream::build_decomposition(corpus, queries);
    const auto coefficients = mfstream::contribution_coefficients(result);

    std::optional<mfstream::ReducedStream> reduced;
    if (args.k_prime != 0) {
        reduced = mfstream::reduced_stream(result, corpus, queries, args.k_prime, args.threshold);
    }

    std::vector<std::string> names;
    for (const auto& [name, series] : result.per_subtopic) {
        names.push_back(name);
    }
    const auto files = filename_map(names);

    // All inputs validated and results computed; only now touch the filesystem.
    const fs::path out(args.out_dir);
    fs::create_directories(out);

    mfstream::write_series_csv(result.main, out / "main.csv");
    mfstream::write_series_csv(result.other, out / "other.csv");
    mfstream::write_series_csv(result.duplicates, out / "duplicates.csv");
    for (const auto& [name, series] : result.per_subtopic) {
        mfstream::write_series_csv(series, out / ("sub_" + files.at(name) + ".csv"));
        mfstream::write_series_csv(mfstream::contribution_series(series, result.main),
                                   out / ("contribution_" + files.at(name) + ".csv"));
    }
    if (rates) {
        mfstream::write_series_csv(mfstream::normalize_series(result.main, *totals),
                                   out / "rate_main.csv");
        for (const auto& [name, series] : result.per_subtopic) {
            mfstream::write_series_csv(mfstream::normalize_series(series, *totals),
                                       out / ("rate_sub_" + files.at(name) + ".csv"));
        }
    }

    double other_total = 0.0;
    for (double v : result.other.values) {
        other_total += v;
    }
    double duplicates_total = 0.0;
    for (double v : result.duplicates.values) {
        duplicates_total += v;
    }

    json summary;
    summary["total_docs"] = result.total_docs;
    summary["subtopic_doc_counts"] = result.per_subtopic_doc_counts;
    summary["other_total"] = static_cast<std::int64_t>(other_total);
    summary["duplicates_total"] = static_cast<std::int64_t>(duplicates_total);
    json coefficient_rows = json::array();
    for (const auto& [name, fraction] : coefficients) {
        coefficient_rows.push_back({{"topic", name}, {"fraction", fraction}});
    }
    summary["coefficients"] = std::move(coefficient_rows);
    summary["date_range"] = {{"first", corpus.date_range.first.to_string()},
                             {"last", corpus.date_range.last.to_string()}};
    summary["dropped_out_of_range"] = stats.dropped_out_of_range;
    summary["normalize"] = args.normalize;
    if (reduced) {
        summary["reduced_stream"] = {{"k_prime", args.k_prime},
                                     {"threshold", args.threshold},
                                     {"selected", reduced->selected},
                                     {"distinct_doc_count", reduced->distinct_doc_count},
                                     {"coverage", reduced->coverage},
                                     {"sufficient", reduced->sufficient}};
    } else {
        summary["reduced_stream"] = nullptr;
    }
    std::ofstream summary_out(out / "summary.json", std::ios::binary);
    summary_out << summary.dump(2) << '\n';

    std::cout << "decomposed " << result.total_docs << " documents into " << names.size()
              << " subtopic series in " << out.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumArgs {
    std::string series_path;
    std::string out_dir;
    std::string name = "spectrum";
    MfdfaFlags mfdfa;
};

int run_spectrum(const SpectrumArgs& args) {
    const auto series = mfstream::read_series_csv(args.series_path);
    const auto config = args.mfdfa.to_config();
    const auto result = mfstream::spectrum(series, config);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    const std::string stem = sanitize_filename(args.name);

    mfstream::write_spectrum_sidecar(result, config, series.size(), out / (stem + ".json"));
    if (result.ok()) {
        mfstream::write_spectrum_csv(*result.spectrum, out / (stem + ".csv"));
        std::cout << stem << ": width " << mfstream::format_double(result.spectrum->width())
                  << " over " << result.scales_used.size() << " scales\n";
    } else {
        std::cout << stem << ": insufficient data (" << result.verdict.reason << ")\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    std::string main_spectrum_path;
    std::string spectra_dir;
    std::string out_dir;
};

int run_compare(const CompareArgs& args) {
    const auto main_spectrum = mfstream::read_spectrum_csv(args.main_spectrum_path);

    if (!fs::is_directory(args.spectra_dir)) {
        throw mfstream::InputError(args.spectra_dir + " is not a directory");
    }
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(args.spectra_dir)) {
        if (entry.is_regular_file()) {
            entries.push_back(entry.path());
        }
    }
    std::sort(entries.begin(), entries.end());

    std::map<std::string, std::optional<mfstream::MultifractalSpectrum>> subs;
    for (const fs::path& path : entries) {
        const std::string topic = path.stem().string();
        if (path.extension() == ".csv") {
            auto spectrum = mfstream::read_spectrum_csv(path);
            if (spectrum.q != main_spectrum.q) {
                throw mfstream::InputError(path.string() +
                                           ": q grid differs from the main spectrum");
            }
            subs[topic] = std::move(spectrum);
        } else if (path.extension() == ".json") {
            if (fs::exists(path.parent_path() / (topic + ".csv"))) {
                continue;  // sidecar of a spectrum handled above
            }
            const auto sidecar = mfstream::read_spectrum_sidecar(path);
            if (sidecar.ok) {
                throw mfstream::InputError(path.string() +
                                           ": sidecar claims a spectrum but no CSV is present");
            }
            subs[topic] = std::nullopt;
        }
    }
    if (subs.empty()) {
        throw mfstream::InputError(args.spectra_dir + " contains no spectrum files");
    }

    const auto table = mfstream::rank_subtopics(main_spectrum, subs);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    mfstream::write_ranking_csv(table, out / "ranking.csv");
    mfstream::write_ranking_json(table, out / "ranking.json");

    for (const auto& row : table.rows) {
        if (row.valid()) {
            std::printf("%-24s %.3f\n", row.topic.c_str(), *row.distance);
        } else {
            std::printf("%-24s -\n", row.topic.c_str());
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string out_dir;
    std::uint64_t seed = 0;
    int days = 365;
    std::string start_day = "2016-01-01";
    std::vector<std::string> subtopic_specs;
    double background = 0.0;
    std::int64_t base_total = 1000;
};

mfstream::SimSubtopic parse_subtopic_spec(const std::string& spec) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = spec.find(':', start);
        if (pos == std::string::npos) {
            fields.push_back(spec.substr(start));
            break;
        }
        fields.push_back(spec.substr(start, pos - start));
        start = pos + 1;
    }
    if (fields.size() != 2 && fields.size() != 4) {
        throw mfstream::InputError("subtopic spec \"" + spec +
                                   "\" must be name:intensity or name:intensity:partner:fraction");
    }
    mfstream::SimSubtopic sub;
    sub.name = fields[0];
    try {
        sub.intensity = std::stod(fields[1]);
        if (fields.size() == 4) {
            sub.overlap_with = fields[2];
            sub.overlap_fraction = std::stod(fields[3]);
        }
    } catch (const std::exception&) {
        throw mfstream::InputError("subtopic spec \"" + spec + "\" has non-numeric fields");
    }
    return sub;
}

int run_simulate(const SimulateArgs& args) {
    if (args.subtopic_specs.empty() && args.background <= 0.0) {
        throw mfstream::InputError("nothing to simulate: give --subtopic and/or --background");
    }
    mfstream::SimCorpusSpec spec;
    spec.days = args.days;
    spec.start_day = mfstream::Day::parse(args.start_day);
    spec.background_intensity = args.background;
    spec.seed = args.seed;
    spec.base_scan_total = args.base_total;
    for (const std::string& sub : args.subtopic_specs) {
        spec.subtopics.push_back(parse_subtopic_spec(sub));
    }

    const auto sim = mfstream::simulate_corpus(spec);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    mfstream::save_corpus(sim.corpus, out / "corpus.jsonl");
    mfstream::save_topic_queries(sim.queries, out / "topics.json");
    mfstream::write_truth_json(sim.truth, spec.seed, out / "truth.json");
    mfstream::save_daily_totals(sim.totals, out / "totals.csv");

    std::cout << "simulated " << sim.corpus.size() << " documents over " << spec.days
              << " days into " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subtopic decomposition and multifractal spectrum analysis of document streams"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI/TOML file with per-subcommand sections, e.g. [spectrum]; "
                   "command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    DecomposeArgs dec;
    CLI::App* cmd_decompose =
        app.add_subcommand("decompose", "Split a corpus into subtopic daily series");
    cmd_decompose->add_option("corpus", dec.corpus_path, "Corpus JSONL file")->required();
    cmd_decompose->add_option("topics", dec.topics_path, "Subtopic queries JSON file")->required();
    cmd_decompose->add_option("--out", dec.out_dir, "Output directory")->required();
    cmd_decompose->add_option("--totals", dec.totals_path, "Daily scanner totals CSV");
    cmd_decompose
        ->add_option("--normalize", dec.normalize, "rates: also write totals-normalized series")
        ->check(CLI::IsMember({"rates", "counts"}))
        ->capture_default_str();
    cmd_decompose->add_option("--k-prime", dec.k_prime, "Build the reduced stream of the top K' subtopics");
    cmd_decompose->add_option("--threshold", dec.threshold, "Reduced-stream coverage threshold")
        ->capture_default_str();
    cmd_decompose->add_option("--from", dec.from_day, "Analysis range start (YYYY-MM-DD)");
    cmd_decompose->add_option("--to", dec.to_day, "Analysis range end (YYYY-MM-DD)");

    SpectrumArgs spc;
    CLI::App* cmd_spectrum =
        app.add_subcommand("spectrum", "Estimate the multifractal spectrum of a daily series");
    cmd_spectrum->add_option("series", spc.series_path, "Series CSV (date,value or one value per line)")
        ->required();
    cmd_spectrum->add_option("--out", spc.out_dir, "Output directory")->required();
    cmd_spectrum->add_option("--name", spc.name, "Output file stem")->capture_default_str();
    spc.mfdfa.attach(cmd_spectrum);

    CompareArgs cmp;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Rank subtopic spectra by similarity to the main spectrum");
    cmd_compare->add_option("main", cmp.main_spectrum_path, "Main stream spectrum CSV")->required();
    cmd_compare->add_option("dir", cmp.spectra_dir, "Directory of subtopic spectrum files")
        ->required();
    cmd_compare->add_option("--out", cmp.out_dir, "Output directory")->required();

    SimulateArgs sim;
    CLI::App* cmd_simulate =
        app.add_subcommand("simulate", "Generate a labeled synthetic corpus with ground truth");
    cmd_simulate->add_option("--out", sim.out_dir, "Output directory")->required();
    cmd_simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    cmd_simulate->add_option("--days", sim.days, "Number of days")->capture_default_str();
    cmd_simulate->add_option("--start-day", sim.start_day, "First day (YYYY-MM-DD)")
        ->capture_default_str();
    cmd_simulate->add_option("--subtopic", sim.subtopic_specs,
                             "name:intensity[:partner:fraction], repeatable");
    cmd_simulate->add_option("--background", sim.background, "Unmatched documents per day")
        ->capture_default_str();
    cmd_simulate->add_option("--base-total", sim.base_total, "Scanner totals baseline")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (cmd_decompose->parsed()) {
            return run_decompose(dec);
        }
        if (cmd_spectrum->parsed()) {
            return run_spectrum(spc);
        }
        if (cmd_compare->parsed()) {
            return run_compare(cmp);
        }
        if (cmd_simulate->parsed()) {
            return run_simulate(sim);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    } catch (const mfstream::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const mfstream::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return 0;
}
