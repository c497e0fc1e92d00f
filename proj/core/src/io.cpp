#include "mfstream/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mfstream/errors.hpp"

namespace mfstream {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    return out;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& what) {
    throw InputError(path.string() + ": malformed line " + std::to_string(line_no) + ": " + what);
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

double parse_double(std::string_view text, const std::filesystem::path& path,
                    std::size_t line_no) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        malformed(path, line_no, "invalid number \"" + std::string(text) + "\"");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    json parsed = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
        throw InputError(path.string() + ": invalid JSON");
    }
    return parsed;
}

json series_to_json(const DailySeries& series) {
    json values = json::array();
    for (double v : series.values) {
        values.push_back(static_cast<std::int64_t>(v));
    }
    return values;
}

DailySeries series_from_json(const json& values, Day start_day) {
    DailySeries series{start_day, {}};
    series.values.reserve(values.size());
    for (const auto& v : values) {
        series.values.push_back(v.get<double>());
    }
    return series;
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

void write_series_csv(const DailySeries& series, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "date,value\n";
    for (std::size_t t = 0; t < series.values.size(); ++t) {
        out << (series.start_day + static_cast<std::int64_t>(t)).to_string() << ','
            << format_double(series.values[t]) << '\n';
    }
}

DailySeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError(path.string() + ": empty series file");
    }
    ++line_no;
    strip_cr(line);

    DailySeries series;
    if (line.find(',') != std::string::npos) {
        if (line != "date,value") {
            malformed(path, line_no, "expected header \"date,value\"");
        }
        bool first = true;
        while (std::getline(in, line)) {
            ++line_no;
            strip_cr(line);
            if (line.empty()) {
                continue;
            }
            const auto fields = split(line, ',');
            if (fields.size() != 2) {
                malformed(path, line_no, "expected date,value");
            }
            const auto day = Day::try_parse(fields[0]);
            if (!day) {
                malformed(path, line_no, "invalid date");
            }
            if (first) {
                series.start_day = *day;
                first = false;
            } else {
                const auto expected =
                    series.start_day + static_cast<std::int64_t>(series.values.size());
                if (*day != expected) {
                    malformed(path, line_no,
                              "dates must be consecutive days; expected " + expected.to_string());
                }
            }
            series.values.push_back(parse_double(fields[1], path, line_no));
        }
    } else {
        // Headerless value-per-line; gets a nominal 1970-01-01 start day.
        series.values.push_back(parse_double(line, path, line_no));
        while (std::getline(in, line)) {
            ++line_no;
            strip_cr(line);
            if (line.empty()) {
                continue;
            }
            series.values.push_back(parse_double(line, path, line_no));
        }
    }
    if (series.values.empty()) {
        throw InputError(path.string() + ": empty series file");
    }
    return series;
}

void write_spectrum_csv(const MultifractalSpectrum& spectrum, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "q,h,tau,alpha,f,fit_residual\n";
    for (std::size_t i = 0; i < spectrum.q.size(); ++i) {
        out << format_double(spectrum.q[i]) << ',' << format_double(spectrum.h[i]) << ','
            << format_double(spectrum.tau[i]) << ',' << format_double(spectrum.alpha[i]) << ','
            << format_double(spectrum.f[i]) << ',' << format_double(spectrum.fit_residual[i])
            << '\n';
    }
}

MultifractalSpectrum read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError(path.string() + ": empty spectrum file");
    }
    ++line_no;
    strip_cr(line);
    if (line != "q,h,tau,alpha,f,fit_residual") {
        malformed(path, line_no, "expected header \"q,h,tau,alpha,f,fit_residual\"");
    }

    MultifractalSpectrum spectrum;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 6) {
            malformed(path, line_no, "expected 6 columns");
        }
        spectrum.q.push_back(parse_double(fields[0], path, line_no));
        spectrum.h.push_back(parse_double(fields[1], path, line_no));
        spectrum.tau.push_back(parse_double(fields[2], path, line_no));
        spectrum.alpha.push_back(parse_double(fields[3], path, line_no));
        spectrum.f.push_back(parse_double(fields[4], path, line_no));
        spectrum.fit_residual.push_back(parse_double(fields[5], path, line_no));
    }
    if (spectrum.q.empty()) {
        throw InputError(path.string() + ": spectrum has no rows");
    }
    return spectrum;
}

void write_spectrum_sidecar(const SpectrumResult& result, const MfdfaConfig& config,
                            std::size_t series_length, const std::filesystem::path& path) {
    json sidecar;
    sidecar["verdict"] = result.ok() ? "ok" : "insufficient_data";
    if (!result.ok()) {
        sidecar["reason"] = result.verdict.reason;
    } else {
        sidecar["width"] = result.spectrum->width();
        sidecar["degenerate_segments"] = result.degenerate_segments;
    }
    sidecar["n"] = series_length;
    sidecar["config"] = {
        {"q_grid", config.q_grid},
        {"scales", result.ok() ? result.scales_used : config.scales},
        {"detrend_order", config.detrend_order},
        {"min_length", config.min_length},
        {"max_zero_fraction", config.max_zero_fraction},
    };
    std::ofstream out = open_output(path);
    out << sidecar.dump(2) << '\n';
}

SpectrumSidecar read_spectrum_sidecar(const std::filesystem::path& path) {
    const json sidecar = load_json(path);
    if (!sidecar.is_object() || !sidecar.contains("verdict")) {
        throw InputError(path.string() + ": not a spectrum sidecar");
    }
    SpectrumSidecar result;
    result.ok = sidecar["verdict"] == "ok";
    if (sidecar.contains("reason")) {
        result.reason = sidecar["reason"].get<std::string>();
    }
    if (sidecar.contains("width")) {
        result.width = sidecar["width"].get<double>();
    }
    if (sidecar.contains("n")) {
        result.series_length = sidecar["n"].get<std::size_t>();
    }
    return result;
}

std::vector<SubtopicQuery> load_topic_queries(const std::filesystem::path& path) {
    const json parsed = load_json(path);
    if (!parsed.is_array()) {
        throw InputError(path.string() + ": expected a JSON array of {name, keywords} entries");
    }
    std::vector<SubtopicQuery> queries;
    queries.reserve(parsed.size());
    for (const auto& entry : parsed) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("keywords") ||
            !entry["name"].is_string() || !entry["keywords"].is_array()) {
            throw InputError(path.string() + ": every entry needs a name and a keywords array");
        }
        SubtopicQuery query;
        query.name = entry["name"].get<std::string>();
        for (const auto& keyword : entry["keywords"]) {
            if (!keyword.is_string()) {
                throw InputError(path.string() + ": keywords must be strings (topic \"" +
                                 query.name + "\")");
            }
            query.keywords.push_back(keyword.get<std::string>());
        }
        queries.push_back(std::move(query));
    }
    validate_queries(queries);
    return queries;
}

void save_topic_queries(const std::vector<SubtopicQuery>& queries,
                        const std::filesystem::path& path) {
    json list = json::array();
    for (const SubtopicQuery& query : queries) {
        list.push_back({{"name", query.name}, {"keywords", query.keywords}});
    }
    std::ofstream out = open_output(path);
    out << list.dump(2) << '\n';
}

void write_ranking_csv(const RankingTable& table, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "topic,distance,valid\n";
    for (const SpectrumDistance& row : table.rows) {
        out << row.topic << ',';
        if (row.valid()) {
            // three decimals for display; the JSON twin keeps full precision
            char buf[40];
            const auto result =
                std::to_chars(buf, buf + sizeof(buf), *row.distance, std::chars_format::fixed, 3);
            out << std::string_view(buf, result.ptr);
        }
        out << ',' << (row.valid() ? "true" : "false") << '\n';
    }
}

void write_ranking_json(const RankingTable& table, const std::filesystem::path& path) {
    json list = json::array();
    for (const SpectrumDistance& row : table.rows) {
        json entry{{"topic", row.topic}, {"valid", row.valid()}};
        if (row.valid()) {
            entry["distance"] = *row.distance;
        } else {
            entry["distance"] = nullptr;
        }
        list.push_back(std::move(entry));
    }
    std::ofstream out = open_output(path);
    out << list.dump(2) << '\n';
}

void write_truth_json(const DecompositionResult& truth, std::uint64_t seed,
                      const std::filesystem::path& path) {
    json doc;
    doc["start_day"] = truth.main.start_day.to_string();
    doc["days"] = truth.main.values.size();
    doc["total_docs"] = truth.total_docs;
    doc["seed"] = seed;
    doc["subtopic_doc_counts"] = truth.per_subtopic_doc_counts;
    doc["main"] = series_to_json(truth.main);
    doc["other"] = series_to_json(truth.other);
    doc["duplicates"] = series_to_json(truth.duplicates);
    json per_subtopic = json::object();
    for (const auto& [name, series] : truth.per_subtopic) {
        per_subtopic[name] = series_to_json(series);
    }
    doc["per_subtopic"] = std::move(per_subtopic);
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
}

DecompositionResult read_truth_json(const std::filesystem::path& path) {
    const json doc = load_json(path);
    if (!doc.is_object() || !doc.contains("start_day") || !doc.contains("main")) {
        throw InputError(path.string() + ": not a truth file");
    }
    const Day start_day = Day::parse(doc["start_day"].get<std::string>());

    DecompositionResult truth;
    truth.total_docs = doc["total_docs"].get<std::int64_t>();
    truth.main = series_from_json(doc["main"], start_day);
    truth.other = series_from_json(doc["other"], start_day);
    truth.duplicates = series_from_json(doc["duplicates"], start_day);
    for (const auto& [name, counts] : doc["subtopic_doc_counts"].items()) {
        truth.per_subtopic_doc_counts[name] = counts.get<std::int64_t>();
    }
    for (const auto& [name, values] : doc["per_subtopic"].items()) {
        truth.per_subtopic[name] = series_from_json(values, start_day);
    }
    return truth;
}

}  // namespace mfstream
