#include "mfstream/corpus.hpp"

#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "mfstream/errors.hpp"
#include "mfstream/io.hpp"

namespace mfstream {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line_no,
                            const std::string& what) {
    throw InputError(path.string() + ": malformed line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open " + path.string());
    }
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

}  // namespace

DocumentSet load_corpus(const std::filesystem::path& path,
                        const std::optional<DayRange>& analysis_range, CorpusLoadStats* stats) {
    std::ifstream in = open_input(path);

    std::vector<Document> docs;
    std::unordered_set<std::string> seen_ids;
    CorpusLoadStats local_stats;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (record.is_discarded() || !record.is_object()) {
            malformed(path, line_no, "not a JSON object");
        }
        if (record.size() != 3 || !record.contains("id") || !record.contains("date") ||
            !record.contains("text")) {
            malformed(path, line_no, "expected exactly the keys id, date, text");
        }
        if (!record["id"].is_string() || !record["date"].is_string() ||
            !record["text"].is_string()) {
            malformed(path, line_no, "id, date and text must be strings");
        }

        Document doc;
        doc.id = record["id"].get<std::string>();
        doc.text = record["text"].get<std::string>();
        if (doc.id.empty()) {
            malformed(path, line_no, "empty id");
        }
        const auto date_str = record["date"].get<std::string>();
        if (auto day = Day::try_parse(date_str)) {
            doc.date = *day;
        } else {
            malformed(path, line_no, "invalid date \"" + date_str + "\"");
        }

        if (!seen_ids.insert(doc.id).second) {
            throw InputError(path.string() + ": duplicate document id \"" + doc.id + "\" (line " +
                             std::to_string(line_no) + ")");
        }
        if (analysis_range && !analysis_range->contains(doc.date)) {
            ++local_stats.dropped_out_of_range;
            continue;
        }
        docs.push_back(std::move(doc));
    }

    if (stats) {
        *stats = local_stats;
    }
    if (docs.empty()) {
        throw InputError(path.string() + ": empty corpus");
    }

    DayRange range;
    if (analysis_range) {
        range = *analysis_range;
    } else {
        range = {docs.front().date, docs.front().date};
        for (const Document& doc : docs) {
            range.first = std::min(range.first, doc.date);
            range.last = std::max(range.last, doc.date);
        }
    }
    return DocumentSet{std::move(docs), range};
}

void save_corpus(const DocumentSet& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    for (const Document& doc : corpus.docs) {
        json record{{"id", doc.id}, {"date", doc.date.to_string()}, {"text", doc.text}};
        out << record.dump() << '\n';
    }
}

DailyTotals load_daily_totals(const std::filesystem::path& path, const DayRange& range) {
    std::ifstream in = open_input(path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError(path.string() + ": empty totals file");
    }
    ++line_no;
    strip_cr(line);
    if (line != "date,count") {
        malformed(path, line_no, "expected header \"date,count\"");
    }

    const std::size_t n_days = static_cast<std::size_t>(range.length());
    std::vector<std::int64_t> counts(n_days, -1);

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            malformed(path, line_no, "expected date,count");
        }
        const auto day = Day::try_parse(line.substr(0, comma));
        if (!day) {
            malformed(path, line_no, "invalid date");
        }
        std::int64_t count = 0;
        const char* first = line.data() + comma + 1;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, count);
        if (ec != std::errc{} || ptr != last) {
            malformed(path, line_no, "invalid count");
        }
        if (!range.contains(*day)) {
            continue;
        }
        if (count <= 0) {
            throw InputError(path.string() + ": nonpositive count " + std::to_string(count) +
                             " for " + day->to_string() + " (line " + std::to_string(line_no) +
                             ")");
        }
        const auto index = static_cast<std::size_t>(*day - range.first);
        if (counts[index] != -1) {
            malformed(path, line_no, "duplicate date " + day->to_string());
        }
        counts[index] = count;
    }

    for (std::size_t i = 0; i < n_days; ++i) {
        if (counts[i] == -1) {
            throw InputError(path.string() + ": missing day " +
                             (range.first + static_cast<std::int64_t>(i)).to_string());
        }
    }
    return DailyTotals{range.first, std::move(counts)};
}

void save_daily_totals(const DailyTotals& totals, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path.string());
    }
    out << "date,count\n";
    for (std::size_t i = 0; i < totals.counts.size(); ++i) {
        out << (totals.start_day + static_cast<std::int64_t>(i)).to_string() << ','
            << totals.counts[i] << '\n';
    }
}

DailySeries daily_counts(const DocumentSet& corpus) {
    DailySeries series{corpus.date_range.first,
                       std::vector<double>(static_cast<std::size_t>(corpus.date_range.length()))};
    for (const Document& doc : corpus.docs) {
        series.values[static_cast<std::size_t>(doc.date - corpus.date_range.first)] += 1.0;
    }
    return series;
}

}  // namespace mfstream
