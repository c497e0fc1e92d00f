#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfstream/date.hpp"
#include "mfstream/series.hpp"

namespace mfstream {

/// One timestamped publication.
struct Document {
    std::string id;  // nonempty, unique within a corpus
    Day date;
    std::string text;

    friend bool operator==(const Document&, const Document&) = default;
};

/// An ordered document collection with its (contiguous) day range. Days with
/// zero documents are legal. Immutable once loaded; safe to share across
/// threads.
struct DocumentSet {
    std::vector<Document> docs;  // input order preserved
    DayRange date_range;

    std::size_t size() const { return docs.size(); }

    friend bool operator==(const DocumentSet&, const DocumentSet&) = default;
};

/// Per-day totals of all documents scanned by the monitoring system,
/// used to turn count series into relative rates.
struct DailyTotals {
    Day start_day;
    std::vector<std::int64_t> counts;  // one per day, every value >= 1

    std::size_t size() const { return counts.size(); }

    DayRange range() const {
        return {start_day, start_day + (static_cast<std::int64_t>(counts.size()) - 1)};
    }

    friend bool operator==(const DailyTotals&, const DailyTotals&) = default;
};

struct CorpusLoadStats {
    std::size_t dropped_out_of_range = 0;
};

/// Loads a UTF-8 JSON-lines corpus: one object per line with exactly the keys
/// `id` (string), `date` ("YYYY-MM-DD"), `text` (string).
///
/// When `analysis_range` is given, documents outside it are dropped and
/// counted in `stats`; otherwise the range is [min date, max date] over the
/// file. Throws InputError on malformed lines (with line number), duplicate
/// ids, or an empty corpus.
DocumentSet load_corpus(const std::filesystem::path& path,
                        const std::optional<DayRange>& analysis_range = std::nullopt,
                        CorpusLoadStats* stats = nullptr);

/// Writes a DocumentSet in the same JSON-lines format load_corpus reads.
void save_corpus(const DocumentSet& corpus, const std::filesystem::path& path);

/// Loads a UTF-8 CSV with header `date,count`. Every day of `range` must be
/// present with a count >= 1; rows outside the range are ignored.
DailyTotals load_daily_totals(const std::filesystem::path& path, const DayRange& range);

void save_daily_totals(const DailyTotals& totals, const std::filesystem::path& path);

/// Per-day document counts over the corpus day range.
DailySeries daily_counts(const DocumentSet& corpus);

}  // namespace mfstream
