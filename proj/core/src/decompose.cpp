#include "mfstream/decompose.hpp"

#include <algorithm>
#include <unordered_set>

#include "mfstream/errors.hpp"

namespace mfstream {

namespace {

// Word characters: ASCII letters and digits, plus any non-ASCII code point
// outside the common Unicode punctuation and space blocks below. Case folding
// is ASCII-only, so matching stays byte-deterministic in every language.
bool is_ascii_word(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_unicode_boundary(char32_t cp) {
    return (cp >= 0x0080 && cp <= 0x00BF)    // C1 controls, Latin-1 punctuation
           || cp == 0x00D7 || cp == 0x00F7   // multiplication/division signs
           || (cp >= 0x2000 && cp <= 0x206F)  // general punctuation: dashes, quotes, ellipsis
           || (cp >= 0x2E00 && cp <= 0x2E7F)  // supplemental punctuation
           || (cp >= 0x3000 && cp <= 0x303F)  // CJK symbols and punctuation
           || (cp >= 0xFE10 && cp <= 0xFE6F)  // vertical/compat forms, small punctuation
           || (cp >= 0xFF01 && cp <= 0xFF0F)  // fullwidth punctuation
           || (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
           (cp >= 0xFF5B && cp <= 0xFF65);
}

char fold(unsigned char c) {
    if (c >= 'A' && c <= 'Z') {
        return static_cast<char>(c - 'A' + 'a');
    }
    return static_cast<char>(c);
}

struct DecodedChar {
    char32_t code_point = 0;
    std::size_t length = 1;
    bool valid = false;
};

DecodedChar decode_utf8(std::string_view text, std::size_t pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char lead = byte(pos);
    std::size_t length = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        return {lead, 1, true};
    }
    if (lead >= 0xC2 && lead <= 0xDF) {
        length = 2;
        cp = lead & 0x1Fu;
    } else if (lead >= 0xE0 && lead <= 0xEF) {
        length = 3;
        cp = lead & 0x0Fu;
    } else if (lead >= 0xF0 && lead <= 0xF4) {
        length = 4;
        cp = lead & 0x07u;
    } else {
        return {lead, 1, false};
    }
    if (pos + length > text.size()) {
        return {lead, 1, false};
    }
    for (std::size_t i = 1; i < length; ++i) {
        const unsigned char continuation = byte(pos + i);
        if (continuation < 0x80 || continuation > 0xBF) {
            return {lead, 1, false};
        }
        cp = (cp << 6) | (continuation & 0x3Fu);
    }
    return {cp, length, true};
}

// Maximal runs of word characters, ASCII-folded, raw bytes otherwise.
std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const DecodedChar decoded = decode_utf8(text, pos);
        bool word;
        if (decoded.code_point < 0x80) {
            word = is_ascii_word(static_cast<unsigned char>(decoded.code_point));
        } else {
            // invalid UTF-8 bytes are kept as word constituents
            word = !decoded.valid || !is_unicode_boundary(decoded.code_point);
        }
        if (word) {
            for (std::size_t i = 0; i < decoded.length; ++i) {
                current.push_back(fold(static_cast<unsigned char>(text[pos + i])));
            }
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
        pos += decoded.length;
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

using Phrase = std::vector<std::string>;

struct CompiledQuery {
    std::string name;
    std::vector<Phrase> phrases;
};

std::vector<CompiledQuery> compile_queries(const std::vector<SubtopicQuery>& queries) {
    validate_queries(queries);
    std::vector<CompiledQuery> compiled;
    compiled.reserve(queries.size());
    for (const SubtopicQuery& query : queries) {
        CompiledQuery cq{query.name, {}};
        for (const std::string& keyword : query.keywords) {
            cq.phrases.push_back(tokenize(keyword));
        }
        compiled.push_back(std::move(cq));
    }
    return compiled;
}

bool contains_phrase(const std::vector<std::string>& tokens, const Phrase& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) {
        return false;
    }
    const std::size_t last_start = tokens.size() - phrase.size();
    for (std::size_t start = 0; start <= last_start; ++start) {
        bool match = true;
        for (std::size_t i = 0; i < phrase.size(); ++i) {
            if (tokens[start + i] != phrase[i]) {
                match = false;
                break;
            }
        }
        if (match) {
            return true;
        }
    }
    return false;
}

bool matches(const std::vector<std::string>& tokens, const CompiledQuery& query) {
    return std::any_of(query.phrases.begin(), query.phrases.end(),
                       [&](const Phrase& p) { return contains_phrase(tokens, p); });
}

DailySeries zero_series(const DayRange& range) {
    return DailySeries{range.first, std::vector<double>(static_cast<std::size_t>(range.length()))};
}

}  // namespace

void validate_queries(const std::vector<SubtopicQuery>& queries) {
    std::unordered_set<std::string> names;
    for (const SubtopicQuery& query : queries) {
        if (query.name.empty()) {
            throw InputError("subtopic with empty name");
        }
        if (!names.insert(query.name).second) {
            throw InputError("duplicate subtopic name \"" + query.name + "\"");
        }
        if (query.keywords.empty()) {
            throw InputError("subtopic \"" + query.name + "\" has no keywords");
        }
        for (const std::string& keyword : query.keywords) {
            if (tokenize(keyword).empty()) {
                throw InputError("subtopic \"" + query.name + "\" has an empty keyword phrase");
            }
        }
    }
}

std::set<std::string> match_subtopics(const Document& doc,
                                      const std::vector<SubtopicQuery>& queries) {
    const auto compiled = compile_queries(queries);
    const auto tokens = tokenize(doc.text);
    std::set<std::string> matched;
    for (const CompiledQuery& query : compiled) {
        if (matches(tokens, query)) {
            matched.insert(query.name);
        }
    }
    return matched;
}

DecompositionResult build_decomposition(const DocumentSet& corpus,
                                        const std::vector<SubtopicQuery>& queries) {
    if (corpus.docs.empty()) {
        throw InputError("empty corpus");
    }
    const auto compiled = compile_queries(queries);
    const DayRange range = corpus.date_range;

    DecompositionResult result;
    result.main = zero_series(range);
    result.other = zero_series(range);
    result.duplicates = zero_series(range);
    for (const CompiledQuery& query : compiled) {
        result.per_subtopic.emplace(query.name, zero_series(range));
        result.per_subtopic_doc_counts.emplace(query.name, 0);
    }

    for (const Document& doc : corpus.docs) {
        if (!range.contains(doc.date)) {
            throw InputError("document \"" + doc.id + "\" outside the corpus date range");
        }
        const auto t = static_cast<std::size_t>(doc.date - range.first);
        const auto tokens = tokenize(doc.text);

        result.main.values[t] += 1.0;
        int matched = 0;
        for (const CompiledQuery& query : compiled) {
            if (matches(tokens, query)) {
                ++matched;
                result.per_subtopic[query.name].values[t] += 1.0;
                ++result.per_subtopic_doc_counts[query.name];
            }
        }
        if (matched == 0) {
            result.other.values[t] += 1.0;
        } else if (matched > 1) {
            result.duplicates.values[t] += static_cast<double>(matched - 1);
        }
    }
    result.total_docs = static_cast<std::int64_t>(corpus.docs.size());
    return result;
}

std::vector<std::pair<std::string, double>> contribution_coefficients(
    const DecompositionResult& result) {
    if (result.total_docs < 1) {
        throw InputError("empty decomposition: no documents");
    }
    std::vector<std::pair<std::string, double>> coefficients;
    coefficients.reserve(result.per_subtopic_doc_counts.size());
    for (const auto& [name, count] : result.per_subtopic_doc_counts) {
        coefficients.emplace_back(name, static_cast<double>(count) /
                                            static_cast<double>(result.total_docs));
    }
    std::sort(coefficients.begin(), coefficients.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    return coefficients;
}

DailySeries normalize_series(const DailySeries& counts, const DailyTotals& totals) {
    if (counts.size() != totals.size() || counts.start_day != totals.start_day) {
        throw InputError("series and totals cover different days");
    }
    DailySeries rates{counts.start_day, std::vector<double>(counts.size())};
    for (std::size_t t = 0; t < counts.size(); ++t) {
        rates.values[t] = counts.values[t] / static_cast<double>(totals.counts[t]);
    }
    return rates;
}

DailySeries contribution_series(const DailySeries& sub, const DailySeries& main) {
    if (sub.size() != main.size() || sub.start_day != main.start_day) {
        throw InputError("subtopic and main series cover different days");
    }
    DailySeries p{sub.start_day, std::vector<double>(sub.size())};
    for (std::size_t t = 0; t < sub.size(); ++t) {
        if (sub.values[t] > main.values[t]) {
            throw InputError("subtopic count exceeds main count on day " +
                             (sub.start_day + static_cast<std::int64_t>(t)).to_string());
        }
        p.values[t] = main.values[t] == 0.0 ? 0.0 : sub.values[t] / main.values[t];
    }
    return p;
}

ReducedStream reduced_stream(const DecompositionResult& result, const DocumentSet& corpus,
                             const std::vector<SubtopicQuery>& queries, int k_prime,
                             double threshold) {
    const int k = static_cast<int>(queries.size());
    if (k_prime < 1 || k_prime > k) {
        throw InputError("k_prime " + std::to_string(k_prime) + " out of range [1, " +
                         std::to_string(k) + "]");
    }
    if (result.total_docs != static_cast<std::int64_t>(corpus.docs.size())) {
        throw InputError("decomposition does not match the corpus");
    }

    // Largest N_i first, ties broken lexicographically by name.
    std::vector<std::string> order;
    order.reserve(result.per_subtopic_doc_counts.size());
    for (const auto& [name, count] : result.per_subtopic_doc_counts) {
        order.push_back(name);
    }
    std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        const auto na = result.per_subtopic_doc_counts.at(a);
        const auto nb = result.per_subtopic_doc_counts.at(b);
        if (na != nb) {
            return na > nb;
        }
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k_prime));

    std::vector<SubtopicQuery> selected_queries;
    for (const SubtopicQuery& query : queries) {
        if (std::find(order.begin(), order.end(), query.name) != order.end()) {
            selected_queries.push_back(query);
        }
    }
    const auto compiled = compile_queries(selected_queries);

    std::int64_t distinct = 0;
    for (const Document& doc : corpus.docs) {
        const auto tokens = tokenize(doc.text);
        for (const CompiledQuery& query : compiled) {
            if (matches(tokens, query)) {
                ++distinct;
                break;
            }
        }
    }

    ReducedStream reduced;
    reduced.selected = std::move(order);
    reduced.distinct_doc_count = distinct;
    reduced.coverage =
        static_cast<double>(distinct) / static_cast<double>(result.total_docs);
    reduced.sufficient = reduced.coverage >= threshold;
    return reduced;
}

}  // namespace mfstream
