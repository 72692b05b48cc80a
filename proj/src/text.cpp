#include "exposure/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "exposure/errors.hpp"
#include "json_util.hpp"
#include "utf8.hpp"

namespace exposure {

namespace {

using detail::append_utf8;

// Decodes one UTF-8 code point starting at `i`; malformed bytes decode as
// U+FFFD and consume a single byte.
std::uint32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    auto byte = [&](std::size_t k) { return static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        const std::uint32_t cp = ((b0 & 0x1Fu) << 6) | byte(1);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        const std::uint32_t cp = ((b0 & 0x0Fu) << 12) | (byte(1) << 6) | byte(2);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        const std::uint32_t cp = ((b0 & 0x07u) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
        i += 4;
        return cp;
    }
    i += 1;
    return 0xFFFD;
}

// ASCII letters and digits, plus letters of the Latin-1 Supplement, Latin
// Extended, Greek and Cyrillic blocks. Everything else separates terms.
bool is_alnum(std::uint32_t cp) {
    if (cp < 0x80) return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
    if (cp >= 0x370 && cp <= 0x52F) return cp != 0x37E && cp != 0x387;
    return false;
}

std::uint32_t to_lower(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const StopWords& stopwords) {
    std::vector<std::string> out;
    std::string term;
    std::size_t length = 0;
    auto flush = [&] {
        if (length >= 2 && !stopwords.count(term)) out.push_back(term);
        term.clear();
        length = 0;
    };
    for (std::size_t i = 0; i < text.size();) {
        const std::uint32_t cp = next_code_point(text, i);
        if (is_alnum(cp)) {
            append_utf8(term, to_lower(cp));
            ++length;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

StopWords parse_stopwords(std::string_view text) {
    StopWords out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        for (auto& t : tokenize(line.substr(first, last - first + 1))) out.insert(t);
    }
    return out;
}

Corpus parse_corpus(std::string_view text) {
    using namespace detail;
    const json root = parse_json(text);
    require_array(root, "corpus");
    Corpus corpus;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const std::string where = "corpus[" + std::to_string(i) + "]";
        const auto& d = require_object(root[i], where);
        check_keys(d, {"incident_id", "description", "technique_refs", "severity", "attack_vector", "affected_assets",
                       "timestamp"},
                   where);
        if (!d.contains("incident_id") || !d.contains("description"))
            throw SchemaError(where + ": 'incident_id' and 'description' are required");
        IncidentDocument doc;
        doc.incident_id = get_string(d["incident_id"], where + ".incident_id");
        if (!ids.insert(doc.incident_id).second)
            throw SchemaError(where + ": duplicate incident_id '" + doc.incident_id + "'");
        doc.description = get_string(d["description"], where + ".description");
        if (d.contains("technique_refs")) {
            require_array(d["technique_refs"], where + ".technique_refs");
            for (const auto& t : d["technique_refs"]) {
                const std::string id = get_string(t, where + ".technique_refs");
                if (!NodeId::is_valid(id)) throw SchemaError(where + ": invalid technique id '" + id + "'");
                doc.technique_refs.insert(NodeId(id));
            }
        }
        if (d.contains("severity")) {
            const std::string s = get_string(d["severity"], where + ".severity");
            doc.severity = parse_severity(s);
            if (!doc.severity) throw SchemaError(where + ": unknown severity '" + s + "'");
        }
        if (d.contains("attack_vector")) doc.attack_vector = get_string(d["attack_vector"], where + ".attack_vector");
        if (d.contains("affected_assets")) {
            require_array(d["affected_assets"], where + ".affected_assets");
            for (const auto& a : d["affected_assets"])
                doc.affected_assets.push_back(get_string(a, where + ".affected_assets"));
        }
        if (d.contains("timestamp")) doc.timestamp = get_string(d["timestamp"], where + ".timestamp");
        corpus.documents.push_back(std::move(doc));
    }
    return corpus;
}

TfIdfMatrix tfidf(const Corpus& corpus, const StopWords& stopwords) {
    std::vector<std::map<std::string, std::size_t>> counts;
    std::vector<std::size_t> lengths;
    std::map<std::string, std::size_t> df;
    counts.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) {
        auto& c = counts.emplace_back();
        const auto terms = tokenize(doc.description, stopwords);
        lengths.push_back(terms.size());
        for (const auto& t : terms) ++c[t];
        for (const auto& [t, n] : c) ++df[t];
    }
    if (df.empty()) throw EmptyCorpusError("corpus has no terms");

    TfIdfMatrix m;
    const double n_docs = static_cast<double>(corpus.documents.size());
    std::map<std::string, std::size_t> column;
    for (const auto& [term, freq] : df) {
        column.emplace(term, m.vocabulary.size());
        m.vocabulary.push_back(term);
        m.idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(freq))) + 1.0);
    }
    m.rows = Matrix(corpus.documents.size(), m.vocabulary.size());
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        m.doc_ids.push_back(corpus.documents[d].incident_id);
        if (lengths[d] == 0) continue;
        const double len = static_cast<double>(lengths[d]);
        for (const auto& [term, n] : counts[d]) {
            const std::size_t col = column.at(term);
            m.rows(d, col) = (static_cast<double>(n) / len) * m.idf[col];
        }
    }
    return m;
}

}  // namespace exposure
