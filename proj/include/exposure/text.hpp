#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/kb_graph.hpp"
#include "exposure/matrix.hpp"

namespace exposure {

struct IncidentDocument {
    std::string incident_id;
    std::string description;
    NodeIdSet technique_refs;
    std::optional<Severity> severity;
    std::optional<std::string> attack_vector;
    std::vector<std::string> affected_assets;
    std::optional<std::string> timestamp;  // ISO-8601, kept verbatim
};

struct Corpus {
    std::vector<IncidentDocument> documents;
};

using StopWords = std::set<std::string>;

// JSON list of incident documents. Throws SyntaxError or SchemaError.
Corpus parse_corpus(std::string_view text);

// One term per line; blank lines and '#' comments ignored; lowercased.
StopWords parse_stopwords(std::string_view text);

// Lowercases, splits on every non-alphanumeric code point, drops terms
// shorter than two code points and stop words. Order is preserved.
std::vector<std::string> tokenize(std::string_view text, const StopWords& stopwords = {});

struct TfIdfMatrix {
    std::vector<std::string> vocabulary;  // sorted lexicographically
    std::vector<std::string> doc_ids;
    Matrix rows;                          // documents x vocabulary
    std::vector<double> idf;              // aligned with vocabulary
};

// tf(t,d) = count(t,d) / |d|, idf(t) = ln((1+N)/(1+df(t))) + 1.
// Throws EmptyCorpusError when no document has a term.
TfIdfMatrix tfidf(const Corpus& corpus, const StopWords& stopwords = {});

}  // namespace exposure
