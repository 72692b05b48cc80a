#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exposure/kmeans.hpp"
#include "exposure/metrics.hpp"
#include "exposure/pca.hpp"
#include "exposure/text.hpp"

namespace exposure {

struct ClusterConfig {
    std::size_t k_min = 1;
    std::size_t k_max = 8;
    std::size_t pca_k = 10;  // clamped to what the corpus supports
    StopWords stopwords;
    std::uint64_t seed = 42;
};

struct TermScore {
    std::string term;
    double score = 0.0;  // mean TF-IDF over the cluster's documents
};

struct IncidentCluster {
    std::size_t index = 0;
    std::vector<std::string> incident_ids;
    std::vector<TermScore> top_terms;  // at most 10
    std::map<NodeId, std::size_t> technique_histogram;
    std::optional<Variable> suggested_variable;

    std::size_t size() const { return incident_ids.size(); }
};

struct ClusterReport {
    std::size_t k = 0;
    std::size_t documents = 0;
    std::size_t vocabulary_size = 0;
    std::size_t pca_dimensions = 0;  // 0 when PCA was skipped (single document)
    std::vector<double> pca_eigenvalues;
    std::vector<std::size_t> k_candidates;
    std::vector<double> k_inertia;
    std::uint64_t seed = 0;
    std::vector<IncidentCluster> clusters;  // ordered by their first document
};

// Keyword lexicon used to suggest which variable a cluster describes.
const std::map<Variable, std::vector<std::string>>& variable_lexicon();

// Chooses the variable whose lexicon terms carry the most top-term score;
// nullopt when no top term is in any lexicon.
std::optional<Variable> suggest_variable(const std::vector<TermScore>& top_terms);

// tfidf -> pca_fit/transform -> select_k -> kmeans -> report.
ClusterReport cluster_incidents(const Corpus& corpus, const ClusterConfig& config = {});

}  // namespace exposure
