#include "exposure/clustering.hpp"

#include <algorithm>
#include <set>

#include "exposure/errors.hpp"

namespace exposure {

namespace {

constexpr std::size_t kTopTerms = 10;

std::vector<TermScore> top_terms_of(const TfIdfMatrix& m, const std::vector<std::size_t>& docs) {
    std::vector<TermScore> scores;
    for (std::size_t t = 0; t < m.vocabulary.size(); ++t) {
        double sum = 0.0;
        for (std::size_t d : docs) sum += m.rows(d, t);
        if (sum > 0.0) scores.push_back({m.vocabulary[t], sum / static_cast<double>(docs.size())});
    }
    std::sort(scores.begin(), scores.end(), [](const TermScore& a, const TermScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (scores.size() > kTopTerms) scores.resize(kTopTerms);
    return scores;
}

}  // namespace

const std::map<Variable, std::vector<std::string>>& variable_lexicon() {
    static const std::map<Variable, std::vector<std::string>> lexicon = {
        {Variable::Exposure,
         {"exposure", "exposed", "port", "ports", "public", "internet", "scan", "scanning", "open", "perimeter",
          "ip", "rdp", "ssh", "firewall", "listening", "reachable"}},
        {Variable::Traceability,
         {"log", "logs", "logging", "audit", "auditing", "trace", "traces", "traceability", "authentication",
          "monitoring", "siem", "correlation", "forensic", "telemetry", "visibility", "unlogged"}},
        {Variable::Motivation,
         {"ransom", "ransomware", "value", "valuable", "market", "extortion", "financial", "payment", "motive",
          "profit", "bitcoin", "espionage", "reputation", "leak", "leaked", "harm"}},
        {Variable::SystemsUpdate,
         {"patch", "patches", "patching", "patched", "unpatched", "update", "updates", "updated", "outdated",
          "legacy", "version", "versions", "obsolete", "firmware", "upgrade", "cve"}},
    };
    return lexicon;
}

std::optional<Variable> suggest_variable(const std::vector<TermScore>& top_terms) {
    std::optional<Variable> best;
    double best_mass = 0.0;
    for (const auto& [variable, words] : variable_lexicon()) {
        double mass = 0.0;
        for (const auto& ts : top_terms) {
            if (std::find(words.begin(), words.end(), ts.term) != words.end()) mass += ts.score;
        }
        if (mass > best_mass) {
            best_mass = mass;
            best = variable;
        }
    }
    return best;
}

ClusterReport cluster_incidents(const Corpus& corpus, const ClusterConfig& config) {
    if (corpus.documents.empty()) throw EmptyCorpusError("corpus has no documents");
    if (config.k_min < 1 || config.k_max < config.k_min) throw DimensionError("invalid k range");

    const TfIdfMatrix m = tfidf(corpus, config.stopwords);
    const std::size_t n = m.rows.rows();

    ClusterReport report;
    report.documents = n;
    report.vocabulary_size = m.vocabulary.size();
    report.seed = config.seed;

    Matrix features = m.rows;
    if (n >= 2) {
        const std::size_t k = std::clamp<std::size_t>(config.pca_k, 1, std::min(n, m.vocabulary.size()));
        const PcaModel pca = pca_fit(m.rows, k);
        features = pca_transform(pca, m.rows);
        report.pca_dimensions = k;
        report.pca_eigenvalues = pca.eigenvalues;
    }

    const std::size_t k_min = std::min(config.k_min, n);
    const std::size_t k_max = std::min(config.k_max, n);
    KSelection sel = select_k_detailed(features, k_min, k_max, config.seed);
    report.k = sel.k;
    report.k_candidates = sel.candidates;
    report.k_inertia = sel.best_inertia;
    const KMeansModel& model = sel.best_models[sel.k - k_min];

    // Relabel clusters in order of their first document.
    std::vector<std::size_t> relabel(model.k, model.k);
    std::size_t next = 0;
    for (std::size_t label : model.assignments) {
        if (relabel[label] == model.k) relabel[label] = next++;
    }
    std::vector<std::vector<std::size_t>> members(next);
    for (std::size_t d = 0; d < n; ++d) members[relabel[model.assignments[d]]].push_back(d);

    for (std::size_t c = 0; c < members.size(); ++c) {
        IncidentCluster cluster;
        cluster.index = c;
        for (std::size_t d : members[c]) {
            cluster.incident_ids.push_back(m.doc_ids[d]);
            for (const auto& t : corpus.documents[d].technique_refs) ++cluster.technique_histogram[t];
        }
        cluster.top_terms = top_terms_of(m, members[c]);
        cluster.suggested_variable = suggest_variable(cluster.top_terms);
        report.clusters.push_back(std::move(cluster));
    }
    return report;
}

}  // namespace exposure
