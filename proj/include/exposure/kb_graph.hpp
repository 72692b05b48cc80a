#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exposure/attributes.hpp"

namespace exposure {

// Identifier of a knowledge-base node. Matches [A-Za-z0-9._-]+, case-sensitive.
class NodeId {
public:
    NodeId() = default;
    explicit NodeId(std::string value);

    static bool is_valid(std::string_view text);

    const std::string& str() const noexcept { return value_; }

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
    friend bool operator==(const NodeId&, const NodeId&) = default;

private:
    std::string value_;
};

using NodeIdSet = std::set<NodeId>;

enum class NodeKind { Technique, Tactic, Countermeasure, Ioc, Technology, Incident };
enum class EdgeKind { Mitigates, Detects, Indicates, Targets, UsesVector, ObservedIn };
enum class Severity { Low, Medium, High };

inline constexpr std::size_t kNodeKindCount = 6;
inline constexpr std::size_t kEdgeKindCount = 6;

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
std::string_view to_string(Severity severity);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<EdgeKind> parse_edge_kind(std::string_view text);
std::optional<Severity> parse_severity(std::string_view text);

struct KbNode {
    NodeId id;
    NodeKind kind = NodeKind::Technique;
    std::string name;
    AttributeSet attributes;
    std::optional<Severity> severity;
    std::optional<std::string> description;

    friend bool operator==(const KbNode&, const KbNode&) = default;
};

// For UsesVector edges `dst` is an attack-vector label, not a node.
struct KbEdge {
    NodeId src;
    NodeId dst;
    EdgeKind kind = EdgeKind::Mitigates;

    friend bool operator==(const KbEdge&, const KbEdge&) = default;
};

// Expected (src kind, dst kind) for each edge kind. UsesVector has no
// destination node.
struct EdgeSignature {
    NodeKind src;
    std::optional<NodeKind> dst;
};
EdgeSignature signature_of(EdgeKind kind);

// Schema-checked but not yet integrity-checked KB contents.
struct KbDocument {
    int version = 1;
    std::vector<KbNode> nodes;
    std::vector<KbEdge> edges;
};

enum class IssueSeverity { Error, Warning };

struct ValidationIssue {
    IssueSeverity severity;
    std::string code;     // stable machine-readable code
    std::string locus;    // "node:<id>" or "edge:<src>-><dst>:<kind>"
    std::string message;
};

// Immutable, validated typed graph. Nodes iterate in ascending id order and
// edges in ascending (src, kind, dst) order. Safe to share between threads.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    // Throws SchemaError / IntegrityError on the first Error-severity issue.
    static KnowledgeGraph from_document(KbDocument doc);

    const std::vector<KbNode>& nodes() const noexcept { return nodes_; }
    const std::vector<KbEdge>& edges() const noexcept { return edges_; }

    const KbNode* find(const NodeId& id) const;
    bool contains(const NodeId& id) const { return find(id) != nullptr; }

    std::size_t count(NodeKind kind) const { return node_counts_[static_cast<std::size_t>(kind)]; }
    std::size_t count(EdgeKind kind) const { return edge_counts_[static_cast<std::size_t>(kind)]; }

    // Indices into edges() leaving / entering a node through edges of `kind`.
    std::span<const std::uint32_t> out_edges(const NodeId& id, EdgeKind kind) const;
    std::span<const std::uint32_t> in_edges(const NodeId& id, EdgeKind kind) const;

    KbDocument to_document() const;

private:
    using Adjacency = std::vector<std::vector<std::uint32_t>>;

    std::optional<std::size_t> index_of(const NodeId& id) const;

    std::vector<KbNode> nodes_;
    std::vector<KbEdge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::array<Adjacency, kEdgeKindCount> out_;
    std::array<Adjacency, kEdgeKindCount> in_;
    std::array<std::size_t, kNodeKindCount> node_counts_{};
    std::array<std::size_t, kEdgeKindCount> edge_counts_{};
};

struct ControlWeightTable {
    std::map<NodeId, double> weights;
    std::map<NodeId, std::size_t> references;
    std::size_t total_references = 0;

    double weight(const NodeId& control) const;
};

// Parses a KB JSON document. Throws SyntaxError or SchemaError.
KbDocument parse_kb_document(std::string_view text);

KnowledgeGraph load_kb(std::string_view text);
KnowledgeGraph load_kb(std::istream& in);

std::string serialize_kb(const KnowledgeGraph& graph);

std::vector<ValidationIssue> validate_kb(const KbDocument& doc);
std::vector<ValidationIssue> validate_kb(const KnowledgeGraph& graph);

// Weight(C) = R_C / sum R, where R counts Mitigates and Detects edges leaving C.
ControlWeightTable control_weights(const KnowledgeGraph& graph);

// Techniques with a Targets edge into any of the baseline technologies.
NodeIdSet techniques_for_baseline(const KnowledgeGraph& graph, const NodeIdSet& baseline);

// Countermeasure -> subset of `techniques` it mitigates.
std::map<NodeId, NodeIdSet> countermeasures_for(const KnowledgeGraph& graph,
                                                const NodeIdSet& techniques);

// Countermeasures with a Mitigates edge into `technique`.
NodeIdSet mitigators_of(const KnowledgeGraph& graph, const NodeId& technique);

}  // namespace exposure
