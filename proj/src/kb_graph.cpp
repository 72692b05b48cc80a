#include "exposure/kb_graph.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>
#include <tuple>

#include "exposure/errors.hpp"
#include "json_util.hpp"

namespace exposure {

using detail::json;

NodeId::NodeId(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) throw SchemaError("invalid node id '" + value_ + "'");
}

bool NodeId::is_valid(std::string_view text) {
    if (text.empty()) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '.' || c == '_' || c == '-';
    });
}

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kNodeKindNames{
    "Technique", "Tactic", "Countermeasure", "Ioc", "Technology", "Incident"};
constexpr std::array<std::string_view, kEdgeKindCount> kEdgeKindNames{
    "Mitigates", "Detects", "Indicates", "Targets", "UsesVector", "ObservedIn"};
constexpr std::array<std::string_view, 3> kSeverityNames{"Low", "Medium", "High"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

std::string edge_locus(const KbEdge& e) {
    return "edge:" + e.src.str() + "->" + e.dst.str() + ":" + std::string(to_string(e.kind));
}

bool edge_less(const KbEdge& a, const KbEdge& b) {
    return std::tie(a.src, a.kind, a.dst) < std::tie(b.src, b.kind, b.dst);
}

}  // namespace

std::string_view to_string(NodeKind kind) { return kNodeKindNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(EdgeKind kind) { return kEdgeKindNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(Severity s) { return kSeverityNames[static_cast<std::size_t>(s)]; }

std::optional<NodeKind> parse_node_kind(std::string_view text) {
    return lookup<NodeKind>(kNodeKindNames, text);
}
std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
    return lookup<EdgeKind>(kEdgeKindNames, text);
}
std::optional<Severity> parse_severity(std::string_view text) {
    return lookup<Severity>(kSeverityNames, text);
}

EdgeSignature signature_of(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::Mitigates: return {NodeKind::Countermeasure, NodeKind::Technique};
        case EdgeKind::Detects: return {NodeKind::Countermeasure, NodeKind::Ioc};
        case EdgeKind::Indicates: return {NodeKind::Ioc, NodeKind::Technique};
        case EdgeKind::Targets: return {NodeKind::Technique, NodeKind::Technology};
        case EdgeKind::UsesVector: return {NodeKind::Technique, std::nullopt};
        case EdgeKind::ObservedIn: return {NodeKind::Technique, NodeKind::Incident};
    }
    return {NodeKind::Technique, std::nullopt};
}

// ---------------------------------------------------------------------------
// Parsing

KbDocument parse_kb_document(std::string_view text) {
    using namespace detail;
    const json root = parse_json(text);
    require_object(root, "KB document");
    check_keys(root, {"version", "nodes", "edges"}, "KB document");

    KbDocument doc;
    if (!root.contains("version")) throw SchemaError("KB document: missing 'version'");
    if (!root["version"].is_number_integer() || root["version"].get<int>() != 1)
        throw SchemaError("KB document: unsupported version (expected 1)");

    if (root.contains("nodes")) {
        const auto& nodes = require_array(root["nodes"], "nodes");
        doc.nodes.reserve(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::string where = "nodes[" + std::to_string(i) + "]";
            const auto& n = require_object(nodes[i], where);
            check_keys(n, {"id", "kind", "name", "attributes", "severity", "description"}, where);
            if (!n.contains("id") || !n.contains("kind"))
                throw SchemaError(where + ": 'id' and 'kind' are required");

            KbNode node;
            const std::string id = get_string(n["id"], where + ".id");
            if (!NodeId::is_valid(id)) throw SchemaError(where + ": invalid node id '" + id + "'");
            node.id = NodeId(id);
            const std::string kind = get_string(n["kind"], where + ".kind");
            auto k = parse_node_kind(kind);
            if (!k) throw SchemaError(where + ": unknown node kind '" + kind + "'");
            node.kind = *k;
            if (n.contains("name")) node.name = get_string(n["name"], where + ".name");
            if (n.contains("attributes")) {
                const auto& attrs = require_array(n["attributes"], where + ".attributes");
                for (const auto& a : attrs) {
                    const std::string name = get_string(a, where + ".attributes");
                    auto tag = parse_attribute(name);
                    if (!tag) throw SchemaError(where + ": unknown attribute '" + name + "'");
                    node.attributes.insert(*tag);
                }
            }
            if (n.contains("severity")) {
                const std::string s = get_string(n["severity"], where + ".severity");
                auto sev = parse_severity(s);
                if (!sev) throw SchemaError(where + ": unknown severity '" + s + "'");
                node.severity = *sev;
            }
            if (n.contains("description"))
                node.description = get_string(n["description"], where + ".description");
            doc.nodes.push_back(std::move(node));
        }
    }

    if (root.contains("edges")) {
        const auto& edges = require_array(root["edges"], "edges");
        doc.edges.reserve(edges.size());
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const std::string where = "edges[" + std::to_string(i) + "]";
            const auto& e = require_object(edges[i], where);
            check_keys(e, {"src", "dst", "kind"}, where);
            if (!e.contains("src") || !e.contains("dst") || !e.contains("kind"))
                throw SchemaError(where + ": 'src', 'dst' and 'kind' are required");
            const std::string src = get_string(e["src"], where + ".src");
            const std::string dst = get_string(e["dst"], where + ".dst");
            const std::string kind = get_string(e["kind"], where + ".kind");
            if (!NodeId::is_valid(src)) throw SchemaError(where + ": invalid src '" + src + "'");
            if (!NodeId::is_valid(dst)) throw SchemaError(where + ": invalid dst '" + dst + "'");
            auto k = parse_edge_kind(kind);
            if (!k) throw SchemaError(where + ": unknown edge kind '" + kind + "'");
            doc.edges.push_back(KbEdge{NodeId(src), NodeId(dst), *k});
        }
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<ValidationIssue> validate_kb(const KbDocument& doc) {
    std::vector<ValidationIssue> issues;
    auto error = [&](std::string code, std::string locus, std::string message) {
        issues.push_back({IssueSeverity::Error, std::move(code), std::move(locus), std::move(message)});
    };

    std::map<NodeId, const KbNode*> by_id;
    for (const auto& n : doc.nodes) {
        const std::string locus = "node:" + n.id.str();
        if (!by_id.emplace(n.id, &n).second) {
            error("duplicate_node", locus, "duplicate node id '" + n.id.str() + "'");
            continue;
        }
        if (n.severity && n.kind != NodeKind::Technique)
            error("severity_on_non_technique", locus, "severity is only allowed on Technique nodes");
        if (!n.attributes.empty() && n.kind != NodeKind::Technique &&
            n.kind != NodeKind::Countermeasure)
            error("attributes_on_wrong_kind", locus,
                  "attributes are only allowed on Countermeasure and Technique nodes");
    }

    std::set<std::tuple<NodeId, NodeId, EdgeKind>> seen;
    std::set<NodeId> referencing_controls;
    for (const auto& e : doc.edges) {
        const std::string locus = edge_locus(e);
        const auto sig = signature_of(e.kind);
        const auto src = by_id.find(e.src);
        bool endpoints_ok = true;
        if (src == by_id.end()) {
            error("dangling_endpoint", locus, "edge references missing node '" + e.src.str() + "'");
            endpoints_ok = false;
        }
        if (sig.dst && by_id.find(e.dst) == by_id.end()) {
            error("dangling_endpoint", locus, "edge references missing node '" + e.dst.str() + "'");
            endpoints_ok = false;
        }
        if (sig.dst && e.src == e.dst) error("self_loop", locus, "self-loop edge");
        if (endpoints_ok) {
            bool ok = src->second->kind == sig.src;
            if (sig.dst) ok = ok && by_id.at(e.dst)->kind == *sig.dst;
            if (!ok) error("edge_signature", locus, "edge signature violation");
        }
        if (!seen.emplace(e.src, e.dst, e.kind).second)
            error("duplicate_edge", locus, "duplicate edge");
        if (e.kind == EdgeKind::Mitigates || e.kind == EdgeKind::Detects)
            referencing_controls.insert(e.src);
    }

    for (const auto& [id, node] : by_id) {
        if (node->kind == NodeKind::Countermeasure && !referencing_controls.count(id))
            issues.push_back({IssueSeverity::Warning, "unreferenced_countermeasure", "node:" + id.str(),
                              "unreferenced countermeasure"});
    }
    return issues;
}

std::vector<ValidationIssue> validate_kb(const KnowledgeGraph& graph) {
    return validate_kb(graph.to_document());
}

// ---------------------------------------------------------------------------
// Graph

KnowledgeGraph KnowledgeGraph::from_document(KbDocument doc) {
    for (const auto& issue : validate_kb(doc)) {
        if (issue.severity != IssueSeverity::Error) continue;
        const std::string what = issue.message + " at " + issue.locus;
        if (issue.code == "edge_signature" || issue.code == "severity_on_non_technique" ||
            issue.code == "attributes_on_wrong_kind")
            throw SchemaError(what);
        throw IntegrityError(what);
    }

    KnowledgeGraph g;
    g.nodes_ = std::move(doc.nodes);
    g.edges_ = std::move(doc.edges);
    std::sort(g.nodes_.begin(), g.nodes_.end(),
              [](const KbNode& a, const KbNode& b) { return a.id < b.id; });
    std::sort(g.edges_.begin(), g.edges_.end(), edge_less);

    g.index_.reserve(g.nodes_.size());
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        g.index_.emplace(g.nodes_[i].id.str(), i);
        ++g.node_counts_[static_cast<std::size_t>(g.nodes_[i].kind)];
    }
    for (auto& adj : g.out_) adj.assign(g.nodes_.size(), {});
    for (auto& adj : g.in_) adj.assign(g.nodes_.size(), {});
    for (std::size_t i = 0; i < g.edges_.size(); ++i) {
        const auto& e = g.edges_[i];
        const auto k = static_cast<std::size_t>(e.kind);
        ++g.edge_counts_[k];
        g.out_[k][g.index_.at(e.src.str())].push_back(static_cast<std::uint32_t>(i));
        if (signature_of(e.kind).dst)
            g.in_[k][g.index_.at(e.dst.str())].push_back(static_cast<std::uint32_t>(i));
    }
    return g;
}

std::optional<std::size_t> KnowledgeGraph::index_of(const NodeId& id) const {
    auto it = index_.find(id.str());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const KbNode* KnowledgeGraph::find(const NodeId& id) const {
    auto idx = index_of(id);
    return idx ? &nodes_[*idx] : nullptr;
}

std::span<const std::uint32_t> KnowledgeGraph::out_edges(const NodeId& id, EdgeKind kind) const {
    auto idx = index_of(id);
    if (!idx) return {};
    return out_[static_cast<std::size_t>(kind)][*idx];
}

std::span<const std::uint32_t> KnowledgeGraph::in_edges(const NodeId& id, EdgeKind kind) const {
    auto idx = index_of(id);
    if (!idx) return {};
    return in_[static_cast<std::size_t>(kind)][*idx];
}

KbDocument KnowledgeGraph::to_document() const {
    return KbDocument{1, nodes_, edges_};
}

KnowledgeGraph load_kb(std::string_view text) {
    return KnowledgeGraph::from_document(parse_kb_document(text));
}

KnowledgeGraph load_kb(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_kb(buffer.str());
}

std::string serialize_kb(const KnowledgeGraph& graph) {
    json nodes = json::array();
    for (const auto& n : graph.nodes()) {
        json j{{"id", n.id.str()}, {"kind", to_string(n.kind)}, {"name", n.name}};
        if (!n.attributes.empty()) {
            json attrs = json::array();
            for (auto a : n.attributes) attrs.push_back(to_string(a));
            j["attributes"] = std::move(attrs);
        }
        if (n.severity) j["severity"] = to_string(*n.severity);
        if (n.description) j["description"] = *n.description;
        nodes.push_back(std::move(j));
    }
    json edges = json::array();
    for (const auto& e : graph.edges())
        edges.push_back({{"src", e.src.str()}, {"dst", e.dst.str()}, {"kind", to_string(e.kind)}});
    json root{{"version", 1}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Queries

double ControlWeightTable::weight(const NodeId& control) const {
    auto it = weights.find(control);
    return it == weights.end() ? 0.0 : it->second;
}

ControlWeightTable control_weights(const KnowledgeGraph& graph) {
    ControlWeightTable table;
    for (const auto& n : graph.nodes()) {
        if (n.kind != NodeKind::Countermeasure) continue;
        const std::size_t refs = graph.out_edges(n.id, EdgeKind::Mitigates).size() +
                                 graph.out_edges(n.id, EdgeKind::Detects).size();
        table.references.emplace(n.id, refs);
        table.total_references += refs;
    }
    if (table.total_references == 0)
        throw EmptyMappingError("no countermeasure has a Mitigates or Detects reference");
    const double total = static_cast<double>(table.total_references);
    for (const auto& [id, refs] : table.references)
        table.weights.emplace(id, static_cast<double>(refs) / total);
    return table;
}

NodeIdSet techniques_for_baseline(const KnowledgeGraph& graph, const NodeIdSet& baseline) {
    for (const auto& tech : baseline) {
        const KbNode* node = graph.find(tech);
        if (!node || node->kind != NodeKind::Technology)
            throw UnknownNodeError("baseline id '" + tech.str() + "' is not a Technology node");
    }
    NodeIdSet out;
    for (const auto& tech : baseline) {
        for (auto idx : graph.in_edges(tech, EdgeKind::Targets)) out.insert(graph.edges()[idx].src);
    }
    return out;
}

std::map<NodeId, NodeIdSet> countermeasures_for(const KnowledgeGraph& graph,
                                                const NodeIdSet& techniques) {
    for (const auto& t : techniques) {
        const KbNode* node = graph.find(t);
        if (!node || node->kind != NodeKind::Technique)
            throw UnknownNodeError("id '" + t.str() + "' is not a Technique node");
    }
    std::map<NodeId, NodeIdSet> out;
    for (const auto& t : techniques) {
        for (auto idx : graph.in_edges(t, EdgeKind::Mitigates)) out[graph.edges()[idx].src].insert(t);
    }
    return out;
}

NodeIdSet mitigators_of(const KnowledgeGraph& graph, const NodeId& technique) {
    NodeIdSet out;
    for (auto idx : graph.in_edges(technique, EdgeKind::Mitigates)) out.insert(graph.edges()[idx].src);
    return out;
}

}  // namespace exposure
