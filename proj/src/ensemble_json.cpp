#include "xcount/ensemble.hpp"
#include "xcount/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace xcount {

namespace {

using nlohmann::json;

double finite_number(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string("malformed node: '") + what + "' must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what);
    return v;
}

std::int32_t parse_node(const json& j, std::uint32_t num_features, Tree& tree, int depth) {
    if (depth > 4096) throw ParseError("tree nesting too deep");
    if (!j.is_object()) throw ParseError("malformed node: expected an object");

    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (j.contains("value")) {
        if (j.contains("yes") || j.contains("no") || j.contains("feature")) {
            throw ParseError("malformed node: leaf carries split fields");
        }
        TreeNode& leaf = tree.nodes.back();
        leaf.value = finite_number(j["value"], "leaf value");
        try {
            leaf.scaled = scale_decimal(leaf.value, 0);
        } catch (const OverflowError&) {
            throw ParseError("leaf value outside the integer range");
        }
        return index;
    }

    if (!j.contains("yes") || !j.contains("no") || !j.contains("feature") || !j.contains("threshold")) {
        throw ParseError("malformed node");
    }
    const json& feat = j["feature"];
    if (!feat.is_number_integer() || feat.get<std::int64_t>() < 0) {
        throw ParseError("malformed node: feature must be a non-negative integer");
    }
    const auto feature = feat.get<std::int64_t>();
    if (feature >= static_cast<std::int64_t>(num_features)) {
        throw ParseError("feature index out of range: " + std::to_string(feature));
    }
    if (j.contains("op")) {
        // "<" and "<=" describe the same region partition; both are read as
        // the strict form.
        const json& op = j["op"];
        if (!op.is_string() || (op != "<" && op != "<=")) {
            throw ParseError("malformed node: op must be \"<\" or \"<=\"");
        }
    }
    Guard guard{static_cast<std::uint32_t>(feature), finite_number(j["threshold"], "threshold")};

    const std::int32_t yes = parse_node(j["yes"], num_features, tree, depth + 1);
    const std::int32_t no = parse_node(j["no"], num_features, tree, depth + 1);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
    node.guard = guard;
    node.yes = yes;
    node.no = no;
    return index;
}

Ensemble from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("ensemble document must be an object");
    if (!doc.contains("num_features") || !doc["num_features"].is_number_integer() ||
        doc["num_features"].get<std::int64_t>() < 0) {
        throw ParseError("missing or invalid num_features");
    }
    if (!doc.contains("trees") || !doc["trees"].is_array()) throw ParseError("missing trees array");

    Ensemble e;
    e.num_features = static_cast<std::uint32_t>(doc["num_features"].get<std::int64_t>());
    for (const auto& root : doc["trees"]) {
        Tree t;
        parse_node(root, e.num_features, t, 0);
        e.trees.push_back(std::move(t));
    }
    if (e.trees.empty()) throw ParseError("ensemble has no trees");
    return e;
}

json node_to_json(const Tree& t, std::int32_t idx) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return json{{"value", n.value}};
    json j;
    j["feature"] = n.guard.feature;
    j["threshold"] = n.guard.threshold;
    j["yes"] = node_to_json(t, n.yes);
    j["no"] = node_to_json(t, n.no);
    return j;
}

} // namespace

Ensemble parse_ensemble(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::exception& ex) {
        throw ParseError(std::string("invalid JSON: ") + ex.what());
    }
    return from_json(doc);
}

Ensemble parse_ensemble(std::istream& in) {
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ensemble(ss.str());
}

Ensemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path);
    return parse_ensemble(in);
}

std::string to_json(const Ensemble& e, int indent) {
    json doc;
    doc["num_features"] = e.num_features;
    doc["trees"] = json::array();
    for (const auto& t : e.trees) doc["trees"].push_back(node_to_json(t, 0));
    return doc.dump(indent);
}

} // namespace xcount
