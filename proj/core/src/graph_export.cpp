#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "narmine/analysis.hpp"
#include "narmine/text.hpp"

namespace nm {

namespace {

std::string dot_id(std::string_view id) {
  std::string out = "\"";
  for (char c : id) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string endpoint(const std::vector<std::string>& side) {
  if (side.size() == 1) return dot_id(side[0]);
  std::string out = "{";
  for (const std::string& id : side) out += " " + dot_id(id);
  return out + " }";
}

// Grey for unknown lift, otherwise black-to-red by lift / maxLift.
std::string lift_color(double lift, double maxLift) {
  if (std::isnan(lift) || !(maxLift > 0)) return "#999999";
  const double intensity = std::clamp(lift / maxLift, 0.0, 1.0);
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "#%02X0000",
                static_cast<unsigned>(std::lround(55 + 200 * intensity)));
  return buffer;
}

}  // namespace

std::string to_dot(const RuleGraph& graph) {
  double maxLift = 0.0;
  for (const GraphEdge& e : graph.edges())
    if (!std::isnan(e.lift)) maxLift = std::max(maxLift, e.lift);

  std::string out = "digraph rules {\n";
  out += "  node [shape=circle, fixedsize=true, style=filled, fillcolor=\"#DDEEFF\"];\n";
  for (const GraphNode& n : graph.nodes()) {
    out += "  " + dot_id(n.nodeId) + " [width=" + text::format_fixed(3.0 * n.frequency, 4) +
           ", frequency=" + text::format_fixed(n.frequency, 4) + "];\n";
  }
  for (const GraphEdge& e : graph.edges()) {
    const double ratio = (maxLift > 0 && !std::isnan(e.lift)) ? e.lift / maxLift : 0.0;
    out += "  " + endpoint(e.lhs) + " -> " + endpoint(e.rhs) +
           " [label=" + dot_id(text::format_fixed(e.support, 4)) +
           ", penwidth=" + text::format_fixed(0.5 + 4.5 * ratio, 3) +
           ", color=" + dot_id(lift_color(e.lift, maxLift)) + "];\n";
  }
  out += "}\n";
  return out;
}

std::string to_json(const RuleGraph& graph) {
  using json = nlohmann::ordered_json;
  auto number = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json nodes = json::array();
  for (const GraphNode& n : graph.nodes())
    nodes.push_back({{"nodeId", n.nodeId}, {"frequency", number(n.frequency)}});
  json edges = json::array();
  for (const GraphEdge& e : graph.edges())
    edges.push_back({{"lhs", e.lhs},
                     {"rhs", e.rhs},
                     {"support", number(e.support)},
                     {"confidence", number(e.confidence)},
                     {"lift", number(e.lift)}});
  json doc = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  return doc.dump(2) + "\n";
}

}  // namespace nm
