#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>
#include <string_view>

#include "wlks/datagen.hpp"
#include "wlks/error.hpp"

namespace wlks {

namespace {

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("subgraphs: bad ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

}  // namespace

SubgraphSet parse_subgraphs(std::istream& in, const GlobalGraph& g, std::optional<std::size_t> num_classes) {
  SubgraphSet set;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared = num_classes;
  std::uint32_t max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body(line);
      constexpr std::string_view kClasses = "# classes ";
      if (body.substr(0, kClasses.size()) == kClasses && !declared) {
        declared = parse_id(body.substr(kClasses.size()), line_no, "class count");
      }
      continue;
    }
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) throw ParseError("subgraphs: expected 'nodes<TAB>labels<TAB>split'", line_no);

    std::vector<NodeId> nodes;
    for (auto tok : split_on(fields[0], ' ')) {
      if (tok.empty()) continue;
      const auto v = parse_id(tok, line_no, "node id");
      if (v >= g.num_nodes()) throw RangeError("subgraphs: node id >= N", line_no);
      nodes.push_back(static_cast<NodeId>(v));
    }
    if (nodes.empty()) throw ParseError("subgraphs: no node ids", line_no);

    std::vector<std::uint32_t> labels;
    for (auto tok : split_on(fields[1], ',')) {
      const auto c = parse_id(tok, line_no, "label");
      labels.push_back(static_cast<std::uint32_t>(c));
      max_label = std::max(max_label, static_cast<std::uint32_t>(c));
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    Split sp;
    if (fields[2] == "train") {
      sp = Split::kTrain;
    } else if (fields[2] == "val") {
      sp = Split::kVal;
    } else if (fields[2] == "test") {
      sp = Split::kTest;
    } else {
      throw ParseError("subgraphs: split must be train, val or test", line_no);
    }

    if (labels.size() > 1) set.multi_label = true;
    set.subgraphs.push_back(Subgraph::induced(g, std::move(nodes)));
    set.labels.push_back(std::move(labels));
    set.split.push_back(sp);
  }
  set.num_classes = declared ? *declared : std::max<std::size_t>(2, max_label + 1);
  if (!set.subgraphs.empty() && max_label >= set.num_classes) {
    throw RangeError("subgraphs: label id >= declared class count");
  }
  return set;
}

void write_subgraphs(const SubgraphSet& s, std::ostream& out) {
  out << "# classes " << s.num_classes << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& nodes = s.subgraphs[i].nodes;
    for (std::size_t k = 0; k < nodes.size(); ++k) out << (k ? " " : "") << nodes[k];
    out << '\t';
    for (std::size_t k = 0; k < s.labels[i].size(); ++k) out << (k ? "," : "") << s.labels[i][k];
    out << '\t' << to_string(s.split[i]) << '\n';
  }
}

void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "graph.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "graph.txt").string());
    write_graph(d.graph, out);
  }
  {
    std::ofstream out(dir / "subgraphs.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "subgraphs.txt").string());
    write_subgraphs(d.subgraphs, out);
  }
  if (d.features) {
    std::ofstream out(dir / "features.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "features.txt").string());
    write_features(*d.features, out);
  }
}

Dataset read_dataset(const std::filesystem::path& dir) {
  Dataset d;
  d.graph = load_graph(dir / "graph.txt");
  {
    std::ifstream in(dir / "subgraphs.txt");
    if (!in) throw ParseError("cannot open " + (dir / "subgraphs.txt").string(), 0);
    d.subgraphs = parse_subgraphs(in, d.graph);
  }
  const auto fpath = dir / "features.txt";
  if (std::filesystem::exists(fpath)) {
    std::ifstream in(fpath);
    d.features = parse_features(in);
    if (d.features->rows != d.graph.num_nodes()) {
      throw ParseError("features: expected one row per node (" + std::to_string(d.graph.num_nodes()) + ")", 0);
    }
  }
  return d;
}

}  // namespace wlks
