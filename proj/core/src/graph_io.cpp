#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ocf/access_graph.hpp"

namespace ocf {

namespace {

bool IsSkippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

AccessGraph ReadGraph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long n_users = -1;
  long long n_items = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsSkippable(line)) continue;
    std::istringstream fields(line);
    long long a = 0;
    long long b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw GraphError("graph file line " + std::to_string(line_no) +
                       ": expected two integers, got '" + line + "'");
    }
    if (a < 0 || b < 0) {
      throw GraphError("graph file line " + std::to_string(line_no) +
                       ": negative index");
    }
    if (n_users < 0) {
      n_users = a;
      n_items = b;
      continue;
    }
    edges.push_back({static_cast<UserId>(a), static_cast<ItemId>(b)});
  }
  if (n_users < 0) throw GraphError("graph file: missing 'n_users n_items' header");
  return AccessGraph::FromEdges(edges, static_cast<std::size_t>(n_users),
                                static_cast<std::size_t>(n_items));
}

AccessGraph ReadGraphFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file '" + path + "'");
  return ReadGraph(in);
}

void WriteGraph(std::ostream& out, const AccessGraph& g) {
  out << g.num_users() << ' ' << g.num_items() << '\n';
  for (const Edge& e : g.edges()) out << e.user << ' ' << e.item << '\n';
}

}  // namespace ocf
