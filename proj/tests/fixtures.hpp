#pragma once

// Small named tensors shared by the suites.

#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/graph.hpp"
#include "tensorbounds/tensor.hpp"

namespace fixtures {

struct Named {
  std::string name;
  tb::SparseTensor t;
};

/// Two disjoint edges: tight, yet one flattening has rank one.
inline tb::SparseTensor split_pair() { return tb::graph_tensor(tb::Graph(4, {{0, 1}, {2, 3}}), 2); }

inline std::vector<Named> examples() {
  using namespace tb;
  return {{"D22", dicke_tensor({2, 2})},
          {"D111", dicke_tensor({1, 1, 1})},
          {"D211", dicke_tensor({2, 1, 1})},
          {"W3", wstate_tensor(3)},
          {"W4", wstate_tensor(4)},
          {"W5", wstate_tensor(5)},
          {"C3", graph_tensor(Graph::cycle(3), 2)},
          {"C4", graph_tensor(Graph::cycle(4), 2)},
          {"P3", graph_tensor(Graph(3, {{0, 1}, {1, 2}}), 2)},
          {"split_pair", split_pair()},
          {"unit33", unit_tensor(3, 3)},
          {"unit24", unit_tensor(2, 4)},
          {"CW14", cw_tensor(1, 4)}};
}

}  // namespace fixtures
