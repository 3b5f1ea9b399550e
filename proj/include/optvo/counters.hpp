#pragma once

#include <cstdint>

namespace optvo {

/// Per-run tally of dense factorizations, split by system size.
/// Each factorization-backed solve of an N x N (agent) or M x M (weight) system counts once.
struct CostCounters {
  std::int64_t agent_solves = 0;
  std::int64_t weight_solves = 0;

  std::int64_t total() const { return agent_solves + weight_solves; }

  CostCounters& operator+=(const CostCounters& o) {
    agent_solves += o.agent_solves;
    weight_solves += o.weight_solves;
    return *this;
  }
};

inline void count_agent_solve(CostCounters* c, std::int64_t n = 1) {
  if (c) c->agent_solves += n;
}
inline void count_weight_solve(CostCounters* c, std::int64_t n = 1) {
  if (c) c->weight_solves += n;
}

}  // namespace optvo
