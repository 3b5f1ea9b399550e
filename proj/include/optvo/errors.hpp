#pragma once

#include <stdexcept>
#include <string>

namespace optvo {

/// Point outside the domain of a problem's evaluators.
class DomainError : public std::runtime_error {
 public:
  DomainError(int agent, const std::string& what)
      : std::runtime_error(what), agent_(agent) {}
  int agent() const { return agent_; }

 private:
  int agent_;
};

enum class Assumption {
  InvertibleConstraintJacobian,  // J_m invertible
  InvertibleCurvature,           // G_m invertible
  InvertibleAggregate,           // sum_k D_k invertible
  NonzeroMultiplier,             // diag(v_m) invertible
};

const char* to_string(Assumption a);

/// A structural assumption of the tracking ODE failed at a given state.
class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(Assumption which, int agent, const std::string& what)
      : std::runtime_error(what), which_(which), agent_(agent) {}
  Assumption which() const { return which_; }
  /// Agent index, or -1 when the failing quantity is not per-agent.
  int agent() const { return agent_; }

 private:
  Assumption which_;
  int agent_;
};

/// Failure inside a sweep, annotated with the grid node (and iteration, when known).
class SweepError : public std::runtime_error {
 public:
  SweepError(int node, int iteration, const std::string& what)
      : std::runtime_error(what), node_(node), iteration_(iteration) {}
  int node() const { return node_; }
  int iteration() const { return iteration_; }

 private:
  int node_;
  int iteration_;
};

class HomotopyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace optvo
