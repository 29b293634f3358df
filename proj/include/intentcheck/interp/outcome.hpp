#pragma once

#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/calculus/state.hpp"

namespace intentcheck::interp {

using calculus::AbstractState;
using calculus::Value;

enum class Status { Returned, Failed };

/// A fork taken on the way to an outcome. Branch forks split over unknown
/// state (all must be handled); Choice forks are query alternatives (any one suffices).
struct Decision {
  enum class Kind { Branch, Choice };
  Kind kind = Kind::Branch;
  int index = 0;
  int arity = 2;

  friend auto operator<=>(const Decision&, const Decision&) = default;
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct Outcome {
  AbstractState initial;
  AbstractState delta;
  Status status = Status::Returned;
  Value result = Value::unit();
  std::map<Value, Value> constraints;  // stuck form (or universal symbol) -> boolean
  std::vector<Decision> trace;

  bool failed() const { return status == Status::Failed; }

  void print(std::ostream& os) const {
    os << "outcome " << (failed() ? "failed" : "returned " + result.to_string()) << '\n';
    os << " initial:\n";
    initial.print(os, "  ");
    os << " delta:\n";
    delta.print(os, "  ");
    if (!constraints.empty()) {
      os << " constraints:\n";
      for (const auto& [k, v] : constraints) os << "  " << k << " = " << v << '\n';
    }
  }
  std::string to_string() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }
};

}  // namespace intentcheck::interp
