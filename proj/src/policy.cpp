#include "agecode/policy.hpp"

#include <stdexcept>

namespace agecode {

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::HighestK: return "highest-k";
    case PolicyKind::Randomized: return "randomized";
    case PolicyKind::EmptyNoReset: return "empty-noreset";
    case PolicyKind::EmptyReset: return "empty-reset";
  }
  throw std::logic_error("policy_name: unknown kind");
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "highest-k") return PolicyKind::HighestK;
  if (name == "randomized") return PolicyKind::Randomized;
  if (name == "empty-noreset") return PolicyKind::EmptyNoReset;
  if (name == "empty-reset") return PolicyKind::EmptyReset;
  throw std::invalid_argument(
      "unknown policy '" + name +
      "' (expected highest-k, randomized, empty-noreset, or empty-reset)");
}

}  // namespace agecode
