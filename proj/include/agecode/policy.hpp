#pragma once

#include <string>

namespace agecode {

enum class PolicyKind { HighestK, Randomized, EmptyNoReset, EmptyReset };

// Which symbols get codewords and how rejections spend channel time.
// alpha applies to Randomized only, empty_len to EmptyNoReset only.
struct PolicyConfig {
  PolicyKind kind = PolicyKind::HighestK;
  int k = 1;
  double alpha = 1.0;
  double empty_len = 1.0;
};

std::string policy_name(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);  // throws on unknown name

}  // namespace agecode
