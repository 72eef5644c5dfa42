// Copyright 2026 The cyberdef-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cyberdef/common.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "cyberdef/rng.hpp"

namespace cyberdef {
namespace {

constexpr std::array<std::string_view, kTierCount> kTierNames = {
    "UserHost", "EnterpriseServer", "OperationalServer"};
constexpr std::array<std::string_view, 2> kEncodingNames = {"baseline",
                                                            "detector"};
constexpr std::array<std::string_view, 4> kStrategyNames = {
    "Beeline", "Meander", "RandomWalk", "None"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names,
                           std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Tier tier) {
  return kTierNames[static_cast<std::size_t>(tier)];
}
std::string_view to_string(Encoding encoding) {
  return kEncodingNames[static_cast<std::size_t>(encoding)];
}
std::string_view to_string(RedStrategyKind kind) {
  return kStrategyNames[static_cast<std::size_t>(kind)];
}
std::optional<Tier> parse_tier(std::string_view name) {
  return lookup<Tier>(kTierNames, name);
}
std::optional<Encoding> parse_encoding(std::string_view name) {
  return lookup<Encoding>(kEncodingNames, name);
}
std::optional<RedStrategyKind> parse_red_strategy(std::string_view name) {
  return lookup<RedStrategyKind>(kStrategyNames, name);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::optional<std::uint64_t> parse_hex64(std::string_view text) {
  if (text.empty() || text.size() > 16) return std::nullopt;
  std::uint64_t value = 0;
  for (char c : text) {
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      return std::nullopt;
    }
    value = (value << 4) | static_cast<std::uint64_t>(digit);
  }
  return value;
}

std::string fixed9(double value) {
  // Collapse -0.000000000 to 0.000000000.
  if (std::fabs(value) < 5e-10) value = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", value);
  return buf;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

}  // namespace cyberdef
