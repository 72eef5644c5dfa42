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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cyberdef {

using HostIndex = std::size_t;
using SubnetIndex = std::size_t;

enum class Tier : std::uint8_t { UserHost, EnterpriseServer, OperationalServer };
inline constexpr std::size_t kTierCount = 3;

enum class Encoding : std::uint8_t { Baseline, Detector };

enum class RedStrategyKind : std::uint8_t { Beeline, Meander, RandomWalk, None };

std::string_view to_string(Tier tier);
std::string_view to_string(Encoding encoding);
std::string_view to_string(RedStrategyKind kind);
std::optional<Tier> parse_tier(std::string_view name);
std::optional<Encoding> parse_encoding(std::string_view name);
std::optional<RedStrategyKind> parse_red_strategy(std::string_view name);

// Configuration problems: bad files, bad values, unknown presets. Raised at
// load time, never from inside a running episode.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { MissingFile, Parse, Invariant, UnknownPreset };

  ConfigError(Kind kind, std::string field, const std::string& message)
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  Kind kind() const noexcept { return kind_; }
  // Offending field, empty when the error is not tied to one.
  const std::string& field() const noexcept { return field_; }

 private:
  Kind kind_;
  std::string field_;
};

// Caller broke an API precondition (stepping a finished episode, mixing
// encodings, non-finite rewards, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// 64-bit FNV-1a. Used for trace hashes, config hashes and Q-table keys, so the
// constants are fixed here and nowhere else.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = kFnvOffset) {
  for (char c : bytes) {
    hash ^= static_cast<std::uint8_t>(c);
    hash *= kFnvPrime;
  }
  return hash;
}

// Lower-case, zero-padded 16 digit hex.
std::string hex64(std::uint64_t value);
std::optional<std::uint64_t> parse_hex64(std::string_view text);

// Fixed-precision decimal rendering for reals that end up in traces and
// CSV files; keeps output bytes independent of the platform's float printer.
std::string fixed9(double value);

}  // namespace cyberdef
