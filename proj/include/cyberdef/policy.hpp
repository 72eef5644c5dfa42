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

#include <cstdint>

#include "cyberdef/blue.hpp"
#include "cyberdef/detection.hpp"

namespace cyberdef {

// Minimal observe -> act contract. Policies see only observations and the
// action catalog, never engine internals.
class Policy {
 public:
  virtual ~Policy() = default;

  // Called before the first act() of each episode. Stochastic policies
  // reseed from the episode seed here so episodes are reproducible in
  // isolation.
  virtual void begin_episode(std::uint64_t /*episode_seed*/) {}

  virtual BlueAction act(const Observation& observation,
                         const ActionCatalog& catalog) = 0;

  // Reward for the last action, and whether the episode just ended.
  virtual void notify(double /*reward*/, bool /*done*/) {}
};

}  // namespace cyberdef
