// Copyright 2026 The BOTS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOTS_ENVIRONMENT_HPP_
#define BOTS_ENVIRONMENT_HPP_

#include <functional>
#include <memory>

#include <Eigen/Core>

#include "bots/random.hpp"

namespace bots {

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

// Episodic environment seen by the bandit: observe, act, repeat until done
// or the horizon is reached. Instances are single-threaded values.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual void Reset(Rng& rng) = 0;
  // Feature vector s_t for the current state.
  virtual Eigen::VectorXd Observe() const = 0;
  virtual StepResult Step(int action, Rng& rng) = 0;

  virtual int num_actions() const = 0;
  virtual int feature_dim() const = 0;
  virtual int horizon() const = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

}  // namespace bots

#endif  // BOTS_ENVIRONMENT_HPP_
