/*
 * Copyright 2026 The atebench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ATEBENCH_ERRORS_H_
#define ATEBENCH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace atebench {

// Root of every error raised by the library. Callers that only need to know
// "this replicate failed" catch this; the bootstrap layer catches the
// estimator-level subset below and redraws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input table or ingestion config.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Scenario construction or scenario file problems.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

// Estimator failed on a particular dataset. Recoverable by resampling.
class EstimationError : public Error {
 public:
  using Error::Error;
};

// One treatment arm has no rows.
class EmptyArmError : public EstimationError {
 public:
  explicit EmptyArmError(int arm)
      : EstimationError("treatment arm x=" + std::to_string(arm) +
                        " is empty"),
        arm_(arm) {}
  int arm() const { return arm_; }

 private:
  int arm_;
};

// A fitted propensity of exactly 0 or 1 produced an infinite IPTW weight.
class InfiniteWeightError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Model fitting failed (singular design, bad shapes, remote error).
class ModelError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Wire protocol violation or remote failure.
class ProtocolError : public ModelError {
 public:
  using ModelError::ModelError;
};

// Transport-level failure (spawn, connect, broken pipe).
class ConnectionError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// Bootstrap exhausted its redraw budget.
class BootstrapError : public Error {
 public:
  using Error::Error;
};

}  // namespace atebench

#endif  // ATEBENCH_ERRORS_H_
