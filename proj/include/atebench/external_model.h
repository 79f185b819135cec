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

// Client side of the model-server wire protocol (version 1).
//
// Each request and reply is one JSON object per line:
//
//   {"v":1,"cmd":"hello"}                     {"v":1,"ok":true,"capabilities":[...]}
//   {"cmd":"fit","model":..,"features":[[..]],"labels":[..]}
//                                             {"ok":true,"model_id":"m1"}
//   {"cmd":"predict_proba","model_id":"m1","features":[[..]]}
//                                             {"ok":true,"probs":[..]}
//   {"cmd":"free","model_id":"m1"}            {"ok":true}
//   {"cmd":"estimate_ate","features":[[..]],"treatment":[..],"outcome":[..]}
//                                             {"ok":true,"ate":r,"lo":r,"hi":r}
//
// Any reply may instead be {"ok":false,"error":"..."}. Doubles are written
// with 17 significant digits.

#ifndef ATEBENCH_EXTERNAL_MODEL_H_
#define ATEBENCH_EXTERNAL_MODEL_H_

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "atebench/dataset.h"
#include "atebench/models.h"
#include "atebench/transport.h"
#include "json.hpp"

namespace atebench {

inline constexpr int kProtocolVersion = 1;

enum class ExternalTask { kOutcome, kPropensity };

struct ProtocolCounters {
  std::size_t hello = 0;
  std::size_t fit = 0;
  std::size_t predict_proba = 0;
  std::size_t free = 0;
  std::size_t estimate_ate = 0;
};

// A pool of connections to one endpoint, each handshaken on open. Requests on
// a connection are serialized; different connections run concurrently.
class ProtocolClient {
 public:
  // Opens `pool_size` connections and performs the hello handshake on each.
  // Throws ConnectionError or ProtocolError (including version mismatch).
  static std::shared_ptr<ProtocolClient> Connect(const std::string& endpoint,
                                                 std::size_t pool_size = 1);

  const std::string& endpoint() const { return endpoint_; }
  const std::vector<std::string>& capabilities() const { return capabilities_; }
  bool HasCapability(const std::string& name) const;
  std::size_t pool_size() const { return connections_.size(); }

  // Round-robin choice of connection for a new model.
  std::size_t NextConnection();

  // Sends `request` on connection `conn` and returns the reply. Throws
  // ProtocolError on a malformed reply and ModelError carrying the server
  // message on {"ok":false}.
  nlohmann::json Call(std::size_t conn, const nlohmann::json& request);

  ProtocolCounters counters() const;

 private:
  struct Connection {
    std::mutex mu;
    std::unique_ptr<LineTransport> transport;
  };

  ProtocolClient() = default;
  nlohmann::json Exchange(Connection& c, const nlohmann::json& request);
  void Count(const std::string& cmd);

  std::string endpoint_;
  std::vector<std::string> capabilities_;
  std::vector<std::unique_ptr<Connection>> connections_;
  std::atomic<std::size_t> next_{0};
  std::atomic<std::size_t> hello_{0}, fit_{0}, predict_{0}, free_{0}, ate_{0};
};

// A model living on the server. Sends "free" when destroyed.
class ExternalFittedModel final : public FittedModel {
 public:
  ExternalFittedModel(std::shared_ptr<ProtocolClient> client, std::size_t conn,
                      std::string model_id, std::size_t num_features);
  ~ExternalFittedModel() override;

  ModelKind kind() const override { return ModelKind::kExternal; }
  std::size_t num_features() const override { return num_features_; }
  const std::string& model_id() const { return model_id_; }

 private:
  std::vector<double> PredictImpl(const FeatureMatrix& X) const override;

  std::shared_ptr<ProtocolClient> client_;
  std::size_t conn_;
  std::string model_id_;
  std::size_t num_features_;
};

std::string_view ExternalTaskName(ExternalTask task);

// Factory whose models fit and predict remotely. Requires the "fit_predict"
// capability.
ModelFactory ExternalModelFactory(std::shared_ptr<ProtocolClient> client,
                                  ExternalTask task);
ModelFactory ConnectExternalModel(const std::string& endpoint, ExternalTask task,
                                  std::size_t pool_size = 1);

struct ExternalAte {
  double ate;
  double lo;
  double hi;
};

// One estimate_ate round trip with the dataset's [z] matrix, x and y. Rejects
// replies with lo > hi or non-finite values.
ExternalAte RequestExternalAte(ProtocolClient& client, const SimulatedDataset& d);

nlohmann::json FeaturesToJson(const FeatureMatrix& X);

}  // namespace atebench

#endif  // ATEBENCH_EXTERNAL_MODEL_H_
