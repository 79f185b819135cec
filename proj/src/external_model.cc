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

#include "atebench/external_model.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "atebench/errors.h"

namespace atebench {

using nlohmann::json;

namespace {

double RequireNumber(const json& reply, const char* key) {
  const auto it = reply.find(key);
  if (it == reply.end() || !it->is_number()) {
    throw ProtocolError(fmt::format("reply lacks numeric '{}': {}", key,
                                    reply.dump().substr(0, 200)));
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ProtocolError(fmt::format("non-finite '{}'", key));
  return v;
}

}  // namespace

json FeaturesToJson(const FeatureMatrix& X) {
  json rows = json::array();
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto r = X.row(i);
    rows.push_back(json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

std::shared_ptr<ProtocolClient> ProtocolClient::Connect(const std::string& endpoint,
                                                        std::size_t pool_size) {
  if (pool_size == 0) throw ConnectionError("connection pool size must be >= 1");
  std::shared_ptr<ProtocolClient> client(new ProtocolClient());
  client->endpoint_ = endpoint;
  for (std::size_t i = 0; i < pool_size; ++i) {
    auto conn = std::make_unique<Connection>();
    conn->transport = OpenTransport(endpoint);
    json reply;
    try {
      reply = client->Exchange(*conn, json{{"v", kProtocolVersion}, {"cmd", "hello"}});
    } catch (const ProtocolError&) {
      throw;
    } catch (const ModelError& e) {
      throw ProtocolError(fmt::format("handshake with {} failed: {}", endpoint,
                                      e.what()));
    }
    const auto v = reply.find("v");
    if (v == reply.end() || !v->is_number_integer() ||
        v->get<int>() != kProtocolVersion) {
      throw ProtocolError(fmt::format("{} speaks protocol version {}, expected {}",
                                      endpoint, v == reply.end() ? "?" : v->dump(),
                                      kProtocolVersion));
    }
    const auto caps = reply.find("capabilities");
    if (caps == reply.end() || !caps->is_array()) {
      throw ProtocolError("hello reply lacks a capabilities list");
    }
    std::vector<std::string> names;
    for (const auto& c : *caps) {
      if (!c.is_string()) throw ProtocolError("capability names must be strings");
      names.push_back(c.get<std::string>());
    }
    if (i == 0) client->capabilities_ = std::move(names);
    client->connections_.push_back(std::move(conn));
  }
  return client;
}

bool ProtocolClient::HasCapability(const std::string& name) const {
  return std::find(capabilities_.begin(), capabilities_.end(), name) !=
         capabilities_.end();
}

std::size_t ProtocolClient::NextConnection() {
  return next_.fetch_add(1) % connections_.size();
}

void ProtocolClient::Count(const std::string& cmd) {
  if (cmd == "hello") ++hello_;
  else if (cmd == "fit") ++fit_;
  else if (cmd == "predict_proba") ++predict_;
  else if (cmd == "free") ++free_;
  else if (cmd == "estimate_ate") ++ate_;
}

ProtocolCounters ProtocolClient::counters() const {
  return {hello_.load(), fit_.load(), predict_.load(), free_.load(), ate_.load()};
}

json ProtocolClient::Exchange(Connection& c, const json& request) {
  std::lock_guard<std::mutex> lock(c.mu);
  const std::string cmd = request.value("cmd", "");
  Count(cmd);
  c.transport->WriteLine(request.dump());
  const std::string line = c.transport->ReadLine();
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(fmt::format("malformed reply to '{}' from {}: {}", cmd,
                                    c.transport->Describe(), e.what()));
  }
  if (!reply.is_object()) {
    throw ProtocolError(fmt::format("reply to '{}' is not an object", cmd));
  }
  const auto ok = reply.find("ok");
  if (ok == reply.end() || !ok->is_boolean()) {
    throw ProtocolError(fmt::format("reply to '{}' lacks boolean 'ok'", cmd));
  }
  if (!ok->get<bool>()) {
    const auto err = reply.find("error");
    const std::string message =
        err != reply.end() && err->is_string() ? err->get<std::string>() : reply.dump();
    throw ModelError(fmt::format("server error on '{}': {}", cmd, message));
  }
  return reply;
}

json ProtocolClient::Call(std::size_t conn, const json& request) {
  if (conn >= connections_.size()) {
    throw ProtocolError(fmt::format("no connection {}", conn));
  }
  return Exchange(*connections_[conn], request);
}

ExternalFittedModel::ExternalFittedModel(std::shared_ptr<ProtocolClient> client,
                                         std::size_t conn, std::string model_id,
                                         std::size_t num_features)
    : client_(std::move(client)),
      conn_(conn),
      model_id_(std::move(model_id)),
      num_features_(num_features) {}

ExternalFittedModel::~ExternalFittedModel() {
  try {
    client_->Call(conn_, json{{"cmd", "free"}, {"model_id", model_id_}});
  } catch (const std::exception&) {
    // The server may already be gone; nothing to release then.
  }
}

std::vector<double> ExternalFittedModel::PredictImpl(const FeatureMatrix& X) const {
  const json reply = client_->Call(
      conn_, json{{"cmd", "predict_proba"},
                  {"model_id", model_id_},
                  {"features", FeaturesToJson(X)}});
  const auto probs = reply.find("probs");
  if (probs == reply.end() || !probs->is_array()) {
    throw ProtocolError("predict_proba reply lacks 'probs'");
  }
  if (probs->size() != X.rows) {
    throw ProtocolError(fmt::format("predict_proba returned {} values for {} rows",
                                    probs->size(), X.rows));
  }
  std::vector<double> out;
  out.reserve(X.rows);
  for (const auto& p : *probs) {
    if (!p.is_number()) throw ProtocolError("non-numeric probability");
    const double v = p.get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ProtocolError(fmt::format("probability {} outside [0,1]", v));
    }
    out.push_back(v);
  }
  return out;
}

std::string_view ExternalTaskName(ExternalTask task) {
  return task == ExternalTask::kOutcome ? "outcome" : "propensity";
}

ModelFactory ExternalModelFactory(std::shared_ptr<ProtocolClient> client,
                                  ExternalTask task) {
  if (!client->HasCapability("fit_predict")) {
    throw ProtocolError(fmt::format("{} does not offer fit_predict",
                                    client->endpoint()));
  }
  return [client, task](const FeatureMatrix& X,
                        Labels y) -> std::unique_ptr<FittedModel> {
    X.Validate();
    if (y.size() != X.rows) {
      throw ModelError(fmt::format("{} labels for {} rows", y.size(), X.rows));
    }
    const std::size_t conn = client->NextConnection();
    const json reply = client->Call(
        conn, json{{"cmd", "fit"},
                   {"model", std::string(ExternalTaskName(task))},
                   {"features", FeaturesToJson(X)},
                   {"labels", std::vector<int>(y.begin(), y.end())}});
    const auto id = reply.find("model_id");
    if (id == reply.end() || !id->is_string()) {
      throw ProtocolError("fit reply lacks string 'model_id'");
    }
    return std::make_unique<ExternalFittedModel>(client, conn, id->get<std::string>(),
                                                 X.cols);
  };
}

ModelFactory ConnectExternalModel(const std::string& endpoint, ExternalTask task,
                                  std::size_t pool_size) {
  return ExternalModelFactory(ProtocolClient::Connect(endpoint, pool_size), task);
}

ExternalAte RequestExternalAte(ProtocolClient& client, const SimulatedDataset& d) {
  if (!client.HasCapability("estimate_ate")) {
    throw ProtocolError(fmt::format("{} does not offer estimate_ate",
                                    client.endpoint()));
  }
  const json reply = client.Call(
      client.NextConnection(),
      json{{"cmd", "estimate_ate"},
           {"features", FeaturesToJson(ConfounderFeatures(d))},
           {"treatment", std::vector<int>(d.x.begin(), d.x.end())},
           {"outcome", std::vector<int>(d.y.begin(), d.y.end())}});
  ExternalAte out{RequireNumber(reply, "ate"), RequireNumber(reply, "lo"),
                  RequireNumber(reply, "hi")};
  if (out.lo > out.hi) {
    throw ProtocolError(fmt::format("interval bounds reversed: lo {} > hi {}",
                                    out.lo, out.hi));
  }
  return out;
}

}  // namespace atebench
