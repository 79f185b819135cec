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

// Protocol v1 test server.
//
//   fake_model_server [--mode M] [--tcp]
//
// Modes:
//   constant    every probability is 0.5; estimate_ate unsupported
//   logistic    fits with the in-process logistic regression
//   crude       estimate_ate returns the crude difference with +-0.05 bounds
//   stub        estimate_ate returns {ate 0.1, lo 0.0, hi 0.2}
//   reversed    estimate_ate returns lo > hi
//   malformed   replies to everything after hello with a non-JSON line
//   error       fit and estimate_ate fail with {"ok":false}
//   badversion  hello answers with v = 2
//
// With --tcp the server listens on 127.0.0.1 at an ephemeral port, prints the
// port on stdout, and serves each connection on its own thread.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "atebench/logistic.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string g_mode = "constant";

atebench::FeatureMatrix ToMatrix(const json& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows[0].size();
  atebench::FeatureMatrix X(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) X(i, j) = rows[i][j].get<double>();
  }
  return X;
}

class Session {
 public:
  // Returns the reply line for one request line.
  std::string Handle(const std::string& line) {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception& e) {
      return Fail(std::string("bad request: ") + e.what());
    }
    const std::string cmd = req.value("cmd", "");
    if (cmd == "hello") {
      json caps = json::array({"fit_predict"});
      if (g_mode != "constant") caps.push_back("estimate_ate");
      return json{{"v", g_mode == "badversion" ? 2 : 1}, {"ok", true},
                  {"capabilities", caps}}
          .dump();
    }
    if (g_mode == "malformed") return "this is not json";
    try {
      if (cmd == "fit") return Fit(req);
      if (cmd == "predict_proba") return Predict(req);
      if (cmd == "free") {
        const auto erased = models_.erase(req.at("model_id").get<std::string>());
        return erased ? json{{"ok", true}}.dump() : Fail("unknown model_id");
      }
      if (cmd == "estimate_ate") return EstimateAte(req);
    } catch (const std::exception& e) {
      return Fail(e.what());
    }
    return Fail("unknown command '" + cmd + "'");
  }

 private:
  static std::string Fail(const std::string& message) {
    return json{{"ok", false}, {"error", message}}.dump();
  }

  std::string Fit(const json& req) {
    if (g_mode == "error") return Fail("fit refused by test server");
    const std::string id = "m" + std::to_string(++next_id_);
    std::shared_ptr<atebench::FittedModel> model;
    if (g_mode == "logistic") {
      const auto X = ToMatrix(req.at("features"));
      const auto labels = req.at("labels").get<std::vector<std::uint8_t>>();
      model = atebench::FitLogistic(X, labels);
    }
    models_[id] = model;
    return json{{"ok", true}, {"model_id", id}}.dump();
  }

  std::string Predict(const json& req) {
    const auto it = models_.find(req.at("model_id").get<std::string>());
    if (it == models_.end()) return Fail("unknown model_id");
    const auto X = ToMatrix(req.at("features"));
    std::vector<double> probs(X.rows, 0.5);
    if (it->second) probs = it->second->PredictProba(X);
    return json{{"ok", true}, {"probs", probs}}.dump();
  }

  std::string EstimateAte(const json& req) {
    if (g_mode == "error") return Fail("estimate_ate refused by test server");
    if (g_mode == "stub") return json{{"ok", true}, {"ate", 0.1}, {"lo", 0.0}, {"hi", 0.2}}.dump();
    if (g_mode == "reversed") {
      return json{{"ok", true}, {"ate", 0.1}, {"lo", 0.3}, {"hi", 0.2}}.dump();
    }
    const auto x = req.at("treatment").get<std::vector<int>>();
    const auto y = req.at("outcome").get<std::vector<int>>();
    double s1 = 0, n1 = 0, s0 = 0, n0 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      (x[i] ? s1 : s0) += y[i];
      (x[i] ? n1 : n0) += 1;
    }
    const double ate = s1 / n1 - s0 / n0;
    return json{{"ok", true}, {"ate", ate}, {"lo", ate - 0.05}, {"hi", ate + 0.05}}.dump();
  }

  std::map<std::string, std::shared_ptr<atebench::FittedModel>> models_;
  int next_id_ = 0;
};

void ServeFd(int fd) {
  Session session;
  std::string buffer;
  char chunk[65536];
  for (;;) {
    const ssize_t k = ::read(fd, chunk, sizeof chunk);
    if (k <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(k));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      const std::string reply = session.Handle(buffer.substr(0, nl)) + "\n";
      buffer.erase(0, nl + 1);
      std::size_t done = 0;
      while (done < reply.size()) {
        const ssize_t w = ::send(fd, reply.data() + done, reply.size() - done, MSG_NOSIGNAL);
        if (w <= 0) return;
        done += static_cast<std::size_t>(w);
      }
    }
  }
}

int ServeTcp() {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listener, 16) != 0) {
    std::perror("bind/listen");
    return 1;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  std::printf("%d\n", ntohs(addr.sin_port));
  std::fflush(stdout);
  for (;;) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    std::thread([fd] {
      ServeFd(fd);
      ::close(fd);
    }).detach();
  }
}

int ServeStdio() {
  Session session;
  std::string line;
  while (std::getline(std::cin, line)) {
    std::cout << session.Handle(line) << '\n' << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  bool tcp = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--mode" && i + 1 < argc) {
      g_mode = argv[++i];
    } else if (arg == "--tcp") {
      tcp = true;
    } else {
      std::cerr << "unknown argument " << arg << '\n';
      return 1;
    }
  }
  return tcp ? ServeTcp() : ServeStdio();
}
