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

#ifndef ATEBENCH_TRANSPORT_H_
#define ATEBENCH_TRANSPORT_H_

#include <memory>
#include <string>
#include <string_view>

namespace atebench {

// A bidirectional stream of newline-terminated UTF-8 lines. Not thread-safe.
class LineTransport {
 public:
  virtual ~LineTransport() = default;

  // Writes `line` plus '\n'. Throws ConnectionError on failure.
  virtual void WriteLine(std::string_view line) = 0;
  // Next line without its terminator. Throws ConnectionError on EOF.
  virtual std::string ReadLine() = 0;

  virtual std::string Describe() const = 0;
};

// Endpoints:
//   stdio:<shell command>  spawn the command, talk over its stdin/stdout
//   tcp:<host>:<port>      connect a TCP socket
std::unique_ptr<LineTransport> OpenTransport(const std::string& endpoint);

}  // namespace atebench

#endif  // ATEBENCH_TRANSPORT_H_
