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

#ifndef ATEBENCH_CSV_H_
#define ATEBENCH_CSV_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atebench {

// A comma-separated table with a header row, held as strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header, if present.
  std::optional<std::size_t> ColumnIndex(std::string_view name) const;
};

// RFC 4180 subset: quoted fields with doubled quotes, CRLF or LF line ends.
// Lines starting with '#' before the header are skipped. Throws IngestError on
// ragged rows.
CsvTable ParseCsv(std::istream& in);
CsvTable ReadCsvFile(const std::filesystem::path& path);

// Quotes a field only when it contains a comma, quote, or newline.
std::string CsvEscape(std::string_view field);

// Strict numeric parse of a whole field; nullopt on anything else.
std::optional<double> ParseDouble(std::string_view text);

}  // namespace atebench

#endif  // ATEBENCH_CSV_H_
