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

// Study result serialization.
//
// Scaling in every format: coverage columns in percent, mean width x100,
// mean error and MSE x10^3, time in seconds. The CSV carries no timing
// column so that two runs of one config produce identical bytes; timing goes
// to its own CSV and into the aligned table.

#ifndef ATEBENCH_REPORT_H_
#define ATEBENCH_REPORT_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "atebench/harness.h"

namespace atebench {

enum class ReportFormat { kCsv, kJson, kTable };

ReportFormat ParseReportFormat(std::string_view name);  // csv | json | table

void WriteMetricsCsv(const StudyResult& r, std::ostream& out);
void WriteTimingCsv(const StudyResult& r, std::ostream& out);
void WriteMetricsJson(const StudyResult& r, std::ostream& out);
void WriteMetricsTable(const StudyResult& r, std::ostream& out);

void WriteReport(const StudyResult& r, ReportFormat format, std::ostream& out);
// Throws Error when the path cannot be written.
void WriteReportFile(const StudyResult& r, ReportFormat format,
                     const std::filesystem::path& path);

// Reads a metrics CSV (or JSON) back into a StudyResult, undoing the scaling.
// mean_time_s is not in the CSV and comes back as 0.
StudyResult ParseMetricsCsv(std::istream& in);
StudyResult ReadMetricsFile(const std::filesystem::path& path);

}  // namespace atebench

#endif  // ATEBENCH_REPORT_H_
