// Copyright 2026 The iqsync Authors
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

#ifndef IQSYNC_CSV_H
#define IQSYNC_CSV_H

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace iqsync {

/// Locale-independent decimal with 9 significant digits.
std::string csv_number(double value);
std::string csv_number(uint64_t value);
std::string csv_number(int64_t value);
std::string csv_number(uint32_t value);
std::string csv_bool(bool value);

/// Comma-separated table with a header row. Fields containing commas or
/// quotes are quoted.
class CsvWriter {
   public:
    CsvWriter(std::ostream &out, std::vector<std::string> header);

    void row(const std::vector<std::string> &fields);

   private:
    std::ostream &out_;
    size_t width_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column, or -1.
    int column(std::string_view name) const;
};

/// Reads a header + rows table. Quoted fields are supported; embedded
/// newlines are not.
CsvTable read_csv(std::istream &in);

/// Strict double parse of a whole field; throws DataError.
double parse_csv_double(std::string_view field);

}  // namespace iqsync

#endif
