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

#include "iqsync/csv.h"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "iqsync/channel.h"

namespace iqsync {

std::string csv_number(double value) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 9);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buf.data(), end);
}

std::string csv_number(uint64_t value) {
    return std::to_string(value);
}

std::string csv_number(int64_t value) {
    return std::to_string(value);
}

std::string csv_number(uint32_t value) {
    return std::to_string(value);
}

std::string csv_bool(bool value) {
    return value ? "1" : "0";
}

namespace {

std::string quote_if_needed(const std::string &field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); i++) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                i++;
            } else if (c == '"') {
                quoted = false;
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream &out, std::vector<std::string> header) : out_(out), width_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<std::string> &fields) {
    if (fields.size() != width_) {
        throw std::logic_error("CSV row width does not match the header");
    }
    for (size_t i = 0; i < fields.size(); i++) {
        if (i) {
            out_ << ',';
        }
        out_ << quote_if_needed(fields[i]);
    }
    out_ << '\n';
}

int CsvTable::column(std::string_view name) const {
    for (size_t i = 0; i < header.size(); i++) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

CsvTable read_csv(std::istream &in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw DataError("CSV row " + std::to_string(table.rows.size() + 1) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) {
        throw DataError("CSV input is empty");
    }
    return table;
}

double parse_csv_double(std::string_view field) {
    double value = 0;
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || end != field.data() + field.size()) {
        throw DataError("not a number: '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace iqsync
