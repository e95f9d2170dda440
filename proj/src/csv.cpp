// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/csv.hpp"

#include <algorithm>
#include <cctype>

namespace vhp {

std::vector<std::vector<std::string>> read_csv_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&]() {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        break;  // CRLF: the '\n' ends the row
      case '\n':
        if (row_started || !field.empty() || !row.empty()) end_row();
        break;
      default:
        field.push_back(c);
        row_started = true;
    }
  }
  if (in_quotes) throw ParseError("CSV: unterminated quoted field at end of input");
  if (row_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::vector<SequenceRecord> parse_csv(std::istream& in,
                                      const std::string& seq_column,
                                      const std::string& host_column,
                                      const std::string& id_column) {
  const auto rows = read_csv_rows(in);
  if (rows.empty()) throw ParseError("CSV: no header row");

  const auto& header = rows.front();
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("CSV header lacks required column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t seq_idx = column(seq_column);
  const std::size_t host_idx = column(host_column);
  const std::size_t id_idx = column(id_column);

  std::vector<SequenceRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != header.size())
      throw ParseError("CSV row " + std::to_string(r + 1) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    SequenceRecord rec;
    rec.id = fields[id_idx];
    rec.host = fields[host_idx];
    for (char c : fields[seq_idx]) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      rec.sequence.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (rec.sequence.empty())
      throw ParseError("CSV row " + std::to_string(r + 1) + ": empty sequence");
    if (rec.host.empty())
      throw ParseError("CSV row " + std::to_string(r + 1) + ": empty host");
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace vhp
