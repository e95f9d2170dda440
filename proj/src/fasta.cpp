// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#include "vhp/fasta.hpp"

#include <cctype>
#include <string>

namespace vhp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// host=<value> token: must start the description or follow whitespace; the
// value runs to the end of the line.
std::string host_from_description(const std::string& desc) {
  const std::string key = "host=";
  std::size_t pos = 0;
  while ((pos = desc.find(key, pos)) != std::string::npos) {
    if (pos == 0 || std::isspace(static_cast<unsigned char>(desc[pos - 1])))
      return trim(desc.substr(pos + key.size()));
    pos += key.size();
  }
  return desc;
}

}  // namespace

std::vector<SequenceRecord> parse_fasta(std::istream& in, bool require_host) {
  std::vector<SequenceRecord> records;
  SequenceRecord current;
  bool in_record = false;
  std::size_t line_no = 0;

  auto finish_record = [&]() {
    if (!in_record) return;
    if (current.sequence.empty())
      throw ParseError("FASTA record '" + current.id + "': empty sequence body");
    records.push_back(std::move(current));
    current = SequenceRecord{};
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;

    if (stripped[0] == '>') {
      finish_record();
      in_record = true;
      const std::string header = trim(stripped.substr(1));
      const std::size_t sp = header.find_first_of(" \t");
      current.id = header.substr(0, sp);
      const std::string desc = sp == std::string::npos ? std::string{} : trim(header.substr(sp + 1));
      current.host = host_from_description(desc);
      if (current.id.empty())
        throw ParseError("FASTA line " + std::to_string(line_no) + ": header has no id");
      if (current.host.empty() && require_host)
        throw ParseError("FASTA record '" + current.id + "' (line " + std::to_string(line_no) +
                         "): no host label in description");
    } else {
      if (!in_record)
        throw ParseError("FASTA line " + std::to_string(line_no) +
                         ": expected '>' at record start");
      for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        current.sequence.push_back(
            static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
    }
  }
  finish_record();
  return records;
}

}  // namespace vhp
