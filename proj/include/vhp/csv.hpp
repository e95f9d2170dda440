// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <string>
#include <vector>

#include "vhp/records.hpp"

namespace vhp {

// Split a CSV stream into rows of fields. Quoted fields may contain commas,
// doubled-quote escapes and embedded line breaks; LF and CRLF both work.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in);

// Parse a tabular corpus. The first row is a header naming (at least) the
// three requested columns; every data row yields one record with the same
// normalization as parse_fasta. Missing column names are a ConfigError;
// rows with the wrong field count are a ParseError with the row number.
std::vector<SequenceRecord> parse_csv(std::istream& in,
                                      const std::string& seq_column,
                                      const std::string& host_column,
                                      const std::string& id_column);

// One CSV field, quoted only when needed.
std::string csv_escape(const std::string& field);

}  // namespace vhp
