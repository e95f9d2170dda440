// Copyright (c) 2026 vhp-toolkit contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <vector>

#include "vhp/records.hpp"

namespace vhp {

// Parse FASTA text. The host label comes from a `host=<value>` token in the
// description line (value runs to end of line); without one the whole
// description is the host. Sequence letters are uppercased and whitespace
// stripped; record order is preserved.
//
// Throws ParseError on a missing '>' at a record start (with line number),
// on an empty sequence body, and on a missing host label. Prediction-only
// inputs may carry no hosts: pass require_host = false to leave them empty.
std::vector<SequenceRecord> parse_fasta(std::istream& in, bool require_host = true);

}  // namespace vhp
