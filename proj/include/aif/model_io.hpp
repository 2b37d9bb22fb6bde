#pragma once

#include <iosfwd>
#include <string>

#include "aif/model.hpp"

namespace aif {

/// Binary model snapshot ("AIFM", version 1). Self-describing: dimension
/// names in radix order (most significant first), bin cardinalities, the
/// policy table, then raw A and B pseudo-counts as little-endian 64-bit
/// floats. See docs in README for the exact layout.
void save_model(const GenerativeModel& model, std::ostream& out);
void save_model_file(const GenerativeModel& model, const std::string& path);

/// Throws std::runtime_error on bad magic, unsupported version, dimension
/// mismatches, or truncation. Preferences are not serialized; the loaded
/// model carries baseline C.
GenerativeModel load_model(std::istream& in);
GenerativeModel load_model_file(const std::string& path);

}  // namespace aif
