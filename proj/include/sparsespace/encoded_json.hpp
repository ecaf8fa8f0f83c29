#pragma once

#include <string>
#include <string_view>

#include "sparsespace/transform.hpp"

namespace sparsespace {

// Layout (keys in this order):
//   format        "sparsespace.encoded/1"
//   spec          {name, steps: [{op: pack|block|schedule, ...}]}
//   origin_dims   [n_rows, n_cols]
//   machines, stream_length
//   values        m arrays of L numbers
//   col_idx       m arrays of L integers
//   structure     {kind: "row_len", row_len: m arrays}
//                 | {kind: "row_blocks", row_blocks: [...], factor}
//   provenance    m arrays of L entries, each [i, j] or null (padding)
// Numbers are written in shortest round-trip form, so parse(dump(e)) == e.
std::string encoded_to_json(const EncodedMatrix& e, int indent = -1);

// Throws ErrorCode::SchemaError on any shape or type problem. Does not check
// semantic integrity; see verify_integrity().
EncodedMatrix encoded_from_json(std::string_view text);

std::string spec_to_json(const RepresentationSpec& spec);
RepresentationSpec spec_from_json(std::string_view text);

}  // namespace sparsespace
