#pragma once

#include <string>
#include <string_view>

#include "vr/params.hpp"

namespace vr {

/// Flat binary parameter file, little-endian throughout:
///
///   magic   8 bytes  "VRPARAMS"
///   version u32      1
///   count   u32      number of blocks
///   per block: name_len u32, name bytes, rows u64, cols u64
///   payload: every block's values as f64, column-major, in block order
void save_params(const ParamSet& params, const std::string& path);
ParamSet load_params(const std::string& path);

std::string read_file(const std::string& path);

/// SHA-1 of "blob <size>\0<content>" as lowercase hex, matching
/// `git hash-object`.
std::string git_blob_hash(std::string_view content);

}  // namespace vr
