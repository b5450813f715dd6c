#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "mtsa/attention_params.hpp"

namespace mtsa {

/// File read/write failures and corrupt containers.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sidecar JSON carrying the AttentionConfig for a parameter container.
inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

/// Writes the parameter container: magic "MTSA1", element width, head count,
/// a little-endian shape table, then row-major payloads per matrix in
/// declaration order (per head: w_t1 w_t2 w_t3 w_s1 b_s1 w_s2 b_s2, then w_o).
/// The config and mask assignment go to the JSON sidecar next to it.
template <typename T>
void save_params(const std::string& path, const MtsaParams<T>& params,
                 const AttentionConfig& cfg);

/// Reads a container written by save_params. The stored element width must
/// match T. Throws IoError on missing, truncated or corrupt files.
template <typename T>
std::pair<MtsaParams<T>, AttentionConfig> load_params(const std::string& path);

}  // namespace mtsa
