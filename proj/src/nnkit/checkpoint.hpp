#pragma once

#include <filesystem>
#include <string>

#include "nnkit/params.hpp"

namespace seam::nn {

// Binary named-tensor container. Layout (all integers little-endian):
//   magic "SEAMNN01", u32 tensor count, then per tensor:
//   u32 name length, name bytes, u8 scalar width (4|8), u8 rank,
//   u32 dims[rank], payload (numel * width bytes).
// A JSON config sidecar is written next to it at <path>.json. Reload is
// bit-exact: save(load(save(x))) produces identical bytes.
template <typename T>
void save_checkpoint(const ParameterStoreT<T>& store, const std::filesystem::path& path,
                     const std::string& config_json);

// Fills an empty store in file order; returns the sidecar config text.
template <typename T>
std::string load_checkpoint(ParameterStoreT<T>& store, const std::filesystem::path& path);

}  // namespace seam::nn
