#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sccl/optim.hpp"
#include "sccl/tensor.hpp"

namespace sccl {

struct StoredTensor {
  Shape shape;
  std::vector<double> values;
};

/// Parameter snapshot plus an opaque metadata string (the model bundle keeps
/// its config, vocabularies and lexicon there).
struct Checkpoint {
  std::string metadata;
  std::map<std::string, StoredTensor> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

Checkpoint snapshot(const ParameterSet& params, std::string metadata = {});

/// Copies stored values into matching parameters; names and shapes must agree exactly.
void restore(const Checkpoint& ckpt, ParameterSet& params);

/// Binary layout (little-endian):
///   "SCCLCKPT" u32 version | u64 len, metadata bytes | u32 count |
///   count x { u32 len, name | u32 rank, u64 dims[rank] | f64 values[] }
/// Tensors are written in name order; values round-trip bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Same content as JSON: {"version", "metadata", "tensors": {name: {"shape", "values"}}}.
void save_checkpoint_json(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_json(const std::filesystem::path& path);

}  // namespace sccl
