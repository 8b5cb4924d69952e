#pragma once

#include <filesystem>
#include <iosfwd>

#include "infoasym/numerics/mlp.hpp"

namespace infoasym {

/// Binary layout, all integers and floats little-endian:
///   magic "IAMLP\0\0\0" (8 bytes), u32 version (=1),
///   u32 n_sizes, n_sizes x u64 layer sizes,
///   (n_sizes - 2) x u8 hidden activation codes (0 elu, 1 tanh, 2 identity),
///   u64 n_params, n_params x f64 parameters.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Mlp& net);
Mlp read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Mlp& net);
Mlp load_checkpoint(const std::filesystem::path& path);

}  // namespace infoasym
