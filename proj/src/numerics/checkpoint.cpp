#include "infoasym/numerics/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "infoasym/errors.hpp"

namespace infoasym {

namespace {

constexpr std::array<char, 8> kMagic{'I', 'A', 'M', 'L', 'P', '\0', '\0', '\0'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw InvalidInput("checkpoint truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes[i]) << (8 * i));
  return value;
}

std::uint8_t activation_code(Activation a) {
  switch (a) {
    case Activation::Elu: return 0;
    case Activation::Tanh: return 1;
    case Activation::Identity: return 2;
  }
  return 2;
}

Activation activation_from_code(std::uint8_t c) {
  switch (c) {
    case 0: return Activation::Elu;
    case 1: return Activation::Tanh;
    case 2: return Activation::Identity;
    default: throw InvalidInput("checkpoint has an unknown activation code");
  }
}

}  // namespace

void write_checkpoint(std::ostream& out, const Mlp& net) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (auto s : net.layer_sizes()) put_le<std::uint64_t>(out, s);
  for (auto a : net.activations()) put_le<std::uint8_t>(out, activation_code(a));
  put_le<std::uint64_t>(out, net.param_count());
  for (double p : net.params()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
}

Mlp read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidInput("not a network checkpoint");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw InvalidInput("unsupported checkpoint version " + std::to_string(version));
  const auto n_sizes = get_le<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) throw InvalidInput("checkpoint has an implausible layer count");
  std::vector<std::size_t> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  std::vector<Activation> acts(n_sizes - 2);
  for (auto& a : acts) a = activation_from_code(get_le<std::uint8_t>(in));
  Mlp net(std::move(sizes), std::move(acts));
  const auto n_params = get_le<std::uint64_t>(in);
  if (n_params != net.param_count()) throw InvalidInput("checkpoint parameter count does not match its layer sizes");
  std::vector<double> params(n_params);
  for (auto& p : params) p = std::bit_cast<double>(get_le<std::uint64_t>(in));
  net.set_params(params);
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open checkpoint for writing", path.string());
  write_checkpoint(out, net);
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint", path.string());
  return read_checkpoint(in);
}

}  // namespace infoasym
