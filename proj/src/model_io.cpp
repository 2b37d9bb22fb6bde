#include "aif/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aif {

namespace {

constexpr char kMagic[4] = {'A', 'I', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;

const char* kDimNames[5] = {"latency", "rate", "util_heavy", "util_medium", "util_light"};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double d) {
  auto v = std::bit_cast<std::uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("model file truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

std::string get_string(std::istream& in) {
  std::uint32_t len = get_u32(in);
  if (len > 1u << 20) throw std::runtime_error("model file string too long");
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw std::runtime_error("model file truncated");
  return s;
}

}  // namespace

void save_model(const GenerativeModel& model, std::ostream& out) {
  out.write(kMagic, 4);
  put_u32(out, kVersion);

  const auto& cards = model.space.cardinalities();
  put_u32(out, static_cast<std::uint32_t>(cards.size()));
  for (size_t d = 0; d < cards.size(); ++d) {
    put_string(out, d < 5 ? kDimNames[d] : "dim" + std::to_string(d));
    put_u32(out, static_cast<std::uint32_t>(cards[d]));
  }

  put_u32(out, static_cast<std::uint32_t>(model.A.num_factors()));
  for (int k = 0; k < model.A.num_factors(); ++k)
    put_u32(out, static_cast<std::uint32_t>(model.A.bins(k)));

  put_u32(out, static_cast<std::uint32_t>(model.space.size()));

  put_u32(out, static_cast<std::uint32_t>(model.policies.size()));
  for (const auto& p : model.policies) {
    put_u32(out, static_cast<std::uint32_t>(p.id));
    for (double w : p.weights) put_f64(out, w);
    put_string(out, p.label);
  }

  for (int k = 0; k < model.A.num_factors(); ++k)
    for (double c : model.A.raw_counts(k)) put_f64(out, c);
  for (int a = 0; a < model.B.num_actions(); ++a)
    for (double c : model.B.raw_counts(a)) put_f64(out, c);
}

GenerativeModel load_model(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a model file (bad magic)");
  if (std::uint32_t v = get_u32(in); v != kVersion)
    throw std::runtime_error("unsupported model format version " + std::to_string(v));

  std::uint32_t n_dims = get_u32(in);
  if (n_dims == 0 || n_dims > 16) throw std::runtime_error("unreasonable dimension count");
  std::vector<int> cards;
  for (std::uint32_t d = 0; d < n_dims; ++d) {
    get_string(in);  // dimension name; informational
    cards.push_back(static_cast<int>(get_u32(in)));
  }
  StateSpace space(cards);

  std::uint32_t n_factors = get_u32(in);
  if (n_factors == 0 || n_factors > 16) throw std::runtime_error("unreasonable factor count");
  std::vector<int> bins;
  for (std::uint32_t k = 0; k < n_factors; ++k) bins.push_back(static_cast<int>(get_u32(in)));

  std::uint32_t n_states = get_u32(in);
  if (static_cast<int>(n_states) != space.size())
    throw std::runtime_error("state count does not match dimension cardinalities");

  std::uint32_t n_policies = get_u32(in);
  if (n_policies == 0 || n_policies > 1024) throw std::runtime_error("unreasonable policy count");
  std::vector<Policy> policies;
  for (std::uint32_t i = 0; i < n_policies; ++i) {
    Policy p;
    p.id = static_cast<int>(get_u32(in));
    for (double& w : p.weights) w = get_f64(in);
    p.label = get_string(in);
    policies.push_back(std::move(p));
  }

  ObservationModel A(bins, space.size(), 1.0);
  for (std::uint32_t k = 0; k < n_factors; ++k) {
    auto raw = A.raw_counts_mutable(static_cast<int>(k));
    for (double& c : raw) c = get_f64(in);
  }
  A.refresh();

  TransitionModel B(space.size(), static_cast<int>(n_policies), 1.0, 0.0);
  for (std::uint32_t a = 0; a < n_policies; ++a) {
    auto raw = B.raw_counts_mutable(static_cast<int>(a));
    for (double& c : raw) c = get_f64(in);
  }
  B.refresh();

  return GenerativeModel{std::move(space), std::move(A), std::move(B),
                         PreferenceModel::baseline(), std::move(policies)};
}

void save_model_file(const GenerativeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_model(model, out);
  if (!out) throw std::runtime_error("write failed for " + path);
}

GenerativeModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_model(in);
}

}  // namespace aif
