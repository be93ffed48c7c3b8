#include "cmlab/run/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmlab/core/errors.hpp"

namespace cmlab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw input_error("checkpoint: truncated file");
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw input_error("checkpoint: truncated string");
  return s;
}

void put_doubles(std::ostream& os, const Vec& v) {
  put<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Vec get_doubles(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  Vec v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw input_error("checkpoint: truncated array");
  return v;
}

constexpr char kMagic[4] = {'C', 'M', 'C', 'K'};

}  // namespace

void Checkpoint::save(const std::string& path) const {
  namespace fs = std::filesystem;
  const fs::path target_path(path);
  if (target_path.has_parent_path()) fs::create_directories(target_path.parent_path());
  const fs::path tmp = target_path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw input_error("checkpoint: cannot write " + tmp.string());
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kMajor);
    put<std::uint32_t>(os, kMinor);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(model_kind));
    put_string(os, config_json);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(layout.size()));
    for (const ParamEntry& e : layout) {
      put_string(os, e.name);
      put<std::uint64_t>(os, e.rows);
      put<std::uint64_t>(os, e.cols);
      put<std::uint64_t>(os, e.offset);
    }
    put_doubles(os, online);
    put_doubles(os, target);
    put_doubles(os, velocity);
    put_doubles(os, moment2);
    put<std::uint64_t>(os, iteration);
    put_string(os, rng_state);
  }
  fs::rename(tmp, target_path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw input_error("checkpoint: bad magic in " + path);
  const auto major = get<std::uint32_t>(is);
  const auto minor = get<std::uint32_t>(is);
  (void)minor;  // minors are forward compatible
  if (major != kMajor)
    throw input_error("checkpoint: unsupported major version " + std::to_string(major));

  Checkpoint c;
  c.model_kind = static_cast<ModelKind>(get<std::uint8_t>(is));
  c.config_json = get_string(is);
  const auto entries = get<std::uint32_t>(is);
  c.layout.resize(entries);
  for (auto& e : c.layout) {
    e.name = get_string(is);
    e.rows = get<std::uint64_t>(is);
    e.cols = get<std::uint64_t>(is);
    e.offset = get<std::uint64_t>(is);
  }
  c.online = get_doubles(is);
  c.target = get_doubles(is);
  c.velocity = get_doubles(is);
  c.moment2 = get_doubles(is);
  c.iteration = get<std::uint64_t>(is);
  c.rng_state = get_string(is);
  return c;
}

Checkpoint Checkpoint::from_state(ModelKind kind, const std::string& config_json,
                                  const TrainState& state) {
  Checkpoint c;
  c.model_kind = kind;
  c.config_json = config_json;
  c.layout = state.ema.online.layout;
  c.online = state.ema.online.values;
  c.target = state.ema.target.values;
  c.velocity = state.velocity;
  c.moment2 = state.moment2;
  c.iteration = static_cast<std::uint64_t>(state.step);
  std::ostringstream os;
  state.rng.save(os);
  c.rng_state = os.str();
  return c;
}

TrainState Checkpoint::to_state() const {
  TrainState state;
  state.ema.online.values = online;
  state.ema.online.layout = layout;
  state.ema.target.values = target;
  if (!target.empty()) state.ema.target.layout = layout;
  state.velocity = velocity;
  state.moment2 = moment2;
  state.step = static_cast<long>(iteration);
  std::istringstream is(rng_state);
  state.rng.load(is);
  return state;
}

}  // namespace cmlab
