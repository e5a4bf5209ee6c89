#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "stt/tt.hpp"

namespace stt {

// Container layout (all integers little-endian, payload IEEE-754 doubles;
// this code targets little-endian hosts):
//   8-byte magic "TTRAIN01", u32 version, u8 kind (0 vector / 1 operator),
//   u8 quantized flag, u32 core count,
//   [if quantized] u32 axis count, then per axis u32 radix count + radices,
//   then per core u32 r0, u32 mode (and u32 col mode for operators), u32 r1,
//   followed by the core payload.

namespace {

constexpr char kMagic[8] = {'T', 'T', 'R', 'A', 'I', 'N', '0', '1'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t get_u32(std::istream& is) {
  uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("truncated train file");
  return v;
}

void put_u8(std::ostream& os, uint8_t v) { os.write(reinterpret_cast<const char*>(&v), 1); }

uint8_t get_u8(std::istream& is) {
  uint8_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 1)) throw std::runtime_error("truncated train file");
  return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& a) {
  os.write(reinterpret_cast<const char*>(a.data()),
           static_cast<std::streamsize>(a.size() * sizeof(double)));
}

void get_doubles(std::istream& is, std::vector<double>& a) {
  if (!is.read(reinterpret_cast<char*>(a.data()),
               static_cast<std::streamsize>(a.size() * sizeof(double))))
    throw std::runtime_error("truncated train file");
}

void put_header(std::ostream& os, uint8_t kind, uint32_t d,
                const std::vector<std::vector<int>>* factorization) {
  os.write(kMagic, sizeof kMagic);
  put_u32(os, kVersion);
  put_u8(os, kind);
  put_u8(os, factorization ? 1 : 0);
  put_u32(os, d);
  if (factorization) {
    put_u32(os, static_cast<uint32_t>(factorization->size()));
    for (const auto& radices : *factorization) {
      put_u32(os, static_cast<uint32_t>(radices.size()));
      for (int r : radices) put_u32(os, static_cast<uint32_t>(r));
    }
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  return os;
}

uint32_t checked_dim(uint32_t v) {
  if (v == 0 || v > (1u << 30)) throw std::runtime_error("train file has an implausible dimension");
  return v;
}

}  // namespace

void save_train(const std::string& path, const TTVector& v,
                const std::vector<std::vector<int>>* factorization) {
  v.validate();
  std::ofstream os = open_out(path);
  put_header(os, 0, static_cast<uint32_t>(v.cores.size()), factorization);
  for (const TTCore& c : v.cores) {
    put_u32(os, static_cast<uint32_t>(c.r0));
    put_u32(os, static_cast<uint32_t>(c.n));
    put_u32(os, static_cast<uint32_t>(c.r1));
    put_doubles(os, c.a);
  }
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

void save_train(const std::string& path, const TTMatrix& m,
                const std::vector<std::vector<int>>* factorization) {
  m.validate();
  std::ofstream os = open_out(path);
  put_header(os, 1, static_cast<uint32_t>(m.cores.size()), factorization);
  for (const TTMatCore& c : m.cores) {
    put_u32(os, static_cast<uint32_t>(c.r0));
    put_u32(os, static_cast<uint32_t>(c.m));
    put_u32(os, static_cast<uint32_t>(c.n));
    put_u32(os, static_cast<uint32_t>(c.r1));
    put_doubles(os, c.a);
  }
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

LoadedTrain load_train(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  char magic[8] = {};
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic))
    throw std::runtime_error("'" + path + "' is not a train container");
  if (get_u32(is) != kVersion)
    throw std::runtime_error("unsupported train container version in '" + path + "'");
  const uint8_t kind = get_u8(is);
  if (kind > 1) throw std::runtime_error("unknown train kind in '" + path + "'");
  const uint8_t quantized = get_u8(is);
  const uint32_t d = checked_dim(get_u32(is));

  LoadedTrain out;
  out.is_matrix = (kind == 1);
  if (quantized) {
    const uint32_t naxes = checked_dim(get_u32(is));
    out.factorization.resize(naxes);
    for (auto& radices : out.factorization) {
      const uint32_t nr = checked_dim(get_u32(is));
      radices.resize(nr);
      for (uint32_t i = 0; i < nr; ++i) radices[i] = static_cast<int>(checked_dim(get_u32(is)));
    }
  }
  for (uint32_t k = 0; k < d; ++k) {
    if (kind == 0) {
      const int r0 = static_cast<int>(checked_dim(get_u32(is)));
      const int n = static_cast<int>(checked_dim(get_u32(is)));
      const int r1 = static_cast<int>(checked_dim(get_u32(is)));
      TTCore c(r0, n, r1);
      get_doubles(is, c.a);
      out.vec.cores.push_back(std::move(c));
    } else {
      const int r0 = static_cast<int>(checked_dim(get_u32(is)));
      const int m = static_cast<int>(checked_dim(get_u32(is)));
      const int n = static_cast<int>(checked_dim(get_u32(is)));
      const int r1 = static_cast<int>(checked_dim(get_u32(is)));
      TTMatCore c(r0, m, n, r1);
      get_doubles(is, c.a);
      out.mat.cores.push_back(std::move(c));
    }
  }
  if (kind == 0)
    out.vec.validate();
  else
    out.mat.validate();
  return out;
}

}  // namespace stt
