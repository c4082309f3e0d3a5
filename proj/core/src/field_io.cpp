#include "difflab/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "difflab/errors.hpp"

namespace difflab {

namespace {

constexpr char kMagic[4] = {'D', 'L', 'F', '1'};

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw NumericError("binary field file truncated");
  return v;
}

}  // namespace

void write_radial_csv(const ScalarField& f, const std::string& path) {
  const auto& g = f.grid->radial();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os << std::setprecision(17);
  os << (f.log_values ? "r,value,log_value\n" : "r,value\n");
  for (std::size_t i = 0; i < g.r.size(); ++i) {
    os << g.r[i] << ',' << f.values[i];
    if (f.log_values) os << ',' << (*f.log_values)[i];
    os << '\n';
  }
  if (!os) throw ConfigError("failed writing " + path);
}

void write_cartesian_binary(const ScalarField& f, const std::string& path) {
  const auto& g = f.grid->cartesian();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  write_pod(os, std::uint32_t{2});
  write_pod(os, static_cast<std::uint64_t>(g.nx));
  write_pod(os, static_cast<std::uint64_t>(g.ny));
  write_pod(os, g.h);
  write_pod(os, g.origin[0]);
  write_pod(os, g.origin[1]);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw ConfigError("failed writing " + path);
}

ScalarField read_cartesian_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError(path + " is not a binary field file");
  const auto ndim = read_pod<std::uint32_t>(is);
  if (ndim != 2) {
    std::ostringstream os;
    os << path << ": unsupported dimension " << ndim;
    throw UnsupportedError(os.str());
  }
  CartesianGrid2D g;
  g.nx = static_cast<int>(read_pod<std::uint64_t>(is));
  g.ny = static_cast<int>(read_pod<std::uint64_t>(is));
  g.h = read_pod<double>(is);
  g.origin[0] = read_pod<double>(is);
  g.origin[1] = read_pod<double>(is);
  if (g.nx <= 0 || g.ny <= 0 || !(g.h > 0))
    throw ConfigError(path + ": malformed grid header");
  ScalarField f;
  f.grid = std::make_shared<Grid>(Grid{g});
  f.values.resize(g.node_count());
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is) throw NumericError(path + " truncated");
  f.mask.assign(g.node_count(), kMaskInside);
  return f;
}

}  // namespace difflab
