#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "taxis/errors.hpp"
#include "taxis/grid.hpp"

namespace taxis {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return out;
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

void write_fld(const std::filesystem::path& path, const Grid& g, double t, const Field& phi) {
  require_conforming(phi, g);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "FLD1 " << g.nx() << ' ' << g.ny() << ' ' << format_double(g.lx()) << ' '
      << format_double(g.ly()) << ' ' << format_double(t) << '\n';
  for (double v : phi.values()) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw Error("write failed for " + path.string());
}

Snapshot read_fld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  std::size_t nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0, t = 0.0;
  hs >> magic >> nx >> ny >> lx >> ly >> t;
  if (!hs || magic != "FLD1")
    throw StructuralError("bad FLD1 header in " + path.string() + ": '" + header + "'");
  Grid g(nx, ny, lx, ly);
  std::vector<double> values(g.size());
  for (double& v : values) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw StructuralError("truncated FLD1 payload in " + path.string());
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  return Snapshot{g, t, Field(std::move(values))};
}

} // namespace taxis
