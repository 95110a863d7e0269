#include "insulate/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ins {

void write_grid(const std::string& path, const GridField& g) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  std::fprintf(f, "IFGRID v1 %d %d %.17g %.17g %.17g %.17g\n", g.nx, g.ny, g.x0, g.y0, g.dx, g.dy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i)
      std::fprintf(f, "%.17g%c", g.at(i, j), i + 1 == g.nx ? '\n' : ' ');
  }
  std::fclose(f);
}

GridField read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file '" + path + "'");
  std::string magic, version;
  int nx = 0, ny = 0;
  double x0 = 0, y0 = 0, dx = 0, dy = 0;
  in >> magic >> version >> nx >> ny >> x0 >> y0 >> dx >> dy;
  if (!in || magic != "IFGRID" || version != "v1")
    throw ConfigError("'" + path + "' is not an IFGRID v1 file");
  if (nx <= 0 || ny <= 0 || !(dx > 0.0) || !(dy > 0.0))
    throw ConfigError("'" + path + "': bad grid header");
  GridField g(nx, ny, x0, y0, dx, dy, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!(in >> g.at(i, j))) throw ConfigError("'" + path + "': truncated grid data");
    }
  return g;
}

TraceWriter::TraceWriter(const std::string& path) : path_(path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "iter,total,dirichlet,surface,volume,grad_norm\n";
}

void TraceWriter::row(int iter, const EnergyBreakdown& e, double grad_norm) {
  FILE* f = std::fopen(path_.c_str(), "a");
  if (!f) throw ConfigError("cannot append to '" + path_ + "'");
  std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", iter, e.total, e.dirichlet, e.surface,
               e.volume, grad_norm);
  std::fclose(f);
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "' for checksumming");
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::string checksum_hex(uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace ins
