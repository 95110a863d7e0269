#ifndef INSULATE_IO_HPP
#define INSULATE_IO_HPP

#include <cstdint>
#include <string>

#include "insulate/types.hpp"

namespace ins {

// Grid dump format, bit-exact round trip:
//   line 1: IFGRID v1 <nx> <ny> <x0> <y0> <dx> <dy>
//   then ny lines of nx decimal values (17 significant digits).
void write_grid(const std::string& path, const GridField& g);
GridField read_grid(const std::string& path);

// CSV trace writer with the fixed header
// iter,total,dirichlet,surface,volume,grad_norm
class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void row(int iter, const EnergyBreakdown& e, double grad_norm);
  std::string path() const { return path_; }

 private:
  std::string path_;
};

uint64_t fnv1a64(const std::string& bytes);
uint64_t file_checksum(const std::string& path);
std::string checksum_hex(uint64_t h);

}  // namespace ins

#endif
