#include "thinflow/grid.hpp"

#include <stdexcept>

namespace thinflow {

namespace {
void check_axis(int n, const char* name) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument(std::string("grid.") + name +
                                " must be an even integer >= 4, got " +
                                std::to_string(n));
  }
}
}  // namespace

void GridSpec::validate() const {
  check_axis(nx, "nx");
  check_axis(ny, "ny");
  check_axis(nz, "nz");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw std::invalid_argument("grid.dealias_fraction must lie in (0,1]");
  }
}

std::string GridSpec::describe() const {
  return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
}

}  // namespace thinflow
