#include "nbcpp/params.hpp"

#include "nbcpp/lattice.hpp"
#include "nbcpp/walk.hpp"

namespace nbcpp {

std::vector<std::string> ModelParams::validate() const {
  std::vector<std::string> bad;
  if (d < 1 || d > lattice::kMaxDim)
    bad.push_back("d: must be between 1 and 6");
  if (!(lambda > 0)) bad.push_back("lambda: must be > 0");
  if (L < 3) bad.push_back("L: must be >= 3");
  return bad;
}

bool ModelParams::supercritical() const {
  if (d < 3) return false;
  return walk::supercritical(d, lambda);
}

}  // namespace nbcpp
