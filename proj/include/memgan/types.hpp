#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace memgan {

// Seeds live in R^d_tilde, images in R^d. Plain vectors; every operation
// checks the dimension it expects.
using SeedVector = std::vector<double>;
using ImageVector = std::vector<double>;

struct DimensionSpec {
  int d = 0;        // image dimension (pixels)
  int d_tilde = 0;  // code dimension
  double sigma = 1.0;

  DimensionSpec() = default;
  DimensionSpec(int d_, int d_tilde_, double sigma_)
      : d(d_), d_tilde(d_tilde_), sigma(sigma_) {
    if (d_tilde < 1) throw std::invalid_argument("DimensionSpec: d_tilde must be >= 1");
    if (d <= d_tilde) throw std::invalid_argument("DimensionSpec: require d_tilde < d");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("DimensionSpec: sigma must be positive and finite");
  }

  int spacing() const { return d / d_tilde; }  // floor(d / d_tilde)
};

inline void require_dim(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace memgan
