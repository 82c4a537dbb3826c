#pragma once

#include <span>
#include <string>
#include <vector>

// Sampled functions on weighted point sets.  The weight column carries
// the quadrature weight of the underlying measure, so sums of
// weight*value approximate integrals against that measure.

namespace fracspec {

struct GridFunction {
  int dim = 1;
  std::vector<double> coords;   // point-major: coords[p*dim + axis]
  std::vector<double> values;   // one per point
  std::vector<double> weights;  // one per point

  [[nodiscard]] std::size_t size() const { return values.size(); }

  [[nodiscard]] std::span<const double> point(std::size_t p) const {
    return {coords.data() + p * dim, static_cast<std::size_t>(dim)};
  }

  /// int f dmu  ~  sum w_p v_p
  [[nodiscard]] double integral() const;
  /// int f^2 dmu
  [[nodiscard]] double norm2() const;

  void check_consistent() const;
};

/// RFC 4180 CSV with header x1[,x2[,...]],value,weight and CRLF endings.
void write_csv(const GridFunction& g, const std::string& path);
GridFunction read_csv(const std::string& path);

/// Serialize to CSV text (used by the atomic writer).
std::string to_csv(const GridFunction& g);
GridFunction from_csv(const std::string& text);

}  // namespace fracspec
