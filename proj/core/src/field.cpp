#include "flowpet/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flowpet {

ScalarField::ScalarField(const Grid& g, std::vector<double> values)
    : grid_(g), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != g.cells())
    throw std::invalid_argument("ScalarField: value count does not match grid");
}

bool ScalarField::all_finite() const {
  return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

double ScalarField::sum() const { return std::accumulate(v_.begin(), v_.end(), 0.0); }

double ScalarField::stddev() const {
  const double m = mean();
  double acc = 0.0;
  for (double x : v_) acc += (x - m) * (x - m);
  return std::sqrt(acc / size());
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (size_t c = 0; c < v_.size(); ++c) v_[c] += o.v_[c];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (size_t c = 0; c < v_.size(); ++c) v_[c] -= o.v_[c];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

double dot(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (int c = 0; c < a.size(); ++c) acc += a[c] * b[c];
  return acc;
}

}  // namespace flowpet
