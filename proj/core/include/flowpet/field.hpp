#pragma once

#include <vector>

#include "flowpet/grid.hpp"

namespace flowpet {

/// One real value per grid cell.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid_(g), v_(static_cast<size_t>(g.cells()), fill) {}
  ScalarField(const Grid& g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }

  double& operator[](int c) { return v_[static_cast<size_t>(c)]; }
  double operator[](int c) const { return v_[static_cast<size_t>(c)]; }
  double& at(int i, int j) { return v_[static_cast<size_t>(grid_.index(i, j))]; }
  double at(int i, int j) const { return v_[static_cast<size_t>(grid_.index(i, j))]; }

  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  bool all_finite() const;
  double min() const;
  double max() const;
  double sum() const;
  double mean() const { return sum() / size(); }
  /// Population standard deviation over all cells.
  double stddev() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// Two reals (x and y components) per grid cell, stored as separate planes.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& g, double fill_x = 0.0, double fill_y = 0.0)
      : x_(g, fill_x), y_(g, fill_y) {}

  const Grid& grid() const { return x_.grid(); }

  ScalarField& x() { return x_; }
  const ScalarField& x() const { return x_; }
  ScalarField& y() { return y_; }
  const ScalarField& y() const { return y_; }

  bool all_finite() const { return x_.all_finite() && y_.all_finite(); }

 private:
  ScalarField x_;
  ScalarField y_;
};

/// Discrete L2 inner product (plain dot product, no cell-area weight).
double dot(const ScalarField& a, const ScalarField& b);

}  // namespace flowpet
