#pragma once

#include "gaplab/util.hpp"

namespace gaplab {

/// Uniform periodic grid over an integer number of unit period cells,
/// centered so that x = 0 is a grid point on a cell boundary.
struct Grid1D {
  int cells = 0;            // number of period cells in the domain
  int points_per_cell = 0;  // m
  double h = 0;             // 1/m
  int n = 0;                // cells * m
  int center = 0;           // index of x = 0

  static Grid1D make(int cells, int points_per_cell) {
    if (cells < 1 || points_per_cell < 2)
      throw Error("grid", "grid needs cells >= 1 and points_per_cell >= 2");
    Grid1D g;
    g.cells = cells;
    g.points_per_cell = points_per_cell;
    g.h = 1.0 / points_per_cell;
    g.n = cells * points_per_cell;
    g.center = (cells / 2) * points_per_cell;
    return g;
  }

  double x(int i) const { return (i - center) * h; }
  double length() const { return double(cells); }
  int wrap(int i) const { return (i % n + n) % n; }
  int cell_offset(int i) const { return i % points_per_cell; }
  int cell_of(int i) const { return i / points_per_cell; }

  bool same_as(const Grid1D& o) const {
    return cells == o.cells && points_per_cell == o.points_per_cell;
  }
};

}  // namespace gaplab
