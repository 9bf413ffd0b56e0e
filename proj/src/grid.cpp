#include "msopinf/grid.hpp"

namespace msopinf {

Vector PeriodicGrid1D::nodes() const {
    Vector x(n);
    for (int j = 0; j < n; ++j) x[j] = node(j);
    return x;
}

PeriodicGrid1D make_grid_1d(double a, double b, int n) {
    if (!(b > a)) throw ConfigError("grid: require b > a");
    if (n < 4) throw ConfigError("grid: require at least 4 nodes");
    return PeriodicGrid1D{a, b, n};
}

PeriodicGrid2D make_grid_2d(double a, double b, int n) {
    PeriodicGrid1D axis = make_grid_1d(a, b, n);
    return PeriodicGrid2D{axis, axis};
}

}  // namespace msopinf
