#pragma once

#include "msopinf/types.hpp"

namespace msopinf {

/// Uniform periodic grid on [a, b) with nodes x_j = a + h*j, h = (b-a)/n.
struct PeriodicGrid1D {
    double a = 0.0;
    double b = 1.0;
    int n = 0;

    double spacing() const { return (b - a) / n; }
    double node(int j) const { return a + spacing() * j; }
    Vector nodes() const;
};

PeriodicGrid1D make_grid_1d(double a, double b, int n);

/// Square periodic grid; flattening is x-fastest: index(j, k) = k*n + j
/// for node (x_j, y_k).
struct PeriodicGrid2D {
    PeriodicGrid1D x;
    PeriodicGrid1D y;

    int total_dim() const { return x.n * y.n; }
    int flat_index(int j, int k) const { return k * x.n + j; }
};

PeriodicGrid2D make_grid_2d(double a, double b, int n);

}  // namespace msopinf
