// Shared helpers for the test suites.
#pragma once

#include <cmath>
#include <vector>

#include "sublab/geometry.hpp"
#include "sublab/rng.hpp"

namespace sublab::test {

inline Point pt(std::initializer_list<double> coords) {
    Point p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (double c : coords) p[i++] = c;
    return p;
}

inline Point random_point(const Space& space, Philox& rng, double scale = 1.0) {
    Point p(space.ambient_dim());
    for (int i = 0; i < space.ambient_dim(); ++i)
        p[i] = scale * rng.gaussian() * std::pow(1.5, space.dilation_weights()[i]);
    return p;
}

// plain composite Simpson on [a,b]; independent oracle for 1-D integrals
template <typename F>
double simpson(const F& f, double a, double b, int n = 2000) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// least-squares slope of y against x
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace sublab::test
