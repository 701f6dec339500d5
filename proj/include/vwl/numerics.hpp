#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vwl::num {

/// Adaptive Gauss-Kronrod (31 point) on [a, b]; for smooth integrands.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-14);

/// Tanh-sinh on [a, b]; tolerates integrable endpoint singularities.
double integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                   double tol = 1e-14);

/// Bisection on a sign-changing bracket, iterated until the bracket stops
/// shrinking or its relative width drops below `rel_tol`.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-15);

/// Four-point Lagrange interpolation weights for abscissae `xs` at `x`.
void lagrange4_weights(std::span<const double, 4> xs, double x, std::span<double, 4> w);

/// Finite-difference weights (Fornberg) at `z` for nodes `x`; returns
/// weights[d][k] for derivative orders d = 0..max_deriv.
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int max_deriv);

/// Gregory (fourth-order end-corrected trapezoid) weights for n equally
/// spaced nodes with unit spacing; plain trapezoid below 8 nodes.
std::vector<double> gregory_weights(std::size_t n);

/// Worker count: VWL_THREADS if set and positive, hardware concurrency otherwise.
unsigned thread_count();

/// Runs body(i) for i in [begin, end), split into contiguous chunks over
/// `thread_count()` threads. Iterations must not share mutable state.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace vwl::num
