#pragma once

#include <functional>
#include <vector>

namespace pairinfer {

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::vector<double> project(std::vector<double> x) const;
  bool contains(const std::vector<double>& x) const;
};

struct SimplexOptions {
  int max_evaluations = 50000;
  double x_tolerance = 1e-10;  // max vertex distance (inf-norm) from the best vertex
  double f_tolerance = 1e-12;  // max objective spread across vertices
  double initial_step = 0.05;  // relative step for the starting simplex
  double zero_step = 0.00025;  // absolute step for zero coordinates
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimisation inside `box`. Vertices proposed outside the box
/// are projected onto it. `objective` may return +inf for infeasible points.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const Box& box, const SimplexOptions& options = {});

}  // namespace pairinfer
