#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace drsd {

using Vec = Eigen::VectorXd;

// Radical inverse of `index` in base `base`.
double radical_inverse(std::size_t index, unsigned base);

// Point `index` of the Halton sequence in [0,1)^dim. Supports dim <= 32.
std::vector<double> halton_point(std::size_t index, std::size_t dim);

// Maps a point of [-1,1]^n onto the closed unit ball by radial rescaling
// (the cube's boundary lands on the sphere).
Vec cube_to_ball(const Vec& v);

// Deterministic low-discrepancy sample of the ball {|x| <= radius} in R^n.
// `seed` offsets the Halton index so distinct seeds give disjoint streams.
std::vector<Vec> halton_ball(std::size_t n, double radius, std::size_t count,
                             std::size_t seed = 0);

// Origin, the 2n axis points at +-radius, then Halton ball points until
// `count` points total.
std::vector<Vec> state_grid(std::size_t n, double radius, std::size_t count,
                            std::size_t seed = 0);

// Evenly spaced unit vectors on the circle (n = 2) or Halton points pushed to
// the sphere (n > 2). For n = 1 returns {+1, -1}.
std::vector<Vec> unit_directions(std::size_t n, std::size_t count);

}  // namespace drsd
