#include "drsd/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "drsd/errors.hpp"

namespace drsd {

namespace {

constexpr std::array<unsigned, 32> kPrimes = {
    2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,  37,  41,  43,  47,  53,
    59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

}  // namespace

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<double> halton_point(std::size_t index, std::size_t dim) {
  if (dim > kPrimes.size()) {
    throw DomainError("halton_point: dimension above 32 not supported");
  }
  std::vector<double> p(dim);
  for (std::size_t d = 0; d < dim; ++d) p[d] = radical_inverse(index, kPrimes[d]);
  return p;
}

Vec cube_to_ball(const Vec& v) {
  const double n2 = v.norm();
  if (n2 == 0.0) return v;
  return v * (v.cwiseAbs().maxCoeff() / n2);
}

std::vector<Vec> halton_ball(std::size_t n, double radius, std::size_t count,
                             std::size_t seed) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = halton_point(seed + i + 1, n);
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) v[static_cast<Eigen::Index>(d)] = 2.0 * p[d] - 1.0;
    out.push_back(radius * cube_to_ball(v));
  }
  return out;
}

std::vector<Vec> state_grid(std::size_t n, double radius, std::size_t count,
                            std::size_t seed) {
  std::vector<Vec> out;
  out.reserve(count);
  out.push_back(Vec::Zero(static_cast<Eigen::Index>(n)));
  for (std::size_t d = 0; d < n && out.size() < count; ++d) {
    for (double sign : {1.0, -1.0}) {
      if (out.size() >= count) break;
      Vec e = Vec::Zero(static_cast<Eigen::Index>(n));
      e[static_cast<Eigen::Index>(d)] = sign * radius;
      out.push_back(e);
    }
  }
  const std::size_t rest = count > out.size() ? count - out.size() : 0;
  for (auto& p : halton_ball(n, radius, rest, seed)) out.push_back(std::move(p));
  return out;
}

std::vector<Vec> unit_directions(std::size_t n, std::size_t count) {
  std::vector<Vec> out;
  if (n == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
    return out;
  }
  out.reserve(count);
  if (n == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) /
                        static_cast<double>(count);
      Vec d(2);
      d << std::cos(th), std::sin(th);
      out.push_back(d);
    }
    return out;
  }
  std::size_t idx = 1;
  while (out.size() < count) {
    const auto p = halton_point(idx++, n);
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) v[static_cast<Eigen::Index>(d)] = 2.0 * p[d] - 1.0;
    const double nv = v.norm();
    if (nv < 1e-3 || nv > 1.0) continue;
    out.push_back(v / nv);
  }
  return out;
}

}  // namespace drsd
