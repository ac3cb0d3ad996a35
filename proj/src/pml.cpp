#include "wavelab/pml.hpp"

#include <stdexcept>

namespace wavelab {

void validate(const PmlProfile& p) {
  if (!(p.width > 0.0)) throw std::invalid_argument("pml: width must be > 0");
  if (!(p.strength >= 0.0)) throw std::invalid_argument("pml: strength must be >= 0");
  if (!(p.cfs_alpha >= 0.0)) throw std::invalid_argument("pml: alpha must be >= 0");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("pml: gamma must be > 0");
  if (!(p.exponent >= 0.0)) throw std::invalid_argument("pml: exponent must be >= 0");
  if (p.direction != 1 && p.direction != -1)
    throw std::invalid_argument("pml: direction must be +1 or -1");
}

double damping_at(const PmlProfile& p, double xi) {
  const double depth = p.depth(xi);
  if (depth <= 0.0) return 0.0;
  if (depth >= p.width) return p.strength;
  return p.strength * std::pow(depth / p.width, p.exponent);
}

double damping_strength(double cp, double delta, double tol) {
  if (!(cp > 0.0)) throw std::invalid_argument("damping_strength: c_p must be > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("damping_strength: delta must be > 0");
  if (!(tol > 0.0 && tol <= 1.0))
    throw std::invalid_argument("damping_strength: tol must be in (0, 1]");
  return 4.0 * cp / (2.0 * delta) * std::log(1.0 / tol);
}

}  // namespace wavelab
