#include "chemo/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chemo {

double SimParams::max_step() const {
  // without the perturbation the step operator is monotone for every h
  return c3 > 0.0 ? lambda / (2.0 * c3 * eps)
                  : std::numeric_limits<double>::infinity();
}

std::vector<std::string> SimParams::violations() const {
  std::vector<std::string> out;
  auto fmt = [](const char* what, double value) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
  };
  if (!(eps > 0.0 && eps <= 1.0)) out.push_back(fmt("eps must lie in (0, 1]", eps));
  if (!(lambda > 0.0 && lambda < eps))
    out.push_back(fmt("lambda must lie in (0, eps)", lambda));
  if (N < 1) out.push_back(fmt("N must be a positive integer", N));
  if (!(T > 0.0) || !std::isfinite(T)) out.push_back(fmt("T must be positive", T));
  if (!std::isfinite(eta)) out.push_back(fmt("eta must be finite", eta));
  if (!(c3 >= 0.0)) out.push_back(fmt("c3 must be nonnegative", c3));
  if (out.empty() && !(h() < max_step())) {
    std::ostringstream os;
    os << "stepsize rule h < lambda/(2 c3 eps) violated: h = " << h()
       << ", bound = " << max_step();
    out.push_back(os.str());
  }
  return out;
}

void SimParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid parameters:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

}  // namespace chemo
