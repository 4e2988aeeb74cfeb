#include "dsps/lp/simplex.hpp"

namespace dsps::lp {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

template struct Problem<double>;
template class detail::RevisedSimplex<double>;

}  // namespace dsps::lp
