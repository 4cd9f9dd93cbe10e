#pragma once

#include <doctest.h>

#include "formidex/tfcore.hpp"

namespace fdxtest {

inline double rel_diff(const formidex::CMatrix& a, const formidex::CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline void check_close(formidex::Complex got, formidex::Complex want, double rtol) {
  const double err = std::abs(got - want);
  CHECK_MESSAGE(err <= rtol * std::max(1.0, std::abs(want)), "got ", got, " want ", want);
}

}  // namespace fdxtest
