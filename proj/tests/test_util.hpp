#pragma once

#include <complex>
#include <variant>

#include "bcft/types.hpp"

namespace testutil {

inline double rel(bcft::cplx a, bcft::cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class V>
bcft::cplx value_of(const V& v) {
  return std::get<bcft::cplx>(v);
}

}  // namespace testutil
