#pragma once

#include "apsolve/errors.hpp"
#include "apsolve/poly.hpp"
#include "apsolve/poly_rh.hpp"
#include "apsolve/quadrature.hpp"
#include "apsolve/serialize.hpp"
#include "apsolve/shift.hpp"
#include "apsolve/torus.hpp"
#include "apsolve/weights.hpp"

namespace apsolve {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace apsolve
