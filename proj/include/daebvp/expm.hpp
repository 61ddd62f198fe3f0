#pragma once

#include "types.hpp"

namespace daebvp
{

// Inputs whose 1-norm exceeds this are rejected as Overflow.
inline constexpr double default_exponential_norm_bound = 700.0;

/*
 * e^M by scaling and squaring with the [13/13] Pade approximant
 * (Higham 2005). Lower-degree approximants are used when ||M||_1 allows.
 */
Matrix matrix_exponential(const Matrix &M, double norm_bound = default_exponential_norm_bound);

} // namespace daebvp
