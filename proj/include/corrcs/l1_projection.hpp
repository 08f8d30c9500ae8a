#pragma once

#include <span>

#include "corrcs/matrix.hpp"

namespace corrcs {

/// Euclidean projection of v onto {x : ||x||_1 <= tau}, tau >= 0.
/// Sort-based exact algorithm, O(N log N).
Vector project_l1_ball(std::span<const double> v, double tau);

/// In-place variant writing into `out` (same length as v).
void project_l1_ball(std::span<const double> v, double tau, std::span<double> out);

}  // namespace corrcs
