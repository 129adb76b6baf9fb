#pragma once

#include <optional>
#include <span>

#include "curbside/field.hpp"

namespace curbside::eikonal {

// Smallest admissible finite unit cost; keeps 1/C and wave speeds bounded.
inline constexpr double kMinCost = 1e-3;

// First-order upwind fast marching for ||grad phi|| = C on a 4-neighbor
// grid. phi = 0 at every target; cells with C = +inf are impassable and
// cells unreachable through finite-cost cells end up at +inf. Heap ties are
// broken by cell index, so the result is bit-stable across runs.
//
// Preconditions (checked): targets non-empty, every target in bounds with
// finite cost, every finite cost >= kMinCost.
ScalarField solve_eikonal(const ScalarField& cost, std::span<const int> targets);

// Central-difference gradient of phi bilinearly interpolated at p. Falls
// back to one-sided differences next to +inf cells and drops +inf corners
// from the interpolation; returns nullopt when every surrounding cell is
// unreachable. The vector is the raw (unnormalized) gradient.
std::optional<Vec2> try_sample_gradient(const ScalarField& phi, Vec2 p);

// Throwing variant of try_sample_gradient (SimulationError when stuck).
Vec2 sample_gradient(const ScalarField& phi, Vec2 p);

} // namespace curbside::eikonal
