// JSON (de)serialization of space descriptors and measure specs.
#pragma once

#include <json.hpp>

#include "sublab/geometry.hpp"

namespace sublab {

using json = nlohmann::ordered_json;

// {"kind":"steptwo","n":..,"m":..,"B":[[[..]]],"kappa":..,"require_htype":..}
// {"kind":"grushin","n":..,"m":..,"eta":..}
// {"kind":"greiner","n":..,"zeta":..}
// {"kind":"filiform","n":..}
// {"kind":"heisenberg","n":..,"kappa":..}   (sugar for the canonical H-type H^n)
json kind_to_json(const SpaceKind& kind);
SpaceKind kind_from_json(const json& j);

// kind document plus derived quantities (alpha, Q, weights, dims) for reports
json space_to_json(const Space& space);
Space space_from_json(const json& j);

} // namespace sublab
