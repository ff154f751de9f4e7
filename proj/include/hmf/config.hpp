#pragma once

#include <string>

#include "hmf/numberfield.hpp"

namespace hmf {

// Loads a field fixture {"poly": [...], "basis": [[...]], "units": [[...]],
// "disc": ...} with exact rationals encoded as "p/q" strings. The returned
// field has been fully validated by the NumberField constructor.
NumberField load_field(const std::string& path);
NumberField load_field_json(const std::string& json_text);

}  // namespace hmf
