#pragma once

#include <string>

#include "roc/model.hpp"
#include "roc/types.hpp"

namespace roc {

/// Loads a plant from a JSON model file:
///   { "name": "...", "A": [[..]], "B_u": [[..]], "B_w": [[..]],
///     "Q": [[..]], "R": [[..]], "metadata": {...} }
/// Matrices are nested row-major arrays. Q and R are optional and default to
/// the identity. Throws ParseError on malformed input and InvalidModel when
/// the matrices violate a plant invariant.
PlantModel load_model(const std::string& path);

/// Parses the same schema from an in-memory JSON string.
PlantModel parse_model(const std::string& text);

/// Serializes a plant back to the model-file schema. Round-trips exactly.
std::string model_to_json(const PlantModel& model);

void save_model(const PlantModel& model, const std::string& path);

}  // namespace roc
