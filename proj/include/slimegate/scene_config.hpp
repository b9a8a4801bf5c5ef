#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slimegate/scene.hpp"

namespace slimegate {

class SceneValidationError : public std::runtime_error {
public:
    explicit SceneValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Parses a scene document. Throws ConfigError on syntax problems and
/// SceneValidationError when the parsed scene breaks an invariant.
Scene scene_from_config(std::string_view text);

/// Writes `scene` in canonical object order; parsing the result yields
/// canonicalize(scene) exactly.
std::string emit_config(const Scene& scene);

std::string scene_digest(const Scene& scene);

}  // namespace slimegate
