#pragma once

// Named example sprays.  A preset name may carry parameters:
//   flat2, flat3, flat(n=4)
//   anderson-thompson
//   yang(lambda=0.5), yang(lambda=0.5,n=3)
//   riemannian

#include "spraylab/spray.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spraylab {

struct Preset
{
    std::string name;        // canonical name with parameters
    std::string description;
    Spray spray;
    std::optional<Expression> finsler; // a Finsler function whose geodesic spray is projectively related, if known
};

/// Throws std::invalid_argument for unknown names or malformed parameters.
Preset preset(std::string_view name);

std::vector<std::string> preset_names();

/// |y| = sqrt(y1^2 + ... + yn^2).
Expression euclidean_norm(int n);

} // namespace spraylab
