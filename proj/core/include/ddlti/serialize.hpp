#pragma once

#include <string>

#include "ddlti/ddrep.hpp"
#include "ddlti/inversion.hpp"
#include "ddlti/lqr.hpp"

namespace ddlti {

// JSON documents; numbers use the shortest decimal form that round-trips exactly.
std::string to_json(const Representation& rep);
Representation representation_from_json(const std::string& text);

struct ControllerDocument {
  Representation rep;
  LQRWeights weights;
  Matrix K;
};

std::string to_json(const ControllerDocument& doc);
ControllerDocument controller_from_json(const std::string& text);

std::string to_json(const InverseRepresentation& ir);
InverseRepresentation inverse_from_json(const std::string& text);

}  // namespace ddlti
