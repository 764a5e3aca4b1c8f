#pragma once

#include <string>

#include "cdwork/errors.hpp"

namespace cdwork {

enum class ProtocolKind { linear, smoothstep };

// Ramp of a scalar control parameter over s in [0,1].
// value(0) = lambda_i and value(1) = lambda_f exactly; the smoothstep ramp has
// zero slope at both endpoints.
struct Protocol {
  ProtocolKind kind = ProtocolKind::smoothstep;
  double lambda_i = 0.0;
  double lambda_f = 0.0;
};

double protocol_value(const Protocol& p, double s);
double protocol_deriv(const Protocol& p, double s);

std::string protocol_kind_name(ProtocolKind k);
ProtocolKind protocol_kind_from_name(const std::string& name);

}  // namespace cdwork
