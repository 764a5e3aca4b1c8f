#include "cdwork/protocols.hpp"

namespace cdwork {

namespace {

void check_s(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw OutOfRangeError("s = " + std::to_string(s) + " outside [0,1]");
  }
}

}  // namespace

double protocol_value(const Protocol& p, double s) {
  check_s(s);
  const double span = p.lambda_f - p.lambda_i;
  switch (p.kind) {
    case ProtocolKind::linear:
      return p.lambda_i + span * s;
    case ProtocolKind::smoothstep:
      return p.lambda_i + span * (s * s * (3.0 - 2.0 * s));
  }
  throw Error("unreachable protocol kind");
}

double protocol_deriv(const Protocol& p, double s) {
  check_s(s);
  const double span = p.lambda_f - p.lambda_i;
  switch (p.kind) {
    case ProtocolKind::linear:
      return span;
    case ProtocolKind::smoothstep:
      return span * 6.0 * s * (1.0 - s);
  }
  throw Error("unreachable protocol kind");
}

std::string protocol_kind_name(ProtocolKind k) {
  return k == ProtocolKind::linear ? "linear" : "smoothstep";
}

ProtocolKind protocol_kind_from_name(const std::string& name) {
  if (name == "linear") return ProtocolKind::linear;
  if (name == "smoothstep") return ProtocolKind::smoothstep;
  throw ConfigError("unknown protocol '" + name +
                    "' (expected 'linear' or 'smoothstep')");
}

}  // namespace cdwork
