#include "sarges/diagnostic.hpp"

#include <algorithm>
#include <ostream>

namespace sarges {

const char* to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

bool has_errors(const Diagnostics& d) {
  return std::any_of(d.begin(), d.end(),
                     [](const Diagnostic& x) { return x.severity == Severity::Error; });
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  return os << to_string(d.severity) << " [" << d.code << "] " << d.locus << ": " << d.message;
}

}  // namespace sarges
