#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sarges {

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // stable machine name, e.g. "duplicate-id"
  std::string locus;    // "entry 3 (D-1)", "label 0", "line 12"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

const char* to_string(Severity s);
bool has_errors(const Diagnostics& d);
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

}  // namespace sarges
