#pragma once

#include <json.hpp>

namespace sarges {

/// Insertion-ordered JSON so emitted files keep a stable, readable key order.
using Json = nlohmann::ordered_json;

}  // namespace sarges
