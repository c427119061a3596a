#pragma once

#include <string>
#include <string_view>

namespace sarges {

std::string sha256_hex(std::string_view bytes);

}  // namespace sarges
