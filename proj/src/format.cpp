#include "ddsafe/format.hpp"

#include <array>
#include <charconv>

namespace ddsafe {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

}  // namespace ddsafe
