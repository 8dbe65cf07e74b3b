#pragma once

#include <stdexcept>
#include <string>

namespace playroom {

// Root of the project's exception hierarchy. Concrete error types live next
// to the operations that raise them.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace playroom
