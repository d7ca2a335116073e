#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydra {

enum class Errc {
  alignment,
  dimension_mismatch,
  saturation,
  empty_bundle,
  precondition,
  configuration,
  generation,
  capacity,
  solver,
  parse,
  empty_dataset,
  unknown_op,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hydra
