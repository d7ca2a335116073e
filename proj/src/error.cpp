#include "hydra/error.hpp"

namespace hydra {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::alignment: return "alignment error";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::saturation: return "saturation error";
    case Errc::empty_bundle: return "empty bundle";
    case Errc::precondition: return "precondition violation";
    case Errc::configuration: return "configuration error";
    case Errc::generation: return "generation error";
    case Errc::capacity: return "capacity error";
    case Errc::solver: return "solver error";
    case Errc::parse: return "parse error";
    case Errc::empty_dataset: return "empty dataset";
    case Errc::unknown_op: return "unknown operation";
  }
  return "error";
}

}  // namespace hydra
