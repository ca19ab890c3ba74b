#include "psvr/errors.hpp"

namespace psvr {

namespace {

std::string describe(const std::vector<FieldError>& fields) {
  std::string out = "invalid scenario";
  for (const auto& f : fields) out += "\n  " + f.path + ": " + f.message;
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<FieldError> fields)
    : Error(describe(fields)), fields_(std::move(fields)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(std::vector<FieldError>{{std::move(path), std::move(message)}}) {}

}  // namespace psvr
