#include "matbf/errors.hpp"

namespace matbf {

void throw_shape(const std::string& what) { throw ShapeError(what); }
void throw_domain(const std::string& what) { throw DomainError(what); }

}  // namespace matbf
