#include "relaxmitl/cost.hpp"

#include "relaxmitl/mitl.hpp"

namespace relaxmitl {

std::string Cost::str() const { return inf_ ? "inf" : mitl::format_number(value_); }

std::ostream& operator<<(std::ostream& os, const Cost& c) { return os << c.str(); }

}  // namespace relaxmitl
