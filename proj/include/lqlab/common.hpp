#ifndef LQLAB_COMMON_HPP
#define LQLAB_COMMON_HPP

#include <stdexcept>
#include <string>

namespace lqlab {

inline constexpr const char* kVersion = "0.1.0";

// Thrown when an operation is not defined for the given configuration
// (e.g. closed-form L^q geometry outside the Gaussian family).
class unsupported_operation : public std::logic_error {
public:
    explicit unsupported_operation(const std::string& what_arg)
        : std::logic_error(what_arg) {}
};

// Thrown when a query is structurally unanswerable (e.g. an empty audit set).
class invalid_query : public std::invalid_argument {
public:
    explicit invalid_query(const std::string& what_arg)
        : std::invalid_argument(what_arg) {}
};

}  // namespace lqlab

#endif  // LQLAB_COMMON_HPP
