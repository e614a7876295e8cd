#ifndef KASHAEV_ERRORS_HPP
#define KASHAEV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kashaev {

struct invalid_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// magnitude left the backend's finite range
struct range_error : std::range_error {
  using std::range_error::range_error;
};

// work estimate above the configured budget
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct not_found_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kashaev

#endif
