#pragma once

#include <stdexcept>
#include <string>

namespace heston_clse {

/// Parameter outside the subcritical domain, or an estimate outside the image of g.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when Y_0 = ... = Y_{n-1}, so the 2x2 Gram matrix cannot be inverted.
class SingularGramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingOriginal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NearSingularCovariance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace heston_clse
