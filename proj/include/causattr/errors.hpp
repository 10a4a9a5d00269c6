#pragma once

#include <stdexcept>
#include <string>

namespace causattr {

// Base for every failure raised by the library. The CLI maps the concrete
// type to its exit code (usage 1, infeasible/model 2, I/O 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (empty evidence, bad dimension).
class ContractError : public Error {
public:
    using Error::Error;
};

// Observed rates are incompatible with the monotone latent structure.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Estimation failure: zero denominators, rank deficiency, unstable bootstrap.
class ModelError : public Error {
public:
    using Error::Error;
};

// Malformed or missing input data.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace causattr
