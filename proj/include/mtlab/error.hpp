#pragma once

#include <stdexcept>
#include <string>

namespace mtlab {

// Malformed or inconsistent user input (config files, CLI flags, state
// descriptors).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that could not reach its stated accuracy or hit a
// degenerate configuration (vanishing variance, singular frame matrix,
// failed bracket, insufficient Fock cutoff).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reading a config file or writing an output file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mtlab
