#pragma once

#include <stdexcept>
#include <string>

namespace sskmlc {

// Monte-Carlo estimation produced an unusable result (non-finite accumulator,
// capacity below the noise floor, ...).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sskmlc
