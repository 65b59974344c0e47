#ifndef RGBT_ERRORS_HPP_
#define RGBT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rgbt {

/// Malformed or inconsistent input data (files, manifests, ground truth).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rgbt

#endif  // RGBT_ERRORS_HPP_
