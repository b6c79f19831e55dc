#pragma once

#include <stdexcept>
#include <string>

namespace ascension {

struct invalid_isometry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct integration_error : std::runtime_error {
    double reached;
    integration_error(const std::string& what, double t)
        : std::runtime_error(what + " (reached t=" + std::to_string(t) + ")"), reached(t) {}
};

struct reduction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct range_error : std::range_error {
    using std::range_error::range_error;
};

}  // namespace ascension
