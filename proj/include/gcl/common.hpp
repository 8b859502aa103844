#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gcl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base for all structured errors thrown by the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class dimension_mismatch : public error {
public:
    explicit dimension_mismatch(const std::string& what) : error(what) {}
};

class invalid_argument : public error {
public:
    explicit invalid_argument(const std::string& what) : error(what) {}
};

// A required sample-size / confidence relation does not hold.
class insufficient_samples : public error {
public:
    explicit insufficient_samples(const std::string& what) : error(what) {}
};

// An entropy / cardinality precondition of an oracle failed.
class entropy_violation : public error {
public:
    explicit entropy_violation(const std::string& what) : error(what) {}
};

class numerical_error : public error {
public:
    explicit numerical_error(const std::string& what) : error(what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

}  // namespace gcl
