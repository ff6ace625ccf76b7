#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace dm2l {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Thrown on shape mismatches, bad arguments, parse failures and I/O errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dm2l
