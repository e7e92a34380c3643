#pragma once

#include <stdexcept>
#include <string>

namespace ect {

/// Invalid user-supplied configuration (grid sizes, electrode layout, config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Geometric inconsistency detected at run time (shape outside ROI, contour hits an electrode).
class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failure; carries the last residual and the iteration it stopped at.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, long iteration)
        : std::runtime_error(what), residual(residual), iteration(iteration) {}
    double residual = 0.0;
    long iteration = 0;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ect
