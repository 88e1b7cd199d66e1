#ifndef WAVELAB_ERRORS_HPP
#define WAVELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wavelab {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionOutOfRange : public Error {
public:
    int d;
    explicit DimensionOutOfRange(int d_, const std::string& msg) : Error(msg), d(d_) {}
};

class ExponentOutOfRange : public Error {
public:
    double p, lower, upper;   // violated bound values
    ExponentOutOfRange(double p_, double lo, double hi, const std::string& msg)
        : Error(msg), p(p_), lower(lo), upper(hi) {}
};

class PotentialBelowThreshold : public Error {
public:
    double a, threshold;
    PotentialBelowThreshold(double a_, double thr, const std::string& msg)
        : Error(msg), a(a_), threshold(thr) {}
};

class RangeOutsideGrid : public Error {
public:
    using Error::Error;
};

class StabilityViolation : public Error {
public:
    double t, growth;
    StabilityViolation(double t_, double growth_, const std::string& msg)
        : Error(msg), t(t_), growth(growth_) {}
};

class ConeNotSampled : public Error {
public:
    using Error::Error;
};

class LineNotSampled : public Error {
public:
    using Error::Error;
};

class InsufficientHorizon : public Error {
public:
    using Error::Error;
};

class ZeroField : public Error {
public:
    using Error::Error;
};

class ConfigInvalid : public Error {
public:
    std::string path;   // JSON field path of the offending entry
    ConfigInvalid(std::string path_, const std::string& msg)
        : Error(path_ + ": " + msg), path(std::move(path_)) {}
};

class ExperimentUnknown : public Error {
public:
    using Error::Error;
};

} // namespace wavelab

#endif
