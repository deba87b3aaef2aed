#ifndef LAME_ERRORS_HPP
#define LAME_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace lame {

// Bad input values (modulus out of range, argument outside a documented domain).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Evaluation requested too close to a lattice pole of sn/cn/dn, Z or Theta.
class pole_error : public std::runtime_error {
public:
    pole_error(const std::string& msg, std::complex<double> nearest)
        : std::runtime_error(msg), nearest_pole(nearest) {}
    std::complex<double> nearest_pole;
};

// Root bracketing, series convergence or step-budget failures; carries context.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lame

#endif
