#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lqineq/errors.hpp"

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

#define CHECK_REL(a, b, tol) CHECK_MESSAGE(rel_err((a), (b)) <= (tol), "got ", (a), " expected ", (b))

#define CHECK_CODE(expr, ecode)                                   \
    do {                                                          \
        bool thrown_ = false;                                     \
        try {                                                     \
            (void)(expr);                                         \
        } catch (const lqineq::Error& e_) {                       \
            thrown_ = true;                                       \
            CHECK_MESSAGE(e_.code() == (ecode), e_.what());       \
        }                                                         \
        CHECK_MESSAGE(thrown_, "expected an error from " #expr); \
    } while (0)

// least-squares slope of y against x
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}
