#pragma once

#include <Eigen/Dense>

// Bitwise equality for dense Eigen objects (tests only).
template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).squaredNorm() == 0.0;
}
