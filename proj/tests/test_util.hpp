#pragma once

#include <random>

#include "qlc/linalg.hpp"

namespace qlc::testutil {

template <typename A, typename B>
bool near(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
          double tol = 1e-12) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a - b).norm() <= tol;
}

inline bool near(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol;
}

inline bool near_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)});
}

// Deterministic random draws for property tests.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long long seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }

    Mat gaussian(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
        std::normal_distribution<double> d(0.0, scale);
        Mat m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = d(gen);
        return m;
    }

    CMat cgaussian(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
        return gaussian(r, c, scale).cast<cplx>() +
               cplx(0.0, 1.0) * gaussian(r, c, scale).cast<cplx>();
    }

    CMat unitary(Eigen::Index n) {
        const CMat g = cgaussian(n, n);
        Eigen::HouseholderQR<CMat> qr(g);
        CMat q = qr.householderQ();
        const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx d = r(i, i);
            q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0, 0.0));
        }
        return q;
    }
};

}  // namespace qlc::testutil
