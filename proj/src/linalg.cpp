#include "qlc/linalg.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qlc {

Mat canonical_j(Eigen::Index n_pairs) {
    Mat j = Mat::Zero(2 * n_pairs, 2 * n_pairs);
    for (Eigen::Index i = 0; i < n_pairs; ++i) {
        j(2 * i, 2 * i + 1) = 1.0;
        j(2 * i + 1, 2 * i) = -1.0;
    }
    return j;
}

Eigen::Matrix2d rotation2(double phi) {
    Eigen::Matrix2d r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double spectral_abscissa(const Mat& a) {
    if (a.rows() != a.cols())
        throw DimensionMismatch("spectral_abscissa: matrix must be square");
    if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
    return Eigen::EigenSolver<Mat>(a, false).eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Mat& a, double margin) {
    return spectral_abscissa(a) < margin;
}

double min_eig_hermitian(const Mat& h, const Mat& k) {
    if (h.rows() != h.cols() || k.rows() != k.cols() || h.rows() != k.rows())
        throw DimensionMismatch("min_eig_hermitian: incompatible blocks");
    CMat m = h.cast<cplx>() + cplx(0.0, 1.0) * k.cast<cplx>();
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw SolverFailure("min_eig_hermitian: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

Mat lyapunov_solve(const Mat& a, const Mat& w) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || w.rows() != n || w.cols() != n)
        throw DimensionMismatch("lyapunov_solve: incompatible shapes");
    if (n == 0) return Mat::Zero(0, 0);

    // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X), column-major vec.
    const Mat id = Mat::Identity(n, n);
    Mat kron = Eigen::kroneckerProduct(id, a).eval();
    kron += Eigen::kroneckerProduct(a, id).eval();

    Eigen::PartialPivLU<Mat> lu(kron);
    Vec rhs = Vec::Map(w.data(), n * n);
    Vec xv = lu.solve(-rhs);
    Mat x = symmetrize(Mat::Map(xv.data(), n, n));

    // one residual-correction pass keeps stiff loops honest
    Mat resid = a * x + x * a.transpose() + w;
    Vec cv = lu.solve(-Vec::Map(resid.data(), n * n));
    x = symmetrize(x + Mat::Map(cv.data(), n, n));

    resid = a * x + x * a.transpose() + w;
    if (!resid.allFinite())
        throw SolverFailure("lyapunov_solve: non-finite solution");
    return x;
}

Mat care_solve(const Mat& a, const Mat& b, const Mat& q, const Mat& r) {
    const Eigen::Index n = a.rows();
    const Eigen::Index m = b.cols();
    if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
        r.rows() != m || r.cols() != m)
        throw DimensionMismatch("care_solve: incompatible shapes");

    Eigen::PartialPivLU<Mat> rlu(r);
    if (std::abs(rlu.determinant()) < 1e-300)
        throw SolverFailure("care_solve: control weight R is singular");
    const Mat s = b * rlu.solve(b.transpose());

    Mat ham(2 * n, 2 * n);
    ham << a, -s, -q, -a.transpose();

    Eigen::EigenSolver<Mat> es(ham);
    if (es.info() != Eigen::Success)
        throw SolverFailure("care_solve: Hamiltonian eigendecomposition failed");

    CMat basis(2 * n, n);
    Eigen::Index found = 0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        if (es.eigenvalues()(i).real() < 0.0) {
            if (found == n)
                throw NoStabilizingSolution(
                    "care_solve: more than n stable Hamiltonian eigenvalues");
            basis.col(found++) = es.eigenvectors().col(i);
        }
    }
    if (found != n)
        throw NoStabilizingSolution(
            "care_solve: stable invariant subspace has wrong dimension");

    const CMat u = basis.topRows(n);
    const CMat v = basis.bottomRows(n);
    Eigen::FullPivLU<CMat> ulu(u.transpose());
    if (!ulu.isInvertible())
        throw NoStabilizingSolution("care_solve: singular subspace projection");
    Mat x = symmetrize(ulu.solve(v.transpose()).transpose().real());

    // The residual can only be evaluated to roundoff relative to its largest
    // term, so all thresholds scale with that term.
    const auto residual_of = [&](const Mat& xx) {
        return (a.transpose() * xx + xx * a + q - xx * s * xx).eval();
    };
    const auto scale_of = [&](const Mat& xx) {
        return std::max({1.0, q.norm(), (xx * s * xx).norm()});
    };

    // Newton polish with a monotone step search; each candidate step solves a
    // Lyapunov equation in the closed loop.
    Mat resid = residual_of(x);
    for (int it = 0; it < 40; ++it) {
        if (resid.norm() <= 1e-14 * scale_of(x)) break;
        const Mat acl = a - s * x;
        const Mat delta = lyapunov_solve(acl.transpose(), resid);
        bool improved = false;
        double t = 1.0;
        for (int half = 0; half < 6 && !improved; ++half, t *= 0.5) {
            const Mat cand = symmetrize(x + t * delta);
            const Mat cand_resid = residual_of(cand);
            if (cand_resid.norm() < resid.norm()) {
                x = cand;
                resid = cand_resid;
                improved = true;
            }
        }
        if (!improved) break;  // at the evaluation noise floor
    }

    if (!(resid.norm() <= tol::riccati_residual * scale_of(x)))
        throw SolverFailure("care_solve: residual did not converge");
    if (!is_hurwitz(a - s * x, 0.0))
        throw NoStabilizingSolution("care_solve: closed loop is not Hurwitz");
    return x;
}

}  // namespace qlc
