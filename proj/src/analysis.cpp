#include "qlc/analysis.hpp"

namespace qlc {

Covariance steady_state_covariance(const StateSpace& ss, const ItoMatrix& f) {
    if (f.F.rows() != ss.n_inputs())
        throw DimensionMismatch(
            "steady_state_covariance: noise size != input size");
    if (!is_hurwitz(ss.A))
        throw UnstableSystem("steady_state_covariance: drift is not Hurwitz");

    const Mat w = ss.B * f.F * ss.B.transpose();
    Mat sigma = lyapunov_solve(ss.A, w);

    const double resid =
        (ss.A * sigma + sigma * ss.A.transpose() + w).norm();
    if (!(resid <= tol::lyapunov_residual * std::max(1.0, w.norm())))
        throw SolverFailure("steady_state_covariance: residual " +
                            std::to_string(resid));
    return {sigma, ss.Theta};
}

double photon_number(const Covariance& cov, Eigen::Index mode) {
    if (2 * mode + 1 >= cov.sigma.rows() || mode < 0)
        throw IndexOutOfRange("photon_number: mode out of range");
    return (cov.sigma(2 * mode, 2 * mode) +
            cov.sigma(2 * mode + 1, 2 * mode + 1) - 2.0) /
           4.0;
}

double lqg_cost(const ClosedLoop& loop) {
    const Covariance cov =
        steady_state_covariance(loop.ss, build_ito_matrix(loop.noise));
    if (loop.cost.weights) {
        const Mat& q = *loop.cost.weights;
        if (q.rows() != cov.sigma.rows() || q.cols() != cov.sigma.cols())
            throw DimensionMismatch("lqg_cost: weight size != state size");
        return 0.5 * (q * cov.sigma).trace();
    }
    return photon_number(cov, loop.cost.mode);
}

double stability_margin(const StateSpace& ss) {
    return spectral_abscissa(ss.A);
}

Spectrum output_spectrum(const StateSpace& ss, const ItoMatrix& f,
                         Eigen::Index port, const Vec& omega_grid) {
    if (port < 0 || port >= ss.out_ports())
        throw IndexOutOfRange("output_spectrum: port out of range");
    if (f.F.rows() != ss.n_inputs())
        throw DimensionMismatch("output_spectrum: noise size != input size");

    const Eigen::Index n = ss.n_states();
    Spectrum spec;
    spec.omega = omega_grid;
    spec.blocks.reserve(static_cast<std::size_t>(omega_grid.size()));
    spec.flux = Vec(omega_grid.size());

    const CMat a = ss.A.cast<cplx>();
    const CMat b = ss.B.cast<cplx>();
    const CMat c = ss.C.cast<cplx>();
    const CMat d = ss.D.cast<cplx>();

    for (Eigen::Index k = 0; k < omega_grid.size(); ++k) {
        const cplx iw(0.0, omega_grid(k));
        CMat h = d;
        if (n > 0) {
            const CMat resolvent =
                (iw * CMat::Identity(n, n) - a).partialPivLu().solve(b);
            h += c * resolvent;
        }
        const CMat s = h * f.F * h.adjoint();
        const Eigen::Matrix2cd block = s.block(2 * port, 2 * port, 2, 2);
        spec.blocks.push_back(block);
        spec.flux(k) = (block.trace().real() - 2.0) / 4.0;
    }
    return spec;
}

std::vector<double> spectral_peaks(const Spectrum& spec,
                                   double min_separation) {
    if (!(min_separation >= 0.0))
        throw NonPositiveParam("spectral_peaks: separation must be >= 0");

    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 1; i + 1 < spec.flux.size(); ++i)
        if (spec.flux(i) > spec.flux(i - 1) && spec.flux(i) > spec.flux(i + 1))
            idx.push_back(i);

    bool merged = true;
    while (merged && idx.size() > 1) {
        merged = false;
        for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
            if (spec.omega(idx[j + 1]) - spec.omega(idx[j]) >= min_separation)
                continue;
            idx.erase(idx.begin() +
                      static_cast<std::ptrdiff_t>(
                          spec.flux(idx[j]) < spec.flux(idx[j + 1]) ? j
                                                                    : j + 1));
            merged = true;
            break;
        }
    }

    std::vector<double> peaks;
    peaks.reserve(idx.size());
    for (const Eigen::Index i : idx) peaks.push_back(spec.omega(i));
    return peaks;
}

}  // namespace qlc
