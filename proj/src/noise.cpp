#include "qlc/noise.hpp"

namespace qlc {

PortNoise vacuum_port() { return {NoiseKind::vacuum, 0.0}; }

PortNoise thermal_port(double occupation) {
    if (occupation < 0.0)
        throw NegativeNoise("thermal_port: occupation must be >= 0");
    return {NoiseKind::thermal, occupation};
}

ItoMatrix build_ito_matrix(const NoiseSpec& spec) {
    const Eigen::Index m = static_cast<Eigen::Index>(spec.size());
    Mat f = Mat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const PortNoise& p = spec[static_cast<std::size_t>(i)];
        double level = 1.0;
        if (p.kind == NoiseKind::thermal) {
            if (p.occupation < 0.0)
                throw NegativeNoise("build_ito_matrix: negative occupation");
            level = 1.0 + 2.0 * p.occupation;
        }
        f.block(2 * i, 2 * i, 2, 2) = level * Mat::Identity(2, 2);
    }
    return {f};
}

bool is_quantum_valid(const Mat& f) {
    if (f.rows() != f.cols() || f.rows() % 2 != 0)
        throw DimensionMismatch("is_quantum_valid: F must be 2m x 2m");
    if ((f - f.transpose()).norm() > 1e-12 * std::max(1.0, f.norm()))
        return false;
    const Mat j = canonical_j(f.rows() / 2);
    return min_eig_hermitian(f, j) >= tol::quantum_psd;
}

}  // namespace qlc
