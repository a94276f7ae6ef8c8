#include "qlc/classical_lqg.hpp"

#include <Eigen/Dense>

#include "qlc/errors.hpp"
#include "qlc/linalg.hpp"
#include "qlc/noise.hpp"

namespace qlc {

namespace {

Eigen::FullPivLU<Mat> measurement_lu(const Mat& f_v) {
    Eigen::FullPivLU<Mat> lu(f_v);
    if (!lu.isInvertible())
        throw SingularMeasurementNoise(
            "classical plant form: F_v must be invertible");
    return lu;
}

}  // namespace

ClassicalPlantForm extract_plant_form(const StateSpace& plant,
                                      const NoiseSpec& noise,
                                      Eigen::Index meas_port,
                                      Eigen::Index drive_port) {
    if (meas_port < 0 || meas_port >= plant.out_ports() || drive_port < 0 ||
        drive_port >= plant.in_ports())
        throw IndexOutOfRange("extract_plant_form: port out of range");
    if (static_cast<Eigen::Index>(noise.size()) != plant.in_ports())
        throw DimensionMismatch(
            "extract_plant_form: one noise entry per plant input expected");

    const Mat f = build_ito_matrix(noise).F;
    const Mat drow = plant.D.row(2 * meas_port);

    ClassicalPlantForm p;
    p.A_p = plant.A;
    p.B_p = plant.B.middleCols(2 * drive_port, 2);
    p.C_p = plant.C.row(2 * meas_port);
    p.F_w = symmetrize(plant.B * f * plant.B.transpose());
    p.F_v = drow * f * drow.transpose();
    p.M = plant.B * f * drow.transpose();
    p.output_injection = Mat::Zero(plant.n_states(), 1);
    return p;
}

ClassicalPlantForm decorrelate(const ClassicalPlantForm& p) {
    const auto lu = measurement_lu(p.F_v);
    Mat joint(p.F_w.rows() + p.F_v.rows(), p.F_w.cols() + p.F_v.cols());
    joint << p.F_w, p.M, p.M.transpose(), p.F_v;
    if (min_eig_hermitian(symmetrize(joint), Mat::Zero(joint.rows(),
                                                       joint.cols())) <
        -1e-9)
        throw NegativeNoise("decorrelate: joint noise covariance not PSD");

    const Mat gain = lu.solve(p.M.transpose()).transpose();  // M F_v^{-1}
    ClassicalPlantForm out = p;
    out.A_p = p.A_p - gain * p.C_p;
    out.F_w = symmetrize(p.F_w - gain * p.M.transpose());
    out.M = Mat::Zero(p.M.rows(), p.M.cols());
    out.output_injection = p.output_injection + gain;
    return out;
}

ClassicalController kalman_lqg_controller(const ClassicalPlantForm& p,
                                          const Mat& q_w, const Mat& r_w) {
    const ClassicalPlantForm d = decorrelate(p);
    const auto lu = measurement_lu(d.F_v);

    const Mat sigma =
        care_solve(d.A_p.transpose(), d.C_p.transpose(), d.F_w, d.F_v);
    const Mat k_tilde = lu.solve(d.C_p * sigma).transpose();

    const Mat x = care_solve(d.A_p, d.B_p, q_w, r_w);
    const Mat l =
        Eigen::FullPivLU<Mat>(r_w).solve(d.B_p.transpose() * x);

    ClassicalController k;
    k.A_c = d.A_p - d.B_p * l - k_tilde * d.C_p;
    k.B_c = k_tilde + d.output_injection;
    k.C_c = -l;
    k.kalman_gain = k.B_c;
    k.feedback_gain = l;
    k.Q_w = q_w;
    k.R_w = r_w;

    const Eigen::Index n = d.A_p.rows();
    const Mat a_orig = d.A_p + d.output_injection * d.C_p;
    Mat closed(2 * n, 2 * n);
    closed << a_orig, d.B_p * k.C_c, k.B_c * d.C_p, k.A_c;
    if (!is_hurwitz(closed, 0.0))
        throw NoStabilizingSolution(
            "kalman_lqg_controller: closed loop not Hurwitz");
    return k;
}

StateSpace controller_statespace(const ClassicalController& k) {
    if (k.B_c.cols() != 1 || k.C_c.rows() != 2)
        throw DimensionMismatch(
            "controller_statespace: expects a single homodyne current and a "
            "port-pair drive");
    const Eigen::Index n = k.A_c.rows();
    StateSpace ss;
    ss.A = k.A_c;
    ss.B = Mat::Zero(n, 4);
    ss.B.col(0) = k.B_c;
    ss.C = k.C_c;
    ss.D = Mat::Zero(2, 4);
    ss.D.rightCols(2) = Mat::Identity(2, 2);
    ss.a = Vec::Zero(n);
    ss.c = Vec::Zero(2);
    ss.Theta = Mat::Zero(n, n);
    return ss;
}

Mat classical_closed_covariance(const ClassicalPlantForm& p,
                                const ClassicalController& k) {
    const Eigen::Index n = p.A_p.rows();
    const Eigen::Index m = k.A_c.rows();
    // undo any change of variables: dw = dw~ + inj dv
    const Mat inj = p.output_injection;
    const Mat a_orig = p.A_p + inj * p.C_p;
    const Mat m_orig = p.M + inj * p.F_v;
    const Mat f_w_orig = p.F_w + p.M * inj.transpose() +
                         inj * p.M.transpose() +
                         inj * p.F_v * inj.transpose();
    Mat a(n + m, n + m);
    a << a_orig, p.B_p * k.C_c, k.B_c * p.C_p, k.A_c;
    Mat w(n + m, n + m);
    w << f_w_orig, m_orig * k.B_c.transpose(), k.B_c * m_orig.transpose(),
        k.B_c * p.F_v * k.B_c.transpose();
    return lyapunov_solve(a, symmetrize(w)).topLeftCorner(n, n);
}

Mat photon_weights(Eigen::Index n_states, Eigen::Index mode) {
    if (mode < 0 || 2 * mode + 1 >= n_states)
        throw IndexOutOfRange("photon_weights: mode out of range");
    Mat q = Mat::Zero(n_states, n_states);
    q(2 * mode, 2 * mode) = 0.5;
    q(2 * mode + 1, 2 * mode + 1) = 0.5;
    return q;
}

}  // namespace qlc
