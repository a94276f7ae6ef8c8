#include "qlc/statespace.hpp"

#include <set>

namespace qlc {

std::tuple<Mat, Mat, Vec> quadrature_stack(const CMat& scattering,
                                           const CMat& coupling,
                                           const CVec& coupling_offset) {
    const Eigen::Index m = scattering.rows();
    if (scattering.cols() != m || coupling.rows() != m ||
        coupling_offset.size() != m)
        throw DimensionMismatch("quadrature_stack: incompatible shapes");

    // Per-port doubling basis V = [[1, 1], [-i, i]] maps (a, a^dag) pairs to
    // (x, p); V^{-1} is exactly 1/2 [[1, i], [1, -i]].
    CMat v = CMat::Zero(2 * m, 2 * m);
    CMat vinv = CMat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        v(2 * i, 2 * i) = 1.0;
        v(2 * i, 2 * i + 1) = 1.0;
        v(2 * i + 1, 2 * i) = cplx(0.0, -1.0);
        v(2 * i + 1, 2 * i + 1) = cplx(0.0, 1.0);
        vinv(2 * i, 2 * i) = 0.5;
        vinv(2 * i, 2 * i + 1) = cplx(0.0, 0.5);
        vinv(2 * i + 1, 2 * i) = 0.5;
        vinv(2 * i + 1, 2 * i + 1) = cplx(0.0, -0.5);
    }

    CMat doubled_s = CMat::Zero(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            doubled_s(2 * i, 2 * j) = scattering(i, j);
            doubled_s(2 * i + 1, 2 * j + 1) = std::conj(scattering(i, j));
        }
    const CMat s_tilde_c = v * doubled_s * vinv;

    CMat doubled_l(2 * m, coupling.cols());
    CVec doubled_off(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        doubled_l.row(2 * i) = coupling.row(i);
        doubled_l.row(2 * i + 1) = coupling.row(i).conjugate();
        doubled_off(2 * i) = coupling_offset(i);
        doubled_off(2 * i + 1) = std::conj(coupling_offset(i));
    }
    const CMat l_tilde_c = v * doubled_l;
    const CVec off_tilde_c = v * doubled_off;

    const double residue =
        s_tilde_c.imag().norm() + l_tilde_c.imag().norm() +
        off_tilde_c.imag().norm();
    if (!(residue <= tol::complex_residue))
        throw ComplexResidue("quadrature_stack: imaginary residue " +
                             std::to_string(residue));

    return {s_tilde_c.real(), l_tilde_c.real(), off_tilde_c.real()};
}

StateSpace to_statespace(const LinearSLH& g) {
    const auto [s_tilde, l_tilde, off_tilde] =
        quadrature_stack(g.scattering, g.coupling, g.coupling_offset);
    const Mat theta = canonical_j(g.n_modes);
    const Mat j_port = canonical_j(g.n_ports);

    StateSpace ss;
    ss.Theta = theta;
    ss.A = 2.0 * theta *
           (g.quad_hamiltonian +
            0.25 * l_tilde.transpose() * j_port * l_tilde);
    ss.B = theta * l_tilde.transpose() * j_port * s_tilde;
    ss.C = l_tilde;
    ss.D = s_tilde;
    ss.a = 2.0 * theta *
           (g.lin_hamiltonian +
            0.25 * l_tilde.transpose() * j_port * off_tilde);
    ss.c = off_tilde;
    return ss;
}

std::array<double, 3> check_realizability(const StateSpace& ss) {
    if (ss.n_inputs() != ss.n_outputs())
        throw DimensionMismatch(
            "check_realizability: needs equal input and output port counts");
    const Mat j = canonical_j(ss.in_ports());
    const double r1 = (ss.A * ss.Theta + ss.Theta * ss.A.transpose() +
                       ss.B * j * ss.B.transpose())
                          .norm();
    const double r2 =
        (ss.Theta * ss.C.transpose() + ss.B * j * ss.D.transpose()).norm();
    const double r3 = (ss.D * j * ss.D.transpose() - j).norm();
    return {r1, r2, r3};
}

StaticDevice adiabatic_eliminate(const StateSpace& ss) {
    const Eigen::Index n = ss.n_states();
    if (n == 0) return {ss.D, ss.c};

    Eigen::FullPivLU<Mat> lu(ss.A);
    if (!lu.isInvertible())
        throw SingularDrift("adiabatic_eliminate: drift matrix is singular");
    if (!is_hurwitz(ss.A))
        throw UnstableSystem("adiabatic_eliminate: drift matrix is not Hurwitz");

    StaticDevice dev;
    dev.D = ss.D - ss.C * lu.solve(ss.B);
    dev.c = ss.c - ss.C * lu.solve(ss.a);
    return dev;
}

StateSpace static_to_statespace(const StaticDevice& dev,
                                Eigen::Index in_ports) {
    if (dev.D.cols() != 2 * in_ports)
        throw DimensionMismatch("static_to_statespace: D columns != 2 ports");
    StateSpace ss;
    ss.A = Mat::Zero(0, 0);
    ss.B = Mat::Zero(0, dev.D.cols());
    ss.C = Mat::Zero(dev.D.rows(), 0);
    ss.D = dev.D;
    ss.a = Vec::Zero(0);
    ss.c = dev.c;
    ss.Theta = Mat::Zero(0, 0);
    return ss;
}

namespace {

void check_wires(const std::vector<PortWire>& wires, Eigen::Index from_limit,
                 Eigen::Index to_limit, const char* what) {
    std::set<Eigen::Index> from_seen, to_seen;
    for (const auto& w : wires) {
        if (w.from_port < 0 || w.from_port >= from_limit || w.to_port < 0 ||
            w.to_port >= to_limit)
            throw IndexOutOfRange(std::string("interconnect: ") + what +
                                  " wire out of range");
        if (!from_seen.insert(w.from_port).second ||
            !to_seen.insert(w.to_port).second)
            throw IndexOutOfRange(std::string("interconnect: duplicate ") +
                                  what + " wire");
    }
}

Mat blkdiag(const Mat& a, const Mat& b) {
    Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

}  // namespace

StateSpace interconnect(const StateSpace& plant, const StateSpace& ctrl,
                        const Wiring& wiring) {
    check_wires(wiring.plant_to_ctrl, plant.out_ports(), ctrl.in_ports(),
                "plant->ctrl");
    check_wires(wiring.ctrl_to_plant, ctrl.out_ports(), plant.in_ports(),
                "ctrl->plant");

    const Eigen::Index nu = plant.n_inputs() + ctrl.n_inputs();
    const Eigen::Index ny = plant.n_outputs() + ctrl.n_outputs();

    const Mat a0 = blkdiag(plant.A, ctrl.A);
    const Mat b0 = blkdiag(plant.B, ctrl.B);
    const Mat c0 = blkdiag(plant.C, ctrl.C);
    const Mat d0 = blkdiag(plant.D, ctrl.D);
    Vec ofs_a(a0.rows());
    ofs_a << plant.a, ctrl.a;
    Vec ofs_c(ny);
    ofs_c << plant.c, ctrl.c;

    // Routing u = W y + E w over quadratures; wires connect whole ports.
    Mat w = Mat::Zero(nu, ny);
    std::vector<bool> input_wired(static_cast<std::size_t>(nu / 2), false);
    std::vector<bool> output_wired(static_cast<std::size_t>(ny / 2), false);
    const Eigen::Index plant_in = plant.in_ports();
    const Eigen::Index plant_out = plant.out_ports();
    for (const auto& wire : wiring.plant_to_ctrl) {
        const Eigen::Index u_at = 2 * (plant.n_inputs() / 2 + wire.to_port);
        const Eigen::Index y_at = 2 * wire.from_port;
        w.block(u_at, y_at, 2, 2) = Mat::Identity(2, 2);
        input_wired[static_cast<std::size_t>(plant_in + wire.to_port)] = true;
        output_wired[static_cast<std::size_t>(wire.from_port)] = true;
    }
    for (const auto& wire : wiring.ctrl_to_plant) {
        const Eigen::Index u_at = 2 * wire.to_port;
        const Eigen::Index y_at = 2 * (plant.n_outputs() / 2 + wire.from_port);
        w.block(u_at, y_at, 2, 2) = Mat::Identity(2, 2);
        input_wired[static_cast<std::size_t>(wire.to_port)] = true;
        output_wired[static_cast<std::size_t>(plant_out + wire.from_port)] =
            true;
    }

    std::vector<Eigen::Index> free_in, free_out;
    for (Eigen::Index p = 0; p < nu / 2; ++p)
        if (!input_wired[static_cast<std::size_t>(p)]) free_in.push_back(p);
    for (Eigen::Index p = 0; p < ny / 2; ++p)
        if (!output_wired[static_cast<std::size_t>(p)]) free_out.push_back(p);

    Mat e = Mat::Zero(nu, 2 * static_cast<Eigen::Index>(free_in.size()));
    for (std::size_t i = 0; i < free_in.size(); ++i)
        e.block(2 * free_in[i], 2 * static_cast<Eigen::Index>(i), 2, 2) =
            Mat::Identity(2, 2);
    Mat f = Mat::Zero(2 * static_cast<Eigen::Index>(free_out.size()), ny);
    for (std::size_t i = 0; i < free_out.size(); ++i)
        f.block(2 * static_cast<Eigen::Index>(i), 2 * free_out[i], 2, 2) =
            Mat::Identity(2, 2);

    const Mat loop = Mat::Identity(ny, ny) - d0 * w;
    Eigen::FullPivLU<Mat> lu(loop);
    if (!lu.isInvertible())
        throw AlgebraicLoop("interconnect: singular feedthrough loop");

    const Mat resolve_c = lu.solve(c0);          // y = resolve_c x + ...
    const Mat resolve_d = lu.solve(d0 * e);
    const Vec resolve_ofs = lu.solve(ofs_c);

    StateSpace out;
    out.A = a0 + b0 * w * resolve_c;
    out.B = b0 * (w * resolve_d + e);
    out.C = f * resolve_c;
    out.D = f * resolve_d;
    out.a = ofs_a + b0 * w * resolve_ofs;
    out.c = f * resolve_ofs;
    out.Theta = blkdiag(plant.Theta, ctrl.Theta);
    return out;
}

}  // namespace qlc
