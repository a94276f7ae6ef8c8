#include "qlc/slh.hpp"

#include <utility>

namespace qlc {

namespace {

std::vector<std::string> join_names(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return {};
    std::vector<std::string> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Hamiltonian contribution of Im(L2^dag T L1) for couplings on one register.
// With W = Lam2^dag T Lam1 the quadratic part is Im(W) + Im(W)^T and the
// linear part collects the offset cross terms.
void accumulate_interference(const CMat& lam2, const CVec& off2, const CMat& t,
                             const CMat& lam1, const CVec& off1, Mat& r_quad,
                             Vec& r_lin) {
    const CMat w = lam2.adjoint() * t * lam1;
    r_quad += w.imag() + w.imag().transpose();
    r_lin += (lam2.adjoint() * t * off1).imag();
    r_lin += (lam1.transpose() * t.transpose() * off2.conjugate()).imag();
}

}  // namespace

LinearSLH make_linear_slh(const CMat& scattering, const CMat& coupling,
                          const CVec& coupling_offset,
                          const Mat& quad_hamiltonian,
                          const Vec& lin_hamiltonian) {
    const Eigen::Index m = scattering.rows();
    if (scattering.cols() != m)
        throw DimensionMismatch("make_linear_slh: scattering must be square");
    if (coupling.rows() != m)
        throw DimensionMismatch("make_linear_slh: coupling rows != n_ports");
    if (coupling.cols() % 2 != 0)
        throw DimensionMismatch(
            "make_linear_slh: coupling needs an (x,p) column pair per mode");
    const Eigen::Index n = coupling.cols() / 2;
    if (coupling_offset.size() != m)
        throw DimensionMismatch("make_linear_slh: offset size != n_ports");
    if (quad_hamiltonian.rows() != 2 * n || quad_hamiltonian.cols() != 2 * n)
        throw DimensionMismatch("make_linear_slh: R must be 2n x 2n");
    if (lin_hamiltonian.size() != 2 * n)
        throw DimensionMismatch("make_linear_slh: r must have length 2n");

    const double unitarity =
        (scattering * scattering.adjoint() - CMat::Identity(m, m)).norm();
    if (!(unitarity <= tol::unitary))
        throw NonUnitaryScattering("make_linear_slh: ||S S^dag - I|| = " +
                                   std::to_string(unitarity));

    LinearSLH g;
    g.n_modes = n;
    g.n_ports = m;
    g.scattering = scattering;
    g.coupling = coupling;
    g.coupling_offset = coupling_offset;
    g.quad_hamiltonian = symmetrize(quad_hamiltonian);
    g.lin_hamiltonian = lin_hamiltonian;
    return g;
}

LinearSLH identity_circuit(Eigen::Index n_ports) {
    if (n_ports < 0)
        throw IndexOutOfRange("identity_circuit: negative port count");
    return make_linear_slh(CMat::Identity(n_ports, n_ports),
                           CMat::Zero(n_ports, 0), CVec::Zero(n_ports),
                           Mat::Zero(0, 0), Vec::Zero(0));
}

LinearSLH embed(const LinearSLH& g, Eigen::Index total_modes,
                Eigen::Index mode_offset) {
    if (mode_offset < 0 || mode_offset + g.n_modes > total_modes)
        throw IndexOutOfRange("embed: register does not fit");

    LinearSLH out = g;
    out.n_modes = total_modes;
    out.coupling = CMat::Zero(g.n_ports, 2 * total_modes);
    out.coupling.middleCols(2 * mode_offset, 2 * g.n_modes) = g.coupling;
    out.quad_hamiltonian = Mat::Zero(2 * total_modes, 2 * total_modes);
    out.quad_hamiltonian.block(2 * mode_offset, 2 * mode_offset, 2 * g.n_modes,
                               2 * g.n_modes) = g.quad_hamiltonian;
    out.lin_hamiltonian = Vec::Zero(2 * total_modes);
    out.lin_hamiltonian.segment(2 * mode_offset, 2 * g.n_modes) =
        g.lin_hamiltonian;
    return out;
}

LinearSLH concat_ports(const LinearSLH& g1, const LinearSLH& g2) {
    if (g1.n_modes != g2.n_modes)
        throw DimensionMismatch("concat_ports: operands on different registers");
    const Eigen::Index m1 = g1.n_ports;
    const Eigen::Index m2 = g2.n_ports;

    LinearSLH out;
    out.n_modes = g1.n_modes;
    out.n_ports = m1 + m2;
    out.scattering = CMat::Zero(m1 + m2, m1 + m2);
    out.scattering.topLeftCorner(m1, m1) = g1.scattering;
    out.scattering.bottomRightCorner(m2, m2) = g2.scattering;
    out.coupling = CMat(m1 + m2, 2 * g1.n_modes);
    out.coupling << g1.coupling, g2.coupling;
    out.coupling_offset = CVec(m1 + m2);
    out.coupling_offset << g1.coupling_offset, g2.coupling_offset;
    out.quad_hamiltonian = g1.quad_hamiltonian + g2.quad_hamiltonian;
    out.lin_hamiltonian = g1.lin_hamiltonian + g2.lin_hamiltonian;
    out.port_names = join_names(g1.port_names, g2.port_names);
    return out;
}

LinearSLH series_shared(const LinearSLH& outer, const LinearSLH& inner) {
    if (outer.n_ports != inner.n_ports)
        throw DimensionMismatch("series: port counts differ");
    if (outer.n_modes != inner.n_modes)
        throw DimensionMismatch("series: operands on different registers");

    LinearSLH out;
    out.n_modes = outer.n_modes;
    out.n_ports = outer.n_ports;
    out.scattering = outer.scattering * inner.scattering;
    out.coupling = outer.coupling + outer.scattering * inner.coupling;
    out.coupling_offset =
        outer.coupling_offset + outer.scattering * inner.coupling_offset;
    out.quad_hamiltonian = outer.quad_hamiltonian + inner.quad_hamiltonian;
    out.lin_hamiltonian = outer.lin_hamiltonian + inner.lin_hamiltonian;
    accumulate_interference(outer.coupling, outer.coupling_offset,
                            outer.scattering, inner.coupling,
                            inner.coupling_offset, out.quad_hamiltonian,
                            out.lin_hamiltonian);
    out.port_names = outer.port_names;
    return out;
}

LinearSLH concatenate(const LinearSLH& g1, const LinearSLH& g2) {
    const Eigen::Index n = g1.n_modes + g2.n_modes;
    return concat_ports(embed(g1, n, 0), embed(g2, n, g1.n_modes));
}

LinearSLH series(const LinearSLH& outer, const LinearSLH& inner) {
    if (outer.n_ports != inner.n_ports)
        throw DimensionMismatch("series: port counts differ");
    const Eigen::Index n = outer.n_modes + inner.n_modes;
    return series_shared(embed(outer, n, 0), embed(inner, n, outer.n_modes));
}

LinearSLH feedback(const LinearSLH& g, Eigen::Index out_port,
                   Eigen::Index in_port) {
    const Eigen::Index m = g.n_ports;
    if (out_port < 0 || out_port >= m || in_port < 0 || in_port >= m)
        throw IndexOutOfRange("feedback: port index out of range");
    if (m < 2)
        throw DimensionMismatch("feedback: needs at least two ports");

    const cplx pivot = cplx(1.0, 0.0) - g.scattering(out_port, in_port);
    if (std::abs(pivot) < tol::pivot)
        throw SingularFeedback("feedback: 1 - S_{out,in} is singular");
    const cplx w = cplx(1.0, 0.0) / pivot;

    std::vector<Eigen::Index> rows, cols;
    rows.reserve(m - 1);
    cols.reserve(m - 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (i != out_port) rows.push_back(i);
        if (i != in_port) cols.push_back(i);
    }

    LinearSLH out;
    out.n_modes = g.n_modes;
    out.n_ports = m - 1;
    out.scattering = CMat(m - 1, m - 1);
    out.coupling = CMat(m - 1, 2 * g.n_modes);
    out.coupling_offset = CVec(m - 1);
    for (Eigen::Index i = 0; i < m - 1; ++i) {
        const Eigen::Index ri = rows[static_cast<std::size_t>(i)];
        const cplx gain = g.scattering(ri, in_port) * w;
        for (Eigen::Index jj = 0; jj < m - 1; ++jj) {
            const Eigen::Index cj = cols[static_cast<std::size_t>(jj)];
            out.scattering(i, jj) =
                g.scattering(ri, cj) + gain * g.scattering(out_port, cj);
        }
        out.coupling.row(i) =
            g.coupling.row(ri) + gain * g.coupling.row(out_port);
        out.coupling_offset(i) =
            g.coupling_offset(ri) + gain * g.coupling_offset(out_port);
    }

    // H picks up Im(L^dag S_{:,in} w L_out) from the eliminated loop.
    out.quad_hamiltonian = g.quad_hamiltonian;
    out.lin_hamiltonian = g.lin_hamiltonian;
    accumulate_interference(g.coupling, g.coupling_offset,
                            g.scattering.col(in_port) * w,
                            g.coupling.row(out_port),
                            g.coupling_offset.row(out_port),
                            out.quad_hamiltonian, out.lin_hamiltonian);

    if (!g.port_names.empty()) {
        for (const Eigen::Index ri : rows)
            out.port_names.push_back(
                g.port_names[static_cast<std::size_t>(ri)]);
    }
    return out;
}

LinearSLH permute_ports(const LinearSLH& g,
                        const std::vector<Eigen::Index>& perm) {
    const Eigen::Index m = g.n_ports;
    if (static_cast<Eigen::Index>(perm.size()) != m)
        throw DimensionMismatch("permute_ports: permutation size != n_ports");
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (const Eigen::Index p : perm) {
        if (p < 0 || p >= m)
            throw IndexOutOfRange("permute_ports: index out of range");
        if (seen[static_cast<std::size_t>(p)])
            throw IndexOutOfRange("permute_ports: duplicate index");
        seen[static_cast<std::size_t>(p)] = true;
    }

    LinearSLH out = g;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index p = perm[static_cast<std::size_t>(i)];
        out.coupling.row(i) = g.coupling.row(p);
        out.coupling_offset(i) = g.coupling_offset(p);
        for (Eigen::Index j = 0; j < m; ++j)
            out.scattering(i, j) =
                g.scattering(p, perm[static_cast<std::size_t>(j)]);
        if (!g.port_names.empty())
            out.port_names[static_cast<std::size_t>(i)] =
                g.port_names[static_cast<std::size_t>(p)];
    }
    return out;
}

LinearSLH relabel_ports(const LinearSLH& g, std::vector<std::string> names) {
    if (static_cast<Eigen::Index>(names.size()) != g.n_ports)
        throw DimensionMismatch("relabel_ports: name count != n_ports");
    LinearSLH out = g;
    out.port_names = std::move(names);
    return out;
}

// ---- composition tree ----

struct CircuitExpr::Node {
    enum class Kind { leaf, concat, chain, loop, relabel } kind;
    LinearSLH value;
    std::string id;
    std::shared_ptr<const Node> a, b;
    Eigen::Index out_port = 0, in_port = 0;
    std::vector<std::string> names;
};

CircuitExpr CircuitExpr::leaf(LinearSLH g, std::string id) {
    CircuitExpr e;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::leaf;
    n->value = std::move(g);
    n->id = std::move(id);
    e.node_ = std::move(n);
    return e;
}

CircuitExpr CircuitExpr::concat(CircuitExpr a, CircuitExpr b) {
    CircuitExpr e;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::concat;
    n->a = std::move(a.node_);
    n->b = std::move(b.node_);
    e.node_ = std::move(n);
    return e;
}

CircuitExpr CircuitExpr::chain(CircuitExpr outer, CircuitExpr inner) {
    CircuitExpr e;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::chain;
    n->a = std::move(outer.node_);
    n->b = std::move(inner.node_);
    e.node_ = std::move(n);
    return e;
}

CircuitExpr CircuitExpr::loop(CircuitExpr inner, Eigen::Index out_port,
                              Eigen::Index in_port) {
    CircuitExpr e;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::loop;
    n->a = std::move(inner.node_);
    n->out_port = out_port;
    n->in_port = in_port;
    e.node_ = std::move(n);
    return e;
}

CircuitExpr CircuitExpr::relabel(CircuitExpr inner,
                                 std::vector<std::string> names) {
    CircuitExpr e;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::relabel;
    n->a = std::move(inner.node_);
    n->names = std::move(names);
    e.node_ = std::move(n);
    return e;
}

namespace {

LinearSLH eval_node(const CircuitExpr::Node* n);

Eigen::Index count_ports(const CircuitExpr::Node* n) {
    using Kind = CircuitExpr::Node::Kind;
    switch (n->kind) {
        case Kind::leaf: return n->value.n_ports;
        case Kind::concat: return count_ports(n->a.get()) + count_ports(n->b.get());
        case Kind::chain: return count_ports(n->a.get());
        case Kind::loop: return count_ports(n->a.get()) - 1;
        case Kind::relabel: return count_ports(n->a.get());
    }
    return 0;
}

LinearSLH eval_node(const CircuitExpr::Node* n) {
    using Kind = CircuitExpr::Node::Kind;
    switch (n->kind) {
        case Kind::leaf: return n->value;
        case Kind::concat:
            return concatenate(eval_node(n->a.get()), eval_node(n->b.get()));
        case Kind::chain:
            return series(eval_node(n->a.get()), eval_node(n->b.get()));
        case Kind::loop:
            return feedback(eval_node(n->a.get()), n->out_port, n->in_port);
        case Kind::relabel:
            return relabel_ports(eval_node(n->a.get()), n->names);
    }
    throw Error("CircuitExpr: corrupt node");
}

}  // namespace

LinearSLH CircuitExpr::evaluate() const {
    if (!node_) throw Error("CircuitExpr: empty expression");
    return eval_node(node_.get());
}

Eigen::Index CircuitExpr::port_count() const {
    if (!node_) throw Error("CircuitExpr: empty expression");
    return count_ports(node_.get());
}

}  // namespace qlc
