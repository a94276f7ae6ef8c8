#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlc/components.hpp"

namespace qlc {

// Controller families the optimizer knows how to instantiate. Dynamic
// coherent kinds (cavity, opo, general_coherent) compile through SLH; the
// static kinds are the fast-controller limit models, so the optimizer never
// has to chase a diverging internal bandwidth.
enum class TemplateKind {
    trivial_phase,
    cavity,
    opo,
    static_squeezer,
    static_two_mode,
    classical_homodyne,
    classical_heterodyne,
    general_coherent,
};

struct ParamSpec {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double init = 0.0;
    bool log_scale = false;  // searched in log10 coordinates
};

// Parameter layout is fixed per kind (see make_template). When
// vary_couplings is set, the plant couplings are appended to theta:
// one entry K (log scale) with lock_couplings, else (K1, K2).
struct ControllerTemplate {
    TemplateKind kind = TemplateKind::trivial_phase;
    Eigen::Index n_modes = 1;  // general_coherent register size
    Eigen::Index n_ports = 2;  // general_coherent ports (loop first)
    bool vary_couplings = false;
    bool lock_couplings = true;
    std::vector<ParamSpec> params;
};

ControllerTemplate make_template(TemplateKind kind);
ControllerTemplate make_general_template(Eigen::Index n_modes,
                                         Eigen::Index n_ports = 2);

// Controller realization at theta; coupling entries in the tail are ignored
// here (they reshape the plant, not the controller).
StateSpace instantiate_controller(const ControllerTemplate& tmpl,
                                  const Vec& theta);

// A template bound to a plant: everything the optimizer needs to price a
// parameter vector. assemble/controller throw on invalid or unstable theta.
struct TemplateObjective {
    std::vector<ParamSpec> params;
    std::function<ClosedLoop(const Vec&)> assemble;
    std::function<StateSpace(const Vec&)> controller;
    double plant_fastest_pole = 0.0;
};

TemplateObjective bind_template(const ControllerTemplate& tmpl,
                                const CavityScenario& sc);
TemplateObjective bind_template(const ControllerTemplate& tmpl,
                                const OptomechScenario& sc);

double objective_cost(const TemplateObjective& obj, const Vec& theta);

struct OptimizeOptions {
    int max_iterations = 400;
    double grad_tol = 1e-7;    // |proj grad| <= grad_tol * max(1, |cost|)
    int n_restarts = 32;       // quasi-random draws beyond the template init
    int warm_restarts = 4;     // draws per interior sweep point
    unsigned seed = 0;
    double fd_step = 1e-5;     // h_i = fd_step * (1 + |z_i|)
    std::vector<Vec> extra_starts;  // caller seeds, natural units
};

struct OptimizationResult {
    Vec theta;
    double cost = 0.0;
    double gradient_norm = 0.0;      // projected, working coordinates
    double hessian_condition = 0.0;  // |eig| ratio at theta
    int restart_index = -1;
    bool converged = false;
    double adiabatic_ratio = 0.0;  // slowest controller pole / fastest plant
    long evaluations = 0;
};

OptimizationResult optimize(const TemplateObjective& obj,
                            const OptimizeOptions& opts = {});
OptimizationResult optimize(const ControllerTemplate& tmpl,
                            const CavityScenario& sc,
                            const OptimizeOptions& opts = {});
OptimizationResult optimize(const ControllerTemplate& tmpl,
                            const OptomechScenario& sc,
                            const OptimizeOptions& opts = {});

// Free-form coherent controller, realizable by construction: symmetric R_c,
// complex coupling rows, and a loop-port scattering phase.
OptimizationResult optimize_general_coherent(Eigen::Index n_modes,
                                             const CavityScenario& sc,
                                             const OptimizeOptions& opts = {});
OptimizationResult optimize_general_coherent(Eigen::Index n_modes,
                                             const OptomechScenario& sc,
                                             const OptimizeOptions& opts = {});

// Working coordinates: identity for linear parameters, log10 for rates.
Vec to_working(const std::vector<ParamSpec>& params, const Vec& theta);
Vec from_working(const std::vector<ParamSpec>& params, const Vec& z);

// Central-difference gradient in working coordinates, the same stencil the
// optimizer steps on; step_scale rescales h for consistency checks.
Vec working_gradient(const TemplateObjective& obj, const Vec& z,
                     double step_scale = 1.0);

// Seed embeddings between nested families.
//   homodyne (g1, g2, bw) -> heterodyne (alpha=1, gains, bw) reproducing it;
//   opo (k1, k2, delta, eps, phi1, phi2) -> one-mode general coherent theta.
Vec embed_homodyne_in_heterodyne(const Vec& hom_theta);
Vec embed_opo_in_general(const Vec& opo_theta);

struct SweepPoint {
    double k_n = 0.0;
    OptimizationResult result;
    double no_control = 0.0;
    double ratio = 0.0;  // cost / no_control
    bool failed = false;
    std::string error;
};

// One optimization per grid value, warm-started from both sweep directions
// and keeping the better of the two passes. Failed points are recorded and
// skipped as warm-start sources.
std::vector<SweepPoint> sweep(const ControllerTemplate& tmpl,
                              CavityScenario sc,
                              const std::vector<double>& kn_grid,
                              const OptimizeOptions& opts = {});
std::vector<SweepPoint> sweep(const ControllerTemplate& tmpl,
                              OptomechScenario sc,
                              const std::vector<double>& kn_grid,
                              const OptimizeOptions& opts = {});

}  // namespace qlc
