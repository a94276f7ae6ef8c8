#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qlc/components.hpp"
#include "qlc/optimizer.hpp"

namespace qlc {

// Circuit-as-data: a versioned JSON document ("schema": "qlc/1") describing
// components from the device library, a composition tree over them, the
// input statistics, and the performance index. Presets under presets/ encode
// the two benchmark plants this way, so the CLI drives everything from data.

// One library device instance. Numeric parameters keep their JSON shape:
// scalars and arrays land in separate maps so a document round-trips
// unchanged through parse/emit.
struct NetComponent {
    std::string id;
    std::string type;  // cavity, opo, beamsplitter, phase, displacement,
                       // identity, optomech
    std::map<std::string, double> scalar;
    std::map<std::string, std::vector<double>> list;

    friend bool operator==(const NetComponent&, const NetComponent&) = default;
};

// Composition tree. JSON accepts a bare component id as shorthand for a ref
// node; series is written {"op":"series","outer":...,"inner":...} (signal
// flows inner -> outer), concat takes "parts", feedback closes "out" onto
// "in" of "of".
struct NetExpr {
    enum class Op { ref, series, concat, feedback };
    Op op = Op::ref;
    std::string id;              // ref
    std::vector<NetExpr> args;   // series: {outer, inner}; concat; feedback
    Eigen::Index out_port = 0;   // feedback
    Eigen::Index in_port = 0;

    friend bool operator==(const NetExpr&, const NetExpr&) = default;
};

// Which circuit ports a controller attaches to: the sense output feeds the
// controller, whose first output returns through the drive input.
struct LoopSpec {
    Eigen::Index sense_port = 0;
    Eigen::Index drive_port = 1;

    friend bool operator==(const LoopSpec&, const LoopSpec&) = default;
};

// Controller family requested by the document; resolved against the
// optimizer's template names only when actually used.
struct ControllerChoice {
    std::string kind;
    bool vary_couplings = false;
    bool lock_couplings = true;
    Eigen::Index modes = 1;  // general family register size
    Eigen::Index ports = 2;

    friend bool operator==(const ControllerChoice&,
                           const ControllerChoice&) = default;
};

struct Netlist {
    std::vector<NetComponent> components;
    NetExpr circuit;
    NoiseSpec noise;  // one entry per port of the evaluated circuit
    CostSpec cost;
    std::optional<LoopSpec> loop;
    std::optional<ControllerChoice> controller;
    std::optional<OptimizeOptions> optimizer;
};

bool operator==(const Netlist& a, const Netlist& b);

// Validated parse; error messages carry JSON-pointer paths.
// Errors: SyntaxError (malformed JSON), SchemaError (shape or value),
// UnknownComponent, PortArityMismatch (composition or noise arity).
Netlist parse_netlist(const std::string& text);
Netlist load_netlist(const std::string& path);

// Canonical JSON; floats keep full round-trip precision, so
// parse(emit(n)) == n.
std::string emit_netlist(const Netlist& n);

// Evaluate the composition tree to a single open system.
LinearSLH build_circuit(const Netlist& n);

// The document's plant with nothing attached: every port keeps its listed
// noise, cost as specified.
ClosedLoop build_closed_loop(const Netlist& n);

// Attach a controller per the loop block (defaults to sense 0 / drive 1).
// The drive port's noise entry is consumed by the wire; controller ancilla
// inputs ride vacuum.
ClosedLoop build_closed_loop(const Netlist& n, const StateSpace& ctrl);

// Recognize the benchmark documents so optimizer-driven commands can run on
// the scenario fast paths; nullopt when the document is something else.
std::optional<CavityScenario> as_cavity_scenario(const Netlist& n);
std::optional<OptomechScenario> as_optomech_scenario(const Netlist& n);

// Template names used in documents and on the command line: trivial,
// cavity, opo, squeezer, two_mode, homodyne, heterodyne, general.
TemplateKind template_kind_by_name(const std::string& name);
std::string template_kind_name(TemplateKind kind);

}  // namespace qlc
