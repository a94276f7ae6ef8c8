#include "qlc/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"

#include "qlc/errors.hpp"
#include "qlc/slh.hpp"
#include "qlc/statespace.hpp"

namespace qlc {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& detail) {
    throw SchemaError(path, detail);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* k) { return item.key() == k; });
        if (!known) fail(path + "/" + item.key(), "unknown field");
    }
}

const json& need(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + "/" + key, "missing required field");
    return *it;
}

std::string need_string(const json& obj, const std::string& path,
                        const char* key) {
    const json& v = need(obj, path, key);
    if (!v.is_string()) fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

double need_number(const json& obj, const std::string& path,
                   const char* key) {
    const json& v = need(obj, path, key);
    if (!v.is_number()) fail(path + "/" + key, "expected a number");
    return v.get<double>();
}

Eigen::Index need_port_index(const json& obj, const std::string& path,
                             const char* key) {
    const json& v = need(obj, path, key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(path + "/" + key, "expected a nonnegative integer");
    return static_cast<Eigen::Index>(v.get<long long>());
}

bool get_bool(const json& obj, const std::string& path, const char* key,
              bool fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) fail(path + "/" + key, "expected a boolean");
    return it->get<bool>();
}

// ---- component registry ----

struct ComponentInfo {
    Eigen::Index ports = 0;
    Eigen::Index modes = 0;
};

// Validates the parameter set for a component type and reports its arity.
ComponentInfo validate_component(const NetComponent& c,
                                 const std::string& path) {
    const std::string ppath = path + "/params";
    const auto allow = [&](std::initializer_list<const char*> scalars,
                           std::initializer_list<const char*> lists) {
        for (const auto& [k, v] : c.scalar)
            if (std::find_if(scalars.begin(), scalars.end(), [&](const char* s) {
                    return k == s;
                }) == scalars.end())
                fail(ppath + "/" + k, "unknown parameter for type " + c.type);
        for (const auto& [k, v] : c.list)
            if (std::find_if(lists.begin(), lists.end(), [&](const char* s) {
                    return k == s;
                }) == lists.end())
                fail(ppath + "/" + k, "unknown parameter for type " + c.type);
    };
    const auto scalar = [&](const char* k) -> double {
        const auto it = c.scalar.find(k);
        if (it == c.scalar.end())
            fail(ppath + "/" + std::string(k), "missing required parameter");
        return it->second;
    };

    if (c.type == "cavity") {
        allow({"delta"}, {"kappas"});
        const auto it = c.list.find("kappas");
        if (it == c.list.end() || it->second.empty())
            fail(ppath + "/kappas", "expected a nonempty array of decay rates");
        for (double k : it->second)
            if (k < 0.0) fail(ppath + "/kappas", "decay rates must be >= 0");
        scalar("delta");
        return {static_cast<Eigen::Index>(it->second.size()), 1};
    }
    if (c.type == "opo") {
        allow({"kappa1", "kappa2", "delta", "eps_re", "eps_im"}, {});
        if (scalar("kappa1") < 0.0 || scalar("kappa2") < 0.0)
            fail(ppath, "decay rates must be >= 0");
        scalar("delta");
        scalar("eps_re");
        scalar("eps_im");
        return {2, 1};
    }
    if (c.type == "beamsplitter") {
        allow({"alpha"}, {});
        if (std::abs(scalar("alpha")) > 1.0)
            fail(ppath + "/alpha", "transmittance must satisfy |alpha| <= 1");
        return {2, 0};
    }
    if (c.type == "phase") {
        allow({"phi"}, {});
        scalar("phi");
        return {1, 0};
    }
    if (c.type == "displacement") {
        allow({"re", "im"}, {});
        scalar("re");
        scalar("im");
        return {1, 0};
    }
    if (c.type == "identity") {
        allow({"ports"}, {});
        const double p = scalar("ports");
        if (p < 1.0 || p != std::floor(p))
            fail(ppath + "/ports", "expected a positive integer");
        return {static_cast<Eigen::Index>(p), 0};
    }
    if (c.type == "optomech") {
        allow({"omega", "q_factor", "coupling1", "coupling2"}, {});
        if (scalar("omega") <= 0.0)
            fail(ppath + "/omega", "resonance must be > 0");
        if (scalar("q_factor") <= 0.0)
            fail(ppath + "/q_factor", "quality factor must be > 0");
        scalar("coupling1");
        return {3, 1};
    }
    throw UnknownComponent(path + "/type: unknown component type \"" + c.type +
                           "\"");
}

LinearSLH build_component(const NetComponent& c) {
    const auto scalar = [&](const char* k) { return c.scalar.at(k); };
    if (c.type == "cavity")
        return cavity(c.list.at("kappas"), scalar("delta"));
    if (c.type == "opo")
        return opo(scalar("kappa1"), scalar("kappa2"), scalar("delta"),
                   cplx(scalar("eps_re"), scalar("eps_im")));
    if (c.type == "beamsplitter") return beamsplitter(scalar("alpha"));
    if (c.type == "phase") return phase(scalar("phi"));
    if (c.type == "displacement")
        return displacement(cplx(scalar("re"), scalar("im")));
    if (c.type == "identity")
        return identity_circuit(static_cast<Eigen::Index>(scalar("ports")));
    if (c.type == "optomech") {
        OptomechScenario sc;
        sc.omega = scalar("omega");
        sc.q_factor = scalar("q_factor");
        sc.coupling1 = scalar("coupling1");
        if (c.scalar.count("coupling2")) {
            sc.lock_couplings = false;
            sc.coupling2 = scalar("coupling2");
        }
        return optomech_plant(sc);
    }
    throw UnknownComponent("build_component: unknown component type \"" +
                           c.type + "\"");
}

// ---- composition tree ----

struct ExprShape {
    Eigen::Index ports = 0;
    Eigen::Index modes = 0;
};

ExprShape expr_shape(const NetExpr& e,
                     const std::map<std::string, ComponentInfo>& infos,
                     const std::string& path) {
    switch (e.op) {
        case NetExpr::Op::ref:
            return {infos.at(e.id).ports, infos.at(e.id).modes};
        case NetExpr::Op::series: {
            const ExprShape outer = expr_shape(e.args[0], infos, path + "/outer");
            const ExprShape inner = expr_shape(e.args[1], infos, path + "/inner");
            if (outer.ports != inner.ports)
                throw PortArityMismatch(
                    path + ": series needs equal port counts, outer has " +
                    std::to_string(outer.ports) + ", inner has " +
                    std::to_string(inner.ports));
            return {outer.ports, outer.modes + inner.modes};
        }
        case NetExpr::Op::concat: {
            ExprShape total;
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                const ExprShape part = expr_shape(
                    e.args[i], infos, path + "/parts/" + std::to_string(i));
                total.ports += part.ports;
                total.modes += part.modes;
            }
            return total;
        }
        case NetExpr::Op::feedback: {
            const ExprShape inner = expr_shape(e.args[0], infos, path + "/of");
            if (inner.ports < 2)
                throw PortArityMismatch(path +
                                        ": feedback needs at least two ports");
            if (e.out_port >= inner.ports || e.in_port >= inner.ports)
                throw PortArityMismatch(
                    path + ": feedback port out of range for " +
                    std::to_string(inner.ports) + " ports");
            return {inner.ports - 1, inner.modes};
        }
    }
    throw Error("expr_shape: corrupt node");
}

NetExpr parse_expr(const json& j, const std::string& path,
                   const std::set<std::string>& ids) {
    NetExpr e;
    if (j.is_string()) {
        e.op = NetExpr::Op::ref;
        e.id = j.get<std::string>();
        if (!ids.count(e.id)) fail(path, "unknown component id \"" + e.id + "\"");
        return e;
    }
    if (!j.is_object())
        fail(path, "expected a component id or a composition object");
    const std::string op = need_string(j, path, "op");
    if (op == "ref") {
        require_keys(j, path, {"op", "id"});
        e.op = NetExpr::Op::ref;
        e.id = need_string(j, path, "id");
        if (!ids.count(e.id))
            fail(path + "/id", "unknown component id \"" + e.id + "\"");
    } else if (op == "series") {
        require_keys(j, path, {"op", "outer", "inner"});
        e.op = NetExpr::Op::series;
        e.args.push_back(parse_expr(need(j, path, "outer"), path + "/outer", ids));
        e.args.push_back(parse_expr(need(j, path, "inner"), path + "/inner", ids));
    } else if (op == "concat") {
        require_keys(j, path, {"op", "parts"});
        e.op = NetExpr::Op::concat;
        const json& parts = need(j, path, "parts");
        if (!parts.is_array() || parts.size() < 2)
            fail(path + "/parts", "expected an array of at least two parts");
        for (std::size_t i = 0; i < parts.size(); ++i)
            e.args.push_back(parse_expr(parts[i],
                                        path + "/parts/" + std::to_string(i),
                                        ids));
    } else if (op == "feedback") {
        require_keys(j, path, {"op", "of", "out", "in"});
        e.op = NetExpr::Op::feedback;
        e.args.push_back(parse_expr(need(j, path, "of"), path + "/of", ids));
        e.out_port = need_port_index(j, path, "out");
        e.in_port = need_port_index(j, path, "in");
    } else {
        fail(path + "/op", "unknown op \"" + op + "\"");
    }
    return e;
}

json emit_expr(const NetExpr& e) {
    json j;
    switch (e.op) {
        case NetExpr::Op::ref:
            return json(e.id);  // shorthand form
        case NetExpr::Op::series:
            j["op"] = "series";
            j["outer"] = emit_expr(e.args[0]);
            j["inner"] = emit_expr(e.args[1]);
            return j;
        case NetExpr::Op::concat: {
            j["op"] = "concat";
            json parts = json::array();
            for (const NetExpr& a : e.args) parts.push_back(emit_expr(a));
            j["parts"] = std::move(parts);
            return j;
        }
        case NetExpr::Op::feedback:
            j["op"] = "feedback";
            j["of"] = emit_expr(e.args[0]);
            j["out"] = static_cast<long long>(e.out_port);
            j["in"] = static_cast<long long>(e.in_port);
            return j;
    }
    throw Error("emit_expr: corrupt node");
}

CircuitExpr to_circuit_expr(const NetExpr& e,
                            const std::map<std::string, const NetComponent*>&
                                table) {
    switch (e.op) {
        case NetExpr::Op::ref:
            return CircuitExpr::leaf(build_component(*table.at(e.id)), e.id);
        case NetExpr::Op::series:
            return CircuitExpr::chain(to_circuit_expr(e.args[0], table),
                                      to_circuit_expr(e.args[1], table));
        case NetExpr::Op::concat: {
            CircuitExpr acc = to_circuit_expr(e.args[0], table);
            for (std::size_t i = 1; i < e.args.size(); ++i)
                acc = CircuitExpr::concat(std::move(acc),
                                          to_circuit_expr(e.args[i], table));
            return acc;
        }
        case NetExpr::Op::feedback:
            return CircuitExpr::loop(to_circuit_expr(e.args[0], table),
                                     e.out_port, e.in_port);
    }
    throw Error("to_circuit_expr: corrupt node");
}

// ---- sections ----

NetComponent parse_component(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a component object");
    require_keys(j, path, {"id", "type", "params"});
    NetComponent c;
    c.id = need_string(j, path, "id");
    if (c.id.empty()) fail(path + "/id", "id must be nonempty");
    c.type = need_string(j, path, "type");
    const json& params = need(j, path, "params");
    if (!params.is_object()) fail(path + "/params", "expected an object");
    for (const auto& item : params.items()) {
        const std::string ppath = path + "/params/" + item.key();
        const json& v = item.value();
        if (v.is_number()) {
            c.scalar[item.key()] = v.get<double>();
        } else if (v.is_array()) {
            std::vector<double> xs;
            for (const json& x : v) {
                if (!x.is_number()) fail(ppath, "expected an array of numbers");
                xs.push_back(x.get<double>());
            }
            c.list[item.key()] = std::move(xs);
        } else {
            fail(ppath, "expected a number or an array of numbers");
        }
    }
    return c;
}

NoiseSpec parse_noise(const json& j, const std::string& path,
                      Eigen::Index n_ports) {
    if (!j.is_array()) fail(path, "expected an array of port entries");
    if (static_cast<Eigen::Index>(j.size()) != n_ports)
        throw PortArityMismatch(path + ": expected " +
                                std::to_string(n_ports) +
                                " entries for the circuit ports, got " +
                                std::to_string(j.size()));
    NoiseSpec spec(static_cast<std::size_t>(n_ports));
    std::vector<bool> seen(static_cast<std::size_t>(n_ports), false);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string epath = path + "/" + std::to_string(i);
        const json& entry = j[i];
        if (!entry.is_object()) fail(epath, "expected a noise object");
        require_keys(entry, epath, {"port", "kind", "occupation"});
        const Eigen::Index port = need_port_index(entry, epath, "port");
        if (port >= n_ports) fail(epath + "/port", "port index out of range");
        if (seen[static_cast<std::size_t>(port)])
            fail(epath + "/port", "duplicate entry for port " +
                                      std::to_string(port));
        seen[static_cast<std::size_t>(port)] = true;
        const std::string kind = need_string(entry, epath, "kind");
        PortNoise& slot = spec[static_cast<std::size_t>(port)];
        if (kind == "vacuum") {
            if (entry.contains("occupation"))
                fail(epath + "/occupation", "vacuum ports carry no occupation");
            slot = vacuum_port();
        } else if (kind == "thermal") {
            const double occ = need_number(entry, epath, "occupation");
            if (occ < 0.0) fail(epath + "/occupation", "must be >= 0");
            slot = thermal_port(occ);
        } else {
            fail(epath + "/kind", "expected \"vacuum\" or \"thermal\"");
        }
    }
    return spec;
}

CostSpec parse_cost(const json& j, const std::string& path,
                    Eigen::Index n_modes) {
    if (!j.is_object()) fail(path, "expected a cost object");
    require_keys(j, path, {"mode", "weights"});
    const bool has_mode = j.contains("mode");
    const bool has_weights = j.contains("weights");
    if (has_mode == has_weights)
        fail(path, "expected exactly one of \"mode\" or \"weights\"");
    CostSpec cost;
    if (has_mode) {
        cost.mode = need_port_index(j, path, "mode");
        if (cost.mode >= n_modes)
            fail(path + "/mode", "mode index out of range for " +
                                     std::to_string(n_modes) + " modes");
        return cost;
    }
    const json& w = j["weights"];
    const auto dim = static_cast<Eigen::Index>(w.is_array() ? w.size() : 0);
    if (dim != 2 * n_modes)
        fail(path + "/weights", "expected a " + std::to_string(2 * n_modes) +
                                    "-row square matrix");
    Mat q(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const json& row = w[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim)
            fail(path + "/weights/" + std::to_string(r),
                 "expected a row of " + std::to_string(dim) + " numbers");
        for (Eigen::Index cidx = 0; cidx < dim; ++cidx) {
            const json& x = row[static_cast<std::size_t>(cidx)];
            if (!x.is_number())
                fail(path + "/weights/" + std::to_string(r), "expected numbers");
            q(r, cidx) = x.get<double>();
        }
    }
    cost.weights = std::move(q);
    return cost;
}

LoopSpec parse_loop(const json& j, const std::string& path,
                    Eigen::Index n_ports) {
    if (!j.is_object()) fail(path, "expected a loop object");
    require_keys(j, path, {"sense_port", "drive_port"});
    LoopSpec lp;
    lp.sense_port = need_port_index(j, path, "sense_port");
    lp.drive_port = need_port_index(j, path, "drive_port");
    if (lp.sense_port >= n_ports || lp.drive_port >= n_ports)
        throw PortArityMismatch(path + ": loop port out of range for " +
                                std::to_string(n_ports) + " ports");
    return lp;
}

ControllerChoice parse_controller(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a controller object");
    require_keys(j, path,
                 {"kind", "vary_couplings", "lock_couplings", "modes", "ports"});
    ControllerChoice cc;
    cc.kind = need_string(j, path, "kind");
    try {
        template_kind_by_name(cc.kind);
    } catch (const Error&) {
        fail(path + "/kind", "unknown controller kind \"" + cc.kind + "\"");
    }
    cc.vary_couplings = get_bool(j, path, "vary_couplings", false);
    cc.lock_couplings = get_bool(j, path, "lock_couplings", true);
    if (j.contains("modes")) cc.modes = need_port_index(j, path, "modes");
    if (j.contains("ports")) cc.ports = need_port_index(j, path, "ports");
    if (cc.modes < 1 || cc.ports < 1)
        fail(path, "modes and ports must be positive");
    return cc;
}

OptimizeOptions parse_optimizer(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an optimizer object");
    require_keys(j, path, {"max_iterations", "grad_tol", "n_restarts",
                           "warm_restarts", "seed", "fd_step"});
    OptimizeOptions o;
    if (j.contains("max_iterations")) {
        o.max_iterations =
            static_cast<int>(need_port_index(j, path, "max_iterations"));
        if (o.max_iterations < 1)
            fail(path + "/max_iterations", "must be positive");
    }
    if (j.contains("grad_tol")) {
        o.grad_tol = need_number(j, path, "grad_tol");
        if (o.grad_tol <= 0.0) fail(path + "/grad_tol", "must be > 0");
    }
    if (j.contains("n_restarts"))
        o.n_restarts = static_cast<int>(need_port_index(j, path, "n_restarts"));
    if (j.contains("warm_restarts"))
        o.warm_restarts =
            static_cast<int>(need_port_index(j, path, "warm_restarts"));
    if (j.contains("seed"))
        o.seed = static_cast<unsigned>(need_port_index(j, path, "seed"));
    if (j.contains("fd_step")) {
        o.fd_step = need_number(j, path, "fd_step");
        if (o.fd_step <= 0.0) fail(path + "/fd_step", "must be > 0");
    }
    return o;
}

std::map<std::string, ComponentInfo> component_infos(const Netlist& n) {
    std::map<std::string, ComponentInfo> infos;
    for (std::size_t i = 0; i < n.components.size(); ++i)
        infos[n.components[i].id] = validate_component(
            n.components[i], "/components/" + std::to_string(i));
    return infos;
}

}  // namespace

bool operator==(const Netlist& a, const Netlist& b) {
    if (a.components != b.components || !(a.circuit == b.circuit) ||
        a.loop != b.loop || a.controller != b.controller)
        return false;
    if (a.noise.size() != b.noise.size()) return false;
    for (std::size_t i = 0; i < a.noise.size(); ++i)
        if (a.noise[i].kind != b.noise[i].kind ||
            a.noise[i].occupation != b.noise[i].occupation)
            return false;
    if (a.cost.mode != b.cost.mode ||
        a.cost.weights.has_value() != b.cost.weights.has_value())
        return false;
    if (a.cost.weights &&
        (a.cost.weights->rows() != b.cost.weights->rows() ||
         a.cost.weights->cols() != b.cost.weights->cols() ||
         (*a.cost.weights - *b.cost.weights).cwiseAbs().maxCoeff() != 0.0))
        return false;
    if (a.optimizer.has_value() != b.optimizer.has_value()) return false;
    if (a.optimizer) {
        const OptimizeOptions& x = *a.optimizer;
        const OptimizeOptions& y = *b.optimizer;
        if (x.max_iterations != y.max_iterations || x.grad_tol != y.grad_tol ||
            x.n_restarts != y.n_restarts ||
            x.warm_restarts != y.warm_restarts || x.seed != y.seed ||
            x.fd_step != y.fd_step)
            return false;
    }
    return true;
}

Netlist parse_netlist(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SyntaxError(std::string("netlist: ") + e.what());
    }
    if (!j.is_object()) fail("", "root must be an object");
    require_keys(j, "", {"schema", "components", "circuit", "noise", "cost",
                         "loop", "controller", "optimizer"});
    if (need_string(j, "", "schema") != "qlc/1")
        fail("/schema", "expected \"qlc/1\"");

    Netlist n;
    const json& comps = need(j, "", "components");
    if (!comps.is_array() || comps.empty())
        fail("/components", "expected a nonempty array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string path = "/components/" + std::to_string(i);
        NetComponent c = parse_component(comps[i], path);
        if (!ids.insert(c.id).second)
            fail(path + "/id", "duplicate id \"" + c.id + "\"");
        n.components.push_back(std::move(c));
    }
    const auto infos = component_infos(n);

    n.circuit = parse_expr(need(j, "", "circuit"), "/circuit", ids);
    const ExprShape shape = expr_shape(n.circuit, infos, "/circuit");

    n.noise = parse_noise(need(j, "", "noise"), "/noise", shape.ports);
    n.cost = parse_cost(need(j, "", "cost"), "/cost", shape.modes);
    if (j.contains("loop")) n.loop = parse_loop(j["loop"], "/loop", shape.ports);
    if (j.contains("controller"))
        n.controller = parse_controller(j["controller"], "/controller");
    if (j.contains("optimizer"))
        n.optimizer = parse_optimizer(j["optimizer"], "/optimizer");
    return n;
}

Netlist load_netlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_netlist: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_netlist(buf.str());
}

std::string emit_netlist(const Netlist& n) {
    json j;
    j["schema"] = "qlc/1";
    json comps = json::array();
    for (const NetComponent& c : n.components) {
        json jc;
        jc["id"] = c.id;
        jc["type"] = c.type;
        json params;
        for (const auto& [k, v] : c.scalar) params[k] = v;
        for (const auto& [k, v] : c.list) params[k] = v;
        jc["params"] = params.is_null() ? json::object() : params;
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    j["circuit"] = emit_expr(n.circuit);
    json noise = json::array();
    for (std::size_t i = 0; i < n.noise.size(); ++i) {
        json e;
        e["port"] = i;
        e["kind"] = n.noise[i].kind == NoiseKind::vacuum ? "vacuum" : "thermal";
        if (n.noise[i].kind == NoiseKind::thermal)
            e["occupation"] = n.noise[i].occupation;
        noise.push_back(std::move(e));
    }
    j["noise"] = std::move(noise);
    json cost;
    if (n.cost.weights) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < n.cost.weights->rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < n.cost.weights->cols(); ++c)
                row.push_back((*n.cost.weights)(r, c));
            rows.push_back(std::move(row));
        }
        cost["weights"] = std::move(rows);
    } else {
        cost["mode"] = static_cast<long long>(n.cost.mode);
    }
    j["cost"] = std::move(cost);
    if (n.loop) {
        j["loop"] = {{"sense_port", static_cast<long long>(n.loop->sense_port)},
                     {"drive_port", static_cast<long long>(n.loop->drive_port)}};
    }
    if (n.controller) {
        j["controller"] = {{"kind", n.controller->kind},
                           {"vary_couplings", n.controller->vary_couplings},
                           {"lock_couplings", n.controller->lock_couplings},
                           {"modes", static_cast<long long>(n.controller->modes)},
                           {"ports", static_cast<long long>(n.controller->ports)}};
    }
    if (n.optimizer) {
        j["optimizer"] = {{"max_iterations", n.optimizer->max_iterations},
                          {"grad_tol", n.optimizer->grad_tol},
                          {"n_restarts", n.optimizer->n_restarts},
                          {"warm_restarts", n.optimizer->warm_restarts},
                          {"seed", n.optimizer->seed},
                          {"fd_step", n.optimizer->fd_step}};
    }
    return j.dump(2) + "\n";
}

LinearSLH build_circuit(const Netlist& n) {
    component_infos(n);  // re-validate before building
    std::map<std::string, const NetComponent*> table;
    for (const NetComponent& c : n.components) table[c.id] = &c;
    return to_circuit_expr(n.circuit, table).evaluate();
}

ClosedLoop build_closed_loop(const Netlist& n) {
    ClosedLoop loop;
    loop.ss = to_statespace(build_circuit(n));
    loop.noise = n.noise;
    loop.cost = n.cost;
    loop.probe_port = n.loop ? n.loop->sense_port : 0;
    return loop;
}

ClosedLoop build_closed_loop(const Netlist& n, const StateSpace& ctrl) {
    const LoopSpec lp = n.loop.value_or(LoopSpec{});
    const StateSpace plant = to_statespace(build_circuit(n));
    if (ctrl.in_ports() < 1 || ctrl.out_ports() < 1)
        throw DimensionMismatch("build_closed_loop: controller needs port 0");

    Wiring w;
    w.plant_to_ctrl.push_back({lp.sense_port, 0});
    w.ctrl_to_plant.push_back({0, lp.drive_port});

    ClosedLoop loop;
    loop.ss = interconnect(plant, ctrl, w);
    for (std::size_t i = 0; i < n.noise.size(); ++i)
        if (static_cast<Eigen::Index>(i) != lp.drive_port)
            loop.noise.push_back(n.noise[i]);
    for (Eigen::Index i = 1; i < ctrl.in_ports(); ++i)
        loop.noise.push_back(vacuum_port());
    loop.cost = n.cost;
    loop.probe_port = 0;
    return loop;
}

namespace {

// A benchmark document is a single plant component referenced directly,
// vacuum everywhere except a thermal last port, and default loop wiring.
const NetComponent* single_plant(const Netlist& n, const std::string& type) {
    if (n.components.size() != 1 || n.components[0].type != type)
        return nullptr;
    if (n.circuit.op != NetExpr::Op::ref ||
        n.circuit.id != n.components[0].id)
        return nullptr;
    if (n.noise.size() != 3 || n.noise[0].kind != NoiseKind::vacuum ||
        n.noise[1].kind != NoiseKind::vacuum ||
        n.noise[2].kind != NoiseKind::thermal)
        return nullptr;
    if (n.loop && (n.loop->sense_port != 0 || n.loop->drive_port != 1))
        return nullptr;
    return &n.components[0];
}

}  // namespace

std::optional<CavityScenario> as_cavity_scenario(const Netlist& n) {
    const NetComponent* c = single_plant(n, "cavity");
    if (!c) return std::nullopt;
    const std::vector<double>& k = c->list.at("kappas");
    if (k.size() != 3) return std::nullopt;
    return CavityScenario{k[0], k[1], k[2], c->scalar.at("delta"),
                          n.noise[2].occupation};
}

std::optional<OptomechScenario> as_optomech_scenario(const Netlist& n) {
    const NetComponent* c = single_plant(n, "optomech");
    if (!c) return std::nullopt;
    OptomechScenario sc;
    sc.omega = c->scalar.at("omega");
    sc.q_factor = c->scalar.at("q_factor");
    sc.k_n = n.noise[2].occupation;
    sc.coupling1 = c->scalar.at("coupling1");
    if (c->scalar.count("coupling2")) {
        sc.lock_couplings = false;
        sc.coupling2 = c->scalar.at("coupling2");
    }
    return sc;
}

TemplateKind template_kind_by_name(const std::string& name) {
    if (name == "trivial") return TemplateKind::trivial_phase;
    if (name == "cavity") return TemplateKind::cavity;
    if (name == "opo") return TemplateKind::opo;
    if (name == "squeezer") return TemplateKind::static_squeezer;
    if (name == "two_mode") return TemplateKind::static_two_mode;
    if (name == "homodyne") return TemplateKind::classical_homodyne;
    if (name == "heterodyne") return TemplateKind::classical_heterodyne;
    if (name == "general") return TemplateKind::general_coherent;
    throw InvalidKindParams("template_kind_by_name: unknown kind \"" + name +
                            "\"");
}

std::string template_kind_name(TemplateKind kind) {
    switch (kind) {
        case TemplateKind::trivial_phase: return "trivial";
        case TemplateKind::cavity: return "cavity";
        case TemplateKind::opo: return "opo";
        case TemplateKind::static_squeezer: return "squeezer";
        case TemplateKind::static_two_mode: return "two_mode";
        case TemplateKind::classical_homodyne: return "homodyne";
        case TemplateKind::classical_heterodyne: return "heterodyne";
        case TemplateKind::general_coherent: return "general";
    }
    throw InvalidKindParams("template_kind_name: unknown kind");
}

}  // namespace qlc
